#pragma once

// Umbrella header for the numerical library. The CLI front end (cqed/cli.hpp)
// and the file writers (cqed/report.hpp) are included separately.
#include "cqed/analysis.hpp"
#include "cqed/analytic.hpp"
#include "cqed/core_model.hpp"
#include "cqed/error.hpp"
#include "cqed/numeric.hpp"
#include "cqed/units.hpp"
