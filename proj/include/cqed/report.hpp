#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cqed/analysis.hpp"
#include "cqed/analytic.hpp"
#include "cqed/core_model.hpp"
#include "cqed/numeric.hpp"
#include "cqed/units.hpp"

// Deterministic text renderings of results. Files carry GHz and ns only; the
// human-readable efficiency summary uses ps for pulse times.
namespace cqed::io {

using Json = nlohmann::ordered_json;

/// CSV numbers: 9 significant digits.
inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

/// Finite doubles as JSON numbers (shortest round-trip form); inf as null.
inline Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json params_json(const SystemParams& p) {
  Json j;
  j["g0_ghz"] = units::rad_per_ns_to_ghz(p.g0);
  j["kappa_ghz"] = units::rad_per_ns_to_ghz(p.kappa);
  j["gamma_ghz"] = units::rad_per_ns_to_ghz(p.gamma);
  j["delta_ghz"] = units::rad_per_ns_to_ghz(p.delta);
  if (p.gamma0) j["gamma0_ghz"] = units::rad_per_ns_to_ghz(*p.gamma0);
  return j;
}

// --- efficiency -------------------------------------------------------------

struct EfficiencyReport {
  SystemParams params;
  DerivedRates rates;
  RegimeLabel regime;
  EfficiencyBreakdown breakdown;
  std::optional<EmissionMetrics> pulse;  ///< resonant systems only
  std::optional<double> eta_q_numeric;   ///< detuned systems only
};

inline EfficiencyReport make_efficiency_report(const SystemParams& p, const IntegrationConfig& ic) {
  EfficiencyReport r;
  r.params = p;
  r.rates = derive_rates(p);
  r.regime = classify_regime(p, r.rates);
  r.breakdown = compare_law_kimble(p);
  if (p.resonant())
    r.pulse = pulse_metrics(p);
  else
    r.eta_q_numeric = efficiency_numeric(p, ic);
  return r;
}

inline std::string efficiency_text(const EfficiencyReport& r) {
  std::string s;
  auto line = [&](std::string_view key, const std::string& value) {
    s.append(key).append("=").append(value).append("\n");
  };
  const auto& b = r.breakdown;
  line("eta_q", fixed6(b.eta_q));
  line("eta_c", fixed6(b.eta_c));
  line("eta_extr", fixed6(b.eta_extr));
  line("C0", std::isinf(r.rates.C0) ? std::string("inf") : fixed6(r.rates.C0));
  line("coupling", std::string(to_string(r.regime.coupling)));
  line("cavity", std::string(to_string(r.regime.cavity)));
  line("law_kimble", fixed6(b.law_kimble));
  line("law_kimble_error", fixed6(b.law_kimble_error));
  if (r.rates.Fp) {
    line("Fp", fixed6(*r.rates.Fp));
    line("f", fixed6(*r.rates.f));
    line("beta", fixed6(*r.rates.beta));
  }
  if (r.pulse) {
    line("fwhm_ps", fixed6(units::ns_to_ps(r.pulse->fwhm)));
    line("peak_time_ps", fixed6(units::ns_to_ps(r.pulse->peak_time)));
  }
  if (r.eta_q_numeric) line("eta_q_numeric", fixed6(*r.eta_q_numeric));
  return s;
}

inline std::string efficiency_json(const EfficiencyReport& r) {
  Json j;
  j["params"] = params_json(r.params);
  const auto& b = r.breakdown;
  j["eta_q"] = b.eta_q;
  j["eta_c"] = b.eta_c;
  j["eta_extr"] = b.eta_extr;
  j["C0"] = json_number(r.rates.C0);
  j["coupling"] = to_string(r.regime.coupling);
  j["cavity"] = to_string(r.regime.cavity);
  j["law_kimble"] = b.law_kimble;
  j["law_kimble_error"] = b.law_kimble_error;
  if (r.rates.Fp) {
    j["Fp"] = *r.rates.Fp;
    j["f"] = *r.rates.f;
    j["beta"] = *r.rates.beta;
  }
  if (r.pulse) {
    j["fwhm_ns"] = r.pulse->fwhm;
    j["peak_time_ns"] = r.pulse->peak_time;
    j["peak_rate_per_ns"] = r.pulse->peak_rate;
    j["multi_lobe"] = r.pulse->multi_lobe;
  }
  if (r.eta_q_numeric) j["eta_q_numeric"] = *r.eta_q_numeric;
  return j.dump(2) + "\n";
}

// --- trajectory -------------------------------------------------------------

inline std::string trajectory_csv(const AmplitudeTrajectory& traj, bool reference) {
  const bool with_ref = reference && traj.params.resonant();
  std::string s = "t_ns,re_E,im_E,re_C,im_C,abs2_E,abs2_C,P_out,P_spont,n_rate,ledger_residual";
  if (with_ref) s += ",re_E_ref,im_E_ref,re_C_ref,im_C_ref";
  s += "\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double row[] = {traj.times[i],     traj.E[i].real(),     traj.E[i].imag(),
                          traj.C[i].real(),  traj.C[i].imag(),     std::norm(traj.E[i]),
                          std::norm(traj.C[i]), traj.P_out[i],     traj.P_spont[i],
                          traj.rate(i),      traj.ledger_residual(i)};
    for (std::size_t c = 0; c < std::size(row); ++c) {
      if (c) s += ',';
      s += csv_number(row[c]);
    }
    if (with_ref) {
      const auto a = amplitudes_at(traj.params, traj.times[i]);
      for (double v : {a.E.real(), a.E.imag(), a.C.real(), a.C.imag()}) s += ',' + csv_number(v);
    }
    s += '\n';
  }
  return s;
}

inline std::string trajectory_json(const AmplitudeTrajectory& traj, bool reference) {
  Json j;
  j["params"] = params_json(traj.params);
  j["step_ns"] = traj.step;
  Json t = Json::array(), reE = Json::array(), imE = Json::array(), reC = Json::array(),
       imC = Json::array(), po = Json::array(), ps = Json::array(), res = Json::array();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    t.push_back(traj.times[i]);
    reE.push_back(traj.E[i].real());
    imE.push_back(traj.E[i].imag());
    reC.push_back(traj.C[i].real());
    imC.push_back(traj.C[i].imag());
    po.push_back(traj.P_out[i]);
    ps.push_back(traj.P_spont[i]);
    res.push_back(traj.ledger_residual(i));
  }
  j["t_ns"] = std::move(t);
  j["re_E"] = std::move(reE);
  j["im_E"] = std::move(imE);
  j["re_C"] = std::move(reC);
  j["im_C"] = std::move(imC);
  j["P_out"] = std::move(po);
  j["P_spont"] = std::move(ps);
  j["ledger_residual"] = std::move(res);
  if (reference && traj.params.resonant()) {
    Json er = Json::array(), ei = Json::array(), cr = Json::array(), ci = Json::array();
    for (double ti : traj.times) {
      const auto a = amplitudes_at(traj.params, ti);
      er.push_back(a.E.real());
      ei.push_back(a.E.imag());
      cr.push_back(a.C.real());
      ci.push_back(a.C.imag());
    }
    j["re_E_ref"] = std::move(er);
    j["im_E_ref"] = std::move(ei);
    j["re_C_ref"] = std::move(cr);
    j["im_C_ref"] = std::move(ci);
  }
  return j.dump() + "\n";
}

// --- sweep ------------------------------------------------------------------

inline std::string sweep_csv(const SweepResult& r) {
  std::string s = "axis_value,eta_q,fwhm_ns,peak_time_ns,regime,error\n";
  for (const auto& pt : r.points) {
    s += csv_number(units::rad_per_ns_to_ghz(pt.value));
    if (pt.metrics) {
      s += ',' + csv_number(pt.metrics->eta_q) + ',' + csv_number(pt.metrics->fwhm) + ',' +
           csv_number(pt.metrics->peak_time) + ',' + to_string(pt.metrics->regime) + ",\n";
    } else {
      std::string msg = pt.error;
      for (char& c : msg)
        if (c == ',' || c == '\n' || c == '"') c = ' ';
      s += ",,,,," + msg + "\n";
    }
  }
  return s;
}

inline std::string sweep_json(const SweepResult& r) {
  Json j;
  j["axis"] = to_string(r.axis);
  j["axis_unit"] = "GHz";
  j["route"] = to_string(r.route);
  Json rows = Json::array();
  for (const auto& pt : r.points) {
    Json row;
    row["axis_value"] = units::rad_per_ns_to_ghz(pt.value);
    if (pt.metrics) {
      row["eta_q"] = pt.metrics->eta_q;
      row["fwhm_ns"] = pt.metrics->fwhm;
      row["peak_time_ns"] = pt.metrics->peak_time;
      row["peak_rate_per_ns"] = pt.metrics->peak_rate;
      row["multi_lobe"] = pt.metrics->multi_lobe;
      row["regime"] = to_string(pt.metrics->regime);
    } else {
      row["error"] = pt.error;
    }
    rows.push_back(std::move(row));
  }
  j["points"] = std::move(rows);
  return j.dump(2) + "\n";
}

// --- optimization -----------------------------------------------------------

inline std::string optimization_csv(const OptimizationReport& r) {
  return "kappa_star_ghz,eta_q_star,iterations,bracket_lo_ghz,bracket_hi_ghz,boundary,flat\n" +
         csv_number(units::rad_per_ns_to_ghz(r.kappa_star)) + ',' + csv_number(r.eta_q_star) + ',' +
         std::to_string(r.iterations) + ',' + csv_number(units::rad_per_ns_to_ghz(r.bracket.first)) +
         ',' + csv_number(units::rad_per_ns_to_ghz(r.bracket.second)) + ',' +
         std::string(to_string(r.boundary)) + ',' + (r.flat ? "true" : "false") + "\n";
}

inline std::string optimization_json(const OptimizationReport& r) {
  Json j;
  j["kappa_star_ghz"] = units::rad_per_ns_to_ghz(r.kappa_star);
  j["eta_q_star"] = r.eta_q_star;
  j["iterations"] = r.iterations;
  j["bracket_lo_ghz"] = units::rad_per_ns_to_ghz(r.bracket.first);
  j["bracket_hi_ghz"] = units::rad_per_ns_to_ghz(r.bracket.second);
  j["boundary"] = to_string(r.boundary);
  j["flat"] = r.flat;
  return j.dump(2) + "\n";
}

// --- spectrum ---------------------------------------------------------------

/// Density per GHz on a GHz axis, so that sum(S) * d(delta_ghz) is a probability.
inline double density_per_ghz(double density_per_rad) { return units::two_pi * density_per_rad; }

inline std::string spectrum_csv(const SpectrumGrid& s) {
  std::string out = "delta_ghz,S\n";
  for (std::size_t i = 0; i < s.delta.size(); ++i)
    out += csv_number(units::rad_per_ns_to_ghz(s.delta[i])) + ',' +
           csv_number(density_per_ghz(s.density[i])) + '\n';
  return out;
}

inline std::string spectrum_json(const SpectrumGrid& s) {
  Json j;
  Json d = Json::array(), v = Json::array();
  for (std::size_t i = 0; i < s.delta.size(); ++i) {
    d.push_back(units::rad_per_ns_to_ghz(s.delta[i]));
    v.push_back(density_per_ghz(s.density[i]));
  }
  j["delta_ghz"] = std::move(d);
  j["S_per_ghz"] = std::move(v);
  return j.dump() + "\n";
}

}  // namespace cqed::io
