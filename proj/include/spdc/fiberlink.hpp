#ifndef SPDC_FIBERLINK_HPP
#define SPDC_FIBERLINK_HPP

// Idler transmission through standard single-mode telecom fiber: chromatic
// dispersion via the ITU G.652 envelope law
//   D(l) = S0/4 (l - l0^4 / l^3)   [ps/(nm km)]
// attenuation budget, accidental-driven visibility degradation, and
// time-of-flight spectroscopy inversion.

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "spdc/entanglement.hpp"
#include "spdc/errors.hpp"
#include "spdc/version.hpp"

namespace spdc {

struct LinkParams {
  std::string name;
  double length_km = 0.0;
  double attenuation_db = 0.0;        // total measured loss on the idler arm
  double s0_ps_nm2_km = 0.092;        // zero-dispersion slope S0
  double lambda0_nm = 1300.0;         // zero-dispersion wavelength
  double dark_rate_signal_per_s = 0.0;
  double dark_rate_idler_per_s = 0.0;
};

// Standard single-mode fiber envelope (G.652); defaults are the worst case
// that reproduces the paper's 226 ps bound.
inline void validate(const LinkParams& l) {
  if (l.length_km <= 0.0) throw ValidationError("fiber length must be positive");
  if (l.attenuation_db < 0.0)
    throw ValidationError("attenuation must be >= 0 dB");
  if (l.s0_ps_nm2_km < 0.073 || l.s0_ps_nm2_km > 0.092)
    throw ValidationError("S0 outside the standard SMF envelope "
                          "[0.073, 0.092] ps/(nm^2 km)");
  if (l.lambda0_nm < 1300.0 || l.lambda0_nm > 1324.0)
    throw ValidationError("lambda0 outside the standard SMF envelope "
                          "[1300, 1324] nm");
  if (l.dark_rate_signal_per_s < 0.0 || l.dark_rate_idler_per_s < 0.0)
    throw ValidationError("dark rates must be >= 0");
}

// Chromatic dispersion coefficient in ps/(nm km); l restricted to the
// fiber transmission band.
inline double dispersion_coefficient(const LinkParams& l, double lambda_nm) {
  validate(l);
  if (lambda_nm < 1260.0 || lambda_nm > 1625.0)
    throw OutOfRangeError("wavelength " + std::to_string(lambda_nm) +
                          " nm outside the fiber band [1260, 1625] nm");
  const double r = l.lambda0_nm / lambda_nm;
  return 0.25 * l.s0_ps_nm2_km *
         (lambda_nm - l.lambda0_nm * r * r * r);
}

// Arrival-time spread dt = D(l) L dl in ps for spectral width dl.
inline double dispersion_broadening(const LinkParams& l, double lambda_nm,
                                    double linewidth_nm) {
  if (linewidth_nm <= 0.0) throw ValidationError("linewidth must be positive");
  return dispersion_coefficient(l, lambda_nm) * l.length_km * linewidth_nm;
}

// Time-of-flight spectroscopy: exact inverse of dispersion_broadening.
inline double tof_linewidth(double spread_ps, const LinkParams& l,
                            double lambda_nm) {
  const double dl = dispersion_coefficient(l, lambda_nm) * l.length_km;
  if (dl <= 0.0)
    throw ValidationError("D(lambda) L must be positive for time-of-flight "
                          "inversion");
  return spread_ps / dl;
}

struct LinkBudget {
  double received_pair_rate_per_s = 0.0;
  double signal_singles_per_s = 0.0;
  double idler_singles_per_s = 0.0;
  double accidental_rate_per_s = 0.0;
  double predicted_raw_visibility = 0.0;
  double predicted_s = 0.0;
};

// Attenuate the idler arm, keep local signal singles, recompute accidentals
// and degrade the source's corrected visibility by the new accidental
// fraction. Polarization effects in deployed fiber are not modeled, so the
// prediction is an optimistic consistency bound.
inline LinkBudget link_budget(const SourceModel& m, const LinkParams& l) {
  validate(m);
  validate(l);
  if (m.eta_signal <= 0.0 || m.eta_idler <= 0.0)
    throw ValidationError("heralding efficiencies must be positive");
  const double transmission = std::pow(10.0, -l.attenuation_db / 10.0);
  LinkBudget b;
  b.received_pair_rate_per_s = m.pair_rate_per_s * transmission;
  b.signal_singles_per_s =
      m.pair_rate_per_s / m.eta_idler + l.dark_rate_signal_per_s;
  b.idler_singles_per_s =
      m.pair_rate_per_s / m.eta_signal * transmission +
      l.dark_rate_idler_per_s;
  b.accidental_rate_per_s =
      b.signal_singles_per_s * b.idler_singles_per_s * m.window_ns * 1e-9;
  const double v_source = 0.5 * (m.v_hv + m.v_da);
  const double denom =
      b.received_pair_rate_per_s + 2.0 * b.accidental_rate_per_s;
  b.predicted_raw_visibility =
      denom > 0.0 ? v_source * b.received_pair_rate_per_s / denom : 0.0;
  b.predicted_s = chsh_from_visibility(b.predicted_raw_visibility);
  return b;
}

// ---------------------------------------------------------------------------
// Link preset files

inline LinkParams parse_link_json(const nlohmann::json& j,
                                  const std::string& ctx) {
  const auto get = [&](const char* key) -> const nlohmann::json& {
    auto it = j.find(key);
    if (it == j.end())
      throw ParseError("missing field '" + std::string(key) + "' in " + ctx);
    return *it;
  };
  const int version = get("schema_version").get<int>();
  if (version != kLinkSchemaVersion)
    throw ParseError("unsupported link schema_version " +
                     std::to_string(version) + " in " + ctx);
  LinkParams l;
  l.name = get("name").get<std::string>();
  l.length_km = get("length_km").get<double>();
  l.attenuation_db = get("attenuation_db").get<double>();
  l.s0_ps_nm2_km = get("s0_ps_nm2_km").get<double>();
  l.lambda0_nm = get("lambda0_nm").get<double>();
  if (j.contains("dark_rate_signal_per_s"))
    l.dark_rate_signal_per_s = j["dark_rate_signal_per_s"].get<double>();
  if (j.contains("dark_rate_idler_per_s"))
    l.dark_rate_idler_per_s = j["dark_rate_idler_per_s"].get<double>();
  validate(l);
  return l;
}

inline LinkParams load_link(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open link file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in '" + path + "': " + e.what());
  }
  return parse_link_json(j, path);
}

}  // namespace spdc

#endif
