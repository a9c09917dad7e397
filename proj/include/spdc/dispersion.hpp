#ifndef SPDC_DISPERSION_HPP
#define SPDC_DISPERSION_HPP

// Temperature-dependent refractive-index models for nonlinear crystals.
//
// A crystal is described by one dispersion model per principal axis:
//   n(lambda, T) = sellmeier(lambda) + thermal_delta(lambda, T)
// where the Sellmeier part is evaluated at the model's reference temperature
// and the thermal part vanishes there by construction.
//
// Conventions: vacuum wavelengths in nm at the API boundary (converted to um
// internally, which is what every coefficient set expects), temperatures in
// degrees Celsius. Evaluation outside the validity ranges declared in the
// crystal data file is a hard error, never extrapolation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spdc/errors.hpp"
#include "spdc/version.hpp"

namespace spdc {

// ---------------------------------------------------------------------------
// Functional forms

// n^2 = A + B/(1 - C/l^2) + D/(1 - E/l^2) - F*l^2, l in um.
// Single-pole fits use D = E = 0.
enum class SellmeierForm {
  RationalTwoPole,
  Gayer2008,  // MgO:LiNbO3 style, temperature folded into the coefficients
};

enum class ThermalForm {
  None,                // dn = 0 (no thermal dispersion data encoded)
  DeltaPolyQuadratic,  // dn = n1(l)*dT + n2(l)*dT^2, n1/n2 cubic in 1/l
  Gayer2008Delta,      // dn = n_gayer(l,T) - n_gayer(l,Tref)
};

inline const char* to_string(SellmeierForm f) {
  switch (f) {
    case SellmeierForm::RationalTwoPole: return "rational_two_pole";
    case SellmeierForm::Gayer2008: return "gayer2008";
  }
  return "?";
}

inline const char* to_string(ThermalForm f) {
  switch (f) {
    case ThermalForm::None: return "none";
    case ThermalForm::DeltaPolyQuadratic: return "delta_poly_quadratic";
    case ThermalForm::Gayer2008Delta: return "gayer2008_delta";
  }
  return "?";
}

inline SellmeierForm sellmeier_form_from_string(const std::string& s) {
  if (s == "rational_two_pole") return SellmeierForm::RationalTwoPole;
  if (s == "gayer2008") return SellmeierForm::Gayer2008;
  throw ValidationError("unknown sellmeier form_id '" + s + "'");
}

inline ThermalForm thermal_form_from_string(const std::string& s) {
  if (s == "none") return ThermalForm::None;
  if (s == "delta_poly_quadratic") return ThermalForm::DeltaPolyQuadratic;
  if (s == "gayer2008_delta") return ThermalForm::Gayer2008Delta;
  throw ValidationError("unknown thermal form_id '" + s + "'");
}

inline std::size_t coefficient_count(SellmeierForm f) {
  return f == SellmeierForm::RationalTwoPole ? 6u : 10u;
}

inline std::size_t coefficient_count(ThermalForm f) {
  switch (f) {
    case ThermalForm::None: return 0u;
    case ThermalForm::DeltaPolyQuadratic: return 8u;
    case ThermalForm::Gayer2008Delta: return 10u;
  }
  return 0u;
}

struct SellmeierModel {
  SellmeierForm form = SellmeierForm::RationalTwoPole;
  std::vector<double> coefficients;  // ordered, um-based, see data/SCHEMA.md
  double reference_temperature_c = 25.0;
};

struct ThermalModel {
  ThermalForm form = ThermalForm::None;
  std::vector<double> coefficients;
};

namespace detail {

// Gayer-style evaluation: value and partials of n at (l, T).
// coef = [a1..a6, b1..b4], f = (T - 24.5)(T + 570.82).
struct GayerEval {
  double n, dn_dl, dn_dT;
};

inline GayerEval gayer_eval(const std::vector<double>& c, double l_um,
                            double t_c) {
  const double a1 = c[0], a2 = c[1], a3 = c[2], a4 = c[3], a5 = c[4],
               a6 = c[5], b1 = c[6], b2 = c[7], b3 = c[8], b4 = c[9];
  const double f = (t_c - 24.5) * (t_c + 570.82);
  const double df_dT = 2.0 * t_c + 546.32;
  const double l2 = l_um * l_um;
  const double P = a2 + b2 * f;
  const double Q = a3 + b3 * f;
  const double R = a4 + b4 * f;
  const double d1 = l2 - Q * Q;
  const double d2 = l2 - a5 * a5;
  const double n2 = a1 + b1 * f + P / d1 + R / d2 - a6 * l2;
  const double n = std::sqrt(n2);
  const double dn2_dl = -2.0 * l_um * (P / (d1 * d1) + R / (d2 * d2) + a6);
  const double dn2_df =
      b1 + b2 / d1 + P * (2.0 * Q * b3) / (d1 * d1) + b4 / d2;
  return {n, dn2_dl / (2.0 * n), dn2_df * df_dT / (2.0 * n)};
}

inline double poly_inv_cubic(const double* c, double inv_l) {
  return c[0] + inv_l * (c[1] + inv_l * (c[2] + inv_l * c[3]));
}

inline double poly_inv_cubic_dl(const double* c, double l_um) {
  const double il2 = 1.0 / (l_um * l_um);
  return -il2 * (c[1] + (2.0 * c[2] + 3.0 * c[3] / l_um) / l_um);
}

}  // namespace detail

// Sellmeier value at the reference temperature, lambda in um.
inline double sellmeier_value(const SellmeierModel& m, double l_um) {
  const auto& c = m.coefficients;
  if (m.form == SellmeierForm::RationalTwoPole) {
    const double l2 = l_um * l_um;
    double n2 = c[0] + c[1] / (1.0 - c[2] / l2) - c[5] * l2;
    if (c[3] != 0.0) n2 += c[3] / (1.0 - c[4] / l2);
    return std::sqrt(n2);
  }
  return detail::gayer_eval(c, l_um, m.reference_temperature_c).n;
}

inline double sellmeier_dlambda(const SellmeierModel& m, double l_um) {
  const auto& c = m.coefficients;
  if (m.form == SellmeierForm::RationalTwoPole) {
    const double l2 = l_um * l_um;
    const double l3 = l2 * l_um;
    const double u = 1.0 - c[2] / l2;
    double dn2 = -2.0 * c[1] * c[2] / (l3 * u * u) - 2.0 * c[5] * l_um;
    if (c[3] != 0.0) {
      const double w = 1.0 - c[4] / l2;
      dn2 += -2.0 * c[3] * c[4] / (l3 * w * w);
    }
    return dn2 / (2.0 * sellmeier_value(m, l_um));
  }
  return detail::gayer_eval(c, l_um, m.reference_temperature_c).dn_dl;
}

// Additive thermal correction dn(lambda, T) relative to tref; exactly zero
// at T = tref for every form.
inline double thermal_delta(const ThermalModel& m, double tref_c, double l_um,
                            double t_c) {
  switch (m.form) {
    case ThermalForm::None:
      return 0.0;
    case ThermalForm::DeltaPolyQuadratic: {
      const double dt = t_c - tref_c;
      const double il = 1.0 / l_um;
      return detail::poly_inv_cubic(m.coefficients.data(), il) * dt +
             detail::poly_inv_cubic(m.coefficients.data() + 4, il) * dt * dt;
    }
    case ThermalForm::Gayer2008Delta:
      return detail::gayer_eval(m.coefficients, l_um, t_c).n -
             detail::gayer_eval(m.coefficients, l_um, tref_c).n;
  }
  return 0.0;
}

inline double thermal_delta_dT(const ThermalModel& m, double tref_c,
                               double l_um, double t_c) {
  switch (m.form) {
    case ThermalForm::None:
      return 0.0;
    case ThermalForm::DeltaPolyQuadratic: {
      const double dt = t_c - tref_c;
      const double il = 1.0 / l_um;
      return detail::poly_inv_cubic(m.coefficients.data(), il) +
             2.0 * detail::poly_inv_cubic(m.coefficients.data() + 4, il) * dt;
    }
    case ThermalForm::Gayer2008Delta:
      return detail::gayer_eval(m.coefficients, l_um, t_c).dn_dT;
  }
  return 0.0;
}

inline double thermal_delta_dlambda(const ThermalModel& m, double tref_c,
                                    double l_um, double t_c) {
  switch (m.form) {
    case ThermalForm::None:
      return 0.0;
    case ThermalForm::DeltaPolyQuadratic: {
      const double dt = t_c - tref_c;
      return detail::poly_inv_cubic_dl(m.coefficients.data(), l_um) * dt +
             detail::poly_inv_cubic_dl(m.coefficients.data() + 4, l_um) * dt *
                 dt;
    }
    case ThermalForm::Gayer2008Delta:
      return detail::gayer_eval(m.coefficients, l_um, t_c).dn_dl -
             detail::gayer_eval(m.coefficients, l_um, tref_c).dn_dl;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Crystal description

struct AxisDispersion {
  SellmeierModel sellmeier;
  ThermalModel thermal;
  double lambda_min_nm = 0.0;
  double lambda_max_nm = 0.0;
  std::string source;  // free-text provenance annotation from the data file
};

struct DCoefficient {
  std::string label;        // e.g. "d32"
  double value_pm_per_v;    // |d| at 1.064 um, informational only
};

struct CrystalMetadata {
  std::vector<DCoefficient> d_coefficients;
  std::string notes;
};

struct CrystalDispersion {
  std::string name;                 // e.g. "KTiOPO4"
  std::string id;                   // short lowercase tag, e.g. "ktp"
  std::vector<std::string> axes;    // axis labels, e.g. {"y","z"} or {"o","e"}
  std::map<std::string, AxisDispersion> dispersion;
  double temperature_min_c = 0.0;
  double temperature_max_c = 0.0;
  CrystalMetadata metadata;

  const AxisDispersion& axis(const std::string& label) const {
    auto it = dispersion.find(label);
    if (it == dispersion.end())
      throw ValidationError("crystal '" + name + "' has no axis '" + label +
                            "'");
    return it->second;
  }

  bool has_axis(const std::string& label) const {
    return dispersion.count(label) != 0;
  }
};

namespace detail {

inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

inline void check_range(const CrystalDispersion& c, const AxisDispersion& ax,
                        const std::string& axis, double lambda_nm,
                        double t_c) {
  if (lambda_nm < ax.lambda_min_nm)
    throw OutOfRangeError("wavelength " + fmt_num(lambda_nm) +
                          " nm below lower validity bound " +
                          fmt_num(ax.lambda_min_nm) + " nm for axis " + axis +
                          " of " + c.name);
  if (lambda_nm > ax.lambda_max_nm)
    throw OutOfRangeError("wavelength " + fmt_num(lambda_nm) +
                          " nm above upper validity bound " +
                          fmt_num(ax.lambda_max_nm) + " nm for axis " + axis +
                          " of " + c.name);
  if (t_c < c.temperature_min_c)
    throw OutOfRangeError("temperature " + fmt_num(t_c) +
                          " C below lower validity bound " +
                          fmt_num(c.temperature_min_c) + " C for " + c.name);
  if (t_c > c.temperature_max_c)
    throw OutOfRangeError("temperature " + fmt_num(t_c) +
                          " C above upper validity bound " +
                          fmt_num(c.temperature_max_c) + " C for " + c.name);
}

}  // namespace detail

// n(lambda, T) on the given principal axis.
inline double refractive_index(const CrystalDispersion& c,
                               const std::string& axis, double lambda_nm,
                               double t_c) {
  const AxisDispersion& ax = c.axis(axis);
  detail::check_range(c, ax, axis, lambda_nm, t_c);
  const double l_um = lambda_nm * 1e-3;
  return sellmeier_value(ax.sellmeier, l_um) +
         thermal_delta(ax.thermal, ax.sellmeier.reference_temperature_c, l_um,
                       t_c);
}

// Analytic dn/dT in 1/C.
inline double dn_dt(const CrystalDispersion& c, const std::string& axis,
                    double lambda_nm, double t_c) {
  const AxisDispersion& ax = c.axis(axis);
  detail::check_range(c, ax, axis, lambda_nm, t_c);
  return thermal_delta_dT(ax.thermal, ax.sellmeier.reference_temperature_c,
                          lambda_nm * 1e-3, t_c);
}

// Analytic dn/dlambda in 1/nm (thermal contribution included).
inline double dn_dlambda(const CrystalDispersion& c, const std::string& axis,
                         double lambda_nm, double t_c) {
  const AxisDispersion& ax = c.axis(axis);
  detail::check_range(c, ax, axis, lambda_nm, t_c);
  const double l_um = lambda_nm * 1e-3;
  const double per_um =
      sellmeier_dlambda(ax.sellmeier, l_um) +
      thermal_delta_dlambda(ax.thermal, ax.sellmeier.reference_temperature_c,
                            l_um, t_c);
  return per_um * 1e-3;
}

// Group index n_g = n - lambda dn/dlambda. Requires a small interior margin
// so that finite-difference cross-checks stay inside validity.
inline double group_index(const CrystalDispersion& c, const std::string& axis,
                          double lambda_nm, double t_c) {
  constexpr double kMarginNm = 0.5;
  const AxisDispersion& ax = c.axis(axis);
  detail::check_range(c, ax, axis, lambda_nm, t_c);
  if (lambda_nm < ax.lambda_min_nm + kMarginNm ||
      lambda_nm > ax.lambda_max_nm - kMarginNm)
    throw OutOfRangeError("group index needs " + detail::fmt_num(kMarginNm) +
                          " nm of interior margin on axis " + axis + " of " +
                          c.name);
  return refractive_index(c, axis, lambda_nm, t_c) -
         lambda_nm * dn_dlambda(c, axis, lambda_nm, t_c);
}

// ---------------------------------------------------------------------------
// Validation

// Checks every loadable invariant: bounds ordering, axis cross-references,
// model sanity (finite n in (1,5) across validity), dn(lambda, Tref) = 0.
inline void validate_crystal(const CrystalDispersion& c) {
  if (c.name.empty()) throw ValidationError("crystal name must be non-empty");
  if (c.axes.empty()) throw ValidationError(c.name + ": axes list is empty");
  if (!(c.temperature_min_c < c.temperature_max_c))
    throw ValidationError(c.name + ": temperature validity range inverted");
  for (const auto& a : c.axes)
    if (!c.dispersion.count(a))
      throw ValidationError(c.name + ": axis '" + a +
                            "' listed but has no dispersion model");
  for (const auto& [label, ax] : c.dispersion) {
    if (std::find(c.axes.begin(), c.axes.end(), label) == c.axes.end())
      throw ValidationError(c.name + ": dispersion model for axis '" + label +
                            "' not in axes list");
    if (!(ax.lambda_min_nm < ax.lambda_max_nm))
      throw ValidationError(c.name + " axis " + label +
                            ": wavelength validity range inverted");
    if (ax.sellmeier.coefficients.size() !=
        coefficient_count(ax.sellmeier.form))
      throw ValidationError(c.name + " axis " + label +
                            ": sellmeier coefficient count mismatch");
    if (ax.thermal.coefficients.size() != coefficient_count(ax.thermal.form))
      throw ValidationError(c.name + " axis " + label +
                            ": thermal coefficient count mismatch");
    const double tref = ax.sellmeier.reference_temperature_c;
    // sample across validity: index must be finite, in (1, 5), and the
    // thermal correction must vanish at the reference temperature
    const int kSamples = 33;
    const std::array<double, 3> temps = {
        c.temperature_min_c, 0.5 * (c.temperature_min_c + c.temperature_max_c),
        c.temperature_max_c};
    for (int i = 0; i < kSamples; ++i) {
      const double lam = ax.lambda_min_nm +
                         (ax.lambda_max_nm - ax.lambda_min_nm) * i /
                             (kSamples - 1);
      const double l_um = lam * 1e-3;
      const double dn0 = thermal_delta(ax.thermal, tref, l_um, tref);
      if (std::abs(dn0) > 1e-13)
        throw ValidationError(c.name + " axis " + label +
                              ": thermal correction nonzero at reference "
                              "temperature");
      for (double t : temps) {
        const double n = sellmeier_value(ax.sellmeier, l_um) +
                         thermal_delta(ax.thermal, tref, l_um, t);
        if (!std::isfinite(n) || n <= 1.0 || n >= 5.0)
          throw ValidationError(
              c.name + " axis " + label + ": n(" + detail::fmt_num(lam) +
              " nm, " + detail::fmt_num(t) + " C) = " + detail::fmt_num(n) +
              " outside (1, 5)");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Structured-text I/O (JSON, see data/SCHEMA.md)

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j,
                                     const std::string& key,
                                     const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw ParseError("missing field '" + key + "' in " + ctx);
  return *it;
}

inline std::vector<double> number_list(const nlohmann::json& j,
                                       const std::string& ctx) {
  if (!j.is_array()) throw ParseError(ctx + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(ctx + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace detail

inline CrystalDispersion parse_crystal_json(const nlohmann::json& j,
                                            const std::string& ctx) {
  using detail::require;
  const int version = require(j, "schema_version", ctx).get<int>();
  if (version != kCrystalSchemaVersion)
    throw ParseError("unsupported crystal schema_version " +
                     std::to_string(version) + " in " + ctx + " (expected " +
                     std::to_string(kCrystalSchemaVersion) + ")");
  CrystalDispersion c;
  c.name = require(j, "name", ctx).get<std::string>();
  c.id = require(j, "id", ctx).get<std::string>();
  const auto tv = detail::number_list(require(j, "temperature_validity_c", ctx),
                                      ctx + "/temperature_validity_c");
  if (tv.size() != 2)
    throw ParseError(ctx + "/temperature_validity_c must have two entries");
  c.temperature_min_c = tv[0];
  c.temperature_max_c = tv[1];
  for (const auto& a : require(j, "axes", ctx))
    c.axes.push_back(a.get<std::string>());
  const auto& disp = require(j, "dispersion", ctx);
  for (auto it = disp.begin(); it != disp.end(); ++it) {
    const std::string actx = ctx + "/dispersion/" + it.key();
    const auto& aj = it.value();
    AxisDispersion ax;
    const auto& sj = require(aj, "sellmeier", actx);
    ax.sellmeier.form = sellmeier_form_from_string(
        require(sj, "form", actx + "/sellmeier").get<std::string>());
    ax.sellmeier.coefficients = detail::number_list(
        require(sj, "coefficients", actx), actx + "/sellmeier/coefficients");
    ax.sellmeier.reference_temperature_c =
        require(sj, "reference_temperature_c", actx).get<double>();
    const auto& tj = require(aj, "thermal", actx);
    ax.thermal.form = thermal_form_from_string(
        require(tj, "form", actx + "/thermal").get<std::string>());
    ax.thermal.coefficients = detail::number_list(
        require(tj, "coefficients", actx), actx + "/thermal/coefficients");
    const auto wv = detail::number_list(
        require(aj, "wavelength_validity_nm", actx),
        actx + "/wavelength_validity_nm");
    if (wv.size() != 2)
      throw ParseError(actx + "/wavelength_validity_nm must have two entries");
    ax.lambda_min_nm = wv[0];
    ax.lambda_max_nm = wv[1];
    if (aj.contains("source")) ax.source = aj["source"].get<std::string>();
    c.dispersion.emplace(it.key(), std::move(ax));
  }
  if (j.contains("metadata")) {
    const auto& mj = j["metadata"];
    if (mj.contains("d_coefficients"))
      for (const auto& dj : mj["d_coefficients"])
        c.metadata.d_coefficients.push_back(
            {require(dj, "label", ctx + "/metadata").get<std::string>(),
             require(dj, "value_pm_per_v", ctx + "/metadata").get<double>()});
    if (mj.contains("notes")) c.metadata.notes = mj["notes"].get<std::string>();
  }
  validate_crystal(c);
  return c;
}

inline CrystalDispersion load_crystal(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open crystal file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in '" + path + "': " + e.what());
  }
  return parse_crystal_json(j, path);
}

inline nlohmann::json crystal_to_json(const CrystalDispersion& c) {
  nlohmann::json j;
  j["schema_version"] = kCrystalSchemaVersion;
  j["name"] = c.name;
  j["id"] = c.id;
  j["temperature_validity_c"] = {c.temperature_min_c, c.temperature_max_c};
  j["axes"] = c.axes;
  nlohmann::json disp;
  for (const auto& [label, ax] : c.dispersion) {
    nlohmann::json aj;
    aj["sellmeier"] = {
        {"form", to_string(ax.sellmeier.form)},
        {"coefficients", ax.sellmeier.coefficients},
        {"reference_temperature_c", ax.sellmeier.reference_temperature_c}};
    aj["thermal"] = {{"form", to_string(ax.thermal.form)},
                     {"coefficients", ax.thermal.coefficients}};
    aj["wavelength_validity_nm"] = {ax.lambda_min_nm, ax.lambda_max_nm};
    if (!ax.source.empty()) aj["source"] = ax.source;
    disp[label] = std::move(aj);
  }
  j["dispersion"] = std::move(disp);
  nlohmann::json dco = nlohmann::json::array();
  for (const auto& d : c.metadata.d_coefficients)
    dco.push_back({{"label", d.label}, {"value_pm_per_v", d.value_pm_per_v}});
  j["metadata"] = {{"d_coefficients", std::move(dco)},
                   {"notes", c.metadata.notes}};
  return j;
}

inline void save_crystal(const CrystalDispersion& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << crystal_to_json(c).dump(2) << '\n';
}

}  // namespace spdc

#endif
