#ifndef SPDC_SPECTRUM_HPP
#define SPDC_SPECTRUM_HPP

// Phasematching spectra for a monochromatic planewave pump and a crystal of
// finite length L: I(l_s) = sinc^2(dk(l_s) L / 2), normalized to 1 at the
// phasematched center. Signal FWHM is measured on the central lobe; the
// idler FWHM follows exactly from energy conservation with a CW pump:
//   fwhm_i = fwhm_s (l_i / l_s)^2.

#include <cmath>
#include <optional>
#include <vector>

#include "spdc/phasematch.hpp"

namespace spdc {

inline double sinc(double x) {
  // quadratic Taylor term keeps the removable singularity smooth
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// Normalized phasematching intensity in [0, 1]; length in mm.
inline double pm_intensity(const ProcessSpec& p, double lambda_pump_nm,
                           double lambda_signal_nm, double t_c,
                           double length_mm) {
  if (length_mm <= 0.0) throw ValidationError("crystal length must be positive");
  const double dk = delta_k(p, lambda_pump_nm, lambda_signal_nm, t_c);
  const double s = sinc(0.5 * dk * length_mm * 1e3);
  return s * s;
}

struct SpectrumSample {
  double lambda_signal_nm = 0.0;
  double lambda_idler_nm = 0.0;
  double intensity = 0.0;
};

struct SpectrumProfile {
  ProcessSpec process;
  double lambda_pump_nm = 0.0;
  double temperature_c = 0.0;
  double length_mm = 0.0;
  std::vector<SpectrumSample> samples;  // center +- 3 fwhm_s
  double center_signal_nm = 0.0;
  double center_idler_nm = 0.0;
  double fwhm_signal_nm = 0.0;
  double fwhm_idler_nm = 0.0;
};

namespace detail {

// Signal offset from the center at which |dk| first reaches target, found by
// outward march followed by bisection. Fails if dk turns back toward zero
// before the target is reached (ambiguous side lobe) or leaves the window.
inline double half_crossing_offset(const ProcessSpec& p, double lp, double t_c,
                                   double center, double dk_target, int dir,
                                   const SearchWindow& w) {
  const double step = 1e-3;  // nm; fine enough for the narrowest KTP lines
  double prev_abs = 0.0;
  double x = center;
  for (int it = 0;; ++it) {
    const double next = center + dir * step * (it + 1);
    if (next <= w.lo_nm || next >= w.hi_nm)
      throw SolveError("half-intensity crossing left the search window; "
                       "crystal too short for this window");
    const double a = std::abs(delta_k(p, lp, next, t_c));
    if (a >= dk_target) {
      // bisect |dk| = dk_target between x and next
      double lo = x, hi = next;
      for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (lo + hi);
        if (std::abs(delta_k(p, lp, m, t_c)) < dk_target)
          lo = m;
        else
          hi = m;
      }
      return std::abs(0.5 * (lo + hi) - center);
    }
    if (a < prev_abs * 0.9)
      throw SolveError("dk turned back toward zero before the half-intensity "
                       "crossing; side lobe ambiguity");
    prev_abs = std::max(prev_abs, a);
    x = next;
  }
}

}  // namespace detail

// sinc^2(x) = 1/2 crossing of the central lobe.
inline constexpr double kSincHalfArg = 1.3915573772042108;

// Full spectral characterization around the unique phasematched center in
// the window. n_samples is made odd so the center sample is exact.
inline SpectrumProfile linewidths(const ProcessSpec& p, double lambda_pump_nm,
                                  double t_c, double length_mm,
                                  std::optional<SearchWindow> window = {},
                                  int n_samples = 241,
                                  const SolveOptions& opts = {}) {
  if (length_mm <= 0.0) throw ValidationError("crystal length must be positive");
  const SearchWindow w =
      window ? *window : default_search_window(p, lambda_pump_nm);
  SolveResult r = solve_spdc(p, lambda_pump_nm, t_c, w, opts);
  if (r.solutions.empty())
    throw SolveError("no phasematched center in the search window");
  if (r.solutions.size() > 1)
    throw SolveError("multiple phasematched centers in the search window; "
                     "narrow the window");
  const double center = r.solutions.front().lambda_signal_nm;

  const double l_um = length_mm * 1e3;
  const double dk_half = 2.0 * kSincHalfArg / l_um;
  const double d_plus =
      detail::half_crossing_offset(p, lambda_pump_nm, t_c, center, dk_half,
                                   +1, w);
  const double d_minus =
      detail::half_crossing_offset(p, lambda_pump_nm, t_c, center, dk_half,
                                   -1, w);

  SpectrumProfile prof;
  prof.process = p;
  prof.lambda_pump_nm = lambda_pump_nm;
  prof.temperature_c = t_c;
  prof.length_mm = length_mm;
  prof.center_signal_nm = center;
  prof.center_idler_nm = idler_wavelength(lambda_pump_nm, center);
  prof.fwhm_signal_nm = d_plus + d_minus;
  const double ratio = prof.center_idler_nm / prof.center_signal_nm;
  prof.fwhm_idler_nm = prof.fwhm_signal_nm * ratio * ratio;

  if (n_samples < 3) n_samples = 3;
  if (n_samples % 2 == 0) ++n_samples;
  const double span = 3.0 * prof.fwhm_signal_nm;
  prof.samples.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const double x = center - span + 2.0 * span * i / (n_samples - 1);
    if (x <= w.lo_nm || x >= w.hi_nm) continue;
    SpectrumSample s;
    s.lambda_signal_nm = x;
    s.lambda_idler_nm = idler_wavelength(lambda_pump_nm, x);
    s.intensity = pm_intensity(p, lambda_pump_nm, x, t_c, length_mm);
    prof.samples.push_back(s);
  }
  return prof;
}

}  // namespace spdc

#endif
