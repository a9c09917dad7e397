#ifndef SPDC_PHASEMATCH_HPP
#define SPDC_PHASEMATCH_HPP

// Collinear SPDC phasematching along crystal principal axes.
//
// The central quantity is the wavevector mismatch
//   dk = 2 pi (n_p/l_p - n_s/l_s - n_i/l_i) - 2 pi m / Lambda
// in 1/um, with the grating term present only for quasi-phasematched
// processes. The idler wavelength always follows from energy conservation,
// so dk is treated as a function of the signal wavelength alone.
//
// Signal means the shorter downconverted wavelength throughout; search
// windows never cross the degeneracy point at 2 l_p.

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spdc/dispersion.hpp"
#include "spdc/errors.hpp"

namespace spdc {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct GratingSpec {
  double period_um = 0.0;  // poling period Lambda
  int order = 1;           // QPM order m, positive odd
};

struct ProcessSpec {
  std::shared_ptr<const CrystalDispersion> crystal;
  std::string pump_axis;
  std::string signal_axis;
  std::string idler_axis;
  std::optional<GratingSpec> grating;  // absent <=> birefringent NCPM
  std::string label;
};

inline void validate_process(const ProcessSpec& p) {
  if (!p.crystal) throw ValidationError("process has no crystal");
  for (const auto* a : {&p.pump_axis, &p.signal_axis, &p.idler_axis})
    if (!p.crystal->has_axis(*a))
      throw ValidationError("process '" + p.label + "': crystal '" +
                            p.crystal->name + "' has no axis '" + *a + "'");
  if (p.grating) {
    if (p.grating->period_um <= 0.0)
      throw ValidationError("process '" + p.label +
                            "': grating period must be positive");
    if (p.grating->order <= 0 || p.grating->order % 2 == 0)
      throw ValidationError("process '" + p.label +
                            "': grating order must be positive odd");
  }
}

// Idler wavelength from energy conservation, nm.
inline double idler_wavelength(double lambda_pump_nm,
                               double lambda_signal_nm) {
  if (lambda_signal_nm <= lambda_pump_nm)
    throw ValidationError("signal wavelength must exceed pump wavelength");
  return 1.0 / (1.0 / lambda_pump_nm - 1.0 / lambda_signal_nm);
}

// Wavevector mismatch in 1/um at the given signal wavelength.
inline double delta_k(const ProcessSpec& p, double lambda_pump_nm,
                      double lambda_signal_nm, double t_c) {
  const double li = idler_wavelength(lambda_pump_nm, lambda_signal_nm);
  const CrystalDispersion& c = *p.crystal;
  const double np = refractive_index(c, p.pump_axis, lambda_pump_nm, t_c);
  const double ns = refractive_index(c, p.signal_axis, lambda_signal_nm, t_c);
  const double ni = refractive_index(c, p.idler_axis, li, t_c);
  double dk = kTwoPi * (np / (lambda_pump_nm * 1e-3) -
                        ns / (lambda_signal_nm * 1e-3) - ni / (li * 1e-3));
  if (p.grating) dk -= kTwoPi * p.grating->order / p.grating->period_um;
  return dk;
}

// ---------------------------------------------------------------------------
// Root search

struct SearchWindow {
  double lo_nm = 0.0;
  double hi_nm = 0.0;
};

struct SolveOptions {
  double grid_step_nm = 0.05;   // sign-scan resolution
  double tolerance = 1e-9;      // |dk| acceptance, 1/um
};

struct SpdcSolution {
  double lambda_pump_nm = 0.0;
  double lambda_signal_nm = 0.0;
  double lambda_idler_nm = 0.0;
  double temperature_c = 0.0;
  double delta_k_residual = 0.0;  // 1/um
  ProcessSpec process;
};

struct SolveResult {
  std::vector<SpdcSolution> solutions;  // sorted by signal wavelength
  std::vector<std::string> warnings;    // e.g. near-merged roots
};

// Default signal search window [l_p + 20, 2 l_p - 5] nm, clamped so that both
// the signal and the energy-conserving idler stay inside dispersion validity.
inline SearchWindow default_search_window(const ProcessSpec& p,
                                          double lambda_pump_nm) {
  constexpr double kEdgeNm = 1e-3;  // keep clamped edges strictly evaluable
  const AxisDispersion& sax = p.crystal->axis(p.signal_axis);
  const AxisDispersion& iax = p.crystal->axis(p.idler_axis);
  const auto infeasible = [&]() {
    return SolveError("empty feasible search window for pump " +
                      detail::fmt_num(lambda_pump_nm) + " nm on '" +
                      p.crystal->name + "'");
  };
  double lo = std::max(lambda_pump_nm + 20.0, sax.lambda_min_nm + kEdgeNm);
  double hi = std::min(2.0 * lambda_pump_nm - 5.0, sax.lambda_max_nm - kEdgeNm);
  if (!(lo < hi)) throw infeasible();
  // Every idler in the window exceeds 2 l_p, so the idler axis must reach
  // past degeneracy; its validity caps translate into signal bounds through
  // energy conservation (idler decreases as the signal grows).
  const double inv_p = 1.0 / lambda_pump_nm;
  const double i_max = iax.lambda_max_nm - kEdgeNm;
  const double i_min = iax.lambda_min_nm + kEdgeNm;
  if (i_max <= 2.0 * lambda_pump_nm) throw infeasible();
  lo = std::max(lo, 1.0 / (inv_p - 1.0 / i_max));
  if (i_min > 2.0 * lambda_pump_nm)
    hi = std::min(hi, 1.0 / (inv_p - 1.0 / i_min));
  if (!(lo < hi)) throw infeasible();
  return {lo, hi};
}

namespace detail {

inline void check_window(const ProcessSpec& p, double lambda_pump_nm,
                         const SearchWindow& w) {
  if (!(w.lo_nm < w.hi_nm))
    throw SolveError("invalid search interval [" + fmt_num(w.lo_nm) + ", " +
                     fmt_num(w.hi_nm) + "] nm");
  if (w.lo_nm <= lambda_pump_nm)
    throw SolveError("search interval must lie above the pump wavelength");
  if (w.hi_nm >= 2.0 * lambda_pump_nm)
    throw SolveError("search interval must stay below degeneracy at 2 l_p = " +
                     fmt_num(2.0 * lambda_pump_nm) + " nm");
  const AxisDispersion& sax = p.crystal->axis(p.signal_axis);
  const AxisDispersion& iax = p.crystal->axis(p.idler_axis);
  if (w.lo_nm < sax.lambda_min_nm || w.hi_nm > sax.lambda_max_nm)
    throw SolveError("search interval exceeds signal-axis validity [" +
                     fmt_num(sax.lambda_min_nm) + ", " +
                     fmt_num(sax.lambda_max_nm) + "] nm");
  for (double edge : {w.lo_nm, w.hi_nm}) {
    const double li = idler_wavelength(lambda_pump_nm, edge);
    if (li < iax.lambda_min_nm || li > iax.lambda_max_nm)
      throw SolveError("idler for signal " + fmt_num(edge) +
                       " nm falls outside idler-axis validity");
  }
}

}  // namespace detail

// All phasematched signal wavelengths inside the window: sign scan on a
// uniform grid followed by bisection down to |dk| <= tolerance.
inline SolveResult solve_spdc(const ProcessSpec& p, double lambda_pump_nm,
                              double t_c,
                              std::optional<SearchWindow> window = {},
                              const SolveOptions& opts = {}) {
  validate_process(p);
  const SearchWindow w =
      window ? *window : default_search_window(p, lambda_pump_nm);
  detail::check_window(p, lambda_pump_nm, w);
  if (opts.grid_step_nm <= 0.0) throw SolveError("grid step must be positive");

  const int n_cells =
      std::max(1, static_cast<int>(std::ceil((w.hi_nm - w.lo_nm) /
                                             opts.grid_step_nm)));
  std::vector<double> xs(n_cells + 1), fs(n_cells + 1);
  double max_abs = 0.0;
  for (int i = 0; i <= n_cells; ++i) {
    xs[i] = w.lo_nm + (w.hi_nm - w.lo_nm) * i / n_cells;
    fs[i] = delta_k(p, lambda_pump_nm, xs[i], t_c);
    max_abs = std::max(max_abs, std::abs(fs[i]));
  }
  // a dispersionless fixture phasematches everywhere; refuse to report
  // arbitrary grid points as roots
  if (max_abs < 1e-7)
    throw SolveError(
        "degenerate continuum: |dk| vanishes across the whole window; "
        "every wavelength pair phasematches");

  SolveResult out;
  for (int i = 0; i < n_cells; ++i) {
    double a = xs[i], b = xs[i + 1], fa = fs[i], fb = fs[i + 1];
    double root;
    if (fa == 0.0) {
      root = a;
    } else if (fa * fb < 0.0) {
      double fm = fa;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        fm = delta_k(p, lambda_pump_nm, m, t_c);
        if (std::abs(fm) <= opts.tolerance || (b - a) < 1e-12) break;
        if (fa * fm < 0.0) {
          b = m;
          fb = fm;
        } else {
          a = m;
          fa = fm;
        }
      }
      root = 0.5 * (a + b);
    } else {
      continue;
    }
    SpdcSolution s;
    s.lambda_pump_nm = lambda_pump_nm;
    s.lambda_signal_nm = root;
    s.lambda_idler_nm = idler_wavelength(lambda_pump_nm, root);
    s.temperature_c = t_c;
    s.delta_k_residual = delta_k(p, lambda_pump_nm, root, t_c);
    s.process = p;
    out.solutions.push_back(std::move(s));
  }
  for (std::size_t k = 1; k < out.solutions.size(); ++k) {
    const double gap = out.solutions[k].lambda_signal_nm -
                       out.solutions[k - 1].lambda_signal_nm;
    if (gap < 2.0 * opts.grid_step_nm)
      out.warnings.push_back(
          "roots at " + detail::fmt_num(out.solutions[k - 1].lambda_signal_nm) +
          " and " + detail::fmt_num(out.solutions[k].lambda_signal_nm) +
          " nm are within two grid cells; grid step " +
          detail::fmt_num(opts.grid_step_nm) +
          " nm may be too coarse to separate nearby roots");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Temperature tuning

struct TuningSample {
  double temperature_c = 0.0;
  double lambda_signal_nm = 0.0;
  double lambda_idler_nm = 0.0;
};

struct TuningCurve {
  ProcessSpec process;
  double lambda_pump_nm = 0.0;
  std::vector<TuningSample> samples;      // strictly increasing in T
  double idler_rate_nm_per_c = 0.0;       // least-squares slope of l_i vs T
  double signal_rate_nm_per_c = 0.0;
};

namespace detail {

inline double lsq_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw SolveError("degenerate least-squares abscissa");
  return (n * sxy - sx * sy) / den;
}

}  // namespace detail

// Solve per temperature across [t_lo, t_hi]; every step must yield exactly
// one root in the window, otherwise the offending temperature is reported.
inline TuningCurve tuning_curve(const ProcessSpec& p, double lambda_pump_nm,
                                double t_lo_c, double t_hi_c, double step_c,
                                std::optional<SearchWindow> window = {},
                                const SolveOptions& opts = {}) {
  if (!(t_lo_c < t_hi_c)) throw SolveError("temperature range inverted");
  if (step_c <= 0.0) throw SolveError("temperature step must be positive");
  TuningCurve tc;
  tc.process = p;
  tc.lambda_pump_nm = lambda_pump_nm;
  std::vector<double> ts, lis, lss;
  const int n = static_cast<int>(std::floor((t_hi_c - t_lo_c) / step_c + 0.5));
  for (int i = 0; i <= n; ++i) {
    const double t = std::min(t_lo_c + i * step_c, t_hi_c);
    SolveResult r = solve_spdc(p, lambda_pump_nm, t, window, opts);
    if (r.solutions.size() != 1)
      throw SolveError("solution count changed to " +
                       std::to_string(r.solutions.size()) + " at T = " +
                       detail::fmt_num(t) +
                       " C; narrow the search window to isolate one branch");
    const SpdcSolution& s = r.solutions.front();
    tc.samples.push_back({t, s.lambda_signal_nm, s.lambda_idler_nm});
    ts.push_back(t);
    lss.push_back(s.lambda_signal_nm);
    lis.push_back(s.lambda_idler_nm);
  }
  tc.idler_rate_nm_per_c = detail::lsq_slope(ts, lis);
  tc.signal_rate_nm_per_c = detail::lsq_slope(ts, lss);
  return tc;
}

// ---------------------------------------------------------------------------
// Quasi-phasematching

// First-or-higher odd-order poling period that phasematches (l_p, l_s) at T.
// The process must not already carry a grating.
inline double qpm_period(const ProcessSpec& p, double lambda_pump_nm,
                         double lambda_signal_nm, double t_c, int order = 1) {
  if (p.grating)
    throw ValidationError("qpm_period expects a grating-free process");
  if (order <= 0 || order % 2 == 0)
    throw ValidationError("QPM order must be positive odd");
  validate_process(p);
  const double dk = delta_k(p, lambda_pump_nm, lambda_signal_nm, t_c);
  if (dk <= 0.0)
    throw SolveError("birefringent dk = " + detail::fmt_num(dk) +
                     " 1/um is not positive; this process cannot be poled "
                     "with a positive period at order m = " +
                     std::to_string(order));
  return kTwoPi * order / dk;
}

inline ProcessSpec with_grating(const ProcessSpec& p, double period_um,
                                int order = 1) {
  ProcessSpec q = p;
  q.grating = GratingSpec{period_um, order};
  validate_process(q);
  return q;
}

// Magnitude of the grating wavevector change when the period expands to
// Lambda (1 + alpha dT). Comparison analysis only; never folded into delta_k.
inline double poling_thermal_term(double period_um, int order,
                                  double alpha_per_c, double dt_c) {
  if (period_um <= 0.0) throw ValidationError("period must be positive");
  if (order <= 0 || order % 2 == 0)
    throw ValidationError("QPM order must be positive odd");
  const double g = kTwoPi * order / period_um;
  return std::abs(g * alpha_per_c * dt_c / (1.0 + alpha_per_c * dt_c));
}

// ---------------------------------------------------------------------------
// Triplet tables

struct TripletRequest {
  ProcessSpec process;
  double lambda_pump_nm = 0.0;
  double temperature_c = 0.0;
  std::optional<SearchWindow> window;
};

struct TripletRow {
  TripletRequest request;
  std::vector<SpdcSolution> solutions;  // empty when error is set
  std::vector<std::string> warnings;
  std::string error;                    // per-row failures are not fatal
};

inline std::vector<TripletRow> triplet_table(
    const std::vector<TripletRequest>& requests,
    const SolveOptions& opts = {}) {
  std::vector<TripletRow> rows;
  rows.reserve(requests.size());
  for (const auto& req : requests) {
    TripletRow row;
    row.request = req;
    try {
      SolveResult r = solve_spdc(req.process, req.lambda_pump_nm,
                                 req.temperature_c, req.window, opts);
      row.solutions = std::move(r.solutions);
      row.warnings = std::move(r.warnings);
      if (row.solutions.empty()) row.error = "no phasematched solution";
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace spdc

#endif
