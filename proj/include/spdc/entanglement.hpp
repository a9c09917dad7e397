#ifndef SPDC_ENTANGLEMENT_HPP
#define SPDC_ENTANGLEMENT_HPP

// Two-path |Phi-> polarization entanglement model: coincidence fringes,
// visibility fits, accidental rates and corrections, CHSH estimators and a
// fidelity lower bound.
//
// All analyzer angles are polarization-plane angles in degrees (a halfwave
// plate dial angle is half of these; conversion belongs to the CLI layer).
// For |Phi-> the coincidence law is R ~ cos^2(alpha + beta), so the
// CHSH-optimal idler settings are the negatives of the textbook ones quoted
// for cos^2(alpha - beta) correlations.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "spdc/errors.hpp"

namespace spdc {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

struct SourceModel {
  double pair_rate_per_s = 0.0;  // peak coincidence envelope R0
  double v_hv = 1.0;             // intrinsic H/V-basis visibility
  double v_da = 1.0;             // intrinsic D/A-basis visibility
  double phase_rad = kPi;        // two-path relative phase; pi for |Phi->
  double eta_signal = 1.0;       // heralding efficiency, signal arm
  double eta_idler = 1.0;        // heralding efficiency, idler arm
  double window_ns = 1.0;        // coincidence window tau
};

inline void validate(const SourceModel& m) {
  if (m.pair_rate_per_s < 0.0) throw ValidationError("pair rate must be >= 0");
  for (double v : {m.v_hv, m.v_da})
    if (v < 0.0 || v > 1.0)
      throw ValidationError("visibilities must lie in [0, 1]");
  for (double e : {m.eta_signal, m.eta_idler})
    if (e < 0.0 || e > 1.0)
      throw ValidationError("efficiencies must lie in [0, 1]");
  if (m.window_ns < 0.0)
    throw ValidationError("coincidence window must be >= 0");
}

// Accidental coincidence rate A = S_s S_i tau with paired-singles convention
// S_s = R/eta_i, S_i = R/eta_s.
inline double accidental_rate(const SourceModel& m) {
  validate(m);
  if (m.eta_signal <= 0.0 || m.eta_idler <= 0.0)
    throw ValidationError("heralding efficiencies must be positive");
  const double singles_signal = m.pair_rate_per_s / m.eta_idler;
  const double singles_idler = m.pair_rate_per_s / m.eta_signal;
  return singles_signal * singles_idler * m.window_ns * 1e-9;
}

// Basis-dependent effective visibility: V_hv on the H/V axes, V_da on D/A,
// smooth interpolation in between.
inline double effective_visibility(const SourceModel& m, double alpha_deg) {
  const double a = deg_to_rad(alpha_deg);
  const double c = std::cos(2.0 * a);
  const double s = std::sin(2.0 * a);
  return m.v_hv * c * c + m.v_da * s * s;
}

// Expected coincidence rate with the signal analyzer at alpha and the idler
// analyzer at beta:
//   R(a, b) = R0/2 [1 + V_eff(a) cos(2(a+b) + phase - pi)] + A.
inline double coincidence_rate(const SourceModel& m, double alpha_deg,
                               double beta_deg) {
  validate(m);
  const double v = effective_visibility(m, alpha_deg);
  const double arg =
      2.0 * deg_to_rad(alpha_deg + beta_deg) + (m.phase_rad - kPi);
  return 0.5 * m.pair_rate_per_s * (1.0 + v * std::cos(arg)) +
         accidental_rate(m);
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SignalSetting { H, D, V, A };

inline double signal_angle_deg(SignalSetting s) {
  switch (s) {
    case SignalSetting::H: return 0.0;
    case SignalSetting::D: return 45.0;
    case SignalSetting::V: return 90.0;
    case SignalSetting::A: return 135.0;
  }
  return 0.0;
}

inline const char* to_string(SignalSetting s) {
  switch (s) {
    case SignalSetting::H: return "H";
    case SignalSetting::D: return "D";
    case SignalSetting::V: return "V";
    case SignalSetting::A: return "A";
  }
  return "?";
}

inline SignalSetting signal_setting_from_string(const std::string& s) {
  if (s == "H") return SignalSetting::H;
  if (s == "D") return SignalSetting::D;
  if (s == "V") return SignalSetting::V;
  if (s == "A") return SignalSetting::A;
  throw ValidationError("unknown signal setting '" + s + "' (want H|D|V|A)");
}

struct SweepPoint {
  double beta_deg = 0.0;       // idler analyzer angle
  double rate_per_s = 0.0;     // coincidences per second
  double integration_s = 1.0;
};

struct SweepFit {
  double amplitude = 0.0;  // fringe amplitude in counts/s
  double offset = 0.0;     // mean level in counts/s
  double phase_rad = 0.0;  // fringe phase at fixed 180-degree period
  double visibility = 0.0;
  double rms_residual = 0.0;
};

struct SweepRecord {
  SignalSetting setting = SignalSetting::H;
  std::vector<SweepPoint> points;
  std::optional<SweepFit> fitted;
};

// Least-squares sinusoid at fixed period (180 degrees in polarization angle):
// rate = offset + p cos(2 beta) + q sin(2 beta). Linear normal equations.
inline SweepFit fit_sweep(const SweepRecord& rec) {
  const auto& pts = rec.points;
  if (pts.size() < 4)
    throw SolveError("sweep fit needs at least 4 points");
  double span_lo = pts.front().beta_deg, span_hi = pts.front().beta_deg;
  for (const auto& p : pts) {
    span_lo = std::min(span_lo, p.beta_deg);
    span_hi = std::max(span_hi, p.beta_deg);
    if (p.rate_per_s < 0.0)
      throw ValidationError("negative coincidence rate in sweep");
  }
  if (span_hi - span_lo < 180.0 - 1e-9)
    throw SolveError("sweep must cover at least one full fringe period "
                     "(180 degrees of polarization angle)");

  double s11 = 0, s12 = 0, s13 = 0, s22 = 0, s23 = 0, s33 = 0;
  double b1 = 0, b2 = 0, b3 = 0;
  for (const auto& p : pts) {
    const double c = std::cos(2.0 * deg_to_rad(p.beta_deg));
    const double s = std::sin(2.0 * deg_to_rad(p.beta_deg));
    s11 += 1.0;   s12 += c;     s13 += s;
    s22 += c * c; s23 += c * s; s33 += s * s;
    b1 += p.rate_per_s;
    b2 += p.rate_per_s * c;
    b3 += p.rate_per_s * s;
  }
  // 3x3 symmetric solve by Cramer's rule
  const double det = s11 * (s22 * s33 - s23 * s23) -
                     s12 * (s12 * s33 - s23 * s13) +
                     s13 * (s12 * s23 - s22 * s13);
  if (std::abs(det) < 1e-12)
    throw SolveError("sweep fit is degenerate (angles poorly distributed)");
  const double d0 = b1 * (s22 * s33 - s23 * s23) -
                    s12 * (b2 * s33 - s23 * b3) +
                    s13 * (b2 * s23 - s22 * b3);
  const double dp = s11 * (b2 * s33 - b3 * s23) -
                    b1 * (s12 * s33 - s23 * s13) +
                    s13 * (s12 * b3 - b2 * s13);
  const double dq = s11 * (s22 * b3 - s23 * b2) -
                    s12 * (s12 * b3 - b2 * s13) +
                    b1 * (s12 * s23 - s22 * s13);
  const double offset = d0 / det;
  const double p = dp / det;
  const double q = dq / det;

  SweepFit fit;
  fit.offset = offset;
  fit.amplitude = std::hypot(p, q);
  fit.phase_rad = std::atan2(-q, p);
  double ss = 0.0;
  for (const auto& pt : pts) {
    const double model = offset + p * std::cos(2.0 * deg_to_rad(pt.beta_deg)) +
                         q * std::sin(2.0 * deg_to_rad(pt.beta_deg));
    ss += (pt.rate_per_s - model) * (pt.rate_per_s - model);
  }
  fit.rms_residual = std::sqrt(ss / pts.size());
  if (offset <= 0.0) {
    if (fit.amplitude == 0.0) {
      fit.visibility = 0.0;
      return fit;
    }
    throw SolveError("sweep fit produced non-positive mean rate");
  }
  // flat data is a valid V = 0 fringe; a buried one is not trustworthy
  if (fit.amplitude > 1e-12 * offset &&
      fit.amplitude < 2.0 * fit.rms_residual)
    throw SolveError("fringe amplitude below noise floor");
  fit.visibility = fit.amplitude / offset;
  return fit;
}

// V = (Cmax - Cmin)/(Cmax + Cmin) of the fitted fringe.
inline double visibility(const SweepRecord& rec) {
  if (rec.fitted) return rec.fitted->visibility;
  return fit_sweep(rec).visibility;
}

struct VisibilitySummary {
  std::vector<double> per_setting;
  double average = 0.0;
};

inline VisibilitySummary average_visibility(
    const std::vector<SweepRecord>& records) {
  if (records.empty()) throw ValidationError("no sweep records");
  VisibilitySummary s;
  for (const auto& r : records) s.per_setting.push_back(visibility(r));
  double sum = 0.0;
  for (double v : s.per_setting) sum += v;
  s.average = sum / s.per_setting.size();
  return s;
}

struct SubtractResult {
  SweepRecord record;
  int clamped_points = 0;  // nonzero flags over-subtraction
};

// Pointwise accidental subtraction followed by a refit.
inline SubtractResult subtract_accidentals(const SweepRecord& rec,
                                           double accidentals_per_s) {
  if (accidentals_per_s < 0.0)
    throw ValidationError("accidental rate must be >= 0");
  SubtractResult out;
  out.record = rec;
  for (auto& p : out.record.points) {
    const double corrected = p.rate_per_s - accidentals_per_s;
    if (corrected < 0.0) {
      p.rate_per_s = 0.0;
      ++out.clamped_points;
    } else {
      p.rate_per_s = corrected;
    }
  }
  out.record.fitted = fit_sweep(out.record);
  return out;
}

// ---------------------------------------------------------------------------
// Synthesis

// Expected (noiseless) sweep from the model; with a seed, Poisson counting
// noise is applied to the integrated counts.
inline SweepRecord synthesize_sweep(const SourceModel& m, SignalSetting set,
                                    double beta_start_deg, double beta_stop_deg,
                                    double beta_step_deg,
                                    double integration_s = 1.0,
                                    std::optional<std::uint64_t> seed = {}) {
  if (beta_step_deg <= 0.0) throw ValidationError("beta step must be positive");
  if (integration_s <= 0.0)
    throw ValidationError("integration time must be positive");
  SweepRecord rec;
  rec.setting = set;
  const double alpha = signal_angle_deg(set);
  std::mt19937_64 rng(seed ? *seed : 0);
  for (double b = beta_start_deg; b <= beta_stop_deg + 1e-9;
       b += beta_step_deg) {
    SweepPoint p;
    p.beta_deg = b;
    p.integration_s = integration_s;
    const double rate = coincidence_rate(m, alpha, b);
    if (seed) {
      std::poisson_distribution<long long> poisson(rate * integration_s);
      p.rate_per_s = static_cast<double>(poisson(rng)) / integration_s;
    } else {
      p.rate_per_s = rate;
    }
    rec.points.push_back(p);
  }
  return rec;
}

// ---------------------------------------------------------------------------
// CHSH

inline double chsh_from_visibility(double v_avg) {
  if (v_avg < 0.0 || v_avg > 1.0)
    throw ValidationError("visibility must lie in [0, 1]");
  return 2.0 * std::sqrt(2.0) * v_avg;
}

struct ChshPairCounts {
  double pp = 0.0;  // both transmitted at (alpha, beta)
  double pm = 0.0;  // signal at alpha, idler at beta + 90
  double mp = 0.0;
  double mm = 0.0;

  double total() const { return pp + pm + mp + mm; }
  double correlator() const { return (pp + mm - pm - mp) / total(); }
};

struct ChshSettings {
  double a_deg = 0.0;
  double a_prime_deg = 45.0;
  double b_deg = -22.5;
  double b_prime_deg = -67.5;
  // count blocks in the order (a,b), (a,b'), (a',b), (a',b')
  std::array<ChshPairCounts, 4> counts{};
};

// Canonical settings for the |Phi-> fringe law R ~ cos^2(alpha + beta).
inline ChshSettings chsh_canonical_settings() { return ChshSettings{}; }

// S = E(a,b) - E(a,b') + E(a',b) + E(a',b').
inline double chsh_from_counts(const ChshSettings& s) {
  const auto angles_distinct = [&]() {
    return s.a_deg != s.a_prime_deg && s.b_deg != s.b_prime_deg;
  };
  if (!angles_distinct())
    throw ValidationError("CHSH analyzer settings must be distinct");
  std::array<double, 4> e{};
  for (int i = 0; i < 4; ++i) {
    if (s.counts[i].total() <= 0.0)
      throw ValidationError("zero total counts in CHSH setting pair " +
                            std::to_string(i));
    e[i] = s.counts[i].correlator();
  }
  return e[0] - e[1] + e[2] + e[3];
}

// Sixteen projective rates synthesized from the model at the four setting
// pairs; deterministic expected values, Poisson noise only with a seed.
inline ChshSettings synthesize_chsh_counts(
    const SourceModel& m, const ChshSettings& angles = ChshSettings{},
    double integration_s = 1.0, std::optional<std::uint64_t> seed = {}) {
  ChshSettings out = angles;
  const std::array<std::pair<double, double>, 4> pairs = {
      {{angles.a_deg, angles.b_deg},
       {angles.a_deg, angles.b_prime_deg},
       {angles.a_prime_deg, angles.b_deg},
       {angles.a_prime_deg, angles.b_prime_deg}}};
  std::mt19937_64 rng(seed ? *seed : 0);
  for (int i = 0; i < 4; ++i) {
    const auto [a, b] = pairs[i];
    std::array<double, 4> rate = {
        coincidence_rate(m, a, b), coincidence_rate(m, a, b + 90.0),
        coincidence_rate(m, a + 90.0, b),
        coincidence_rate(m, a + 90.0, b + 90.0)};
    if (seed)
      for (auto& r : rate) {
        std::poisson_distribution<long long> poisson(r * integration_s);
        r = static_cast<double>(poisson(rng)) / integration_s;
      }
    out.counts[i] = {rate[0], rate[1], rate[2], rate[3]};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fidelity

// Lower bound on fidelity to |Phi->, using the D/A visibility as a
// conservative stand-in for the unmeasured circular basis:
//   F >= (1 + V_hv + 2 V_da) / 4.
inline double fidelity_bound(double v_hv, double v_da) {
  for (double v : {v_hv, v_da})
    if (v < 0.0 || v > 1.0)
      throw ValidationError("visibility must lie in [0, 1]");
  return 0.25 * (1.0 + v_hv + 2.0 * v_da);
}

}  // namespace spdc

#endif
