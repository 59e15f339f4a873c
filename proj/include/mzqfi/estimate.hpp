#pragma once

// Estimation from shot records: empirical probabilities and Fisher matrices,
// fringe fitting, visibility inversion for beta, per-point inversion for x,
// the affine contrast-shrinkage bias model and bootstrap uncertainties.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mzqfi/analytic.hpp"
#include "mzqfi/circuit.hpp"
#include "mzqfi/errors.hpp"
#include "mzqfi/rng.hpp"

namespace mzqfi {

inline double empirical_probability(const ShotRecord& rec) {
  detail::require(rec.mu >= 1, "mu must be >= 1");
  detail::require(rec.n0 >= 0 && rec.n0 <= rec.mu, "n0 must lie in [0, mu]");
  return static_cast<double>(rec.n0) / static_cast<double>(rec.mu);
}

// (d_a P0)(d_b P0) / (P0_hat (1 - P0_hat)) with analytic gradients at (beta, x).
// Where both gradients vanish the matrix is zero whatever the counts.
inline FisherMatrix empirical_fim(const ShotRecord& rec, const ModelParams& p) {
  p.validate();
  const double ph = empirical_probability(rec);
  const auto g = probability_gradient(p);
  if (g.d_beta == 0.0 && g.d_x == 0.0) return {};
  if (ph <= 0.0 || ph >= 1.0)
    throw DegenerateError("empirical_fim: degenerate counts n0=" + std::to_string(rec.n0) +
                          " of mu=" + std::to_string(rec.mu));
  const double w = 1.0 / (ph * (1.0 - ph));
  return {g.d_beta * g.d_beta * w, g.d_x * g.d_x * w, g.d_beta * g.d_x * w};
}

struct FringeFit {
  double offset = 0.0;     // A
  double amplitude = 0.0;  // B
  double v_meas = 0.0;     // B / A
  double residual = 0.0;   // RMS
  bool out_of_model = false;  // v_meas > 1 or v_meas < 0
};

// Least squares of P0 = A + B cos(2Nx).
inline FringeFit fit_fringe(const std::vector<double>& xs, const std::vector<double>& p0s,
                            int n_photons) {
  detail::require(n_photons >= 1, "n_photons must be >= 1");
  detail::require(xs.size() == p0s.size(), "x and p0 samples differ in length");
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const auto distinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
  detail::require(distinct >= 3, "fringe fit needs at least 3 distinct x samples");
  detail::require(sorted[static_cast<std::size_t>(distinct) - 1] - sorted.front() >=
                      M_PI / (2.0 * n_photons) - 1e-12,
                  "x samples must span at least half a fringe period");
  const double n = static_cast<double>(xs.size());
  double mc = 0, mp = 0;
  std::vector<double> c(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    c[i] = std::cos(2.0 * n_photons * xs[i]);
    mc += c[i];
    mp += p0s[i];
  }
  mc /= n;
  mp /= n;
  double scc = 0, scp = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    scc += (c[i] - mc) * (c[i] - mc);
    scp += (c[i] - mc) * (p0s[i] - mp);
  }
  if (!(scc / n > 1e-10)) throw DegenerateError("fit_fringe: cosine regressor is nearly constant");
  FringeFit f;
  f.amplitude = scp / scc;
  f.offset = mp - f.amplitude * mc;
  if (!(f.offset > 0.0)) throw DegenerateError("fit_fringe: fitted offset is not positive");
  f.v_meas = f.amplitude / f.offset;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = p0s[i] - (f.offset + f.amplitude * c[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  f.out_of_model = f.v_meas > 1.0 || f.v_meas < 0.0;
  return f;
}

// beta_hat = -ln(2v / (1 - v)) / hbar_omega0, the exact inverse of V(beta).
inline double invert_visibility(double v_meas, double hbar_omega0 = 1.0) {
  detail::require(hbar_omega0 > 0.0, "hbar_omega0 must be > 0");
  if (!(v_meas > 0.0 && v_meas < 1.0))
    throw OutOfDomainError("invert_visibility: v=" + std::to_string(v_meas) + " outside (0,1)");
  return -std::log(2.0 * v_meas / (1.0 - v_meas)) / hbar_omega0;
}

struct XEstimate {
  double x_hat = 0.0;
  bool clamped = false;
};

// x_hat = arccos((p0 (1 + v) - 1) / v) / (2N) on the principal branch; the
// sign is taken from sign_hint.
inline XEstimate estimate_x(double p0_hat, double v, int n_photons, double sign_hint = 1.0) {
  detail::require(n_photons >= 1, "n_photons must be >= 1");
  if (!(v > 0.0)) throw DegenerateError("estimate_x: visibility must be > 0");
  double arg = (p0_hat * (1.0 + v) - 1.0) / v;
  XEstimate e;
  if (arg > 1.0 || arg < -1.0) {
    e.clamped = true;
    arg = std::clamp(arg, -1.0, 1.0);
  }
  e.x_hat = std::acos(arg) / (2.0 * n_photons);
  if (sign_hint < 0.0) e.x_hat = -e.x_hat;
  return e;
}

inline constexpr double kBaselineVisibility = 1.0 / 3.0;

// V_meas = kappa V + (1 - kappa) V(0).
struct ShrinkageModel {
  double kappa = 0.5;
  double baseline = kBaselineVisibility;

  // kappa = 1 (no shrinkage) is accepted as the identity limit.
  void validate() const {
    detail::require(kappa > 0.0 && kappa <= 1.0, "kappa must lie in (0, 1]");
  }
};

inline double apply_shrinkage(double v_true, const ShrinkageModel& m) {
  m.validate();
  return m.kappa * v_true + (1.0 - m.kappa) * m.baseline;
}

// Undoes the shrinkage, then inverts the visibility.
inline double correct_shrinkage(double v_meas, const ShrinkageModel& m, double hbar_omega0 = 1.0) {
  m.validate();
  const double arg = (v_meas - (1.0 - m.kappa) * m.baseline) / m.kappa;
  if (!(arg > 0.0 && arg < 1.0))
    throw OutOfDomainError("correct_shrinkage: de-shrunk visibility " + std::to_string(arg) +
                           " outside (0,1)");
  return invert_visibility(arg, hbar_omega0);
}

struct ElementStats {
  FisherMatrix mean;
  FisherMatrix std;
  int used = 0;
  int dropped = 0;
};

// Parametric bootstrap: n0* ~ Binomial(mu, n0/mu). Degenerate resamples are
// dropped; more than 10% dropped is an error.
inline ElementStats bootstrap_fim(const ShotRecord& rec, const ModelParams& p, int n_resamples,
                                  std::uint64_t seed) {
  detail::require(n_resamples >= 100, "bootstrap needs at least 100 resamples");
  const double ph = empirical_probability(rec);
  std::vector<FisherMatrix> fs;
  fs.reserve(static_cast<std::size_t>(n_resamples));
  ElementStats s;
  for (int i = 0; i < n_resamples; ++i) {
    CounterRng rng(derive_key(seed, {0xb007ULL, static_cast<std::uint64_t>(i)}));
    std::binomial_distribution<std::int64_t> dist(rec.mu, ph);
    ShotRecord r = rec;
    r.n0 = dist(rng);
    r.n1 = r.mu - r.n0;
    try {
      fs.push_back(empirical_fim(r, p));
    } catch (const DegenerateError&) {
      ++s.dropped;
    }
  }
  if (s.dropped * 10 > n_resamples)
    throw DegenerateError("bootstrap_fim: " + std::to_string(s.dropped) + " of " +
                          std::to_string(n_resamples) + " resamples degenerate");
  s.used = static_cast<int>(fs.size());
  for (const auto& f : fs) {
    s.mean.bb += f.bb;
    s.mean.xx += f.xx;
    s.mean.bx += f.bx;
  }
  const double n = static_cast<double>(fs.size());
  s.mean.bb /= n;
  s.mean.xx /= n;
  s.mean.bx /= n;
  for (const auto& f : fs) {
    s.std.bb += (f.bb - s.mean.bb) * (f.bb - s.mean.bb);
    s.std.xx += (f.xx - s.mean.xx) * (f.xx - s.mean.xx);
    s.std.bx += (f.bx - s.mean.bx) * (f.bx - s.mean.bx);
  }
  const double dn = std::max(1.0, n - 1.0);
  s.std.bb = std::sqrt(s.std.bb / dn);
  s.std.xx = std::sqrt(s.std.xx / dn);
  s.std.bx = std::sqrt(s.std.bx / dn);
  return s;
}

struct BiasRow {
  double beta_true = 0.0;
  double v_true = 0.0;
  double v_meas = 0.0;
  double beta_hat = 0.0;
  double beta_corr = 0.0;
  bool in_domain = false;
  bool contracted = false;  // |beta_hat| < |beta_true| with matching sign (or both zero)
};

// Forward model V -> shrink -> invert, plus the corrected round trip.
inline std::vector<BiasRow> bias_sweep(const std::vector<double>& beta_true_values, double kappa,
                                       double hbar_omega0 = 1.0) {
  const ShrinkageModel m{kappa};
  m.validate();
  std::vector<BiasRow> rows;
  for (double b : beta_true_values) {
    BiasRow r;
    r.beta_true = b;
    r.v_true = visibility(ModelParams{b, hbar_omega0, 0.0, 1});
    r.v_meas = apply_shrinkage(r.v_true, m);
    r.beta_hat = invert_visibility(r.v_meas, hbar_omega0);
    try {
      r.beta_corr = correct_shrinkage(r.v_meas, m, hbar_omega0);
      r.in_domain = true;
    } catch (const OutOfDomainError&) {
      r.beta_corr = std::nan("");
    }
    if (b == 0.0) r.contracted = r.beta_hat == 0.0 || std::abs(r.beta_hat) < 1e-12;
    else r.contracted = (r.beta_hat > 0.0) == (b > 0.0) && std::abs(r.beta_hat) < std::abs(b);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace mzqfi
