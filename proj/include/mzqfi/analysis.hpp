#pragma once

// Metrological meta-analysis on top of the Fock engine: noisy QFIM of probe
// states, Fisher-information susceptibility and its scaling with probe size,
// critical photon number, robustness index and (eta, gamma) heatmaps.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mzqfi/analytic.hpp"
#include "mzqfi/errors.hpp"
#include "mzqfi/fock.hpp"
#include "mzqfi/grid.hpp"
#include "mzqfi/parallel.hpp"
#include "mzqfi/sld.hpp"

namespace mzqfi {

enum class ProbeKind { noon, cat, squeezed };

inline std::string to_string(ProbeKind k) {
  switch (k) {
    case ProbeKind::noon: return "noon";
    case ProbeKind::cat: return "cat";
    case ProbeKind::squeezed: return "squeezed";
  }
  return "?";
}

inline ProbeKind parse_probe_kind(const std::string& s) {
  if (s == "noon") return ProbeKind::noon;
  if (s == "cat") return ProbeKind::cat;
  if (s == "squeezed") return ProbeKind::squeezed;
  throw InvalidArgument("unknown probe '" + s + "' (expected noon, cat or squeezed)");
}

struct ProbeSpec {
  ProbeKind kind = ProbeKind::noon;
  int n = 4;               // NOON photon number
  cplx alpha{2.0, 0.0};    // cat amplitude
  double r = 1.1;          // two-mode squeezing
  int cutoff = -1;         // -1 picks the default for the probe
  double leakage_bound = kDefaultLeakageBound;

  static ProbeSpec noon(int n) { ProbeSpec p; p.kind = ProbeKind::noon; p.n = n; return p; }
  static ProbeSpec cat(cplx alpha) { ProbeSpec p; p.kind = ProbeKind::cat; p.alpha = alpha; return p; }
  static ProbeSpec squeezed(double r) { ProbeSpec p; p.kind = ProbeKind::squeezed; p.r = r; return p; }

  // Probe with a given size: N for NOON, mean photon number |alpha|^2 for the
  // cat, per-mode mean photon number sinh^2 r for the squeezed vacuum.
  static ProbeSpec with_size(ProbeKind kind, double size) {
    detail::require(size > 0.0, "probe size must be > 0");
    switch (kind) {
      case ProbeKind::noon: {
        const double k = std::round(size);
        detail::require(std::abs(k - size) < 1e-9, "NOON size must be an integer");
        return noon(static_cast<int>(k));
      }
      case ProbeKind::cat: return cat(cplx(std::sqrt(size), 0.0));
      case ProbeKind::squeezed: return squeezed(std::asinh(std::sqrt(size)));
    }
    throw InvalidArgument("unknown probe kind");
  }

  double size() const {
    switch (kind) {
      case ProbeKind::noon: return n;
      case ProbeKind::cat: return std::norm(alpha);
      case ProbeKind::squeezed: return std::sinh(r) * std::sinh(r);
    }
    return 0.0;
  }

  std::string label() const {
    char buf[64];
    switch (kind) {
      case ProbeKind::noon: std::snprintf(buf, sizeof buf, "noon(N=%d)", n); break;
      case ProbeKind::cat: std::snprintf(buf, sizeof buf, "cat(alpha=%g)", std::abs(alpha)); break;
      case ProbeKind::squeezed: std::snprintf(buf, sizeof buf, "squeezed(r=%g)", r); break;
    }
    return buf;
  }
};

inline FockDensity make_probe(const ProbeSpec& p) {
  switch (p.kind) {
    case ProbeKind::noon: return to_density(make_noon(p.n, p.cutoff));
    case ProbeKind::cat: return to_density(make_cat(p.alpha, p.cutoff, p.leakage_bound));
    case ProbeKind::squeezed: return to_density(make_tmsv(p.r, p.cutoff, p.leakage_bound));
  }
  throw InvalidArgument("unknown probe kind");
}

struct OperatingPoint {
  double beta = 0.5;
  double x = M_PI / 4.0;
  double hbar_omega0 = 1.0;
  double phase_scale = 1.0;
};

// Point used for the decoherence landscapes.
inline OperatingPoint figure_operating_point() { return {}; }

// Atom essentially always excited (p_e = 1 - 4e-18): the encoding reduces to a
// pure number-phase rotation, which is where the susceptibility laws are stated.
inline OperatingPoint pure_phase_operating_point() { return {-40.0, M_PI / 4.0, 1.0, 1.0}; }

struct NoiseSetting {
  double eta = 1.0;       // transmission per damped mode
  double gamma = 0.0;     // single-mode number dephasing per targeted mode
  double diff_eps = 0.0;  // correlated n_a - n_b dephasing
  NoiseTarget target = NoiseTarget::both_modes;
};

inline FockDensity apply_noise(const FockDensity& rho, const NoiseSetting& n) {
  FockDensity out = amplitude_damp(rho, n.eta, n.target);
  out = phase_damp(out, n.gamma, n.target);
  return differential_dephase(out, n.diff_eps);
}

// Noisy QFIM of a probe at an operating point. The channels act diagonally
// in photon number, so they commute with the phase encoding; the noisy state
// is built once and the (beta, x) family is the encoding applied to it.
inline QfimResult probe_qfim(const FockDensity& probe, const NoiseSetting& noise,
                             const OperatingPoint& op, const SldOptions& opt = {}) {
  const FockDensity sigma = apply_noise(probe, noise);
  DensityFamily family = [&](double b, double x) {
    return thermal_phase_encode(sigma, b, op.hbar_omega0, x, op.phase_scale).rho;
  };
  return qfim_with_guard(family, op.beta, op.x, opt);
}

// ------------------------------------------------------------ susceptibility

enum class Channel { amplitude_damping, phase_damping };

inline std::string to_string(Channel c) {
  return c == Channel::amplitude_damping ? "AD" : "PD";
}

inline Channel parse_channel(const std::string& s) {
  if (s == "AD" || s == "ad") return Channel::amplitude_damping;
  if (s == "PD" || s == "pd") return Channel::phase_damping;
  throw InvalidArgument("unknown channel '" + s + "' (expected AD or PD)");
}

// Noise of strength eps: loss eta = 1 - eps on every mode, or correlated
// n_a - n_b dephasing of strength eps.
inline NoiseSetting channel_noise(Channel c, double eps) {
  NoiseSetting n;
  if (c == Channel::amplitude_damping) n.eta = 1.0 - eps;
  else n.diff_eps = eps;
  return n;
}

inline std::vector<double> default_susceptibility_window() { return {0.002, 0.005, 0.01, 0.02}; }

struct SusceptibilityEstimate {
  double chi = 0.0;        // first-order loss coefficient
  double curvature = 0.0;  // second-order coefficient of F(0) - F(eps)
  double relative_curvature = 0.0;
  double f0 = 0.0;
  std::vector<double> eps;
  std::vector<double> loss;  // F(0) - F(eps)
};

// Fits F(0) - F(eps) = chi eps + c eps^2 through the origin.
inline SusceptibilityEstimate fit_susceptibility(const std::vector<double>& eps,
                                                 const std::vector<double>& loss,
                                                 double max_relative_curvature = 0.2) {
  detail::require(eps.size() == loss.size(), "eps and loss sizes differ");
  detail::require(eps.size() >= 3, "need at least 3 eps samples");
  double s2 = 0, s3 = 0, s4 = 0, y1 = 0, y2 = 0, emax = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double e = eps[i];
    detail::require(e > 0.0 && e <= 0.05, "eps samples must lie in (0, 0.05]");
    s2 += e * e;
    s3 += e * e * e;
    s4 += e * e * e * e;
    y1 += e * loss[i];
    y2 += e * e * loss[i];
    emax = std::max(emax, e);
  }
  const double det = s2 * s4 - s3 * s3;
  if (!(std::abs(det) > 1e-30 * s2 * s4)) throw DegenerateError("susceptibility: eps samples not distinct");
  SusceptibilityEstimate out;
  out.chi = (y1 * s4 - y2 * s3) / det;
  out.curvature = (s2 * y2 - s3 * y1) / det;
  out.eps = eps;
  out.loss = loss;
  out.relative_curvature =
      out.chi != 0.0 ? std::abs(out.curvature) * emax / std::abs(out.chi)
                     : std::numeric_limits<double>::infinity();
  if (out.relative_curvature > max_relative_curvature)
    throw NonlinearityError("susceptibility: relative curvature " +
                            std::to_string(out.relative_curvature) +
                            " over the eps window; use smaller eps");
  return out;
}

// chi_F of the phase information q_xx of a probe under a channel.
inline SusceptibilityEstimate susceptibility(const ProbeSpec& probe, Channel channel,
                                             const std::vector<double>& eps_samples,
                                             const OperatingPoint& op = pure_phase_operating_point(),
                                             const SldOptions& opt = {}) {
  detail::require(eps_samples.size() >= 3, "need at least 3 eps samples");
  for (double e : eps_samples) detail::require(e > 0.0 && e <= 0.05, "eps samples must lie in (0, 0.05]");
  const FockDensity rho0 = make_probe(probe);
  const double f0 = probe_qfim(rho0, NoiseSetting{}, op, opt).q.xx;
  std::vector<double> loss;
  for (double e : eps_samples) loss.push_back(f0 - probe_qfim(rho0, channel_noise(channel, e), op, opt).q.xx);
  auto est = fit_susceptibility(eps_samples, loss);
  est.f0 = f0;
  return est;
}

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;

  double operator()(double n) const { return prefactor * std::pow(n, exponent); }
};

// Least-squares line through (log x, log y).
inline PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys) {
  detail::require(xs.size() == ys.size(), "fit inputs differ in length");
  detail::require(xs.size() >= 2, "need at least 2 points");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    detail::require(xs[i] > 0.0 && ys[i] > 0.0, "power-law fit needs positive values");
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx, dy = std::log(ys[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 1e-300)) throw DegenerateError("power-law fit: log x has zero variance");
  PowerLawFit f;
  f.exponent = sxy / sxx;
  f.prefactor = std::exp(my - f.exponent * mx);
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

struct SusceptibilityFit {
  ProbeKind probe = ProbeKind::noon;
  Channel channel = Channel::amplitude_damping;
  std::vector<double> n_values;
  std::vector<double> chi_values;
  std::vector<double> f0_values;
  std::vector<std::vector<double>> windows;  // eps window actually used per point
  double exponent = 0.0;
  double prefactor = 0.0;
  double fit_r2 = 0.0;
};

inline SusceptibilityFit fit_scaling_exponent(const std::vector<double>& n_values,
                                              const std::vector<double>& chi_values) {
  detail::require(n_values.size() >= 4, "scaling fit needs at least 4 points");
  const auto f = fit_power_law(n_values, chi_values);
  SusceptibilityFit out;
  out.n_values = n_values;
  out.chi_values = chi_values;
  out.exponent = f.exponent;
  out.prefactor = f.prefactor;
  out.fit_r2 = f.r2;
  return out;
}

// chi over a list of probe sizes. A window that trips the curvature check is
// shrunk tenfold, up to `retries` times; the window used is recorded.
inline SusceptibilityFit susceptibility_scan(ProbeKind kind, Channel channel,
                                             const std::vector<double>& sizes,
                                             std::vector<double> window = default_susceptibility_window(),
                                             const OperatingPoint& op = pure_phase_operating_point(),
                                             const SldOptions& opt = {}, int retries = 2,
                                             std::size_t workers = 0) {
  detail::require(sizes.size() >= 4, "scan needs at least 4 probe sizes");
  std::vector<SusceptibilityEstimate> est(sizes.size());
  parallel_for(sizes.size(), [&](std::size_t i) {
    std::vector<double> w = window;
    for (int attempt = 0;; ++attempt) {
      try {
        est[i] = susceptibility(ProbeSpec::with_size(kind, sizes[i]), channel, w, op, opt);
        return;
      } catch (const NonlinearityError&) {
        if (attempt >= retries) throw;
        for (double& e : w) e *= 0.1;
      }
    }
  }, workers);
  std::vector<double> chi;
  for (const auto& e : est) chi.push_back(e.chi);
  SusceptibilityFit out = fit_scaling_exponent(sizes, chi);
  out.probe = kind;
  out.channel = channel;
  for (const auto& e : est) {
    out.f0_values.push_back(e.f0);
    out.windows.push_back(e.eps);
  }
  return out;
}

// Smallest N in [n_min, n_max] with eps chi(N) >= F0(N).
inline int critical_photon_number(const std::function<double(int)>& f0,
                                  const std::function<double(int)>& chi, double eps,
                                  int n_min = 1, int n_max = 1000000) {
  detail::require(eps > 0.0 && eps < 0.5, "eps must lie in (0, 0.5)");
  detail::require(n_min >= 1 && n_max >= n_min, "invalid search range");
  for (int n = n_min; n <= n_max; ++n)
    if (eps * chi(n) >= f0(n)) return n;
  throw SearchExhaustedError("critical_photon_number: no crossover in [" + std::to_string(n_min) +
                             ", " + std::to_string(n_max) + "]");
}

// N_crit from power laws fitted to a susceptibility scan.
inline int critical_photon_number(const SusceptibilityFit& scan, double eps, int n_max = 1000000) {
  detail::require(scan.f0_values.size() == scan.n_values.size(), "scan lacks F0 values");
  const PowerLawFit f0 = fit_power_law(scan.n_values, scan.f0_values);
  const PowerLawFit chi = fit_power_law(scan.n_values, scan.chi_values);
  return critical_photon_number([&](int n) { return f0(n); }, [&](int n) { return chi(n); }, eps, 1,
                                n_max);
}

// -------------------------------------------------------------- robustness

// q_xx with loss eta = 1 - eps on every mode, relative to the lossless value.
inline double robustness_index(const ProbeSpec& probe, double noise_eps,
                               const OperatingPoint& op = figure_operating_point(),
                               const SldOptions& opt = {},
                               NoiseTarget target = NoiseTarget::both_modes) {
  detail::require(noise_eps >= 0.0 && noise_eps < 1.0, "noise eps must lie in [0, 1)");
  const FockDensity rho0 = make_probe(probe);
  const double ideal = probe_qfim(rho0, NoiseSetting{}, op, opt).q.xx;
  if (!(ideal > 1e-12)) throw DegenerateError("robustness_index: ideal QFI is zero");
  if (noise_eps == 0.0) return 1.0;
  NoiseSetting n;
  n.eta = 1.0 - noise_eps;
  n.target = target;
  return probe_qfim(rho0, n, op, opt).q.xx / ideal;
}

struct HierarchyRow {
  std::string probe;
  double f_ideal = 0.0;
  double chi = 0.0;
  double robustness = 0.0;
};

inline std::vector<HierarchyRow> hierarchy(const std::vector<ProbeSpec>& probes, double eps,
                                           const OperatingPoint& op = figure_operating_point(),
                                           const SldOptions& opt = {}) {
  std::vector<HierarchyRow> rows(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    const auto& p = probes[i];
    HierarchyRow r;
    r.probe = p.label();
    r.f_ideal = probe_qfim(make_probe(p), NoiseSetting{}, op, opt).q.xx;
    std::vector<double> w = default_susceptibility_window();
    for (int attempt = 0;; ++attempt) {
      try {
        r.chi = susceptibility(p, Channel::amplitude_damping, w, op, opt).chi;
        break;
      } catch (const NonlinearityError&) {
        if (attempt >= 2) throw;
        for (double& e : w) e *= 0.1;
      }
    }
    r.robustness = robustness_index(p, eps, op, opt);
    rows[i] = r;
  });
  return rows;
}

// ------------------------------------------------------------ closed forms

// eta (n^2 + n) / (1 - eta + 1/(2n + 1)).
inline double squeezed_qfi_lossy(double n_bar, double eta) {
  detail::require(std::isfinite(n_bar) && n_bar >= 0.0, "n_bar must be >= 0");
  detail::require(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
  return eta * (n_bar * n_bar + n_bar) / (1.0 - eta + 1.0 / (2.0 * n_bar + 1.0));
}

// exp(-2 |alpha|^2 (1 - sqrt(eta))).
inline double cat_coherence(cplx alpha, double eta) {
  detail::require(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
  return std::exp(-2.0 * std::norm(alpha) * (1.0 - std::sqrt(eta)));
}

// Coherence C between the two surviving coherent components after the loss
// channel. The lossy even cat is K(|a'><a'| + |-a'><-a'| + C(|a'><-a'| + h.c.))
// with a' = sqrt(eta) alpha, so the photon-number parity fixes C.
inline double cat_coherence_kraus(cplx alpha, double eta) {
  detail::require(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
  const FockDensity rho = amplitude_damp(to_density(make_cat(alpha)), eta);
  double parity = 0.0;
  for (std::size_t i = 0; i < rho.layout->basis[0].size(); ++i)
    parity += (rho.layout->basis[0][i][0] % 2 == 0 ? 1.0 : -1.0) *
              rho.rho.blocks[0](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  const double a2 = std::norm(alpha);
  return parity * (1.0 + std::exp(-2.0 * a2)) - std::exp(-2.0 * eta * a2);
}

// --------------------------------------------------------------- heatmaps

struct HeatmapSpec {
  ProbeSpec probe;
  Interval eta_range{0.5, 1.0};
  Interval gamma_range{0.0, 0.1};
  std::size_t n_eta = 20;
  std::size_t n_gamma = 20;
  OperatingPoint op = figure_operating_point();
  SldOptions sld;
  NoiseTarget target = NoiseTarget::both_modes;

  void validate() const {
    detail::require(n_eta >= 2 && n_gamma >= 2, "heatmap resolution must be >= 2");
    detail::require(eta_range.lo > 0.0 && eta_range.hi <= 1.0 && eta_range.hi > eta_range.lo,
                    "eta range must be a non-degenerate subinterval of (0, 1]");
    detail::require(gamma_range.lo >= 0.0 && std::isfinite(gamma_range.hi) &&
                        gamma_range.hi > gamma_range.lo,
                    "gamma range must be a non-degenerate subinterval of [0, inf)");
    sld.validate();
  }

  double eta_at(std::size_t i) const { return linspace_at(eta_range, n_eta, i); }
  double gamma_at(std::size_t j) const { return linspace_at(gamma_range, n_gamma, j); }
};

struct HeatmapCell {
  double eta = 0.0;
  double gamma = 0.0;
  FisherMatrix q;
  double f_eff = 0.0;
  double incompatibility = 0.0;
  bool ok = false;
  std::string error;
};

inline HeatmapCell heatmap_cell(const FockDensity& probe, const HeatmapSpec& spec, double eta,
                                double gamma) {
  HeatmapCell c;
  c.eta = eta;
  c.gamma = gamma;
  try {
    NoiseSetting n;
    n.eta = eta;
    n.gamma = gamma;
    n.target = spec.target;
    const auto r = probe_qfim(probe, n, spec.op, spec.sld);
    c.q = r.q;
    c.incompatibility = r.incompatibility;
    c.f_eff = scalar_figures(r.q).f_eff;
    c.ok = true;
  } catch (const std::exception& e) {
    c.error = e.what();
  }
  return c;
}

// Rows index eta, columns gamma. Failing cells carry their error message.
inline Grid2D<HeatmapCell> decoherence_heatmap(const HeatmapSpec& spec, std::size_t workers = 0) {
  spec.validate();
  const FockDensity probe = make_probe(spec.probe);
  Grid2D<HeatmapCell> out(spec.n_eta, spec.n_gamma);
  parallel_for(spec.n_eta * spec.n_gamma, [&](std::size_t k) {
    const std::size_t i = k / spec.n_gamma, j = k % spec.n_gamma;
    out(i, j) = heatmap_cell(probe, spec, spec.eta_at(i), spec.gamma_at(j));
  }, workers);
  return out;
}

}  // namespace mzqfi
