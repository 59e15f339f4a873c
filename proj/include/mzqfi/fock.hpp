#pragma once

// Truncated Fock-space engine. Densities are stored block-diagonally over
// conserved-number sectors: NOON states live in fixed total photon number,
// two-mode squeezed vacuum in fixed photon-number difference. Loss, number
// dephasing and the thermal phase encoding all shift row and column labels
// by the same amount, so block-diagonality is preserved and large cutoffs
// stay cheap.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mzqfi/analytic.hpp"
#include "mzqfi/errors.hpp"
#include "mzqfi/linalg.hpp"

namespace mzqfi {

inline constexpr double kDefaultLeakageBound = 1e-8;

struct FockSpace {
  int modes = 2;
  int cutoff = 1;

  int per_mode() const { return cutoff + 1; }
  std::size_t dimension() const {
    const auto d = static_cast<std::size_t>(per_mode());
    return modes == 1 ? d : d * d;
  }
  std::size_t index(int na, int nb) const {
    return modes == 1 ? static_cast<std::size_t>(na)
                      : static_cast<std::size_t>(na) * per_mode() + nb;
  }
  std::array<int, 2> occupation(std::size_t idx) const {
    if (modes == 1) return {static_cast<int>(idx), 0};
    return {static_cast<int>(idx / per_mode()), static_cast<int>(idx % per_mode())};
  }
  void validate() const {
    detail::require(modes == 1 || modes == 2, "Fock space must have 1 or 2 modes");
    detail::require(cutoff >= 0, "cutoff must be >= 0");
  }
};

struct FockState {
  FockSpace space;
  Vector amplitudes;
  double leakage = 0.0;  // probability the untruncated state puts above the cutoff

  double norm() const { return amplitudes.norm(); }
};

enum class SectorRule { none, total_number, number_difference };

inline int sector_label(SectorRule rule, int na, int nb) {
  switch (rule) {
    case SectorRule::none: return 0;
    case SectorRule::total_number: return na + nb;
    case SectorRule::number_difference: return na - nb;
  }
  return 0;
}

// Basis bookkeeping shared by every density over the same (space, rule).
struct SectorLayout {
  FockSpace space;
  SectorRule rule = SectorRule::none;
  std::vector<int> labels;
  std::vector<std::vector<std::array<int, 2>>> basis;
  std::vector<std::pair<int, int>> where;  // global index -> (block, position)
  int label_offset = 0;

  static std::shared_ptr<const SectorLayout> make(const FockSpace& space, SectorRule rule) {
    space.validate();
    if (space.modes == 1) rule = SectorRule::none;
    auto l = std::make_shared<SectorLayout>();
    l->space = space;
    l->rule = rule;
    const int c = space.cutoff;
    int lo = 0, hi = 0;
    if (rule == SectorRule::total_number) hi = 2 * c;
    if (rule == SectorRule::number_difference) lo = -c, hi = c;
    l->label_offset = -lo;
    l->labels.resize(static_cast<std::size_t>(hi - lo + 1));
    for (int s = lo; s <= hi; ++s) l->labels[static_cast<std::size_t>(s - lo)] = s;
    l->basis.resize(l->labels.size());
    l->where.assign(space.dimension(), {-1, -1});
    for (std::size_t idx = 0; idx < space.dimension(); ++idx) {
      const auto occ = space.occupation(idx);
      const int b = sector_label(rule, occ[0], occ[1]) + l->label_offset;
      l->where[idx] = {b, static_cast<int>(l->basis[static_cast<std::size_t>(b)].size())};
      l->basis[static_cast<std::size_t>(b)].push_back(occ);
    }
    return l;
  }

  std::pair<int, int> locate(int na, int nb) const { return where[space.index(na, nb)]; }
};

class FockDensity {
 public:
  std::shared_ptr<const SectorLayout> layout;
  BlockDiagonal rho;

  FockDensity() = default;
  explicit FockDensity(std::shared_ptr<const SectorLayout> l) : layout(std::move(l)) {
    rho.blocks.reserve(layout->basis.size());
    for (const auto& b : layout->basis) {
      const auto n = static_cast<Eigen::Index>(b.size());
      rho.blocks.push_back(Matrix::Zero(n, n));
    }
  }

  const FockSpace& space() const { return layout->space; }

  static FockDensity zeros_like(const FockDensity& other) { return FockDensity(other.layout); }

  // <na,nb| rho |ma,mb>; zero across sectors.
  cplx element(int na, int nb, int ma, int mb) const {
    const auto r = layout->locate(na, nb);
    const auto c = layout->locate(ma, mb);
    if (r.first != c.first) return 0.0;
    return rho.blocks[static_cast<std::size_t>(r.first)](r.second, c.second);
  }

  Matrix to_dense() const {
    const auto d = static_cast<Eigen::Index>(space().dimension());
    Matrix out = Matrix::Zero(d, d);
    for (std::size_t b = 0; b < layout->basis.size(); ++b) {
      const auto& basis = layout->basis[b];
      for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j)
          out(static_cast<Eigen::Index>(space().index(basis[i][0], basis[i][1])),
              static_cast<Eigen::Index>(space().index(basis[j][0], basis[j][1]))) =
              rho.blocks[b](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    return out;
  }

  double mean_photon_number(int mode) const {
    double s = 0.0;
    for (std::size_t b = 0; b < layout->basis.size(); ++b)
      for (std::size_t i = 0; i < layout->basis[b].size(); ++i)
        s += layout->basis[b][i][static_cast<std::size_t>(mode)] *
             rho.blocks[b](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    return s;
  }

  // Applies f(row occupation, column occupation) as an entrywise factor.
  template <typename F>
  void scale_entries(F&& f) {
    for (std::size_t b = 0; b < layout->basis.size(); ++b) {
      const auto& basis = layout->basis[b];
      auto& m = rho.blocks[b];
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
          if (m(i, j) != cplx(0.0)) m(i, j) *= f(basis[static_cast<std::size_t>(i)],
                                                 basis[static_cast<std::size_t>(j)]);
    }
  }
};

// Picks the finest sector rule the state's support respects.
inline SectorRule natural_rule(const FockState& s, double tol = 0.0) {
  if (s.space.modes == 1) return SectorRule::none;
  for (SectorRule rule : {SectorRule::total_number, SectorRule::number_difference}) {
    bool first = true, ok = true;
    int label = 0;
    for (Eigen::Index i = 0; i < s.amplitudes.size() && ok; ++i) {
      if (std::abs(s.amplitudes(i)) <= tol) continue;
      const auto occ = s.space.occupation(static_cast<std::size_t>(i));
      const int l = sector_label(rule, occ[0], occ[1]);
      if (first) label = l, first = false;
      else ok = (l == label);
    }
    if (ok) return rule;
  }
  return SectorRule::none;
}

inline FockDensity to_density(const FockState& s, SectorRule rule) {
  auto layout = SectorLayout::make(s.space, rule);
  FockDensity out(layout);
  // Group nonzero amplitudes by sector; cross-sector coherence is not representable.
  std::vector<std::vector<std::pair<int, cplx>>> by_block(layout->basis.size());
  for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i) {
    if (s.amplitudes(i) == cplx(0.0)) continue;
    const auto w = layout->where[static_cast<std::size_t>(i)];
    by_block[static_cast<std::size_t>(w.first)].push_back({w.second, s.amplitudes(i)});
  }
  int used = 0;
  for (const auto& v : by_block) used += v.empty() ? 0 : 1;
  if (used > 1) throw InvalidArgument("state support spans several sectors of the chosen rule");
  for (std::size_t b = 0; b < by_block.size(); ++b)
    for (const auto& [i, ai] : by_block[b])
      for (const auto& [j, aj] : by_block[b]) out.rho.blocks[b](i, j) = ai * std::conj(aj);
  return out;
}

inline FockDensity to_density(const FockState& s) { return to_density(s, natural_rule(s)); }

// (|N,0> + |0,N>)/sqrt(2).
inline FockState make_noon(int n, int cutoff = -1) {
  detail::require(n >= 1, "NOON photon number must be >= 1");
  if (cutoff < 0) cutoff = n;
  if (cutoff < n) throw CutoffError("make_noon: cutoff " + std::to_string(cutoff) + " < N=" + std::to_string(n));
  FockState s;
  s.space = {2, cutoff};
  s.amplitudes = Vector::Zero(static_cast<Eigen::Index>(s.space.dimension()));
  const double a = 1.0 / std::sqrt(2.0);
  s.amplitudes(static_cast<Eigen::Index>(s.space.index(n, 0))) = a;
  s.amplitudes(static_cast<Eigen::Index>(s.space.index(0, n))) = a;
  return s;
}

namespace detail {

// Photon-number distribution of the even cat with |alpha|^2 = a2, in logs.
inline double cat_log_prob(double a2, int n) {
  if (n % 2 != 0) return -std::numeric_limits<double>::infinity();
  if (a2 == 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return std::log(2.0) - a2 + n * std::log(a2) - std::lgamma(n + 1.0) -
         std::log1p(std::exp(-2.0 * a2));
}

}  // namespace detail

// Probability weight the exact even cat puts above `cutoff`.
inline double cat_leakage(cplx alpha, int cutoff) {
  const double a2 = std::norm(alpha);
  double tail = 0.0;
  for (int n = cutoff + 1;; ++n) {
    const double t = std::exp(detail::cat_log_prob(a2, n));
    tail += t;
    if (n > a2 + 10 && n % 2 == 0 && t < 1e-30 * std::max(tail, 1e-300)) break;
    if (n > cutoff + 100000) break;
  }
  return tail;
}

inline int cat_guard_cutoff(cplx alpha) {
  const double a = std::abs(alpha);
  return static_cast<int>(std::ceil(a * a + 6.0 * a));
}

// Smallest cutoff at or above the |alpha|^2 + 6|alpha| guard whose leakage
// meets the bound.
inline int default_cat_cutoff(cplx alpha, double leakage_bound = kDefaultLeakageBound) {
  int c = cat_guard_cutoff(alpha);
  while (cat_leakage(alpha, c) >= leakage_bound) ++c;
  return c;
}

// Even cat N(|alpha> + |-alpha>), truncated and renormalized.
inline FockState make_cat(cplx alpha, int cutoff = -1,
                          double leakage_bound = kDefaultLeakageBound) {
  detail::require(std::isfinite(alpha.real()) && std::isfinite(alpha.imag()), "alpha must be finite");
  detail::require(leakage_bound > 0.0, "leakage bound must be > 0");
  if (cutoff < 0) cutoff = default_cat_cutoff(alpha, leakage_bound);
  if (cutoff < cat_guard_cutoff(alpha))
    throw CutoffError("make_cat: cutoff below |alpha|^2 + 6|alpha|");
  const double leak = cat_leakage(alpha, cutoff);
  if (leak >= leakage_bound)
    throw CutoffError("make_cat: truncation leakage " + std::to_string(leak) + " exceeds bound");
  FockState s;
  s.space = {1, cutoff};
  s.amplitudes = Vector::Zero(cutoff + 1);
  const double a2 = std::norm(alpha);
  const double phase = std::arg(alpha);
  for (int n = 0; n <= cutoff; n += 2)
    s.amplitudes(n) = std::polar(std::exp(0.5 * detail::cat_log_prob(a2, n)), n * phase);
  s.amplitudes /= s.amplitudes.norm();
  s.leakage = leak;
  return s;
}

inline double tmsv_leakage(double r, int cutoff) {
  return std::pow(std::tanh(std::abs(r)), 2.0 * (cutoff + 1));
}

inline int default_tmsv_cutoff(double r, double leakage_bound = kDefaultLeakageBound) {
  int c = 0;
  while (tmsv_leakage(r, c) >= leakage_bound) ++c;
  return c;
}

// sech r sum_n tanh^n r |n,n>, truncated and renormalized.
inline FockState make_tmsv(double r, int cutoff = -1,
                           double leakage_bound = kDefaultLeakageBound) {
  detail::require(std::isfinite(r) && r >= 0.0, "squeezing r must be finite and >= 0");
  detail::require(leakage_bound > 0.0, "leakage bound must be > 0");
  if (cutoff < 0) cutoff = default_tmsv_cutoff(r, leakage_bound);
  const double leak = tmsv_leakage(r, cutoff);
  if (leak >= leakage_bound)
    throw CutoffError("make_tmsv: tanh(r)^(2(cutoff+1)) = " + std::to_string(leak) + " exceeds bound");
  FockState s;
  s.space = {2, cutoff};
  s.amplitudes = Vector::Zero(static_cast<Eigen::Index>(s.space.dimension()));
  const double t = std::tanh(r);
  for (int n = 0; n <= cutoff; ++n)
    s.amplitudes(static_cast<Eigen::Index>(s.space.index(n, n))) = std::pow(t, n) / std::cosh(r);
  s.amplitudes /= s.amplitudes.norm();
  s.leakage = leak;
  return s;
}

inline double mean_photon_number(const FockState& s, int mode) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i)
    m += s.space.occupation(static_cast<std::size_t>(i))[static_cast<std::size_t>(mode)] *
         std::norm(s.amplitudes(i));
  return m;
}

// ---------------------------------------------------------------- channels

enum class NoiseTarget { sensing_mode, both_modes };

inline std::vector<int> target_modes(const FockSpace& space, NoiseTarget t) {
  if (space.modes == 1 || t == NoiseTarget::sensing_mode) return {0};
  return {0, 1};
}

// rho -> p_g rho + p_e Phi_x(rho), Phi_x(rho)_{nm} = e^{-i s x (n_a - m_a)} rho_{nm}.
// s = 1 is the number-phase map; s = 2 matches the 2Nx fringe convention.
inline FockDensity thermal_phase_encode(const FockDensity& rho, double beta, double hbar_omega0,
                                        double x, double phase_scale = 1.0) {
  detail::require(hbar_omega0 > 0.0, "hbar_omega0 must be > 0");
  const auto pop = thermal_populations(beta, hbar_omega0);
  FockDensity out = rho;
  const int dmax = out.space().cutoff;
  std::vector<cplx> factor(static_cast<std::size_t>(2 * dmax + 1));
  for (int d = -dmax; d <= dmax; ++d)
    factor[static_cast<std::size_t>(d + dmax)] = pop.ground + pop.excited * std::polar(1.0, -phase_scale * x * d);
  out.scale_entries([&](const std::array<int, 2>& r, const std::array<int, 2>& c) {
    return factor[static_cast<std::size_t>(r[0] - c[0] + dmax)];
  });
  return out;
}

namespace detail {

// w[n][k] = sqrt(C(n,k) (1-eta)^k eta^(n-k)).
inline std::vector<std::vector<double>> loss_weights(int cutoff, double eta) {
  std::vector<std::vector<double>> w(static_cast<std::size_t>(cutoff + 1));
  for (int n = 0; n <= cutoff; ++n) {
    w[static_cast<std::size_t>(n)].resize(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) {
      const double logc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
      const double lost = k == 0 ? 1.0 : std::pow(1.0 - eta, k);
      const double kept = std::pow(eta, n - k);
      w[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] =
          std::sqrt(std::exp(logc) * lost * kept);
    }
  }
  return w;
}

inline FockDensity amplitude_damp_mode(const FockDensity& rho, double eta, int mode) {
  const auto& layout = *rho.layout;
  const auto w = loss_weights(layout.space.cutoff, eta);
  FockDensity out = FockDensity::zeros_like(rho);
  for (std::size_t b = 0; b < layout.basis.size(); ++b) {
    const auto& basis = layout.basis[b];
    const auto& m = rho.rho.blocks[b];
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const auto cj = basis[static_cast<std::size_t>(j)];
      const int mm = cj[static_cast<std::size_t>(mode)];
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const cplx v = m(i, j);
        if (v == cplx(0.0)) continue;
        const auto ri = basis[static_cast<std::size_t>(i)];
        const int nn = ri[static_cast<std::size_t>(mode)];
        for (int k = 0; k <= std::min(nn, mm); ++k) {
          auto r2 = ri, c2 = cj;
          r2[static_cast<std::size_t>(mode)] -= k;
          c2[static_cast<std::size_t>(mode)] -= k;
          const auto pr = layout.locate(r2[0], r2[1]);
          const auto pc = layout.locate(c2[0], c2[1]);
          const double coef = w[static_cast<std::size_t>(nn)][static_cast<std::size_t>(k)] *
                              w[static_cast<std::size_t>(mm)][static_cast<std::size_t>(k)];
          out.rho.blocks[static_cast<std::size_t>(pr.first)](pr.second, pc.second) += coef * v;
        }
      }
    }
  }
  return out;
}

}  // namespace detail

// Photon loss with per-mode Kraus operators
// K_k = sum_n sqrt(C(n,k) (1-eta)^k eta^(n-k)) |n-k><n|.
inline FockDensity amplitude_damp(const FockDensity& rho, double eta,
                                  NoiseTarget target = NoiseTarget::both_modes) {
  detail::require(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
  if (eta == 1.0) return rho;
  FockDensity out = rho;
  for (int mode : target_modes(rho.space(), target)) out = detail::amplitude_damp_mode(out, eta, mode);
  return out;
}

// rho_{nm} -> e^{-gamma (n-m)^2} rho_{nm} on each targeted mode.
inline FockDensity phase_damp(const FockDensity& rho, double gamma,
                              NoiseTarget target = NoiseTarget::both_modes) {
  detail::require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be >= 0");
  if (gamma == 0.0) return rho;
  const auto modes = target_modes(rho.space(), target);
  FockDensity out = rho;
  out.scale_entries([&](const std::array<int, 2>& r, const std::array<int, 2>& c) {
    double e = 0.0;
    for (int m : modes) {
      const double d = r[static_cast<std::size_t>(m)] - c[static_cast<std::size_t>(m)];
      e += d * d;
    }
    return cplx(std::exp(-gamma * e));
  });
  return out;
}

// Correlated dephasing generated by L = n_a - n_b:
// rho_{nm} -> exp(-(eps/8) (L_n - L_m)^2) rho_{nm}. A NOON coherence decays as
// e^{-eps N^2 / 2}, so its phase QFI is N^2 e^{-eps N^2} = N^2 - N^4 eps + O(eps^2).
inline FockDensity differential_dephase(const FockDensity& rho, double eps) {
  detail::require(std::isfinite(eps) && eps >= 0.0, "dephasing strength must be >= 0");
  if (eps == 0.0) return rho;
  FockDensity out = rho;
  out.scale_entries([&](const std::array<int, 2>& r, const std::array<int, 2>& c) {
    const double dl = (r[0] - r[1]) - (c[0] - c[1]);
    return cplx(std::exp(-eps / 8.0 * dl * dl));
  });
  return out;
}

struct NoiseParams {
  double eta = 1.0;
  double gamma = 0.0;
  bool has_raw = false;
  double gamma_ad = 0.0;
  double gamma_pd = 0.0;
  double t = 0.0;

  // eta = e^{-gamma_AD t}, gamma = gamma_PD t / 2.
  static NoiseParams from_rates(double gamma_ad, double gamma_pd, double t) {
    detail::require(gamma_ad >= 0.0 && gamma_pd >= 0.0 && t >= 0.0, "rates and time must be >= 0");
    NoiseParams n;
    n.eta = std::exp(-gamma_ad * t);
    n.gamma = gamma_pd * t / 2.0;
    n.has_raw = true;
    n.gamma_ad = gamma_ad;
    n.gamma_pd = gamma_pd;
    n.t = t;
    n.validate();
    return n;
  }

  void validate() const {
    detail::require(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
    detail::require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be >= 0");
    if (has_raw) {
      detail::require(std::abs(eta - std::exp(-gamma_ad * t)) <= 1e-12,
                      "eta inconsistent with gamma_AD and t");
      detail::require(std::abs(gamma - gamma_pd * t / 2.0) <= 1e-12,
                      "gamma inconsistent with gamma_PD and t");
    }
  }
};

// eta^{N/2} e^{-gamma N^2} V(beta).
inline double effective_visibility(double beta, int n, const NoiseParams& noise,
                                   double hbar_omega0 = 1.0) {
  detail::require(n >= 1, "N must be >= 1");
  noise.validate();
  const double v = visibility(ModelParams{beta, hbar_omega0, 0.0, n});
  return std::pow(noise.eta, 0.5 * n) * std::exp(-noise.gamma * n * n) * v;
}

struct PipelineVisibility {
  double visibility = 0.0;
  double ideal_contrast = 0.0;   // (Pmax - Pmin)/(Pmax + Pmin) of the noiseless fringe
  double coherence_ratio = 0.0;  // |c_noisy| / |c_ideal|, averaged over the sweep
  double ratio_spread = 0.0;     // max deviation of the per-x ratio from its mean
};

// Fringe contrast through the channel pipeline: NOON -> phase encoding over an
// x sweep -> loss -> number dephasing, both on the sensing arm. The noise
// scales the NOON coherence rho_{(N,0),(0,N)}, and so the fringe contrast, by
// a factor read off the sweep; the noiseless contrast comes from the same sweep.
inline PipelineVisibility pipeline_visibility(double beta, int n, const NoiseParams& noise,
                                              double hbar_omega0 = 1.0, int n_sweep = 9) {
  detail::require(n >= 1, "N must be >= 1");
  detail::require(n_sweep >= 3 && n_sweep % 2 == 1, "sweep size must be odd and >= 3");
  noise.validate();
  const FockDensity probe = to_density(make_noon(n));
  double pmax = -1.0, pmin = 2.0;
  std::vector<double> ratios;
  for (int j = 0; j < n_sweep; ++j) {
    const double x = M_PI / n * j / (n_sweep - 1);  // one fringe period, includes x = pi/(2N)
    const auto p = output_probabilities(ModelParams{beta, hbar_omega0, x, n});
    pmax = std::max(pmax, p.p0);
    pmin = std::min(pmin, p.p0);
    const FockDensity ideal = thermal_phase_encode(probe, beta, hbar_omega0, x);
    const FockDensity noisy = phase_damp(
        amplitude_damp(ideal, noise.eta, NoiseTarget::sensing_mode), noise.gamma,
        NoiseTarget::sensing_mode);
    const double ci = std::abs(ideal.element(n, 0, 0, n));
    if (ci < 1e-12) continue;  // fringe node of the coherence itself
    ratios.push_back(std::abs(noisy.element(n, 0, 0, n)) / ci);
  }
  if (ratios.empty()) throw DegenerateError("pipeline_visibility: coherence vanishes over the sweep");
  PipelineVisibility out;
  double sum = 0.0;
  for (double r : ratios) sum += r;
  out.coherence_ratio = sum / static_cast<double>(ratios.size());
  for (double r : ratios) out.ratio_spread = std::max(out.ratio_spread, std::abs(r - out.coherence_ratio));
  out.ideal_contrast = (pmax - pmin) / (pmax + pmin);
  out.visibility = out.ideal_contrast * out.coherence_ratio;
  return out;
}

}  // namespace mzqfi
