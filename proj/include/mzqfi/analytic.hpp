#pragma once

// Closed-form model of the ideal dispersive Mach-Zehnder interferometer:
// thermal atom in one arm, NOON probe, photon counting at one output port.
// Fringe phase convention: P0 = (1 + V cos(2Nx)) / (1 + V).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "mzqfi/errors.hpp"
#include "mzqfi/grid.hpp"

namespace mzqfi {

struct ModelParams {
  double beta = 0.0;
  double hbar_omega0 = 1.0;
  double x = 0.0;
  int n_photons = 1;

  void validate() const {
    detail::require(std::isfinite(beta), "beta must be finite");
    detail::require(std::isfinite(x), "x must be finite");
    detail::require(std::isfinite(hbar_omega0) && hbar_omega0 > 0.0,
                    "hbar_omega0 must be > 0");
    detail::require(n_photons >= 1, "n_photons must be >= 1");
  }
};

// Ground/excited populations of the thermal two-level atom,
// p_g = 1/(1+e^{-beta hw}), evaluated without overflow for either sign.
struct ThermalPopulations {
  double ground = 1.0;
  double excited = 0.0;
};

inline ThermalPopulations thermal_populations(double beta, double hbar_omega0) {
  const double u = beta * hbar_omega0;
  if (u >= 0.0) {
    const double e = std::exp(-u);
    return {1.0 / (1.0 + e), e / (1.0 + e)};
  }
  const double w = std::exp(u);
  return {w / (1.0 + w), 1.0 / (1.0 + w)};
}

// d p_g / d beta = hw p_g p_e.
inline double thermal_ground_derivative(double beta, double hbar_omega0) {
  const auto pop = thermal_populations(beta, hbar_omega0);
  return hbar_omega0 * pop.ground * pop.excited;
}

// Visibility and its complement 1-V, both computed without cancellation.
struct VisibilityPair {
  double v = 0.0;
  double one_minus_v = 1.0;
};

inline VisibilityPair visibility_pair(double beta, double hbar_omega0) {
  const double u = beta * hbar_omega0;
  if (u > 0.0) {
    const double e = std::exp(-u);
    return {e / (2.0 + e), 2.0 / (2.0 + e)};
  }
  const double w = std::exp(u);
  return {1.0 / (1.0 + 2.0 * w), 2.0 * w / (1.0 + 2.0 * w)};
}

// V(beta) = e^{-beta hw} / (2 + e^{-beta hw}).
inline double visibility(const ModelParams& p) {
  return visibility_pair(p.beta, p.hbar_omega0).v;
}

// V'(beta) = -hw V (1 - V).
inline double visibility_derivative(const ModelParams& p) {
  const auto vp = visibility_pair(p.beta, p.hbar_omega0);
  return -p.hbar_omega0 * vp.v * vp.one_minus_v;
}

struct FringeProbabilities {
  double p0 = 1.0;
  double pN = 0.0;
};

inline FringeProbabilities output_probabilities(const ModelParams& p) {
  const auto vp = visibility_pair(p.beta, p.hbar_omega0);
  const double phase = p.n_photons * p.x;
  const double s = std::sin(phase);
  const double c = std::cos(phase);
  // 1 + V cos(2Nx) = (1 - V) + 2 V cos^2(Nx); avoids cancellation near V -> 1.
  const double p0 = (vp.one_minus_v + 2.0 * vp.v * c * c) / (1.0 + vp.v);
  const double pN = 2.0 * vp.v * s * s / (1.0 + vp.v);
  return {p0, pN};
}

struct ProbabilityGradient {
  double d_beta = 0.0;
  double d_x = 0.0;
};

// Gradient of P0 with respect to (beta, x).
inline ProbabilityGradient probability_gradient(const ModelParams& p) {
  const auto vp = visibility_pair(p.beta, p.hbar_omega0);
  const double n = p.n_photons;
  const double s = std::sin(n * p.x);
  const double one_plus_v = 1.0 + vp.v;
  return {2.0 * p.hbar_omega0 * vp.v * vp.one_minus_v * s * s / (one_plus_v * one_plus_v),
          -2.0 * n * vp.v / one_plus_v * std::sin(2.0 * n * p.x)};
}

// Symmetric 2x2 information matrix over (beta, x).
struct FisherMatrix {
  double bb = 0.0;
  double xx = 0.0;
  double bx = 0.0;

  double det() const { return bb * xx - bx * bx; }
  double trace() const { return bb + xx; }
  double operator()(int a, int b) const {
    if (a == 0 && b == 0) return bb;
    if (a == 1 && b == 1) return xx;
    return bx;
  }
};

inline constexpr double kDefaultDegeneracyFloor = 1e-12;

// Closed-form Fisher matrix of the two-outcome photon-counting measurement.
// Throws DegenerateError only where the closed form itself is singular,
// i.e. 1 + V cos(2Nx) < floor (V -> 1 at a dark fringe).
inline FisherMatrix fim_analytic(const ModelParams& p,
                                 double floor = kDefaultDegeneracyFloor) {
  p.validate();
  const auto vp = visibility_pair(p.beta, p.hbar_omega0);
  const double n = p.n_photons;
  const double hw = p.hbar_omega0;
  const double s = std::sin(n * p.x);
  const double c = std::cos(n * p.x);
  const double denom = vp.one_minus_v + 2.0 * vp.v * c * c;
  if (!(denom >= floor)) {
    throw DegenerateError("fim_analytic: 1 + V cos(2Nx) below degeneracy floor at beta=" +
                          std::to_string(p.beta) + ", x=" + std::to_string(p.x));
  }
  const double one_plus_v = 1.0 + vp.v;
  FisherMatrix f;
  f.bb = 2.0 * hw * hw * vp.v * vp.one_minus_v * vp.one_minus_v * s * s /
         (one_plus_v * one_plus_v * denom);
  f.xx = 8.0 * n * n * vp.v * c * c / denom;
  f.bx = -2.0 * n * hw * vp.v * vp.one_minus_v * std::sin(2.0 * n * p.x) /
         (one_plus_v * denom);
  return f;
}

struct ScalarFigures {
  double f_eff = 0.0;         // det F / Tr F
  double trace = 0.0;         // Tr F
  double f_x_fraction = 0.0;  // F_xx / Tr F
};

inline ScalarFigures scalar_figures(const FisherMatrix& f) {
  const double tr = f.trace();
  if (!(tr > 0.0)) throw DegenerateError("scalar_figures: trace of Fisher matrix is not positive");
  return {f.det() / tr, tr, f.xx / tr};
}

// Marks grid points where Tr F >= (1 - delta) * max Tr F over the grid.
// Rows index beta, columns index x; the template supplies hbar_omega0 and N.
inline Grid2D<unsigned char> plateau_mask(const LandscapeGrid& grid,
                                          const ModelParams& tmpl, double delta) {
  grid.validate();
  detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
  Grid2D<double> tr(grid.n_beta, grid.n_x);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.n_beta; ++i) {
    for (std::size_t j = 0; j < grid.n_x; ++j) {
      ModelParams p = tmpl;
      p.beta = grid.beta_at(i);
      p.x = grid.x_at(j);
      tr(i, j) = fim_analytic(p).trace();
      best = std::max(best, tr(i, j));
    }
  }
  Grid2D<unsigned char> mask(grid.n_beta, grid.n_x, 0);
  const double threshold = (1.0 - delta) * best;
  for (std::size_t i = 0; i < grid.n_beta; ++i)
    for (std::size_t j = 0; j < grid.n_x; ++j) mask(i, j) = tr(i, j) >= threshold ? 1 : 0;
  return mask;
}

}  // namespace mzqfi
