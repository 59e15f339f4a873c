#pragma once

// Symmetric logarithmic derivatives and the quantum Fisher information
// matrix of a two-parameter density family rho(beta, x).

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "mzqfi/analytic.hpp"
#include "mzqfi/errors.hpp"
#include "mzqfi/linalg.hpp"

namespace mzqfi {

using DensityFamily = std::function<BlockDiagonal(double beta, double x)>;

struct SldOptions {
  double step = 1e-4;              // central-difference step in beta and x
  double eigen_floor_rel = 1e-10;  // floor on lambda_j + lambda_k, relative to the largest eigenvalue
  double support_tol = 1e-6;       // allowed trace outside the retained eigenspace
  double drift_tol = 1e-5;         // step-halving guard on the QFIM
  int max_halvings = 3;

  void validate() const {
    detail::require(step > 0.0, "finite-difference step must be > 0");
    detail::require(eigen_floor_rel > 0.0, "eigen floor must be > 0");
    detail::require(support_tol > 0.0, "support tolerance must be > 0");
    detail::require(drift_tol > 0.0, "drift tolerance must be > 0");
    detail::require(max_halvings >= 0, "max_halvings must be >= 0");
  }
};

struct SLDPair {
  BlockDiagonal l_beta;
  BlockDiagonal l_x;
  BlockDiagonal rho;
  BlockDiagonal d_beta;  // finite-difference derivatives of rho
  BlockDiagonal d_x;
  double eigen_floor = 0.0;
  double retained_trace = 0.0;
  std::vector<Matrix> support;  // per block: eigenvectors kept in the support
};

inline BlockDiagonal central_difference(const DensityFamily& f, double beta, double x,
                                        int param, double h) {
  const BlockDiagonal plus = param == 0 ? f(beta + h, x) : f(beta, x + h);
  const BlockDiagonal minus = param == 0 ? f(beta - h, x) : f(beta, x - h);
  return (plus - minus) * cplx(0.5 / h);
}

// Solves d_a rho = (rho L_a + L_a rho)/2 in the eigenbasis of rho:
// (L_a)_{jk} = 2 <j|d_a rho|k> / (lambda_j + lambda_k) where the sum exceeds
// the floor, 0 elsewhere.
inline SLDPair sld_pair(const DensityFamily& family, double beta, double x,
                        const SldOptions& opt = {}) {
  opt.validate();
  SLDPair out;
  out.rho = family(beta, x);
  out.d_beta = central_difference(family, beta, x, 0, opt.step);
  out.d_x = central_difference(family, beta, x, 1, opt.step);
  out.l_beta = BlockDiagonal::zeros_like(out.rho);
  out.l_x = BlockDiagonal::zeros_like(out.rho);

  std::vector<Eigen::SelfAdjointEigenSolver<Matrix>> eig(out.rho.size());
  double lmax = 0.0;
  for (std::size_t b = 0; b < out.rho.size(); ++b) {
    const Matrix& m = out.rho.blocks[b];
    if (m.rows() == 0) continue;
    eig[b].compute(0.5 * (m + m.adjoint()));
    lmax = std::max(lmax, eig[b].eigenvalues().maxCoeff());
  }
  if (!(lmax > 0.0)) throw DegenerateError("sld_pair: density has no positive eigenvalue");
  out.eigen_floor = opt.eigen_floor_rel * lmax;

  double total = 0.0, kept = 0.0;
  out.support.resize(out.rho.size());
  for (std::size_t b = 0; b < out.rho.size(); ++b) {
    const Matrix& m = out.rho.blocks[b];
    if (m.rows() == 0) continue;
    const auto& lam = eig[b].eigenvalues();
    const Matrix& v = eig[b].eigenvectors();
    const Eigen::Index n = m.rows();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < n; ++j) {
      total += lam(j);
      if (2.0 * lam(j) > out.eigen_floor) {
        kept += lam(j);
        keep.push_back(j);
      }
    }
    Matrix sup(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) sup.col(static_cast<Eigen::Index>(c)) = v.col(keep[c]);
    out.support[b] = sup;
    if (keep.empty()) continue;
    const Matrix db = v.adjoint() * out.d_beta.blocks[b] * v;
    const Matrix dx = v.adjoint() * out.d_x.blocks[b] * v;
    Matrix lb = Matrix::Zero(n, n), lx = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double s = lam(j) + lam(k);
        if (s > out.eigen_floor) {
          lb(j, k) = 2.0 * db(j, k) / s;
          lx(j, k) = 2.0 * dx(j, k) / s;
        }
      }
    }
    out.l_beta.blocks[b] = v * lb * v.adjoint();
    out.l_x.blocks[b] = v * lx * v.adjoint();
  }
  out.retained_trace = total > 0.0 ? kept / total : 0.0;
  if (out.retained_trace < 1.0 - opt.support_tol)
    throw DegenerateError("sld_pair: retained eigenspace carries trace " +
                          std::to_string(out.retained_trace));
  return out;
}

// Q_ab = Re Tr(rho L_a L_b).
inline FisherMatrix qfim_numeric(const SLDPair& s, const BlockDiagonal& rho) {
  const BlockDiagonal rb = rho * s.l_beta;
  const BlockDiagonal rx = rho * s.l_x;
  FisherMatrix q;
  q.bb = trace_of_product(rb, s.l_beta).real();
  q.xx = trace_of_product(rx, s.l_x).real();
  q.bx = 0.5 * (trace_of_product(rb, s.l_x).real() + trace_of_product(rx, s.l_beta).real());
  return q;
}

inline FisherMatrix qfim_numeric(const SLDPair& s) { return qfim_numeric(s, s.rho); }

// (1/2)|Tr(rho [L_beta, L_x])| = |Im Tr(rho L_beta L_x)|.
inline double incompatibility(const SLDPair& s, const BlockDiagonal& rho) {
  const BlockDiagonal rb = rho * s.l_beta;
  return 0.5 * std::abs(trace_of_product(rb, s.l_x) - trace_of_product(rho * s.l_x, s.l_beta));
}

inline double incompatibility(const SLDPair& s) { return incompatibility(s, s.rho); }

// Largest Frobenius norm of P (d_a rho - (rho L_a + L_a rho)/2) P over both
// parameters, P the projector on the retained support.
inline double sld_residual(const SLDPair& s) {
  double worst = 0.0;
  for (int a = 0; a < 2; ++a) {
    const BlockDiagonal& d = a == 0 ? s.d_beta : s.d_x;
    const BlockDiagonal& l = a == 0 ? s.l_beta : s.l_x;
    double sq = 0.0;
    for (std::size_t b = 0; b < s.rho.size(); ++b) {
      if (s.support[b].cols() == 0) continue;
      const Matrix& r = s.rho.blocks[b];
      const Matrix res = d.blocks[b] - 0.5 * (r * l.blocks[b] + l.blocks[b] * r);
      sq += (s.support[b].adjoint() * res * s.support[b]).squaredNorm();
    }
    worst = std::max(worst, std::sqrt(sq));
  }
  return worst;
}

struct QfimResult {
  FisherMatrix q;
  double incompatibility = 0.0;
  double drift = 0.0;  // max |Q(h) - Q(h/2)| entry, relative to max(1, |Q|)
  double step = 0.0;   // step that produced q
};

inline double qfim_drift(const FisherMatrix& a, const FisherMatrix& b) {
  const double scale = std::max({1.0, std::abs(b.bb), std::abs(b.xx), std::abs(b.bx)});
  return std::max({std::abs(a.bb - b.bb), std::abs(a.xx - b.xx), std::abs(a.bx - b.bx)}) / scale;
}

// QFIM with the step-halving guard: the step is halved until two successive
// estimates agree to drift_tol. The finer estimate is returned.
inline QfimResult qfim_with_guard(const DensityFamily& family, double beta, double x,
                                  const SldOptions& opt = {}) {
  opt.validate();
  SldOptions o = opt;
  SLDPair coarse = sld_pair(family, beta, x, o);
  FisherMatrix qc = qfim_numeric(coarse);
  for (int i = 0; i <= o.max_halvings; ++i) {
    SldOptions fine_opt = o;
    fine_opt.step = o.step / 2.0;
    SLDPair fine = sld_pair(family, beta, x, fine_opt);
    const FisherMatrix qf = qfim_numeric(fine);
    const double drift = qfim_drift(qc, qf);
    if (drift < o.drift_tol) return {qf, incompatibility(fine), drift, fine_opt.step};
    qc = qf;
    o = fine_opt;
  }
  throw DegenerateError("qfim_with_guard: finite-difference QFIM did not converge");
}

}  // namespace mzqfi
