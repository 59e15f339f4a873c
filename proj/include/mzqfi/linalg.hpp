#pragma once

// Block-diagonal complex matrices. Every density operator in the toolkit is
// stored this way: a qubit readout state is one block, a Fock-space state is
// one block per conserved-number sector.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "mzqfi/errors.hpp"

namespace mzqfi {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct BlockDiagonal {
  std::vector<Matrix> blocks;

  BlockDiagonal() = default;
  explicit BlockDiagonal(std::vector<Matrix> b) : blocks(std::move(b)) {}

  static BlockDiagonal zeros_like(const BlockDiagonal& other) {
    BlockDiagonal out;
    out.blocks.reserve(other.blocks.size());
    for (const auto& b : other.blocks) out.blocks.push_back(Matrix::Zero(b.rows(), b.cols()));
    return out;
  }

  std::size_t size() const { return blocks.size(); }

  std::size_t dimension() const {
    std::size_t d = 0;
    for (const auto& b : blocks) d += static_cast<std::size_t>(b.rows());
    return d;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (const auto& b : blocks) t += b.trace();
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& b : blocks) s += b.squaredNorm();
    return std::sqrt(s);
  }

  // Largest |A - A^dagger| entry over all blocks.
  double hermiticity_defect() const {
    double worst = 0.0;
    for (const auto& b : blocks)
      if (b.size() > 0) worst = std::max(worst, (b - b.adjoint()).cwiseAbs().maxCoeff());
    return worst;
  }

  BlockDiagonal& operator+=(const BlockDiagonal& o) {
    check_shape(o);
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] += o.blocks[i];
    return *this;
  }
  BlockDiagonal& operator-=(const BlockDiagonal& o) {
    check_shape(o);
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] -= o.blocks[i];
    return *this;
  }
  BlockDiagonal& operator*=(cplx s) {
    for (auto& b : blocks) b *= s;
    return *this;
  }

  friend BlockDiagonal operator+(BlockDiagonal a, const BlockDiagonal& b) { return a += b; }
  friend BlockDiagonal operator-(BlockDiagonal a, const BlockDiagonal& b) { return a -= b; }
  friend BlockDiagonal operator*(BlockDiagonal a, cplx s) { return a *= s; }
  friend BlockDiagonal operator*(cplx s, BlockDiagonal a) { return a *= s; }

  friend BlockDiagonal operator*(const BlockDiagonal& a, const BlockDiagonal& b) {
    a.check_shape(b);
    BlockDiagonal out;
    out.blocks.reserve(a.blocks.size());
    for (std::size_t i = 0; i < a.blocks.size(); ++i) out.blocks.push_back(a.blocks[i] * b.blocks[i]);
    return out;
  }

  // Dense matrix with the blocks placed along the diagonal.
  Matrix to_dense() const {
    const auto d = static_cast<Eigen::Index>(dimension());
    Matrix out = Matrix::Zero(d, d);
    Eigen::Index off = 0;
    for (const auto& b : blocks) {
      out.block(off, off, b.rows(), b.cols()) = b;
      off += b.rows();
    }
    return out;
  }

 private:
  void check_shape(const BlockDiagonal& o) const {
    if (o.blocks.size() != blocks.size())
      throw InvalidArgument("block-diagonal operands have different block counts");
    for (std::size_t i = 0; i < blocks.size(); ++i)
      if (o.blocks[i].rows() != blocks[i].rows() || o.blocks[i].cols() != blocks[i].cols())
        throw InvalidArgument("block-diagonal operands have different block shapes");
  }
};

// Tr(A B) without forming the product.
inline cplx trace_of_product(const Matrix& a, const Matrix& b) {
  return (a.array() * b.transpose().array()).sum();
}

inline cplx trace_of_product(const BlockDiagonal& a, const BlockDiagonal& b) {
  cplx t = 0.0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) t += trace_of_product(a.blocks[i], b.blocks[i]);
  return t;
}

// Smallest eigenvalue over all blocks (Hermitian part).
inline double min_eigenvalue(const BlockDiagonal& m) {
  double lo = 0.0;
  bool any = false;
  for (const auto& b : m.blocks) {
    if (b.rows() == 0) continue;
    const Matrix h = 0.5 * (b + b.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    const double v = es.eigenvalues().minCoeff();
    lo = any ? std::min(lo, v) : v;
    any = true;
  }
  return lo;
}

}  // namespace mzqfi
