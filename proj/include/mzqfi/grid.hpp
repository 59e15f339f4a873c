#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mzqfi/errors.hpp"

namespace mzqfi {

// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
};

// Uniformly spaced point i of n over [lo, hi] (both ends included).
inline double linspace_at(const Interval& r, std::size_t n, std::size_t i) {
  if (n == 1) return r.lo;
  if (i + 1 == n) return r.hi;
  return r.lo + r.width() * static_cast<double>(i) / static_cast<double>(n - 1);
}

inline std::vector<double> linspace(const Interval& r, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = linspace_at(r, n, i);
  return out;
}

// Row-major 2-D array. Rows index the first axis (beta or eta), columns the
// second (x or gamma).
template <typename T>
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(std::size_t rows, std::size_t cols, const T& fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// Uniform (beta, x) grid used by the landscape sweeps.
struct LandscapeGrid {
  Interval beta_range{-4.0, 4.0};
  Interval x_range{-M_PI / 2.0, M_PI / 2.0};
  std::size_t n_beta = 20;
  std::size_t n_x = 20;

  void validate() const {
    detail::require(n_beta >= 2 && n_x >= 2, "grid sizes must be >= 2");
    detail::require(std::isfinite(beta_range.lo) && std::isfinite(beta_range.hi) &&
                        beta_range.hi > beta_range.lo,
                    "beta range must be a non-degenerate finite interval");
    detail::require(std::isfinite(x_range.lo) && std::isfinite(x_range.hi) &&
                        x_range.hi > x_range.lo,
                    "x range must be a non-degenerate finite interval");
  }

  double beta_at(std::size_t i) const { return linspace_at(beta_range, n_beta, i); }
  double x_at(std::size_t j) const { return linspace_at(x_range, n_x, j); }
};

}  // namespace mzqfi
