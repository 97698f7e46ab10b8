#ifndef DGC_MATRIX_HPP
#define DGC_MATRIX_HPP

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace dgc {

/// Dense row-major matrix of doubles. Used for sample sets (n x d) and
/// center blocks (K x d).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<double> row(std::size_t r) {
    assert(r < rows_);
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    assert(r < rows_);
    return {values_.data() + r * cols_, cols_};
  }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // An empty matrix adopts the width of the first appended row.
  void append_row(std::span<const double> r) {
    if (rows_ == 0 && cols_ == 0) cols_ = r.size();
    assert(r.size() == cols_);
    values_.insert(values_.end(), r.begin(), r.end());
    ++rows_;
  }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double diff = a[c] - b[c];
    s += diff * diff;
  }
  return s;
}

inline double norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

}  // namespace dgc

#endif  // DGC_MATRIX_HPP
