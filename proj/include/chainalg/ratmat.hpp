#pragma once

#include <cassert>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chainalg/rational.hpp"

namespace chainalg {

using RatVec = std::vector<Rat>;

inline bool is_zero(const RatVec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

inline RatVec& add_scaled(RatVec& dst, const Rat& c, const RatVec& src) {
  assert(dst.size() == src.size());
  for (size_t i = 0; i < dst.size(); ++i) dst[i] += c * src[i];
  return dst;
}

// Dense matrix over exact rationals. Small sizes only (dimensions of the
// algebras and their cochain blocks), so plain Gauss-Jordan is adequate.
class RatMat {
 public:
  RatMat() : rows_(0), cols_(0) {}
  RatMat(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static RatMat identity(size_t n) {
    RatMat m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  Rat& operator()(size_t i, size_t j) {
    assert(i < rows_ && j < cols_);
    return a_[i * cols_ + j];
  }
  const Rat& operator()(size_t i, size_t j) const {
    assert(i < rows_ && j < cols_);
    return a_[i * cols_ + j];
  }

  bool operator==(const RatMat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }
  bool is_zero() const {
    for (const auto& x : a_)
      if (x != 0) return false;
    return true;
  }

  RatMat operator+(const RatMat& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    RatMat r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
  }
  RatMat operator-(const RatMat& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    RatMat r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
  }
  RatMat operator-() const {
    RatMat r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = -a_[i];
    return r;
  }
  // hidden friend: visible only through ADL on RatMat operands
  friend RatMat operator*(const Rat& c, const RatMat& m) { return m * c; }

  RatMat operator*(const Rat& c) const {
    RatMat r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * c;
    return r;
  }
  RatMat operator*(const RatMat& o) const {
    assert(cols_ == o.rows_);
    RatMat r(rows_, o.cols_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t k = 0; k < cols_; ++k) {
        const Rat& x = (*this)(i, k);
        if (x == 0) continue;
        for (size_t j = 0; j < o.cols_; ++j) {
          const Rat& y = o(k, j);
          if (y != 0) r(i, j) += x * y;
        }
      }
    return r;
  }

  RatMat transpose() const {
    RatMat r(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  Rat trace() const {
    assert(rows_ == cols_);
    Rat t = 0;
    for (size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  RatVec mul(const RatVec& v) const {
    assert(v.size() == cols_);
    RatVec r(rows_, Rat(0));
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j) {
        const Rat& x = (*this)(i, j);
        if (x != 0 && v[j] != 0) r[i] += x * v[j];
      }
    return r;
  }

  // Reduced row echelon form in place; returns the pivot columns.
  std::vector<size_t> rref() {
    std::vector<size_t> pivots;
    size_t row = 0;
    for (size_t col = 0; col < cols_ && row < rows_; ++col) {
      size_t piv = row;
      while (piv < rows_ && (*this)(piv, col) == 0) ++piv;
      if (piv == rows_) continue;
      if (piv != row)
        for (size_t j = 0; j < cols_; ++j) std::swap((*this)(piv, j), (*this)(row, j));
      const Rat inv = Rat(1) / (*this)(row, col);
      for (size_t j = col; j < cols_; ++j) (*this)(row, j) *= inv;
      for (size_t i = 0; i < rows_; ++i) {
        if (i == row) continue;
        const Rat f = (*this)(i, col);
        if (f == 0) continue;
        for (size_t j = col; j < cols_; ++j) (*this)(i, j) -= f * (*this)(row, j);
      }
      pivots.push_back(col);
      ++row;
    }
    return pivots;
  }

  size_t rank() const {
    RatMat tmp = *this;
    return tmp.rref().size();
  }

  // Basis of {x : A x = 0}, one column vector per free column.
  std::vector<RatVec> nullspace() const {
    RatMat tmp = *this;
    const std::vector<size_t> pivots = tmp.rref();
    std::vector<bool> is_pivot(cols_, false);
    for (size_t p : pivots) is_pivot[p] = true;
    std::vector<RatVec> basis;
    for (size_t free = 0; free < cols_; ++free) {
      if (is_pivot[free]) continue;
      RatVec v(cols_, Rat(0));
      v[free] = 1;
      for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -tmp(r, free);
      basis.push_back(std::move(v));
    }
    return basis;
  }

  // One solution of A x = b, or nullopt when inconsistent.
  std::optional<RatVec> solve(const RatVec& b) const {
    assert(b.size() == rows_);
    RatMat aug(rows_, cols_ + 1);
    for (size_t i = 0; i < rows_; ++i) {
      for (size_t j = 0; j < cols_; ++j) aug(i, j) = (*this)(i, j);
      aug(i, cols_) = b[i];
    }
    const std::vector<size_t> pivots = aug.rref();
    if (!pivots.empty() && pivots.back() == cols_) return std::nullopt;
    RatVec x(cols_, Rat(0));
    for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, cols_);
    return x;
  }

  std::optional<RatMat> inverse() const {
    assert(rows_ == cols_);
    RatMat aug(rows_, 2 * cols_);
    for (size_t i = 0; i < rows_; ++i) {
      for (size_t j = 0; j < cols_; ++j) aug(i, j) = (*this)(i, j);
      aug(i, cols_ + i) = 1;
    }
    const std::vector<size_t> pivots = aug.rref();
    // singular iff some pivot escapes into the identity half
    if (pivots.size() != rows_ || pivots.back() >= cols_) return std::nullopt;
    RatMat inv(rows_, cols_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j) inv(i, j) = aug(i, cols_ + j);
    return inv;
  }

  Eigen::MatrixXd to_double() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j) m(i, j) = chainalg::to_double((*this)(i, j));
    return m;
  }

  static RatMat from_double_exact(const Eigen::MatrixXd& m, long long denom) {
    // Only for matrices whose entries are exact multiples of 1/denom.
    RatMat r(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        r(i, j) = rat(static_cast<long long>(llround(m(i, j) * double(denom))), denom);
    return r;
  }

  friend std::ostream& operator<<(std::ostream& os, const RatMat& m) {
    for (size_t i = 0; i < m.rows_; ++i) {
      os << (i == 0 ? "[" : " ");
      for (size_t j = 0; j < m.cols_; ++j) os << rat_str(m(i, j)) << (j + 1 < m.cols_ ? " " : "");
      os << (i + 1 < m.rows_ ? ";\n" : "]");
    }
    return os;
  }

 private:
  size_t rows_, cols_;
  std::vector<Rat> a_;
};

inline RatMat commutator(const RatMat& x, const RatMat& y) { return x * y - y * x; }

// Rank of the span of a list of coordinate vectors.
inline size_t span_rank(const std::vector<RatVec>& vecs) {
  if (vecs.empty()) return 0;
  RatMat m(vecs.size(), vecs[0].size());
  for (size_t i = 0; i < vecs.size(); ++i)
    for (size_t j = 0; j < vecs[i].size(); ++j) m(i, j) = vecs[i][j];
  return m.rank();
}

}  // namespace chainalg
