#pragma once

// Dense row-major matrices over double or std::complex<double>.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "agmcs/errors.hpp"

namespace agmcs {

using cplx = std::complex<double>;

template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, cplx>;

enum class FieldKind { real, complex };

template <Scalar T>
constexpr FieldKind field_of() {
  return std::same_as<T, double> ? FieldKind::real : FieldKind::complex;
}

inline const char* to_string(FieldKind f) { return f == FieldKind::real ? "real" : "complex"; }

namespace detail {
inline double conj(double x) { return x; }
inline cplx conj(const cplx& z) { return std::conj(z); }
inline double real(double x) { return x; }
inline double real(const cplx& z) { return z.real(); }
inline double abs2(double x) { return x * x; }
inline double abs2(const cplx& z) { return std::norm(z); }
inline bool finite(double x) { return std::isfinite(x); }
inline bool finite(const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }
}  // namespace detail

template <Scalar T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T{0}) {}

  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw InvalidArgument("matrix data length " + std::to_string(data_.size()) + " != " +
                            std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    for (const auto& x : data_) {
      if (!detail::finite(x)) throw InvalidArgument("matrix entries must be finite");
    }
  }

  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw InvalidArgument("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

  static Matrix diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = T{d[i]};
    return m;
  }
  static Matrix diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  std::span<const T> data() const { return data_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix adjoint() const {
    Matrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = detail::conj((*this)(i, j));
    return r;
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionMismatch("block out of range");
    Matrix r(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) r(i, j) = (*this)(r0 + i, c0 + j);
    return r;
  }

  void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) throw DimensionMismatch("set_block out of range");
    for (std::size_t i = 0; i < b.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  double frobenius_norm() const {
    double s = 0;
    for (const auto& x : data_) s += detail::abs2(x);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0;
    for (const auto& x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  T trace() const {
    T t{0};
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(T s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, T s) { return a *= s; }
  friend Matrix operator*(T s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) {
      throw DimensionMismatch("product of " + a.shape_string() + " and " + b.shape_string());
    }
    Matrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t l = 0; l < a.cols_; ++l) {
        const T ail = a(i, l);
        if (ail == T{0}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += ail * b(l, j);
      }
    return r;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

  std::string shape_string() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw DimensionMismatch("shape " + shape_string() + " vs " + o.shape_string());
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<cplx>;

inline ComplexMatrix to_complex(const RealMatrix& m) {
  std::vector<cplx> d(m.data().begin(), m.data().end());
  return ComplexMatrix(m.rows(), m.cols(), std::move(d));
}

// [[a, b], [c, d]] from four conformal blocks.
template <Scalar T>
Matrix<T> from_blocks(const Matrix<T>& a, const Matrix<T>& b, const Matrix<T>& c, const Matrix<T>& d) {
  if (a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() || b.cols() != d.cols()) {
    throw DimensionMismatch("from_blocks: non-conformal blocks");
  }
  Matrix<T> m(a.rows() + c.rows(), a.cols() + b.cols());
  m.set_block(0, 0, a);
  m.set_block(0, a.cols(), b);
  m.set_block(a.rows(), 0, c);
  m.set_block(a.rows(), a.cols(), d);
  return m;
}

// max |M - M*| over entries.
template <Scalar T>
double hermitian_defect(const Matrix<T>& m) {
  double d = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) d = std::max(d, std::abs(m(i, j) - detail::conj(m(j, i))));
  return d;
}

// Sorted non-ascending real vector of eigenvalues or singular values.
class Spectrum {
 public:
  enum class Kind { eigenvalues, singular_values };

  Spectrum() = default;
  Spectrum(std::vector<double> values, Kind kind) : values_(std::move(values)), kind_(kind) {
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
      if (values_[i] < values_[i + 1]) throw InvalidArgument("spectrum must be sorted non-ascending");
    }
    if (kind_ == Kind::singular_values) {
      for (double v : values_)
        if (v < 0) throw InvalidArgument("singular values must be non-negative");
    }
  }

  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }
  Kind kind() const { return kind_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  // 1-based, as in lambda_k / sigma_k.
  double at_rank(std::size_t k) const {
    if (k == 0 || k > values_.size()) {
      throw InvalidArgument("index k=" + std::to_string(k) + " outside 1.." + std::to_string(values_.size()));
    }
    return values_[k - 1];
  }
  double max() const { return values_.empty() ? 0.0 : values_.front(); }
  double min() const { return values_.empty() ? 0.0 : values_.back(); }

 private:
  std::vector<double> values_;
  Kind kind_ = Kind::eigenvalues;
};

}  // namespace agmcs
