#pragma once

// Positive semidefinite matrices and the spectral primitives built on the
// Jacobi eigensolver: singular values, square root, generalized inverse,
// Loewner-order comparison and the spectrum of a product of two PSD matrices.

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "agmcs/hermitian.hpp"

namespace agmcs {

template <Scalar T>
class PsdMatrix {
 public:
  // lambda_min >= -tol * max(1, lambda_max), lambda from hermitian_eig.
  explicit PsdMatrix(HermitianMatrix<T> h, double tol = kTol.psd)
      : h_(std::move(h)), eig_(std::make_shared<const Eigendecomposition<T>>(hermitian_eig(h_))) {
    const double lmax = eig_->values.max();
    const double bound = -tol * std::max(1.0, lmax);
    if (h_.dim() > 0 && eig_->values.min() < bound) throw NotPsd(eig_->values.min(), bound);
  }
  explicit PsdMatrix(Matrix<T> m) : PsdMatrix(HermitianMatrix<T>(std::move(m))) {}

  static PsdMatrix identity(std::size_t n) { return PsdMatrix(Matrix<T>::identity(n)); }
  static PsdMatrix zero(std::size_t n) { return PsdMatrix(Matrix<T>::zeros(n, n)); }

  const HermitianMatrix<T>& hermitian() const { return h_; }
  const Matrix<T>& matrix() const { return h_.matrix(); }
  std::size_t dim() const { return h_.dim(); }
  const Spectrum& spectrum() const { return eig_->values; }
  const Eigendecomposition<T>& eigen() const { return *eig_; }

 private:
  HermitianMatrix<T> h_;
  std::shared_ptr<const Eigendecomposition<T>> eig_;
};

// Number of eigenvalues above rel_tol * lambda_max.
inline std::size_t numerical_rank(const Spectrum& s, double rel_tol) {
  const double cut = rel_tol * std::max(s.max(), 0.0);
  return static_cast<std::size_t>(
      std::count_if(s.values().begin(), s.values().end(), [&](double v) { return v > cut && v > 0.0; }));
}

// Singular values as the non-negative half of the spectrum of the Hermitian
// dilation [[0, X], [X*, 0]]; avoids squaring, so zero singular values stay
// at roundoff level instead of sqrt(roundoff).
template <Scalar T>
Spectrum singular_values(const Matrix<T>& x) {
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();
  const std::size_t len = std::min(m, n);
  if (len == 0) return Spectrum({}, Spectrum::Kind::singular_values);
  Matrix<T> d(m + n, m + n);
  d.set_block(0, m, x);
  d.set_block(m, 0, x.adjoint());
  const auto e = hermitian_eig(HermitianMatrix<T>(std::move(d)));
  std::vector<double> s(len);
  for (std::size_t i = 0; i < len; ++i) s[i] = std::max(0.0, e.values[i]);
  return Spectrum(std::move(s), Spectrum::Kind::singular_values);
}

template <Scalar T>
Spectrum eigenvalues(const HermitianMatrix<T>& h) {
  return hermitian_eig(h).values;
}

template <Scalar T>
PsdMatrix<T> psd_sqrt(const PsdMatrix<T>& a, const Tolerances& tol = kTol) {
  const auto& e = a.eigen();
  const double floor = tol.spectral_floor * std::max(e.values.max(), 0.0);
  return PsdMatrix<T>(spectral_apply(e, [&](double l) { return l > floor ? std::sqrt(l) : 0.0; }));
}

// Eigenvalues <= rank_tol * lambda_max map to 0, the rest to 1/lambda.
template <Scalar T>
PsdMatrix<T> pseudo_inverse(const PsdMatrix<T>& a, double rank_tol) {
  if (!(rank_tol > 0)) throw InvalidArgument("pseudo_inverse: rank_tol must be positive");
  const auto& e = a.eigen();
  const double lmax = e.values.max();
  if (lmax <= 0) return PsdMatrix<T>::zero(a.dim());
  const double cut = rank_tol * lmax;
  return PsdMatrix<T>(spectral_apply(e, [&](double l) { return l > cut ? 1.0 / l : 0.0; }));
}

// PSD matrix power restricted to the numerical range (negative exponents
// invert only the eigenvalues above rank_tol * lambda_max).
template <Scalar T>
PsdMatrix<T> psd_power(const PsdMatrix<T>& a, double exponent, double rank_tol = kTol.spectral_floor) {
  const auto& e = a.eigen();
  const double cut = rank_tol * std::max(e.values.max(), 0.0);
  return PsdMatrix<T>(spectral_apply(e, [&](double l) { return l > cut ? std::pow(l, exponent) : 0.0; }));
}

struct LoewnerVerdict {
  bool holds;
  double margin;  // lambda_min(B - A)
  double scale;   // max(1, max|A|, max|B|)
};

// A <= B in the Loewner order iff lambda_min(B - A) >= -tol * scale.
template <Scalar T>
LoewnerVerdict loewner_leq(const HermitianMatrix<T>& a, const HermitianMatrix<T>& b, double tol) {
  if (a.dim() != b.dim()) throw DimensionMismatch("loewner_leq: dimensions differ");
  const double scale = std::max({1.0, a.matrix().max_abs(), b.matrix().max_abs()});
  if (a.dim() == 0) return {true, 0.0, scale};
  const double margin = eigenvalues(HermitianMatrix<T>(b.matrix() - a.matrix())).min();
  return {margin >= -tol * scale, margin, scale};
}

template <Scalar T>
LoewnerVerdict loewner_leq(const PsdMatrix<T>& a, const PsdMatrix<T>& b, double tol) {
  return loewner_leq(a.hermitian(), b.hermitian(), tol);
}

// Eigenvalues of AB, computed as those of A^{1/2} B A^{1/2}; clamped at 0.
template <Scalar T>
Spectrum eigvals_of_product(const PsdMatrix<T>& a, const PsdMatrix<T>& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("eigvals_of_product: dimensions differ");
  const auto s = psd_sqrt(a);
  const Matrix<T> m = s.matrix() * b.matrix() * s.matrix();
  auto v = eigenvalues(HermitianMatrix<T>(m, 1e-10)).vector();
  for (auto& x : v) x = std::max(x, 0.0);
  return Spectrum(std::move(v), Spectrum::Kind::eigenvalues);
}

}  // namespace agmcs
