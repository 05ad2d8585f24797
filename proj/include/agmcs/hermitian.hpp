#pragma once

// Hermitian matrices and the cyclic Jacobi eigensolver.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "agmcs/matrix.hpp"
#include "agmcs/tolerances.hpp"

namespace agmcs {

template <Scalar T>
class HermitianMatrix {
 public:
  // Symmetrizes to (M + M*)/2 after checking the defect against
  // tol * max(1, max|M|). The pre-symmetrization defect is kept.
  explicit HermitianMatrix(Matrix<T> m, double tol = kTol.hermitian) {
    if (!m.square()) throw DimensionMismatch("Hermitian matrix must be square, got " + m.shape_string());
    defect_ = hermitian_defect(m);
    const double bound = tol * std::max(1.0, m.max_abs());
    if (defect_ > bound) throw NotHermitian(defect_, bound);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      m(i, i) = T{detail::real(m(i, i))};
      for (std::size_t j = i + 1; j < m.cols(); ++j) {
        const T avg = (m(i, j) + detail::conj(m(j, i))) * T{0.5};
        m(i, j) = avg;
        m(j, i) = detail::conj(avg);
      }
    }
    m_ = std::move(m);
  }

  static HermitianMatrix identity(std::size_t n) { return HermitianMatrix(Matrix<T>::identity(n)); }

  const Matrix<T>& matrix() const { return m_; }
  std::size_t dim() const { return m_.rows(); }
  double defect() const { return defect_; }

 private:
  Matrix<T> m_;
  double defect_ = 0;
};

template <Scalar T>
struct Eigendecomposition {
  Spectrum values;
  Matrix<T> vectors;  // unitary; column j belongs to values[j]
  int sweeps = 0;
};

namespace detail {

inline double off_diagonal_norm(const auto& a) {
  double s = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += abs2(a(i, j));
  return std::sqrt(s);
}

// One complex Jacobi rotation zeroing a(p,q). The rotation is
// G = diag(1, conj(phase)) * [[c, s], [-s, c]] acting on coordinates p, q.
template <Scalar T>
void jacobi_rotate(Matrix<T>& a, Matrix<T>& v, std::size_t p, std::size_t q) {
  const T apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const T phase = apq / mag;
  const double app = real(a(p, p));
  const double aqq = real(a(q, q));
  const double theta = (aqq - app) / (2.0 * mag);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const T gpp{c};
  const T gpq{s};
  const T gqp = -s * conj(phase);
  const T gqq = c * conj(phase);

  const std::size_t n = a.rows();
  for (std::size_t r = 0; r < n; ++r) {
    const T x = a(r, p);
    const T y = a(r, q);
    a(r, p) = x * gpp + y * gqp;
    a(r, q) = x * gpq + y * gqq;
  }
  for (std::size_t r = 0; r < n; ++r) {
    const T x = a(p, r);
    const T y = a(q, r);
    a(p, r) = conj(gpp) * x + conj(gqp) * y;
    a(q, r) = conj(gpq) * x + conj(gqq) * y;
  }
  a(p, q) = T{0};
  a(q, p) = T{0};
  a(p, p) = T{app - t * mag};
  a(q, q) = T{aqq + t * mag};
  for (std::size_t r = 0; r < n; ++r) {
    const T x = v(r, p);
    const T y = v(r, q);
    v(r, p) = x * gpp + y * gqp;
    v(r, q) = x * gpq + y * gqq;
  }
}

}  // namespace detail

// Cyclic Jacobi. Eigenvalues are returned non-ascending; ties keep the
// solver's column order so results are reproducible.
template <Scalar T>
Eigendecomposition<T> hermitian_eig(const HermitianMatrix<T>& h, const Tolerances& tol = kTol) {
  const std::size_t n = h.dim();
  Matrix<T> a = h.matrix();
  Matrix<T> v = Matrix<T>::identity(n);
  const double norm = a.frobenius_norm();

  int sweep = 0;
  if (norm > 0.0) {
    for (;; ++sweep) {
      const double off = detail::off_diagonal_norm(a);
      if (off <= tol.jacobi_offdiag * norm) break;
      if (sweep >= tol.jacobi_max_sweeps) throw NonConvergence(sweep, off);
      for (std::size_t p = 0; p + 1 < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) detail::jacobi_rotate(a, v, p, q);
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return detail::real(a(i, i)) > detail::real(a(j, j));
  });

  std::vector<double> values(n);
  Matrix<T> vectors(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    values[c] = detail::real(a(order[c], order[c]));
    for (std::size_t r = 0; r < n; ++r) vectors(r, c) = v(r, order[c]);
  }
  return {Spectrum(std::move(values), Spectrum::Kind::eigenvalues), std::move(vectors), sweep};
}

// U diag(f(lambda)) U* for a decomposition.
template <Scalar T, class F>
Matrix<T> spectral_apply(const Eigendecomposition<T>& e, F&& f) {
  const std::size_t n = e.vectors.rows();
  Matrix<T> r(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double fj = f(e.values[j]);
    if (fj == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const T uij = e.vectors(i, j) * fj;
      for (std::size_t l = 0; l < n; ++l) r(i, l) += uij * detail::conj(e.vectors(l, j));
    }
  }
  return r;
}

}  // namespace agmcs
