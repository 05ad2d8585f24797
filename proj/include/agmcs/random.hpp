#pragma once

// Seeded instance generators. Every generator takes its engine or seed
// explicitly; there is no global RNG state.

#include <cstdint>
#include <random>

#include "agmcs/psd.hpp"

namespace agmcs {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

// Independent stream for instance/restart `index` under `master`.
inline Rng substream(std::uint64_t master, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x9e3779b9u};
  return Rng(seq);
}

template <Scalar T>
T standard_normal(Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  if constexpr (std::same_as<T, double>) {
    return nd(rng);
  } else {
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
  }
}

template <Scalar T>
Matrix<T> random_gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix<T> g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = standard_normal<T>(rng);
  return g;
}

// G G* with G an n x rank Gaussian matrix.
template <Scalar T>
PsdMatrix<T> random_psd(std::size_t n, std::size_t rank, Rng& rng) {
  if (n == 0 || rank < 1 || rank > n) {
    throw InvalidArgument("random_psd: need 1 <= rank <= n, got rank " + std::to_string(rank) + ", n " +
                          std::to_string(n));
  }
  const auto g = random_gaussian<T>(n, rank, rng);
  return PsdMatrix<T>(g * g.adjoint());
}

template <Scalar T>
PsdMatrix<T> random_psd(std::size_t n, std::size_t rank, std::uint64_t seed) {
  auto rng = make_rng(seed);
  return random_psd<T>(n, rank, rng);
}

// Haar-distributed unitary: Q from Gram-Schmidt QR (positive diagonal R) of
// a Gaussian matrix.
template <Scalar T>
Matrix<T> random_unitary(std::size_t n, Rng& rng) {
  auto q = random_gaussian<T>(n, n, rng);
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        T dot{0};
        for (std::size_t r = 0; r < n; ++r) dot += detail::conj(q(r, i)) * q(r, j);
        for (std::size_t r = 0; r < n; ++r) q(r, j) -= dot * q(r, i);
      }
    }
    double nrm = 0;
    for (std::size_t r = 0; r < n; ++r) nrm += detail::abs2(q(r, j));
    nrm = std::sqrt(nrm);
    for (std::size_t r = 0; r < n; ++r) q(r, j) /= T{nrm};
  }
  return q;
}

// Hermitian matrix with unit Frobenius norm.
template <Scalar T>
Matrix<T> random_hermitian_direction(std::size_t n, Rng& rng) {
  const auto g = random_gaussian<T>(n, n, rng);
  Matrix<T> h = g + g.adjoint();
  const double f = h.frobenius_norm();
  if (f > 0) h *= T{1.0 / f};
  return h;
}

}  // namespace agmcs
