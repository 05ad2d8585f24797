#pragma once

namespace agmcs {

// Relative slack for double-precision evaluation; each is applied against a
// scale of max(1, lambda_max) or max(1, max|entry|) at the point of use.
struct Tolerances {
  double hermitian = 1e-12;
  double psd = 1e-10;
  double eig = 1e-11;
  double fun = 1e-10;
  double check = 1e-9;
  double violation = 1e-6;
  // Jacobi stops once the off-diagonal Frobenius mass is below this times |H|_F.
  double jacobi_offdiag = 1e-14;
  int jacobi_max_sweeps = 100;
  // Eigenvalues below this fraction of lambda_max are numerically zero.
  double spectral_floor = 1e-14;
  // Spectra raised to a power r < 1 first zero entries below this fraction
  // of the natural scale of the matrix they came from.
  double power_floor = 1e-13;
};

inline constexpr Tolerances kTol{};

}  // namespace agmcs
