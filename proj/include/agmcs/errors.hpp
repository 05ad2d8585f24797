#pragma once

#include <stdexcept>
#include <string>

namespace agmcs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct NotHermitian : Error {
  NotHermitian(double defect, double bound)
      : Error("matrix is not Hermitian: defect " + std::to_string(defect) + " > " + std::to_string(bound)),
        defect(defect) {}
  double defect;
};

struct NotPsd : Error {
  NotPsd(double lambda_min, double bound)
      : Error("matrix is not positive semidefinite: lambda_min " + std::to_string(lambda_min) + " < " +
              std::to_string(bound)),
        lambda_min(lambda_min) {}
  double lambda_min;
};

struct NonConvergence : Error {
  NonConvergence(int sweeps, double off_diagonal)
      : Error("Jacobi eigensolver did not converge after " + std::to_string(sweeps) +
              " sweeps; off-diagonal residual " + std::to_string(off_diagonal)),
        off_diagonal(off_diagonal) {}
  double off_diagonal;
};

struct ConfigError : Error {
  using Error::Error;
};

// Malformed input file or document; the message names the source.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace agmcs
