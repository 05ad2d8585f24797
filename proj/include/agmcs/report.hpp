#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "agmcs/matrix.hpp"
#include "agmcs/tolerances.hpp"

namespace agmcs {

// Which instance a report came from. Unset fields were not part of it.
struct InstanceDigest {
  std::size_t n = 0;
  std::optional<FieldKind> field;
  std::optional<double> q;
  std::optional<std::size_t> k;
  std::optional<double> r;
  std::optional<double> p;
  std::optional<std::string> phi;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> index;
};

// One evaluated inequality lhs <= rhs.
struct CheckReport {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  double margin = 0;  // rhs - lhs
  double tol = kTol.check;
  bool holds = true;
  InstanceDigest instance;
};

inline bool within_tolerance(double margin, double rhs, double tol) {
  return margin >= -tol * std::max(1.0, std::abs(rhs));
}

inline CheckReport make_report(std::string name, double lhs, double rhs, double tol, InstanceDigest digest = {}) {
  const double margin = rhs - lhs;
  return {std::move(name), lhs, rhs, margin, tol, within_tolerance(margin, rhs, tol), std::move(digest)};
}

}  // namespace agmcs
