#pragma once

// Uniform entry point over the checkers, used by sweeps, hunts and the CLI.
// An instance is a pair of square matrices (M1, M2) of one dimension:
//   theorem2, false-variant, weyl-majorant   read them as PSD A, B
//   every other target                       reads them as X, Y

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "agmcs/checks.hpp"

namespace agmcs {

inline bool needs_psd_pair(Target t) {
  return t == Target::theorem2 || t == Target::false_variant || t == Target::weyl_majorant;
}

inline bool uses_q(Target t) {
  return t == Target::theorem1 || t == Target::theorem2 || t == Target::singular_form ||
         t == Target::false_variant || t == Target::majorization_chain;
}

inline bool uses_r(Target t) {
  return t == Target::weyl_majorant || t == Target::sv_majorization || t == Target::majorization_chain;
}

inline bool uses_k(Target t) {
  return t == Target::theorem2 || t == Target::singular_form || t == Target::agm_singular ||
         t == Target::false_variant;
}

// The inequalities known to hold; a hunt aimed at them must come back empty.
inline bool is_true_inequality(Target t) { return t != Target::false_variant; }

// Norms for theorem1. Empty means the full grid; "kyfan:*" stands for every
// Ky Fan index 1..n and "schatten:*" for the grid's Schatten exponents.
struct NormSelection {
  std::vector<GaugeSpec> norms;
  bool all_ky_fan = false;
  bool grid_schatten = false;

  bool empty() const { return norms.empty() && !all_ky_fan && !grid_schatten; }

  std::vector<GaugeSpec> resolve(std::size_t n) const {
    if (empty()) return norm_grid(n);
    std::vector<GaugeSpec> out;
    for (const auto& g : norm_grid(n)) {
      const bool kf = std::holds_alternative<KyFan>(g.variant());
      if ((kf && all_ky_fan) || (!kf && grid_schatten)) out.push_back(g);
    }
    for (const auto& g : norms)
      if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
    return out;
  }

  std::vector<std::string> to_strings() const {
    std::vector<std::string> out;
    if (all_ky_fan) out.push_back("kyfan:*");
    if (grid_schatten) out.push_back("schatten:*");
    for (const auto& g : norms) out.push_back(g.to_string());
    return out;
  }

  // Comma-separated gauge specs; "grid" selects the full grid.
  static NormSelection parse(const std::string& text) {
    NormSelection sel;
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (item == "kyfan:*") {
        sel.all_ky_fan = true;
      } else if (item == "schatten:*") {
        sel.grid_schatten = true;
      } else if (item == "grid") {
        sel.all_ky_fan = sel.grid_schatten = true;
      } else {
        sel.norms.push_back(GaugeSpec::parse(item));
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return sel;
  }
};

struct TargetParams {
  NormSelection norms;
  std::vector<double> r_values{0.5, 1.0, 2.0};
  std::optional<std::size_t> k;  // keep only this index
  double tol = kTol.check;
};

namespace detail {

template <Scalar T>
std::vector<CheckReport> evaluate_xy(Target t, const Matrix<T>& x, const Matrix<T>& y, double q,
                                     const TargetParams& p) {
  std::vector<CheckReport> out;
  switch (t) {
    case Target::theorem1:
      return check_theorem1_grid(x, y, q, p.norms.resolve(x.cols()), p.tol);
    case Target::singular_form:
      return check_singular_form_all(x, y, q, p.tol);
    case Target::agm_singular:
      return check_agm_singular_all(x, y, p.tol);
    case Target::sv_majorization:
      for (double r : p.r_values) out.push_back(check_sv_product_majorization(x, y, r, p.tol));
      return out;
    case Target::majorization_chain:
      for (double r : p.r_values)
        for (auto& rep : check_majorization_chain(x, y, q, r, p.tol)) out.push_back(std::move(rep));
      return out;
    default:
      throw InvalidArgument("target '" + std::string(to_string(t)) + "' needs a PSD pair");
  }
}

template <Scalar T>
std::vector<CheckReport> evaluate_psd(Target t, const PsdMatrix<T>& a, const PsdMatrix<T>& b, double q,
                                      const TargetParams& p) {
  std::vector<CheckReport> out;
  switch (t) {
    case Target::theorem2:
      return check_theorem2_all(a, b, q, p.tol);
    case Target::false_variant:
      return check_false_variant_all(a, b, q, p.tol);
    case Target::weyl_majorant:
      for (double r : p.r_values) out.push_back(check_weyl_majorant(a, b, r, p.tol));
      return out;
    default:
      return evaluate_xy(t, a.matrix(), b.matrix(), q, p);
  }
}

inline std::vector<CheckReport> keep_k(std::vector<CheckReport> reps, std::size_t n, const TargetParams& p) {
  if (!p.k) return reps;
  require_k(*p.k, n);
  std::vector<CheckReport> out;
  for (auto& r : reps)
    if (!r.instance.k || *r.instance.k == *p.k) out.push_back(std::move(r));
  return out;
}

}  // namespace detail

template <Scalar T>
std::vector<CheckReport> evaluate_target(Target t, const PsdMatrix<T>& a, const PsdMatrix<T>& b, double q,
                                         const TargetParams& p = {}) {
  if (a.dim() != b.dim()) throw DimensionMismatch("instance matrices differ in dimension");
  return detail::keep_k(detail::evaluate_psd(t, a, b, q, p), a.dim(), p);
}

// General matrices; PSD targets reject a pair that is not PSD.
template <Scalar T>
std::vector<CheckReport> evaluate_target(Target t, const Matrix<T>& m1, const Matrix<T>& m2, double q,
                                         const TargetParams& p = {}) {
  if (!m1.square() || m1.rows() != m2.rows() || m1.cols() != m2.cols()) {
    throw DimensionMismatch("instance matrices must be square and of equal size, got " + m1.shape_string() +
                            " and " + m2.shape_string());
  }
  if (needs_psd_pair(t)) return evaluate_target(t, PsdMatrix<T>(m1), PsdMatrix<T>(m2), q, p);
  return detail::keep_k(detail::evaluate_xy(t, m1, m2, q, p), m1.rows(), p);
}

}  // namespace agmcs
