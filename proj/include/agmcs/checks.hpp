#pragma once

// One checker per inequality. Every checker measures and reports; none of
// them throws on a violated inequality.
//
//   theorem2        lambda_k(AB) <= lambda_k(C(q) C(1-q)),  C(q) = qA + (1-q)B
//   singular-form   sigma_k(XY*)^2 <= lambda_k(C(q) C(1-q)) with A = X*X, B = Y*Y
//   agm-singular    sigma_k(XY*) <= sigma_k(X*X + Y*Y) / 2
//   theorem1        |||XY*|||^2 <= |||C(q)||| |||C(1-q)|||
//   false-variant   sigma_k(AB) <= sigma_k(C(q) C(1-q))   (does not hold in general)

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agmcs/gauge.hpp"

namespace agmcs {

enum class Target {
  theorem1,
  theorem2,
  singular_form,
  agm_singular,
  false_variant,
  weyl_majorant,
  sv_majorization,
  majorization_chain,
};

inline constexpr std::array<std::pair<Target, std::string_view>, 8> kTargetNames{{
    {Target::theorem1, "theorem1"},
    {Target::theorem2, "theorem2"},
    {Target::singular_form, "singular-form"},
    {Target::agm_singular, "agm-singular"},
    {Target::false_variant, "false-variant"},
    {Target::weyl_majorant, "weyl-majorant"},
    {Target::sv_majorization, "sv-majorization"},
    {Target::majorization_chain, "chain"},
}};

inline std::string_view to_string(Target t) {
  for (const auto& [v, name] : kTargetNames)
    if (v == t) return name;
  return "unknown";
}

inline Target parse_target(std::string_view s) {
  for (const auto& [v, name] : kTargetNames)
    if (name == s) return v;
  throw InvalidArgument("unknown inequality '" + std::string(s) + "'");
}

namespace detail {

inline void require_q(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("q must lie in [0,1], got " + std::to_string(q));
}

inline void require_k(std::size_t k, std::size_t n) {
  if (k < 1 || k > n) {
    throw InvalidArgument("k=" + std::to_string(k) + " outside 1.." + std::to_string(n));
  }
}

inline double padded(const Spectrum& s, std::size_t k) { return k <= s.size() ? s[k - 1] : 0.0; }

// Singular values of a PSD matrix are its (clamped) eigenvalues.
template <Scalar T>
Spectrum psd_singular_values(const PsdMatrix<T>& a) {
  auto v = a.spectrum().vector();
  for (auto& x : v) x = std::max(x, 0.0);
  return Spectrum(std::move(v), Spectrum::Kind::singular_values);
}

template <Scalar T>
InstanceDigest digest(std::size_t n) {
  InstanceDigest d;
  d.n = n;
  d.field = field_of<T>();
  return d;
}

template <Scalar T>
void require_same_shape(const Matrix<T>& x, const Matrix<T>& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw DimensionMismatch("X and Y must have equal shapes: " + x.shape_string() + " vs " + y.shape_string());
  }
}

}  // namespace detail

// |v_i|^r, with entries at or below zero_below treated as exact zeros.
inline std::vector<double> spectrum_power(std::span<const double> v, double r, double zero_below) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    out[i] = a <= zero_below ? 0.0 : std::pow(a, r);
  }
  return out;
}

template <Scalar T>
PsdMatrix<T> cq_mix(const PsdMatrix<T>& a, const PsdMatrix<T>& b, double q) {
  detail::require_q(q);
  if (a.dim() != b.dim()) throw DimensionMismatch("cq_mix: dimensions differ");
  return PsdMatrix<T>(a.matrix() * T{q} + b.matrix() * T{1.0 - q});
}

// Both sides of the eigenvalue inequality for every k = 1..n.
template <Scalar T>
std::vector<CheckReport> check_theorem2_all(const PsdMatrix<T>& a, const PsdMatrix<T>& b, double q,
                                            double tol = kTol.check) {
  detail::require_q(q);
  const auto lhs = eigvals_of_product(a, b);
  const auto rhs = eigvals_of_product(cq_mix(a, b, q), cq_mix(a, b, 1.0 - q));
  std::vector<CheckReport> out;
  for (std::size_t k = 1; k <= a.dim(); ++k) {
    auto d = detail::digest<T>(a.dim());
    d.q = q;
    d.k = k;
    out.push_back(make_report("theorem2", lhs.at_rank(k), rhs.at_rank(k), tol, std::move(d)));
  }
  return out;
}

template <Scalar T>
CheckReport check_theorem2(const PsdMatrix<T>& a, const PsdMatrix<T>& b, double q, std::size_t k,
                           double tol = kTol.check) {
  detail::require_k(k, a.dim());
  return check_theorem2_all(a, b, q, tol)[k - 1];
}

template <Scalar T>
std::vector<CheckReport> check_singular_form_all(const Matrix<T>& x, const Matrix<T>& y, double q,
                                                 double tol = kTol.check) {
  detail::require_same_shape(x, y);
  detail::require_q(q);
  const PsdMatrix<T> a(x.adjoint() * x);
  const PsdMatrix<T> b(y.adjoint() * y);
  const auto sv = singular_values(Matrix<T>(x * y.adjoint()));
  const auto rhs = eigvals_of_product(cq_mix(a, b, q), cq_mix(a, b, 1.0 - q));
  std::vector<CheckReport> out;
  for (std::size_t k = 1; k <= a.dim(); ++k) {
    const double s = detail::padded(sv, k);
    auto d = detail::digest<T>(a.dim());
    d.q = q;
    d.k = k;
    out.push_back(make_report("singular-form", s * s, rhs.at_rank(k), tol, std::move(d)));
  }
  return out;
}

template <Scalar T>
CheckReport check_singular_form(const Matrix<T>& x, const Matrix<T>& y, double q, std::size_t k,
                                double tol = kTol.check) {
  detail::require_k(k, x.cols());
  return check_singular_form_all(x, y, q, tol)[k - 1];
}

template <Scalar T>
std::vector<CheckReport> check_agm_singular_all(const Matrix<T>& x, const Matrix<T>& y, double tol = kTol.check) {
  detail::require_same_shape(x, y);
  const auto lhs = singular_values(Matrix<T>(x * y.adjoint()));
  const auto sum = detail::psd_singular_values(PsdMatrix<T>(x.adjoint() * x + y.adjoint() * y));
  std::vector<CheckReport> out;
  for (std::size_t k = 1; k <= x.cols(); ++k) {
    auto d = detail::digest<T>(x.cols());
    d.k = k;
    out.push_back(make_report("agm-singular", detail::padded(lhs, k), 0.5 * sum.at_rank(k), tol, std::move(d)));
  }
  return out;
}

template <Scalar T>
CheckReport check_agm_singular(const Matrix<T>& x, const Matrix<T>& y, std::size_t k, double tol = kTol.check) {
  detail::require_k(k, x.cols());
  return check_agm_singular_all(x, y, tol)[k - 1];
}

inline std::string theorem1_name(double q) {
  if (q == 0.0 || q == 1.0) return "theorem1 (cauchy-schwarz endpoint)";
  if (q == 0.5) return "theorem1 (agm endpoint)";
  return "theorem1";
}

// Norm inequality for every gauge in `grid`, sharing one set of spectra.
template <Scalar T>
std::vector<CheckReport> check_theorem1_grid(const Matrix<T>& x, const Matrix<T>& y, double q,
                                             const std::vector<GaugeSpec>& grid, double tol = kTol.check) {
  detail::require_same_shape(x, y);
  detail::require_q(q);
  const PsdMatrix<T> a(x.adjoint() * x);
  const PsdMatrix<T> b(y.adjoint() * y);
  const auto sv = singular_values(Matrix<T>(x * y.adjoint()));
  const auto c1 = detail::psd_singular_values(cq_mix(a, b, q));
  const auto c2 = detail::psd_singular_values(cq_mix(a, b, 1.0 - q));
  std::vector<CheckReport> out;
  for (const auto& phi : grid) {
    const double n = gauge_eval(phi, sv.values());
    auto d = detail::digest<T>(x.cols());
    d.q = q;
    d.phi = phi.to_string();
    out.push_back(make_report(theorem1_name(q), n * n, gauge_eval(phi, c1.values()) * gauge_eval(phi, c2.values()),
                              tol, std::move(d)));
  }
  return out;
}

template <Scalar T>
CheckReport check_theorem1(const Matrix<T>& x, const Matrix<T>& y, double q, const GaugeSpec& phi,
                           double tol = kTol.check) {
  return check_theorem1_grid(x, y, q, {phi}, tol).front();
}

// |||XY*|||^2 <= |||X*X||| |||Y*Y|||, evaluated directly.
template <Scalar T>
CheckReport check_cauchy_schwarz(const Matrix<T>& x, const Matrix<T>& y, const GaugeSpec& phi,
                                 double tol = kTol.check) {
  detail::require_same_shape(x, y);
  const double n = ui_norm(phi, Matrix<T>(x * y.adjoint()));
  auto d = detail::digest<T>(x.cols());
  d.phi = phi.to_string();
  return make_report("cauchy-schwarz", n * n, ui_norm(phi, Matrix<T>(x.adjoint() * x)) * ui_norm(phi, Matrix<T>(y.adjoint() * y)),
                     tol, std::move(d));
}

// |||XY*||| <= |||X*X + Y*Y||| / 2, evaluated directly.
template <Scalar T>
CheckReport check_agm_norm(const Matrix<T>& x, const Matrix<T>& y, const GaugeSpec& phi, double tol = kTol.check) {
  detail::require_same_shape(x, y);
  auto d = detail::digest<T>(x.cols());
  d.phi = phi.to_string();
  return make_report("agm-norm", ui_norm(phi, Matrix<T>(x * y.adjoint())),
                     0.5 * ui_norm(phi, Matrix<T>(x.adjoint() * x + y.adjoint() * y)), tol, std::move(d));
}

inline CheckReport majorization_report(std::string name, const MajorizationVerdict& v, double tol,
                                       InstanceDigest d) {
  return make_report(std::move(name), v.lhs_prefix, v.rhs_prefix, tol, std::move(d));
}

// |lambda(AB)|^r weakly majorized by sigma(AB)^r.
template <Scalar T>
CheckReport check_weyl_majorant(const PsdMatrix<T>& a, const PsdMatrix<T>& b, double r, double tol = kTol.check) {
  if (!(r > 0)) throw InvalidArgument("r must be positive");
  const double scale = a.spectrum().max() * b.spectrum().max();
  const double floor = kTol.power_floor * scale;
  const auto lam = eigvals_of_product(a, b);
  const auto sv = singular_values(Matrix<T>(a.matrix() * b.matrix()));
  const auto x = spectrum_power(lam.values(), r, floor);
  const auto y = spectrum_power(sv.values(), r, floor);
  auto d = detail::digest<T>(a.dim());
  d.r = r;
  return majorization_report("weyl-majorant", weak_majorize(x, y, tol), tol, std::move(d));
}

// sigma(AB)^r weakly majorized by sigma(A)^r . sigma(B)^r.
template <Scalar T>
CheckReport check_sv_product_majorization(const Matrix<T>& a, const Matrix<T>& b, double r,
                                          double tol = kTol.check) {
  if (!(r > 0)) throw InvalidArgument("r must be positive");
  if (a.cols() != b.rows()) throw DimensionMismatch("A and B are not composable");
  const auto sa = singular_values(a);
  const auto sb = singular_values(b);
  const auto sab = singular_values(Matrix<T>(a * b));
  const double floor = kTol.power_floor * sa.max() * sb.max();
  auto pa = spectrum_power(sa.values(), r, kTol.power_floor * sa.max());
  auto pb = spectrum_power(sb.values(), r, kTol.power_floor * sb.max());
  const std::size_t len = std::max(pa.size(), pb.size());
  pa.resize(len, 0.0);
  pb.resize(len, 0.0);
  auto d = detail::digest<T>(a.rows());
  d.r = r;
  return majorization_report("sv-majorization",
                             weak_majorize(spectrum_power(sab.values(), r, floor), elementwise_product_abs(pa, pb), tol),
                             tol, std::move(d));
}

// The three links leading from the eigenvalue inequality to the norm
// inequality, for A = X*X, B = Y*Y and C(q) = qA + (1-q)B:
//   (a) sigma^{2r}(XY*)          <_w lambda^r(C(q)C(1-q))
//   (b) lambda^r(C(q)C(1-q))     <_w lambda^r(C(q)) . lambda^r(C(1-q))
//   (c) sigma^{2r}(XY*)          <_w lambda^r(C(q)) . lambda^r(C(1-q))
template <Scalar T>
std::vector<CheckReport> check_majorization_chain(const Matrix<T>& x, const Matrix<T>& y, double q, double r,
                                                  double tol = kTol.check) {
  detail::require_same_shape(x, y);
  detail::require_q(q);
  if (!(r > 0)) throw InvalidArgument("r must be positive");
  const PsdMatrix<T> a(x.adjoint() * x);
  const PsdMatrix<T> b(y.adjoint() * y);
  const auto c1 = cq_mix(a, b, q);
  const auto c2 = cq_mix(a, b, 1.0 - q);
  const auto sv = singular_values(Matrix<T>(x * y.adjoint()));
  const auto prod = eigvals_of_product(c1, c2);

  const double sv_floor = kTol.power_floor * std::sqrt(a.spectrum().max() * b.spectrum().max());
  const double prod_floor = kTol.power_floor * c1.spectrum().max() * c2.spectrum().max();
  const auto lhs = spectrum_power(sv.values(), 2.0 * r, sv_floor);
  const auto mid = spectrum_power(prod.values(), r, prod_floor);
  const auto right = elementwise_product_abs(spectrum_power(c1.spectrum().values(), r, kTol.power_floor * c1.spectrum().max()),
                                             spectrum_power(c2.spectrum().values(), r, kTol.power_floor * c2.spectrum().max()));
  auto digest = [&] {
    auto d = detail::digest<T>(x.cols());
    d.q = q;
    d.r = r;
    return d;
  };
  return {
      majorization_report("chain.eigenvalue-step", weak_majorize(lhs, mid, tol), tol, digest()),
      majorization_report("chain.product-spectra", weak_majorize(mid, right, tol), tol, digest()),
      majorization_report("chain.combined", weak_majorize(lhs, right, tol), tol, digest()),
  };
}

template <Scalar T>
std::vector<CheckReport> check_false_variant_all(const PsdMatrix<T>& a, const PsdMatrix<T>& b, double q,
                                                 double tol = kTol.check) {
  detail::require_q(q);
  const auto lhs = singular_values(Matrix<T>(a.matrix() * b.matrix()));
  const auto rhs = singular_values(Matrix<T>(cq_mix(a, b, q).matrix() * cq_mix(a, b, 1.0 - q).matrix()));
  std::vector<CheckReport> out;
  for (std::size_t k = 1; k <= a.dim(); ++k) {
    auto d = detail::digest<T>(a.dim());
    d.q = q;
    d.k = k;
    out.push_back(make_report("false-variant", lhs.at_rank(k), rhs.at_rank(k), tol, std::move(d)));
  }
  return out;
}

template <Scalar T>
CheckReport check_false_variant(const PsdMatrix<T>& a, const PsdMatrix<T>& b, double q, std::size_t k,
                                double tol = kTol.check) {
  detail::require_k(k, a.dim());
  return check_false_variant_all(a, b, q, tol)[k - 1];
}

}  // namespace agmcs
