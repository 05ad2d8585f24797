#pragma once

// Step-by-step numerical execution of the reduction proving
//   lambda_k(AB) <= lambda_k(C(q) C(1-q)),  C(q) = qA + (1-q)B.
//
// Each step returns its intermediates together with a StepRecord of named
// residuals and the gate each residual must stay under. run_pipeline chains
// the steps and collects everything into a PipelineTrace.

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "agmcs/checks.hpp"

namespace agmcs {

struct PipelineDomainError : Error {
  using Error::Error;
};

// A step whose precondition failed outright (not a residual over its gate).
struct PipelineStepError : Error {
  PipelineStepError(const std::string& step, const std::string& what) : Error(step + ": " + what), step(step) {}
  std::string step;
};

struct Residual {
  std::string name;
  double value = 0;
  double gate = 0;
  bool pass() const { return value <= gate; }
};

struct StepRecord {
  std::string name;
  std::vector<Residual> residuals;

  void add(std::string residual, double value, double gate) {
    residuals.push_back({std::move(residual), value, gate});
  }
  bool pass() const {
    for (const auto& r : residuals)
      if (!r.pass()) return false;
    return true;
  }
};

// rank(A) < k or rank(B) < k: lambda_k(AB) = 0 and the inequality is immediate.
struct TriviallyTrue {
  std::size_t k = 0;
  double lambda_k = 0;
};

namespace pipeline_gates {
inline constexpr double normalization = 1e-10;
inline constexpr double projector = 1e-9;
inline constexpr double bprime = 1e-8;
inline constexpr double blocks = 1e-7;
inline constexpr double aprime = 1e-9;
inline constexpr double zxy_singular = 1e-9;
inline constexpr double zxy_reduction = 1e-8;
inline constexpr double y_closed_form = 1e-9;
inline constexpr double hermitian_part = 1e-9;
inline constexpr double chain = 1e-8;
inline constexpr double end_to_end = 1e-7;
inline constexpr double identity = 1e-12;
// Relative eigenvalue cut used for every rank count.
inline constexpr double rank_tol = 1e-12;
// Traces with cond(A11) above this are marked degenerate.
inline constexpr double max_condition = 1e10;
}  // namespace pipeline_gates

namespace detail {

inline double one_sided(double margin, double scale) { return std::max(0.0, -margin) / std::max(1.0, scale); }

inline double rel(double diff, double scale) { return std::abs(diff) / std::max(1.0, std::abs(scale)); }

template <Scalar T>
Matrix<T> top_columns(const Matrix<T>& u, std::size_t k) {
  return u.block(0, 0, u.rows(), k);
}

template <Scalar T>
Matrix<T> scaled_identity(std::size_t n, double v) {
  Matrix<T> m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = T{v};
  return m;
}

}  // namespace detail

// q(1-q)(s^{1/2} + s^{-1/2})^2 with s = (1-q)/q; equals 1 on (0,1).
inline double interpolation_identity(double q) {
  const double s = (1.0 - q) / q;
  const double t = std::sqrt(s) + 1.0 / std::sqrt(s);
  return q * (1.0 - q) * t * t;
}

// ---------------------------------------------------------------------------
// Scaling to lambda_k(AB) = 1

template <Scalar T>
struct NormalizedInstance {
  PsdMatrix<T> a;
  PsdMatrix<T> b;
  double scale;  // lambda_k(AB) of the input; both inputs were divided by sqrt(scale)
  StepRecord step;
};

template <Scalar T>
std::variant<NormalizedInstance<T>, TriviallyTrue> normalize_instance(const PsdMatrix<T>& a, const PsdMatrix<T>& b,
                                                                       std::size_t k) {
  if (a.dim() != b.dim()) throw DimensionMismatch("normalize_instance: dimensions differ");
  detail::require_k(k, a.dim());
  const double t = eigvals_of_product(a, b).at_rank(k);
  const double scale_ab = a.spectrum().max() * b.spectrum().max();
  if (numerical_rank(a.spectrum(), pipeline_gates::rank_tol) < k ||
      numerical_rank(b.spectrum(), pipeline_gates::rank_tol) < k || t <= pipeline_gates::rank_tol * scale_ab) {
    return TriviallyTrue{k, t};
  }
  const T f{1.0 / std::sqrt(t)};
  PsdMatrix<T> an(a.matrix() * f);
  PsdMatrix<T> bn(b.matrix() * f);
  StepRecord step{"normalize", {}};
  step.add("|lambda_k(AB) - 1|", std::abs(eigvals_of_product(an, bn).at_rank(k) - 1.0),
           pipeline_gates::normalization);
  return NormalizedInstance<T>{std::move(an), std::move(bn), t, std::move(step)};
}

// ---------------------------------------------------------------------------
// Rank-k projector below A^{1/2} B A^{1/2}

template <Scalar T>
struct ProjectorStep {
  HermitianMatrix<T> p;
  PsdMatrix<T> sqrt_a;
  PsdMatrix<T> m;          // A^{1/2} B A^{1/2}
  Matrix<T> top_vectors;   // n x k
  std::vector<double> mu;  // top-k eigenvalues of m, all >= 1
  StepRecord step;
};

// P = sum_{j<=k} u_j u_j* over the top-k eigenvectors of M = A^{1/2} B A^{1/2}
// (solver order breaks ties). Requires lambda_k(M) = 1.
template <Scalar T>
ProjectorStep<T> construct_projector(const PsdMatrix<T>& a, const PsdMatrix<T>& b, std::size_t k) {
  detail::require_k(k, a.dim());
  auto s = psd_sqrt(a);
  PsdMatrix<T> m(HermitianMatrix<T>(s.matrix() * b.matrix() * s.matrix(), 1e-10));
  const auto& e = m.eigen();
  if (e.values.at_rank(k) < 1.0 - pipeline_gates::projector) {
    throw PipelineStepError("projector", "lambda_k(A^1/2 B A^1/2) = " + std::to_string(e.values.at_rank(k)) +
                                             " < 1; instance is not normalized");
  }
  auto u = detail::top_columns(e.vectors, k);
  const Matrix<T> raw = u * u.adjoint();
  HermitianMatrix<T> p(raw);

  StepRecord step{"projector", {}};
  step.add("|P^2 - P|_F", (raw * raw - raw).frobenius_norm(), pipeline_gates::projector);
  step.add("max|P - P*|", hermitian_defect(raw), pipeline_gates::projector);
  const auto rank = numerical_rank(eigenvalues(p), 0.5);
  step.add("|rank(P) - k|", std::abs(static_cast<double>(rank) - static_cast<double>(k)), 0.0);
  const auto order = loewner_leq(p, m.hermitian(), pipeline_gates::projector);
  step.add("P <= M", detail::one_sided(order.margin, order.scale), pipeline_gates::projector);

  std::vector<double> mu(e.values.values().begin(), e.values.values().begin() + static_cast<std::ptrdiff_t>(k));
  return {std::move(p), std::move(s), std::move(m), std::move(u), std::move(mu), std::move(step)};
}

// ---------------------------------------------------------------------------
// B' <= B with A^{1/2} B' A^{1/2} = P

template <Scalar T>
struct BPrimeStep {
  PsdMatrix<T> b_prime;
  StepRecord step;
};

// B' = B^{1/2} Q B^{1/2},  Q = sum_j w_j w_j* / mu_j^2,  w_j = B^{1/2} A^{1/2} u_j.
// The w_j are orthogonal with |w_j|^2 = mu_j >= 1, so Q <= I and B' <= B.
// For invertible A this is A^{-1/2} P A^{-1/2}; for singular A the
// generalized-inverse form A^{+1/2} P A^{+1/2} need not lie below B.
template <Scalar T>
BPrimeStep<T> construct_bprime(const PsdMatrix<T>& a, const PsdMatrix<T>& b, const ProjectorStep<T>& proj) {
  if (a.dim() != b.dim()) throw DimensionMismatch("construct_bprime: dimensions differ");
  const std::size_t n = a.dim();
  const std::size_t k = proj.mu.size();
  const auto& s = proj.sqrt_a.matrix();
  const auto& p = proj.p.matrix();

  // Range condition: P must live in range(A^{1/2}).
  const auto s_pinv = pseudo_inverse(proj.sqrt_a, 1e-8);
  const Matrix<T> range_proj = s * s_pinv.matrix();
  const double range_defect = (p - range_proj * p).frobenius_norm();
  if (range_defect > 1e-4) {
    throw PipelineStepError("b-prime", "range(P) not contained in range(A): projection defect " +
                                           std::to_string(range_defect));
  }

  const auto sqrt_b = psd_sqrt(b);
  const Matrix<T> w = sqrt_b.matrix() * s * proj.top_vectors;
  Matrix<T> q(n, n);
  for (std::size_t j = 0; j < k; ++j) {
    const double inv = 1.0 / (proj.mu[j] * proj.mu[j]);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) q(r, c) += w(r, j) * detail::conj(w(c, j)) * inv;
  }
  PsdMatrix<T> bp(HermitianMatrix<T>(sqrt_b.matrix() * q * sqrt_b.matrix(), 1e-10));

  StepRecord step{"b-prime", {}};
  step.add("|(I - A^1/2 A^+1/2) P|_F", range_defect, pipeline_gates::bprime);
  step.add("|A^1/2 B' A^1/2 - P|_F", (s * bp.matrix() * s - p).frobenius_norm(), pipeline_gates::bprime);
  const auto rank = numerical_rank(bp.spectrum(), pipeline_gates::rank_tol);
  step.add("|rank(B') - k|", std::abs(static_cast<double>(rank) - static_cast<double>(k)), 0.0);
  const auto order = loewner_leq(bp, b, pipeline_gates::bprime);
  step.add("B' <= B", detail::one_sided(order.margin, order.scale), pipeline_gates::bprime);
  const auto spec = eigvals_of_product(a, bp);
  double dev = 0;
  for (std::size_t i = 0; i < n; ++i) dev = std::max(dev, std::abs(spec[i] - (i < k ? 1.0 : 0.0)));
  step.add("|lambda(AB') - (1..1,0..0)|", dev, pipeline_gates::bprime);
  return {std::move(bp), std::move(step)};
}

// ---------------------------------------------------------------------------
// Eigenbasis of B' and the conformal partition of A

template <Scalar T>
struct BlockStep {
  Matrix<T> basis;  // unitary, nonzero eigenvectors of B' first
  Matrix<T> a_rot;  // basis* A basis
  PsdMatrix<T> a11;
  Matrix<T> a12;
  Matrix<T> a22;
  PsdMatrix<T> b11;
  PsdMatrix<T> a11_inv;
  double cond_a11;
  StepRecord step;
};

template <Scalar T>
BlockStep<T> block_decompose(const PsdMatrix<T>& a, const PsdMatrix<T>& b_prime, std::size_t k) {
  if (a.dim() != b_prime.dim()) throw DimensionMismatch("block_decompose: dimensions differ");
  const std::size_t n = a.dim();
  detail::require_k(k, n);
  const auto& v = b_prime.eigen().vectors;
  const Matrix<T> a_rot = v.adjoint() * a.matrix() * v;
  const Matrix<T> bp_rot = v.adjoint() * b_prime.matrix() * v;

  PsdMatrix<T> a11(HermitianMatrix<T>(a_rot.block(0, 0, k, k), 1e-10));
  PsdMatrix<T> b11(HermitianMatrix<T>(bp_rot.block(0, 0, k, k), 1e-10));
  const auto& a11s = a11.spectrum();
  if (!(a11s.min() > 0)) throw PipelineStepError("blocks", "A11 is singular");
  if (!(b11.spectrum().min() > 0)) throw PipelineStepError("blocks", "B11 is singular");
  const double cond = a11s.max() / a11s.min();
  auto a11_inv = psd_power(a11, -1.0, 0.0);

  StepRecord step{"blocks", {}};
  step.add("|B11 - A11^-1|_F / |B11|_F",
           (b11.matrix() - a11_inv.matrix()).frobenius_norm() / b11.matrix().frobenius_norm(),
           pipeline_gates::blocks);
  Matrix<T> off = bp_rot;
  off.set_block(0, 0, Matrix<T>(k, k));
  step.add("|B' - (B11 + 0)|_F / |B'|_F", off.frobenius_norm() / b_prime.matrix().frobenius_norm(),
           pipeline_gates::blocks);
  const auto sqrt_bp = psd_sqrt(b_prime);
  const Matrix<T> r = v.adjoint() * sqrt_bp.matrix() * a.matrix() * sqrt_bp.matrix() * v;
  step.add("|R11 - I|_F", (r.block(0, 0, k, k) - Matrix<T>::identity(k)).frobenius_norm(), pipeline_gates::blocks);

  return {v,
          a_rot,
          std::move(a11),
          a_rot.block(0, k, k, n - k),
          a_rot.block(k, k, n - k, n - k),
          std::move(b11),
          std::move(a11_inv),
          cond,
          std::move(step)};
}

// ---------------------------------------------------------------------------
// A' = [[A11, A12], [A12*, A12* A11^-1 A12]]  (rank k, 0 <= A' <= A)

template <Scalar T>
struct APrimeStep {
  PsdMatrix<T> a_prime;  // in the B' eigenbasis
  StepRecord step;
};

template <Scalar T>
APrimeStep<T> construct_aprime(const BlockStep<T>& blocks) {
  const std::size_t k = blocks.a11.dim();
  const Matrix<T> a21 = blocks.a12.adjoint();
  const Matrix<T> raw =
      from_blocks(blocks.a11.matrix(), blocks.a12, a21, Matrix<T>(a21 * blocks.a11_inv.matrix() * blocks.a12));
  HermitianMatrix<T> h(raw, 1e-10);
  const auto e = hermitian_eig(h);

  StepRecord step{"a-prime", {}};
  const auto rank = numerical_rank(e.values, pipeline_gates::rank_tol);
  step.add("|rank(A') - k|", std::abs(static_cast<double>(rank) - static_cast<double>(k)), 0.0);
  step.add("0 <= A'", detail::one_sided(e.values.min(), e.values.max()), pipeline_gates::aprime);
  const auto order = loewner_leq(h, HermitianMatrix<T>(blocks.a_rot, 1e-10), pipeline_gates::aprime);
  step.add("A' <= A", detail::one_sided(order.margin, order.scale), pipeline_gates::aprime);
  return {PsdMatrix<T>(std::move(h)), std::move(step)};
}

// ---------------------------------------------------------------------------
// The 2k x 2k reduction: F = A11, G = A12 A12*, s = (1-q)/q,
// H = F^{-1/2} G F^{-1/2}, K = (F + H + F^{-1})/2,
//   Z = [[F^-1, s^{1/2}], [s^{-1/2}, F + H]],
//   X = [[s^{1/2}, F^-1], [F + H, s^{-1/2}]],
//   Y = [[s^{1/2}, K], [K, s^{-1/2}]] = (X + X*)/2.

template <Scalar T>
struct ZxyStep {
  double s;
  PsdMatrix<T> g;
  PsdMatrix<T> h;
  PsdMatrix<T> k;
  Matrix<T> z;
  Matrix<T> x;
  HermitianMatrix<T> y;
  Spectrum sigma_z;
  double lambda_k_c2;  // lambda_k(C''(q) C''(1-q)), reassembled from F and A12
  StepRecord step;
};

template <Scalar T>
ZxyStep<T> assemble_zxy(const PsdMatrix<T>& f, const Matrix<T>& a12, double q) {
  if (!(q > 0.0 && q < 1.0)) throw PipelineDomainError("q must lie strictly inside (0,1); s = (1-q)/q is undefined");
  const std::size_t k = f.dim();
  if (!(f.spectrum().min() > 0)) throw PipelineStepError("zxy", "F is not positive definite");
  const double s = (1.0 - q) / q;
  const double rs = std::sqrt(s);
  const auto f_inv = psd_power(f, -1.0, 0.0);
  const auto f_mhalf = psd_power(f, -0.5, 0.0);
  const auto f_half = psd_power(f, 0.5, 0.0);
  const Matrix<T> id = Matrix<T>::identity(k);
  const Matrix<T> zero(k, k);

  PsdMatrix<T> g(HermitianMatrix<T>(a12 * a12.adjoint(), 1e-10));
  PsdMatrix<T> h(HermitianMatrix<T>(f_mhalf.matrix() * g.matrix() * f_mhalf.matrix(), 1e-10));
  const Matrix<T> fh = f.matrix() + h.matrix();
  PsdMatrix<T> kk((fh + f_inv.matrix()) * T{0.5});

  Matrix<T> z = from_blocks(f_inv.matrix(), detail::scaled_identity<T>(k, rs), detail::scaled_identity<T>(k, 1.0 / rs), fh);
  Matrix<T> x = from_blocks(detail::scaled_identity<T>(k, rs), f_inv.matrix(), fh, detail::scaled_identity<T>(k, 1.0 / rs));
  HermitianMatrix<T> y(from_blocks(detail::scaled_identity<T>(k, rs), kk.matrix(), kk.matrix(),
                                   detail::scaled_identity<T>(k, 1.0 / rs)));

  StepRecord step{"zxy", {}};

  // [[F + sF^-1, I], [I, F^-1]] = L L*, L = [[s^1/2 F^-1/2, F^1/2], [0, F^-1/2]]
  const Matrix<T> lower = from_blocks(Matrix<T>(f_mhalf.matrix() * T{rs}), f_half.matrix(), zero, f_mhalf.matrix());
  const Matrix<T> middle = from_blocks(Matrix<T>(f.matrix() + f_inv.matrix() * T{s}), id, id, f_inv.matrix());
  step.add("factorization", (lower * lower.adjoint() - middle).frobenius_norm() / std::max(1.0, middle.frobenius_norm()),
           pipeline_gates::zxy_singular);

  // Z as the triple product against its closed form.
  const Matrix<T> z_left = lower.adjoint();
  const Matrix<T> z_mid = from_blocks(id, zero, zero, g.matrix());
  const Matrix<T> z_right = from_blocks(Matrix<T>(f_mhalf.matrix() * T{1.0 / rs}), f_half.matrix(), zero, f_mhalf.matrix());
  step.add("Z closed form", (z_left * z_mid * z_right - z).frobenius_norm() / std::max(1.0, z.frobenius_norm()),
           pipeline_gates::zxy_singular);

  const auto sz = singular_values(z);
  const auto sx = singular_values(x);
  double dev = 0;
  for (std::size_t i = 0; i < sz.size(); ++i) dev = std::max(dev, std::abs(sz[i] - sx[i]));
  step.add("|sigma(Z) - sigma(X)|", dev / std::max(1.0, sz.max()), pipeline_gates::zxy_singular);

  // C''(q) = q [[F, A12], [A12*, A12* F^-1 A12]] + (1-q) [[F^-1, 0], [0, 0]]
  const std::size_t m = a12.cols();
  const Matrix<T> a21 = a12.adjoint();
  const Matrix<T> a_prime = from_blocks(f.matrix(), a12, a21, Matrix<T>(a21 * f_inv.matrix() * a12));
  Matrix<T> b_prime(k + m, k + m);
  b_prime.set_block(0, 0, f_inv.matrix());
  auto c2 = [&](double w) { return PsdMatrix<T>(HermitianMatrix<T>(a_prime * T{w} + b_prime * T{1.0 - w}, 1e-10)); };
  const double lam = eigvals_of_product(c2(q), c2(1.0 - q)).at_rank(k);
  const double reduced = q * (1.0 - q) * sz.at_rank(k) * sz.at_rank(k);
  step.add("|lambda_k(C''C'') - q(1-q) sigma_k(Z)^2|", detail::rel(lam - reduced, lam), pipeline_gates::zxy_reduction);

  const auto order = loewner_leq(HermitianMatrix<T>::identity(k), kk.hermitian(), pipeline_gates::zxy_singular);
  step.add("I <= K", detail::one_sided(order.margin, order.scale), pipeline_gates::zxy_singular);

  return {s, std::move(g), std::move(h), std::move(kk), std::move(z), std::move(x), std::move(y), sz, lam,
          std::move(step)};
}

// ---------------------------------------------------------------------------
// Top-k eigenvalues of Y from those of K

// (s^1/2 + s^-1/2 + sqrt((s^1/2 + s^-1/2)^2 - 4 + 4 lambda^2)) / 2
inline double y_eigenvalue_closed_form(double s, double lambda_k) {
  const double t = std::sqrt(s) + 1.0 / std::sqrt(s);
  return 0.5 * (t + std::sqrt(t * t - 4.0 + 4.0 * lambda_k * lambda_k));
}

struct YEigenStep {
  Spectrum closed_form;  // top k
  Spectrum direct;       // all 2k, from the eigensolver
  StepRecord step;
};

template <Scalar T>
YEigenStep y_eigenvalues(double s, const PsdMatrix<T>& k_mat) {
  if (!(s > 0)) throw InvalidArgument("s must be positive");
  const std::size_t k = k_mat.dim();
  const auto below = loewner_leq(HermitianMatrix<T>::identity(k), k_mat.hermitian(), pipeline_gates::y_closed_form);
  if (!below.holds) {
    throw PipelineStepError("y-eigenvalues", "K >= I violated: lambda_min(K - I) = " + std::to_string(below.margin));
  }
  const double rs = std::sqrt(s);
  const HermitianMatrix<T> y(from_blocks(detail::scaled_identity<T>(k, rs), k_mat.matrix(), k_mat.matrix(),
                                         detail::scaled_identity<T>(k, 1.0 / rs)));
  auto direct = eigenvalues(y);
  std::vector<double> cf(k);
  for (std::size_t j = 0; j < k; ++j) cf[j] = y_eigenvalue_closed_form(s, k_mat.spectrum()[j]);
  Spectrum closed(std::move(cf), Spectrum::Kind::eigenvalues);

  StepRecord step{"y-eigenvalues", {}};
  double dev = 0;
  for (std::size_t j = 0; j < k; ++j) dev = std::max(dev, std::abs(closed[j] - direct[j]));
  step.add("|closed form - eig(Y)|", dev / std::max(1.0, direct.max()), pipeline_gates::y_closed_form);
  const double bound = rs + 1.0 / rs;
  step.add("lambda_k(Y) >= s^1/2 + s^-1/2", std::max(0.0, bound - direct.at_rank(k)) / std::max(1.0, bound),
           pipeline_gates::y_closed_form);
  return {std::move(closed), std::move(direct), std::move(step)};
}

// sigma_j(X) >= lambda_j((X + X*)/2) for every j.
template <Scalar T>
std::vector<CheckReport> hermitian_part_bound_check(const Matrix<T>& x, double tol = kTol.check) {
  if (!x.square()) throw DimensionMismatch("hermitian_part_bound_check needs a square matrix");
  const auto sv = singular_values(x);
  const auto lam = eigenvalues(HermitianMatrix<T>((x + x.adjoint()) * T{0.5}));
  std::vector<CheckReport> out;
  for (std::size_t j = 1; j <= x.rows(); ++j) {
    auto d = detail::digest<T>(x.rows());
    d.k = j;
    out.push_back(make_report("hermitian-part-bound", lam.at_rank(j), sv.at_rank(j), tol, std::move(d)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// End to end

template <Scalar T>
struct PipelineTrace {
  std::size_t n = 0;
  double q = 0;
  std::size_t k = 0;
  double scale = 1;  // lambda_k(AB) of the unscaled input
  std::optional<HermitianMatrix<T>> p;
  std::optional<PsdMatrix<T>> b_prime;
  std::optional<Matrix<T>> basis;
  std::optional<PsdMatrix<T>> a11, b11;
  std::optional<Matrix<T>> a12, a22;
  std::optional<PsdMatrix<T>> a_prime;
  std::optional<PsdMatrix<T>> g, h, k_mat;
  double s = 0;
  std::optional<Matrix<T>> z, x;
  std::optional<HermitianMatrix<T>> y;
  std::vector<StepRecord> steps;
  double lambda_k_c = 0;       // lambda_k(C(q)C(1-q)), normalized instance
  double lambda_k_c_prime = 0;  // lambda_k(C'(q)C'(1-q))
  double final_bound = 0;       // lambda_k(C''(q)C''(1-q))
  double cond_a11 = 0;
  bool degenerate = false;
  std::optional<std::string> aborted;  // first hard step error

  bool all_gates_pass() const {
    if (aborted) return false;
    for (const auto& s : steps)
      if (!s.pass()) return false;
    return true;
  }
  // Degenerate traces are logged but not held to the gates.
  bool acceptable() const { return degenerate || all_gates_pass(); }
};

template <Scalar T>
using PipelineOutcome = std::variant<PipelineTrace<T>, TriviallyTrue>;

template <Scalar T>
PipelineOutcome<T> run_pipeline(const PsdMatrix<T>& a_in, const PsdMatrix<T>& b_in, double q, std::size_t k) {
  if (!(q > 0.0 && q < 1.0)) throw PipelineDomainError("the pipeline needs q strictly inside (0,1)");
  if (a_in.dim() != b_in.dim()) throw DimensionMismatch("run_pipeline: dimensions differ");
  detail::require_k(k, a_in.dim());

  auto normalized = normalize_instance(a_in, b_in, k);
  if (auto* t = std::get_if<TriviallyTrue>(&normalized)) return *t;
  auto& inst = std::get<NormalizedInstance<T>>(normalized);

  PipelineTrace<T> tr;
  tr.n = a_in.dim();
  tr.q = q;
  tr.k = k;
  tr.scale = inst.scale;
  tr.steps.push_back(inst.step);
  const auto& a = inst.a;
  const auto& b = inst.b;

  try {
    auto proj = construct_projector(a, b, k);
    tr.steps.push_back(proj.step);
    tr.p = proj.p;

    auto bp = construct_bprime(a, b, proj);
    tr.steps.push_back(bp.step);
    tr.b_prime = bp.b_prime;

    auto blocks = block_decompose(a, bp.b_prime, k);
    tr.steps.push_back(blocks.step);
    tr.basis = blocks.basis;
    tr.a11 = blocks.a11;
    tr.b11 = blocks.b11;
    tr.a12 = blocks.a12;
    tr.a22 = blocks.a22;
    tr.cond_a11 = blocks.cond_a11;
    tr.degenerate = blocks.cond_a11 > pipeline_gates::max_condition;

    auto ap = construct_aprime(blocks);
    tr.steps.push_back(ap.step);
    tr.a_prime = ap.a_prime;

    auto zxy = assemble_zxy(blocks.a11, blocks.a12, q);
    tr.steps.push_back(zxy.step);
    tr.s = zxy.s;
    tr.g = zxy.g;
    tr.h = zxy.h;
    tr.k_mat = zxy.k;
    tr.z = zxy.z;
    tr.x = zxy.x;
    tr.y = zxy.y;

    auto ye = y_eigenvalues(zxy.s, zxy.k);
    tr.steps.push_back(ye.step);

    StepRecord hp{"hermitian-part", {}};
    double worst = 0;
    for (const auto& r : hermitian_part_bound_check(zxy.x)) worst = std::max(worst, detail::one_sided(r.margin, r.rhs));
    hp.add("max_j (lambda_j(Re X) - sigma_j(X))+", worst, pipeline_gates::hermitian_part);
    const double lam_y = ye.direct.at_rank(k);
    const double via_y = q * (1.0 - q) * lam_y * lam_y;
    hp.add("q(1-q) lambda_k(Y)^2 <= lambda_k(C''C'')", detail::one_sided(zxy.lambda_k_c2 - via_y, zxy.lambda_k_c2),
           pipeline_gates::chain);
    tr.steps.push_back(hp);

    // C, C', C'' on the normalized instance. C'' lives in the B' eigenbasis;
    // spectra of the products do not depend on the basis.
    const auto mix = [](const Matrix<T>& x, const Matrix<T>& y, double w) {
      return PsdMatrix<T>(HermitianMatrix<T>(x * T{w} + y * T{1.0 - w}, 1e-10));
    };
    Matrix<T> bpp(tr.n, tr.n);
    bpp.set_block(0, 0, blocks.a11_inv.matrix());
    const double lc = eigvals_of_product(mix(a.matrix(), b.matrix(), q), mix(a.matrix(), b.matrix(), 1 - q)).at_rank(k);
    const double lcp =
        eigvals_of_product(mix(a.matrix(), bp.b_prime.matrix(), q), mix(a.matrix(), bp.b_prime.matrix(), 1 - q))
            .at_rank(k);
    const double lcpp =
        eigvals_of_product(mix(ap.a_prime.matrix(), bpp, q), mix(ap.a_prime.matrix(), bpp, 1 - q)).at_rank(k);
    tr.lambda_k_c = lc;
    tr.lambda_k_c_prime = lcp;
    tr.final_bound = lcpp;

    StepRecord chain{"chain", {}};
    chain.add("lambda_k(C'C') <= lambda_k(CC)", detail::one_sided(lc - lcp, lc), pipeline_gates::chain);
    chain.add("lambda_k(C''C'') <= lambda_k(C'C')", detail::one_sided(lcp - lcpp, lcp), pipeline_gates::chain);
    chain.add("final_bound >= 1", std::max(0.0, 1.0 - lcpp), pipeline_gates::chain);
    chain.add("|q(1-q)(s^1/2 + s^-1/2)^2 - 1|", std::abs(interpolation_identity(q) - 1.0), pipeline_gates::identity);
    const double original = eigvals_of_product(cq_mix(a_in, b_in, q), cq_mix(a_in, b_in, 1.0 - q)).at_rank(k);
    chain.add("lambda_k(CC) >= final_bound * lambda_k(AB), unscaled",
              detail::one_sided(original - lcpp * inst.scale, original), pipeline_gates::end_to_end);
    tr.steps.push_back(chain);
  } catch (const PipelineDomainError&) {
    throw;
  } catch (const Error& e) {
    tr.aborted = e.what();
  }
  return tr;
}

}  // namespace agmcs
