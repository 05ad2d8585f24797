#pragma once

// Symmetric gauge functions, unitarily invariant norms and weak majorization.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "agmcs/psd.hpp"
#include "agmcs/report.hpp"

namespace agmcs {

struct Schatten {
  double p;  // >= 1, infinity for the spectral norm
  friend bool operator==(const Schatten&, const Schatten&) = default;
};

struct KyFan {
  std::size_t k;  // >= 1
  friend bool operator==(const KyFan&, const KyFan&) = default;
};

class GaugeSpec {
 public:
  using Variant = std::variant<Schatten, KyFan>;

  GaugeSpec(Schatten s) : v_(s) {
    if (!(s.p >= 1.0)) throw InvalidArgument("Schatten exponent must be >= 1");
  }
  GaugeSpec(KyFan k) : v_(k) {
    if (k.k < 1) throw InvalidArgument("Ky Fan index must be >= 1");
  }

  static GaugeSpec schatten(double p) { return GaugeSpec(Schatten{p}); }
  static GaugeSpec spectral() { return GaugeSpec(Schatten{std::numeric_limits<double>::infinity()}); }
  static GaugeSpec ky_fan(std::size_t k) { return GaugeSpec(KyFan{k}); }

  // "schatten:p" (p numeric or "inf") or "kyfan:k".
  static GaugeSpec parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidArgument("gauge spec '" + text + "' lacks ':'");
    const std::string family = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    try {
      std::size_t used = 0;
      if (family == "schatten") {
        if (arg == "inf") return spectral();
        const double p = std::stod(arg, &used);
        if (used != arg.size()) throw InvalidArgument("");
        return schatten(p);
      }
      if (family == "kyfan") {
        const long k = std::stol(arg, &used);
        if (used != arg.size() || k < 1) throw InvalidArgument("");
        return ky_fan(static_cast<std::size_t>(k));
      }
    } catch (const std::logic_error&) {
    } catch (const InvalidArgument&) {
    }
    throw InvalidArgument("invalid gauge spec '" + text + "'");
  }

  std::string to_string() const {
    if (const auto* s = std::get_if<Schatten>(&v_)) {
      if (std::isinf(s->p)) return "schatten:inf";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", s->p);
      return std::string("schatten:") + buf;
    }
    return "kyfan:" + std::to_string(std::get<KyFan>(v_).k);
  }

  const Variant& variant() const { return v_; }
  friend bool operator==(const GaugeSpec&, const GaugeSpec&) = default;

 private:
  Variant v_;
};

inline double gauge_eval(const GaugeSpec& phi, std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) throw InvalidArgument("gauge_eval: non-finite entry");
  if (const auto* s = std::get_if<Schatten>(&phi.variant())) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    if (std::isinf(s->p) || m == 0.0) return m;
    double acc = 0;
    for (double x : v) acc += std::pow(std::abs(x) / m, s->p);
    return m * std::pow(acc, 1.0 / s->p);
  }
  const std::size_t k = std::get<KyFan>(phi.variant()).k;
  std::vector<double> a(v.size());
  std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::abs(x); });
  const std::size_t take = std::min(k, a.size());
  std::partial_sort(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(take), a.end(), std::greater<>());
  return std::accumulate(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(take), 0.0);
}

template <Scalar T>
double ui_norm(const GaugeSpec& phi, const Matrix<T>& x) {
  return gauge_eval(phi, singular_values(x).values());
}

// All Ky Fan k = 1..n plus Schatten p in {1, 1.5, 2, 3, inf}.
inline std::vector<GaugeSpec> norm_grid(std::size_t n) {
  std::vector<GaugeSpec> g;
  for (std::size_t k = 1; k <= n; ++k) g.push_back(GaugeSpec::ky_fan(k));
  for (double p : {1.0, 1.5, 2.0, 3.0}) g.push_back(GaugeSpec::schatten(p));
  g.push_back(GaugeSpec::spectral());
  return g;
}

struct MajorizationVerdict {
  bool holds = true;
  double worst_partial_sum_gap = 0;  // min over prefixes of sum(y) - sum(x)
  std::size_t prefix_index = 0;      // 1-based prefix attaining it
  double lhs_prefix = 0;             // sum(x) at that prefix
  double rhs_prefix = 0;             // sum(y) at that prefix
  double scale = 1;                  // max(1, sum |y_i|)
};

// x weakly majorized by y: sorted-descending prefix sums of x stay below
// those of y, up to tol * max(1, sum |y_i|). Shorter vectors are zero-padded.
inline MajorizationVerdict weak_majorize(std::span<const double> x, std::span<const double> y, double tol) {
  const std::size_t n = std::max(x.size(), y.size());
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  xs.resize(n, 0.0);
  ys.resize(n, 0.0);
  std::sort(xs.begin(), xs.end(), std::greater<>());
  std::sort(ys.begin(), ys.end(), std::greater<>());

  MajorizationVerdict v;
  double abs_y = 0;
  for (double e : ys) abs_y += std::abs(e);
  v.scale = std::max(1.0, abs_y);
  double sx = 0;
  double sy = 0;
  for (std::size_t j = 0; j < n; ++j) {
    sx += xs[j];
    sy += ys[j];
    const double gap = sy - sx;
    if (j == 0 || gap < v.worst_partial_sum_gap) {
      v.worst_partial_sum_gap = gap;
      v.prefix_index = j + 1;
      v.lhs_prefix = sx;
      v.rhs_prefix = sy;
    }
  }
  v.holds = v.worst_partial_sum_gap >= -tol * v.scale;
  return v;
}

inline std::vector<double> elementwise_product_abs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("elementwise product of vectors with different lengths");
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = std::abs(x[i] * y[i]);
  return z;
}

// Phi(|x.y|) <= Phi(|x|^p)^(1/p) Phi(|y|^p')^(1/p'), 1/p + 1/p' = 1.
inline CheckReport holder_gauge_check(const GaugeSpec& phi, std::span<const double> x, std::span<const double> y,
                                      double p, double tol = kTol.check) {
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("Hoelder exponent must be finite and exceed 1");
  const double pc = p / (p - 1.0);
  const auto lhs = gauge_eval(phi, elementwise_product_abs(x, y));
  auto powered = [](std::span<const double> v, double e) {
    std::vector<double> r(v.size());
    std::transform(v.begin(), v.end(), r.begin(), [e](double a) { return std::pow(std::abs(a), e); });
    return r;
  };
  const double rhs =
      std::pow(gauge_eval(phi, powered(x, p)), 1.0 / p) * std::pow(gauge_eval(phi, powered(y, pc)), 1.0 / pc);
  InstanceDigest d;
  d.n = x.size();
  d.p = p;
  d.phi = phi.to_string();
  return make_report("holder-gauge", lhs, rhs, tol, std::move(d));
}

}  // namespace agmcs
