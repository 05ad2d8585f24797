#pragma once

// Batch evaluation of one target over random instances. Instance i draws
// everything from substream(seed, i) and reports are delivered in instance
// order, so output is the same for any thread count.

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "agmcs/hunt.hpp"

namespace agmcs {

inline std::vector<double> default_sweep_q() { return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}; }

struct SweepConfig {
  Target target = Target::theorem2;
  std::vector<std::size_t> dims{1, 2, 3, 4, 5, 6, 7, 8};
  FieldChoice field = FieldChoice::both;
  std::vector<double> q_values = default_sweep_q();
  std::size_t random_q = 10;  // extra uniform q values added to the pool
  std::size_t instances = 10000;
  NormSelection norms;  // theorem1
  std::vector<double> r_values{0.5, 1.0, 2.0};
  std::optional<std::size_t> k;
  std::uint64_t seed = 0;
  double tol = kTol.check;
  std::size_t threads = 1;

  void validate() const {
    if (dims.empty()) throw ConfigError("dims must not be empty");
    for (auto n : dims)
      if (n < 1) throw ConfigError("dimensions must be >= 1");
    if (q_values.empty() && random_q == 0) throw ConfigError("q grid must not be empty");
    for (double q : q_values)
      if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("q values must lie in [0,1]");
    if (k)
      for (auto n : dims)
        if (*k < 1 || *k > n) throw ConfigError("k must lie in [1, n] for every dimension");
    if (uses_r(target) && r_values.empty()) throw ConfigError("r values must not be empty");
    for (double r : r_values)
      if (!(r > 0)) throw ConfigError("r values must be positive");
    if (!(tol >= 0)) throw ConfigError("tolerance must be non-negative");
  }

  // q_values followed by random_q uniform draws on [0,1].
  std::vector<double> q_pool() const {
    std::vector<double> pool = q_values;
    auto rng = substream(seed, std::numeric_limits<std::uint64_t>::max());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < random_q; ++i) pool.push_back(u(rng));
    return pool;
  }
};

struct SweepSummary {
  std::size_t instances = 0;
  std::size_t reports = 0;
  std::size_t violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::optional<CheckReport> argmin;
  // Most negative margin relative to max(1, |rhs|).
  double min_scaled_margin = std::numeric_limits<double>::infinity();
};

namespace detail {

// General square X, Y of rank r (product of Gaussian factors) for the
// targets that take X, Y; PSD pairs for the rest.
template <Scalar T>
std::vector<CheckReport> sweep_instance(const SweepConfig& cfg, std::size_t n, double q, Rng& rng) {
  std::uniform_int_distribution<std::size_t> rank(1, n);
  const std::size_t ra = rank(rng);
  const std::size_t rb = rank(rng);
  TargetParams p;
  p.norms = cfg.norms;
  p.r_values = cfg.r_values;
  p.k = cfg.k;
  p.tol = cfg.tol;
  if (needs_psd_pair(cfg.target)) {
    const auto a = random_psd<T>(n, ra, rng);
    const auto b = random_psd<T>(n, rb, rng);
    return evaluate_target(cfg.target, a, b, q, p);
  }
  const Matrix<T> x = random_gaussian<T>(n, ra, rng) * random_gaussian<T>(ra, n, rng);
  const Matrix<T> y = random_gaussian<T>(n, rb, rng) * random_gaussian<T>(rb, n, rng);
  return evaluate_target(cfg.target, x, y, q, p);
}

}  // namespace detail

inline std::vector<CheckReport> sweep_one(const SweepConfig& cfg, const std::vector<double>& pool, std::size_t i) {
  auto rng = substream(cfg.seed, i);
  const std::size_t n = detail::pick_dim(cfg.dims, rng);
  const bool real = detail::pick_field(cfg.field, rng) == FieldKind::real;
  const double q = pool[i % pool.size()];
  auto reps = real ? detail::sweep_instance<double>(cfg, n, q, rng) : detail::sweep_instance<cplx>(cfg, n, q, rng);
  for (auto& r : reps) {
    r.instance.field = real ? FieldKind::real : FieldKind::complex;
    r.instance.seed = cfg.seed;
    r.instance.index = i;
  }
  return reps;
}

inline SweepSummary run_sweep(const SweepConfig& cfg, const std::function<void(const CheckReport&)>& sink = {}) {
  cfg.validate();
  const auto pool = cfg.q_pool();
  SweepSummary s;
  const std::size_t chunk = 256;
  for (std::size_t start = 0; start < cfg.instances; start += chunk) {
    const std::size_t end = std::min(cfg.instances, start + chunk);
    std::vector<std::vector<CheckReport>> out(end - start);
    parallel_for(start, end, cfg.threads, [&](std::size_t i) { out[i - start] = sweep_one(cfg, pool, i); });
    for (const auto& reps : out) {
      ++s.instances;
      for (const auto& r : reps) {
        ++s.reports;
        if (!r.holds) ++s.violations;
        if (r.margin < s.min_margin) {
          s.min_margin = r.margin;
          s.argmin = r;
        }
        s.min_scaled_margin = std::min(s.min_scaled_margin, r.margin / std::max(1.0, std::abs(r.rhs)));
        if (sink) sink(r);
      }
    }
  }
  return s;
}

}  // namespace agmcs
