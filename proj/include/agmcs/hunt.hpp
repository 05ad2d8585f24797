#pragma once

// Randomized counterexample search (hill climbing with random restarts) and
// pure random stress sweeps over the same instance distribution. Candidates
// are PSD pairs for every target; X, Y targets read them as X, Y.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "agmcs/parallel.hpp"
#include "agmcs/random.hpp"
#include "agmcs/targets.hpp"

namespace agmcs {

enum class FieldChoice { real, complex, both };

inline const char* to_string(FieldChoice f) {
  switch (f) {
    case FieldChoice::real:
      return "real";
    case FieldChoice::complex:
      return "complex";
    default:
      return "both";
  }
}

inline FieldChoice parse_field_choice(std::string_view s) {
  if (s == "real") return FieldChoice::real;
  if (s == "complex") return FieldChoice::complex;
  if (s == "both") return FieldChoice::both;
  throw ConfigError("field must be real, complex or both, got '" + std::string(s) + "'");
}

inline std::vector<double> default_q_grid() { return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }

struct HuntConfig {
  Target target = Target::false_variant;
  std::vector<std::size_t> dims{2, 3, 4, 5, 6};
  FieldChoice field = FieldChoice::both;
  std::vector<double> q_grid = default_q_grid();
  std::optional<std::size_t> fixed_k;
  NormSelection norms;  // theorem1
  std::vector<double> r_values{0.5, 1.0, 2.0};
  std::size_t restarts = 100;
  std::size_t steps_per_restart = 100;
  double step_scale = 0.1;
  std::uint64_t seed = 0;
  double violation_threshold = 1e-6;
  std::size_t samples = 10000;  // stress_sweep only
  std::size_t threads = 1;

  void validate() const {
    if (dims.empty()) throw ConfigError("dims must not be empty");
    for (auto n : dims)
      if (n < 1) throw ConfigError("dimensions must be >= 1");
    if (q_grid.empty()) throw ConfigError("q grid must not be empty");
    for (double q : q_grid)
      if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("q values must lie in [0,1]");
    if (fixed_k) {
      if (*fixed_k < 1) throw ConfigError("k must be >= 1");
      for (auto n : dims)
        if (*fixed_k > n) throw ConfigError("k exceeds dimension " + std::to_string(n));
    }
    if (uses_r(target)) {
      if (r_values.empty()) throw ConfigError("r values must not be empty");
      for (double r : r_values)
        if (!(r > 0)) throw ConfigError("r values must be positive");
    }
    if (restarts < 1) throw ConfigError("restarts must be >= 1");
    if (steps_per_restart < 1) throw ConfigError("steps_per_restart must be >= 1");
    if (!(step_scale > 0)) throw ConfigError("step_scale must be positive");
    if (!(violation_threshold > 0)) throw ConfigError("violation_threshold must be positive");
    if (samples < 1) throw ConfigError("samples must be >= 1");
  }

  // One evaluation = one candidate pair checked at one q (all k, norms, r at once).
  std::size_t evaluations_per_candidate() const { return uses_q(target) ? q_grid.size() : 1; }
  std::size_t budget() const { return restarts * (steps_per_restart + 1) * evaluations_per_candidate(); }
  // Largest restart count whose full run stays within `evaluations`.
  void set_budget(std::size_t evaluations) {
    const std::size_t per_restart = (steps_per_restart + 1) * evaluations_per_candidate();
    restarts = std::max<std::size_t>(1, evaluations / per_restart);
  }

  TargetParams params() const {
    TargetParams p;
    p.norms = norms;
    p.r_values = r_values;
    p.k = fixed_k;
    return p;
  }
};

template <Scalar T>
using MatrixPair = std::pair<Matrix<T>, Matrix<T>>;

using StoredPair = std::variant<std::pair<RealMatrix, RealMatrix>, std::pair<ComplexMatrix, ComplexMatrix>>;

struct Violation {
  Target target;
  StoredPair instance;  // A, B (or X, Y) exactly as evaluated
  CheckReport report;   // the violated check: q, k, phi, r in its digest
  std::uint64_t seed = 0;
  std::size_t restart = 0;
  std::size_t step = 0;
  std::size_t evaluations = 0;  // spent up to and including the finding
};

struct NotFound {
  double min_margin = 0;
  std::size_t evaluations = 0;
  std::size_t candidates = 0;
  CheckReport argmin;  // digest.index = restart of the minimum
  std::size_t argmin_step = 0;
};

using HuntResult = std::variant<Violation, NotFound>;

namespace detail {

// Scaled so the larger Frobenius norm is 1.
template <Scalar T>
MatrixPair<T> normalize_pair(const Matrix<T>& a, const Matrix<T>& b) {
  const double m = std::max(a.frobenius_norm(), b.frobenius_norm());
  const T c{m > 0 ? 1.0 / m : 1.0};
  return {PsdMatrix<T>(a * c).matrix(), PsdMatrix<T>(b * c).matrix()};
}

// A + delta E with E a unit Hermitian direction, eigenvalues clamped at 0.
template <Scalar T>
Matrix<T> perturb_psd(const Matrix<T>& a, double delta, Rng& rng) {
  const Matrix<T> moved = a + random_hermitian_direction<T>(a.rows(), rng) * T{delta};
  const auto e = hermitian_eig(HermitianMatrix<T>(moved));
  return spectral_apply(e, [](double l) { return std::max(l, 0.0); });
}

template <Scalar T>
MatrixPair<T> sample_pair(std::size_t n, Rng& rng) {
  std::uniform_int_distribution<std::size_t> rank(1, n);
  const std::size_t ra = rank(rng);
  const std::size_t rb = rank(rng);
  const auto a = random_psd<T>(n, ra, rng);
  const auto b = random_psd<T>(n, rb, rng);
  return normalize_pair(a.matrix(), b.matrix());
}

// Smallest-margin report over the q grid; ties keep the first.
template <Scalar T>
CheckReport objective(const HuntConfig& cfg, const TargetParams& params, const MatrixPair<T>& c) {
  std::optional<CheckReport> best;
  const std::vector<double> qs = uses_q(cfg.target) ? cfg.q_grid : std::vector<double>{cfg.q_grid.front()};
  for (double q : qs)
    for (auto& r : evaluate_target(cfg.target, c.first, c.second, q, params))
      if (!best || r.margin < best->margin) best = std::move(r);
  return *best;
}

// Margin over |lhs| + |rhs|; the climb accepts on this, not on the raw margin.
inline double relative_score(const CheckReport& r) {
  return r.margin / std::max(std::abs(r.lhs) + std::abs(r.rhs), 1e-12);
}

struct RestartOutcome {
  std::optional<Violation> violation;
  CheckReport best;
  std::size_t best_step = 0;
  std::size_t evaluations = 0;
  std::size_t candidates = 0;
};

inline FieldKind pick_field(FieldChoice f, Rng& rng) {
  if (f == FieldChoice::real) return FieldKind::real;
  if (f == FieldChoice::complex) return FieldKind::complex;
  return std::bernoulli_distribution(0.5)(rng) ? FieldKind::complex : FieldKind::real;
}

inline std::size_t pick_dim(const std::vector<std::size_t>& dims, Rng& rng) {
  return dims[std::uniform_int_distribution<std::size_t>(0, dims.size() - 1)(rng)];
}

template <Scalar T>
RestartOutcome climb(const HuntConfig& cfg, std::size_t restart, std::size_t n, Rng& rng) {
  const auto params = cfg.params();
  const std::size_t per = cfg.evaluations_per_candidate();
  RestartOutcome out;
  auto current = sample_pair<T>(n, rng);
  out.best = objective(cfg, params, current);
  out.evaluations += per;
  out.candidates += 1;

  auto found = [&](std::size_t step) {
    if (!(out.best.margin < -cfg.violation_threshold)) return false;
    Violation v{cfg.target, current, out.best, cfg.seed,
                restart, step, 0};
    v.report.instance.seed = cfg.seed;
    v.report.instance.index = restart;
    out.violation = std::move(v);
    return true;
  };
  if (found(0)) return out;

  for (std::size_t step = 1; step <= cfg.steps_per_restart; ++step) {
    const auto a = perturb_psd(current.first, cfg.step_scale * current.first.frobenius_norm(), rng);
    const auto b = perturb_psd(current.second, cfg.step_scale * current.second.frobenius_norm(), rng);
    auto cand = normalize_pair(a, b);
    auto rep = objective(cfg, params, cand);
    out.evaluations += per;
    out.candidates += 1;
    if (relative_score(rep) < relative_score(out.best)) {
      current = std::move(cand);
      out.best = std::move(rep);
      out.best_step = step;
      if (found(step)) return out;
    }
  }
  out.best.instance.seed = cfg.seed;
  out.best.instance.index = restart;
  return out;
}

inline RestartOutcome run_restart(const HuntConfig& cfg, std::size_t restart) {
  auto rng = substream(cfg.seed, restart);
  const std::size_t n = pick_dim(cfg.dims, rng);
  if (pick_field(cfg.field, rng) == FieldKind::real) return climb<double>(cfg, restart, n, rng);
  return climb<cplx>(cfg, restart, n, rng);
}

}  // namespace detail

// Restarts run in batches of cfg.threads; the violation from the lowest
// restart index wins, so the result does not depend on the thread count.
inline HuntResult hunt_counterexample(const HuntConfig& cfg) {
  cfg.validate();
  const std::size_t batch = std::max<std::size_t>(1, cfg.threads);
  NotFound nf;
  bool have_min = false;
  for (std::size_t start = 0; start < cfg.restarts; start += batch) {
    const std::size_t end = std::min(cfg.restarts, start + batch);
    std::vector<detail::RestartOutcome> outs(end - start);
    parallel_for(start, end, cfg.threads, [&](std::size_t i) { outs[i - start] = detail::run_restart(cfg, i); });
    for (auto& o : outs) {
      nf.evaluations += o.evaluations;
      nf.candidates += o.candidates;
      if (o.violation) {
        o.violation->evaluations = nf.evaluations;
        return std::move(*o.violation);
      }
      if (!have_min || o.best.margin < nf.min_margin) {
        have_min = true;
        nf.min_margin = o.best.margin;
        nf.argmin = o.best;
        nf.argmin_step = o.best_step;
      }
    }
  }
  return nf;
}

// Re-runs the violated check on the stored instance.
inline CheckReport recheck(const Violation& v) {
  const auto& d = v.report.instance;
  TargetParams p;
  if (d.phi) p.norms.norms = {GaugeSpec::parse(*d.phi)};
  if (d.r) p.r_values = {*d.r};
  p.k = d.k;
  p.tol = v.report.tol;
  const double q = d.q.value_or(0.5);
  const auto reps = std::visit(
      [&](const auto& pr) {
        return evaluate_target(v.target, pr.first, pr.second, q, p);
      },
      v.instance);
  for (const auto& r : reps)
    if (r.name == v.report.name) return r;
  throw InvalidArgument("stored violation names a check the target does not produce: " + v.report.name);
}

// ---------------------------------------------------------------------------
// Stress sweep: pure random sampling, no climbing.

struct StressCell {
  std::size_t n = 0;
  double q = 0;
  std::size_t k = 0;  // 0 where the check has no index
  std::size_t count = 0;
  double min_margin = 0;
  double median_margin = 0;
};

struct StressSummary {
  std::vector<StressCell> cells;  // ordered by (n, q, k)
  std::size_t samples = 0;
  std::size_t reports = 0;
  double min_margin = 0;
  CheckReport argmin;
};

inline StressSummary stress_sweep(const HuntConfig& cfg) {
  cfg.validate();
  const auto params = cfg.params();
  using Key = std::tuple<std::size_t, double, std::size_t>;
  std::vector<std::vector<CheckReport>> per_sample(cfg.samples);
  parallel_for(0, cfg.samples, cfg.threads, [&](std::size_t i) {
    auto rng = substream(cfg.seed, i);
    const std::size_t n = detail::pick_dim(cfg.dims, rng);
    const bool real = detail::pick_field(cfg.field, rng) == FieldKind::real;
    const std::vector<double> qs = uses_q(cfg.target) ? cfg.q_grid : std::vector<double>{cfg.q_grid.front()};
    auto run = [&](const auto& pair) {
      for (double q : qs)
        for (auto& r : evaluate_target(cfg.target, pair.first, pair.second, q, params)) {
          r.instance.seed = cfg.seed;
          r.instance.index = i;
          if (!r.instance.q) r.instance.q = q;
          per_sample[i].push_back(std::move(r));
        }
    };
    if (real)
      run(detail::sample_pair<double>(n, rng));
    else
      run(detail::sample_pair<cplx>(n, rng));
  });

  StressSummary s;
  s.samples = cfg.samples;
  std::map<Key, std::vector<double>> cells;
  bool have_min = false;
  for (const auto& reps : per_sample)
    for (const auto& r : reps) {
      ++s.reports;
      cells[{r.instance.n, *r.instance.q, r.instance.k.value_or(0)}].push_back(r.margin);
      if (!have_min || r.margin < s.min_margin) {
        have_min = true;
        s.min_margin = r.margin;
        s.argmin = r;
      }
    }
  for (auto& [key, margins] : cells) {
    std::sort(margins.begin(), margins.end());
    const std::size_t m = margins.size();
    const double median = m % 2 ? margins[m / 2] : 0.5 * (margins[m / 2 - 1] + margins[m / 2]);
    s.cells.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), m, margins.front(), median});
  }
  return s;
}

}  // namespace agmcs
