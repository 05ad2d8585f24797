// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "agmcs/agmcs.hpp"

using namespace agmcs;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

FieldKind field_for(Rng& rng) {
  return std::bernoulli_distribution(0.5)(rng) ? FieldKind::complex : FieldKind::real;
}

template <Scalar T>
Matrix<T> low_rank(std::size_t n, std::size_t r, Rng& rng) {
  return random_gaussian<T>(n, r, rng) * random_gaussian<T>(r, n, rng);
}

// ---- 1 ----------------------------------------------------------------------

Outcome theorem2_sweep() {
  Outcome o;
  SweepConfig cfg;
  cfg.seed = 1;
  const auto t0 = Clock::now();
  const auto s = run_sweep(cfg);
  const double secs = seconds_since(t0);
  o.require(s.instances == 10000, "instance count");
  o.require(s.violations == 0, std::to_string(s.violations) + " violations");
  o.require(s.min_scaled_margin >= -1e-9, "min scaled margin");
  o.require(secs < 60, "runtime " + fmt("%.1f s", secs));
  o.note(std::to_string(s.reports) + " reports, min margin/max(1,|rhs|) " + fmt("%.3e", s.min_scaled_margin) + ", " +
         fmt("%.1f s", secs));
  return o;
}

// ---- 2 ----------------------------------------------------------------------

template <Scalar T>
void theorem1_instance(Rng& rng, std::size_t n, std::size_t& reports, std::size_t& fails,
                       double& worst_endpoint) {
  std::uniform_int_distribution<std::size_t> rank(1, n);
  const auto x = low_rank<T>(n, rank(rng), rng);
  const auto y = low_rank<T>(n, rank(rng), rng);
  const auto grid = norm_grid(n);
  for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto reps = check_theorem1_grid(x, y, q, grid, 1e-9);
    for (std::size_t i = 0; i < reps.size(); ++i) {
      ++reports;
      if (!reps[i].holds) ++fails;
      if (q == 0.0 || q == 1.0) {
        const auto cs = check_cauchy_schwarz(x, y, grid[i]);
        worst_endpoint = std::max({worst_endpoint, rel(reps[i].lhs, cs.lhs), rel(reps[i].rhs, cs.rhs)});
      } else if (q == 0.5) {
        const auto agm = check_agm_norm(x, y, grid[i]);
        worst_endpoint =
            std::max({worst_endpoint, rel(reps[i].lhs, agm.lhs * agm.lhs), rel(reps[i].rhs, agm.rhs * agm.rhs)});
      }
    }
  }
}

Outcome theorem1_sweep() {
  Outcome o;
  std::size_t reports = 0, fails = 0;
  double worst = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    auto rng = substream(2, i);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    if (field_for(rng) == FieldKind::real)
      theorem1_instance<double>(rng, n, reports, fails, worst);
    else
      theorem1_instance<cplx>(rng, n, reports, fails, worst);
  }
  o.require(fails == 0, std::to_string(fails) + " reports fail");
  o.require(worst <= 1e-10, "endpoint agreement " + fmt("%.2e", worst));
  o.note(std::to_string(reports) + " reports over 5 q values and the full norm grid, endpoint deviation " +
         fmt("%.2e", worst));
  return o;
}

// ---- 3 ----------------------------------------------------------------------

Outcome pipeline_runs() {
  Outcome o;
  std::size_t accepted = 0, trivial = 0, degenerate = 0, bad = 0, draws = 0;
  double min_final = std::numeric_limits<double>::infinity();
  while (accepted < 1000 && draws < 5000) {
    auto rng = substream(3, draws++);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, n)(rng);
    const double q = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    std::uniform_int_distribution<std::size_t> rank(1, n);
    const bool real = field_for(rng) == FieldKind::real;
    auto handle = [&](const auto& outcome, auto tag) {
      using T = decltype(tag);
      if (std::holds_alternative<TriviallyTrue>(outcome)) {
        ++trivial;
        return;
      }
      const auto& tr = std::get<PipelineTrace<T>>(outcome);
      if (tr.degenerate) {
        ++degenerate;
        return;
      }
      ++accepted;
      min_final = std::min(min_final, tr.final_bound);
      if (!tr.all_gates_pass() || tr.final_bound < 1 - 1e-8) ++bad;
    };
    const std::size_t ra = rank(rng), rb = rank(rng);
    if (real) {
      const auto a = random_psd<double>(n, ra, rng);
      handle(run_pipeline(a, random_psd<double>(n, rb, rng), q, k), double{});
    } else {
      const auto a = random_psd<cplx>(n, ra, rng);
      handle(run_pipeline(a, random_psd<cplx>(n, rb, rng), q, k), cplx{});
    }
  }
  double worst_identity = 0;
  for (int i = 1; i < 1000; ++i) worst_identity = std::max(worst_identity, std::abs(interpolation_identity(i * 1e-3) - 1));
  o.require(accepted == 1000, "only " + std::to_string(accepted) + " non-degenerate traces");
  o.require(bad == 0, std::to_string(bad) + " traces outside their gates");
  o.require(worst_identity <= 1e-12, "identity deviation " + fmt("%.2e", worst_identity));
  o.note(std::to_string(accepted) + " traces (" + std::to_string(trivial) + " trivially true and " +
         std::to_string(degenerate) + " degenerate draws skipped), min final_bound " + fmt("%.6f", min_final) +
         ", identity deviation " + fmt("%.1e", worst_identity));
  return o;
}

// ---- 4 ----------------------------------------------------------------------

template <Scalar T>
std::size_t chain_instance(Rng& rng, std::size_t n, std::size_t& reports) {
  std::size_t fails = 0;
  std::uniform_int_distribution<std::size_t> rank(1, n);
  const double q = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const auto a = random_psd<T>(n, rank(rng), rng);
  const auto b = random_psd<T>(n, rank(rng), rng);
  const auto x = low_rank<T>(n, rank(rng), rng);
  const auto y = low_rank<T>(n, rank(rng), rng);
  auto count = [&](const CheckReport& r) {
    ++reports;
    if (!r.holds) ++fails;
  };
  for (double r : {0.5, 1.0, 2.0}) {
    count(check_weyl_majorant(a, b, r, 1e-9));
    count(check_sv_product_majorization(x, y, r, 1e-9));
    for (const auto& rep : check_majorization_chain(x, y, q, r, 1e-9)) count(rep);
  }
  std::normal_distribution<double> g;
  std::vector<double> u(n), v(n);
  for (auto& e : u) e = g(rng);
  for (auto& e : v) e = g(rng);
  for (const auto& phi : norm_grid(n))
    for (double p : {2.0, 3.0, 1.5}) count(holder_gauge_check(phi, u, v, p, 1e-9));
  return fails;
}

Outcome chain_runs() {
  Outcome o;
  std::size_t reports = 0, fails = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    auto rng = substream(4, i);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    fails += field_for(rng) == FieldKind::real ? chain_instance<double>(rng, n, reports)
                                               : chain_instance<cplx>(rng, n, reports);
  }
  o.require(fails == 0, std::to_string(fails) + " reports fail");
  o.note(std::to_string(reports) + " reports (weyl, sv-product, chain at r = 1/2, 1, 2; hoelder at p = 2, 3, 1.5)");
  return o;
}

// ---- 5 ----------------------------------------------------------------------

std::string fixture_path() { return std::string(AGMCS_FIXTURE_DIR) + "/false_variant_violation.json"; }

Outcome false_variant_hunt() {
  Outcome o;
  HuntConfig cfg;
  cfg.set_budget(100000);
  const auto t0 = Clock::now();
  const auto res = hunt_counterexample(cfg);
  const double secs = seconds_since(t0);
  o.require(cfg.budget() <= 100000, "budget");
  if (const auto* v = std::get_if<Violation>(&res)) {
    o.require(v->report.margin < -1e-6, "margin");
    const auto tmp = std::filesystem::temp_directory_path() / ("agmcs_acceptance_" + std::to_string(getpid()) + ".json");
    write_json_file(tmp.string(), violation_to_json(*v));
    const auto back = recheck(violation_from_json(parse_json_file(tmp.string())));
    std::filesystem::remove(tmp);
    o.require(std::abs(back.margin - v->report.margin) <= 1e-12, "re-verification from serialized file");
    o.note("found " + v->report.name + " margin " + fmt("%.3e", v->report.margin) + " at n = " +
           std::to_string(v->report.instance.n) + ", q = " + fmt("%g", *v->report.instance.q) + ", k = " +
           std::to_string(*v->report.instance.k) + " after " + std::to_string(v->evaluations) + " evaluations");
  } else {
    o.require(false, "no violation within " + std::to_string(cfg.budget()) + " evaluations, min margin " +
                         fmt("%.3e", std::get<NotFound>(res).min_margin));
  }
  const auto fixture = violation_from_json(parse_json_file(fixture_path()));
  const auto again = recheck(fixture);
  o.require(!again.holds && std::abs(again.margin - fixture.report.margin) <= 1e-12, "committed fixture re-verification");
  o.require(secs < 300, "runtime");
  o.note("fixture margin " + fmt("%.3e", again.margin) + ", " + fmt("%.1f s", secs));
  return o;
}

// ---- 6 ----------------------------------------------------------------------

Outcome true_hunts() {
  Outcome o;
  for (Target t : {Target::theorem2, Target::theorem1, Target::singular_form, Target::agm_singular}) {
    HuntConfig cfg;
    cfg.target = t;
    cfg.set_budget(100000);
    const auto t0 = Clock::now();
    const auto res = hunt_counterexample(cfg);
    const double secs = seconds_since(t0);
    if (const auto* nf = std::get_if<NotFound>(&res)) {
      o.require(nf->min_margin >= -1e-9, std::string(to_string(t)) + " min margin " + fmt("%.3e", nf->min_margin));
      o.note(std::string(to_string(t)) + " min " + fmt("%.2e", nf->min_margin) + " (" +
             std::to_string(nf->evaluations) + " evals, " + fmt("%.1f s", secs) + ")");
    } else {
      o.require(false, std::string(to_string(t)) + " reported a violation");
    }
  }
  return o;
}

// ---- 7 ----------------------------------------------------------------------

template <Scalar T>
double numerics_instance(Rng& rng, std::size_t n) {
  const auto g = random_gaussian<T>(n, n, rng);
  const Matrix<T> h = g + g.adjoint();
  const auto e = hermitian_eig(HermitianMatrix<T>(h));
  Matrix<T> lam(n, n);
  for (std::size_t i = 0; i < n; ++i) lam(i, i) = T{e.values[i]};
  double worst = (e.vectors * lam * e.vectors.adjoint() - h).frobenius_norm() / h.frobenius_norm();
  worst = std::max(worst, (e.vectors.adjoint() * e.vectors - Matrix<T>::identity(n)).frobenius_norm());

  const std::size_t r = std::uniform_int_distribution<std::size_t>(1, n)(rng);
  const auto a = random_psd<T>(n, r, rng);
  const auto& am = a.matrix();
  const auto s = psd_sqrt(a).matrix();
  worst = std::max(worst, (s * s - am).frobenius_norm() / am.frobenius_norm());
  const auto p = pseudo_inverse(a, 1e-12).matrix();
  const double pn = p.frobenius_norm();
  worst = std::max(worst, (am * p * am - am).frobenius_norm() / am.frobenius_norm());
  worst = std::max(worst, (p * am * p - p).frobenius_norm() / pn);
  const Matrix<T> ap = am * p;
  const Matrix<T> pa = p * am;
  worst = std::max(worst, (ap - ap.adjoint()).frobenius_norm() / std::max(1.0, ap.frobenius_norm()));
  worst = std::max(worst, (pa - pa.adjoint()).frobenius_norm() / std::max(1.0, pa.frobenius_norm()));
  return worst;
}

template <Scalar T>
double invariance_instance(Rng& rng, std::size_t n) {
  const auto x = random_gaussian<T>(n, n, rng);
  const auto u = random_unitary<T>(n, rng);
  const auto v = random_unitary<T>(n, rng);
  const Matrix<T> y = u * x * v;
  double worst = 0;
  for (const auto& phi : norm_grid(n)) worst = std::max(worst, rel(ui_norm(phi, x), ui_norm(phi, y)));
  return worst;
}

Outcome numerics() {
  Outcome o;
  double worst = 0, drift = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    auto rng = substream(7, i);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 16)(rng);
    worst = std::max(worst, field_for(rng) == FieldKind::real ? numerics_instance<double>(rng, n)
                                                               : numerics_instance<cplx>(rng, n));
  }
  for (std::size_t i = 0; i < 100; ++i) {
    auto rng = substream(77, i);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 16)(rng);
    drift = std::max(drift, field_for(rng) == FieldKind::real ? invariance_instance<double>(rng, n)
                                                               : invariance_instance<cplx>(rng, n));
  }
  o.require(worst <= 1e-10, "residual " + fmt("%.2e", worst));
  o.require(drift <= 1e-10, "unitary invariance drift " + fmt("%.2e", drift));
  o.note("worst eig/sqrt/pinv residual " + fmt("%.2e", worst) + ", ui_norm drift " + fmt("%.2e", drift));
  return o;
}

// ---- 8 ----------------------------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / ("agmcs_acceptance_" + std::to_string(getpid()));
  std::filesystem::create_directories(dir);
  auto out = [&](const std::string& name) { return (dir / name).string(); };
  auto run = [&](const std::string& args, const std::string& file) {
    const std::string cmd = std::string(AGMCS_CLI_PATH) + " " + args + " -o " + out(file) + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  struct Case {
    std::string name, a, b;
  };
  const std::vector<Case> cases{
      {"gen", "gen -n 5 --rank 3 --field complex --seed 9", "gen -n 5 --rank 3 --field complex --seed 9"},
      {"check", "check theorem1 --random -n 4 --seed 2 --q 0.3", "check theorem1 --random -n 4 --seed 2 --q 0.3"},
      {"sweep", "sweep theorem2 --instances 2000 --seed 8 --threads 1",
       "sweep theorem2 --instances 2000 --seed 8 --threads 4"},
      {"sweep-chain", "sweep chain --instances 500 --seed 3 --format csv --threads 1",
       "sweep chain --instances 500 --seed 3 --format csv --threads 3"},
      {"pipeline", "pipeline --random -n 6 --q 0.4 --k 3 --seed 11", "pipeline --random -n 6 --q 0.4 --k 3 --seed 11"},
      {"hunt", "hunt false-variant --seed 5 --threads 1", "hunt false-variant --seed 5 --threads 4"},
      {"hunt-none", "hunt agm-singular --budget 20000 --seed 2 --threads 1",
       "hunt agm-singular --budget 20000 --seed 2 --threads 3"},
      {"stress", "hunt theorem2 --stress --samples 500 --threads 1", "hunt theorem2 --stress --samples 500 --threads 2"},
  };
  for (const auto& c : cases) {
    run(c.a, c.name + ".a");
    run(c.b, c.name + ".b");
    const auto x = slurp(out(c.name + ".a"));
    const auto y = slurp(out(c.name + ".b"));
    o.require(!x.empty() && x == y, c.name + " output differs");
  }
  std::filesystem::remove_all(dir);
  if (o.pass) o.note(std::to_string(cases.size()) + " commands byte-identical across reruns and thread counts");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"theorem2 sweep, 1e4 instances", theorem2_sweep},
      {"theorem1 sweep with CS/AGM endpoints", theorem1_sweep},
      {"proof pipeline gates", pipeline_runs},
      {"majorization chain and Hoelder", chain_runs},
      {"false-variant hunt finds a violation", false_variant_hunt},
      {"true inequalities survive the hunt", true_hunts},
      {"numerical core residuals", numerics},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failed;
    std::printf("criterion %zu: %s  %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
