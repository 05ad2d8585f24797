// agmcs: command-line front end.
//
//   agmcs check <target>     evaluate one instance (file or --random)
//   agmcs sweep <target>     random batch, JSON lines
//   agmcs pipeline           proof pipeline trace for one instance
//   agmcs hunt <target>      counterexample search or --stress sampling
//   agmcs gen                write a random instance file
//
// Exit codes: 0 expectation met, 2 violation against expectation, 1 error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "agmcs/agmcs.hpp"

using namespace agmcs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

enum class Expect { none, violation, any };

int verdict(Expect e, bool violated) {
  switch (e) {
    case Expect::none:
      return violated ? kExitViolation : kExitOk;
    case Expect::violation:
      return violated ? kExitOk : kExitViolation;
    default:
      return kExitOk;
  }
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string brief(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError(what + ": '" + s + "' is not a number");
  return v;
}

std::size_t parse_size(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!s.empty() && s[0] != '-') v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError(what + ": '" + s + "' is not a non-negative integer");
  return static_cast<std::size_t>(v);
}

// "0,0.5,1"
std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(text)) out.push_back(parse_double(item, what));
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

// "2,3,5" or "2-6" or a mix
std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split(text)) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_size(item, "--dims"));
      continue;
    }
    const auto lo = parse_size(item.substr(0, dash), "--dims");
    const auto hi = parse_size(item.substr(dash + 1), "--dims");
    if (lo > hi) throw ConfigError("--dims: empty range '" + item + "'");
    for (auto n = lo; n <= hi; ++n) out.push_back(n);
  }
  if (out.empty()) throw ConfigError("--dims: empty list");
  return out;
}

FieldKind parse_field(const std::string& s) {
  if (s == "real") return FieldKind::real;
  if (s == "complex") return FieldKind::complex;
  throw ConfigError("field must be real or complex, got '" + s + "'");
}

// Owns the output stream: stdout unless a path is given.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw Error(path + ": cannot open for writing");
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }
  bool to_stdout() const { return !file_; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// ---- report streams -------------------------------------------------------

enum class Format { json, jsonl, csv, pretty };

Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "jsonl") return Format::jsonl;
  if (s == "csv") return Format::csv;
  if (s == "pretty") return Format::pretty;
  throw ConfigError("format must be json, jsonl, csv or pretty, got '" + s + "'");
}

struct Tally {
  std::size_t reports = 0;
  std::size_t violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  double min_scaled_margin = std::numeric_limits<double>::infinity();

  void add(const CheckReport& r) {
    ++reports;
    if (!r.holds) ++violations;
    min_margin = std::min(min_margin, r.margin);
    min_scaled_margin = std::min(min_scaled_margin, r.margin / std::max(1.0, std::abs(r.rhs)));
  }
  json to_json() const {
    json j{{"reports", reports}, {"violations", violations}, {"all_hold", violations == 0}};
    j["min_margin"] = reports ? json(min_margin) : json(nullptr);
    j["min_scaled_margin"] = reports ? json(min_scaled_margin) : json(nullptr);
    return j;
  }
};

class ReportWriter {
 public:
  ReportWriter(std::ostream& out, Format f, json provenance) : out_(out), format_(f), prov_(std::move(provenance)) {
    switch (format_) {
      case Format::jsonl:
        out_ << json{{"provenance", prov_}}.dump() << '\n';
        break;
      case Format::csv:
        out_ << "# " << json{{"provenance", prov_}}.dump() << '\n'
             << "name,n,field,q,k,r,p,phi,seed,index,lhs,rhs,margin,tol,holds\n";
        break;
      case Format::pretty:
        out_ << "# agmcs " << kVersion << "  seed " << prov_.value("seed", std::uint64_t{0}) << '\n';
        std::snprintf(line_, sizeof line_, "%-40s %3s %7s %3s %6s %14s %14s %14s  %s\n", "check", "n", "q", "k", "r",
                      "lhs", "rhs", "margin", "holds");
        out_ << line_;
        break;
      case Format::json:
        reports_ = json::array();
        break;
    }
  }

  void add(const CheckReport& r) {
    tally_.add(r);
    const auto& d = r.instance;
    switch (format_) {
      case Format::jsonl:
        out_ << report_to_json(r).dump() << '\n';
        break;
      case Format::json:
        reports_.push_back(report_to_json(r));
        break;
      case Format::csv: {
        auto opt = [](const auto& o) { return o ? num(static_cast<double>(*o)) : std::string(); };
        out_ << r.name << ',' << d.n << ',' << (d.field ? to_string(*d.field) : "") << ',' << opt(d.q) << ','
             << (d.k ? std::to_string(*d.k) : "") << ',' << opt(d.r) << ',' << opt(d.p) << ',' << d.phi.value_or("")
             << ',' << (d.seed ? std::to_string(*d.seed) : "") << ',' << (d.index ? std::to_string(*d.index) : "")
             << ',' << num(r.lhs) << ',' << num(r.rhs) << ',' << num(r.margin) << ',' << num(r.tol) << ','
             << (r.holds ? "true" : "false") << '\n';
        break;
      }
      case Format::pretty: {
        std::string name = r.name;
        if (d.phi) name += " [" + *d.phi + "]";
        std::snprintf(line_, sizeof line_, "%-40s %3zu %7s %3s %6s %14s %14s %14s  %s\n", name.c_str(), d.n,
                      d.q ? brief(*d.q).c_str() : "-", d.k ? std::to_string(*d.k).c_str() : "-",
                      d.r ? brief(*d.r).c_str() : "-", sci(r.lhs).c_str(), sci(r.rhs).c_str(),
                      sci(r.margin).c_str(), r.holds ? "yes" : "NO");
        out_ << line_;
        break;
      }
    }
  }

  void finish(json extra = json::object()) {
    json summary = tally_.to_json();
    for (auto& [k, v] : extra.items()) summary[k] = v;
    switch (format_) {
      case Format::jsonl:
        out_ << json{{"summary", summary}}.dump() << '\n';
        break;
      case Format::json:
        out_ << json{{"provenance", prov_}, {"reports", reports_}, {"summary", summary}}.dump(2) << '\n';
        break;
      case Format::csv:
        out_ << "# " << json{{"summary", summary}}.dump() << '\n';
        break;
      case Format::pretty:
        out_ << "# " << tally_.reports << " reports, " << tally_.violations << " violations, min margin "
             << (tally_.reports ? sci(tally_.min_margin) : std::string("-")) << '\n';
        break;
    }
    out_.flush();
  }

  const Tally& tally() const { return tally_; }

 private:
  std::ostream& out_;
  Format format_;
  json prov_;
  json reports_;
  Tally tally_;
  char line_[512]{};
};

// ---- instance sources -----------------------------------------------------

struct RandomSpec {
  std::size_t n = 4;
  std::optional<std::size_t> rank_a, rank_b;
  std::string field = "real";
  std::uint64_t seed = 0;
  bool factors = false;  // X, Y as products of Gaussian factors instead of PSD A, B

  json to_json() const {
    json j{{"n", n}, {"rank_a", rank_a.value_or(n)}, {"rank_b", rank_b.value_or(n)}, {"field", field}};
    j["kind"] = factors ? "factors" : "psd";
    return j;
  }
};

template <Scalar T>
std::pair<Matrix<T>, Matrix<T>> random_pair(const RandomSpec& s) {
  const auto ra = s.rank_a.value_or(s.n);
  const auto rb = s.rank_b.value_or(s.n);
  if (s.n < 1) throw ConfigError("-n must be >= 1");
  if (ra < 1 || ra > s.n || rb < 1 || rb > s.n) throw ConfigError("ranks must lie in [1, n]");
  auto rng = make_rng(s.seed);
  if (s.factors) {
    Matrix<T> x = random_gaussian<T>(s.n, ra, rng) * random_gaussian<T>(ra, s.n, rng);
    Matrix<T> y = random_gaussian<T>(s.n, rb, rng) * random_gaussian<T>(rb, s.n, rng);
    return {std::move(x), std::move(y)};
  }
  auto a = random_psd<T>(s.n, ra, rng);
  auto b = random_psd<T>(s.n, rb, rng);
  return {a.matrix(), b.matrix()};
}

Instance random_instance(const RandomSpec& s) {
  Instance inst;
  inst.factors = s.factors;
  if (parse_field(s.field) == FieldKind::real)
    inst.pair = random_pair<double>(s);
  else
    inst.pair = random_pair<cplx>(s);
  return inst;
}

// An instance as the pair the target expects. PSD targets given X, Y use the
// Gram matrices X*X, Y*Y.
template <Scalar T>
std::pair<Matrix<T>, Matrix<T>> pair_for(Target t, const std::pair<Matrix<T>, Matrix<T>>& p, bool factors) {
  if (needs_psd_pair(t) && factors) return {p.first.adjoint() * p.first, p.second.adjoint() * p.second};
  return p;
}

void add_random_options(CLI::App* cmd, RandomSpec& spec, bool& random) {
  cmd->add_flag("--random", random, "Generate the instance instead of reading one");
  cmd->add_option("-n", spec.n, "Dimension of the random instance")->capture_default_str();
  cmd->add_option("--rank-a", spec.rank_a, "Rank of the first matrix (default n)");
  cmd->add_option("--rank-b", spec.rank_b, "Rank of the second matrix (default n)");
  cmd->add_option("--field", spec.field, "real or complex")->capture_default_str();
  cmd->add_option("--seed", spec.seed, "Seed")->capture_default_str();
}

// ---- check ----------------------------------------------------------------

struct CheckArgs {
  std::string target;
  std::vector<std::string> instances;
  bool random = false;
  RandomSpec spec;
  std::optional<double> q;
  std::optional<std::size_t> k;
  std::string phi;
  std::string r;
  double tol = kTol.check;
  std::string output;
  std::string format = "json";
  bool expect_violation = false;
  bool expect_none = false;
};

int run_check(const CheckArgs& a) {
  const Target target = parse_target(a.target);
  if (a.random == !a.instances.empty()) throw ConfigError("give either --instance or --random");
  const Format fmt = parse_format(a.format);

  TargetParams params;
  params.tol = a.tol;
  if (!a.phi.empty()) params.norms = NormSelection::parse(a.phi);
  if (!a.r.empty()) params.r_values = parse_doubles(a.r, "--r");

  RandomSpec spec = a.spec;
  spec.factors = !needs_psd_pair(target);
  std::vector<std::pair<std::string, Instance>> sources;
  if (a.random)
    sources.emplace_back("random", random_instance(spec));
  else
    for (const auto& path : a.instances) sources.emplace_back(path, load_instance(path));

  json config{{"command", "check"}, {"target", to_string(target)}, {"tol", a.tol}};
  if (a.random)
    config["random"] = spec.to_json();
  else
    config["instances"] = a.instances;
  if (a.q) config["q"] = *a.q;
  if (a.k) config["k"] = *a.k;
  if (!params.norms.empty()) config["norms"] = params.norms.to_strings();
  if (uses_r(target)) config["r_values"] = params.r_values;

  Sink sink(a.output);
  ReportWriter w(sink.out(), fmt, provenance(config, spec.seed));
  for (const auto& [name, inst] : sources) {
    const double q = a.q ? *a.q : inst.q.value_or(0.5);
    TargetParams p = params;
    p.k = a.k ? a.k : inst.k;
    const auto reps = std::visit(
        [&](const auto& pr) {
          const auto use = pair_for(target, pr, inst.factors);
          auto out = evaluate_target(target, use.first, use.second, q, p);
          for (auto& r : out) {
            r.instance.field = inst.field();
            if (!r.instance.q && uses_q(target)) r.instance.q = q;
            if (a.random) r.instance.seed = spec.seed;
          }
          return out;
        },
        inst.pair);
    for (const auto& r : reps) w.add(r);
  }
  w.finish();
  const Expect e = a.expect_violation ? Expect::violation : Expect::none;
  return verdict(e, w.tally().violations > 0);
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  std::string target;
  std::size_t instances = 10000;
  std::string dims = "1-8";
  std::string field = "both";
  std::string q = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
  std::size_t random_q = 10;
  std::string norms;
  std::string r = "0.5,1,2";
  std::optional<std::size_t> k;
  std::uint64_t seed = 0;
  double tol = kTol.check;
  std::size_t threads = 1;
  std::string output;
  std::string format = "jsonl";
  bool expect_violation = false;
  bool expect_none = false;
};

int run_sweep_cmd(const SweepArgs& a) {
  SweepConfig cfg;
  cfg.target = parse_target(a.target);
  cfg.instances = a.instances;
  cfg.dims = parse_dims(a.dims);
  cfg.field = parse_field_choice(a.field);
  cfg.q_values = a.q.empty() ? std::vector<double>{} : parse_doubles(a.q, "--q");
  cfg.random_q = a.random_q;
  if (!a.norms.empty()) cfg.norms = NormSelection::parse(a.norms);
  cfg.r_values = parse_doubles(a.r, "--r");
  cfg.k = a.k;
  cfg.seed = a.seed;
  cfg.tol = a.tol;
  cfg.threads = std::max<std::size_t>(1, a.threads);
  cfg.validate();
  const Format fmt = parse_format(a.format);

  json config{{"command", "sweep"},
              {"target", to_string(cfg.target)},
              {"instances", cfg.instances},
              {"dims", cfg.dims},
              {"field", to_string(cfg.field)},
              {"q_values", cfg.q_values},
              {"random_q", cfg.random_q},
              {"q_pool", cfg.q_pool()},
              {"tol", cfg.tol}};
  if (cfg.target == Target::theorem1) config["norms"] = cfg.norms.empty() ? std::vector<std::string>{"grid"} : cfg.norms.to_strings();
  if (uses_r(cfg.target)) config["r_values"] = cfg.r_values;
  if (cfg.k) config["k"] = *cfg.k;

  Sink sink(a.output);
  ReportWriter w(sink.out(), fmt, provenance(config, cfg.seed));
  const auto s = run_sweep(cfg, [&](const CheckReport& r) { w.add(r); });
  json extra{{"instances", s.instances}};
  if (s.argmin) extra["argmin"] = report_to_json(*s.argmin);
  w.finish(extra);
  if (!sink.to_stdout() || fmt == Format::pretty) {
    std::cerr << "sweep " << to_string(cfg.target) << ": " << s.instances << " instances, " << s.reports
              << " reports, " << s.violations << " violations, min margin " << sci(s.min_margin) << '\n';
  }
  const Expect e = a.expect_violation ? Expect::violation : Expect::none;
  return verdict(e, s.violations > 0);
}

// ---- pipeline -------------------------------------------------------------

struct PipelineArgs {
  std::string instance;
  bool random = false;
  RandomSpec spec;
  std::optional<double> q;
  std::optional<std::size_t> k;
  std::string output;
};

template <Scalar T>
int pipeline_on(const PipelineArgs& a, const PsdMatrix<T>& A, const PsdMatrix<T>& B, double q, std::size_t k,
                json config) {
  const auto outcome = run_pipeline(A, B, q, k);
  json doc{{"provenance", provenance(config, a.spec.seed)}};
  int code = kExitOk;
  if (const auto* t = std::get_if<TriviallyTrue>(&outcome)) {
    doc["trace"] = trivially_true_to_json(*t);
    std::cout << "trivially true: rank below k = " << t->k << ", lambda_k(AB) = " << sci(t->lambda_k) << '\n';
  } else {
    const auto& tr = std::get<PipelineTrace<T>>(outcome);
    doc["trace"] = trace_to_json(tr);
    char line[512];
    std::snprintf(line, sizeof line, "%-16s %-52s %13s %9s  %s\n", "step", "residual", "value", "gate", "ok");
    std::cout << line;
    for (const auto& s : tr.steps)
      for (const auto& r : s.residuals) {
        std::snprintf(line, sizeof line, "%-16s %-52s %13s %9.1e  %s\n", s.name.c_str(), r.name.c_str(),
                      sci(r.value).c_str(), r.gate, r.pass() ? "ok" : "FAIL");
        std::cout << line;
      }
    if (tr.aborted) std::cout << "aborted: " << *tr.aborted << '\n';
    std::cout << "n " << tr.n << "  q " << num(tr.q) << "  k " << tr.k << "  s " << sci(tr.s) << "  cond(A11) "
              << sci(tr.cond_a11) << (tr.degenerate ? " (degenerate)" : "") << '\n'
              << "lambda_k(CC) " << sci(tr.lambda_k_c) << "  lambda_k(C'C') " << sci(tr.lambda_k_c_prime)
              << "  final_bound " << sci(tr.final_bound) << '\n'
              << (tr.all_gates_pass() ? "all gates pass" : "gate failure") << '\n';
    if (!tr.acceptable()) code = kExitViolation;
  }
  if (!a.output.empty()) write_json_file(a.output, doc);
  return code;
}

int run_pipeline_cmd(const PipelineArgs& a) {
  if (a.random == !a.instance.empty()) throw ConfigError("give either --instance or --random");
  RandomSpec spec = a.spec;
  const Instance inst = a.random ? random_instance(spec) : load_instance(a.instance);
  const double q = a.q ? *a.q : inst.q.value_or(0.5);
  const std::size_t k = a.k ? *a.k : inst.k.value_or(1);
  json config{{"command", "pipeline"}, {"q", q}, {"k", k}};
  if (a.random)
    config["random"] = spec.to_json();
  else
    config["instance"] = a.instance;
  return std::visit(
      [&](const auto& pr) {
        using T = typename std::decay_t<decltype(pr.first)>::value_type;
        const auto use = pair_for(Target::theorem2, pr, inst.factors);
        return pipeline_on<T>(a, PsdMatrix<T>(use.first), PsdMatrix<T>(use.second), q, k, config);
      },
      inst.pair);
}

// ---- hunt -----------------------------------------------------------------

struct HuntArgs {
  std::string target;
  std::size_t budget = 100000;
  std::optional<std::string> dims, field, q, norms, r;
  std::optional<std::size_t> k, restarts, steps, samples, threads;
  std::optional<double> step_scale, threshold;
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string output;
  bool stress = false;
  bool expect_violation = false;
  bool expect_none = false;
  bool budget_given = false;
};

// Keys as written by hunt_config_to_json.
void apply_config_file(HuntConfig& c, const std::string& path) {
  const json j = parse_json_file(path);
  if (!j.is_object()) throw ParseError(path + ": expected an object");
  try {
    if (j.contains("target")) c.target = parse_target(j.at("target").get<std::string>());
    if (j.contains("dims")) c.dims = j.at("dims").get<std::vector<std::size_t>>();
    if (j.contains("field")) c.field = parse_field_choice(j.at("field").get<std::string>());
    if (j.contains("q_grid")) c.q_grid = j.at("q_grid").get<std::vector<double>>();
    if (j.contains("k")) c.fixed_k = j.at("k").get<std::size_t>();
    if (j.contains("norms")) {
      std::string joined;
      for (const auto& s : j.at("norms")) joined += (joined.empty() ? "" : ",") + s.get<std::string>();
      c.norms = NormSelection::parse(joined);
    }
    if (j.contains("r_values")) c.r_values = j.at("r_values").get<std::vector<double>>();
    if (j.contains("steps_per_restart")) c.steps_per_restart = j.at("steps_per_restart").get<std::size_t>();
    if (j.contains("budget")) c.set_budget(j.at("budget").get<std::size_t>());
    if (j.contains("restarts")) c.restarts = j.at("restarts").get<std::size_t>();
    if (j.contains("step_scale")) c.step_scale = j.at("step_scale").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("violation_threshold")) c.violation_threshold = j.at("violation_threshold").get<double>();
    if (j.contains("samples")) c.samples = j.at("samples").get<std::size_t>();
    if (j.contains("threads")) c.threads = j.at("threads").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

HuntConfig hunt_config(const HuntArgs& a) {
  HuntConfig c;
  bool restarts_from_file = false;
  if (!a.config.empty()) {
    apply_config_file(c, a.config);
    restarts_from_file = true;
  }
  if (!a.target.empty()) c.target = parse_target(a.target);
  if (a.dims) c.dims = parse_dims(*a.dims);
  if (a.field) c.field = parse_field_choice(*a.field);
  if (a.q) c.q_grid = parse_doubles(*a.q, "--q");
  if (a.k) c.fixed_k = a.k;
  if (a.norms) c.norms = NormSelection::parse(*a.norms);
  if (a.r) c.r_values = parse_doubles(*a.r, "--r");
  if (a.steps) c.steps_per_restart = *a.steps;
  if (a.step_scale) c.step_scale = *a.step_scale;
  if (a.seed) c.seed = *a.seed;
  if (a.threshold) c.violation_threshold = *a.threshold;
  if (a.samples) c.samples = *a.samples;
  if (a.threads) c.threads = std::max<std::size_t>(1, *a.threads);
  if (a.restarts)
    c.restarts = *a.restarts;
  else if (a.budget_given || !restarts_from_file)
    c.set_budget(a.budget);
  c.validate();
  return c;
}

int run_hunt_cmd(const HuntArgs& a) {
  const HuntConfig cfg = hunt_config(a);
  json config = hunt_config_to_json(cfg);
  config["command"] = a.stress ? "hunt --stress" : "hunt";
  if (a.stress) config["samples"] = cfg.samples;
  const json prov = provenance(config, cfg.seed);
  const Expect e = a.expect_violation ? Expect::violation : a.expect_none ? Expect::none : Expect::any;

  json doc;
  bool violated = false;
  if (a.stress) {
    const auto s = stress_sweep(cfg);
    violated = s.min_margin < -cfg.violation_threshold;
    doc = stress_summary_to_json(s);
    std::cerr << "stress " << to_string(cfg.target) << ": " << s.samples << " samples, " << s.reports
              << " reports, min margin " << sci(s.min_margin) << '\n';
  } else {
    const auto res = hunt_counterexample(cfg);
    if (const auto* v = std::get_if<Violation>(&res)) {
      violated = true;
      doc = violation_to_json(*v);
      const auto& d = v->report.instance;
      std::cerr << "violation: " << v->report.name << " margin " << sci(v->report.margin) << " n " << d.n
                << (d.q ? " q " + brief(*d.q) : "") << (d.k ? " k " + std::to_string(*d.k) : "") << " (restart "
                << v->restart << ", step " << v->step << ", " << v->evaluations << " evaluations)\n";
    } else {
      const auto& nf = std::get<NotFound>(res);
      doc = not_found_to_json(nf);
      std::cerr << "not found: min margin " << sci(nf.min_margin) << " after " << nf.evaluations
                << " evaluations\n";
    }
  }
  doc["provenance"] = prov;
  if (a.output.empty())
    std::cout << doc.dump(2) << '\n';
  else
    write_json_file(a.output, doc);
  return verdict(e, violated);
}

// ---- gen ------------------------------------------------------------------

struct GenArgs {
  RandomSpec spec;
  std::optional<double> q;
  std::optional<std::size_t> k;
  std::string output;
};

int run_gen(const GenArgs& a) {
  Instance inst = random_instance(a.spec);
  inst.q = a.q;
  inst.k = a.k;
  json config{{"command", "gen"}, {"random", a.spec.to_json()}};
  inst.meta = provenance(config, a.spec.seed);
  const json doc = instance_to_json(inst);
  if (a.output.empty())
    std::cout << doc.dump(2) << '\n';
  else
    write_json_file(a.output, doc);
  return kExitOk;
}

std::string target_list() {
  std::string s;
  for (const auto& [t, name] : kTargetNames) s += (s.empty() ? "" : ", ") + std::string(name);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for interpolated matrix AGM / Cauchy-Schwarz inequalities"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  const std::string targets = "Target: " + target_list();

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "Evaluate a target on one or more instances");
  check->add_option("target", ca.target, targets)->required();
  check->add_option("--instance", ca.instances, "Instance JSON file(s)");
  add_random_options(check, ca.spec, ca.random);
  check->add_option("--q", ca.q, "Interpolation parameter (default: instance q, else 0.5)");
  check->add_option("--k", ca.k, "Keep only index k");
  check->add_option("--phi", ca.phi, "Gauge norms for theorem1, e.g. schatten:inf,kyfan:*");
  check->add_option("--r", ca.r, "Exponents r, comma separated")->default_str("0.5,1,2");
  check->add_option("--tol", ca.tol, "Relative tolerance")->capture_default_str();
  check->add_option("-o,--output", ca.output, "Output file (default stdout)");
  check->add_option("--format", ca.format, "json, jsonl, csv or pretty")->capture_default_str();
  auto* cv = check->add_flag("--expect-violation", ca.expect_violation, "Succeed only if some check fails");
  check->add_flag("--expect-none", ca.expect_none, "Succeed only if every check holds (default)")->excludes(cv);

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "Evaluate a target on a batch of random instances");
  sweep->add_option("target", sa.target, targets)->required();
  sweep->add_option("--instances", sa.instances, "Number of instances")->capture_default_str();
  sweep->add_option("--dims", sa.dims, "Dimensions, e.g. 1-8 or 2,4,6")->capture_default_str();
  sweep->add_option("--field", sa.field, "real, complex or both")->capture_default_str();
  sweep->add_option("--q", sa.q, "Fixed q values, comma separated")->capture_default_str();
  sweep->add_option("--random-q", sa.random_q, "Extra uniform random q values")->capture_default_str();
  sweep->add_option("--norms", sa.norms, "Gauge norms for theorem1 (default: full grid)");
  sweep->add_option("--r", sa.r, "Exponents r, comma separated")->capture_default_str();
  sweep->add_option("--k", sa.k, "Keep only index k");
  sweep->add_option("--seed", sa.seed, "Seed")->capture_default_str();
  sweep->add_option("--tol", sa.tol, "Relative tolerance")->capture_default_str();
  sweep->add_option("--threads", sa.threads, "Worker threads")->capture_default_str();
  sweep->add_option("-o,--output", sa.output, "Output file (default stdout)");
  sweep->add_option("--format", sa.format, "jsonl, json, csv or pretty")->capture_default_str();
  auto* sv = sweep->add_flag("--expect-violation", sa.expect_violation, "Succeed only if some check fails");
  sweep->add_flag("--expect-none", sa.expect_none, "Succeed only if every check holds (default)")->excludes(sv);

  PipelineArgs pa;
  auto* pipe = app.add_subcommand("pipeline", "Run the step-by-step proof pipeline on one instance");
  pipe->add_option("--instance", pa.instance, "Instance JSON file");
  add_random_options(pipe, pa.spec, pa.random);
  pipe->add_option("--q", pa.q, "q in (0,1) (default: instance q, else 0.5)");
  pipe->add_option("--k", pa.k, "Index k (default: instance k, else 1)");
  pipe->add_option("-o,--output", pa.output, "Write the full JSON trace here");

  HuntArgs ha;
  auto* hunt = app.add_subcommand("hunt", "Search for a counterexample");
  hunt->add_option("target", ha.target, targets);
  auto* budget = hunt->add_option("--budget", ha.budget, "Evaluation budget")->capture_default_str();
  hunt->add_option("--dims", ha.dims, "Dimensions, e.g. 2-6")->default_str("2-6");
  hunt->add_option("--field", ha.field, "real, complex or both")->default_str("both");
  hunt->add_option("--q", ha.q, "q grid, comma separated")->default_str("0.1,...,0.9");
  hunt->add_option("--k", ha.k, "Fix the index k");
  hunt->add_option("--norms", ha.norms, "Gauge norms for theorem1");
  hunt->add_option("--r", ha.r, "Exponents r, comma separated");
  hunt->add_option("--restarts", ha.restarts, "Restarts (overrides --budget)");
  hunt->add_option("--steps", ha.steps, "Steps per restart")->default_str("100");
  hunt->add_option("--step-scale", ha.step_scale, "Relative perturbation size")->default_str("0.1");
  hunt->add_option("--seed", ha.seed, "Seed")->default_str("0");
  hunt->add_option("--threshold", ha.threshold, "Violation threshold on the margin")->default_str("1e-6");
  hunt->add_option("--threads", ha.threads, "Worker threads")->default_str("1");
  hunt->add_option("--config", ha.config, "JSON config file; flags override it");
  hunt->add_option("-o,--output", ha.output, "Output file (default stdout)");
  hunt->add_flag("--stress", ha.stress, "Pure random sampling with per-cell statistics");
  hunt->add_option("--samples", ha.samples, "Samples for --stress")->default_str("10000");
  auto* hv = hunt->add_flag("--expect-violation", ha.expect_violation, "Exit 2 unless a violation is found");
  hunt->add_flag("--expect-none", ha.expect_none, "Exit 2 if a violation is found")->excludes(hv);

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Write a random instance file");
  gen->add_option("-n", ga.spec.n, "Dimension")->capture_default_str();
  gen->add_option("--rank,--rank-a", ga.spec.rank_a, "Rank of the first matrix (default n)");
  gen->add_option("--rank-b", ga.spec.rank_b, "Rank of the second matrix (default: same as --rank)");
  gen->add_option("--field", ga.spec.field, "real or complex")->capture_default_str();
  gen->add_option("--seed", ga.spec.seed, "Seed")->capture_default_str();
  gen->add_flag("--factors", ga.spec.factors, "Write general X, Y instead of PSD A, B");
  gen->add_option("--q", ga.q, "Store q in the instance");
  gen->add_option("--k", ga.k, "Store k in the instance");
  gen->add_option("-o,--output", ga.output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*check) return run_check(ca);
    if (*sweep) return run_sweep_cmd(sa);
    if (*pipe) return run_pipeline_cmd(pa);
    if (*hunt) {
      ha.budget_given = budget->count() > 0;
      return run_hunt_cmd(ha);
    }
    if (*gen) {
      if (!ga.spec.rank_b) ga.spec.rank_b = ga.spec.rank_a;
      return run_gen(ga);
    }
  } catch (const std::exception& e) {
    std::cerr << "agmcs: error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
