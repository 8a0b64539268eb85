#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "traceinv/traceinv.hpp"

namespace fs = std::filesystem;
using namespace traceinv;
using json = nlohmann::ordered_json;

namespace {

constexpr int kRuntimeError = 1;
constexpr int kInvariantFailure = 3;

// --- shared options -------------------------------------------------------

struct MatrixSource {
  std::string matrix;
  std::string b_matrix;
  std::vector<double> kernel;  // side, rho
  std::vector<double> design;  // n, m, seed
  double shift = 1e-3;
  bool random_points = false;
};

struct EstimatorArgs {
  std::vector<std::string> methods = {"cholesky"};
  int nv = 30;
  Index degree = 30;
  std::uint64_t seed = 0;
};

struct Common {
  std::string out = "out";
  std::size_t threads = 0;
  bool verbose = false;
  std::vector<std::string> argv;
};

void add_source_options(CLI::App* cmd, MatrixSource& src) {
  auto* m = cmd->add_option("--matrix", src.matrix, "A from a .mtx (symmetric coordinate) or dense .csv file");
  auto* k = cmd->add_option("--kernel", src.kernel, "exponential kernel on a side x side grid: side,rho")
                ->delimiter(',')
                ->expected(2);
  auto* d = cmd->add_option("--design", src.design, "ridge design: n,m,seed; A = X^T X + sI")
                ->delimiter(',')
                ->expected(3);
  m->excludes(k)->excludes(d);
  k->excludes(d);
  cmd->add_option("--b-matrix", src.b_matrix, "B from a file (default: identity)");
  cmd->add_option("--shift", src.shift, "s for --design")->check(CLI::PositiveNumber);
  cmd->add_flag("--random-points", src.random_points, "uniform random points (seeded by --seed) for --kernel");
}

void add_estimator_options(CLI::App* cmd, EstimatorArgs& est, bool multi_method) {
  if (multi_method) {
    cmd->add_option("--method", est.methods, "cholesky, eigen, hutchinson or slq (repeatable or comma list)")
        ->delimiter(',');
  } else {
    cmd->add_option("--method", est.methods.front(), "cholesky, eigen, hutchinson or slq");
  }
  cmd->add_option("--nv", est.nv, "random vectors for hutchinson/slq")->check(CLI::PositiveNumber);
  cmd->add_option("--degree", est.degree, "Lanczos degree for slq")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", est.seed, "master seed");
}

TraceOptions trace_options(const EstimatorArgs& est, const std::string& method, std::size_t threads) {
  TraceOptions o;
  o.method = parse_trace_method(method);
  o.num_samples = est.nv;
  o.degree = est.degree;
  o.seed = est.seed;
  o.threads = threads;
  return o;
}

json source_json(const MatrixSource& s) {
  json j;
  if (!s.matrix.empty()) j["matrix"] = s.matrix;
  if (!s.kernel.empty()) {
    j["kernel"] = {{"side", static_cast<long>(s.kernel[0])}, {"rho", s.kernel[1]}};
    j["random_points"] = s.random_points;
  }
  if (!s.design.empty()) {
    j["design"] = {{"n", static_cast<long>(s.design[0])},
                   {"m", static_cast<long>(s.design[1])},
                   {"seed", static_cast<std::uint64_t>(s.design[2])}};
    j["shift"] = s.shift;
  }
  j["b_matrix"] = s.b_matrix.empty() ? json("identity") : json(s.b_matrix);
  return j;
}

json estimator_json(const EstimatorArgs& e) {
  return {{"methods", e.methods}, {"nv", e.nv}, {"degree", e.degree}, {"seed", e.seed}};
}

Index checked_index(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v)) throw InvalidArgument(std::string(what) + " must be a positive integer");
  return static_cast<Index>(v);
}

struct LoadedPencil {
  SpdMatrix a;
  SpdMatrix b;
  std::optional<double> t_min;
};

LoadedPencil load_pencil(const MatrixSource& s, std::uint64_t seed) {
  LoadedPencil p;
  if (!s.matrix.empty()) {
    p.a = io::read_matrix(s.matrix);
  } else if (!s.kernel.empty()) {
    const Index side = checked_index(s.kernel[0], "kernel side");
    const PointCloud pts = s.random_points ? random_points(side * side, seed) : grid_points(side);
    p.a = build_exponential_kernel(pts, s.kernel[1]);
  } else if (!s.design.empty()) {
    const GcvProblem prob = make_gcv_problem(checked_index(s.design[0], "design n"),
                                             checked_index(s.design[1], "design m"),
                                             static_cast<std::uint64_t>(s.design[2]), s.shift);
    const GcvSystem sys(prob);
    p.a = sys.a();
    const double smallest = prob.x.singular_values().minCoeff();
    p.t_min = -(s.shift + smallest * smallest);
  } else {
    throw InvalidArgument("one of --matrix, --kernel or --design is required");
  }
  p.b = s.b_matrix.empty() ? SpdMatrix::identity(p.a.order()) : io::read_matrix(s.b_matrix);
  if (!s.b_matrix.empty()) p.t_min.reset();
  return p;
}

// --- sweeps ----------------------------------------------------------------

std::vector<double> parse_sweep(const std::vector<std::string>& s) {
  if (s.size() != 4) throw InvalidArgument("--sweep expects min,max,count,log|lin");
  const double lo = std::stod(s[0]), hi = std::stod(s[1]);
  const int count = std::stoi(s[2]);
  if (s[3] == "log") return logspace(lo, hi, count);
  if (s[3] != "lin") throw InvalidArgument("--sweep spacing must be 'log' or 'lin'");
  if (!(hi >= lo) || count < 1) throw InvalidArgument("--sweep needs min <= max and count >= 1");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  return out;
}

void check_nodes(const std::vector<double>& nodes) {
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) throw InvalidArgument("--nodes must be strictly increasing");
  }
}

// --- output ----------------------------------------------------------------

class Run {
 public:
  Run(const Common& common, std::string subcommand) : common_(common), dir_(common.out) {
    fs::create_directories(dir_);
    manifest_["tool"] = "traceinv";
    manifest_["version"] = TRACEINV_VERSION;
    manifest_["subcommand"] = std::move(subcommand);
    manifest_["argv"] = common.argv;
    manifest_["threads"] = common.threads;
    manifest_["config"] = json::object();
    manifest_["outputs"] = json::array();
    // Rewritten by finish(); a run that throws still leaves this one behind.
    manifest_["status"] = "incomplete";
    write_manifest();
  }

  json& config() { return manifest_["config"]; }

  fs::path path(const std::string& name) {
    manifest_["outputs"].push_back(name);
    return dir_ / name;
  }

  void write_json(const std::string& name, const json& j) {
    std::ofstream out(path(name));
    out << j.dump(2) << '\n';
    if (!out) throw Error("cannot write " + (dir_ / name).string());
  }

  void log(const std::string& msg) const {
    if (common_.verbose) std::cerr << msg << '\n';
  }

  void fail(const std::string& what) {
    failures_.push_back(what);
    std::cerr << "invariant failed: " << what << '\n';
  }

  int finish() {
    manifest_["status"] = failures_.empty() ? "ok" : "invariant_failure";
    manifest_["invariant_failures"] = failures_;
    write_manifest();
    return failures_.empty() ? 0 : kInvariantFailure;
  }

 private:
  void write_manifest() {
    std::ofstream out(dir_ / "manifest.json");
    out << manifest_.dump(2) << '\n';
  }

  const Common& common_;
  fs::path dir_;
  json manifest_;
  std::vector<std::string> failures_;
};

class Csv {
 public:
  Csv(const fs::path& p, const std::vector<std::string>& header) : out_(p) {
    if (!out_) throw Error("cannot write " + p.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << io::fmt(values[i]);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

double rel_error(double approx, double exact) { return std::abs(approx - exact) / std::abs(exact); }

// --- subcommands ---------------------------------------------------------

struct TraceArgs {
  MatrixSource src;
  EstimatorArgs est;
  std::vector<double> t = {0.0};
};

int cmd_trace(const TraceArgs& a, const Common& common) {
  Run run(common, "trace");
  run.config()["source"] = source_json(a.src);
  run.config()["estimator"] = estimator_json(a.est);
  run.config()["t"] = a.t;

  const LoadedPencil p = load_pencil(a.src, a.est.seed);
  std::optional<EigenTraceFunction> eig;
  json records = json::array();
  for (const std::string& method : a.est.methods) {
    const TraceOptions opt = trace_options(a.est, method, common.threads);
    for (double t : a.t) {
      TraceEstimate e;
      if (opt.method == TraceMethod::exact_eigen) {
        if (!eig) eig = trace_inv_exact_eigen(p.a, p.b);
        e = eig->estimate(t);
      } else {
        e = estimate_trace_inv(shifted_operand(p.a, p.b, t), opt);
      }
      if (!(e.value > 0.0)) run.fail("non-positive trace estimate at t = " + io::fmt(t));
      run.log(method + " t=" + io::fmt(t) + " -> " + io::fmt(e.value));
      records.push_back(to_json(e, t));
    }
  }
  run.write_json("trace.json", records);
  std::cout << records.dump(2) << '\n';
  return run.finish();
}

struct InterpolateArgs {
  MatrixSource src;
  EstimatorArgs est;
  std::vector<double> nodes;
  std::string variant = "rational";
  std::optional<int> p;
  std::vector<std::string> sweep;
  bool force = false;
};

int cmd_interpolate(const InterpolateArgs& a, const Common& common) {
  Run run(common, "interpolate");
  run.config()["source"] = source_json(a.src);
  run.config()["estimator"] = estimator_json(a.est);
  run.config()["variant"] = a.variant;
  run.config()["nodes"] = a.nodes;
  run.config()["p"] = a.p ? json(*a.p) : json(nullptr);
  run.config()["sweep"] = a.sweep;
  check_nodes(a.nodes);

  const LoadedPencil pencil = load_pencil(a.src, a.est.seed);
  const TraceOptions opt = trace_options(a.est, a.est.methods.front(), common.threads);
  const TauContext ctx = TauContext::build(pencil.a, pencil.b, opt, pencil.t_min);
  const TauFunction tau(ctx, opt);
  const InterpolantPoints pts = compute_interpolant_points(tau, a.nodes);

  const auto variant = parse_variant(a.variant);
  Interpolant f = Interpolant::bound(ctx.tau0);
  switch (variant) {
    case Interpolant::Variant::bound:
      if (!a.nodes.empty()) throw InvalidArgument("the bound variant takes no nodes");
      break;
    case Interpolant::Variant::basis:
      if (a.p && *a.p != static_cast<int>(a.nodes.size())) {
        throw InvalidArgument("basis interpolation of order p needs exactly p nodes");
      }
      f = fit_basis(ctx, pts);
      break;
    case Interpolant::Variant::rational: {
      if (a.nodes.size() % 2 != 0) throw InvalidArgument("rational interpolation needs an even number of nodes");
      const int p = a.p.value_or(static_cast<int>(a.nodes.size() / 2));
      f = fit_rational(ctx, pts, p);
      break;
    }
  }

  json nodes = json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    json n = to_json(pts.meta[i], pts.t[i]);
    n["tau"] = pts.tau[i];
    n["tau_interp"] = f(pts.t[i]);
    n["rel_error"] = rel_error(f(pts.t[i]), pts.tau[i]);
    if (rel_error(f(pts.t[i]), pts.tau[i]) > 1e-8) run.fail("node t = " + io::fmt(pts.t[i]) + " not reproduced");
    nodes.push_back(std::move(n));
  }
  json result;
  result["tau0"] = ctx.tau0;
  result["trace_b_inv"] = ctx.trace_b_inv;
  result["t_min"] = ctx.t_min ? json(*ctx.t_min) : json(nullptr);
  result["condition"] = f.condition();
  result["residual"] = f.residual();
  result["poles"] = f.poles();
  result["interpolant"] = to_json(f);
  result["nodes"] = std::move(nodes);

  if (!a.sweep.empty()) {
    const std::vector<double> ts = parse_sweep(a.sweep);
    TraceOptions exact = opt;
    if (exact.method != TraceMethod::exact_eigen) exact.method = TraceMethod::exact_cholesky;
    const TauFunction reference(ctx, exact);
    std::vector<double> ref(ts.size());
    parallel_for(ts.size(), [&](std::size_t i) { ref[i] = reference(ts[i]); }, common.threads);
    Csv csv(run.path("curve.csv"), {"t", "tau_exact", "tau_interp", "rel_error"});
    double worst = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double v = f.evaluate(ts[i], a.force);
      worst = std::max(worst, rel_error(v, ref[i]));
      csv.row({ts[i], ref[i], v, rel_error(v, ref[i])});
    }
    result["sweep_max_rel_error"] = worst;
    run.log("max relative error over sweep: " + io::fmt(worst));
  }
  run.write_json("interpolant.json", result);
  std::cout << result.dump(2) << '\n';
  return run.finish();
}

int cmd_ortho(int p, const Common& common) {
  Run run(common, "ortho");
  run.config()["p"] = p;
  const OrthoCoefficients c = gram_schmidt(p);
  const std::string table = format_table(c);
  {
    std::ofstream out(run.path("ortho.txt"));
    out << table;
  }
  run.write_json("ortho.json", to_json(c));
  std::cout << table;
  return run.finish();
}

struct GpArgs {
  std::vector<double> kernel = {50, 0.1};
  std::vector<std::vector<double>> node_sets;
  std::vector<std::string> sweep = {"1e-4", "1e3", "100", "log"};
  bool random_points = false;
  std::uint64_t seed = 0;
};

int cmd_gp(const GpArgs& a, const Common& common) {
  Run run(common, "gp-experiment");
  GpConfig cfg;
  if (a.kernel.size() != 2) throw InvalidArgument("--kernel expects side,rho");
  cfg.side = checked_index(a.kernel[0], "kernel side");
  cfg.rho = a.kernel[1];
  cfg.random_points = a.random_points;
  cfg.seed = a.seed;
  if (!a.node_sets.empty()) cfg.node_sets = a.node_sets;
  for (const auto& n : cfg.node_sets) check_nodes(n);
  cfg.sweep = parse_sweep(a.sweep);
  cfg.threads = common.threads;
  run.config()["side"] = cfg.side;
  run.config()["rho"] = cfg.rho;
  run.config()["random_points"] = cfg.random_points;
  run.config()["seed"] = cfg.seed;
  run.config()["node_sets"] = cfg.node_sets;
  run.config()["sweep"] = a.sweep;

  const GpResult r = gp_experiment(cfg);
  run.log("tau0 = " + io::fmt(r.tau0));

  std::vector<std::string> header = {"t", "tau_exact", "tau_upper", "tau_lower", "rel_error_upper"};
  std::map<int, int> seen;
  for (const auto& c : r.curves) {
    const int k = seen[c.p]++;
    const std::string tag = "p" + std::to_string(c.p) + (k ? "_" + std::to_string(k) : "");
    header.push_back("tau_" + tag);
    header.push_back("rel_error_" + tag);
  }
  Csv csv(run.path("gp_curves.csv"), header);
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    std::vector<double> row = {r.t[i], r.tau_exact[i], r.tau_upper[i], r.tau_lower[i],
                               rel_error(r.tau_upper[i], r.tau_exact[i])};
    for (const auto& c : r.curves) {
      row.push_back(c.tau[i]);
      row.push_back(c.rel_error[i]);
    }
    csv.row(row);
    const double slack = 1e-12 * r.tau_exact[i];
    if (r.tau_upper[i] < r.tau_exact[i] - slack || r.tau_lower[i] > r.tau_exact[i] + slack) {
      run.fail("bounds do not enclose tau at t = " + io::fmt(r.t[i]));
    }
  }
  const SpdMatrix k = build_exponential_kernel(
      cfg.random_points ? random_points(cfg.side * cfg.side, cfg.seed) : grid_points(cfg.side), cfg.rho);
  for (const auto& c : r.curves) {
    const std::vector<double> exact = exact_tau_curve(k, c.nodes, common.threads);
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
      if (rel_error(c.interpolant(c.nodes[i]), exact[i]) > 1e-8) {
        run.fail("p = " + std::to_string(c.p) + " misses node " + io::fmt(c.nodes[i]));
      }
    }
  }
  const json summary = summary_json(r);
  run.write_json("gp_summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return run.finish();
}

struct GcvArgs {
  std::vector<double> design = {1000, 500, static_cast<double>(kDefaultGcvSeed)};
  double shift = 1e-3;
  EstimatorArgs est;
  std::vector<int> ps = {0, 1, 2};
  bool curve = true;
};

int cmd_gcv(const GcvArgs& a, const Common& common) {
  Run run(common, "gcv-experiment");
  if (a.design.size() != 3) throw InvalidArgument("--design expects n,m,seed");
  const GcvProblem problem = make_gcv_problem(checked_index(a.design[0], "design n"),
                                              checked_index(a.design[1], "design m"),
                                              static_cast<std::uint64_t>(a.design[2]), a.shift);
  DeOptions de;
  de.seed = a.est.seed;
  run.config()["design"] = {{"n", problem.n()}, {"m", problem.m()}, {"seed", problem.seed}};
  run.config()["shift"] = a.shift;
  run.config()["sigma"] = problem.sigma;
  run.config()["theta_interval"] = {problem.theta_lo, problem.theta_hi};
  run.config()["estimator"] = estimator_json(a.est);
  run.config()["p"] = a.ps;
  run.config()["differential_evolution"] = to_json(de);

  std::vector<OptimizationResult> rows;
  for (const std::string& method : a.est.methods) {
    std::optional<double> exact_theta;
    for (int p : a.ps) {
      if (p < 0) throw InvalidArgument("--p values must be non-negative");
      GcvMode mode;
      mode.trace = trace_options(a.est, method, common.threads);
      mode.rational_p = p;
      OptimizationResult r = gcv_experiment(problem, mode, de);
      if (p == 0) exact_theta = r.theta;
      if (exact_theta) r.error = relative_log_theta_error(r.theta, *exact_theta);
      run.log(r.algorithm + " / " + r.interpolation + ": log10 theta* = " + io::fmt(r.log10_theta) +
              ", N_tr = " + std::to_string(r.n_tr) + ", N_tot = " + std::to_string(r.n_tot));

      const std::string label = r.algorithm + " p=" + std::to_string(p);
      if (r.n_tr > r.n_tot) run.fail(label + ": N_tr > N_tot");
      if (p == 0 && r.n_tr != r.n_tot) run.fail(label + ": exact mode must have N_tr = N_tot");
      if (p > 0 && r.n_tr != 2 * p + 1) run.fail(label + ": N_tr != 2p + 1");
      if (!(r.theta >= problem.theta_lo && r.theta <= problem.theta_hi)) run.fail(label + ": theta* outside interval");
      rows.push_back(std::move(r));
    }
  }
  json table = json::array();
  for (const auto& r : rows) table.push_back(to_json(r));
  json summary;
  summary["rows"] = table;

  if (a.curve) {
    const GcvSystem sys(problem);
    const std::vector<double> grid = gcv_theta_grid(problem);
    std::vector<std::string> header = {"theta", "t", "tau_exact", "V_exact"};
    std::vector<const OptimizationResult*> interp;
    for (const auto& r : rows) {
      if (!r.interpolant) continue;
      interp.push_back(&r);
      const std::string tag = r.algorithm + "_p" + std::to_string(r.interpolant->p());
      header.push_back("tau_" + tag);
      header.push_back("V_" + tag);
    }
    std::vector<std::vector<double>> values(grid.size());
    parallel_for(
        grid.size(),
        [&](std::size_t i) {
          const double theta = grid[i];
          const CholeskyFactor l = cholesky(sys.regularized(theta));
          const double num = sys.numerator(l);
          const double tau = gcv_exact_tau(sys, l, theta, TraceOptions{}).value;
          std::vector<double> row = {theta, problem.t_of(theta), tau, num / sys.denominator(theta, tau)};
          for (const auto* r : interp) {
            const double ti = r->interpolant->evaluate(problem.t_of(theta));
            row.push_back(ti);
            row.push_back(num / sys.denominator(theta, ti));
          }
          values[i] = std::move(row);
        },
        common.threads);
    Csv csv(run.path("gcv_curve.csv"), header);
    for (const auto& row : values) csv.row(row);

    // Minima are counted on the log-spaced part only.
    const std::vector<double> log_grid = logspace(problem.theta_lo, problem.theta_hi, 300);
    std::vector<double> v;
    for (const auto& row : values) {
      if (std::find(log_grid.begin(), log_grid.end(), row[0]) != log_grid.end()) v.push_back(row[3]);
    }
    json minima = json::array();
    for (std::size_t i : local_minima(v)) minima.push_back({{"theta", log_grid[i]}, {"V", v[i]}});
    summary["local_minima_exact"] = minima;
  }
  run.write_json("gcv_table.json", summary);
  std::cout << summary.dump(2) << '\n';
  return run.finish();
}

struct InequalityArgs {
  int trials = 1000;
  Index n = 20;
  int harmonic = 10000;
  std::uint64_t seed = 0;
};

int cmd_inequalities(const InequalityArgs& a, const Common& common) {
  Run run(common, "check-inequalities");
  run.config()["trials"] = a.trials;
  run.config()["n"] = a.n;
  run.config()["harmonic_trials"] = a.harmonic;
  run.config()["seed"] = a.seed;
  const InequalityReport r = check_inequality_suite(a.trials, a.n, a.seed, a.harmonic);
  const json j = to_json(r);
  run.write_json("inequalities.json", j);
  std::cout << j.dump(2) << '\n';
  for (const auto* c : {&r.superadditive, &r.equality, &r.subtractive, &r.harmonic}) {
    if (c->violations > 0) run.fail(c->name + ": " + std::to_string(c->violations) + " violations");
  }
  return run.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace of a matrix inverse as a function of a shift: estimators, interpolants and studies"};
  app.set_version_flag("--version", std::string(TRACEINV_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  for (int i = 0; i < argc; ++i) common.argv.emplace_back(argv[i]);
  app.add_option("--out", common.out, "output directory")->capture_default_str();
  app.add_option("--threads", common.threads, "worker threads (0: all cores)")->capture_default_str();
  app.add_flag("-v,--verbose", common.verbose, "progress on stderr");

  TraceArgs trace;
  auto* c_trace = app.add_subcommand("trace", "trace((A + tB)^-1) at each t with each method");
  add_source_options(c_trace, trace.src);
  add_estimator_options(c_trace, trace.est, true);
  c_trace->add_option("--t", trace.t, "comma list of t")->delimiter(',');

  InterpolateArgs interp;
  auto* c_interp = app.add_subcommand("interpolate", "fit an interpolant of tau(t) and optionally sweep it");
  add_source_options(c_interp, interp.src);
  add_estimator_options(c_interp, interp.est, false);
  c_interp->add_option("--nodes", interp.nodes, "comma list of interpolant points")->delimiter(',');
  c_interp->add_option("--variant", interp.variant, "bound, basis or rational")
      ->check(CLI::IsMember({"bound", "basis", "rational"}));
  c_interp->add_option("--p", interp.p, "interpolant order");
  c_interp->add_option("--sweep", interp.sweep, "min,max,count,log|lin")->delimiter(',')->expected(4);
  c_interp->add_flag("--force", interp.force, "evaluate the basis variant below its oscillation floor");

  int ortho_p = 9;
  auto* c_ortho = app.add_subcommand("ortho", "orthogonal basis coefficients in exact arithmetic");
  c_ortho->add_option("--p", ortho_p, "number of functions")->check(CLI::Range(1, kMaxOrthoOrder));

  GpArgs gp;
  auto* c_gp = app.add_subcommand("gp-experiment", "correlation-matrix interpolation study");
  c_gp->add_option("--kernel", gp.kernel, "side,rho")->delimiter(',')->expected(2);
  c_gp->add_option("--nodes", gp.node_sets, "node set (repeat for several)")->delimiter(',')->allow_extra_args(false);
  c_gp->add_option("--sweep", gp.sweep, "min,max,count,log|lin")->delimiter(',')->expected(4);
  c_gp->add_flag("--random-points", gp.random_points, "uniform random points instead of the grid");
  c_gp->add_option("--seed", gp.seed, "seed for --random-points");

  GcvArgs gcv;
  auto* c_gcv = app.add_subcommand("gcv-experiment", "ridge regularization by generalized cross-validation");
  c_gcv->add_option("--design", gcv.design, "n,m,seed")->delimiter(',')->expected(3);
  c_gcv->add_option("--shift", gcv.shift, "s in A = X^T X + sI")->check(CLI::PositiveNumber);
  add_estimator_options(c_gcv, gcv.est, true);
  c_gcv->add_option("--p", gcv.ps, "rational orders to run, 0 = exact (comma list)")->delimiter(',');
  c_gcv->add_flag("!--no-curve", gcv.curve, "skip the V(theta) curve");

  InequalityArgs ineq;
  auto* c_ineq = app.add_subcommand("check-inequalities", "random checks of the trace inequality");
  c_ineq->add_option("--trials", ineq.trials)->check(CLI::PositiveNumber);
  c_ineq->add_option("--n", ineq.n)->check(CLI::PositiveNumber);
  c_ineq->add_option("--harmonic-trials", ineq.harmonic)->check(CLI::NonNegativeNumber);
  c_ineq->add_option("--seed", ineq.seed);

  CLI11_PARSE(app, argc, argv);
  default_thread_count() = common.threads;

  try {
    if (*c_trace) return cmd_trace(trace, common);
    if (*c_interp) return cmd_interpolate(interp, common);
    if (*c_ortho) return cmd_ortho(ortho_p, common);
    if (*c_gp) return cmd_gp(gp, common);
    if (*c_gcv) return cmd_gcv(gcv, common);
    if (*c_ineq) return cmd_inequalities(ineq, common);
  } catch (const PoleInDomain& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kRuntimeError;
}
