#include "badmm/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "badmm/bench.hpp"
#include "badmm/errors.hpp"
#include "badmm/format.hpp"

namespace badmm {

namespace {

struct TolFlags {
  double rho = 1e-5;
  double eta = 1e-5;
  double alpha = 1e-2;
  double C = 1.0;

  void add(CLI::App* app) {
    app->add_option("--rho", rho, "stationarity tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--eta", eta, "feasibility tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--alpha", alpha, "multiplier-update threshold")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--C", C, "residual bound for multiplier updates")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
  ToleranceConfig config() const { return {rho, eta, alpha, C}; }
};

struct GenerateArgs {
  std::string family = "dqp";
  int B = 0;
  int n = 10;
  int m = 1;
  double omega = 10.0;
  std::uint64_t seed = 0;
  std::string rhs = "consensus";
  std::string out;
};

struct SolveArgs {
  std::string instance;
  std::string algo = "aadmm";
  std::string mode = "adaptive";
  TolFlags tol;
  std::optional<double> c0;
  std::optional<double> gamma0;
  double theta = 0.0;
  double chi = 1.0;
  double lambda = 0.5;
  double penalty = 1.0;
  std::string criterion = "absolute";
  std::string trace;
  std::string calls;
  std::string out = "certificate.json";
  bool verify_internal = false;
};

struct BenchArgs {
  std::string family = "dqp";
  std::vector<int> n;
  std::vector<double> omega;
  std::vector<int> B;
  std::vector<int> m;
  std::uint64_t seed = 0;
  int seeds = 1;
  std::vector<std::string> algos;
  std::string rhs = "consensus";
  std::string config;
  std::string out;
  int jobs = 1;
  bool wall_time = false;
  long max_iterations = 500000;
  TolFlags tol;
};

struct VerifyArgs {
  std::string instance;
  std::string certificate;
  std::optional<double> rho;
  std::optional<double> eta;
};

std::string summarize(const ProblemInstance& inst, const Certificate& cert) {
  std::ostringstream os;
  os << "  ||v||^2 + eps   " << format_double(cert.v.squared_norm() + cert.eps) << '\n';
  os << "  ||Ax - b||      " << format_double(inst.constraint_residual(cert.x).norm()) << '\n';
  os << "  f(x)            " << format_double(inst.smooth().value(cert.x)) << '\n';
  os << "  ||p||           " << format_double(cert.p.norm()) << '\n';
  return os.str();
}

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  Family fam = parse_family(a.family);
  ProblemInstance inst = fam == Family::dqp ? gen_dqp({a.B ? a.B : 3, a.n, a.omega, a.seed, parse_dqp_rhs(a.rhs)})
                                            : gen_qpbc({a.B ? a.B : 10, a.m, a.seed});
  save_instance_file(a.out, inst);
  out << "wrote " << a.family << " instance to " << a.out << '\n';
  return kExitOk;
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  ProblemInstance inst = load_instance_file(a.instance);
  ToleranceConfig tol = a.tol.config();
  tol.validate();
  StopCriterion stop = parse_stop_criterion(a.criterion);
  StepsizeMode mode = parse_stepsize_mode(a.mode);
  BlockVector x0 = inst.initial_point() ? *inst.initial_point() : BlockVector(inst.sizes());

  out << "solve: algo=" << a.algo << " mode=" << a.mode << " rho=" << format_double(tol.rho)
      << " eta=" << format_double(tol.eta) << " alpha=" << format_double(tol.alpha) << " C=" << format_double(tol.C)
      << " criterion=" << a.criterion << '\n';

  std::vector<double> gamma;
  if (a.gamma0) gamma.assign(static_cast<size_t>(inst.count()), *a.gamma0);

  std::optional<Certificate> cert;
  long iterations = 0;
  std::vector<TraceRow> trace;
  std::vector<OuterCall> calls;
  bool converged = false;

  if (a.algo == "aadmm") {
    AadmmConfig cfg;
    cfg.tol = tol;
    cfg.gamma0 = gamma;
    cfg.c0 = a.c0;
    cfg.mode = mode;
    cfg.stop = stop;
    cfg.verify = a.verify_internal;
    if (!a.trace.empty()) {
      cfg.observer = [&trace](int, const SadmmIteration& it) {
        auto [mn, mx] = std::minmax_element(it.sweep->lambda_plus.begin(), it.sweep->lambda_plus.end());
        trace.push_back({it.i, it.k, it.v_sq, it.delta, it.T, it.feasibility, it.c, *mn, *mx});
      };
    }
    try {
      AadmmResult r = a_admm(inst, x0, cfg);
      iterations = r.total_iterations;
      calls = r.calls;
      cert = std::move(r.cert);
      converged = true;
    } catch (const AadmmNonconvergence& e) {
      out << e.what() << '\n';
      iterations = e.iterations();
      calls = e.calls();
    }
  } else if (a.algo == "sadmm") {
    SadmmOptions so;
    so.tol = tol;
    so.mode = mode;
    so.record_trace = !a.trace.empty();
    so.verify = a.verify_internal;
    EffectiveTolerance eff = stop == StopCriterion::relative ? relative_to_absolute(inst, x0, tol.rho, tol.eta)
                                                             : EffectiveTolerance{tol.rho, tol.eta};
    so.stop_rho = eff.rho;
    if (gamma.empty()) {
      if (mode == StepsizeMode::fixed) {
        if (!inst.metadata()) throw MetadataIncompleteError("fixed mode without --gamma0 needs instance metadata");
        gamma = theory_stepsizes(*inst.metadata());
      } else {
        gamma.assign(static_cast<size_t>(inst.count()), 1.0);
      }
    }
    double c = a.c0.value_or(default_c0(inst, x0));
    try {
      SadmmResult r = s_admm(inst, x0, Vec::Zero(inst.map().rows()), gamma, c, so);
      iterations = r.iterations;
      trace = std::move(r.trace);
      double feas = inst.constraint_residual(r.y).norm();
      cert = polish_certificate(inst, {std::move(r.y), std::move(r.q), std::move(r.v), r.delta}, eff.rho);
      converged = feas <= eff.eta;
      if (!converged) out << "s_admm returned a point that is not feasible to eta\n";
    } catch (const NonconvergenceError& e) {
      out << e.what() << '\n';
    }
  } else if (a.algo == "dp") {
    BaselineConfig bc{a.theta, a.chi, a.lambda, a.penalty, 500000};
    BaselineResult r = dp_baseline(inst, x0, bc, tol, stop);
    iterations = r.iterations;
    converged = r.converged;
    if (converged) cert = std::move(r.cert);
  } else {
    throw InvalidArgumentError("unknown algorithm: " + a.algo);
  }

  if (!a.trace.empty()) {
    std::ofstream ts(a.trace);
    if (!ts) throw InvalidArgumentError("cannot open " + a.trace);
    write_trace_csv(ts, trace);
  }
  if (!a.calls.empty() && !calls.empty()) {
    std::ofstream cs(a.calls);
    if (!cs) throw InvalidArgumentError("cannot open " + a.calls);
    write_calls_csv(cs, calls);
  }

  out << "iterations: " << iterations << '\n';
  if (!converged || !cert) {
    out << "status: not converged\n";
    return kExitNonconvergence;
  }
  // Only certificates that pass the independent check are written.
  StationarityReport rep = check_rho_eta_stationary(inst, *cert, tol);
  bool ok = stop == StopCriterion::absolute
                ? rep.stationary()
                : rep.inclusion_ok && relative_error_ok(inst, *cert, x0, tol.rho, tol.eta);
  out << summarize(inst, *cert);
  out << "  inclusion gap   " << format_double(rep.inclusion_gap) << '\n';
  if (!ok) {
    out << "status: certificate rejected by the independent check\n";
    return kExitNonconvergence;
  }
  StoredCertificate sc;
  sc.cert = std::move(*cert);
  sc.criterion = stop;
  sc.rho = tol.rho;
  sc.eta = tol.eta;
  if (stop == StopCriterion::relative) sc.x0 = x0;
  sc.algorithm = a.algo;
  save_certificate_file(a.out, sc);
  out << "status: converged\ncertificate: " << a.out << '\n';
  return kExitOk;
}

std::vector<std::uint64_t> seed_list(std::uint64_t first, int count) {
  std::vector<std::uint64_t> s;
  for (int i = 0; i < count; ++i) s.push_back(first + static_cast<std::uint64_t>(i));
  return s;
}

int cmd_bench(BenchArgs a, std::ostream& out) {
  std::vector<std::uint64_t> seeds;
  if (!a.config.empty()) {
    std::ifstream is(a.config);
    if (!is) throw InvalidArgumentError("cannot open " + a.config);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(is);
      a.family = doc.value("family", a.family);
      a.rhs = doc.value("dqp_rhs", a.rhs);
      if (doc.contains("n")) a.n = doc["n"].get<std::vector<int>>();
      if (doc.contains("omega")) a.omega = doc["omega"].get<std::vector<double>>();
      if (doc.contains("B")) a.B = doc["B"].get<std::vector<int>>();
      if (doc.contains("m")) a.m = doc["m"].get<std::vector<int>>();
      if (doc.contains("seeds")) seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
      if (doc.contains("algorithms")) a.algos = doc["algorithms"].get<std::vector<std::string>>();
      a.tol.rho = doc.value("rho", a.tol.rho);
      a.tol.eta = doc.value("eta", a.tol.eta);
      a.tol.alpha = doc.value("alpha", a.tol.alpha);
      a.tol.C = doc.value("C", a.tol.C);
      a.max_iterations = doc.value("max_iterations", a.max_iterations);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgumentError(std::string("malformed grid config: ") + e.what());
    }
  }
  if (seeds.empty()) seeds = seed_list(a.seed, a.seeds);
  Family fam = parse_family(a.family);
  ExperimentGrid grid;
  if (fam == Family::dqp) {
    if (a.n.empty()) a.n = {10, 20};
    if (a.omega.empty()) a.omega = {1e1, 1e3, 1e5};
    if (a.B.empty()) a.B = {3};
    for (int B : a.B) {
      ExperimentGrid g = ExperimentGrid::dqp(a.n, a.omega, seeds, B, parse_dqp_rhs(a.rhs));
      grid.cases.insert(grid.cases.end(), g.cases.begin(), g.cases.end());
    }
  } else {
    if (a.B.empty()) a.B = {10};
    if (a.m.empty()) a.m = {1};
    grid = ExperimentGrid::qpbc(a.B, a.m, seeds);
  }
  if (grid.cases.empty()) throw InvalidArgumentError("the benchmark grid is empty");

  std::vector<AlgorithmSpec> algs;
  for (AlgorithmSpec& s : default_algorithms(fam)) {
    if (a.algos.empty() || std::find(a.algos.begin(), a.algos.end(), s.tag) != a.algos.end()) algs.push_back(s);
  }
  if (algs.empty()) throw InvalidArgumentError("no algorithm matches --algos");

  RunOptions ro;
  ro.tol = a.tol.config();
  ro.tol.validate();
  ro.jobs = a.jobs;
  ro.wall_time = a.wall_time;
  ro.max_iterations = a.max_iterations;

  nlohmann::json echo{{"family", a.family},
                      {"B", a.B},
                      {"rho", ro.tol.rho},
                      {"eta", ro.tol.eta},
                      {"alpha", ro.tol.alpha},
                      {"C", ro.tol.C},
                      {"seeds", seeds},
                      {"max_iterations", ro.max_iterations}};
  if (fam == Family::dqp) {
    echo["n"] = a.n;
    echo["omega"] = a.omega;
    echo["dqp_rhs"] = a.rhs;
  } else {
    echo["m"] = a.m;
  }
  std::vector<std::string> tags;
  for (const auto& s : algs) tags.push_back(s.tag);
  echo["algorithms"] = tags;
  out << "config: " << echo.dump() << '\n';

  std::vector<RunRecord> recs = run_experiment(grid, algs, ro);
  if (!a.out.empty()) {
    std::ofstream os(a.out);
    if (!os) throw InvalidArgumentError("cannot open " + a.out);
    write_csv(os, recs);
  } else {
    write_csv(out, recs);
  }
  out << emit_table(recs);
  return kExitOk;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  ProblemInstance inst = load_instance_file(a.instance);
  StoredCertificate sc = load_certificate_file(a.certificate);
  ToleranceConfig tol;
  tol.rho = a.rho.value_or(sc.rho);
  tol.eta = a.eta.value_or(sc.eta);
  tol.alpha = std::max(tol.alpha, tol.rho * tol.rho);
  tol.C = std::max(tol.C, tol.rho);
  StationarityReport rep = check_rho_eta_stationary(inst, sc.cert, tol);
  bool ok;
  if (sc.criterion == StopCriterion::absolute) {
    ok = rep.stationary();
  } else {
    if (!sc.x0) throw InvalidArgumentError("relative certificate lacks its reference point");
    ok = rep.inclusion_ok && relative_error_ok(inst, sc.cert, *sc.x0, tol.rho, tol.eta);
  }
  out << "criterion: " << to_string(sc.criterion) << '\n';
  out << "inclusion gap: " << format_double(rep.inclusion_gap) << (rep.inclusion_ok ? " ok" : " FAIL") << '\n';
  out << "residual: " << format_double(rep.residual_sq) << '\n';
  out << "feasibility: " << format_double(rep.feasibility) << '\n';
  if (rep.range_checked) {
    out << "multiplier range defect: " << format_double(rep.range_defect) << (rep.range_ok ? " ok" : " FAIL")
        << '\n';
  }
  out << (ok ? "verified\n" : "rejected\n");
  return ok ? kExitOk : kExitRejected;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive proximal ADMM solver and benchmark runner"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* g = app.add_subcommand("generate", "write a benchmark instance to a file");
  g->add_option("--family", gen.family)->check(CLI::IsMember({"dqp", "qpbc"}))->capture_default_str();
  g->add_option("--B", gen.B, "block count (dqp default 3, qpbc default 10)");
  g->add_option("--n", gen.n, "dqp block size")->check(CLI::PositiveNumber)->capture_default_str();
  g->add_option("--m", gen.m, "qpbc constraint count")->check(CLI::PositiveNumber)->capture_default_str();
  g->add_option("--omega", gen.omega, "dqp box radius")->check(CLI::PositiveNumber)->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--rhs", gen.rhs, "dqp witness: blocks equal (b = 0) or uniform")
      ->check(CLI::IsMember({"consensus", "random"}))
      ->capture_default_str();
  g->add_option("--out", gen.out, "instance path")->required();

  SolveArgs sol;
  CLI::App* s = app.add_subcommand("solve", "solve a stored instance and write a certificate");
  s->add_option("--instance", sol.instance)->required()->check(CLI::ExistingFile);
  s->add_option("--algo", sol.algo)->check(CLI::IsMember({"aadmm", "sadmm", "dp"}))->capture_default_str();
  s->add_option("--mode", sol.mode)->check(CLI::IsMember({"fixed", "adaptive"}))->capture_default_str();
  sol.tol.add(s);
  s->add_option("--cap-c0", sol.c0, "initial penalty (aadmm) or fixed penalty (sadmm)")->check(CLI::PositiveNumber);
  s->add_option("--gamma0", sol.gamma0, "initial stepsize on every block")->check(CLI::PositiveNumber);
  s->add_option("--theta", sol.theta, "dp damping")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  s->add_option("--chi", sol.chi, "dp dual stepsize")->check(CLI::PositiveNumber)->capture_default_str();
  s->add_option("--lambda", sol.lambda, "dp prox stepsize")->check(CLI::PositiveNumber)->capture_default_str();
  s->add_option("--penalty", sol.penalty, "dp penalty")->check(CLI::PositiveNumber)->capture_default_str();
  s->add_option("--criterion", sol.criterion)->check(CLI::IsMember({"absolute", "relative"}))->capture_default_str();
  s->add_option("--trace", sol.trace, "per-iteration CSV");
  s->add_option("--calls", sol.calls, "per-call CSV (aadmm)");
  s->add_option("--out", sol.out, "certificate path")->capture_default_str();
  s->add_flag("--verify-internal", sol.verify_internal, "recompute Lagrangian values from scratch");

  BenchArgs ben;
  CLI::App* b = app.add_subcommand("bench", "run a benchmark grid");
  b->add_option("--family", ben.family)->check(CLI::IsMember({"dqp", "qpbc"}))->capture_default_str();
  b->add_option("--n", ben.n, "dqp block sizes");
  b->add_option("--omega", ben.omega, "dqp box radii");
  b->add_option("--B", ben.B, "block counts");
  b->add_option("--m", ben.m, "qpbc constraint counts");
  b->add_option("--seed", ben.seed, "first seed")->capture_default_str();
  b->add_option("--seeds", ben.seeds, "number of consecutive seeds")->check(CLI::PositiveNumber)->capture_default_str();
  b->add_option("--algos", ben.algos, "algorithm tags to run");
  b->add_option("--rhs", ben.rhs, "dqp witness: blocks equal (b = 0) or uniform")
      ->check(CLI::IsMember({"consensus", "random"}))
      ->capture_default_str();
  b->add_option("--config", ben.config, "grid document (JSON)")->check(CLI::ExistingFile);
  b->add_option("--out", ben.out, "CSV path (default: standard output)");
  b->add_option("--jobs", ben.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  b->add_option("--max-iterations", ben.max_iterations)->check(CLI::PositiveNumber)->capture_default_str();
  b->add_flag("--wall-time", ben.wall_time, "record wall-clock times in the CSV");
  ben.tol.add(b);

  VerifyArgs ver;
  CLI::App* v = app.add_subcommand("verify", "check a stored certificate against an instance");
  v->add_option("--instance", ver.instance)->required()->check(CLI::ExistingFile);
  v->add_option("--certificate", ver.certificate)->required()->check(CLI::ExistingFile);
  v->add_option("--rho", ver.rho)->check(CLI::PositiveNumber);
  v->add_option("--eta", ver.eta)->check(CLI::PositiveNumber);

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_generate(gen, out);
    if (s->parsed()) return cmd_solve(sol, out);
    if (b->parsed()) return cmd_bench(ben, out);
    if (v->parsed()) return cmd_verify(ver, out);
  } catch (const InvalidArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace badmm
