#include "badmm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "badmm/errors.hpp"
#include "badmm/format.hpp"
#include "badmm/rng.hpp"

namespace badmm {

namespace {

constexpr std::uint64_t kDqpTag = 0x647170;   // "dqp"
constexpr std::uint64_t kQpbcTag = 0x71706263;  // "qpbc"

Vec uniform_vec(SplitMix64& rng, Index n, double lo, double hi) {
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

std::vector<TermPtr> boxes(const BlockSizes& sizes, double omega) {
  std::vector<TermPtr> terms;
  for (Index t = 0; t < sizes.count(); ++t) terms.push_back(std::make_shared<BoxIndicator>(sizes.size(t), omega));
  return terms;
}

}  // namespace

std::string to_string(DqpRhs r) { return r == DqpRhs::consensus ? "consensus" : "random"; }

DqpRhs parse_dqp_rhs(const std::string& s) {
  if (s == "consensus") return DqpRhs::consensus;
  if (s == "random") return DqpRhs::random;
  throw InvalidArgumentError("unknown DQP right-hand side: " + s);
}

void DqpSpec::validate() const {
  if (B < 2) throw InvalidArgumentError("DQP needs at least two blocks");
  if (n < 1) throw InvalidArgumentError("DQP block size must be positive");
  if (!(omega > 0.0)) throw InvalidArgumentError("DQP box radius must be positive");
}

void QpbcSpec::validate() const {
  if (B < 1) throw InvalidArgumentError("QP-BC needs at least one variable");
  if (m < 1 || m >= B) throw InvalidArgumentError("QP-BC needs 1 <= m < B");
}

ProblemInstance gen_dqp(const DqpSpec& spec) {
  spec.validate();
  SplitMix64 rng = SplitMix64::stream(spec.seed, kDqpTag);
  const Index B = spec.B, n = spec.n, N = B * n, rows = (B - 1) * n;
  BlockSizes sizes = BlockSizes::uniform(B, n);

  Vec d = Vec::Zero(N), r = Vec::Zero(N);
  for (Index i = 0; i + 1 < B; ++i) d.segment(i * n, n).setConstant(-rng.uniform());
  for (Index i = 0; i + 1 < B; ++i) r.segment(i * n, n) = -uniform_vec(rng, n, 0.0, 1.0);
  Vec xb;
  if (spec.rhs == DqpRhs::consensus) {
    xb = uniform_vec(rng, n, -spec.omega, spec.omega).replicate(B, 1);
  } else {
    xb = uniform_vec(rng, N, -spec.omega, spec.omega);
  }
  Vec x0 = uniform_vec(rng, N, -spec.omega, spec.omega);

  std::vector<Mat> blocks;
  for (Index i = 0; i + 1 < B; ++i) {
    Mat a = Mat::Zero(rows, n);
    a.middleRows(i * n, n).setIdentity();
    blocks.push_back(std::move(a));
  }
  Mat last(rows, n);
  for (Index i = 0; i + 1 < B; ++i) last.middleRows(i * n, n) = -Mat::Identity(n, n);
  blocks.push_back(std::move(last));

  BlockLinearMap map(std::move(blocks));
  BlockVector xbv(sizes, xb);
  Vec b = map.apply(xbv);
  ProblemInstance inst(QuadraticOracle::diagonal(sizes, d, r), boxes(sizes, spec.omega), std::move(map), b);
  inst.set_witness(std::move(xbv));
  inst.set_initial_point(BlockVector(sizes, x0));
  inst.set_metadata(derive_metadata(inst));
  return inst;
}

ProblemInstance gen_qpbc(const QpbcSpec& spec) {
  spec.validate();
  SplitMix64 rng = SplitMix64::stream(spec.seed, kQpbcTag);
  const Index B = spec.B, m = spec.m;
  BlockSizes sizes = BlockSizes::uniform(B, 1);

  Vec D = uniform_vec(rng, B, 1.0, 1000.0);
  Mat Q(B, B);
  for (Index i = 0; i < B; ++i) {
    for (Index j = 0; j < B; ++j) Q(i, j) = rng.uniform(-1.0, 1.0);
  }
  Mat At(m, B);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < B; ++j) At(i, j) = rng.uniform(-1.0, 1.0);
  }
  Vec rt = uniform_vec(rng, B, -1.0, 1.0);
  Vec xb = uniform_vec(rng, B, -1.0, 1.0);
  Vec x0 = uniform_vec(rng, B, -1.0, 1.0);

  Mat QQ = Q * Q.transpose();
  QQ = 0.5 * (QQ + QQ.transpose());
  Mat Pt = -(QQ / spectral_norm(QQ) + 1e-3 * Mat::Identity(B, B));
  double biggest = Pt.cwiseAbs().maxCoeff();
  if (biggest > 1.0) Pt /= biggest;

  Mat P = D.asDiagonal() * Pt * D.asDiagonal();
  P = 0.5 * (P + P.transpose());
  Mat A = At * D.asDiagonal();
  Vec r = D.cwiseProduct(rt);

  std::vector<Mat> blocks;
  for (Index j = 0; j < B; ++j) blocks.push_back(A.col(j));
  BlockLinearMap map(std::move(blocks));
  BlockVector xbv(sizes, xb);
  Vec b = map.apply(xbv);
  ProblemInstance inst(std::make_shared<QuadraticOracle>(sizes, P, r), boxes(sizes, 1.0), std::move(map), b);
  inst.set_witness(std::move(xbv));
  inst.set_initial_point(BlockVector(sizes, x0));
  inst.set_metadata(derive_metadata(inst));
  return inst;
}

const char* to_string(Family f) { return f == Family::dqp ? "dqp" : "qpbc"; }

Family parse_family(const std::string& s) {
  if (s == "dqp") return Family::dqp;
  if (s == "qpbc") return Family::qpbc;
  throw InvalidArgumentError("unknown problem family: " + s);
}

ProblemInstance ExperimentCase::generate() const { return family == Family::dqp ? gen_dqp(dqp) : gen_qpbc(qpbc); }

ExperimentGrid ExperimentGrid::dqp(const std::vector<int>& ns, const std::vector<double>& omegas,
                                   const std::vector<std::uint64_t>& seeds, int B, DqpRhs rhs) {
  ExperimentGrid g;
  for (int n : ns) {
    for (double w : omegas) {
      for (std::uint64_t s : seeds) {
        ExperimentCase ec;
        ec.family = Family::dqp;
        ec.dqp = {B, n, w, s, rhs};
        g.cases.push_back(ec);
      }
    }
  }
  return g;
}

ExperimentGrid ExperimentGrid::qpbc(const std::vector<int>& Bs, const std::vector<int>& ms,
                                    const std::vector<std::uint64_t>& seeds) {
  ExperimentGrid g;
  for (int B : Bs) {
    for (int m : ms) {
      if (m >= B) continue;
      for (std::uint64_t s : seeds) {
        ExperimentCase ec;
        ec.family = Family::qpbc;
        ec.qpbc = {B, m, s};
        g.cases.push_back(ec);
      }
    }
  }
  return g;
}

std::vector<AlgorithmSpec> default_algorithms(Family f) {
  std::vector<AlgorithmSpec> algs;
  auto ad = [](const std::string& tag, double c0, double gamma) {
    AlgorithmSpec a;
    a.tag = tag;
    a.kind = AlgorithmKind::aadmm;
    a.aadmm.c0 = c0;
    a.aadmm.mode = StepsizeMode::adaptive;
    a.gamma_all = gamma;
    return a;
  };
  auto dp = [](const std::string& tag, double theta, double chi, double c) {
    AlgorithmSpec a;
    a.tag = tag;
    a.kind = AlgorithmKind::dp;
    a.baseline = {theta, chi, 0.5, c, 500000};
    return a;
  };
  if (f == Family::dqp) {
    algs.push_back(ad("AD", 1.0, 10.0));
    algs.push_back(dp("DP1", 0.0, 1.0, 1.0));
    algs.push_back(dp("DP2", 0.5, 1.0 / 18.0, 1.0));
  } else {
    algs.push_back(ad("AD1", 10.0, 1000.0));
    algs.push_back(ad("AD2", 1.0, 1000.0));
    algs.push_back(ad("AD3", 0.1, 1000.0));
    algs.push_back(dp("DP1", 0.0, 1.0, 10.0));
    algs.push_back(dp("DP2", 0.0, 1.0, 1.0));
    algs.push_back(dp("DP3", 0.0, 1.0, 0.1));
  }
  return algs;
}

RunRecord run_case(const ExperimentCase& ec, const AlgorithmSpec& alg, const RunOptions& opts) {
  RunRecord rec;
  rec.algorithm = alg.tag;
  rec.family = to_string(ec.family);
  rec.B = ec.B();
  rec.n_or_m = ec.n_or_m();
  rec.omega = ec.omega();
  rec.seed = ec.seed();
  rec.final_resid_sq = std::nan("");
  rec.final_feas = std::nan("");

  const StopCriterion stop = ec.family == Family::dqp ? StopCriterion::absolute : StopCriterion::relative;
  auto start = std::chrono::steady_clock::now();
  try {
    ProblemInstance inst = ec.generate();
    const BlockVector& x0 = *inst.initial_point();
    std::optional<Certificate> cert;

    std::vector<double> gamma = alg.aadmm.gamma0;
    if (gamma.empty() && alg.gamma_all) gamma.assign(static_cast<size_t>(inst.count()), *alg.gamma_all);

    if (alg.kind == AlgorithmKind::aadmm) {
      AadmmConfig cfg = alg.aadmm;
      cfg.tol = opts.tol;
      cfg.stop = stop;
      cfg.gamma0 = gamma;
      cfg.max_iterations = opts.max_iterations;
      try {
        AadmmResult r = a_admm(inst, x0, cfg);
        rec.iterations = r.total_iterations;
        for (const OuterCall& c : r.calls) rec.penalty_trace.push_back(c.c);
        cert = std::move(r.cert);
      } catch (const AadmmNonconvergence& e) {
        rec.iterations = e.iterations();
        for (const OuterCall& c : e.calls()) rec.penalty_trace.push_back(c.c);
        rec.note = e.what();
      }
    } else if (alg.kind == AlgorithmKind::sadmm) {
      SadmmOptions so;
      so.tol = opts.tol;
      so.mode = alg.aadmm.mode;
      so.max_iterations = opts.max_iterations;
      EffectiveTolerance eff = stop == StopCriterion::relative
                                   ? relative_to_absolute(inst, x0, opts.tol.rho, opts.tol.eta)
                                   : EffectiveTolerance{opts.tol.rho, opts.tol.eta};
      so.stop_rho = eff.rho;
      if (gamma.empty()) {
        gamma = alg.aadmm.mode == StepsizeMode::fixed ? theory_stepsizes(*inst.metadata())
                                                      : std::vector<double>(static_cast<size_t>(inst.count()), 1.0);
      }
      double c = alg.aadmm.c0.value_or(default_c0(inst, x0));
      rec.penalty_trace.push_back(c);
      try {
        SadmmResult r = s_admm(inst, x0, Vec::Zero(inst.map().rows()), gamma, c, so);
        rec.iterations = r.iterations;
        if (inst.constraint_residual(r.y).norm() <= eff.eta) {
          cert = polish_certificate(inst, {std::move(r.y), std::move(r.q), std::move(r.v), r.delta}, eff.rho);
        } else {
          rec.note = "s_admm stopped before reaching feasibility";
          rec.final_resid_sq = r.v.squared_norm() + r.delta;
          rec.final_feas = inst.constraint_residual(r.y).norm();
        }
      } catch (const NonconvergenceError& e) {
        rec.iterations = opts.max_iterations;
        rec.note = e.what();
      }
    } else {
      BaselineResult r = dp_baseline(inst, x0, alg.baseline, opts.tol, stop);
      rec.iterations = r.iterations;
      rec.penalty_trace.push_back(alg.baseline.c);
      if (r.converged) {
        cert = std::move(r.cert);
      } else {
        rec.note = "iteration cap reached";
        rec.final_feas = inst.constraint_residual(r.cert.x).norm();
        rec.final_resid_sq = r.cert.v.squared_norm() + r.cert.eps;
      }
    }

    if (cert) {
      rec.final_resid_sq = cert->v.squared_norm() + cert->eps;
      rec.final_feas = inst.constraint_residual(cert->x).norm();
      bool ok;
      if (stop == StopCriterion::absolute) {
        ok = check_rho_eta_stationary(inst, *cert, opts.tol).stationary();
      } else {
        StationarityReport rep = check_rho_eta_stationary(inst, *cert, opts.tol);
        ok = rep.inclusion_ok && relative_error_ok(inst, *cert, x0, opts.tol.rho, opts.tol.eta);
      }
      if (ok) {
        rec.converged = true;
        rec.cert = std::move(cert);
      } else {
        rec.note = "certificate rejected by the independent check";
      }
    }
  } catch (const std::exception& e) {
    rec.converged = false;
    rec.note = e.what();
  }
  auto stop_time = std::chrono::steady_clock::now();
  if (opts.wall_time) rec.time_ms = std::chrono::duration<double, std::milli>(stop_time - start).count();
  return rec;
}

std::vector<RunRecord> run_experiment(const ExperimentGrid& grid, const std::vector<AlgorithmSpec>& algorithms,
                                      const RunOptions& opts) {
  const size_t nalg = algorithms.size();
  const size_t total = grid.cases.size() * nalg;
  std::vector<RunRecord> out(total);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t k = next++; k < total; k = next++) {
      out[k] = run_case(grid.cases[k / nalg], algorithms[k % nalg], opts);
    }
  };
  int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return out;
}

void write_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << kCsvHeader << '\n';
  for (const RunRecord& r : records) {
    os << r.algorithm << ',' << r.family << ',' << r.B << ',' << r.n_or_m << ',' << format_double(r.omega) << ','
       << r.seed << ',' << r.iterations << ',' << (r.time_ms ? format_double(*r.time_ms) : "na") << ','
       << (r.converged ? 1 : 0) << ',' << format_double(r.final_resid_sq) << ',' << format_double(r.final_feas)
       << '\n';
  }
}

std::vector<RunRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw InvalidArgumentError("CSV header does not match");
  std::vector<RunRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw InvalidArgumentError("CSV row has " + std::to_string(f.size()) + " fields");
    RunRecord r;
    try {
      r.algorithm = f[0];
      r.family = f[1];
      r.B = std::stoi(f[2]);
      r.n_or_m = std::stoi(f[3]);
      r.omega = parse_double(f[4]);
      r.seed = std::stoull(f[5]);
      r.iterations = std::stol(f[6]);
      if (f[7] != "na") r.time_ms = parse_double(f[7]);
      r.converged = f[8] == "1";
      r.final_resid_sq = parse_double(f[9]);
      r.final_feas = parse_double(f[10]);
    } catch (const std::logic_error&) {
      throw InvalidArgumentError("malformed CSV row: " + line);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string emit_table(const std::vector<RunRecord>& records) {
  if (records.empty()) throw InvalidArgumentError("emit_table needs at least one record");
  using Key = std::tuple<std::string, int, int, std::string, std::uint64_t>;
  std::vector<Key> rows;
  std::vector<std::string> algs;
  std::map<std::pair<Key, std::string>, const RunRecord*> cell;
  bool any_dqp = false, any_time = false;
  for (const RunRecord& r : records) {
    Key k{r.family, r.B, r.n_or_m, format_double(r.omega), r.seed};
    if (std::find(rows.begin(), rows.end(), k) == rows.end()) rows.push_back(k);
    if (std::find(algs.begin(), algs.end(), r.algorithm) == algs.end()) algs.push_back(r.algorithm);
    cell[{k, r.algorithm}] = &r;
    any_dqp = any_dqp || r.family == "dqp";
    any_time = any_time || r.time_ms.has_value();
  }
  std::vector<std::string> extra;
  if (any_dqp) extra = {"SD1", "SD2", "SD3"};

  std::vector<std::string> header = {"family", "B", "n/m", "omega", "seed"};
  for (const auto& a : algs) header.push_back(a);
  for (const auto& a : extra) header.push_back(a);
  if (any_time) {
    for (const auto& a : algs) header.push_back("ms(" + a + ")");
  }

  std::vector<std::vector<std::string>> table{header};
  for (const Key& k : rows) {
    std::vector<std::string> line = {std::get<0>(k), std::to_string(std::get<1>(k)), std::to_string(std::get<2>(k)),
                                     std::get<3>(k), std::to_string(std::get<4>(k))};
    long best = -1;
    for (const auto& a : algs) {
      auto it = cell.find({k, a});
      if (it != cell.end() && it->second->converged && (best < 0 || it->second->iterations < best)) {
        best = it->second->iterations;
      }
    }
    for (const auto& a : algs) {
      auto it = cell.find({k, a});
      if (it == cell.end()) {
        line.push_back("-");
      } else if (!it->second->converged) {
        line.push_back("*");
      } else if (it->second->iterations == best) {
        line.push_back("[" + std::to_string(it->second->iterations) + "]");
      } else {
        line.push_back(std::to_string(it->second->iterations));
      }
    }
    for (size_t e = 0; e < extra.size(); ++e) line.push_back("n/a");
    if (any_time) {
      for (const auto& a : algs) {
        auto it = cell.find({k, a});
        if (it == cell.end() || !it->second->time_ms) {
          line.push_back("-");
        } else if (!it->second->converged) {
          line.push_back("*");
        } else {
          std::ostringstream ts;
          ts << std::fixed << std::setprecision(3) << *it->second->time_ms;
          line.push_back(ts.str());
        }
      }
    }
    table.push_back(std::move(line));
  }

  std::vector<size_t> width(header.size(), 0);
  for (const auto& line : table) {
    for (size_t j = 0; j < line.size(); ++j) width[j] = std::max(width[j], line[j].size());
  }
  std::ostringstream os;
  for (const auto& line : table) {
    for (size_t j = 0; j < line.size(); ++j) {
      if (j) os << "  ";
      os << std::setw(static_cast<int>(width[j])) << line[j];
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace badmm
