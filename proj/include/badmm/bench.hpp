#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "badmm/aadmm.hpp"

namespace badmm {

enum class DqpRhs {
  consensus,  // witness has equal blocks, so b = 0
  random,     // witness uniform over the whole box
};
std::string to_string(DqpRhs r);
DqpRhs parse_dqp_rhs(const std::string& s);

struct DqpSpec {
  int B = 3;
  int n = 10;
  double omega = 10.0;
  std::uint64_t seed = 0;
  DqpRhs rhs = DqpRhs::consensus;

  void validate() const;
};

struct QpbcSpec {
  int B = 10;
  int m = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Instances carry their witness x_b, start point x0 and derived metadata.
ProblemInstance gen_dqp(const DqpSpec& spec);
ProblemInstance gen_qpbc(const QpbcSpec& spec);

enum class Family { dqp, qpbc };
const char* to_string(Family f);
Family parse_family(const std::string& s);

struct ExperimentCase {
  Family family = Family::dqp;
  DqpSpec dqp;
  QpbcSpec qpbc;

  ProblemInstance generate() const;
  int B() const { return family == Family::dqp ? dqp.B : qpbc.B; }
  int n_or_m() const { return family == Family::dqp ? dqp.n : qpbc.m; }
  double omega() const { return family == Family::dqp ? dqp.omega : 1.0; }
  std::uint64_t seed() const { return family == Family::dqp ? dqp.seed : qpbc.seed; }
};

struct ExperimentGrid {
  std::vector<ExperimentCase> cases;

  static ExperimentGrid dqp(const std::vector<int>& ns, const std::vector<double>& omegas,
                            const std::vector<std::uint64_t>& seeds, int B = 3, DqpRhs rhs = DqpRhs::consensus);
  static ExperimentGrid qpbc(const std::vector<int>& Bs, const std::vector<int>& ms,
                             const std::vector<std::uint64_t>& seeds);
};

enum class AlgorithmKind { aadmm, sadmm, dp };

struct AlgorithmSpec {
  std::string tag;
  AlgorithmKind kind = AlgorithmKind::aadmm;
  AadmmConfig aadmm;  // also read by sadmm: gamma0, mode, c0 as the fixed penalty
  std::optional<double> gamma_all;  // same initial stepsize on every block
  BaselineConfig baseline;
};

// AD and DP configurations of the standard comparison for each family.
std::vector<AlgorithmSpec> default_algorithms(Family f);

struct RunRecord {
  std::string algorithm;
  std::string family;
  int B = 0;
  int n_or_m = 0;
  double omega = 0.0;
  std::uint64_t seed = 0;
  long iterations = 0;
  std::optional<double> time_ms;
  bool converged = false;
  double final_resid_sq = 0.0;
  double final_feas = 0.0;
  std::vector<double> penalty_trace;
  std::optional<Certificate> cert;
  std::string note;
};

struct RunOptions {
  ToleranceConfig tol;
  int jobs = 1;
  bool wall_time = false;  // wall-clock times make records nondeterministic
  long max_iterations = 500000;
};

RunRecord run_case(const ExperimentCase& ec, const AlgorithmSpec& alg, const RunOptions& opts);

// Records come back ordered by (case, algorithm) regardless of `jobs`.
std::vector<RunRecord> run_experiment(const ExperimentGrid& grid, const std::vector<AlgorithmSpec>& algorithms,
                                      const RunOptions& opts);

inline constexpr const char* kCsvHeader =
    "algorithm,family,B,n_or_m,omega,seed,iterations,time_ms,converged,final_resid_sq,final_feas";

void write_csv(std::ostream& os, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_csv(std::istream& is);

// Rows per instance, one iteration column per algorithm; "*" marks runs
// that did not converge and brackets mark the best entry of a row.
std::string emit_table(const std::vector<RunRecord>& records);

}  // namespace badmm
