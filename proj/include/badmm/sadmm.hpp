#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "badmm/ipp.hpp"

namespace badmm {

enum class StepsizeMode { fixed, adaptive };

const char* to_string(StepsizeMode m);
StepsizeMode parse_stepsize_mode(const std::string& s);

/// What an observer sees after each S-ADMM iteration.
struct SadmmIteration {
  long i = 0;
  int k = 0;  // epochs completed so far
  double v_sq = 0.0;
  double delta = 0.0;
  double T = 0.0;
  double T_prev = 0.0;
  double feasibility = 0.0;
  double c = 0.0;
  bool multiplier_updated = false;
  bool terminated = false;
  const BlockVector* y_prev = nullptr;
  const Vec* q_prev = nullptr;
  const Vec* q = nullptr;
  const IppOutput* sweep = nullptr;
};

struct TraceRow {
  long i = 0;
  int k = 0;
  double v_sq = 0.0;
  double delta = 0.0;
  double T = 0.0;
  double feasibility = 0.0;
  double c = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

struct SadmmOptions {
  ToleranceConfig tol;
  std::optional<double> stop_rho;  // used instead of tol.rho in the termination test
  StepsizeMode mode = StepsizeMode::adaptive;
  long max_iterations = 500000;
  IppOptions ipp;
  bool record_trace = false;
  bool verify = false;
  std::function<void(const SadmmIteration&)> observer;
};

struct SadmmResult {
  BlockVector y;
  Vec q;
  BlockVector v;
  double delta = 0.0;
  std::vector<double> lambda;
  long iterations = 0;
  int epochs = 0;
  std::vector<long> epoch_ends;
  double T = 0.0;
  std::vector<TraceRow> trace;
};

SadmmResult s_admm(const ProblemInstance& inst, const BlockVector& y0, const Vec& q0,
                   const std::vector<double>& lambda0, double c, const SadmmOptions& opts);

double potential_update(double T_prev, double L_before, double L_after);

struct TheoryConstants {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double kappaC = 0.0;
  double Gamma = 0.0;
  double epoch_bound = 0.0;
  double multiplier_bound = 0.0;
};

// Needs complete metadata; throws MetadataIncompleteError otherwise.
TheoryConstants theory_constants(const ProblemInstance& inst, double c, const ToleranceConfig& tol,
                                 const BlockVector& y0, const Vec& q0);

// [2 D M + (2 D + 1)(C + C^2 + grad_bound)] / (d_bar nu_plus)
double kappa_of(const Metadata& md, double C);

// lambda_t = 1 / (2 m_t)
std::vector<double> theory_stepsizes(const Metadata& md);

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);

}  // namespace badmm
