#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "badmm/errors.hpp"
#include "badmm/instance_io.hpp"
#include "badmm/sadmm.hpp"

namespace badmm {

struct AadmmConfig {
  ToleranceConfig tol;
  // Empty: 1/(2 m_t) in fixed mode (needs metadata), 1 in adaptive mode.
  std::vector<double> gamma0;
  std::optional<double> c0;
  StepsizeMode mode = StepsizeMode::adaptive;
  int max_outer = 60;
  long max_iterations = 500000;  // S-ADMM iterations summed over all calls
  StopCriterion stop = StopCriterion::absolute;
  IppOptions ipp;
  bool verify = false;
  bool record_chain = false;
  std::function<void(int ell, const SadmmIteration&)> observer;
};

struct OuterCall {
  int ell = 0;
  double c = 0.0;  // penalty used by this call, c_{ell-1}
  long inner_iterations = 0;
  int epochs = 0;
  double feasibility = 0.0;
  double residual = 0.0;  // ||v||^2 + eps
  double wall_ms = 0.0;
  // Filled with record_chain.
  std::optional<BlockVector> x_in, x_out;
  std::optional<Vec> p_in, p_out;
  std::vector<double> gamma_in, gamma_out;
};

struct AadmmResult {
  Certificate cert;
  std::vector<OuterCall> calls;
  long total_iterations = 0;
  double c0 = 0.0;
  double c_final = 0.0;  // penalty of the last call
  std::vector<double> gamma;
  EffectiveTolerance effective{0.0, 0.0};
};

class AadmmNonconvergence : public NonconvergenceError {
 public:
  AadmmNonconvergence(const std::string& what, std::vector<OuterCall> calls, long iterations)
      : NonconvergenceError(what), calls_(std::move(calls)), iterations_(iterations) {}
  const std::vector<OuterCall>& calls() const { return calls_; }
  long iterations() const { return iterations_; }

 private:
  std::vector<OuterCall> calls_;
  long iterations_;
};

double default_c0(const ProblemInstance& inst, const BlockVector& x0);

AadmmResult a_admm(const ProblemInstance& inst, const BlockVector& x0, const AadmmConfig& cfg);

void write_calls_csv(std::ostream& os, const std::vector<OuterCall>& calls);

struct BaselineConfig {
  double theta = 0.0;
  double chi = 1.0;
  double lambda = 0.5;
  double c = 1.0;
  long max_iterations = 500000;

  void validate() const;
};

struct BaselineResult {
  Certificate cert;
  long iterations = 0;
  bool converged = false;
  EffectiveTolerance effective{0.0, 0.0};
};

BaselineResult dp_baseline(const ProblemInstance& inst, const BlockVector& x0, const BaselineConfig& cfg,
                           const ToleranceConfig& tol, StopCriterion stop, const IppOptions& ipp = {});

}  // namespace badmm
