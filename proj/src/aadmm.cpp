#include "badmm/aadmm.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <string>

#include "badmm/errors.hpp"
#include "badmm/format.hpp"

namespace badmm {

namespace {

EffectiveTolerance effective_tolerance(const ProblemInstance& inst, const BlockVector& x0, const ToleranceConfig& tol,
                                       StopCriterion stop) {
  if (stop == StopCriterion::relative) return relative_to_absolute(inst, x0, tol.rho, tol.eta);
  return {tol.rho, tol.eta};
}

}  // namespace

double default_c0(const ProblemInstance& inst, const BlockVector& x0) {
  return 1.0 / (1.0 + inst.constraint_residual(x0).norm());
}

AadmmResult a_admm(const ProblemInstance& inst, const BlockVector& x0, const AadmmConfig& cfg) {
  cfg.tol.validate();
  inst.check_point(x0);
  if (!inst.in_domain(x0)) throw OutOfDomainError("a_admm: initial point lies outside the domain");

  std::vector<double> gamma = cfg.gamma0;
  if (gamma.empty()) {
    if (cfg.mode == StepsizeMode::fixed) {
      if (!inst.metadata()) throw MetadataIncompleteError("fixed mode without stepsizes needs metadata");
      gamma = theory_stepsizes(*inst.metadata());
    } else {
      gamma.assign(static_cast<size_t>(inst.count()), 1.0);
    }
  }
  if (static_cast<Index>(gamma.size()) != inst.count()) throw ShapeError("one initial stepsize per block is required");
  for (double g : gamma) {
    if (!(g > 0.0)) throw InvalidArgumentError("initial stepsizes must be positive");
  }

  AadmmResult res;
  res.effective = effective_tolerance(inst, x0, cfg.tol, cfg.stop);
  res.c0 = cfg.c0 ? *cfg.c0 : default_c0(inst, x0);
  if (!(res.c0 > 0.0)) throw InvalidArgumentError("initial penalty must be positive");

  SadmmOptions sopts;
  sopts.tol = cfg.tol;
  sopts.stop_rho = res.effective.rho;
  sopts.mode = cfg.mode;
  sopts.ipp = cfg.ipp;
  if (!sopts.ipp.structure) sopts.ipp.structure = analyze_blocks(inst);
  sopts.verify = cfg.verify;

  BlockVector x = x0;
  Vec p = Vec::Zero(inst.map().rows());
  double c = res.c0;
  for (int ell = 1; ell <= cfg.max_outer; ++ell) {
    long budget = cfg.max_iterations - res.total_iterations;
    if (budget <= 0) break;
    sopts.max_iterations = budget;
    if (cfg.observer) {
      sopts.observer = [&cfg, ell](const SadmmIteration& it) { cfg.observer(ell, it); };
    }
    OuterCall call;
    call.ell = ell;
    call.c = c;
    if (cfg.record_chain) {
      call.x_in = x;
      call.p_in = p;
      call.gamma_in = gamma;
    }
    auto start = std::chrono::steady_clock::now();
    SadmmResult sr;
    try {
      sr = s_admm(inst, x, p, gamma, c, sopts);
    } catch (const NonconvergenceError& e) {
      res.calls.push_back(call);
      throw AadmmNonconvergence(std::string("a_admm: ") + e.what(), res.calls, cfg.max_iterations);
    }
    auto stop = std::chrono::steady_clock::now();
    call.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    call.inner_iterations = sr.iterations;
    call.epochs = sr.epochs;
    call.feasibility = inst.constraint_residual(sr.y).norm();
    call.residual = sr.v.squared_norm() + sr.delta;
    if (cfg.record_chain) {
      call.x_out = sr.y;
      call.p_out = sr.q;
      call.gamma_out = sr.lambda;
    }
    res.total_iterations += sr.iterations;
    res.calls.push_back(call);

    x = sr.y;
    p = sr.q;
    gamma = sr.lambda;
    res.c_final = c;
    if (call.feasibility <= res.effective.eta) {
      res.cert = polish_certificate(inst, {std::move(sr.y), std::move(sr.q), std::move(sr.v), sr.delta},
                                    res.effective.rho);
      res.gamma = std::move(gamma);
      return res;
    }
    c *= 2.0;
  }
  throw AadmmNonconvergence("a_admm: no feasible certificate within the outer or iteration cap", res.calls,
                            res.total_iterations);
}

void write_calls_csv(std::ostream& os, const std::vector<OuterCall>& calls) {
  os << "ell,c,inner_iterations,feasibility,residual,wall_ms\n";
  for (const OuterCall& c : calls) {
    os << c.ell << ',' << format_double(c.c) << ',' << c.inner_iterations << ',' << format_double(c.feasibility)
       << ',' << format_double(c.residual) << ',' << format_double(c.wall_ms) << '\n';
  }
}

void BaselineConfig::validate() const {
  if (!(theta >= 0.0 && theta < 1.0)) throw InvalidArgumentError("theta must lie in [0, 1)");
  if (!(chi > 0.0)) throw InvalidArgumentError("chi must be positive");
  if (!(lambda > 0.0)) throw InvalidArgumentError("baseline stepsize must be positive");
  if (!(c > 0.0)) throw InvalidArgumentError("baseline penalty must be positive");
}

BaselineResult dp_baseline(const ProblemInstance& inst, const BlockVector& x0, const BaselineConfig& cfg,
                           const ToleranceConfig& tol, StopCriterion stop, const IppOptions& ipp_in) {
  cfg.validate();
  tol.validate();
  inst.check_point(x0);
  if (!inst.in_domain(x0)) throw OutOfDomainError("dp_baseline: initial point lies outside the domain");
  IppOptions ipp = ipp_in;
  if (!ipp.structure) ipp.structure = analyze_blocks(inst);

  BaselineResult res;
  res.effective = effective_tolerance(inst, x0, tol, stop);
  const double rho_sq = res.effective.rho * res.effective.rho;
  std::vector<double> lambda(static_cast<size_t>(inst.count()), cfg.lambda);
  BlockVector x = x0;
  Vec p = Vec::Zero(inst.map().rows());
  BlockVector last_v(inst.sizes());
  double last_delta = 0.0;
  for (long k = 1; k <= cfg.max_iterations; ++k) {
    Vec damped = (1.0 - cfg.theta) * p;
    IppOutput out = b_ipp(inst, x, damped, lambda, cfg.c, ipp);
    res.iterations = k;
    double feas = out.residual.norm();
    double resid = out.v_plus.squared_norm() + out.delta_plus;
    if (resid <= rho_sq && feas <= res.effective.eta) {
      res.cert = polish_certificate(
          inst, {std::move(out.z_plus), damped + cfg.c * out.residual, std::move(out.v_plus), out.delta_plus},
          res.effective.rho);
      res.converged = true;
      return res;
    }
    p = damped + cfg.chi * cfg.c * out.residual;
    x = std::move(out.z_plus);
    last_v = std::move(out.v_plus);
    last_delta = out.delta_plus;
    if (!std::isfinite(p.squaredNorm()) || !std::isfinite(resid)) break;
  }
  // Last iterate, kept for reporting.
  res.cert = {x, p, std::move(last_v), last_delta};
  res.converged = false;
  return res;
}

}  // namespace badmm
