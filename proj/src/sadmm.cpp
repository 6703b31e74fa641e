#include "badmm/sadmm.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "badmm/errors.hpp"
#include "badmm/format.hpp"

namespace badmm {

const char* to_string(StepsizeMode m) { return m == StepsizeMode::fixed ? "fixed" : "adaptive"; }

StepsizeMode parse_stepsize_mode(const std::string& s) {
  if (s == "fixed") return StepsizeMode::fixed;
  if (s == "adaptive") return StepsizeMode::adaptive;
  throw InvalidArgumentError("unknown stepsize mode: " + s);
}

double potential_update(double T_prev, double L_before, double L_after) { return T_prev + (L_before - L_after); }

SadmmResult s_admm(const ProblemInstance& inst, const BlockVector& y0, const Vec& q0,
                   const std::vector<double>& lambda0, double c, const SadmmOptions& opts) {
  opts.tol.validate();
  inst.check_point(y0);
  inst.check_multiplier(q0);
  if (static_cast<Index>(lambda0.size()) != inst.count()) throw ShapeError("one stepsize per block is required");
  if (!(c > 0.0)) throw InvalidArgumentError("penalty parameter must be positive");
  const double rho = opts.stop_rho.value_or(opts.tol.rho);
  const double rho_sq = rho * rho;
  const double base_rho_sq = opts.tol.rho * opts.tol.rho;
  const double C_sq = opts.tol.C * opts.tol.C;

  IppOptions ipp = opts.ipp;
  if (!ipp.structure) ipp.structure = analyze_blocks(inst);
  ipp.verify = ipp.verify || opts.verify;

  SadmmResult res;
  BlockVector y = y0;
  Vec q = q0;
  std::vector<double> lambda = lambda0;
  double T = 0.0;
  int k = 0;

  for (long i = 1; i <= opts.max_iterations; ++i) {
    IppOutput out = opts.mode == StepsizeMode::fixed ? b_ipp(inst, y, q, lambda, c, ipp)
                                                     : ab_ipp(inst, y, q, lambda, c, ipp);
    double v_sq = out.v_plus.squared_norm();
    double resid = v_sq + out.delta_plus;
    double feas = out.residual.norm();

    SadmmIteration info;
    info.i = i;
    info.v_sq = v_sq;
    info.delta = out.delta_plus;
    info.T_prev = T;
    info.feasibility = feas;
    info.c = c;
    info.y_prev = &y;
    info.q_prev = &q;
    info.sweep = &out;

    Vec q_next = q;
    bool done = resid <= rho_sq;
    if (done) {
      q_next = q + c * out.residual;
      info.multiplier_updated = true;
      info.terminated = true;
      info.T = T;
    } else {
      double T_new = potential_update(T, out.drop, 0.0);
      if (opts.verify) {
        double before = augmented_lagrangian(inst, y, q, c);
        double after = augmented_lagrangian(inst, out.z_plus, q, c);
        double scale = std::max({1.0, std::abs(before), std::abs(after)});
        if (std::abs((before - after) - out.drop) > 1e-10 * scale) {
          throw InvariantViolation("s_admm: potential increment disagrees with a direct evaluation");
        }
      }
      T = T_new;
      info.T = T;
      if (resid <= C_sq && base_rho_sq / (opts.tol.alpha * (k + 1)) >= T / static_cast<double>(i)) {
        ++k;
        res.epoch_ends.push_back(i);
        q_next = q + c * out.residual;
        info.multiplier_updated = true;
      }
    }
    info.k = k;
    info.q = &q_next;
    if (opts.observer) opts.observer(info);
    if (opts.record_trace) {
      auto [mn, mx] = std::minmax_element(out.lambda_plus.begin(), out.lambda_plus.end());
      res.trace.push_back({i, k, v_sq, out.delta_plus, T, feas, c, *mn, *mx});
    }

    y = std::move(out.z_plus);
    q = std::move(q_next);
    lambda = std::move(out.lambda_plus);
    if (done) {
      res.y = std::move(y);
      res.q = std::move(q);
      res.v = std::move(out.v_plus);
      res.delta = out.delta_plus;
      res.lambda = std::move(lambda);
      res.iterations = i;
      res.epochs = k;
      res.T = T;
      return res;
    }
  }
  throw NonconvergenceError("s_admm: iteration cap of " + std::to_string(opts.max_iterations) + " reached",
                            std::nullopt, std::vector<double>(y.data().data(), y.data().data() + y.total()));
}

double kappa_of(const Metadata& md, double C) {
  return (2.0 * md.D_psi * md.M_psi + (2.0 * md.D_psi + 1.0) * (C + C * C + md.grad_bound)) / (md.d_bar * md.nu_plus);
}

std::vector<double> theory_stepsizes(const Metadata& md) {
  std::vector<double> out;
  for (double m : md.m) out.push_back(1.0 / (2.0 * m));
  return out;
}

TheoryConstants theory_constants(const ProblemInstance& inst, double c, const ToleranceConfig& tol,
                                 const BlockVector& y0, const Vec& q0) {
  if (!inst.metadata()) throw MetadataIncompleteError("theory constants need instance metadata");
  const Metadata& md = *inst.metadata();
  if (!(md.d_bar > 0.0) || !(md.nu_plus > 0.0) || !(md.m_min() > 0.0)) {
    throw MetadataIncompleteError("metadata needs positive moduli, d_bar and nu_plus");
  }
  TheoryConstants tc;
  double B = static_cast<double>(inst.count());
  tc.sigma1 = 8.0 * (25.0 * md.m_max() + 6.0 * md.L_sq() / md.m_min()) + 1.0;
  tc.sigma2 = 24.0 * B * block_norms(inst.map()).dagger_sq;
  tc.kappaC = kappa_of(md, tol.C);
  double s = tc.sigma1 + c * tc.sigma2;
  tc.Gamma = md.F_sup - md.F_inf + c * inst.constraint_residual(y0).squaredNorm() +
             (4.0 * s / (tol.alpha * c) + 1.0 / c) * (q0.squaredNorm() + tc.kappaC * tc.kappaC);
  tc.epoch_bound = std::ceil(s / tol.alpha);
  tc.multiplier_bound = std::max(q0.norm(), tc.kappaC);
  return tc;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "i,k,v_sq,delta,T,feasibility,c,lambda_min,lambda_max\n";
  for (const TraceRow& r : rows) {
    os << r.i << ',' << r.k << ',' << format_double(r.v_sq) << ',' << format_double(r.delta) << ','
       << format_double(r.T) << ',' << format_double(r.feasibility) << ',' << format_double(r.c) << ','
       << format_double(r.lambda_min) << ',' << format_double(r.lambda_max) << '\n';
  }
}

}  // namespace badmm
