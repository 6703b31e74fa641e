#include "badmm/certify.hpp"

#include <cmath>

#include "badmm/errors.hpp"

namespace badmm {

bool check_tau_stationary(const SubCertificate& cert, const Vec& z0, double tau) {
  if (cert.eps < 0.0) throw InvalidCertificateError("certificate slack must be nonnegative");
  if (cert.z.size() != z0.size() || cert.r.size() != z0.size()) {
    throw ShapeError("sub-certificate and center have different dimensions");
  }
  return cert.r.squaredNorm() + 2.0 * cert.eps <= tau * (z0 - cert.z).squaredNorm();
}

double eps_subgradient_gap(const NonsmoothTerm& term, const Vec& xi, const Vec& y) {
  return term.subgradient_gap(xi, y);
}

BlockVector inclusion_defect(const ProblemInstance& inst, const BlockVector& x, const Vec& p, const BlockVector& v) {
  inst.check_point(x);
  inst.check_point(v);
  inst.check_multiplier(p);
  BlockVector xi = v;
  xi.data() -= inst.smooth().full_gradient(x).data();
  xi.data() -= inst.map().adjoint_apply(p).data();
  return xi;
}

double inclusion_gap(const ProblemInstance& inst, const BlockVector& x, const BlockVector& xi) {
  double gap = 0.0;
  for (Index t = 0; t < inst.count(); ++t) gap += eps_subgradient_gap(inst.term(t), xi.block(t), x.block(t));
  return gap;
}

Certificate polish_certificate(const ProblemInstance& inst, const Certificate& cert, double rho) {
  BlockVector xi = inclusion_defect(inst, cert.x, cert.p, cert.v);
  BlockVector v = inst.smooth().full_gradient(cert.x);
  v.data() += inst.map().adjoint_apply(cert.p).data();
  for (Index t = 0; t < inst.count(); ++t) {
    v.block(t) += inst.term(t).nearest_subgradient(xi.block(t), cert.x.block(t));
  }
  if (!(v.squared_norm() <= rho * rho)) return cert;
  return {cert.x, cert.p, std::move(v), 0.0};
}

namespace {

void check_range(const ProblemInstance& inst, const Vec& p, StationarityReport& rep) {
  const BlockLinearMap& A = inst.map();
  if (static_cast<double>(A.rows()) * static_cast<double>(A.column_sizes().total()) > 4e6) return;
  Mat S = A.stacked();
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(S);
  Vec x = cod.solve(p);
  rep.range_checked = true;
  rep.range_defect = (S * x - p).norm() / (1.0 + p.norm());
  rep.range_ok = rep.range_defect <= 1e-8;
}

}  // namespace

StationarityReport check_rho_eta_stationary(const ProblemInstance& inst, const Certificate& cert,
                                            const ToleranceConfig& tol) {
  if (cert.eps < 0.0) throw InvalidCertificateError("certificate slack must be nonnegative");
  inst.check_point(cert.x);
  if (!inst.in_domain(cert.x)) throw InvalidCertificateError("certificate point lies outside the domain");
  StationarityReport rep;
  BlockVector xi = inclusion_defect(inst, cert.x, cert.p, cert.v);
  rep.xi_norm = xi.norm();
  rep.inclusion_gap = inclusion_gap(inst, cert.x, xi);
  rep.inclusion_ok = rep.inclusion_gap <= cert.eps + inclusion_slack(rep.xi_norm);
  rep.residual_sq = cert.v.squared_norm() + cert.eps;
  rep.residual_ok = rep.residual_sq <= tol.rho * tol.rho;
  rep.feasibility = inst.constraint_residual(cert.x).norm();
  rep.feasibility_ok = rep.feasibility <= tol.eta;
  check_range(inst, cert.p, rep);
  return rep;
}

EffectiveTolerance relative_to_absolute(const ProblemInstance& inst, const BlockVector& x0, double rho, double eta) {
  double g0 = inst.smooth().full_gradient(x0).norm();
  double r0 = inst.constraint_residual(x0).norm();
  return {rho * (1.0 + g0), eta * (1.0 + r0)};
}

bool relative_error_ok(const ProblemInstance& inst, const Certificate& cert, const BlockVector& x0, double rho,
                       double eta) {
  double g0 = inst.smooth().full_gradient(x0).norm();
  double r0 = inst.constraint_residual(x0).norm();
  double res = cert.v.norm();
  double feas = inst.constraint_residual(cert.x).norm();
  return res / (1.0 + g0) <= rho && feas / (1.0 + r0) <= eta;
}

}  // namespace badmm
