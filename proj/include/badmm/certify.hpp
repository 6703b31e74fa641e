#pragma once

#include "badmm/problem.hpp"

namespace badmm {

/// (z, r, eps) for a block subproblem: r in grad psi_s(z) + d_eps psi_n(z).
struct SubCertificate {
  Vec z;
  Vec r;
  double eps = 0.0;
};

// ||r||^2 + 2 eps <= tau ||z0 - z||^2. The inclusion is checked elsewhere.
bool check_tau_stationary(const SubCertificate& cert, const Vec& z0, double tau);

double eps_subgradient_gap(const NonsmoothTerm& term, const Vec& xi, const Vec& y);

/// (x, p, v, eps) with v in grad f(x) + d_eps Psi(x) + A^T p.
struct Certificate {
  BlockVector x;
  Vec p;
  BlockVector v;
  double eps = 0.0;
};

inline double inclusion_slack(double xi_norm) { return 1e-8 * (1.0 + xi_norm); }

struct StationarityReport {
  double inclusion_gap = 0.0;
  double xi_norm = 0.0;
  double residual_sq = 0.0;  // ||v||^2 + eps
  double feasibility = 0.0;  // ||Ax - b||
  bool inclusion_ok = false;
  bool residual_ok = false;
  bool feasibility_ok = false;
  bool range_checked = false;
  double range_defect = 0.0;  // relative distance of p to range(A)
  bool range_ok = true;

  bool stationary() const { return inclusion_ok && residual_ok && feasibility_ok; }
};

// xi = v - grad f(x) - A^T p
BlockVector inclusion_defect(const ProblemInstance& inst, const BlockVector& x, const Vec& p, const BlockVector& v);

// Sum over blocks of the eps-subgradient gap of xi at x.
double inclusion_gap(const ProblemInstance& inst, const BlockVector& x, const BlockVector& xi);

// Replaces v by grad f(x) + A^T p + g, g the nearest exact subgradient to the defect, with eps = 0.
// Returns the input unchanged when the rebuilt residual exceeds rho.
Certificate polish_certificate(const ProblemInstance& inst, const Certificate& cert, double rho);

StationarityReport check_rho_eta_stationary(const ProblemInstance& inst, const Certificate& cert,
                                            const ToleranceConfig& tol);

bool relative_error_ok(const ProblemInstance& inst, const Certificate& cert, const BlockVector& x0, double rho,
                       double eta);

// Tolerances of the relative criterion expressed as absolute ones.
struct EffectiveTolerance {
  double rho;
  double eta;
};
EffectiveTolerance relative_to_absolute(const ProblemInstance& inst, const BlockVector& x0, double rho, double eta);

}  // namespace badmm
