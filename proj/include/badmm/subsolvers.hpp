#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "badmm/certify.hpp"

namespace badmm {

/// psi_s with its gradient.
struct SmoothPart {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

/// min psi_s(u) + psi_n(u), started (and centered) at `start`.
struct SubproblemSpec {
  SmoothPart smooth;
  const NonsmoothTerm* composite = nullptr;
  Vec start;
  std::optional<double> lipschitz;  // of grad psi_s
  double tau = 0.125;
};

enum class ScgmStop {
  descent,  // ||v||^2 <= sigma [psi(z0) - psi(z)] + vartheta^2
  tau,      // ||v||^2 <= tau ||z0 - z||^2
};

struct ScgmConfig {
  std::optional<double> M;  // overrides spec.lipschitz; backtracking from 1 when both are absent
  double sigma = 1.0;
  double vartheta = 0.0;
  ScgmStop stop = ScgmStop::descent;
  long max_iters = 100000;
  bool verify = false;
  bool record_steps = false;
};

struct AcgConfig {
  std::optional<double> M;
  long max_iters = 100000;
};

struct SubsolveStep {
  double psi_prev = 0.0;
  double psi = 0.0;
  double step_sq = 0.0;
  double v_sq = 0.0;
};

struct SubsolveResult {
  SubCertificate cert;
  long iterations = 0;
  double M = 0.0;
  double psi_start = 0.0;
  double psi_final = 0.0;
  double first_v_sq = 0.0;
  std::vector<SubsolveStep> steps;  // only with record_steps
};

SubsolveResult scgm(const SubproblemSpec& spec, const ScgmConfig& cfg);

// Accelerated proximal gradient for a mu-strongly convex subproblem under
// the tau stopping rule.
SubsolveResult acg(const SubproblemSpec& spec, double mu, const AcgConfig& cfg = {});

// argmin of sum_j a_j u_j^2 / 2 + b_j u_j over [-omega, omega]^n, a > 0.
Vec exact_separable_quadratic_box(const Vec& a, const Vec& b, double omega);

// Global minimizer of the same separable quadratic for arbitrary signs of a.
// Where the minimizer is not unique the coordinate closest to `anchor`
// among the minimizers is returned.
Vec minimize_separable_quadratic_box(const Vec& a, const Vec& b, double omega, const Vec& anchor);

}  // namespace badmm
