#pragma once

#include <memory>
#include <vector>

#include "badmm/subsolvers.hpp"

namespace badmm {

enum class SubsolverChoice { automatic, scgm, acg };

/// Per-block structure reused across sweeps on one instance.
struct BlockStructure {
  struct Block {
    Mat gram;                   // A_t^T A_t
    std::optional<Mat> f_hess;  // constant Hessian of f in block t
    bool separable = false;     // diagonal f_hess and gram, box term
    Vec f_diag;
    Vec gram_diag;
    std::optional<double> omega;
  };
  std::vector<Block> blocks;
};

std::shared_ptr<const BlockStructure> analyze_blocks(const ProblemInstance& inst);

struct IppOptions {
  SubsolverChoice subsolver = SubsolverChoice::automatic;
  bool allow_exact = true;  // closed form on separable blocks
  double tau = 0.125;
  int max_halvings = 60;
  bool verify = false;  // recompute Lagrangian drops from scratch
  ScgmConfig scgm;
  AcgConfig acg;
  std::shared_ptr<const BlockStructure> structure;
};

struct BlockStep {
  double lambda_in = 0.0;
  double lambda = 0.0;  // accepted stepsize
  int halvings = 0;
  double drop = 0.0;  // L_c before minus after, block t only
  double step_sq = 0.0;
  double constraint_step_sq = 0.0;
  double eps = 0.0;
  long inner_iterations = 0;
  bool exact = false;
};

struct IppOutput {
  BlockVector z_plus;
  BlockVector v_plus;
  double delta_plus = 0.0;
  std::vector<double> lambda_plus;
  std::vector<Vec> r;
  std::vector<double> eps;
  std::vector<BlockStep> steps;
  double drop = 0.0;  // L_c(z; p) - L_c(z_plus; p)
  Vec residual;       // A z_plus - b
};

IppOutput b_ipp(const ProblemInstance& inst, const BlockVector& z, const Vec& p, const std::vector<double>& lambda,
                double c, const IppOptions& opts = {});

IppOutput ab_ipp(const ProblemInstance& inst, const BlockVector& z, const Vec& p, const std::vector<double>& lambda,
                 double c, const IppOptions& opts = {});

struct ResidualPair {
  BlockVector v;
  double delta = 0.0;
};

ResidualPair residual_pair(const ProblemInstance& inst, const BlockVector& z, const BlockVector& z_plus,
                           const std::vector<Vec>& r, const std::vector<double>& eps,
                           const std::vector<double>& lambda_plus, double c);

// 48 lambda_max ||L||^2 + 50 / lambda_min + 1
double adaptive_sigma1(double lambda_min, double lambda_max, double L_sq);

}  // namespace badmm
