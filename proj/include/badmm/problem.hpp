#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "badmm/block.hpp"

namespace badmm {

/// Smooth part f of the objective.
class SmoothOracle {
 public:
  virtual ~SmoothOracle() = default;

  virtual const BlockSizes& sizes() const = 0;
  virtual double value(const BlockVector& x) const = 0;
  virtual BlockVector full_gradient(const BlockVector& x) const = 0;

  // Block t of the gradient at x. The default slices full_gradient.
  virtual Vec block_gradient(Index t, const BlockVector& x) const;

  // Block t of the gradient at the point whose blocks 0..t come from
  // `prefix` and whose blocks t+1.. come from `suffix`.
  Vec partial_gradient(Index t, const BlockVector& prefix, const BlockVector& suffix) const;

  // f(x with block t replaced by u) - f(x).
  virtual double block_change(Index t, const BlockVector& x, const Vec& u) const;

  // Hessian of u -> f(x with block t = u) when it does not depend on x.
  virtual std::optional<Mat> block_hessian(Index /*t*/) const { return std::nullopt; }
};

/// f(x) = 0.5 x'Px + r'x, P symmetric. A diagonal P is stored as a vector.
class QuadraticOracle : public SmoothOracle {
 public:
  QuadraticOracle(BlockSizes sizes, Mat P, Vec r);
  static std::shared_ptr<QuadraticOracle> diagonal(BlockSizes sizes, Vec d, Vec r);

  const BlockSizes& sizes() const override { return sizes_; }
  double value(const BlockVector& x) const override;
  BlockVector full_gradient(const BlockVector& x) const override;
  Vec block_gradient(Index t, const BlockVector& x) const override;
  double block_change(Index t, const BlockVector& x, const Vec& u) const override;
  std::optional<Mat> block_hessian(Index t) const override;

  bool is_diagonal() const { return diagonal_; }
  const Vec& diag() const { return diag_; }  // valid when is_diagonal()
  const Mat& dense() const { return P_; }    // valid when !is_diagonal()
  Mat hessian() const;
  const Vec& linear() const { return r_; }

 private:
  QuadraticOracle() = default;
  Vec hessian_times(const Vec& x) const;

  BlockSizes sizes_;
  bool diagonal_ = false;
  Mat P_;
  Vec diag_;
  Vec r_;
};

/// Proper closed convex Psi_t with an easy prox.
class NonsmoothTerm {
 public:
  virtual ~NonsmoothTerm() = default;

  virtual Index dim() const = 0;
  virtual double value(const Vec& u) const = 0;  // +inf off the domain
  virtual bool contains(const Vec& u) const = 0;
  // argmin Psi(w) + ||w - u||^2 / (2 beta)
  virtual Vec prox(double beta, const Vec& u) const = 0;
  // sup over the domain of <xi, z - y>
  virtual double support_gap(const Vec& xi, const Vec& y) const = 0;
  // Smallest eps with xi in the eps-subdifferential at y. Throws OutOfDomainError.
  virtual double subgradient_gap(const Vec& xi, const Vec& y) const = 0;
  // Nearest point to xi in the exact subdifferential at y.
  virtual Vec nearest_subgradient(const Vec& xi, const Vec& y) const = 0;
  virtual std::optional<double> box_radius() const { return std::nullopt; }
};

/// Indicator of [-omega, omega]^n.
class BoxIndicator : public NonsmoothTerm {
 public:
  BoxIndicator(Index n, double omega);

  Index dim() const override { return n_; }
  double value(const Vec& u) const override;
  bool contains(const Vec& u) const override;
  Vec prox(double beta, const Vec& u) const override;
  double support_gap(const Vec& xi, const Vec& y) const override;
  double subgradient_gap(const Vec& xi, const Vec& y) const override;
  Vec nearest_subgradient(const Vec& xi, const Vec& y) const override;
  std::optional<double> box_radius() const override { return omega_; }
  double omega() const { return omega_; }

 private:
  Index n_;
  double omega_;
};

/// Psi = 0 on all of R^n. Only meant for standalone subsolver use.
class ZeroTerm : public NonsmoothTerm {
 public:
  explicit ZeroTerm(Index n) : n_(n) {}

  Index dim() const override { return n_; }
  double value(const Vec&) const override { return 0.0; }
  bool contains(const Vec&) const override { return true; }
  Vec prox(double, const Vec& u) const override { return u; }
  double support_gap(const Vec& xi, const Vec& y) const override;
  double subgradient_gap(const Vec& xi, const Vec& y) const override;
  Vec nearest_subgradient(const Vec& xi, const Vec&) const override { return Vec::Zero(xi.size()); }

 private:
  Index n_;
};

/// scale * base; scale > 0.
class ScaledTerm : public NonsmoothTerm {
 public:
  ScaledTerm(const NonsmoothTerm& base, double scale);

  Index dim() const override { return base_.dim(); }
  double value(const Vec& u) const override;
  bool contains(const Vec& u) const override { return base_.contains(u); }
  Vec prox(double beta, const Vec& u) const override { return base_.prox(scale_ * beta, u); }
  double support_gap(const Vec& xi, const Vec& y) const override { return base_.support_gap(xi, y); }
  double subgradient_gap(const Vec& xi, const Vec& y) const override;
  Vec nearest_subgradient(const Vec& xi, const Vec& y) const override {
    return scale_ * base_.nearest_subgradient(xi / scale_, y);
  }
  std::optional<double> box_radius() const override { return base_.box_radius(); }

 private:
  const NonsmoothTerm& base_;
  double scale_;
};

struct Metadata {
  std::vector<double> m;  // block weak-convexity moduli
  std::vector<double> L;  // cross-block Lipschitz constants, L[B-1] = 0
  double M_psi = 0.0;
  double D_psi = 0.0;
  double d_bar = 0.0;
  double grad_bound = 0.0;
  double nu_plus = 0.0;
  double F_inf = 0.0;
  double F_sup = 0.0;
  // M_psi = 0 is only justified for indicator terms.
  bool indicator_terms = true;

  double m_max() const;
  double m_min() const;
  double L_sq() const;  // sum of L_t^2 over t < B
};

using SmoothPtr = std::shared_ptr<const SmoothOracle>;
using TermPtr = std::shared_ptr<const NonsmoothTerm>;

/// min f(y) + sum_t Psi_t(y_t)  s.t.  A y = b.
class ProblemInstance {
 public:
  ProblemInstance(SmoothPtr smooth, std::vector<TermPtr> terms, BlockLinearMap map, Vec rhs);

  const BlockSizes& sizes() const { return map_.column_sizes(); }
  Index count() const { return map_.count(); }
  const SmoothOracle& smooth() const { return *smooth_; }
  const SmoothPtr& smooth_ptr() const { return smooth_; }
  const NonsmoothTerm& term(Index t) const { return *terms_[t]; }
  const std::vector<TermPtr>& terms() const { return terms_; }
  const BlockLinearMap& map() const { return map_; }
  const Vec& rhs() const { return rhs_; }

  const std::optional<Metadata>& metadata() const { return metadata_; }
  void set_metadata(Metadata md);
  const std::optional<BlockVector>& witness() const { return witness_; }
  void set_witness(BlockVector w);
  const std::optional<BlockVector>& initial_point() const { return initial_; }
  void set_initial_point(BlockVector x0);

  double psi_value(const BlockVector& y) const;
  bool in_domain(const BlockVector& y) const;
  Vec constraint_residual(const BlockVector& y) const;
  void check_point(const BlockVector& y) const;
  void check_multiplier(const Vec& p) const;

 private:
  SmoothPtr smooth_;
  std::vector<TermPtr> terms_;
  BlockLinearMap map_;
  Vec rhs_;
  std::optional<Metadata> metadata_;
  std::optional<BlockVector> witness_;
  std::optional<BlockVector> initial_;
};

struct ToleranceConfig {
  double rho = 1e-5;
  double eta = 1e-5;
  double alpha = 1e-2;
  double C = 1.0;

  void validate() const;  // throws InvalidArgumentError
};

// F(y) + <p, Ay - b> + (c/2)||Ay - b||^2, +inf off the domain.
double augmented_lagrangian(const ProblemInstance& inst, const BlockVector& y, const Vec& p, double c);

struct SmoothAlEval {
  double value = 0.0;
  Vec gradient;  // with respect to block t
};

// Smooth part of the augmented Lagrangian at `x` with its block-t gradient.
SmoothAlEval smooth_al(const ProblemInstance& inst, Index t, const BlockVector& x, const Vec& p, double c);

// Metadata for box-constrained quadratic instances; needs a feasible
// interior witness.
Metadata derive_metadata(const ProblemInstance& inst);

inline constexpr double kModulusFloor = 1e-12;

}  // namespace badmm
