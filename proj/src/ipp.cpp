#include "badmm/ipp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "badmm/errors.hpp"

namespace badmm {

namespace {

bool is_diagonal(const Mat& m) {
  Mat off = m;
  off.diagonal().setZero();
  return (off.array() == 0.0).all();
}

struct BlockSolve {
  SubCertificate cert;
  long iterations = 0;
  bool exact = false;
};

// Subproblem of block t at the working point x, whose block t still equals z_t:
//   min_u  lambda * Lhat_c(x with u; p) + 0.5 ||u - z_t||^2 + lambda * Psi_t(u).
BlockSolve solve_block(const ProblemInstance& inst, const BlockStructure::Block& bs, Index t, const BlockVector& x,
                       const Vec& w, const Vec& p, double c, double lambda, const IppOptions& opts) {
  const Mat& At = inst.map().block(t);
  const Vec zt = x.block(t);
  Vec g0 = inst.smooth().block_gradient(t, x) + At.transpose() * (p + c * w);

  if (bs.separable && opts.allow_exact) {
    Vec Q = (lambda * (bs.f_diag + c * bs.gram_diag)).array() + 1.0;
    Vec b = lambda * g0 - Q.cwiseProduct(zt);
    BlockSolve out;
    out.cert.z = minimize_separable_quadratic_box(Q, b, *bs.omega, zt);
    out.cert.r = Vec::Zero(zt.size());
    out.exact = true;
    return out;
  }

  SubproblemSpec spec;
  ScaledTerm composite(inst.term(t), lambda);
  spec.composite = &composite;
  spec.start = zt;
  spec.tau = opts.tau;
  const SmoothOracle& f = inst.smooth();
  std::optional<Mat> H = bs.f_hess;
  spec.smooth.value = [&, t](const Vec& u) {
    Vec e = At * (u - zt);
    double al = f.block_change(t, x, u) + p.dot(e) + c * w.dot(e) + 0.5 * c * e.squaredNorm();
    return lambda * al + 0.5 * (u - zt).squaredNorm();
  };
  spec.smooth.gradient = [&, t](const Vec& u) {
    Vec d = u - zt;
    Vec gf;
    if (H) {
      gf = g0 + (*H) * d + c * bs.gram * d;
    } else {
      BlockVector moved = x;
      moved.block(t) = u;
      gf = f.block_gradient(t, moved) + At.transpose() * (p + c * (w + At * d));
    }
    return Vec(lambda * gf + d);
  };

  std::optional<double> mu;
  if (H) {
    Mat Q = lambda * (*H + c * bs.gram);
    Q.diagonal().array() += 1.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(Q, Eigen::EigenvaluesOnly);
    const Vec& ev = es.eigenvalues();
    spec.lipschitz = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    if (ev(0) > 0.0) mu = ev(0);
  }

  BlockSolve out;
  SubsolveResult res;
  try {
    bool use_acg = mu && opts.subsolver != SubsolverChoice::scgm;
    if (use_acg) {
      res = acg(spec, *mu, opts.acg);
    } else {
      ScgmConfig cfg = opts.scgm;
      cfg.stop = ScgmStop::tau;
      res = scgm(spec, cfg);
    }
  } catch (const NonconvergenceError& e) {
    throw NonconvergenceError(std::string("block ") + std::to_string(t) + ": " + e.what(), static_cast<int>(t),
                              e.best());
  }
  out.cert = std::move(res.cert);
  out.iterations = res.iterations;
  return out;
}

IppOutput sweep(const ProblemInstance& inst, const BlockVector& z, const Vec& p, const std::vector<double>& lambda,
                double c, const IppOptions& opts, bool adaptive) {
  inst.check_point(z);
  inst.check_multiplier(p);
  if (static_cast<Index>(lambda.size()) != inst.count()) throw ShapeError("one stepsize per block is required");
  if (!(c > 0.0)) throw InvalidArgumentError("penalty parameter must be positive");
  for (double l : lambda) {
    if (!(l > 0.0)) throw InvalidArgumentError("stepsizes must be positive");
  }
  if (!inst.in_domain(z)) throw OutOfDomainError("sweep start point lies outside the domain");

  std::shared_ptr<const BlockStructure> structure = opts.structure ? opts.structure : analyze_blocks(inst);
  const Index B = inst.count();
  IppOutput out;
  out.lambda_plus = lambda;
  out.r.resize(static_cast<size_t>(B));
  out.eps.assign(static_cast<size_t>(B), 0.0);
  out.steps.resize(static_cast<size_t>(B));

  BlockVector x = z;
  Vec w = inst.constraint_residual(z);
  for (Index t = 0; t < B; ++t) {
    const Mat& At = inst.map().block(t);
    BlockStep& step = out.steps[static_cast<size_t>(t)];
    double lam = lambda[static_cast<size_t>(t)];
    step.lambda_in = lam;
    for (;;) {
      BlockSolve sol = solve_block(inst, structure->blocks[static_cast<size_t>(t)], t, x, w, p, c, lam, opts);
      step.inner_iterations += sol.iterations;
      const Vec& u = sol.cert.z;
      Vec d = u - z.block(t);
      Vec e = At * d;
      double psi_change = inst.term(t).value(u) - inst.term(t).value(z.block(t));
      double increase =
          inst.smooth().block_change(t, x, u) + p.dot(e) + c * w.dot(e) + 0.5 * c * e.squaredNorm() + psi_change;
      double drop = -increase;
      double step_sq = d.squaredNorm();
      double cstep_sq = e.squaredNorm();
      if (adaptive && !(drop >= step_sq / (8.0 * lam) + 0.25 * c * cstep_sq)) {
        if (step.halvings == opts.max_halvings) {
          throw StepsizeCollapseError("block " + std::to_string(t) + ": descent test failed after " +
                                          std::to_string(opts.max_halvings) + " halvings",
                                      static_cast<int>(t));
        }
        lam *= 0.5;
        ++step.halvings;
        continue;
      }
      if (opts.verify) {
        double before = augmented_lagrangian(inst, x, p, c);
        BlockVector moved = x;
        moved.block(t) = u;
        double after = augmented_lagrangian(inst, moved, p, c);
        double scale = std::max({1.0, std::abs(before), std::abs(after)});
        if (std::abs((before - after) - drop) > 1e-10 * scale) {
          throw InvariantViolation("block " + std::to_string(t) + ": incremental Lagrangian drop disagrees");
        }
      }
      x.block(t) = u;
      w += e;
      step.lambda = lam;
      step.drop = drop;
      step.step_sq = step_sq;
      step.constraint_step_sq = cstep_sq;
      step.eps = sol.cert.eps;
      step.exact = sol.exact;
      out.r[static_cast<size_t>(t)] = std::move(sol.cert.r);
      out.eps[static_cast<size_t>(t)] = sol.cert.eps;
      out.lambda_plus[static_cast<size_t>(t)] = lam;
      out.drop += drop;
      break;
    }
  }

  ResidualPair rp = residual_pair(inst, z, x, out.r, out.eps, out.lambda_plus, c);
  out.v_plus = std::move(rp.v);
  out.delta_plus = rp.delta;
  out.residual = inst.constraint_residual(x);
  out.z_plus = std::move(x);
  return out;
}

}  // namespace

std::shared_ptr<const BlockStructure> analyze_blocks(const ProblemInstance& inst) {
  auto s = std::make_shared<BlockStructure>();
  for (Index t = 0; t < inst.count(); ++t) {
    BlockStructure::Block b;
    const Mat& At = inst.map().block(t);
    b.gram = At.transpose() * At;
    b.f_hess = inst.smooth().block_hessian(t);
    b.omega = inst.term(t).box_radius();
    b.separable = b.f_hess && b.omega && is_diagonal(*b.f_hess) && is_diagonal(b.gram);
    if (b.separable) {
      b.f_diag = b.f_hess->diagonal();
      b.gram_diag = b.gram.diagonal();
    }
    s->blocks.push_back(std::move(b));
  }
  return s;
}

IppOutput b_ipp(const ProblemInstance& inst, const BlockVector& z, const Vec& p, const std::vector<double>& lambda,
                double c, const IppOptions& opts) {
  return sweep(inst, z, p, lambda, c, opts, false);
}

IppOutput ab_ipp(const ProblemInstance& inst, const BlockVector& z, const Vec& p, const std::vector<double>& lambda,
                 double c, const IppOptions& opts) {
  return sweep(inst, z, p, lambda, c, opts, true);
}

ResidualPair residual_pair(const ProblemInstance& inst, const BlockVector& z, const BlockVector& z_plus,
                           const std::vector<Vec>& r, const std::vector<double>& eps,
                           const std::vector<double>& lambda_plus, double c) {
  inst.check_point(z);
  inst.check_point(z_plus);
  const Index B = inst.count();
  if (static_cast<Index>(r.size()) != B || static_cast<Index>(eps.size()) != B ||
      static_cast<Index>(lambda_plus.size()) != B) {
    throw ShapeError("residual pair needs one residual, slack and stepsize per block");
  }
  const SmoothOracle& f = inst.smooth();
  const BlockSizes& sizes = inst.sizes();
  ResidualPair out{BlockVector(sizes), 0.0};
  Vec tail = Vec::Zero(inst.map().rows());  // sum_{s>t} A_s (z_s^+ - z_s)
  BlockVector mixed = z_plus;
  for (Index t = B - 1; t >= 0; --t) {
    if (r[static_cast<size_t>(t)].size() != sizes.size(t)) throw ShapeError("block residual has the wrong size");
    double lam = lambda_plus[static_cast<size_t>(t)];
    const Mat& At = inst.map().block(t);
    Vec d = z_plus.block(t) - z.block(t);
    // mixed holds (z+_{<=t}, z_{>t}) here
    Vec gdiff = f.block_gradient(t, z_plus) - f.block_gradient(t, mixed);
    out.v.block(t) = gdiff + r[static_cast<size_t>(t)] / lam + c * (At.transpose() * tail) - d / lam;
    tail.noalias() += At * d;
    mixed.block(t) = z.block(t);
    out.delta += eps[static_cast<size_t>(t)] / lam;
  }
  return out;
}

double adaptive_sigma1(double lambda_min, double lambda_max, double L_sq) {
  return 48.0 * lambda_max * L_sq + 50.0 / lambda_min + 1.0;
}

}  // namespace badmm
