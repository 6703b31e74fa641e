#include "badmm/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "badmm/errors.hpp"

namespace badmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Extremes of g(u) = 0.5 a u^2 + r u on [-w, w].
std::pair<double, double> scalar_quadratic_range(double a, double r, double w) {
  auto g = [&](double u) { return 0.5 * a * u * u + r * u; };
  double lo = std::min(g(-w), g(w));
  double hi = std::max(g(-w), g(w));
  if (a != 0.0) {
    double u = -r / a;
    if (std::abs(u) <= w) {
      lo = std::min(lo, g(u));
      hi = std::max(hi, g(u));
    }
  }
  return {lo, hi};
}

}  // namespace

Vec SmoothOracle::block_gradient(Index t, const BlockVector& x) const { return full_gradient(x).block(t); }

Vec SmoothOracle::partial_gradient(Index t, const BlockVector& prefix, const BlockVector& suffix) const {
  if (prefix.sizes() != sizes() || suffix.sizes() != sizes()) {
    throw ShapeError("partial_gradient: point does not match the oracle partition");
  }
  BlockVector mixed = suffix;
  Index head = sizes().offset(t) + sizes().size(t);
  mixed.data().head(head) = prefix.data().head(head);
  return block_gradient(t, mixed);
}

double SmoothOracle::block_change(Index t, const BlockVector& x, const Vec& u) const {
  BlockVector moved = x;
  moved.block(t) = u;
  return value(moved) - value(x);
}

QuadraticOracle::QuadraticOracle(BlockSizes sizes, Mat P, Vec r) : sizes_(std::move(sizes)), r_(std::move(r)) {
  Index n = sizes_.total();
  if (P.rows() != n || P.cols() != n) throw ShapeError("quadratic oracle: P must be n x n");
  if (r_.size() != n) throw ShapeError("quadratic oracle: r must have length n");
  double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgumentError("quadratic oracle: P must be symmetric");
  }
  Mat offdiag = P;
  offdiag.diagonal().setZero();
  if ((offdiag.array() == 0.0).all()) {
    diagonal_ = true;
    diag_ = P.diagonal();
  } else {
    P_ = std::move(P);
  }
}

std::shared_ptr<QuadraticOracle> QuadraticOracle::diagonal(BlockSizes sizes, Vec d, Vec r) {
  if (d.size() != sizes.total() || r.size() != sizes.total()) {
    throw ShapeError("quadratic oracle: diagonal and linear terms must have length n");
  }
  std::shared_ptr<QuadraticOracle> q(new QuadraticOracle());
  q->sizes_ = std::move(sizes);
  q->diagonal_ = true;
  q->diag_ = std::move(d);
  q->r_ = std::move(r);
  return q;
}

Vec QuadraticOracle::hessian_times(const Vec& x) const {
  if (diagonal_) return diag_.cwiseProduct(x);
  return P_ * x;
}

Mat QuadraticOracle::hessian() const {
  if (diagonal_) return Mat(diag_.asDiagonal());
  return P_;
}

double QuadraticOracle::value(const BlockVector& x) const {
  if (x.sizes() != sizes_) throw ShapeError("quadratic oracle: point has the wrong partition");
  return 0.5 * x.data().dot(hessian_times(x.data())) + r_.dot(x.data());
}

BlockVector QuadraticOracle::full_gradient(const BlockVector& x) const {
  if (x.sizes() != sizes_) throw ShapeError("quadratic oracle: point has the wrong partition");
  return BlockVector(sizes_, hessian_times(x.data()) + r_);
}

Vec QuadraticOracle::block_gradient(Index t, const BlockVector& x) const {
  if (x.sizes() != sizes_) throw ShapeError("quadratic oracle: point has the wrong partition");
  Index off = sizes_.offset(t), nt = sizes_.size(t);
  if (diagonal_) {
    return diag_.segment(off, nt).cwiseProduct(x.block(t)) + r_.segment(off, nt);
  }
  return P_.middleRows(off, nt) * x.data() + r_.segment(off, nt);
}

double QuadraticOracle::block_change(Index t, const BlockVector& x, const Vec& u) const {
  Index off = sizes_.offset(t), nt = sizes_.size(t);
  if (u.size() != nt) throw ShapeError("quadratic oracle: block replacement has the wrong size");
  Vec d = u - x.block(t);
  Vec g = block_gradient(t, x);
  if (diagonal_) return g.dot(d) + 0.5 * d.dot(diag_.segment(off, nt).cwiseProduct(d));
  return g.dot(d) + 0.5 * d.dot(P_.block(off, off, nt, nt) * d);
}

std::optional<Mat> QuadraticOracle::block_hessian(Index t) const {
  Index off = sizes_.offset(t), nt = sizes_.size(t);
  if (diagonal_) return Mat(diag_.segment(off, nt).asDiagonal());
  return Mat(P_.block(off, off, nt, nt));
}

BoxIndicator::BoxIndicator(Index n, double omega) : n_(n), omega_(omega) {
  if (n < 1) throw ShapeError("box dimension must be positive");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidArgumentError("box radius must be positive and finite");
}

double BoxIndicator::value(const Vec& u) const { return contains(u) ? 0.0 : kInf; }

bool BoxIndicator::contains(const Vec& u) const {
  if (u.size() != n_) throw ShapeError("box: point has the wrong dimension");
  return (u.array().abs() <= omega_).all();
}

Vec BoxIndicator::prox(double beta, const Vec& u) const {
  if (!(beta > 0.0)) throw InvalidArgumentError("prox stepsize must be positive");
  if (u.size() != n_) throw ShapeError("box: point has the wrong dimension");
  return u.cwiseMax(-omega_).cwiseMin(omega_);
}

double BoxIndicator::support_gap(const Vec& xi, const Vec& y) const {
  if (xi.size() != n_ || y.size() != n_) throw ShapeError("box: support gap arguments have the wrong dimension");
  double gap = 0.0;
  for (Index j = 0; j < n_; ++j) {
    gap += std::max(xi(j) * (omega_ - y(j)), xi(j) * (-omega_ - y(j)));
  }
  return gap;
}

double BoxIndicator::subgradient_gap(const Vec& xi, const Vec& y) const {
  if (!contains(y)) throw OutOfDomainError("box: point lies outside the box");
  return std::max(0.0, support_gap(xi, y));
}

Vec BoxIndicator::nearest_subgradient(const Vec& xi, const Vec& y) const {
  if (!contains(y)) throw OutOfDomainError("box: point lies outside the box");
  if (xi.size() != n_) throw ShapeError("box: subgradient has the wrong dimension");
  Vec g = Vec::Zero(n_);
  for (Index j = 0; j < n_; ++j) {
    if (y[j] == omega_) g[j] = std::max(xi[j], 0.0);
    else if (y[j] == -omega_) g[j] = std::min(xi[j], 0.0);
  }
  return g;
}

double ZeroTerm::support_gap(const Vec& xi, const Vec& y) const {
  if (xi.size() != n_ || y.size() != n_) throw ShapeError("zero term: arguments have the wrong dimension");
  return (xi.array() == 0.0).all() ? 0.0 : kInf;
}

double ZeroTerm::subgradient_gap(const Vec& xi, const Vec& y) const { return support_gap(xi, y); }

ScaledTerm::ScaledTerm(const NonsmoothTerm& base, double scale) : base_(base), scale_(scale) {
  if (!(scale > 0.0)) throw InvalidArgumentError("scaled term needs a positive scale");
}

double ScaledTerm::value(const Vec& u) const {
  double v = base_.value(u);
  return std::isinf(v) ? v : scale_ * v;
}

double ScaledTerm::subgradient_gap(const Vec& xi, const Vec& y) const {
  return scale_ * base_.subgradient_gap(xi / scale_, y);
}

double Metadata::m_max() const { return *std::max_element(m.begin(), m.end()); }
double Metadata::m_min() const { return *std::min_element(m.begin(), m.end()); }

double Metadata::L_sq() const {
  double s = 0.0;
  for (size_t t = 0; t + 1 < L.size(); ++t) s += L[t] * L[t];
  return s;
}

ProblemInstance::ProblemInstance(SmoothPtr smooth, std::vector<TermPtr> terms, BlockLinearMap map, Vec rhs)
    : smooth_(std::move(smooth)), terms_(std::move(terms)), map_(std::move(map)), rhs_(std::move(rhs)) {
  if (!smooth_) throw InvalidArgumentError("instance needs a smooth oracle");
  if (smooth_->sizes() != map_.column_sizes()) throw ShapeError("smooth oracle and linear map disagree on blocks");
  if (static_cast<Index>(terms_.size()) != map_.count()) throw ShapeError("one nonsmooth term per block is required");
  for (Index t = 0; t < map_.count(); ++t) {
    if (!terms_[t]) throw InvalidArgumentError("missing nonsmooth term");
    if (terms_[t]->dim() != sizes().size(t)) throw ShapeError("nonsmooth term dimension does not match its block");
  }
  if (rhs_.size() != map_.rows()) throw ShapeError("right-hand side length does not match the map");
  if (map_.is_zero()) throw DegenerateOperatorError("the linear map is identically zero");
}

void ProblemInstance::set_metadata(Metadata md) {
  if (static_cast<Index>(md.m.size()) != count() || static_cast<Index>(md.L.size()) != count()) {
    throw ShapeError("metadata needs one modulus and one Lipschitz constant per block");
  }
  metadata_ = std::move(md);
}

void ProblemInstance::set_witness(BlockVector w) {
  check_point(w);
  witness_ = std::move(w);
}

void ProblemInstance::set_initial_point(BlockVector x0) {
  check_point(x0);
  initial_ = std::move(x0);
}

double ProblemInstance::psi_value(const BlockVector& y) const {
  check_point(y);
  double s = 0.0;
  for (Index t = 0; t < count(); ++t) {
    double v = terms_[t]->value(y.block(t));
    if (std::isinf(v)) return kInf;
    s += v;
  }
  return s;
}

bool ProblemInstance::in_domain(const BlockVector& y) const {
  check_point(y);
  for (Index t = 0; t < count(); ++t) {
    if (!terms_[t]->contains(y.block(t))) return false;
  }
  return true;
}

Vec ProblemInstance::constraint_residual(const BlockVector& y) const { return map_.apply(y) - rhs_; }

void ProblemInstance::check_point(const BlockVector& y) const {
  if (y.sizes() != sizes()) throw ShapeError("point does not match the instance partition");
}

void ProblemInstance::check_multiplier(const Vec& p) const {
  if (p.size() != map_.rows()) throw ShapeError("multiplier length does not match the constraint count");
}

void ToleranceConfig::validate() const {
  if (!(rho > 0.0)) throw InvalidArgumentError("rho must be positive");
  if (!(eta > 0.0)) throw InvalidArgumentError("eta must be positive");
  if (!(alpha >= rho * rho)) throw InvalidArgumentError("alpha must be at least rho^2");
  if (!(C >= rho)) throw InvalidArgumentError("C must be at least rho");
}

double augmented_lagrangian(const ProblemInstance& inst, const BlockVector& y, const Vec& p, double c) {
  inst.check_multiplier(p);
  double psi = inst.psi_value(y);
  if (std::isinf(psi)) return kInf;
  Vec w = inst.constraint_residual(y);
  return inst.smooth().value(y) + psi + p.dot(w) + 0.5 * c * w.squaredNorm();
}

SmoothAlEval smooth_al(const ProblemInstance& inst, Index t, const BlockVector& x, const Vec& p, double c) {
  inst.check_point(x);
  inst.check_multiplier(p);
  Vec w = inst.constraint_residual(x);
  SmoothAlEval out;
  out.value = inst.smooth().value(x) + p.dot(w) + 0.5 * c * w.squaredNorm();
  out.gradient = inst.smooth().block_gradient(t, x) + inst.map().block(t).transpose() * (p + c * w);
  return out;
}

Metadata derive_metadata(const ProblemInstance& inst) {
  const auto* quad = dynamic_cast<const QuadraticOracle*>(&inst.smooth());
  if (!quad) throw InvalidArgumentError("derive_metadata needs a quadratic smooth part");
  const BlockSizes& sizes = inst.sizes();
  Index n = sizes.total();
  Vec omega(n);
  for (Index t = 0; t < inst.count(); ++t) {
    auto w = inst.term(t).box_radius();
    if (!w) throw InvalidArgumentError("derive_metadata needs box terms on every block");
    omega.segment(sizes.offset(t), sizes.size(t)).setConstant(*w);
  }
  if (!inst.witness()) throw MetadataIncompleteError("derive_metadata needs a feasible witness point");
  const BlockVector& xbar = *inst.witness();
  if (!inst.in_domain(xbar)) throw MetadataIncompleteError("witness lies outside the domain");
  double infeas = inst.constraint_residual(xbar).norm();
  if (infeas > 1e-8 * (1.0 + inst.rhs().norm())) throw MetadataIncompleteError("witness is not feasible");

  Metadata md;
  md.indicator_terms = true;
  md.M_psi = 0.0;

  md.d_bar = (omega.array() - xbar.data().array().abs()).minCoeff();
  if (!(md.d_bar > 0.0)) throw MetadataIncompleteError("witness is not interior to the box");
  md.D_psi = (omega.array() + xbar.data().array().abs()).matrix().norm();

  for (Index t = 0; t < inst.count(); ++t) {
    Mat H = *quad->block_hessian(t);
    double lam_min;
    if (quad->is_diagonal()) {
      lam_min = H.diagonal().minCoeff();
    } else {
      Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
      lam_min = es.eigenvalues()(0);
    }
    md.m.push_back(std::max(-lam_min, kModulusFloor));

    Index off = sizes.offset(t), nt = sizes.size(t), tail = n - off - nt;
    if (quad->is_diagonal() || tail == 0) {
      md.L.push_back(0.0);
    } else {
      md.L.push_back(spectral_norm(quad->dense().block(off, off + nt, nt, tail)));
    }
  }

  const Vec& r = quad->linear();
  if (quad->is_diagonal()) {
    const Vec& d = quad->diag();
    double g2 = 0.0;
    md.F_inf = md.F_sup = 0.0;
    for (Index j = 0; j < n; ++j) {
      double a = d(j) * omega(j) + r(j), b = -d(j) * omega(j) + r(j);
      g2 += std::max(a * a, b * b);
      auto [lo, hi] = scalar_quadratic_range(d(j), r(j), omega(j));
      md.F_inf += lo;
      md.F_sup += hi;
    }
    md.grad_bound = std::sqrt(g2);
  } else {
    const Mat& P = quad->dense();
    if (n <= 16) {
      double best = 0.0;
      Vec z(n);
      for (long mask = 0; mask < (1L << n); ++mask) {
        for (Index j = 0; j < n; ++j) z(j) = ((mask >> j) & 1) ? omega(j) : -omega(j);
        best = std::max(best, (P * z + r).norm());
      }
      md.grad_bound = best;
    } else {
      md.grad_bound = spectral_norm(P) * omega.norm() + r.norm();
    }
    md.F_inf = md.F_sup = 0.0;
    for (Index j = 0; j < n; ++j) {
      auto [lo, hi] = scalar_quadratic_range(P(j, j), r(j), omega(j));
      md.F_inf += lo;
      md.F_sup += hi;
      for (Index i = 0; i < n; ++i) {
        if (i == j) continue;
        double cross = 0.5 * std::abs(P(i, j)) * omega(i) * omega(j);
        md.F_inf -= cross;
        md.F_sup += cross;
      }
    }
  }

  md.nu_plus = block_norms(inst.map()).nu_plus;
  return md;
}

}  // namespace badmm
