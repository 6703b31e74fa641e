#include "badmm/subsolvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "badmm/errors.hpp"

namespace badmm {

namespace {

constexpr int kMaxDoublings = 60;

std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

struct Composite {
  explicit Composite(const SubproblemSpec& spec) : zero(spec.start.size()) {
    term = spec.composite ? spec.composite : &zero;
    if (term->dim() != spec.start.size()) throw ShapeError("subproblem composite term has the wrong dimension");
  }
  ZeroTerm zero;
  const NonsmoothTerm* term;
};

struct StepSize {
  double M;
  bool backtrack;
};

StepSize initial_step(const std::optional<double>& forced, const std::optional<double>& known) {
  StepSize s{1.0, true};
  if (forced) {
    s = {*forced, false};
  } else if (known) {
    s = {*known, false};
  }
  if (!(s.M > 0.0) || !std::isfinite(s.M)) throw InvalidArgumentError("subsolver curvature estimate must be positive");
  return s;
}

// Proximal gradient step from y with curvature M, doubling M until the
// quadratic upper model holds when backtracking is enabled.
Vec prox_step(const SubproblemSpec& spec, const NonsmoothTerm& term, const Vec& y, double psi_s_y, const Vec& g,
              StepSize& step, double& psi_s_out) {
  for (int k = 0;; ++k) {
    Vec z = term.prox(1.0 / step.M, y - g / step.M);
    double val = spec.smooth.value(z);
    if (!step.backtrack) {
      psi_s_out = val;
      return z;
    }
    Vec d = z - y;
    double model = psi_s_y + g.dot(d) + 0.5 * step.M * d.squaredNorm();
    if (val <= model + 1e-12 * (1.0 + std::abs(psi_s_y))) {
      psi_s_out = val;
      return z;
    }
    if (k == kMaxDoublings) throw NonconvergenceError("curvature backtracking did not terminate");
    step.M *= 2.0;
  }
}

}  // namespace

SubsolveResult scgm(const SubproblemSpec& spec, const ScgmConfig& cfg) {
  Composite comp(spec);
  const NonsmoothTerm& term = *comp.term;
  if (!(cfg.sigma > 0.0) && cfg.stop == ScgmStop::descent) throw InvalidArgumentError("scgm needs sigma > 0");
  Vec z = spec.start;
  if (!term.contains(z)) throw OutOfDomainError("scgm start point lies outside the composite domain");

  StepSize step = initial_step(cfg.M, spec.lipschitz);
  SubsolveResult res;
  double psi_s = spec.smooth.value(z);
  res.psi_start = psi_s + term.value(z);
  double psi_prev = res.psi_start;
  Vec g = spec.smooth.gradient(z);

  for (long j = 1; j <= cfg.max_iters; ++j) {
    double psi_s_new = 0.0;
    Vec z_new = prox_step(spec, term, z, psi_s, g, step, psi_s_new);
    Vec g_new = spec.smooth.gradient(z_new);
    Vec v = step.M * (z - z_new) + g_new - g;
    double psi_new = psi_s_new + term.value(z_new);
    double step_sq = (z_new - z).squaredNorm();
    double v_sq = v.squaredNorm();
    if (j == 1) res.first_v_sq = v_sq;
    if (cfg.record_steps) res.steps.push_back({psi_prev, psi_new, step_sq, v_sq});
    if (cfg.verify) {
      double slack = 1e-10 * (1.0 + std::abs(psi_prev));
      double descent = psi_prev - psi_new;
      if (descent < 0.5 * step.M * step_sq - slack) throw InvariantViolation("scgm: sufficient descent failed");
      if (!step.backtrack && 8.0 * step.M * descent < v_sq - 8.0 * step.M * slack) {
        throw InvariantViolation("scgm: residual bound failed");
      }
    }

    bool stop;
    if (cfg.stop == ScgmStop::descent) {
      stop = v_sq <= cfg.sigma * (res.psi_start - psi_new) + cfg.vartheta * cfg.vartheta;
    } else {
      stop = v_sq <= spec.tau * (spec.start - z_new).squaredNorm();
    }
    if (stop) {
      res.cert = {z_new, v, 0.0};
      res.iterations = j;
      res.M = step.M;
      res.psi_final = psi_new;
      return res;
    }
    z = std::move(z_new);
    g = std::move(g_new);
    psi_s = psi_s_new;
    psi_prev = psi_new;
  }
  throw NonconvergenceError("scgm: iteration cap of " + std::to_string(cfg.max_iters) + " reached", std::nullopt,
                            to_std(z));
}

SubsolveResult acg(const SubproblemSpec& spec, double mu, const AcgConfig& cfg) {
  if (!(mu > 0.0)) throw InvalidArgumentError("acg needs a positive strong convexity modulus");
  Composite comp(spec);
  const NonsmoothTerm& term = *comp.term;
  const Vec& z0 = spec.start;
  if (!term.contains(z0)) throw OutOfDomainError("acg start point lies outside the composite domain");

  StepSize step = initial_step(cfg.M, spec.lipschitz);
  SubsolveResult res;
  Vec x = z0;
  Vec y = z0;
  double psi_x = spec.smooth.value(x) + term.value(x);
  res.psi_start = psi_x;
  Vec best = x;
  double best_psi = psi_x;

  for (long k = 1; k <= cfg.max_iters; ++k) {
    double psi_s_y = spec.smooth.value(y);
    Vec g = spec.smooth.gradient(y);
    double psi_s_new = 0.0;
    Vec x_new = prox_step(spec, term, y, psi_s_y, g, step, psi_s_new);
    Vec r = step.M * (y - x_new) + spec.smooth.gradient(x_new) - g;
    if (k == 1) res.first_v_sq = r.squaredNorm();
    double psi_new = psi_s_new + term.value(x_new);
    if (r.squaredNorm() <= spec.tau * (z0 - x_new).squaredNorm()) {
      res.cert = {x_new, r, 0.0};
      res.iterations = k;
      res.M = step.M;
      res.psi_final = psi_new;
      return res;
    }
    if (psi_new < best_psi) {
      best_psi = psi_new;
      best = x_new;
    }
    if (psi_new > psi_x) {
      y = x;  // restart the momentum from the last monotone iterate
      continue;
    }
    double q = std::min(1.0, mu / step.M);
    double beta = (1.0 - std::sqrt(q)) / (1.0 + std::sqrt(q));
    y = x_new + beta * (x_new - x);
    x = std::move(x_new);
    psi_x = psi_new;
  }
  throw NonconvergenceError("acg: iteration cap of " + std::to_string(cfg.max_iters) + " reached", std::nullopt,
                            to_std(best));
}

Vec exact_separable_quadratic_box(const Vec& a, const Vec& b, double omega) {
  if (a.size() != b.size()) throw ShapeError("separable quadratic: coefficient lengths differ");
  if (!(omega > 0.0)) throw InvalidArgumentError("box radius must be positive");
  Vec u(a.size());
  for (Index j = 0; j < a.size(); ++j) {
    if (!(a(j) > 0.0)) throw NotStronglyConvexError("separable quadratic has a nonpositive curvature entry");
    u(j) = std::clamp(-b(j) / a(j), -omega, omega);
  }
  return u;
}

Vec minimize_separable_quadratic_box(const Vec& a, const Vec& b, double omega, const Vec& anchor) {
  if (a.size() != b.size() || a.size() != anchor.size()) {
    throw ShapeError("separable quadratic: coefficient lengths differ");
  }
  Vec u(a.size());
  for (Index j = 0; j < a.size(); ++j) {
    if (a(j) > 0.0) {
      u(j) = std::clamp(-b(j) / a(j), -omega, omega);
      continue;
    }
    if (a(j) == 0.0 && b(j) == 0.0) {
      u(j) = std::clamp(anchor(j), -omega, omega);
      continue;
    }
    // Concave or linear: the minimum sits at an endpoint, and the two
    // endpoint values differ by 2 b omega.
    if (b(j) < 0.0) {
      u(j) = omega;
    } else if (b(j) > 0.0) {
      u(j) = -omega;
    } else {
      u(j) = anchor(j) >= 0.0 ? omega : -omega;
    }
  }
  return u;
}

}  // namespace badmm
