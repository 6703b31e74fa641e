#include <gtest/gtest.h>

#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "badmm/bench.hpp"
#include "badmm/errors.hpp"
#include "badmm/sadmm.hpp"
#include "helpers.hpp"

using namespace badmm;
using badmm::testing::micro_qpbc;
using badmm::testing::quad_instance;
using badmm::testing::random_mat;
using badmm::testing::random_vec;
using badmm::testing::scalar_instance;
using badmm::testing::vec;

namespace {

// alpha = rho^2 so multiplier epochs actually occur in short runs.
ToleranceConfig epoch_tol() {
  ToleranceConfig tol;
  tol.rho = 1e-4;
  tol.alpha = 1e-8;
  tol.C = 1.0;
  return tol;
}

// Blocks of sizes 1 and 2 with a coupled weakly convex quadratic; the start
// is a small perturbation of the witness.
struct Coupled {
  ProblemInstance inst;
  BlockVector y0;
};

Coupled coupled_instance(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  BlockSizes s({1, 2});
  Mat Q = random_mat(g, 3, 3, -0.3, 0.3);
  Mat P = -(Q * Q.transpose()) - 0.2 * Mat::Identity(3, 3);
  Mat A = random_mat(g, 2, 3, -1, 1);
  Vec w = random_vec(g, 3, -1, 1);
  ProblemInstance inst =
      quad_instance(s, P, random_vec(g, 3, -0.2, 0.2), {A.leftCols(1), A.rightCols(2)}, A * w, 5.0);
  inst.set_witness(BlockVector(s, w));
  inst.set_metadata(derive_metadata(inst));
  BlockVector y0(s, w + random_vec(g, 3, -0.3, 0.3));
  return {std::move(inst), std::move(y0)};
}

struct Recorder {
  std::vector<SadmmIteration> iters;
  std::vector<double> L_prev;  // L_c(y^{i-1}; q^{i-1})
  std::vector<Vec> q_after;
  std::vector<Vec> y_after;
  std::vector<std::vector<double>> lambda;
  std::vector<double> drop;
};

SadmmOptions recording(const ProblemInstance& inst, Recorder& rec, double c, StepsizeMode mode,
                       const ToleranceConfig& tol) {
  SadmmOptions o;
  o.tol = tol;
  o.mode = mode;
  o.verify = true;
  o.max_iterations = 20000;
  o.observer = [&inst, &rec, c](const SadmmIteration& it) {
    SadmmIteration copy = it;
    rec.L_prev.push_back(augmented_lagrangian(inst, *it.y_prev, *it.q_prev, c));
    rec.q_after.push_back(*it.q);
    rec.y_after.push_back(it.sweep->z_plus.data());
    rec.lambda.push_back(it.sweep->lambda_plus);
    rec.drop.push_back(it.sweep->drop);
    copy.y_prev = nullptr;
    copy.q_prev = nullptr;
    copy.q = nullptr;
    copy.sweep = nullptr;
    rec.iters.push_back(copy);
  };
  return o;
}

}  // namespace

TEST(Potential, Examples) {
  EXPECT_DOUBLE_EQ(potential_update(0.0, 1.5, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(potential_update(0.7, 2.0, 2.0), 0.7);
  double T = 0.0;
  for (double d : {0.5, 0.25, 0.1}) T = potential_update(T, d, 0.0);
  EXPECT_NEAR(T, 0.85, 1e-15);
}

TEST(MultiplierTest, Arithmetic) {
  double rho = 1e-5, alpha = 1e-2, T1 = 0.5;
  EXPECT_LT(rho * rho / (alpha * 1.0), T1 / 1.0);
}

TEST(TheoryConstants, FormulaArithmetic) {
  ProblemInstance inst = micro_qpbc();
  TheoryConstants tc = theory_constants(inst, 2.0, ToleranceConfig{}, *inst.witness(), Vec::Zero(1));
  // m = (1, 1), scalar blocks with L_1 = 0 because P = -I.
  EXPECT_NEAR(tc.sigma1, 201.0, 1e-12);
  // B = 2 and ||A||_dagger^2 = 1 + 1 = 2.
  EXPECT_NEAR(tc.sigma2, 96.0, 1e-12);
  EXPECT_EQ(tc.epoch_bound, std::ceil((201.0 + 2.0 * 96.0) / 1e-2));
  EXPECT_EQ(tc.multiplier_bound, tc.kappaC);
}

TEST(TheoryConstants, MissingMetadata) {
  ProblemInstance inst = scalar_instance(1.0, 0.0, 1.0);
  EXPECT_THROW(theory_constants(inst, 1.0, {}, BlockVector(inst.sizes()), Vec::Zero(1)), MetadataIncompleteError);
}

TEST(TheoryConstants, DqpIndependentDerivation) {
  ProblemInstance inst = gen_dqp({3, 10, 10.0, 4});
  const auto& quad = dynamic_cast<const QuadraticOracle&>(inst.smooth());
  const Vec d = quad.diag(), r = quad.linear();
  const Vec xb = inst.witness()->data();
  const double w = 10.0, c = 3.0;
  ToleranceConfig tol;

  double m_max = 0.0, g2 = 0.0, Finf = 0.0, Fsup = 0.0;
  for (Index j = 0; j < d.size(); ++j) {
    m_max = std::max(m_max, -d[j]);
    g2 += std::max(std::pow(d[j] * w + r[j], 2), std::pow(-d[j] * w + r[j], 2));
    auto q = [&](double z) { return 0.5 * d[j] * z * z + r[j] * z; };
    double lo = std::min(q(-w), q(w)), hi = std::max(q(-w), q(w));
    if (d[j] < 0) {
      double vx = -r[j] / d[j];
      if (std::abs(vx) <= w) hi = std::max(hi, q(vx));
    }
    Finf += lo;
    Fsup += hi;
  }
  double d_bar = (w - xb.array().abs()).minCoeff();
  double D = (w + xb.array().abs()).matrix().norm();
  double kappa = (2 * D + 1) * (tol.C + tol.C * tol.C + std::sqrt(g2)) / (d_bar * 1.0);
  double sigma1 = 8 * 25 * m_max + 1, sigma2 = 24 * 3 * 4.0;
  Vec q0 = Vec::Constant(inst.rhs().size(), 0.1);
  const BlockVector& y0 = *inst.initial_point();
  double f0 = (inst.map().apply(y0) - inst.rhs()).squaredNorm();
  double s = sigma1 + c * sigma2;
  double Gamma = Fsup - Finf + c * f0 + (4 * s / (tol.alpha * c) + 1 / c) * (q0.squaredNorm() + kappa * kappa);

  TheoryConstants tc = theory_constants(inst, c, tol, y0, q0);
  EXPECT_NEAR(tc.sigma1, sigma1, 1e-10 * sigma1);
  EXPECT_NEAR(tc.sigma2, sigma2, 1e-10 * sigma2);
  EXPECT_NEAR(tc.kappaC, kappa, 1e-9 * kappa);
  EXPECT_NEAR(tc.Gamma, Gamma, 1e-9 * Gamma);
  EXPECT_EQ(tc.epoch_bound, std::ceil(s / tol.alpha));
  EXPECT_NEAR(tc.multiplier_bound, std::max(q0.norm(), kappa), 1e-9 * kappa);
}

TEST(Sadmm, ImmediateTermination) {
  // y0 = 0 solves every block subproblem exactly, so v1 = 0.
  ProblemInstance inst = scalar_instance(1.0, 0.5, 1.0);
  BlockVector y0(inst.sizes(), vec({0}));
  SadmmResult r = s_admm(inst, y0, vec({0.0}), {1.0}, 2.0, SadmmOptions{});
  ProblemInstance flat = scalar_instance(1.0, 0.0, 1.0);
  SadmmResult r0 = s_admm(flat, y0, vec({0.0}), {1.0}, 2.0, SadmmOptions{});
  EXPECT_EQ(r0.iterations, 1);
  EXPECT_EQ(r0.epochs, 0);
  EXPECT_EQ(r0.T, 0.0);
  EXPECT_EQ(r0.v.data(), Vec::Zero(1));
  // q_hat = q0 + c (A y1 - b) with y1 = 0.
  EXPECT_EQ(r0.q, vec({0.0}));
  EXPECT_GT(r.iterations, 1);
}

TEST(Sadmm, InputErrors) {
  ProblemInstance inst = micro_qpbc();
  BlockVector y0(inst.sizes(), vec({0.5, 0.5}));
  SadmmOptions o;
  EXPECT_THROW(s_admm(inst, y0, Vec::Zero(1), {0.5}, 1.0, o), ShapeError);
  EXPECT_THROW(s_admm(inst, y0, Vec::Zero(1), {0.5, 0.5}, 0.0, o), InvalidArgumentError);
  EXPECT_THROW(s_admm(inst, BlockVector(inst.sizes(), vec({2, 0})), Vec::Zero(1), {0.5, 0.5}, 1.0, o),
               OutOfDomainError);
  o.tol.alpha = 1e-20;
  EXPECT_THROW(s_admm(inst, y0, Vec::Zero(1), {0.5, 0.5}, 1.0, o), InvalidArgumentError);
}

TEST(Sadmm, IterationCap) {
  ProblemInstance inst = gen_qpbc({6, 2, 1});
  SadmmOptions o;
  o.max_iterations = 2;
  EXPECT_THROW(s_admm(inst, *inst.initial_point(), Vec::Zero(2), std::vector<double>(6, 0.001), 1.0, o),
               NonconvergenceError);
}

TEST(Sadmm, StepsizeModeNames) {
  EXPECT_EQ(parse_stepsize_mode("fixed"), StepsizeMode::fixed);
  EXPECT_STREQ(to_string(StepsizeMode::adaptive), "adaptive");
  EXPECT_THROW(parse_stepsize_mode("slow"), InvalidArgumentError);
}

TEST(Sadmm, TraceCsv) {
  ProblemInstance inst = micro_qpbc();
  SadmmOptions o;
  o.record_trace = true;
  SadmmResult r = s_admm(inst, BlockVector(inst.sizes(), vec({0.8, 0.1})), Vec::Zero(1), {0.5, 0.5}, 1.0, o);
  ASSERT_EQ(static_cast<long>(r.trace.size()), r.iterations);
  std::ostringstream os;
  write_trace_csv(os, r.trace);
  std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "i,k,v_sq,delta,T,feasibility,c,lambda_min,lambda_max");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), r.iterations + 1);
}

class SadmmProperty : public ::testing::TestWithParam<int> {};

TEST_P(SadmmProperty, TheoryInvariants) {
  const int seed = GetParam();
  const auto useed = static_cast<std::uint64_t>(seed);
  std::optional<Coupled> small;
  std::optional<ProblemInstance> gen;
  if (seed % 3 == 0) {
    small = coupled_instance(useed);
  } else {
    gen = seed % 3 == 1 ? gen_dqp({3, 3, 10.0, useed}) : gen_qpbc({6, 1 + seed % 2, useed});
  }
  const ProblemInstance& inst = small ? small->inst : *gen;
  const BlockVector& y0 = small ? small->y0 : *inst.initial_point();
  const Metadata& md = *inst.metadata();
  const double c = seed % 3 == 2 ? 20.0 : 1.0;
  ToleranceConfig tol = epoch_tol();
  Vec q0 = Vec::Zero(inst.rhs().size());
  TheoryConstants tc = theory_constants(inst, c, tol, y0, q0);

  for (StepsizeMode mode : {StepsizeMode::fixed, StepsizeMode::adaptive}) {
    Recorder rec;
    std::vector<double> lam0 = theory_stepsizes(md);
    if (mode == StepsizeMode::adaptive) lam0.assign(lam0.size(), 10.0);
    SadmmResult res = s_admm(inst, y0, q0, lam0, c, recording(inst, rec, c, mode, tol));
    ASSERT_EQ(static_cast<long>(rec.iters.size()), res.iterations);

    // Running state for the potential decomposition.
    double L0 = augmented_lagrangian(inst, y0, q0, c);
    double qsum = 0.0;
    Vec q_epoch = q0;
    int epochs = 0;
    for (size_t j = 0; j < rec.iters.size(); ++j) {
      const SadmmIteration& it = rec.iters[j];
      double resid = it.v_sq + it.delta;
      EXPECT_GE(it.T, it.T_prev);
      if (it.terminated) break;
      EXPECT_GT(rec.drop[j], 0.0);

      double sig = tc.sigma1;
      if (mode == StepsizeMode::adaptive) {
        auto [lo, hi] = std::minmax_element(rec.lambda[j].begin(), rec.lambda[j].end());
        sig = adaptive_sigma1(*lo, *hi, md.L_sq());
      }
      EXPECT_LE(resid / (sig + c * tc.sigma2), (it.T - it.T_prev) * (1 + 1e-9) + 1e-12);
      if (resid <= tol.C * tol.C) {
        Vec r = inst.map().apply(BlockVector(inst.sizes(), rec.y_after[j])) - inst.rhs();
        EXPECT_LE(c * r.norm(), 2.0 * tc.multiplier_bound * (1 + 1e-9));
      }
      if (it.multiplier_updated) {
        ++epochs;
        double L_end = augmented_lagrangian(inst, BlockVector(inst.sizes(), rec.y_after[j]), q_epoch, c);
        double expected = (L0 - L_end) + qsum;
        EXPECT_NEAR(it.T, expected, 1e-8 * std::max(1.0, std::abs(it.T)));
        qsum += (rec.q_after[j] - q_epoch).squaredNorm() / c;
        q_epoch = rec.q_after[j];
        EXPECT_LE(q_epoch.norm(), std::max(q0.norm(), tc.kappaC) * (1 + 1e-9));
      } else {
        EXPECT_EQ(rec.q_after[j], j == 0 ? q0 : rec.q_after[j - 1]);
      }
    }
    EXPECT_EQ(epochs, res.epochs);
    if (mode == StepsizeMode::fixed) EXPECT_LE(res.epochs, tc.epoch_bound);
    EXPECT_EQ(res.lambda.size(), lam0.size());

    // The output satisfies the residual and inclusion parts of the check.
    Certificate cert{res.y, res.q, res.v, 0.0};
    StationarityReport rep = check_rho_eta_stationary(inst, cert, tol);
    EXPECT_TRUE(rep.inclusion_ok);
    EXPECT_LE(rep.residual_sq, tol.rho * tol.rho);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, SadmmProperty, ::testing::Range(0, 15));

TEST(SadmmProperty, MultiplierEpochsOccur) {
  int total = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Coupled cs = coupled_instance(seed);
    SadmmOptions o;
    o.tol = epoch_tol();
    o.mode = StepsizeMode::fixed;
    SadmmResult r = s_admm(cs.inst, cs.y0, Vec::Zero(2), theory_stepsizes(*cs.inst.metadata()), 1.0, o);
    EXPECT_EQ(static_cast<int>(r.epoch_ends.size()), r.epochs);
    EXPECT_TRUE(std::is_sorted(r.epoch_ends.begin(), r.epoch_ends.end()));
    total += r.epochs;
  }
  EXPECT_GT(total, 10);
}
