#pragma once

#include <memory>
#include <random>
#include <vector>

#include "badmm/certify.hpp"
#include "badmm/problem.hpp"

namespace badmm::testing {

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline Mat mat(Index rows, Index cols, std::initializer_list<double> row_major) {
  Mat m(rows, cols);
  auto it = row_major.begin();
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = *it++;
  }
  return m;
}

inline std::vector<TermPtr> boxes(const BlockSizes& sizes, double omega) {
  std::vector<TermPtr> t;
  for (Index i = 0; i < sizes.count(); ++i) t.push_back(std::make_shared<BoxIndicator>(sizes.size(i), omega));
  return t;
}

// Quadratic f over boxes of radius omega with the given blocks of A.
inline ProblemInstance quad_instance(const BlockSizes& sizes, const Mat& P, const Vec& r, std::vector<Mat> A,
                                     const Vec& b, double omega) {
  return ProblemInstance(std::make_shared<QuadraticOracle>(sizes, P, r), boxes(sizes, omega),
                         BlockLinearMap(std::move(A)), b);
}

// One block, f = 0, box [-omega, omega], A = [a], b.
inline ProblemInstance scalar_instance(double a, double b, double omega) {
  BlockSizes s({1});
  return quad_instance(s, Mat::Zero(1, 1), Vec::Zero(1), {Mat::Constant(1, 1, a)}, Vec::Constant(1, b), omega);
}

// The desk-scale QP-BC instance: f = -|x|^2/2, x1 + x2 = 1, box [-1, 1].
inline ProblemInstance micro_qpbc() {
  BlockSizes s({1, 1});
  ProblemInstance inst = quad_instance(s, -Mat::Identity(2, 2), Vec::Zero(2), {Mat::Ones(1, 1), Mat::Ones(1, 1)},
                                       Vec::Ones(1), 1.0);
  inst.set_witness(BlockVector(s, vec({0.5, 0.5})));
  inst.set_metadata(derive_metadata(inst));
  return inst;
}

inline Vec random_vec(std::mt19937_64& g, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(g);
  return v;
}

inline Mat random_mat(std::mt19937_64& g, Index r, Index c, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Mat m(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) m(i, j) = u(g);
  }
  return m;
}

// max over the corners of [-omega, omega]^n of <xi, z - y>; n <= 16.
inline double corner_support_gap(const Vec& xi, const Vec& y, double omega) {
  const Index n = xi.size();
  double best = -1e300;
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    double s = 0.0;
    for (Index j = 0; j < n; ++j) {
      double z = (mask >> j) & 1ul ? omega : -omega;
      s += xi[j] * (z - y[j]);
    }
    best = std::max(best, s);
  }
  return best;
}

// Lagrangian of the instance evaluated term by term from dense data.
inline double dense_lagrangian(const Mat& P, const Vec& r, const Mat& A, const Vec& b, const Vec& y, const Vec& p,
                               double c) {
  Vec res = A * y - b;
  return 0.5 * y.dot(P * y) + r.dot(y) + p.dot(res) + 0.5 * c * res.squaredNorm();
}

}  // namespace badmm::testing
