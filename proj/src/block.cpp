#include "badmm/block.hpp"

#include <string>

#include "badmm/errors.hpp"

namespace badmm {

BlockSizes::BlockSizes(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw ShapeError("block partition needs at least one block");
  offsets_.reserve(sizes_.size() + 1);
  offsets_.push_back(0);
  for (Index s : sizes_) {
    if (s < 1) throw ShapeError("block sizes must be positive");
    offsets_.push_back(offsets_.back() + s);
  }
}

BlockSizes BlockSizes::uniform(Index count, Index size) {
  return BlockSizes(std::vector<Index>(static_cast<size_t>(count), size));
}

BlockVector::BlockVector(BlockSizes sizes) : sizes_(std::move(sizes)), data_(Vec::Zero(sizes_.total())) {}

BlockVector::BlockVector(BlockSizes sizes, Vec data) : sizes_(std::move(sizes)), data_(std::move(data)) {
  if (data_.size() != sizes_.total()) {
    throw ShapeError("block vector data has length " + std::to_string(data_.size()) + ", expected " +
                     std::to_string(sizes_.total()));
  }
}

BlockLinearMap::BlockLinearMap(std::vector<Mat> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw ShapeError("linear map needs at least one block");
  rows_ = blocks_.front().rows();
  std::vector<Index> cols;
  for (const Mat& a : blocks_) {
    if (a.rows() != rows_) throw ShapeError("linear map blocks disagree on row count");
    cols.push_back(a.cols());
  }
  sizes_ = BlockSizes(std::move(cols));
}

bool BlockLinearMap::is_zero() const {
  for (const Mat& a : blocks_) {
    if ((a.array() != 0.0).any()) return false;
  }
  return true;
}

Vec BlockLinearMap::apply(const BlockVector& x) const {
  if (x.sizes() != sizes_) throw ShapeError("apply: block sizes do not match the map");
  Vec out = Vec::Zero(rows_);
  for (Index t = 0; t < count(); ++t) out.noalias() += blocks_[t] * x.block(t);
  return out;
}

void BlockLinearMap::check_codomain(const Vec& u) const {
  if (u.size() != rows_) {
    throw ShapeError("vector of length " + std::to_string(u.size()) + " is not in the codomain (" +
                     std::to_string(rows_) + ")");
  }
}

BlockVector BlockLinearMap::adjoint_apply(const Vec& u) const {
  check_codomain(u);
  BlockVector out(sizes_);
  for (Index t = 0; t < count(); ++t) out.block(t).noalias() = blocks_[t].transpose() * u;
  return out;
}

Mat BlockLinearMap::stacked() const {
  Mat s(rows_, sizes_.total());
  for (Index t = 0; t < count(); ++t) s.middleCols(sizes_.offset(t), sizes_.size(t)) = blocks_[t];
  return s;
}

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

BlockNorms block_norms(const BlockLinearMap& map) {
  if (map.is_zero()) throw DegenerateOperatorError("block_norms: the linear map is identically zero");
  BlockNorms out;
  for (const Mat& a : map.blocks()) {
    double s = spectral_norm(a);
    out.block.push_back(s);
    out.dagger_sq += s * s;
  }
  Eigen::JacobiSVD<Mat> svd(map.stacked());
  const Vec& sv = svd.singularValues();
  out.sigma_max = sv(0);
  double threshold = 1e-10 * out.sigma_max;
  out.nu_plus = out.sigma_max;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) out.nu_plus = sv(i);
  }
  return out;
}

}  // namespace badmm
