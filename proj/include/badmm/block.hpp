#pragma once

#include <Eigen/Dense>
#include <vector>

namespace badmm {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Partition n = n_1 + ... + n_B of a flat coordinate range.
class BlockSizes {
 public:
  BlockSizes() = default;
  explicit BlockSizes(std::vector<Index> sizes);
  static BlockSizes uniform(Index count, Index size);

  Index count() const { return static_cast<Index>(sizes_.size()); }
  Index size(Index t) const { return sizes_[t]; }
  Index offset(Index t) const { return offsets_[t]; }
  Index total() const { return offsets_.empty() ? 0 : offsets_.back(); }
  const std::vector<Index>& sizes() const { return sizes_; }

  bool operator==(const BlockSizes& other) const { return sizes_ == other.sizes_; }
  bool operator!=(const BlockSizes& other) const { return !(*this == other); }

 private:
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;
};

/// Flat vector viewed through a BlockSizes partition. Block accessors are
/// Eigen segments into the same storage.
class BlockVector {
 public:
  BlockVector() = default;
  explicit BlockVector(BlockSizes sizes);
  BlockVector(BlockSizes sizes, Vec data);

  const BlockSizes& sizes() const { return sizes_; }
  Index count() const { return sizes_.count(); }
  Index total() const { return sizes_.total(); }

  Vec& data() { return data_; }
  const Vec& data() const { return data_; }

  auto block(Index t) { return data_.segment(sizes_.offset(t), sizes_.size(t)); }
  auto block(Index t) const { return data_.segment(sizes_.offset(t), sizes_.size(t)); }

  // Coordinates of blocks 0..t-1 and t+1..B-1.
  auto before(Index t) const { return data_.head(sizes_.offset(t)); }
  auto after(Index t) const {
    Index start = sizes_.offset(t) + sizes_.size(t);
    return data_.segment(start, total() - start);
  }

  double norm() const { return data_.norm(); }
  double squared_norm() const { return data_.squaredNorm(); }

  bool operator==(const BlockVector& other) const {
    return sizes_ == other.sizes_ && data_ == other.data_;
  }

 private:
  BlockSizes sizes_;
  Vec data_;
};

/// A(x) = sum_t A_t x_t with dense l x n_t blocks.
class BlockLinearMap {
 public:
  BlockLinearMap() = default;
  explicit BlockLinearMap(std::vector<Mat> blocks);

  Index rows() const { return rows_; }
  Index count() const { return static_cast<Index>(blocks_.size()); }
  const Mat& block(Index t) const { return blocks_[t]; }
  const std::vector<Mat>& blocks() const { return blocks_; }
  const BlockSizes& column_sizes() const { return sizes_; }
  bool is_zero() const;

  Vec apply(const BlockVector& x) const;
  BlockVector adjoint_apply(const Vec& u) const;

  Mat stacked() const;

 private:
  void check_codomain(const Vec& u) const;

  std::vector<Mat> blocks_;
  BlockSizes sizes_;
  Index rows_ = 0;
};

struct BlockNorms {
  std::vector<double> block;  // spectral norm of each A_t
  double dagger_sq = 0.0;     // sum of squared block norms
  double nu_plus = 0.0;       // smallest positive singular value of the stacked map
  double sigma_max = 0.0;
};

BlockNorms block_norms(const BlockLinearMap& map);

double spectral_norm(const Mat& m);

}  // namespace badmm
