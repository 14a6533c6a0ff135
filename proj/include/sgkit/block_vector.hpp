#pragma once

// Block vector with one length-N_x block per chaos mode, stored contiguously
// block-major (all of block j adjacent).

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace sgkit {

class BlockVector {
 public:
  BlockVector() = default;
  BlockVector(int n_blocks, int block_len)
      : n_blocks_(n_blocks), block_len_(block_len),
        data_(static_cast<std::size_t>(n_blocks) * static_cast<std::size_t>(block_len), 0.0) {}

  int n_blocks() const { return n_blocks_; }
  int block_len() const { return block_len_; }
  std::size_t size() const { return data_.size(); }

  std::span<double> block(int j) {
    return {data_.data() + static_cast<std::size_t>(j) * block_len_, static_cast<std::size_t>(block_len_)};
  }
  std::span<const double> block(int j) const {
    return {data_.data() + static_cast<std::size_t>(j) * block_len_, static_cast<std::size_t>(block_len_)};
  }
  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  void set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

  double dot(const BlockVector& other) const {
    double s = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) s += data_[i] * other.data_[i];
    return s;
  }
  double norm2() const { return std::sqrt(dot(*this)); }

  /// *this += alpha * x
  void axpy(double alpha, const BlockVector& x) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += alpha * x.data_[i];
  }
  void scale(double alpha) {
    for (auto& v : data_) v *= alpha;
  }

  bool same_shape(const BlockVector& other) const {
    return n_blocks_ == other.n_blocks_ && block_len_ == other.block_len_;
  }

 private:
  int n_blocks_ = 0;
  int block_len_ = 0;
  std::vector<double> data_;
};

/// Matrix-free block operator contract shared by the SG operator, the
/// preconditioners, and test oracles.
struct BlockOperator {
  virtual ~BlockOperator() = default;
  virtual void apply(const BlockVector& u, BlockVector& v) const = 0;
};

}  // namespace sgkit
