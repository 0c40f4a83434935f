#pragma once

/// Block-structured vectors, linear operators and diagonal metrics over a
/// finite-dimensional real Hilbert direct sum.  All values are immutable
/// after construction and all operations are pure.

#include <map>
#include <utility>
#include <vector>

#include "rpd/common.hpp"

namespace rpd {

/// Element of a direct sum: an ordered list of dense real blocks.  The inner
/// product is the sum of per-block Euclidean inner products.
struct BlockVector {
  std::vector<Vec> blocks;

  BlockVector() = default;
  explicit BlockVector(std::vector<Vec> b) : blocks(std::move(b)) {}

  /// All-zero vector with the given block dimensions.
  static BlockVector zeros(const std::vector<int>& dims) {
    BlockVector z;
    z.blocks.reserve(dims.size());
    for (int d : dims) z.blocks.emplace_back(static_cast<std::size_t>(d), 0.0);
    return z;
  }

  int block_count() const { return static_cast<int>(blocks.size()); }

  std::vector<int> dims() const {
    std::vector<int> d;
    d.reserve(blocks.size());
    for (const auto& b : blocks) d.push_back(static_cast<int>(b.size()));
    return d;
  }

  int total_dim() const {
    int n = 0;
    for (const auto& b : blocks) n += static_cast<int>(b.size());
    return n;
  }

  double inner(const BlockVector& o) const {
    require(blocks.size() == o.blocks.size(), "BlockVector: block count mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) s += dot(blocks[i], o.blocks[i]);
    return s;
  }

  double norm() const {
    double s = 0.0;
    for (const auto& b : blocks) s += dot(b, b);
    return std::sqrt(s);
  }

  double distance(const BlockVector& o) const {
    double s = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i)
      for (std::size_t r = 0; r < blocks[i].size(); ++r) {
        const double d = blocks[i][r] - o.blocks[i][r];
        s += d * d;
      }
    return std::sqrt(s);
  }

  bool same_shape(const BlockVector& o) const {
    if (blocks.size() != o.blocks.size()) return false;
    for (std::size_t i = 0; i < blocks.size(); ++i)
      if (blocks[i].size() != o.blocks[i].size()) return false;
    return true;
  }
};

/// Dense row-major matrix block; a "zero" tagged block acts as the 0 map and
/// stores no entries.
struct LinearBlock {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // row-major, empty when zero-tagged
  bool zero = false;

  LinearBlock() = default;
  LinearBlock(int r, int c, std::vector<double> entries)
      : rows(r), cols(c), a(std::move(entries)) {
    require(r > 0 && c > 0, "LinearBlock: dimensions must be positive");
    require(static_cast<int>(a.size()) == r * c, "LinearBlock: entry count mismatch");
  }

  static LinearBlock zero_block(int r, int c) {
    LinearBlock b;
    b.rows = r;
    b.cols = c;
    b.zero = true;
    return b;
  }

  static LinearBlock identity(int n) {
    std::vector<double> e(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i) * n + i] = 1.0;
    return LinearBlock(n, n, std::move(e));
  }

  static LinearBlock scalar(double v) { return LinearBlock(1, 1, {v}); }

  double at(int r, int c) const {
    return zero ? 0.0 : a[static_cast<std::size_t>(r) * cols + c];
  }

  bool is_zero() const { return zero; }

  /// y += M x
  void apply_add(const Vec& x, Vec& y) const {
    require(static_cast<int>(x.size()) == cols && static_cast<int>(y.size()) == rows,
            "LinearBlock::apply_add: dimension mismatch");
    if (zero) return;
    for (int r = 0; r < rows; ++r) {
      double s = 0.0;
      const double* row = &a[static_cast<std::size_t>(r) * cols];
      for (int c = 0; c < cols; ++c) s += row[c] * x[c];
      y[r] += s;
    }
  }

  /// y += M^T v
  void apply_adjoint_add(const Vec& v, Vec& y) const {
    require(static_cast<int>(v.size()) == rows && static_cast<int>(y.size()) == cols,
            "LinearBlock::apply_adjoint_add: dimension mismatch");
    if (zero) return;
    for (int c = 0; c < cols; ++c) {
      double s = 0.0;
      for (int r = 0; r < rows; ++r) s += a[static_cast<std::size_t>(r) * cols + c] * v[r];
      y[c] += s;
    }
  }

  Vec apply(const Vec& x) const {
    Vec y(rows, 0.0);
    apply_add(x, y);
    return y;
  }

  Vec apply_adjoint(const Vec& v) const {
    Vec y(cols, 0.0);
    apply_adjoint_add(v, y);
    return y;
  }

  LinearBlock adjoint() const {
    if (zero) return zero_block(cols, rows);
    std::vector<double> t(a.size());
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        t[static_cast<std::size_t>(c) * rows + r] = a[static_cast<std::size_t>(r) * cols + c];
    return LinearBlock(cols, rows, std::move(t));
  }
};

/// Sparse q x p grid of linear blocks; zero blocks are never stored.  Row
/// support L_k and column support L*_j are kept sorted and must be nonempty.
class BlockOperatorMatrix {
 public:
  BlockOperatorMatrix(std::vector<int> row_dims, std::vector<int> col_dims,
                      const std::map<std::pair<int, int>, LinearBlock>& blocks)
      : row_dims_(std::move(row_dims)), col_dims_(std::move(col_dims)) {
    q_ = static_cast<int>(row_dims_.size());
    p_ = static_cast<int>(col_dims_.size());
    require(p_ >= 1 && q_ >= 1, "BlockOperatorMatrix: empty shape");
    row_support_.resize(q_);
    col_support_.resize(p_);
    for (const auto& [key, blk] : blocks) {
      const auto [k, j] = key;
      require(k >= 0 && k < q_ && j >= 0 && j < p_, "BlockOperatorMatrix: index out of range");
      if (blk.is_zero()) continue;  // zero blocks are not stored
      require(blk.rows == row_dims_[k] && blk.cols == col_dims_[j],
              "BlockOperatorMatrix: block shape mismatch");
      entries_.emplace(key, blk);
      row_support_[k].push_back(j);
      col_support_[j].push_back(k);
    }
    for (int k = 0; k < q_; ++k)
      require(!row_support_[k].empty(), "BlockOperatorMatrix: empty row support");
    for (int j = 0; j < p_; ++j)
      require(!col_support_[j].empty(), "BlockOperatorMatrix: empty column support");
  }

  int p() const { return p_; }
  int q() const { return q_; }
  const std::vector<int>& row_dims() const { return row_dims_; }
  const std::vector<int>& col_dims() const { return col_dims_; }

  /// L_k: columns j with a nonzero block in row k (ascending).
  const std::vector<int>& row_support(int k) const { return row_support_[k]; }
  /// L*_j: rows k with a nonzero block in column j (ascending).
  const std::vector<int>& col_support(int j) const { return col_support_[j]; }

  const LinearBlock& block(int k, int j) const {
    auto it = entries_.find({k, j});
    require(it != entries_.end(), "BlockOperatorMatrix: block not stored");
    return it->second;
  }

  bool has_block(int k, int j) const { return entries_.count({k, j}) > 0; }

  /// (L x)_k = sum over j in L_k of L_{k,j} x_j.
  BlockVector apply(const BlockVector& x) const {
    require(x.block_count() == p_, "apply: primal block count mismatch");
    for (int j = 0; j < p_; ++j)
      require(static_cast<int>(x.blocks[j].size()) == col_dims_[j],
              "apply: primal block dimension mismatch");
    BlockVector y = BlockVector::zeros(row_dims_);
    for (int k = 0; k < q_; ++k)
      for (int j : row_support_[k]) block(k, j).apply_add(x.blocks[j], y.blocks[k]);
    return y;
  }

  /// (L* v)_j = sum over k in L*_j of L_{k,j}^T v_k.
  BlockVector apply_adjoint(const BlockVector& v) const {
    require(v.block_count() == q_, "apply_adjoint: dual block count mismatch");
    for (int k = 0; k < q_; ++k)
      require(static_cast<int>(v.blocks[k].size()) == row_dims_[k],
              "apply_adjoint: dual block dimension mismatch");
    BlockVector y = BlockVector::zeros(col_dims_);
    for (int j = 0; j < p_; ++j)
      for (int k : col_support_[j]) block(k, j).apply_adjoint_add(v.blocks[k], y.blocks[j]);
    return y;
  }

 private:
  std::vector<int> row_dims_, col_dims_;
  int p_ = 0, q_ = 0;
  std::map<std::pair<int, int>, LinearBlock> entries_;
  std::vector<std::vector<int>> row_support_, col_support_;
};

/// Per-block strictly positive diagonal operator.  Square root and inverse
/// are entrywise and exact.
struct DiagonalMetric {
  std::vector<Vec> diag;

  DiagonalMetric() = default;
  explicit DiagonalMetric(std::vector<Vec> d) : diag(std::move(d)) { validate(); }

  /// value * identity on each block of the given dimensions.
  static DiagonalMetric uniform(double value, const std::vector<int>& dims) {
    std::vector<Vec> d;
    d.reserve(dims.size());
    for (int n : dims) d.emplace_back(static_cast<std::size_t>(n), value);
    return DiagonalMetric(std::move(d));
  }

  void validate() const {
    require(!diag.empty(), "DiagonalMetric: no blocks");
    for (const auto& b : diag) {
      require(!b.empty(), "DiagonalMetric: empty block");
      for (double v : b) require(v > 0.0, "DiagonalMetric: entries must be positive");
    }
  }

  std::vector<int> dims() const {
    std::vector<int> d;
    for (const auto& b : diag) d.push_back(static_cast<int>(b.size()));
    return d;
  }

  double max_entry(int block) const {
    double m = 0.0;
    for (double v : diag[block]) m = std::max(m, v);
    return m;
  }
};

// entrywise products with one metric block
inline Vec mul(const Vec& w, const Vec& x) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = w[i] * x[i];
  return r;
}

inline Vec div(const Vec& x, const Vec& w) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] / w[i];
  return r;
}

inline Vec sqrt_vec(const Vec& w) {
  Vec r(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) r[i] = std::sqrt(w[i]);
  return r;
}

inline Vec inv_vec(const Vec& w) {
  Vec r(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) r[i] = 1.0 / w[i];
  return r;
}

}  // namespace rpd
