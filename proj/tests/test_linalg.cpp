#include <doctest.h>

#include "rpd/norms.hpp"
#include "test_util.hpp"

using namespace rpd;
using namespace testutil;

namespace {

// random block grid with every row and column support nonempty
BlockOperatorMatrix random_grid(const std::vector<int>& row_dims,
                                const std::vector<int>& col_dims, Rng& rng) {
  std::map<std::pair<int, int>, LinearBlock> blocks;
  const int q = static_cast<int>(row_dims.size());
  const int p = static_cast<int>(col_dims.size());
  for (int k = 0; k < q; ++k)
    for (int j = 0; j < p; ++j)
      if (rng.uniform() < 0.6 || j == k % p || k == j % q)
        blocks.emplace(std::make_pair(k, j), random_block(row_dims[k], col_dims[j], rng));
  return BlockOperatorMatrix(row_dims, col_dims, blocks);
}

BlockVector random_block_vector(const std::vector<int>& dims, Rng& rng) {
  BlockVector v;
  for (int d : dims) v.blocks.push_back(random_vec(d, rng));
  return v;
}

Vec flatten(const BlockVector& v) {
  Vec out;
  for (const auto& b : v.blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("apply: scalar block is scalar multiplication") {
    std::map<std::pair<int, int>, LinearBlock> blocks{{{0, 0}, LinearBlock::scalar(2.0)}};
    BlockOperatorMatrix L({1}, {1}, blocks);
    BlockVector x(std::vector<Vec>{Vec{3.0}});
    CHECK(L.apply(x).blocks[0][0] == doctest::Approx(6.0));
    CHECK(L.apply_adjoint(x).blocks[0][0] == doctest::Approx(6.0));
  }

  TEST_CASE("apply: zero vector maps to zero") {
    Rng rng(11);
    BlockOperatorMatrix L = random_grid({2, 3}, {2, 1, 2}, rng);
    BlockVector x = BlockVector::zeros(L.col_dims());
    for (const auto& b : L.apply(x).blocks)
      for (double v : b) CHECK(v == 0.0);
  }

  TEST_CASE("apply/adjoint match the materialized dense operator") {
    Rng rng(7);
    const std::vector<int> row_dims{3, 2}, col_dims{2, 4, 1};
    for (int trial = 0; trial < 20; ++trial) {
      BlockOperatorMatrix L = random_grid(row_dims, col_dims, rng);
      const auto dense = materialize(L);
      BlockVector x = random_block_vector(col_dims, rng);
      BlockVector v = random_block_vector(row_dims, rng);
      const Vec got = flatten(L.apply(x));
      const Vec want = dense_matvec(dense, 5, 7, flatten(x));
      CHECK(vec_max_diff(got, want) < 1e-12);
      const Vec got_t = flatten(L.apply_adjoint(v));
      const Vec want_t = dense_matvec_t(dense, 5, 7, flatten(v));
      CHECK(vec_max_diff(got_t, want_t) < 1e-12);
    }
  }

  TEST_CASE("adjoint identity <Lx, v> = <x, L*v>") {
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
      BlockOperatorMatrix L = random_grid({2, 2}, {3, 1}, rng);
      BlockVector x = random_block_vector(L.col_dims(), rng);
      BlockVector v = random_block_vector(L.row_dims(), rng);
      const double lhs = L.apply(x).inner(v);
      const double rhs = x.inner(L.apply_adjoint(v));
      CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
    }
  }

  TEST_CASE("block adjoint is an involution") {
    Rng rng(17);
    const LinearBlock M = random_block(4, 3, rng);
    const LinearBlock MTT = M.adjoint().adjoint();
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 3; ++c) CHECK(M.at(r, c) == MTT.at(r, c));
  }

  TEST_CASE("empty row or column support is rejected") {
    std::map<std::pair<int, int>, LinearBlock> blocks{{{0, 0}, LinearBlock::scalar(1.0)}};
    CHECK_THROWS_AS(BlockOperatorMatrix({1, 1}, {1}, blocks), StructuralError);
    CHECK_THROWS_AS(BlockOperatorMatrix({1}, {1, 1}, blocks), StructuralError);
  }

  TEST_CASE("scaled_norm: scalar cases") {
    std::map<std::pair<int, int>, LinearBlock> id{{{0, 0}, LinearBlock::scalar(1.0)}};
    BlockOperatorMatrix L({1}, {1}, id);
    CHECK(scaled_norm(L, DiagonalMetric::uniform(1.0, {1}), DiagonalMetric::uniform(1.0, {1}),
                      1e-12) == doctest::Approx(1.0));
    const double tau = 0.3, rho = 1.7;
    CHECK(scaled_norm(L, DiagonalMetric::uniform(tau, {1}), DiagonalMetric::uniform(rho, {1}),
                      1e-12) == doctest::Approx(std::sqrt(tau * rho)));
    std::map<std::pair<int, int>, LinearBlock> two{{{0, 0}, LinearBlock::scalar(2.0)}};
    BlockOperatorMatrix L2({1}, {1}, two);
    CHECK(scaled_norm(L2, DiagonalMetric::uniform(0.25, {1}), DiagonalMetric::uniform(0.25, {1}),
                      1e-12) == doctest::Approx(0.5));
  }

  TEST_CASE("scaled_norm matches a full SVD of the scaled dense matrix") {
    Rng rng(23);
    const LinearBlock M = random_block(5, 4, rng);
    Vec wd = random_vec(4, rng), ud = random_vec(5, rng);
    for (auto& v : wd) v = 0.1 + std::abs(v);
    for (auto& v : ud) v = 0.1 + std::abs(v);
    std::map<std::pair<int, int>, LinearBlock> blocks{{{0, 0}, M}};
    BlockOperatorMatrix L({5}, {4}, blocks);
    const double est = scaled_norm(L, DiagonalMetric({wd}), DiagonalMetric({ud}), 1e-10);
    // oracle: materialize diag(u)^{1/2} M diag(w)^{1/2} and take its top singular value
    std::vector<double> scaled(20);
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 4; ++c)
        scaled[static_cast<std::size_t>(r) * 4 + c] =
            std::sqrt(ud[r]) * M.at(r, c) * std::sqrt(wd[c]);
    const double svd = eigen_top_singular(scaled, 5, 4);
    CHECK(est == doctest::Approx(svd).epsilon(1e-8));
  }

  TEST_CASE("scaled_norm survives a start vector in the kernel") {
    // first-difference operator annihilates the all-ones start
    std::vector<double> d{-1.0, 1.0};
    std::map<std::pair<int, int>, LinearBlock> blocks{{{0, 0}, LinearBlock(1, 2, d)}};
    BlockOperatorMatrix L({1}, {2}, blocks);
    const double est = scaled_norm(L, DiagonalMetric::uniform(1.0, {2}),
                                   DiagonalMetric::uniform(1.0, {1}), 1e-12);
    CHECK(est == doctest::Approx(std::sqrt(2.0)));
  }

  TEST_CASE("scaled_norm is absolutely homogeneous in the operator") {
    Rng rng(29);
    BlockOperatorMatrix L = random_grid({2, 2}, {2, 2}, rng);
    const DiagonalMetric W = DiagonalMetric::uniform(0.7, L.col_dims());
    const DiagonalMetric U = DiagonalMetric::uniform(0.4, L.row_dims());
    const double base = scaled_norm(L, W, U, 1e-11);
    const double c = 3.5;
    std::map<std::pair<int, int>, LinearBlock> scaled_blocks;
    for (int k = 0; k < L.q(); ++k)
      for (int j : L.row_support(k)) {
        LinearBlock blk = L.block(k, j);
        for (auto& v : blk.a) v *= c;
        scaled_blocks.emplace(std::make_pair(k, j), blk);
      }
    BlockOperatorMatrix Lc(L.row_dims(), L.col_dims(), scaled_blocks);
    CHECK(scaled_norm(Lc, W, U, 1e-11) == doctest::Approx(c * base).epsilon(1e-8));
  }

  TEST_CASE("scaled_norm_bound: single block equals the exact norm") {
    Rng rng(31);
    const LinearBlock M = random_block(3, 3, rng);
    std::map<std::pair<int, int>, LinearBlock> blocks{{{0, 0}, M}};
    BlockOperatorMatrix L({3}, {3}, blocks);
    const DiagonalMetric W = DiagonalMetric::uniform(1.0, {3});
    const DiagonalMetric U = DiagonalMetric::uniform(1.0, {3});
    CHECK(scaled_norm_bound(L, W, U) ==
          doctest::Approx(scaled_norm(L, W, U, 1e-12)).epsilon(1e-9));
  }

  TEST_CASE("scaled_norm_bound: orthogonal rows add in quadrature") {
    std::map<std::pair<int, int>, LinearBlock> blocks{{{0, 0}, LinearBlock::scalar(3.0)},
                                                      {{1, 0}, LinearBlock::scalar(4.0)}};
    BlockOperatorMatrix L({1, 1}, {1}, blocks);
    CHECK(scaled_norm_bound(L, DiagonalMetric::uniform(1.0, {1}),
                            DiagonalMetric::uniform(1.0, {1, 1})) == doctest::Approx(5.0));
  }

  TEST_CASE("scaled_norm_bound dominates the spectral estimate") {
    Rng rng(37);
    for (int trial = 0; trial < 10; ++trial) {
      BlockOperatorMatrix L = random_grid({2, 3}, {3, 2}, rng);
      const DiagonalMetric W = DiagonalMetric::uniform(0.5, L.col_dims());
      const DiagonalMetric U = DiagonalMetric::uniform(0.8, L.row_dims());
      CHECK(scaled_norm_bound(L, W, U) >= scaled_norm(L, W, U, 1e-10) - 1e-9);
    }
  }

  TEST_CASE("DiagonalMetric rejects nonpositive entries") {
    CHECK_THROWS_AS(DiagonalMetric({Vec{1.0, 0.0}}), StructuralError);
    CHECK_THROWS_AS(DiagonalMetric({Vec{-1.0}}), StructuralError);
  }
}
