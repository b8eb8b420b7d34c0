#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mfop/constructions.hpp"
#include "mfop/error.hpp"
#include "oracles.hpp"

using namespace mfop;

namespace {

Eigen::MatrixXcd eye(std::size_t n) {
  return Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

}  // namespace

TEST_CASE("block layout") {
  const auto l = BlockLayout::triangular(4);
  CHECK(l.total() == 10);
  CHECK(l.offset(3) == 6);
  CHECK(l.size(2) == 3);
  CHECK_THROWS(BlockLayout({2, 0, 1}));
}

TEST_CASE("averaging isometry") {
  const auto l = BlockLayout::triangular(8);
  const auto v = make_averaging_isometry(l, l.total());
  CHECK(v.column(0)[0] == Complex(1.0));
  for (std::size_t i = 1; i < l.total(); ++i) CHECK(v.column(0)[i] == Complex(0.0));
  const auto c3 = v.column(2);
  for (std::size_t i = 3; i < 6; ++i) CHECK(std::abs(c3[i] - 1.0 / std::sqrt(3.0)) < 1e-15);
  CHECK(c3[2] == Complex(0.0));
  CHECK(c3[6] == Complex(0.0));
  const auto vd = oracle::dense(v);
  const auto g = vd.adjoint() * vd;
  const auto b = static_cast<Eigen::Index>(l.block_count());
  CHECK(oracle::max_abs(g.topLeftCorner(b, b) - eye(l.block_count())) <= 1e-12);
  CHECK(oracle::max_abs(g.bottomRightCorner(g.rows() - b, g.cols() - b)) == 0.0);
}

TEST_CASE("complement basis") {
  const auto l = BlockLayout::triangular(6);
  const auto w = make_complement_basis(l, l.total());
  const auto wd = oracle::dense(w);
  const auto vd = oracle::dense(make_averaging_isometry(l, l.total()));
  // block 2 gives the single column (1, -1)/sqrt 2 up to sign
  CHECK(std::abs(std::abs(wd(1, 0)) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(wd(1, 0) + wd(2, 0)) < 1e-15);
  const auto nb = static_cast<Eigen::Index>(l.total() - l.block_count());
  const auto g = wd.leftCols(nb).adjoint() * wd.leftCols(nb);
  CHECK(oracle::max_abs(g - eye(static_cast<std::size_t>(nb))) <= 1e-12);
  CHECK(oracle::max_abs(vd.adjoint() * wd) <= 1e-12);
  for (std::size_t j = 0; j < static_cast<std::size_t>(nb); ++j) CHECK(w.col_rows(j).size() <= l.block_count());
}

TEST_CASE("interleaved unitary") {
  const auto l = BlockLayout::triangular(10);
  const auto ut = make_interleaved_unitary(l);
  const auto ud = oracle::dense(ut.u);
  const auto n = static_cast<Eigen::Index>(ut.domain_interior);
  REQUIRE(n > 0);
  CHECK(oracle::max_abs(ud.leftCols(n).adjoint() * ud.leftCols(n) - eye(ut.domain_interior)) <= 1e-12);
  CHECK(ud(0, 0) == Complex(1.0));
  const auto r = static_cast<Eigen::Index>(ut.range_interior);
  CHECK(oracle::max_abs((ud * ud.adjoint()).topLeftCorner(r, r) - eye(ut.range_interior)) <= 1e-12);

  const auto full = make_interleaved_unitary(l, BoundaryPolicy::complete);
  const auto fd = oracle::dense(full.u);
  CHECK(oracle::max_abs(fd.adjoint() * fd - eye(l.total())) <= 1e-12);
  CHECK(oracle::max_abs(fd * fd.adjoint() - eye(l.total())) <= 1e-12);
  CHECK(full.domain_interior == l.total());
  // the columns shared by both policies agree
  for (Eigen::Index j = 0; j < n; ++j)
    if (ud.col(j).cwiseAbs().maxCoeff() > 0) CHECK(oracle::max_abs(ud.col(j) - fd.col(j)) == 0.0);

  // odd (1-based) columns are the a_n; their distance to k-sparse vectors
  for (std::size_t blk = 1; blk <= l.block_count(); ++blk) {
    const auto col = ut.u.column(2 * (blk - 1));
    for (std::size_t k = 0; k < blk; ++k) {
      const double e = best_k_sparse_column_error(col, k);
      CHECK(std::abs(e * e - static_cast<double>(blk - k) / static_cast<double>(blk)) <= 1e-12);
    }
  }
}

TEST_CASE("block projection") {
  const auto l = BlockLayout::triangular(9);
  const auto bp = make_block_projection(l);
  CHECK(bp.blocks[0].rows() == 1);
  CHECK(bp.blocks[0](0, 0) == Complex(1.0));
  CHECK(oracle::max_abs(bp.blocks[2] - Eigen::MatrixXcd::Constant(3, 3, 1.0 / 3.0)) < 1e-16);
  const auto p = bp.to_sparse();
  const auto v = make_averaging_isometry(l, l.total());
  CHECK(max_entry_distance(p * p, p) <= 1e-12);
  CHECK(max_entry_distance(p, adjoint(p)) == 0.0);
  CHECK(max_entry_distance(p, v * adjoint(v)) <= 1e-12);
  CHECK(bp.to_sparse(l.total() + 5).window() == l.total() + 5);
}

TEST_CASE("M2 projection") {
  const auto l = BlockLayout::triangular(7);
  const auto u = make_interleaved_unitary(l, BoundaryPolicy::complete).u;
  const auto p = make_m2_projection(u);
  const auto pd = oracle::dense(p);
  CHECK(oracle::max_abs(pd * pd - pd) <= 1e-10);
  CHECK(oracle::max_abs(pd - pd.adjoint()) <= 1e-10);
  CHECK(std::abs(pd.trace() - Complex(static_cast<double>(l.total()))) <= 1e-9);

  // u = 1 gives the projection onto {(x, x)}: entries 1/2 on the interleaved pairs
  const auto q = make_m2_projection(SparseOp::identity(5));
  CHECK(q.at(0, 0) == Complex(0.5));
  CHECK(q.at(0, 1) == Complex(0.5));
  CHECK(q.at(0, 2) == Complex(0.0));

  CHECK_THROWS_AS(make_m2_projection(make_interleaved_unitary(l).u), ContractViolation);
  CHECK_THROWS_AS(make_m2_projection(scale(SparseOp::identity(3), 2.0)), ContractViolation);
}

TEST_CASE("shift isometries") {
  const std::size_t n = 21;
  const auto [v1, v2] = make_shift_isometries(n);
  const auto a = oracle::dense(v1), b = oracle::dense(v2);
  CHECK(oracle::max_abs(a * a.adjoint() + b * b.adjoint() - eye(n)) <= 1e-15);
  const Eigen::Index h1 = (n + 1) / 2, h2 = n / 2;
  CHECK(oracle::max_abs((a.adjoint() * a).topLeftCorner(h1, h1) - eye(static_cast<std::size_t>(h1))) == 0.0);
  CHECK(oracle::max_abs((b.adjoint() * b).topLeftCorner(h2, h2) - eye(static_cast<std::size_t>(h2))) == 0.0);
  CHECK(oracle::max_abs(a.adjoint() * b) == 0.0);
  CHECK(v1.profile() == SparsityProfile{1, 1});
  CHECK(v2.profile() == SparsityProfile{1, 1});
  CHECK(v1.at(2, 1) == Complex(1.0));
  CHECK(v2.at(3, 1) == Complex(1.0));
}

TEST_CASE("polar counterexample") {
  const auto l = BlockLayout::triangular(12);
  const auto pc = make_polar_counterexample(l);
  CHECK(pc.h.profile() == SparsityProfile{1, 1});
  CHECK(max_entry_distance(normalize_columns(pc.a), make_averaging_isometry(l, l.total())) <= 1e-15);
  CHECK(max_entry_distance(pc.v * pc.h, pc.a) <= 1e-15);

  const auto curve = polar_approximation_curve(pc, l);
  REQUIRE(curve.size() == l.total());
  for (const auto& pt : curve) {
    const double exact = oracle::norm(pc.a - truncate_compact(pc.a, pt.r));
    CHECK(std::abs(exact - pt.error) <= 1e-12);
    CHECK(pt.error <= pt.bound + 1e-12);
  }
  CHECK(curve.back().error == doctest::Approx(0.0));
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].bound <= curve[i - 1].bound);

  CHECK_THROWS_AS(make_polar_counterexample(l, {1.0, 0.5}), ContractViolation);
  std::vector<double> bad(l.total(), 1.0);
  bad[3] = 2.0;
  CHECK_THROWS_AS(make_polar_counterexample(l, bad), ContractViolation);
  bad.assign(l.total(), 1.0);
  bad[0] = 0.0;
  CHECK_THROWS_AS(make_polar_counterexample(l, bad), ContractViolation);
}
