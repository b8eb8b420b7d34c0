#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "mfop/error.hpp"
#include "mfop/kuiper.hpp"
#include "mfop/random_ops.hpp"
#include "oracles.hpp"

using namespace mfop;

namespace {

KuiperConfig quick() {
  KuiperConfig cfg;
  cfg.steps = 8;
  cfg.count = 4;
  return cfg;
}

void check_path(const HomotopyPath& path, const SparseOp& g, const KuiperConfig& cfg, bool dense_oracle) {
  REQUIRE(path.size() == path.certs.size());
  CHECK(path.steps.front() == g);
  CHECK(max_entry_distance(path.steps.back(), SparseOp::identity(g.window())) <= 1e-8);
  CHECK(path.max_jump() <= cfg.max_jump);
  CHECK(path.min_sigma() > 1e-6);
  if (path.profile_budget > 0) CHECK(path.max_profile() <= path.profile_budget);
  for (std::size_t i = 0; i < path.size(); ++i) {
    CHECK(path.certs[i].profile == path.steps[i].profile());
    if (dense_oracle) CHECK(std::abs(oracle::sigma_min(path.steps[i]) - path.certs[i].sigma_min) <= 1e-9);
  }
}

}  // namespace

TEST_CASE("selection") {
  auto sel = select_basis_vectors(SparseOp::identity(20), 4);
  CHECK(sel.a.size() == 4);
  CHECK(verify_selection(SparseOp::identity(20), sel));
  std::set<std::size_t> all(sel.a.begin(), sel.a.end());
  all.insert(sel.aprime.begin(), sel.aprime.end());
  CHECK(all.size() == 8);
  CHECK(sel.a[0] == 0);
  CHECK(sel.aprime[0] == 1);

  std::vector<Complex> d(20);
  for (std::size_t i = 0; i < 20; ++i) d[i] = Complex(1.0 + static_cast<double>(i));
  const auto dg = SparseOp::diagonal(d);
  CHECK(verify_selection(dg, select_basis_vectors(dg, 5)));

  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random_profile_op(512, 3, 1.0, rng);
    sel = select_basis_vectors(g, 8);
    CHECK(verify_selection(g, sel));
  }
  CHECK_THROWS_AS(select_basis_vectors(SparseOp::identity(6), 4), WindowTooSmall);
}

TEST_CASE("rotation stage") {
  const auto cfg = quick();
  const auto id = SparseOp::identity(30);
  auto sel = select_basis_vectors(id, 3);
  auto path = rotation_stage(id, sel, cfg);
  CHECK(path.steps.back() == id);
  for (const auto& s : path.steps) CHECK(s == id);

  // g e_a = e_{a'}: a pure quarter turn, sigma constant
  Selection one{{0}, {1}};
  std::vector<Triplet> sw{{1, 0, 1.0}, {0, 1, 1.0}};
  for (std::size_t i = 2; i < 30; ++i) sw.push_back({i, i, 1.0});
  const auto g = SparseOp::from_triplets(30, sw);
  path = rotation_stage(g, one, cfg);
  for (const auto& c : path.certs) CHECK(c.sigma_min == doctest::Approx(1.0));
  const auto end = path.steps.back();
  CHECK(end.col_rows(0).size() == 1);
  CHECK(end.col_rows(0)[0] == 0);

  const auto r = random_invertible(120, 17);
  sel = select_basis_vectors(r, 4);
  path = rotation_stage(r, sel, cfg);
  const auto f2 = path.steps.back();
  for (std::size_t i = 0; i < sel.a.size(); ++i) {
    const auto a = sel.a[i];
    REQUIRE(f2.col_rows(a).size() == 1);
    CHECK(f2.col_rows(a)[0] == a);
    double nrm = 0.0;
    for (auto v : r.col_values(a)) nrm += std::norm(v);
    CHECK(std::abs(f2.at(a, a) - std::sqrt(nrm)) <= 1e-12);
  }
  for (const auto& s : path.steps) CHECK(oracle::sigma_min(s) > 0.0);
}

TEST_CASE("normalize and compress") {
  const auto cfg = quick();
  const auto id = SparseOp::identity(30);
  const auto sel = select_basis_vectors(id, 3);
  auto path = normalize_and_compress(id, sel, cfg);
  for (const auto& s : path.steps) CHECK(s == id);

  std::vector<Complex> d(30);
  for (std::size_t i = 0; i < 30; ++i) d[i] = Complex(2.0 + std::sin(static_cast<double>(i)));
  const auto dg = SparseOp::diagonal(d);
  const auto dsel = select_basis_vectors(dg, 3);
  path = normalize_and_compress(dg, dsel, cfg);
  const auto f4 = path.steps.back();
  CHECK(f4.profile() == SparsityProfile{1, 1});
  for (auto a : dsel.a) CHECK(f4.at(a, a) == Complex(1.0));

  const auto g = random_invertible(150, 4);
  const auto gs = select_basis_vectors(g, 4);
  const auto f2 = rotation_stage(g, gs, cfg).steps.back();
  path = normalize_and_compress(f2, gs, cfg);
  const auto [n0, n1] = path.stage_range(Stage::normalize);
  const auto [c0, c1] = path.stage_range(Stage::compress);
  CHECK(path.steps[n1].profile().fits(f2.profile()));
  CHECK(path.steps[c1].profile().fits(path.steps[n1].profile()));
  CHECK(c0 <= c1);
  CHECK(n0 <= n1);
  const auto f4g = path.steps.back();
  std::set<std::size_t> hp(gs.a.begin(), gs.a.end());
  for (const auto& t : f4g.triplets()) {
    if (hp.count(t.row) || hp.count(t.col)) {
      CHECK(t.row == t.col);
      CHECK(t.value == Complex(1.0));
    }
  }
}

TEST_CASE("whitehead stage") {
  auto cfg = quick();
  const auto w1 = whitehead_stage(SparseOp::identity(6), 2, cfg);
  for (const auto& s : w1.path.steps) CHECK(s == SparseOp::identity(12));

  const auto two = scale(SparseOp::identity(5), 2.0);
  const auto w = whitehead_stage(two, 3, cfg);
  const auto& path = w.path;
  CHECK(max_entry_distance(path.steps.back(), SparseOp::identity(15)) <= 1e-10);
  CHECK(path.steps.front().at(0, 0) == Complex(2.0));
  CHECK(path.steps.front().at(5, 5) == Complex(0.5));
  CHECK(path.steps.front().at(10, 10) == Complex(1.0));
  CHECK(w.inverse_residual <= 1e-8);
  // explicit 2x2 formula at every recorded step, compared with dense products
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double th = (1.0 - path.certs[i].t) * std::numbers::pi / 2.0;
    const double c = std::cos(th), s = std::sin(th);
    CHECK(std::abs(path.steps[i].at(0, 0) - Complex(c * c + 2.0 * s * s)) <= 1e-12);
    CHECK(std::abs(path.steps[i].at(0, 5) - Complex(-c * s)) <= 1e-12);
    CHECK(std::abs(path.steps[i].at(5, 0) - Complex(-0.5 * c * s)) <= 1e-12);
    CHECK(std::abs(path.steps[i].at(5, 5) - Complex(0.5 * s * s + c * c)) <= 1e-12);
    CHECK(path.certs[i].sigma_min > 0.0);
    const auto bound = 2 * std::max(w.u_profile.k(), w.u_inverse_profile.k()) + 2;
    CHECK(path.steps[i].profile().k() <= bound);
  }
  CHECK(path.max_jump() <= cfg.max_jump);

  const auto g = random_invertible(10, 3);
  const auto wg = whitehead_stage(g, 2, cfg);
  CHECK(wg.inverse_residual <= 1e-8);
  CHECK(max_entry_distance(wg.path.steps.back(), SparseOp::identity(20)) <= 1e-10);
  CHECK(wg.path.min_sigma() > 0.0);
}

TEST_CASE("contract") {
  const auto cfg = quick();
  auto path = contract(SparseOp::identity(60), cfg);
  check_path(path, SparseOp::identity(60), cfg, true);

  std::vector<Complex> d(80, 1.0);
  d[0] = 2.0;
  d[1] = 0.5;
  const auto dg = SparseOp::diagonal(d);
  path = contract(dg, cfg);
  check_path(path, dg, cfg, true);

  const auto g = random_invertible(90, 12);
  CHECK(g.profile().fits({3, 3}));
  CHECK(oracle::sigma_min(g) > 0.1);
  path = contract(g, cfg);
  check_path(path, g, cfg, true);
  CHECK(path.profile_budget == profile_budget(3));
  for (auto s : {Stage::select, Stage::rotate1, Stage::rotate2, Stage::normalize, Stage::compress, Stage::close}) {
    const auto [lo, hi] = path.stage_range(s);
    CHECK(lo <= hi);
    CHECK(path.certs[lo].stage == s);
  }
  // budgets increase with k
  for (std::size_t k = 1; k < 8; ++k) CHECK(profile_budget(k) < profile_budget(k + 1));

  CHECK_THROWS_AS(contract(SparseOp::identity(10), cfg), WindowTooSmall);
  std::vector<Complex> sing(80, 1.0);
  sing[5] = 1e-9;
  CHECK_THROWS_AS(contract(SparseOp::diagonal(sing), cfg), ContractViolation);
}
