// End-to-end acceptance run. One PASS/FAIL line per criterion; exit status 1
// if any criterion fails.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "mfop/coarse.hpp"
#include "mfop/constructions.hpp"
#include "mfop/error.hpp"
#include "mfop/expander.hpp"
#include "mfop/ideal.hpp"
#include "mfop/kuiper.hpp"
#include "mfop/random_ops.hpp"
#include "oracles.hpp"

using namespace mfop;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome closure_laws() {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(2024, 1));
  std::size_t pairs = 0, violations = 0;
  for (; pairs < 10000; ++pairs) {
    const std::size_t window = 1 + rng.index(256);
    const std::size_t ka = 1 + rng.index(8), kb = 1 + rng.index(8);
    const auto a = random_profile_op(window, ka, 1.0, rng);
    const auto b = random_profile_op(window, kb, 1.0, rng);
    const auto pa = a.profile(), pb = b.profile();
    const std::size_t k = std::max(pa.k(), pb.k());
    const auto s = (a + b).profile(), p = (a * b).profile(), h = adjoint(a).profile();
    if (s.row_max > 2 * k || s.col_max > 2 * k) ++violations;
    if (p.row_max > k * k || p.col_max > k * k) ++violations;
    if (!s.fits(sum_profile_bound(pa, pb)) || !p.fits(product_profile_bound(pa, pb))) ++violations;
    if (!(h == pa.swapped())) ++violations;
  }
  const double dt = seconds_since(t0);
  return {violations == 0 && dt < 30.0, fmt("%.0f pairs, %.0f violations, %.2f s (limit 30 s)", static_cast<double>(pairs),
                                            static_cast<double>(violations), dt)};
}

Outcome norm_bound() {
  Rng rng(derive_seed(2024, 2));
  std::size_t ops = 0, bound_fail = 0;
  double worst_gap = 0.0, worst_slack = -1e300;
  for (; ops < 1000; ++ops) {
    const std::size_t window = 1 + rng.index(128);
    const std::size_t k = 1 + rng.index(6);
    const double c = rng.uniform(0.05, 1.0);
    const auto a = random_profile_op(window, k, c, rng);
    const double pn = operator_norm(a);
    const double dn = oracle::norm(oracle::dense(a));
    const double ck = a.max_abs() * std::pow(static_cast<double>(a.profile().k()), 1.5);
    worst_gap = std::max(worst_gap, std::abs(pn - dn));
    worst_slack = std::max(worst_slack, pn - ck);
    if (pn > ck + 1e-9 || pn > norm_upper_bound(a).value + 1e-9) ++bound_fail;
  }
  return {bound_fail == 0 && worst_gap <= 1e-8,
          fmt("%.0f ops, max(norm - Ck^1.5) = %.3e, max |power - dense SVD| = %.3e", static_cast<double>(ops), worst_slack,
              worst_gap)};
}

Outcome distance_obstruction() {
  const auto layout = BlockLayout::triangular(64);
  const auto v = make_averaging_isometry(layout, layout.total());
  double worst = 0.0, worst_brute = 0.0;
  std::size_t cases = 0;
  for (std::size_t n = 1; n <= 64; ++n) {
    const auto col = v.column(n - 1);
    std::vector<Complex> block(col.begin() + static_cast<std::ptrdiff_t>(layout.offset(n - 1)),
                               col.begin() + static_cast<std::ptrdiff_t>(layout.offset(n - 1) + n));
    for (std::size_t k = 0; k < n; ++k, ++cases) {
      const double e = best_k_sparse_column_error(col, k);
      worst = std::max(worst, std::abs(e * e - static_cast<double>(n - k) / static_cast<double>(n)));
      if (n <= 12) worst_brute = std::max(worst_brute, std::abs(e - oracle::best_k_error_brute(block, k)));
    }
  }
  return {worst <= 1e-12 && worst_brute <= 1e-12,
          fmt("%.0f (n, k) cases, max |err^2 - (n-k)/n| = %.3e, max |err - brute force| (n <= 12) = %.3e",
              static_cast<double>(cases), worst, worst_brute)};
}

Outcome expander_pipeline() {
  const auto t0 = Clock::now();
  const auto r = build_even_projection_pipeline(32, 6, 10, derive_seed(2024, 4));
  bool ok = r.blocks.size() == 32;
  double min_l1 = 1e300, max_err = 0.0, max_lnorm = 0.0;
  std::size_t off = 0;
  for (const auto& b : r.blocks) {
    const auto g = RegularGraph::from_graph(b.graph);
    const auto l = laplacian(g);
    const auto ld = oracle::dense(l);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ld);
    const double l1 = es.eigenvalues()(1);
    if (!b.graph.is_connected()) ok = false;
    min_l1 = std::min(min_l1, l1);
    Eigen::MatrixXcd pker = Eigen::MatrixXcd::Zero(ld.rows(), ld.cols());
    for (Eigen::Index i = 0; i < ld.cols(); ++i)
      if (std::abs(es.eigenvalues()(i)) < 1e-9) pker += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    std::vector<std::size_t> idx(b.m);
    std::iota(idx.begin(), idx.end(), off);
    const auto fb = oracle::dense(compress(r.filtered, idx, idx));
    max_err = std::max(max_err, oracle::norm(fb - pker));
    max_lnorm = std::max(max_lnorm, std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(ld.rows() - 1))));
    // no entries leak out of the diagonal block
    for (auto i : idx)
      for (auto c : r.filtered.row_cols(i))
        if (c < off || c >= off + b.m) ok = false;
    off += b.m;
  }
  const double dt = seconds_since(t0);
  ok = ok && min_l1 > 0.0 && max_err <= 0.1 + 1e-6 && max_lnorm <= 2.0 + 1e-12 && dt < 60.0;
  return {ok, fmt("min lambda1 = %.4f, max ||f_s(L) - P_ker|| = %.4e (limit 0.1 + 1e-6), max ||L|| = %.15f, %.2f s", min_l1,
                  max_err, max_lnorm, dt) +
                  fmt(", filter degree %.0f", static_cast<double>(r.filter.degree()))};
}

Outcome corner_estimate() {
  double worst = -1e300, worst_oracle = 0.0;
  for (std::size_t n = 1; n <= 64; ++n) {
    const auto c = corner_compression_error(n);
    const auto m = static_cast<Eigen::Index>(2 * n + 1);
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Constant(m, m, 1.0 / static_cast<double>(m));
    d.topLeftCorner(m - 1, m - 1).array() -= 1.0 / static_cast<double>(m - 1);
    const double exact = oracle::norm(d);
    const double bound = (2.0 + 2.0 * std::sqrt(2.0 * static_cast<double>(n))) / (2.0 * static_cast<double>(n) + 1.0);
    worst = std::max(worst, exact - bound);
    worst_oracle = std::max(worst_oracle, std::abs(exact - c.exact) + std::abs(bound - c.bound));
  }
  return {worst <= 1e-10 && worst_oracle <= 1e-12,
          fmt("max(exact - bound) over n in [1, 64] = %.4e, library vs oracle %.2e", worst, worst_oracle)};
}

Outcome ghost_tail() {
  const auto layout = BlockLayout::triangular(64);
  const auto p = make_block_projection(layout).to_sparse();
  std::size_t mismatches = 0, windows = 0, count_fail = 0;
  for (std::size_t n = 1; n <= p.window(); ++n, ++windows) {
    const auto tp = tail_profile(truncate_compact(p, n));
    if (tp.values.size() != p.window()) ++mismatches;
    for (std::size_t t = 1; t <= n; ++t)
      if (tp.at(t) != 1.0 / static_cast<double>(oracle::triangular_block(t))) ++mismatches;
  }
  std::size_t prev = 0;
  bool grows = true;
  for (std::size_t b = 1; b <= 64; ++b) {
    const auto pb = make_block_projection(BlockLayout::triangular(b)).to_sparse();
    const auto cnt = count_singular_values_above(pb, 0.5);
    if (cnt != b) ++count_fail;
    if (b <= 24 && (oracle::svd(oracle::dense(pb)).array() > 0.5).count() != static_cast<Eigen::Index>(b)) ++count_fail;
    grows = grows && cnt > prev;
    prev = cnt;
  }
  return {mismatches == 0 && count_fail == 0 && grows,
          fmt("%.0f windows up to 2080, %.0f tail mismatches; singular-value count == blocks on 64 triangular windows "
              "(%.0f failures)",
              static_cast<double>(windows), static_cast<double>(mismatches), static_cast<double>(count_fail))};
}

// Self-adjoint instance with `planted` diagonal entries of modulus in (delta, 1.5] plus small Hermitian noise.
SparseOp planted_diagonal(Rng& rng, std::size_t n, double delta) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < 0.4) {
      const double mod = rng.uniform(delta * 1.05, 1.5);
      t.push_back({i, i, rng.uniform() < 0.5 ? mod : -mod});
    }
  }
  const auto noise = random_hermitian(n, 2, 0.02, rng);
  return SparseOp::from_triplets(n, t) + noise;
}

SparseOp planted_pairs(Rng& rng, std::size_t n, double delta) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<std::size_t>(perm));
  std::vector<Triplet> t;
  for (std::size_t q = 0; q + 1 < n; q += 2) {
    if (rng.uniform() < 0.5) continue;
    const Complex z = std::polar(rng.uniform(delta * 1.05, 1.0), rng.uniform(0.0, 2.0 * std::numbers::pi));
    t.push_back({perm[q], perm[q + 1], z});
    t.push_back({perm[q + 1], perm[q], std::conj(z)});
  }
  const auto h = random_hermitian(n, 2, 0.01, rng);
  return SparseOp::from_triplets(n, t) + h;
}

double independent_sigma(const SparseOp& a, const ExtractionCertificate& c) {
  const auto idx = c.packed_indices();
  const auto ad = oracle::dense(a);
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd s(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      s(i, j) = ad(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]), static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
  // u* p_L a u equals this compression; also check u against the packing
  const auto ud = oracle::dense(c.u);
  const Eigen::MatrixXcd full = ud.adjoint() * ad * ud;
  if (oracle::max_abs(full.topLeftCorner(m, m) - s) > 1e-12) return -1.0;
  return oracle::sigma_min(s);
}

Outcome ideal_extraction() {
  Rng rng(derive_seed(2024, 7));
  const double delta = 0.5;
  std::size_t ok_diag = 0, ok_off = 0, ok_ghost = 0, fails = 0;
  double min_sigma = 1e300;
  std::string first_failure;
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 40 + rng.index(80);
    const auto a = planted_diagonal(rng, n, delta);
    try {
      const auto c = extract(a, delta, 3);
      const double s = independent_sigma(a, c);
      min_sigma = std::min(min_sigma, s);
      if (c.case_tag == ExtractionCase::diagonal && s > delta / 2 && c.sigma_min > delta / 2) ++ok_diag;
      else ++fails;
    } catch (const std::exception& e) {
      ++fails;
      if (first_failure.empty()) first_failure = e.what();
    }
  }
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 40 + rng.index(80);
    const auto a = planted_pairs(rng, n, delta);
    try {
      const auto c = extract(a, delta, 3);
      const double s = independent_sigma(a, c);
      min_sigma = std::min(min_sigma, s);
      bool pairs_ok = true;
      for (auto ps : c.pair_sigma_min) pairs_ok = pairs_ok && ps > 2 * delta / 3;
      if (c.case_tag == ExtractionCase::offdiagonal && pairs_ok && s > delta / 2 && c.sigma_min > delta / 2) ++ok_off;
      else ++fails;
    } catch (const std::exception& e) {
      ++fails;
      if (first_failure.empty()) first_failure = e.what();
    }
  }
  // ghost-like inputs: entries vanish in the tail
  std::size_t ghosts = 0;
  for (std::size_t blocks = 20; blocks <= 40; blocks += 5, ++ghosts) {
    const auto p = make_block_projection(BlockLayout::triangular(blocks)).to_sparse();
    ExtractOptions opt;
    opt.tail_start = p.window() / 2;
    try {
      extract(p, delta, 3, opt);
    } catch (const InsufficientData&) {
      ++ok_ghost;
    } catch (const std::exception&) {
    }
  }
  for (std::size_t n : {200UL, 400UL, 800UL}) {
    ++ghosts;
    std::vector<Triplet> t;
    for (std::size_t i = 0; 2 * i + 1 < n; ++i) {
      const double w = 2.0 / std::sqrt(static_cast<double>(i + 1));
      t.push_back({2 * i, i, w});
      t.push_back({i, 2 * i, w});
    }
    const auto a = SparseOp::from_triplets(n, t);
    ExtractOptions opt;
    opt.tail_start = n / 2;
    try {
      extract(a, delta, 3, opt);
    } catch (const InsufficientData&) {
      ++ok_ghost;
    } catch (const std::exception&) {
    }
  }
  const bool pass = ok_diag == 100 && ok_off == 100 && ok_ghost == ghosts;
  return {pass, fmt("diagonal %.0f/100, off-diagonal %.0f/100, min independent sigma_min = %.4f (> %.2f), ", static_cast<double>(ok_diag),
                    static_cast<double>(ok_off), min_sigma, delta / 2) +
                    fmt("ghost inputs insufficient-data %.0f/%.0f", static_cast<double>(ok_ghost), static_cast<double>(ghosts)) +
                    (first_failure.empty() ? "" : "; first error: " + first_failure)};
}

double support_norm(const SparseOp& d) {
  std::set<std::size_t> rows, cols;
  for (const auto& t : d.triplets()) {
    rows.insert(t.row);
    cols.insert(t.col);
  }
  if (rows.empty()) return 0.0;
  const std::vector<std::size_t> r(rows.begin(), rows.end()), c(cols.begin(), cols.end());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(c.size()));
  for (const auto& t : d.triplets())
    m(std::lower_bound(r.begin(), r.end(), t.row) - r.begin(), std::lower_bound(c.begin(), c.end(), t.col) - c.begin()) = t.value;
  return oracle::svd_fast(m)(0);
}

Outcome kuiper_path(std::size_t steps) {
  const auto t0 = Clock::now();
  KuiperConfig cfg;
  cfg.steps = steps;
  std::size_t ok = 0, recorded = 0;
  double min_sigma = 1e300, max_jump = 0.0, max_end = 0.0, max_sigma_gap = 0.0;
  std::size_t max_profile = 0, budget = profile_budget(3);
  std::string first_failure;
  for (std::uint64_t inst = 0; inst < 50; ++inst) {
    const auto g = random_invertible(256, derive_seed(2024, 800 + inst));
    const auto sg = oracle::svd_fast(oracle::dense(g));
    if (!(g.profile().fits({3, 3}) && sg(sg.size() - 1) > 0.1)) {
      if (first_failure.empty()) first_failure = "generated g outside GL^(3) with sigma_min > 0.1";
      continue;
    }
    try {
      const auto path = contract(g, cfg);
      bool good = path.steps.front() == g && path.profile_budget == budget;
      double prev_max = 0.0;
      for (std::size_t i = 0; i < path.size(); ++i) {
        const auto sv = oracle::svd_fast(oracle::dense(path.steps[i]));
        const double s = sv(sv.size() - 1);
        max_sigma_gap = std::max(max_sigma_gap, std::abs(s - path.certs[i].sigma_min));
        min_sigma = std::min(min_sigma, s);
        good = good && s > 1e-6 && path.certs[i].profile == path.steps[i].profile();
        max_profile = std::max(max_profile, path.steps[i].profile().k());
        if (i > 0) {
          // norm of the step difference, taken on its support block
          const double jump = support_norm(path.steps[i] - path.steps[i - 1]) / prev_max;
          max_jump = std::max(max_jump, jump);
          good = good && jump <= cfg.max_jump + 1e-12;
        }
        prev_max = sv(0);
      }
      const double end = max_entry_distance(path.steps.back(), SparseOp::identity(256));
      max_end = std::max(max_end, end);
      good = good && end <= 1e-8 && path.max_profile() <= budget;
      recorded += path.size();
      if (good) ++ok;
    } catch (const std::exception& e) {
      if (first_failure.empty()) first_failure = e.what();
    }
  }
  const double dt = seconds_since(t0);
  return {ok == 50,
          fmt("%.0f/50 paths, %.0f steps, min sigma_min = %.3e, max jump = %.4f", static_cast<double>(ok),
              static_cast<double>(recorded), min_sigma, max_jump) +
              fmt(", max |end - 1| = %.1e, max profile %.0f <= B(3) = %.0f", max_end, static_cast<double>(max_profile),
                  static_cast<double>(budget)) +
              fmt(", |sigma cert - SVD| <= %.1e, steps/stage %.0f, %.1f s", max_sigma_gap, static_cast<double>(steps), dt) +
              (first_failure.empty() ? "" : "; first error: " + first_failure)};
}

Outcome embedding_sparsity() {
  Rng rng(derive_seed(2024, 9));
  std::size_t instances = 0, violations = 0;
  for (int trial = 0; trial < 2000; ++trial, ++instances) {
    const std::size_t n = 5 + rng.index(200);
    const std::size_t r = 1 + rng.index(6);
    FiniteAction act;
    switch (trial % 3) {
      case 0:
        act = random_permutation_action(n, r, rng.next(), rng.uniform() < 0.5);
        break;
      case 1: {
        std::vector<long long> shifts;
        for (std::size_t m = 0; m < r; ++m) shifts.push_back(static_cast<long long>(rng.index(2 * n + 1)) - static_cast<long long>(n));
        act = integer_shift_action(n, shifts, rng.uniform() < 0.5 ? Boundary::cyclic : Boundary::drop);
        break;
      }
      default:
        act = free_group_ball(1 + rng.index(3), 1 + rng.index(3));
    }
    std::vector<Complex> coeffs(act.generators.size());
    for (auto& c : coeffs) c = random_complex(rng, 2.0);
    std::optional<std::vector<Complex>> diag;
    if (rng.uniform() < 0.5) {
      diag.emplace(act.point_count);
      for (auto& d : *diag) d = random_complex(rng, 3.0);
    }
    const auto op = action_operator(act, coeffs, diag);
    const std::size_t rr = act.generators.size();
    if (!op.profile().fits({rr, rr})) ++violations;
    if (!(oracle::profile(oracle::dense(op)) == op.profile())) ++violations;
  }
  for (int trial = 0; trial < 400; ++trial, ++instances) {
    const std::size_t m = 2 * (5 + rng.index(40));
    const auto g = random_regular_graph(m, 3 + rng.index(2), rng.next());
    const auto space = trial % 2 ? graph_metric(g.graph) : line_metric(m);
    const Kernel ker = [&](std::size_t x, std::size_t y) {
      return Complex(std::cos(static_cast<double>(x * 7 + y)), std::sin(static_cast<double>(x + 3 * y)));
    };
    const long long r1 = static_cast<long long>(rng.index(4)), r2 = static_cast<long long>(rng.index(4));
    const auto a = band_operator(space, ker, r1);
    const auto b = band_operator(space, ker, r2);
    if (a.op.profile().row_max > space.ball_size(r1) || a.op.profile().col_max > space.ball_size(r1)) ++violations;
    if (a.ball_bound != space.ball_size(r1)) ++violations;
    const auto c = a.op * b.op;
    for (const auto& t : c.triplets())
      if (space.d(t.row, t.col) == MetricSpace::kInfinite || space.d(t.row, t.col) > r1 + r2) ++violations;
    for (const auto& t : a.op.triplets())
      if (space.d(t.row, t.col) > r1) ++violations;
    if (!c.profile().fits(product_profile_bound(a.op.profile(), b.op.profile()))) ++violations;
  }
  return {violations == 0, fmt("%.0f randomized instances, %.0f violations", static_cast<double>(instances),
                               static_cast<double>(violations))};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments: initial steps per homotopy stage (default 16), then the
  // criterion numbers to run (default all).
  const std::size_t kuiper_steps = argc > 1 ? std::stoul(argv[1]) : 16;
  std::set<std::size_t> only;
  for (int i = 2; i < argc; ++i) only.insert(std::stoul(argv[i]));
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"closure laws", closure_laws},
      {"norm bound", norm_bound},
      {"distance obstruction", distance_obstruction},
      {"expander pipeline", expander_pipeline},
      {"corner estimate", corner_estimate},
      {"ghost tail", ghost_tail},
      {"ideal extraction", ideal_extraction},
      {"kuiper path", [&] { return kuiper_path(kuiper_steps); }},
      {"embedding sparsity", embedding_sparsity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  const std::size_t ran = only.empty() ? criteria.size() : only.size();
  std::printf("%d/%zu criteria passed\n", static_cast<int>(ran) - failed, ran);
  return failed == 0 ? 0 : 1;
}
