#include "mfop/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "mfop/coarse.hpp"
#include "mfop/constructions.hpp"
#include "mfop/coord_io.hpp"
#include "mfop/dense.hpp"
#include "mfop/error.hpp"
#include "mfop/expander.hpp"
#include "mfop/ideal.hpp"
#include "mfop/kuiper.hpp"
#include "mfop/random_ops.hpp"
#include "mfop/report.hpp"

namespace mfop::cli {

namespace {

struct Global {
  std::uint64_t seed = 1;
  std::string out;
  bool json_only = false;
};

Json profile_json(const SparsityProfile& p) { return Json::array({p.row_max, p.col_max}); }

template <class T>
Json to_json_array(const std::vector<T>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x);
  return a;
}

Json one_based(const std::vector<std::size_t>& v) {
  Json a = Json::array();
  for (auto x : v) a.push_back(x + 1);
  return a;
}

std::vector<long long> parse_int_list(const std::string& s) {
  std::vector<long long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoll(item));
  }
  return out;
}

std::vector<Complex> parse_complex_list(const std::string& s) {
  std::vector<Complex> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.emplace_back(std::stod(item), 0.0);
  }
  return out;
}

void write_matrix(RunReport& rep, const std::string& path, const SparseOp& a) {
  if (path.empty()) return;
  write_coordinate_file(path, a);
  rep.artifacts.push_back(path);
}

void write_plot(RunReport& rep, const std::string& path, const std::vector<Series>& s, const PlotOptions& opt) {
  if (path.empty()) return;
  emit_plot(s, path, opt);
  rep.artifacts.push_back(path);
}

// ---- construct -----------------------------------------------------------

struct ConstructArgs {
  std::string op = "v";
  std::size_t blocks = 8;
  std::size_t window = 0;
  std::string out;
  std::string policy = "drop";
  std::string plot;
};

void run_construct(const ConstructArgs& a, RunReport& rep) {
  const auto layout = BlockLayout::triangular(a.blocks);
  const std::size_t n = a.window == 0 ? layout.total() : a.window;
  rep.params = {{"op", a.op}, {"blocks", a.blocks}, {"window", n}, {"policy", a.policy}};
  const double tol = 1e-12;
  if (a.op == "v") {
    const auto v = make_averaging_isometry(layout, n);
    std::vector<Complex> d(n, 0.0);
    for (std::size_t i = 0; i < layout.block_count(); ++i) d[i] = 1.0;
    rep.add_metric("max|v*v - 1_B|", max_entry_distance(adjoint(v) * v, SparseOp::diagonal(d)), "<=", tol);
    Json dist = Json::array();
    for (std::size_t blk = 1; blk <= layout.block_count(); ++blk) {
      const auto col = v.column(blk - 1);
      const std::size_t k = blk / 2;
      dist.push_back({{"n", blk}, {"k", k}, {"error", best_k_sparse_column_error(col, k)},
                      {"bound", std::sqrt(static_cast<double>(blk - k) / static_cast<double>(blk))}});
    }
    rep.data["column_distance"] = dist;
    rep.data["profile"] = profile_json(v.profile());
    write_matrix(rep, a.out, v);
  } else if (a.op == "u") {
    const auto ut = make_interleaved_unitary(layout, a.policy == "complete" ? BoundaryPolicy::complete : BoundaryPolicy::drop);
    const auto& u = ut.u;
    const auto uu = adjoint(u) * u;
    double err = 0.0;
    for (const auto& t : uu.triplets())
      if (t.row < ut.domain_interior && t.col < ut.domain_interior)
        err = std::max(err, std::abs(t.value - (t.row == t.col ? Complex(1.0) : Complex(0.0))));
    for (std::size_t i = 0; i < ut.domain_interior; ++i)
      if (uu.at(i, i) == Complex(0.0)) err = std::max(err, 1.0);
    rep.add_metric("max|u*u - 1| on domain interior", err, "<=", tol);
    rep.data["domain_interior"] = ut.domain_interior;
    rep.data["range_interior"] = ut.range_interior;
    rep.data["dropped_columns"] = ut.dropped_columns;
    rep.data["profile"] = profile_json(u.profile());
    write_matrix(rep, a.out, u);
  } else if (a.op == "p") {
    const auto p = make_block_projection(layout).to_sparse(n);
    const auto v = make_averaging_isometry(layout, n);
    rep.add_metric("max|p^2 - p|", max_entry_distance(p * p, p), "<=", tol);
    rep.add_metric("max|p - p*|", max_entry_distance(p, adjoint(p)), "<=", tol);
    rep.add_metric("max|p - vv*|", max_entry_distance(p, v * adjoint(v)), "<=", tol);
    rep.data["profile"] = profile_json(p.profile());
    write_matrix(rep, a.out, p);
  } else if (a.op == "m2p") {
    const auto ut = make_interleaved_unitary(layout, BoundaryPolicy::complete);
    const auto p = make_m2_projection(ut.u);
    Complex tr = 0.0;
    for (std::size_t i = 0; i < p.window(); ++i) tr += p.at(i, i);
    rep.add_metric("max|p^2 - p|", max_entry_distance(p * p, p), "<=", 1e-10);
    rep.add_metric("max|p - p*|", max_entry_distance(p, adjoint(p)), "<=", 1e-10);
    rep.add_metric("|trace - window/2|", std::abs(tr - Complex(static_cast<double>(p.window()) / 2.0)), "<=", 1e-9);
    rep.data["profile"] = profile_json(p.profile());
    write_matrix(rep, a.out, p);
  } else if (a.op == "shift") {
    const auto [v1, v2] = make_shift_isometries(n);
    const auto id = SparseOp::identity(n);
    std::vector<Complex> half(n, 0.0);
    for (std::size_t i = 0; 2 * i < n; ++i) half[i] = 1.0;
    rep.add_metric("max|v1 v1* + v2 v2* - 1|", max_entry_distance(v1 * adjoint(v1) + v2 * adjoint(v2), id), "<=", tol);
    rep.add_metric("max|v1* v1 - 1_half|", max_entry_distance(adjoint(v1) * v1, SparseOp::diagonal(half)), "<=", tol);
    rep.add_metric("max|v1* v2|", (adjoint(v1) * v2).max_abs(), "<=", tol);
    rep.data["profile_v1"] = profile_json(v1.profile());
    rep.data["profile_v2"] = profile_json(v2.profile());
    if (!a.out.empty()) {
      write_matrix(rep, a.out, v1);
      write_matrix(rep, a.out + ".v2", v2);
    }
  } else if (a.op == "polar") {
    const auto pc = make_polar_counterexample(layout);
    const auto curve = polar_approximation_curve(pc, layout);
    double worst = 0.0;
    Json pts = Json::array();
    Series err{"||a - trunc_r(a)||", {}, {}}, bnd{"lambda_m(r)", {}, {}};
    for (const auto& p : curve) {
      worst = std::max(worst, p.error - p.bound);
      pts.push_back({{"r", p.r}, {"error", p.error}, {"bound", p.bound}});
      err.x.push_back(static_cast<double>(p.r));
      err.y.push_back(p.error);
      bnd.x.push_back(static_cast<double>(p.r));
      bnd.y.push_back(p.bound);
    }
    rep.add_metric("max(error - bound) over r", worst, "<=", 1e-12);
    rep.add_metric("max|normalize(a) - v|", max_entry_distance(normalize_columns(pc.a), pc.v), "<=", tol);
    rep.data["curve"] = pts;
    write_matrix(rep, a.out, pc.a);
    write_plot(rep, a.plot, {err, bnd}, {"finite-support approximation of a = vh", "r", "norm"});
  } else {
    throw CLI::ValidationError("--op", "unknown operator " + a.op);
  }
}

// ---- algebra-check -------------------------------------------------------

struct AlgebraArgs {
  std::size_t trials = 1000;
  std::size_t k = 4;
  std::size_t window = 128;
};

void run_algebra(const AlgebraArgs& a, std::uint64_t seed, RunReport& rep) {
  rep.params = {{"trials", a.trials}, {"k", a.k}, {"window", a.window}};
  Rng rng(derive_seed(seed, 1));
  std::size_t add_v = 0, mul_v = 0, adj_v = 0, audit_v = 0;
  for (std::size_t t = 0; t < a.trials; ++t) {
    const std::size_t ka = 1 + rng.index(a.k), kb = 1 + rng.index(a.k);
    const auto x = random_profile_op(a.window, ka, 1.0, rng);
    const auto y = random_profile_op(a.window, kb, 1.0, rng);
    const auto s = x + y, p = x * y, h = adjoint(x);
    if (!s.profile().fits(sum_profile_bound(x.profile(), y.profile()))) ++add_v;
    if (!p.profile().fits(product_profile_bound(x.profile(), y.profile()))) ++mul_v;
    if (!(h.profile() == x.profile().swapped())) ++adj_v;
    for (const auto* o : {&x, &s, &p, &h}) {
      const auto trip = o->triplets();
      if (!(measured_profile(o->window(), trip) == o->profile())) ++audit_v;
    }
  }
  rep.add_metric("sum profile violations", static_cast<double>(add_v), "==", 0);
  rep.add_metric("product profile violations", static_cast<double>(mul_v), "==", 0);
  rep.add_metric("adjoint swap violations", static_cast<double>(adj_v), "==", 0);
  rep.add_metric("profile audit mismatches", static_cast<double>(audit_v), "==", 0);
}

// ---- norm-bound ----------------------------------------------------------

struct NormArgs {
  std::string in;
  std::size_t trials = 100;
  std::size_t k = 3;
  std::size_t window = 64;
};

void run_norm(const NormArgs& a, std::uint64_t seed, RunReport& rep) {
  std::vector<SparseOp> ops;
  if (!a.in.empty()) {
    ops.push_back(read_coordinate_file(a.in));
    rep.params = {{"in", a.in}};
  } else {
    rep.params = {{"trials", a.trials}, {"k", a.k}, {"window", a.window}};
    Rng rng(derive_seed(seed, 2));
    for (std::size_t t = 0; t < a.trials; ++t) ops.push_back(random_profile_op(a.window, 1 + rng.index(a.k), 1.0, rng));
  }
  double slack = -std::numeric_limits<double>::infinity(), oracle_gap = 0.0;
  Json rows = Json::array();
  for (const auto& op : ops) {
    const auto nb = norm_upper_bound(op);
    const double pn = operator_norm(op);
    slack = std::max(slack, pn - nb.value);
    if (op.window() <= 256) oracle_gap = std::max(oracle_gap, std::abs(pn - dense::norm(op)));
    if (ops.size() == 1)
      rows.push_back({{"norm", pn}, {"bound", nb.value}, {"refined", nb.refined}, {"C", nb.max_modulus}, {"k", nb.k},
                      {"profile", profile_json(op.profile())}});
  }
  rep.add_metric("max(norm - C k^{3/2})", slack, "<=", 1e-9);
  rep.add_metric("max|power iteration - dense SVD|", oracle_gap, "<=", 1e-8);
  if (!rows.empty()) rep.data["operator"] = rows[0];
}

// ---- distance ------------------------------------------------------------

struct DistanceArgs {
  std::size_t blocks = 12;
  std::size_t k = 3;
  std::string plot;
};

void run_distance(const DistanceArgs& a, RunReport& rep) {
  rep.params = {{"blocks", a.blocks}, {"k", a.k}};
  const auto layout = BlockLayout::triangular(a.blocks);
  const auto v = make_averaging_isometry(layout, layout.total());
  double worst = 0.0;
  Json curve = Json::array();
  Series got{"best k-sparse error", {}, {}}, want{"sqrt((n-k)/n)", {}, {}};
  for (std::size_t n = 1; n <= a.blocks; ++n) {
    const double e = best_k_sparse_column_error(v.column(n - 1), a.k);
    const double expect = n > a.k ? std::sqrt(static_cast<double>(n - a.k) / static_cast<double>(n)) : 0.0;
    worst = std::max(worst, std::abs(e * e - expect * expect));
    curve.push_back({{"n", n}, {"error", e}, {"bound", expect}});
    got.x.push_back(static_cast<double>(n));
    got.y.push_back(e);
    want.x.push_back(static_cast<double>(n));
    want.y.push_back(expect);
  }
  rep.add_metric("max|error^2 - (n-k)/n|", worst, "<=", 1e-12);
  rep.data["curve"] = curve;
  write_plot(rep, a.plot, {got, want}, {"distance of a_n to k-sparse vectors", "n", "l2 error"});
}

// ---- expander ------------------------------------------------------------

struct ExpanderArgs {
  std::size_t n_max = 8;
  std::size_t degree = 6;
  std::size_t s = 10;
  std::string plot;
  std::string edge_dir;
};

void run_expander(const ExpanderArgs& a, std::uint64_t seed, RunReport& rep) {
  const auto r = build_even_projection_pipeline(a.n_max, a.degree, a.s, seed);
  rep.params = {{"n_max", a.n_max}, {"degree", a.degree}, {"s", a.s}, {"seed", seed}};
  Json blocks = Json::array();
  double min_l1 = std::numeric_limits<double>::infinity();
  for (const auto& b : r.blocks) {
    blocks.push_back({{"m", b.m}, {"lambda1", b.lambda1}, {"err", b.err}, {"degree", b.degree},
                      {"regenerations", b.regenerations}});
    min_l1 = std::min(min_l1, b.lambda1);
    if (!a.edge_dir.empty()) {
      std::filesystem::create_directories(a.edge_dir);
      const auto path = (std::filesystem::path(a.edge_dir) / ("block_" + std::to_string(b.n) + ".edges")).string();
      write_edge_list_file(path, b.graph);
      rep.artifacts.push_back(path);
    }
  }
  rep.data["params"] = rep.params;
  rep.data["per_block"] = blocks;
  rep.data["delta_hat"] = r.delta_hat;
  rep.data["filter_degree"] = r.filter.degree();
  rep.data["profile_bound"] = r.profile_bound;
  rep.data["max_err"] = r.max_err;
  rep.data["measured_profile"] = profile_json(r.measured_profile);
  Json corner = Json::array();
  double corner_slack = -std::numeric_limits<double>::infinity();
  Series ce{"exact", {}, {}}, cb{"(2+2sqrt(2n))/(2n+1)", {}, {}};
  for (std::size_t n = 1; n <= r.corner.size(); ++n) {
    const auto& c = r.corner[n - 1];
    corner.push_back({{"n", n}, {"exact", c.exact}, {"bound", c.bound}});
    corner_slack = std::max(corner_slack, c.exact - c.bound);
    ce.x.push_back(static_cast<double>(n));
    ce.y.push_back(c.exact);
    cb.x.push_back(static_cast<double>(n));
    cb.y.push_back(c.bound);
  }
  rep.data["corner"] = corner;
  rep.add_metric("min lambda1", min_l1, ">", 0.0);
  rep.add_metric("max ||f_s(L) - P_ker||", r.max_err, "<=", 1.0 / static_cast<double>(a.s) + 1e-6);
  rep.add_metric("max ||L||", r.max_laplacian_norm, "<=", 2.0 + 1e-12);
  rep.add_metric("measured profile", static_cast<double>(r.measured_profile.k()), "<=", r.profile_bound);
  rep.add_metric("max(corner exact - bound)", corner_slack, "<=", 1e-10);
  write_plot(rep, a.plot, {ce, cb}, {"corner compression", "n", "norm"});
}

// ---- ghost / ideal-extract ----------------------------------------------

struct GhostArgs {
  std::string in;
  std::size_t blocks = 16;
  double delta = 0.5;
  std::size_t k = 4;
  std::size_t tail_start = 0;
  std::string plot;
};

Json certificate_json(const ExtractionCertificate& c, double verified) {
  Json j = {{"case", to_string(c.case_tag)}, {"delta", c.delta}, {"k", c.k}, {"approx_error", c.approx_error},
            {"approx_budget", c.approx_budget}, {"sigma_min", c.sigma_min}, {"sigma_min_verified", verified}};
  if (c.case_tag == ExtractionCase::diagonal) {
    j["selected"] = one_based(c.selected);
  } else {
    Json p = Json::array();
    for (const auto& [i, jj] : c.pairs) p.push_back(Json::array({i + 1, jj + 1}));
    j["pairs"] = p;
    j["n0"] = c.n0 + 1;
    j["pair_sigma_min"] = to_json_array(c.pair_sigma_min);
  }
  return j;
}

void run_ghost(const GhostArgs& a, RunReport& rep) {
  SparseOp op;
  std::size_t complete_blocks = 0;
  bool is_projection = a.in.empty();
  if (is_projection) {
    const auto layout = BlockLayout::triangular(a.blocks);
    op = make_block_projection(layout).to_sparse();
    complete_blocks = a.blocks;
    rep.params = {{"blocks", a.blocks}, {"delta", a.delta}, {"k", a.k}};
  } else {
    op = read_coordinate_file(a.in);
    rep.params = {{"in", a.in}, {"delta", a.delta}, {"k", a.k}};
  }
  const auto tp = tail_profile(op);
  bool monotone = true;
  for (std::size_t t = 1; t < tp.values.size(); ++t) monotone = monotone && tp.values[t] <= tp.values[t - 1];
  rep.add_check("tail profile non-increasing", monotone);
  rep.data["tail_profile"] = to_json_array(tp.values);
  const std::size_t above = count_singular_values_above(op, 0.5);
  rep.data["singular_values_above_half"] = above;
  if (is_projection) {
    double worst = 0.0;
    for (std::size_t t = 1; t <= tp.values.size(); ++t) {
      std::size_t b = 1;
      while (b * (b + 1) / 2 < t) ++b;
      worst = std::max(worst, std::abs(tp.at(t) - 1.0 / static_cast<double>(b)));
    }
    rep.add_metric("max|s(t) - 1/b(t)|", worst, "==", 0.0);
    rep.add_metric("singular values > 1/2", static_cast<double>(above), "==", static_cast<double>(complete_blocks));
  }
  ExtractOptions opt;
  opt.tail_start = a.tail_start == 0 ? op.window() / 2 + 1 : a.tail_start;
  rep.data["tail_start"] = opt.tail_start;
  try {
    const auto c = extract(op, a.delta, a.k, opt);
    rep.data["extraction"] = certificate_json(c, verify_certificate(op, c));
  } catch (const InsufficientData& e) {
    rep.data["extraction"] = {{"case", "insufficient-data"}, {"message", e.what()}};
  } catch (const ApproximationBudgetError& e) {
    rep.data["extraction"] = {{"case", "approximation-budget"}, {"message", e.what()}};
  }
  Series s{"s(t)", {}, {}};
  for (std::size_t t = 1; t <= tp.values.size(); ++t) {
    s.x.push_back(static_cast<double>(t));
    s.y.push_back(tp.at(t));
  }
  write_plot(rep, a.plot, {s}, {"tail profile", "t", "sup |a_ij|, i,j >= t"});
}

struct ExtractArgs {
  std::string in;
  double delta = 0.5;
  std::size_t k = 4;
  std::size_t tail_start = 1;
  std::string which = "auto";
};

void run_extract(const ExtractArgs& a, RunReport& rep) {
  const auto op = read_coordinate_file(a.in);
  rep.params = {{"in", a.in}, {"delta", a.delta}, {"k", a.k}, {"tail_start", a.tail_start}, {"case", a.which}};
  ExtractOptions opt;
  opt.tail_start = a.tail_start;
  ExtractionCertificate c;
  if (a.which == "diagonal") {
    c = extract_diagonal_case(op, a.delta, a.k, opt);
  } else if (a.which == "offdiagonal") {
    c = extract_offdiagonal_case(op, a.delta, a.k, opt);
  } else {
    c = extract(op, a.delta, a.k, opt);
  }
  const double verified = verify_certificate(op, c);
  rep.data["certificate"] = certificate_json(c, verified);
  rep.data["tail_profile"] = to_json_array(tail_profile(op).values);
  rep.add_metric("sigma_min(u* p_L a u)", verified, ">", a.delta / 2);
  rep.add_metric("||a - a^(k)||", c.approx_error, "<", c.approx_budget);
}

// ---- embed ---------------------------------------------------------------

struct EmbedArgs {
  std::string kind = "action";
  std::size_t points = 32;
  std::string shifts = "1";
  std::string coeffs;
  std::string boundary = "cyclic";
  std::size_t free_rank = 0;
  std::size_t random_perms = 0;
  std::string graph;
  std::size_t random_m = 0;
  std::size_t random_d = 3;
  std::string metric;
  std::size_t line = 0;
  long long radius = 1;
  std::string matrix;
};

void run_embed(const EmbedArgs& a, std::uint64_t seed, RunReport& rep) {
  rep.params = {{"kind", a.kind}};
  if (a.kind == "action") {
    FiniteAction act;
    if (a.free_rank > 0) {
      act = free_group_ball(a.free_rank, static_cast<std::size_t>(a.radius));
      rep.params["free_rank"] = a.free_rank;
      rep.params["radius"] = a.radius;
    } else if (a.random_perms > 0) {
      act = random_permutation_action(a.points, a.random_perms, derive_seed(seed, 3));
      rep.params["random_perms"] = a.random_perms;
      rep.params["points"] = a.points;
    } else {
      act = integer_shift_action(a.points, parse_int_list(a.shifts), a.boundary == "drop" ? Boundary::drop : Boundary::cyclic);
      rep.params["points"] = a.points;
      rep.params["shifts"] = a.shifts;
      rep.params["boundary"] = a.boundary;
    }
    auto coeffs = parse_complex_list(a.coeffs);
    if (coeffs.empty()) coeffs.assign(act.generators.size(), 1.0);
    const auto op = action_operator(act, coeffs);
    const double r = static_cast<double>(act.generators.size());
    rep.add_metric("row_max", static_cast<double>(op.profile().row_max), "<=", r);
    rep.add_metric("col_max", static_cast<double>(op.profile().col_max), "<=", r);
    rep.data["profile"] = profile_json(op.profile());
    rep.data["generators"] = act.generators.size();
    write_matrix(rep, a.matrix, op);
  } else if (a.kind == "adjacency") {
    UlfGraph g;
    if (!a.graph.empty()) {
      g = read_edge_list_file(a.graph);
      rep.params["graph"] = a.graph;
    } else {
      g = random_regular_graph(a.random_m, a.random_d, derive_seed(seed, 4)).graph;
      rep.params["random_m"] = a.random_m;
      rep.params["random_d"] = a.random_d;
    }
    const auto op = adjacency_operator(g);
    const double deg = static_cast<double>(g.max_degree());
    const double nrm = operator_norm(op);
    rep.add_metric("profile k", static_cast<double>(op.profile().k()), "<=", deg);
    rep.add_metric("||a_G||", nrm, "<=", deg + 1e-9);
    rep.add_metric("C k^{3/2} - ||a_G||", norm_upper_bound(op).value - nrm, ">=", -1e-9);
    rep.data["max_degree"] = g.max_degree();
    rep.data["norm"] = nrm;
    write_matrix(rep, a.matrix, op);
  } else if (a.kind == "band") {
    const MetricSpace space = !a.metric.empty() ? read_metric_file(a.metric) : line_metric(a.line == 0 ? a.points : a.line);
    rep.params["radius"] = a.radius;
    rep.params[a.metric.empty() ? "line" : "metric"] = a.metric.empty() ? Json(space.point_count()) : Json(a.metric);
    rep.add_check("triangle inequality", space.triangle_inequality_holds(seed));
    const Kernel kern = [&](std::size_t x, std::size_t y) {
      return Complex(1.0 / (1.0 + static_cast<double>(space.d(x, y))), 0.0);
    };
    const auto b = band_operator(space, kern, a.radius);
    const auto b2 = b.op * b.op;
    rep.add_metric("profile k", static_cast<double>(b.op.profile().k()), "<=", static_cast<double>(b.ball_bound));
    rep.add_metric("propagation", static_cast<double>(propagation(b.op, space)), "<=", static_cast<double>(a.radius));
    rep.add_metric("propagation of square", static_cast<double>(propagation(b2, space)), "<=", 2.0 * static_cast<double>(a.radius));
    rep.data["ball_bound"] = b.ball_bound;
    rep.data["witness_recomputed"] = b.witness_recomputed;
    rep.data["profile"] = profile_json(b.op.profile());
    write_matrix(rep, a.matrix, b.op);
  } else {
    throw CLI::ValidationError("--kind", "unknown kind " + a.kind);
  }
}

// ---- homotopy ------------------------------------------------------------

struct HomotopyArgs {
  std::string in;
  std::size_t window = 256;
  std::size_t steps = 64;
  std::size_t count = 8;
  double max_jump = 0.1;
};

void run_homotopy(const HomotopyArgs& a, std::uint64_t seed, RunReport& rep) {
  SparseOp g;
  if (!a.in.empty()) {
    g = read_coordinate_file(a.in);
    if (a.window > g.window()) {
      std::vector<Triplet> t = g.triplets();
      for (std::size_t i = g.window(); i < a.window; ++i) t.push_back({i, i, 1.0});
      g = SparseOp::from_triplets(a.window, std::move(t));
    }
    rep.params = {{"in", a.in}};
  } else {
    g = random_invertible(a.window, derive_seed(seed, 5));
  }
  rep.params["window"] = g.window();
  rep.params["steps"] = a.steps;
  rep.params["count"] = a.count;
  rep.params["max_jump"] = a.max_jump;
  KuiperConfig cfg;
  cfg.steps = a.steps;
  cfg.count = a.count;
  cfg.max_jump = a.max_jump;
  const auto path = contract(g, cfg);
  const double end_err = max_entry_distance(path.steps.back(), SparseOp::identity(g.window()));
  rep.add_check("first step equals input", path.steps.front() == g);
  rep.add_metric("min sigma_min", path.min_sigma(), ">", 1e-6);
  rep.add_metric("max jump", path.max_jump(), "<=", cfg.max_jump);
  rep.add_metric("max|end - 1|", end_err, "<=", 1e-8);
  rep.add_metric("max profile", static_cast<double>(path.max_profile()), "<=", static_cast<double>(path.profile_budget));
  Json steps = Json::array();
  for (const auto& c : path.certs)
    steps.push_back({{"stage", to_string(c.stage)}, {"t", c.t}, {"sigma_min", c.sigma_min}, {"profile", profile_json(c.profile)},
                     {"jump", c.jump}});
  Json stages = Json::object();
  for (Stage s : {Stage::select, Stage::rotate1, Stage::rotate2, Stage::normalize, Stage::compress, Stage::close}) {
    const auto [lo, hi] = path.stage_range(s);
    stages[to_string(s)] = Json::array({lo, hi});
  }
  rep.data["profile_budget"] = path.profile_budget;
  rep.data["a"] = one_based(path.selection.a);
  rep.data["aprime"] = one_based(path.selection.aprime);
  rep.data["close_direction"] = path.close_direction;
  rep.data["refinements"] = path.refinements;
  rep.data["stages"] = stages;
  rep.data["steps"] = steps;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matrix-finite operator toolkit", "mfop"};
  app.fallthrough(true);
  app.require_subcommand(1, 1);
  Global glob;
  app.add_option("--seed", glob.seed, "64-bit seed");
  app.add_option("--out,--report", glob.out, "report JSON path");
  app.add_flag("--json-only", glob.json_only, "print only the JSON report");

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "build a named operator");
  construct->add_option("--op", ca.op)->check(CLI::IsMember({"v", "u", "p", "m2p", "shift", "polar"}));
  construct->add_option("--blocks", ca.blocks);
  construct->add_option("--window", ca.window);
  construct->add_option("--out", ca.out, "coordinate file");
  construct->add_option("--policy", ca.policy)->check(CLI::IsMember({"drop", "complete"}));
  construct->add_option("--plot", ca.plot);

  AlgebraArgs aa;
  auto* algebra = app.add_subcommand("algebra-check", "closure laws on random pairs");
  algebra->add_option("--trials", aa.trials);
  algebra->add_option("--k", aa.k)->check(CLI::PositiveNumber);
  algebra->add_option("--window", aa.window)->check(CLI::PositiveNumber);

  NormArgs na;
  auto* normb = app.add_subcommand("norm-bound", "C k^{3/2} against the operator norm");
  normb->add_option("--in", na.in);
  normb->add_option("--trials", na.trials);
  normb->add_option("--k", na.k)->check(CLI::PositiveNumber);
  normb->add_option("--window", na.window)->check(CLI::PositiveNumber);

  DistanceArgs da;
  auto* distance = app.add_subcommand("distance", "distance of a_n to k-sparse vectors");
  distance->add_option("--blocks", da.blocks)->check(CLI::PositiveNumber);
  distance->add_option("--k", da.k);
  distance->add_option("--plot", da.plot);

  ExpanderArgs ea;
  auto* expander = app.add_subcommand("expander", "even-block projection pipeline");
  expander->add_option("--n-max", ea.n_max)->check(CLI::PositiveNumber);
  expander->add_option("--degree", ea.degree)->check(CLI::Range(3, 1 << 20));
  expander->add_option("--s", ea.s)->check(CLI::PositiveNumber);
  expander->add_option("--plot", ea.plot);
  expander->add_option("--edge-dir", ea.edge_dir);

  GhostArgs ga;
  auto* ghost = app.add_subcommand("ghost", "tail profile and non-compactness diagnostics");
  ghost->add_option("--in", ga.in);
  ghost->add_option("--blocks", ga.blocks)->check(CLI::PositiveNumber);
  ghost->add_option("--delta", ga.delta)->check(CLI::PositiveNumber);
  ghost->add_option("--k", ga.k)->check(CLI::PositiveNumber);
  ghost->add_option("--tail-start", ga.tail_start);
  ghost->add_option("--plot", ga.plot);

  ExtractArgs xa;
  auto* extract_cmd = app.add_subcommand("ideal-extract", "extraction certificate for a self-adjoint operator");
  extract_cmd->add_option("--in", xa.in)->required();
  extract_cmd->add_option("--delta", xa.delta)->check(CLI::PositiveNumber);
  extract_cmd->add_option("--k", xa.k)->check(CLI::PositiveNumber);
  extract_cmd->add_option("--tail-start", xa.tail_start)->check(CLI::PositiveNumber);
  extract_cmd->add_option("--case", xa.which)->check(CLI::IsMember({"auto", "diagonal", "offdiagonal"}));

  EmbedArgs ba;
  auto* embed = app.add_subcommand("embed", "operators from actions, graphs and metric spaces");
  embed->add_option("--kind", ba.kind)->check(CLI::IsMember({"action", "adjacency", "band"}));
  embed->add_option("--points", ba.points)->check(CLI::PositiveNumber);
  embed->add_option("--shifts", ba.shifts);
  embed->add_option("--coeffs", ba.coeffs);
  embed->add_option("--boundary", ba.boundary)->check(CLI::IsMember({"cyclic", "drop"}));
  embed->add_option("--free-rank", ba.free_rank);
  embed->add_option("--random-perms", ba.random_perms);
  embed->add_option("--graph", ba.graph);
  embed->add_option("--random-m", ba.random_m);
  embed->add_option("--random-d", ba.random_d);
  embed->add_option("--metric", ba.metric);
  embed->add_option("--line", ba.line);
  embed->add_option("--radius", ba.radius)->check(CLI::NonNegativeNumber);
  embed->add_option("--matrix", ba.matrix, "coordinate file");

  HomotopyArgs ha;
  auto* homotopy = app.add_subcommand("homotopy", "certified path to the identity");
  homotopy->add_option("--in", ha.in);
  homotopy->add_option("--window", ha.window)->check(CLI::PositiveNumber);
  homotopy->add_option("--steps", ha.steps)->check(CLI::PositiveNumber);
  homotopy->add_option("--count", ha.count)->check(CLI::PositiveNumber);
  homotopy->add_option("--max-jump", ha.max_jump)->check(CLI::PositiveNumber);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  RunReport rep;
  rep.command = sub->get_name();
  rep.seed = glob.seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (sub == construct) run_construct(ca, rep);
    else if (sub == algebra) run_algebra(aa, glob.seed, rep);
    else if (sub == normb) run_norm(na, glob.seed, rep);
    else if (sub == distance) run_distance(da, rep);
    else if (sub == expander) run_expander(ea, glob.seed, rep);
    else if (sub == ghost) run_ghost(ga, rep);
    else if (sub == extract_cmd) run_extract(xa, rep);
    else if (sub == embed) run_embed(ba, glob.seed, rep);
    else if (sub == homotopy) run_homotopy(ha, glob.seed, rep);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InsufficientData& e) {
    rep.fail("insufficient-data", e.what());
  } catch (const ApproximationBudgetError& e) {
    rep.fail("approximation-budget", e.what());
  } catch (const WindowTooSmall& e) {
    rep.fail("window-too-small", e.what());
  } catch (const PathCertificateError& e) {
    rep.fail("path-certificate", e.what());
  } catch (const ConvergenceError& e) {
    rep.fail("convergence", e.what());
  } catch (const RetryExhausted& e) {
    rep.fail("retry-exhausted", e.what());
  } catch (const ParseError& e) {
    rep.fail("parse", e.what());
  } catch (const ContractViolation& e) {
    rep.fail("contract-violation", e.what());
  } catch (const DimensionError& e) {
    rep.fail("dimension", e.what());
  } catch (const std::exception& e) {
    rep.fail("error", e.what());
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string text = dump_json(rep.to_json()) + "\n";
  if (!glob.out.empty()) {
    std::ofstream f(glob.out, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << glob.out << '\n';
      return kExitFailed;
    }
    f << text;
  }
  if (glob.json_only) {
    out << text;
  } else {
    out << rep.command << (rep.all_pass() ? ": PASS" : ": FAIL") << '\n';
    for (const auto& m : rep.metrics) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "  [%s] %s = %.10g %s %.10g", m.pass ? "pass" : "FAIL", m.name.c_str(), m.value,
                    m.relation.c_str(), m.bound);
      out << buf << '\n';
    }
    if (rep.failed) out << "  error (" << rep.error_type << "): " << rep.error_message << '\n';
    for (const auto& p : rep.artifacts) out << "  wrote " << p << '\n';
    if (!glob.out.empty()) out << "  report " << glob.out << '\n';
  }
  return rep.all_pass() ? kExitOk : kExitFailed;
}

}  // namespace mfop::cli
