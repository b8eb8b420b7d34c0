#include "mfop/kuiper.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mfop/dense.hpp"
#include "mfop/error.hpp"
#include "mfop/rng.hpp"

namespace mfop {

std::string to_string(Stage s) {
  switch (s) {
    case Stage::select: return "select";
    case Stage::rotate1: return "rotate1";
    case Stage::rotate2: return "rotate2";
    case Stage::normalize: return "normalize";
    case Stage::compress: return "compress";
    case Stage::close: return "close";
    case Stage::whitehead: return "whitehead";
  }
  return "unknown";
}

std::size_t profile_budget(std::size_t k) noexcept { return 2 * k * (k + 1) + 1; }

double HomotopyPath::min_sigma() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : certs) m = std::min(m, c.sigma_min);
  return m;
}

double HomotopyPath::max_jump() const {
  double m = 0.0;
  for (const auto& c : certs) m = std::max(m, c.jump);
  return m;
}

std::size_t HomotopyPath::max_profile() const {
  std::size_t m = 0;
  for (const auto& c : certs) m = std::max(m, c.profile.k());
  return m;
}

std::pair<std::size_t, std::size_t> HomotopyPath::stage_range(Stage s) const {
  std::size_t first = certs.size(), last = 0;
  for (std::size_t i = 0; i < certs.size(); ++i) {
    if (certs[i].stage != s) continue;
    first = std::min(first, i);
    last = i;
  }
  if (first == certs.size()) return {0, 0};
  return {first, last};
}

void HomotopyPath::append(HomotopyPath&& seg) {
  if (seg.steps.empty()) return;
  if (steps.empty()) {
    *this = std::move(seg);
    return;
  }
  if (!(seg.steps.front() == steps.back())) throw PathCertificateError("path segments do not join");
  steps.insert(steps.end(), std::make_move_iterator(seg.steps.begin() + 1), std::make_move_iterator(seg.steps.end()));
  certs.insert(certs.end(), seg.certs.begin() + 1, seg.certs.end());
  refinements += seg.refinements;
}

namespace {

using StepFn = std::function<SparseOp(double)>;

struct Sample {
  double t;
  SparseOp op;
  dense::SingularExtremes se;
};

// Samples F on [0, 1] with adaptive bisection and records certificates.
class SegmentSampler {
 public:
  SegmentSampler(Stage stage, const KuiperConfig& cfg, StepFn f) : stage_(stage), cfg_(cfg), f_(std::move(f)) {}

  HomotopyPath run(const SparseOp& start) {
    HomotopyPath seg;
    Sample s0{0.0, start, measure(start, 0.0)};
    seg.steps.push_back(s0.op);
    seg.certs.push_back({stage_, 0.0, s0.se.sigma_min, s0.se.sigma_max, s0.op.profile(), 0.0, s0.se.sigma_min});
    const std::size_t n = std::max<std::size_t>(cfg_.steps, 1);
    for (std::size_t j = 1; j <= n; ++j) {
      Sample s1 = eval(j == n ? 1.0 : static_cast<double>(j) / static_cast<double>(n));
      process(s0, s1, 0, cfg_.retries, seg);
      s0 = std::move(s1);
    }
    seg.refinements = refinements_;
    return seg;
  }

 private:
  dense::SingularExtremes measure(const SparseOp& op, double t) const {
    const auto se = dense::singular_extremes(op);
    if (!(se.sigma_min >= cfg_.sigma_floor))
      throw PathCertificateError(to_string(stage_) + ": sigma_min " + std::to_string(se.sigma_min) + " at t = " +
                                 std::to_string(t) + " is below the floor");
    return se;
  }

  Sample eval(double t) {
    SparseOp op = f_(t);
    auto se = measure(op, t);
    return {t, std::move(op), se};
  }

  void process(const Sample& s0, const Sample& s1, std::size_t depth, std::size_t lower_left, HomotopyPath& seg) {
    const SparseOp delta = s1.op - s0.op;
    const double dn = delta.is_zero() ? 0.0 : dense::singular_extremes(delta).sigma_max;
    const double jump = dn / s0.se.sigma_max;
    const double lower = std::min(s0.se.sigma_min, s1.se.sigma_min) - dn;
    const bool too_far = jump > cfg_.max_jump;
    const bool uncertified = lower <= 0.0 && lower_left > 0;
    if ((too_far || uncertified) && depth < cfg_.max_depth) {
      ++refinements_;
      const Sample mid = eval(0.5 * (s0.t + s1.t));
      const std::size_t next_left = too_far ? lower_left : lower_left - 1;
      process(s0, mid, depth + 1, next_left, seg);
      process(mid, s1, depth + 1, next_left, seg);
      return;
    }
    if (too_far)
      throw PathCertificateError(to_string(stage_) + ": jump " + std::to_string(jump) + " exceeds max_jump after " +
                                 std::to_string(depth) + " bisections");
    seg.steps.push_back(s1.op);
    seg.certs.push_back({stage_, s1.t, s1.se.sigma_min, s1.se.sigma_max, s1.op.profile(), jump, lower});
  }

  Stage stage_;
  const KuiperConfig& cfg_;
  StepFn f_;
  std::size_t refinements_ = 0;
};

struct Plane {
  std::vector<std::pair<std::size_t, Complex>> x;  // unit vector
  std::size_t y;                                   // basis index orthogonal to x
};

// I + sum over planes of (c - 1)(xx* + yy*) + s(yx* - xy*); x is carried to c x + s y.
SparseOp plane_rotation(std::size_t n, const std::vector<Plane>& planes, double c, double s) {
  std::vector<Triplet> t;
  for (std::size_t j = 0; j < n; ++j) t.push_back({j, j, 1.0});
  for (const auto& pl : planes) {
    for (const auto& [p, xp] : pl.x) {
      for (const auto& [q, xq] : pl.x) t.push_back({p, q, (c - 1.0) * xp * std::conj(xq)});
      t.push_back({pl.y, p, s * std::conj(xp)});
      t.push_back({p, pl.y, -s * xp});
    }
    t.push_back({pl.y, pl.y, c - 1.0});
  }
  return SparseOp::from_triplets(n, std::move(t));
}

std::pair<double, double> quarter_turn(double t) {
  if (t >= 1.0) return {0.0, 1.0};
  const double th = 0.5 * std::numbers::pi * t;
  return {std::cos(th), std::sin(th)};
}

// Entries (i, j) with pick(i, j) are multiplied by `factor`; factor 0 removes them.
template <class Pred>
SparseOp scale_region(const SparseOp& a, Pred pick, Complex factor, std::vector<Triplet> extra = {}) {
  std::vector<Triplet> t = a.triplets();
  for (auto& e : t)
    if (pick(e.row, e.col)) e.value *= factor;
  t.insert(t.end(), extra.begin(), extra.end());
  return SparseOp::from_triplets(a.window(), std::move(t));
}

std::vector<bool> membership(std::size_t n, const std::vector<std::size_t>& idx) {
  std::vector<bool> in(n, false);
  for (auto i : idx) in[i] = true;
  return in;
}

bool is_positive_multiple_of_basis(const SparseOp& g, std::size_t a) {
  const auto rows = g.col_rows(a);
  const auto vals = g.col_values(a);
  return rows.size() == 1 && rows[0] == a && vals[0].imag() == 0.0 && vals[0].real() > 0.0;
}

}  // namespace

Selection select_basis_vectors(const SparseOp& g, std::size_t count) {
  const std::size_t n = g.window();
  std::vector<bool> used(n, false);
  Selection sel;
  std::size_t scan = 0;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t a = n;
    for (std::size_t c = scan; c < n; ++c) {
      if (used[c]) continue;
      const auto rows = g.col_rows(c);
      if (std::any_of(rows.begin(), rows.end(), [&](std::size_t r) { return used[r]; })) continue;
      a = c;
      break;
    }
    if (a == n)
      throw WindowTooSmall("select_basis_vectors: no admissible a_" + std::to_string(i + 1) + " in a window of " +
                           std::to_string(n));
    const auto rows = g.col_rows(a);
    std::size_t ap = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (used[c] || c == a || std::binary_search(rows.begin(), rows.end(), c)) continue;
      ap = c;
      break;
    }
    if (ap == n)
      throw WindowTooSmall("select_basis_vectors: no admissible a'_" + std::to_string(i + 1) + " in a window of " +
                           std::to_string(n));
    sel.a.push_back(a);
    sel.aprime.push_back(ap);
    used[a] = used[ap] = true;
    for (auto r : rows) used[r] = true;
    scan = a + 1;
  }
  return sel;
}

bool verify_selection(const SparseOp& g, const Selection& sel, double tol) {
  if (sel.a.size() != sel.aprime.size()) return false;
  const std::size_t n = g.window();
  auto basis = [n](std::size_t i) {
    std::vector<Complex> e(n);
    e[i] = 1.0;
    return e;
  };
  auto dot = [](const std::vector<Complex>& x, const std::vector<Complex>& y) {
    Complex s{};
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return std::abs(s);
  };
  for (std::size_t i = 0; i < sel.a.size(); ++i) {
    const auto ai = basis(sel.a[i]);
    const auto gai = g.column(sel.a[i]);
    const auto api = basis(sel.aprime[i]);
    if (sel.a[i] == sel.aprime[i]) return false;
    if (dot(api, gai) > tol) return false;
    for (std::size_t l = 0; l < i; ++l) {
      const std::vector<std::vector<Complex>> al{basis(sel.a[l]), g.column(sel.a[l]), basis(sel.aprime[l])};
      for (const auto& v : al) {
        if (dot(v, ai) > tol || dot(v, gai) > tol || dot(v, api) > tol) return false;
      }
    }
  }
  return true;
}

HomotopyPath rotation_stage(const SparseOp& g, const Selection& sel, const KuiperConfig& cfg) {
  const std::size_t n = g.window();
  std::vector<Plane> first, second;
  std::vector<double> norms;
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < sel.a.size(); ++i) {
    if (is_positive_multiple_of_basis(g, sel.a[i])) continue;
    const auto rows = g.col_rows(sel.a[i]);
    const auto vals = g.col_values(sel.a[i]);
    double nrm = 0.0;
    for (const auto& v : vals) nrm += std::norm(v);
    nrm = std::sqrt(nrm);
    Plane p{{}, sel.aprime[i]};
    for (std::size_t q = 0; q < rows.size(); ++q) p.x.emplace_back(rows[q], vals[q] / nrm);
    if (std::binary_search(rows.begin(), rows.end(), sel.aprime[i])) {
      // g a_i already points along a'_i: nothing to turn in the first plane
      if (!(rows.size() == 1 && vals[0].imag() == 0.0 && vals[0].real() > 0.0))
        throw ContractViolation("rotation_stage: a'_" + std::to_string(i + 1) + " is not orthogonal to g a_" +
                                std::to_string(i + 1));
    } else {
      first.push_back(p);
    }
    second.push_back(Plane{{{sel.aprime[i], Complex(1.0, 0.0)}}, sel.a[i]});
    norms.push_back(nrm);
    cols.push_back(i);
  }

  // Column a_i of R(t) g is known in closed form; writing it directly keeps
  // rounding residue of the sparse product out of the stored entries.
  auto set_columns = [&](const SparseOp& m, auto&& column) {
    std::vector<bool> replace(n, false);
    for (auto i : cols) replace[sel.a[i]] = true;
    std::vector<Triplet> t;
    for (const auto& e : m.triplets())
      if (!replace[e.col]) t.push_back(e);
    for (std::size_t q = 0; q < cols.size(); ++q) column(cols[q], norms[q], t);
    SparseOp out = SparseOp::from_triplets(n, std::move(t));
    if (max_entry_distance(out, m) > 1e-9 * std::max(1.0, m.max_abs()))
      throw ContractViolation("rotation_stage: selection planes are not mutually orthogonal");
    return out;
  };

  HomotopyPath path = SegmentSampler(Stage::rotate1, cfg, [&](double t) {
                        if (t <= 0.0) return g;
                        const auto [c, s] = quarter_turn(t);
                        return set_columns(plane_rotation(n, first, c, s) * g,
                                           [&](std::size_t i, double nrm, std::vector<Triplet>& out) {
                                             const auto a = sel.a[i], ap = sel.aprime[i];
                                             const auto rows = g.col_rows(a);
                                             const auto vals = g.col_values(a);
                                             if (std::binary_search(rows.begin(), rows.end(), ap)) {
                                               out.push_back({ap, a, nrm});
                                               return;
                                             }
                                             for (std::size_t q = 0; q < rows.size(); ++q) out.push_back({rows[q], a, c * vals[q]});
                                             out.push_back({ap, a, s * nrm});
                                           });
                      }).run(g);
  const SparseOp f1 = path.steps.back();
  path.append(SegmentSampler(Stage::rotate2, cfg, [&](double t) {
                if (t <= 0.0) return f1;
                const auto [c, s] = quarter_turn(t);
                return set_columns(plane_rotation(n, second, c, s) * f1,
                                   [&](std::size_t i, double nrm, std::vector<Triplet>& out) {
                                     out.push_back({sel.aprime[i], sel.a[i], c * nrm});
                                     out.push_back({sel.a[i], sel.a[i], s * nrm});
                                   });
              }).run(f1));
  return path;
}

HomotopyPath normalize_and_compress(const SparseOp& f2, const Selection& sel, const KuiperConfig& cfg) {
  const std::size_t n = f2.window();
  const auto in_a = membership(n, sel.a);

  HomotopyPath path = SegmentSampler(Stage::normalize, cfg, [&](double t) {
                        if (t <= 0.0) return f2;
                        std::vector<Triplet> ones;
                        for (auto a : sel.a) ones.push_back({a, a, t});
                        return scale_region(f2, [&](std::size_t, std::size_t j) { return in_a[j]; }, 1.0 - t, ones);
                      }).run(f2);
  const SparseOp f3 = path.steps.back();
  path.append(SegmentSampler(Stage::compress, cfg, [&](double t) {
                if (t <= 0.0) return f3;
                return scale_region(f3, [&](std::size_t i, std::size_t j) { return in_a[i] && !in_a[j]; }, 1.0 - t);
              }).run(f3));
  return path;
}

namespace {

// Directions that bisect the angular gaps between eigenvalues of u, widest gap first.
std::vector<double> ray_directions(const SparseOp& f4, const std::vector<bool>& in_h1) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < in_h1.size(); ++i)
    if (in_h1[i]) idx.push_back(i);
  if (idx.empty()) return {0.0};
  const Eigen::MatrixXcd u = dense::to_dense(compress(f4, idx, idx));
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u, false);
  std::vector<double> args;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) args.push_back(std::arg(es.eigenvalues()(i)));
  std::sort(args.begin(), args.end());
  std::vector<std::pair<double, double>> gaps;  // (width, bisector)
  for (std::size_t i = 0; i < args.size(); ++i) {
    const double lo = args[i];
    const double hi = i + 1 < args.size() ? args[i + 1] : args[0] + 2 * std::numbers::pi;
    gaps.emplace_back(hi - lo, 0.5 * (lo + hi));
  }
  std::stable_sort(gaps.begin(), gaps.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  std::vector<double> dirs;
  for (const auto& [w, b] : gaps) dirs.push_back(std::remainder(b, 2 * std::numbers::pi));
  return dirs;
}

}  // namespace

HomotopyPath close_stage(const SparseOp& f4, const Selection& sel, const KuiperConfig& cfg) {
  const std::size_t n = f4.window();
  const auto in_a = membership(n, sel.a);
  std::vector<bool> in_h1(n);
  for (std::size_t i = 0; i < n; ++i) in_h1[i] = !in_a[i];

  const auto dirs = ray_directions(f4, in_h1);
  std::string last_error;
  for (std::size_t attempt = 0; attempt < dirs.size() && attempt <= cfg.retries; ++attempt) {
    const double phi = dirs[attempt];
    const Complex w = std::polar(1.0, phi);
    try {
      HomotopyPath path = SegmentSampler(Stage::close, cfg, [&](double t) {
                            if (t <= 0.0) return f4;
                            std::vector<Triplet> diag;
                            for (std::size_t i = 0; i < n; ++i)
                              if (in_h1[i]) diag.push_back({i, i, -t * w});
                            const Complex keep = t >= 1.0 ? Complex(0.0, 0.0) : Complex(1.0 - t, 0.0);
                            return scale_region(f4, [&](std::size_t i, std::size_t j) { return in_h1[i] && in_h1[j]; },
                                                keep, diag);
                          }).run(f4);
      const SparseOp ray_end = path.steps.back();
      const double psi0 = std::remainder(phi + std::numbers::pi, 2 * std::numbers::pi);
      path.append(SegmentSampler(Stage::close, cfg, [&](double t) {
                    if (t <= 0.0) return ray_end;
                    const Complex z = t >= 1.0 ? Complex(1.0, 0.0) : std::polar(1.0, psi0 * (1.0 - t));
                    std::vector<Complex> d(n);
                    for (std::size_t i = 0; i < n; ++i) d[i] = in_h1[i] ? z : Complex(1.0, 0.0);
                    return SparseOp::diagonal(d);
                  }).run(ray_end));
      path.close_direction = phi;
      return path;
    } catch (const PathCertificateError& e) {
      last_error = e.what();
    }
  }
  throw PathCertificateError("close stage: every ray direction failed; last: " + last_error);
}

HomotopyPath contract(const SparseOp& g, const KuiperConfig& cfg) {
  const std::size_t n = g.window();
  const std::size_t k = g.profile().k();
  if (n < cfg.min_window(k))
    throw WindowTooSmall("contract: window " + std::to_string(n) + " < min_window(" + std::to_string(k) +
                         ") = " + std::to_string(cfg.min_window(k)));
  const auto se = dense::singular_extremes(g);
  if (!(se.sigma_min > 1e-6)) throw ContractViolation("contract: sigma_min(g) = " + std::to_string(se.sigma_min));

  HomotopyPath path;
  path.steps.push_back(g);
  path.certs.push_back({Stage::select, 0.0, se.sigma_min, se.sigma_max, g.profile(), 0.0, se.sigma_min});
  path.profile_budget = profile_budget(k);
  path.selection = select_basis_vectors(g, cfg.count);

  path.append(rotation_stage(g, path.selection, cfg));
  const SparseOp f2 = path.steps.back();
  path.append(normalize_and_compress(f2, path.selection, cfg));
  const SparseOp f4 = path.steps.back();
  HomotopyPath closing = close_stage(f4, path.selection, cfg);
  path.close_direction = closing.close_direction;
  path.append(std::move(closing));
  return path;
}

WhiteheadResult whitehead_stage(const SparseOp& u, std::size_t slices, const KuiperConfig& cfg) {
  if (slices == 0) throw ContractViolation("whitehead_stage: need at least one slice");
  const std::size_t m = u.window();
  const Eigen::MatrixXcd ud = dense::to_dense(u);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(ud);
  const Eigen::MatrixXcd inv = lu.inverse();
  WhiteheadResult res;
  res.u_inverse = dense::from_dense(inv);
  res.u_profile = u.profile();
  res.u_inverse_profile = res.u_inverse.profile();
  res.inverse_residual = dense::norm(Eigen::MatrixXcd(ud * inv - Eigen::MatrixXcd::Identity(ud.rows(), ud.cols())));
  if (!std::isfinite(res.inverse_residual) || res.inverse_residual > 1e-6)
    throw ContractViolation("whitehead_stage: u is not invertible (residual " + std::to_string(res.inverse_residual) + ")");

  const std::size_t n = m * slices;
  const auto ut = u.triplets();
  const auto vt = res.u_inverse.triplets();
  auto w_at = [&](double t) {
    // theta runs from pi/2 at t = 0 down to 0 at t = 1.
    double c = 0.0, s = 1.0;
    if (t >= 1.0) {
      c = 1.0;
      s = 0.0;
    } else if (t > 0.0) {
      const double th = 0.5 * std::numbers::pi * (1.0 - t);
      c = std::cos(th);
      s = std::sin(th);
    }
    std::vector<Triplet> tr;
    for (std::size_t q = 0; q + 1 < slices; q += 2) {
      const std::size_t o1 = q * m, o2 = (q + 1) * m;
      for (std::size_t i = 0; i < m; ++i) {
        tr.push_back({o1 + i, o1 + i, c * c});
        tr.push_back({o1 + i, o2 + i, c * s});
        tr.push_back({o2 + i, o1 + i, -c * s});
        tr.push_back({o2 + i, o2 + i, c * c});
      }
      for (const auto& e : ut) {
        tr.push_back({o1 + e.row, o1 + e.col, s * s * e.value});
        tr.push_back({o1 + e.row, o2 + e.col, -c * s * e.value});
      }
      for (const auto& e : vt) {
        tr.push_back({o2 + e.row, o1 + e.col, c * s * e.value});
        tr.push_back({o2 + e.row, o2 + e.col, s * s * e.value});
      }
    }
    if (slices % 2 == 1)
      for (std::size_t i = (slices - 1) * m; i < n; ++i) tr.push_back({i, i, 1.0});
    return SparseOp::from_triplets(n, std::move(tr));
  };
  res.path = SegmentSampler(Stage::whitehead, cfg, w_at).run(w_at(0.0));
  return res;
}

SparseOp random_invertible(std::size_t window, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x6b75));
  auto perm = [&] {
    std::vector<std::size_t> p(window);
    for (std::size_t i = 0; i < window; ++i) p[i] = i;
    rng.shuffle(std::span<std::size_t>(p));
    return p;
  };
  auto phase = [&] { return std::polar(1.0, rng.uniform(-std::numbers::pi, std::numbers::pi)); };
  const auto q1 = perm(), q2 = perm(), p = perm();
  const Complex l1 = 0.3 * rng.uniform() * phase();
  const Complex l2 = 0.3 * rng.uniform() * phase();
  std::vector<Triplet> t;
  for (std::size_t j = 0; j < window; ++j) {
    t.push_back({p[j], j, rng.uniform(1.0, 2.0) * phase()});
    t.push_back({p[q1[j]], j, l1});
    t.push_back({p[q2[j]], j, l2});
  }
  return SparseOp::from_triplets(window, std::move(t));
}

}  // namespace mfop
