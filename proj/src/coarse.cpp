#include "mfop/coarse.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mfop/error.hpp"
#include "mfop/rng.hpp"

namespace mfop {

void FiniteAction::validate() const {
  for (std::size_t m = 0; m < generators.size(); ++m) {
    const auto& g = generators[m];
    if (g.size() != point_count) throw ContractViolation("action: generator " + std::to_string(m + 1) + " has wrong length");
    std::vector<bool> hit(point_count, false);
    for (auto y : g) {
      if (y == kNoImage) continue;
      if (y >= point_count || hit[y]) throw ContractViolation("action: generator " + std::to_string(m + 1) + " is not injective");
      hit[y] = true;
    }
  }
}

std::vector<std::size_t> FiniteAction::inverse(std::size_t m) const {
  std::vector<std::size_t> inv(point_count, kNoImage);
  const auto& g = generators.at(m);
  for (std::size_t x = 0; x < point_count; ++x)
    if (g[x] != kNoImage) inv[g[x]] = x;
  return inv;
}

bool FiniteAction::is_bijective(std::size_t m) const {
  const auto& g = generators.at(m);
  return std::none_of(g.begin(), g.end(), [](std::size_t y) { return y == kNoImage; });
}

FiniteAction integer_shift_action(std::size_t n, const std::vector<long long>& shifts, Boundary boundary) {
  FiniteAction act{n, {}};
  const auto nn = static_cast<long long>(n);
  for (long long s : shifts) {
    std::vector<std::size_t> g(n, FiniteAction::kNoImage);
    for (long long x = 0; x < nn; ++x) {
      long long y = x + s;
      if (boundary == Boundary::cyclic) {
        y = ((y % nn) + nn) % nn;
      } else if (y < 0 || y >= nn) {
        continue;
      }
      g[static_cast<std::size_t>(x)] = static_cast<std::size_t>(y);
    }
    act.generators.push_back(std::move(g));
  }
  return act;
}

FiniteAction random_permutation_action(std::size_t n, std::size_t r, std::uint64_t seed, bool with_inverses) {
  FiniteAction act{n, {}};
  for (std::size_t m = 0; m < r; ++m) {
    Rng rng(derive_seed(seed, m));
    std::vector<std::size_t> g(n);
    for (std::size_t x = 0; x < n; ++x) g[x] = x;
    rng.shuffle(std::span<std::size_t>(g));
    act.generators.push_back(g);
    if (with_inverses) act.generators.push_back(act.inverse(act.generators.size() - 1));
  }
  return act;
}

FiniteAction free_group_ball(std::size_t rank, std::size_t radius) {
  if (rank == 0) throw ContractViolation("free_group_ball: rank must be positive");
  const std::size_t letters = 2 * rank;
  // Words in order of length, then lexicographic. Letter 2i is g_i, 2i+1 its inverse.
  std::vector<std::vector<std::size_t>> words{{}};
  std::map<std::vector<std::size_t>, std::size_t> index{{{}, 0}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= radius; ++len) {
    const std::size_t end = words.size();
    for (std::size_t w = begin; w < end; ++w) {
      for (std::size_t l = 0; l < letters; ++l) {
        if (!words[w].empty() && words[w].back() == (l ^ 1U)) continue;
        auto nw = words[w];
        nw.push_back(l);
        index.emplace(nw, words.size());
        words.push_back(std::move(nw));
      }
    }
    begin = end;
  }
  FiniteAction act{words.size(), {}};
  for (std::size_t l = 0; l < letters; ++l) {
    std::vector<std::size_t> g(words.size(), FiniteAction::kNoImage);
    for (std::size_t w = 0; w < words.size(); ++w) {
      const auto& word = words[w];
      std::vector<std::size_t> nw;
      if (!word.empty() && word.front() == (l ^ 1U)) {
        nw.assign(word.begin() + 1, word.end());
      } else {
        if (word.size() == radius) continue;
        nw.reserve(word.size() + 1);
        nw.push_back(l);
        nw.insert(nw.end(), word.begin(), word.end());
      }
      g[w] = index.at(nw);
    }
    act.generators.push_back(std::move(g));
  }
  return act;
}

SparseOp action_operator(const FiniteAction& act, const std::vector<Complex>& coeffs,
                         const std::optional<std::vector<Complex>>& diag) {
  if (coeffs.size() != act.generators.size())
    throw DimensionError("action_operator: " + std::to_string(coeffs.size()) + " coefficients for " +
                         std::to_string(act.generators.size()) + " generators");
  act.validate();
  std::vector<Triplet> t;
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    if (coeffs[m] == Complex(0.0, 0.0)) continue;
    const auto& g = act.generators[m];
    for (std::size_t x = 0; x < act.point_count; ++x)
      if (g[x] != FiniteAction::kNoImage) t.push_back({g[x], x, coeffs[m]});
  }
  SparseOp a = SparseOp::from_triplets(act.point_count, std::move(t));
  if (diag) {
    if (diag->size() != act.point_count) throw DimensionError("action_operator: diagonal has wrong length");
    a = mul(SparseOp::diagonal(*diag), a);
  }
  return a;
}

SparseOp adjacency_operator(const UlfGraph& g) {
  std::vector<Triplet> t;
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    for (auto w : g.adjacency[v]) t.push_back({v, w, 1.0});
  return SparseOp::from_triplets(g.vertex_count(), std::move(t));
}

MetricSpace::MetricSpace(std::size_t n, std::vector<long long> distances, std::vector<long long> witness_radii)
    : n_(n), dist_(std::move(distances)) {
  if (dist_.size() != n_ * n_) throw DimensionError("metric: distance table is not N x N");
  for (long long r : witness_radii) witness_[r] = ball_size(r);
}

std::size_t MetricSpace::ball_size(long long r) const {
  std::size_t best = 0;
  for (std::size_t x = 0; x < n_; ++x) {
    std::size_t c = 0;
    for (std::size_t y = 0; y < n_; ++y) {
      const long long v = dist_[x * n_ + y];
      if (v != kInfinite && v <= r) ++c;
    }
    best = std::max(best, c);
  }
  return best;
}

void MetricSpace::validate_basic() const {
  for (std::size_t x = 0; x < n_; ++x) {
    if (d(x, x) != 0) throw ContractViolation("metric: d(x,x) != 0 at x = " + std::to_string(x + 1));
    for (std::size_t y = 0; y < n_; ++y) {
      const long long v = d(x, y);
      if (v != d(y, x)) throw ContractViolation("metric: not symmetric");
      if (v < 0 && v != kInfinite) throw ContractViolation("metric: negative distance");
      if (x != y && v == 0) throw ContractViolation("metric: distinct points at distance 0");
    }
  }
}

bool MetricSpace::triangle_inequality_holds(std::uint64_t seed, std::size_t samples, std::size_t exhaustive_limit) const {
  auto ok = [&](std::size_t x, std::size_t y, std::size_t z) {
    const long long a = d(x, y), b = d(y, z), c = d(x, z);
    if (a == kInfinite || b == kInfinite) return true;
    return c != kInfinite && c <= a + b;
  };
  if (n_ <= exhaustive_limit) {
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t y = 0; y < n_; ++y)
        for (std::size_t z = 0; z < n_; ++z)
          if (!ok(x, y, z)) return false;
    return true;
  }
  Rng rng(derive_seed(seed, 0x7419));
  for (std::size_t s = 0; s < samples; ++s) {
    if (!ok(rng.index(n_), rng.index(n_), rng.index(n_))) return false;
  }
  return true;
}

MetricSpace line_metric(std::size_t n, std::vector<long long> witness_radii) {
  std::vector<long long> d(n * n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) d[x * n + y] = x > y ? static_cast<long long>(x - y) : static_cast<long long>(y - x);
  return MetricSpace(n, std::move(d), std::move(witness_radii));
}

MetricSpace cycle_metric(std::size_t n, std::vector<long long> witness_radii) {
  std::vector<long long> d(n * n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      const std::size_t k = x > y ? x - y : y - x;
      d[x * n + y] = static_cast<long long>(std::min(k, n - k));
    }
  return MetricSpace(n, std::move(d), std::move(witness_radii));
}

MetricSpace graph_metric(const UlfGraph& g, std::vector<long long> witness_radii) {
  const std::size_t n = g.vertex_count();
  std::vector<long long> d(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    const auto dist = g.bfs_distances(x);
    for (std::size_t y = 0; y < n; ++y)
      d[x * n + y] = dist[y] == static_cast<std::size_t>(-1) ? MetricSpace::kInfinite : static_cast<long long>(dist[y]);
  }
  return MetricSpace(n, std::move(d), std::move(witness_radii));
}

MetricSpace read_metric(std::istream& is) {
  long long n = 0;
  if (!(is >> n) || n < 0) throw ParseError("metric: expected point count");
  const auto un = static_cast<std::size_t>(n);
  std::vector<long long> d(un * un);
  for (std::size_t p = 0; p < un * un; ++p) {
    if (!(is >> d[p])) throw ParseError("metric: expected " + std::to_string(un * un) + " distances, got " + std::to_string(p));
  }
  std::string rest;
  if (is >> rest) throw ParseError("metric: trailing data after distance table");
  MetricSpace m(un, std::move(d));
  m.validate_basic();
  return m;
}

MetricSpace read_metric_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  return read_metric(f);
}

void write_metric(std::ostream& os, const MetricSpace& m) {
  os << m.point_count() << '\n';
  for (std::size_t x = 0; x < m.point_count(); ++x) {
    for (std::size_t y = 0; y < m.point_count(); ++y) os << (y ? " " : "") << m.d(x, y);
    os << '\n';
  }
}

BandOperator band_operator(const MetricSpace& space, const Kernel& kernel, long long radius) {
  if (radius < 0) throw ContractViolation("band_operator: radius must be nonnegative");
  BandOperator out;
  out.radius = radius;
  const auto it = space.witness().find(radius);
  if (it != space.witness().end()) {
    out.ball_bound = it->second;
  } else {
    out.ball_bound = space.ball_size(radius);
    out.witness_recomputed = true;
  }
  const std::size_t n = space.point_count();
  std::vector<Triplet> t;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      const long long v = space.d(x, y);
      if (v == MetricSpace::kInfinite || v > radius) continue;
      const Complex z = kernel(x, y);
      if (z != Complex(0.0, 0.0)) t.push_back({x, y, z});
    }
  out.op = SparseOp::from_triplets(n, std::move(t));
  return out;
}

long long propagation(const SparseOp& a, const MetricSpace& space) {
  if (a.window() != space.point_count()) throw DimensionError("propagation: window != point count");
  long long r = 0;
  for (const auto& t : a.triplets()) {
    const long long v = space.d(t.row, t.col);
    if (v == MetricSpace::kInfinite) return MetricSpace::kInfinite;
    r = std::max(r, v);
  }
  return r;
}

}  // namespace mfop
