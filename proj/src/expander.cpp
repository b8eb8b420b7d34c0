#include "mfop/expander.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>

#include "mfop/dense.hpp"
#include "mfop/error.hpp"
#include "mfop/rng.hpp"

namespace mfop {

std::size_t UlfGraph::max_degree() const noexcept {
  std::size_t d = 0;
  for (const auto& nb : adjacency) d = std::max(d, nb.size());
  return d;
}

std::size_t UlfGraph::edge_count() const noexcept {
  std::size_t s = 0;
  for (const auto& nb : adjacency) s += nb.size();
  return s / 2;
}

bool UlfGraph::is_simple() const {
  const std::size_t n = adjacency.size();
  for (std::size_t v = 0; v < n; ++v) {
    const auto& nb = adjacency[v];
    for (std::size_t q = 0; q < nb.size(); ++q) {
      const std::size_t w = nb[q];
      if (w >= n || w == v) return false;
      if (q > 0 && nb[q - 1] >= w) return false;
      if (!std::binary_search(adjacency[w].begin(), adjacency[w].end(), v)) return false;
    }
  }
  return true;
}

std::vector<std::size_t> UlfGraph::bfs_distances(std::size_t source) const {
  constexpr auto inf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(adjacency.size(), inf);
  std::queue<std::size_t> q;
  dist.at(source) = 0;
  q.push(source);
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    for (auto w : adjacency[v]) {
      if (dist[w] == inf) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

bool UlfGraph::is_connected() const {
  if (adjacency.empty()) return true;
  const auto d = bfs_distances(0);
  return std::none_of(d.begin(), d.end(), [](std::size_t x) { return x == std::numeric_limits<std::size_t>::max(); });
}

RegularGraph RegularGraph::from_graph(UlfGraph g) {
  if (!g.is_simple()) throw ContractViolation("regular graph: adjacency is not simple and symmetric");
  const std::size_t d = g.adjacency.empty() ? 0 : g.adjacency.front().size();
  for (const auto& nb : g.adjacency)
    if (nb.size() != d) throw ContractViolation("regular graph: vertex degrees differ");
  return RegularGraph{d, std::move(g)};
}

RegularGraph complete_graph(std::size_t m) {
  UlfGraph g;
  g.adjacency.resize(m);
  for (std::size_t v = 0; v < m; ++v)
    for (std::size_t w = 0; w < m; ++w)
      if (w != v) g.adjacency[v].push_back(w);
  return RegularGraph{m == 0 ? 0 : m - 1, std::move(g)};
}

RegularGraph random_regular_graph(std::size_t m, std::size_t d, std::uint64_t seed, RandomGraphOptions opt) {
  if (d >= m || (d * m) % 2 != 0 || m == 0)
    throw ContractViolation("random_regular_graph: need d < m and d*m even (m=" + std::to_string(m) +
                            ", d=" + std::to_string(d) + ")");
  Rng rng(seed);
  const std::size_t stubs_total = m * d;
  std::vector<std::size_t> stubs(stubs_total);
  std::vector<unsigned char> adj(m * m, 0);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(stubs_total / 2);
  for (std::uint64_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
    for (std::size_t i = 0; i < stubs_total; ++i) stubs[i] = i / d;
    for (const auto& [u, v] : edges) adj[u * m + v] = adj[v * m + u] = 0;
    edges.clear();
    bool ok = true;
    // Pair stubs front to back; partner drawn uniformly from the unpaired rest.
    for (std::size_t i = 0; i + 1 < stubs_total; i += 2) {
      const std::size_t j = i + 1 + static_cast<std::size_t>(rng.index(stubs_total - i - 1));
      std::swap(stubs[i + 1], stubs[j]);
      const std::size_t u = stubs[i], v = stubs[i + 1];
      if (u == v || adj[u * m + v]) {
        ok = false;
        break;
      }
      adj[u * m + v] = adj[v * m + u] = 1;
      edges.emplace_back(u, v);
    }
    if (!ok) continue;
    UlfGraph g;
    g.adjacency.resize(m);
    for (const auto& [u, v] : edges) {
      g.adjacency[u].push_back(v);
      g.adjacency[v].push_back(u);
    }
    for (auto& nb : g.adjacency) std::sort(nb.begin(), nb.end());
    return RegularGraph{d, std::move(g)};
  }
  throw RetryExhausted("random_regular_graph: no simple graph after " + std::to_string(opt.max_attempts) +
                       " pairings (m=" + std::to_string(m) + ", d=" + std::to_string(d) + ")");
}

void write_edge_list(std::ostream& os, const UlfGraph& g) {
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    for (auto w : g.adjacency[v])
      if (v < w) os << v + 1 << ' ' << w + 1 << '\n';
}

UlfGraph read_edge_list(std::istream& is, std::size_t vertex_count) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::string line;
  std::size_t lineno = 0, n = vertex_count;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#' || line[first] == '%') continue;
    std::istringstream ls(line);
    long long u = 0, v = 0;
    std::string rest;
    if (!(ls >> u >> v) || (ls >> rest) || u < 1 || v < 1)
      throw ParseError("edge list line " + std::to_string(lineno) + ": expected two positive integers");
    edges.emplace_back(static_cast<std::size_t>(u - 1), static_cast<std::size_t>(v - 1));
    n = std::max({n, static_cast<std::size_t>(u), static_cast<std::size_t>(v)});
  }
  UlfGraph g;
  g.adjacency.resize(n);
  for (const auto& [u, v] : edges) {
    if (u == v) throw ParseError("edge list: loop at vertex " + std::to_string(u + 1));
    g.adjacency[u].push_back(v);
    g.adjacency[v].push_back(u);
  }
  for (auto& nb : g.adjacency) {
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) throw ParseError("edge list: repeated edge");
  }
  return g;
}

UlfGraph read_edge_list_file(const std::string& path, std::size_t vertex_count) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  return read_edge_list(f, vertex_count);
}

void write_edge_list_file(const std::string& path, const UlfGraph& g) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_edge_list(f, g);
}

SparseOp laplacian(const RegularGraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<Triplet> t;
  t.reserve(n * (g.degree + 1));
  const double off = g.degree == 0 ? 0.0 : -1.0 / static_cast<double>(g.degree);
  for (std::size_t v = 0; v < n; ++v) {
    t.push_back({v, v, 1.0});
    for (auto w : g.graph.adjacency[v]) t.push_back({v, w, off});
  }
  return SparseOp::from_triplets(n, std::move(t));
}

SpectralGap spectral_gap(const SparseOp& l) {
  if (l.window() > kDenseEigenCap)
    throw DimensionError("spectral_gap: window " + std::to_string(l.window()) + " exceeds dense cap");
  const auto ev = dense::hermitian_eigenvalues(l);
  SpectralGap g;
  if (!ev.empty()) g.lambda0 = ev[0];
  if (ev.size() > 1) g.lambda1 = ev[1];
  g.connected = g.lambda1 > 1e-10;
  return g;
}

double PolyFilter::operator()(double x) const {
  const double y = phi(x);
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) {
    const double b0 = coeffs[k] + 2.0 * y * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return (coeffs.empty() ? 0.0 : coeffs[0]) + y * b1 - b2;
}

double PolyFilter::sup_bound() const noexcept { return coeffs.empty() ? 0.0 : std::abs(coeffs.back()); }

PolyFilter chebyshev_filter(double delta, std::size_t s) {
  if (!(delta > 0.0 && delta < 2.0)) throw ContractViolation("chebyshev_filter: need 0 < delta < 2");
  if (s == 0) throw ContractViolation("chebyshev_filter: s must be positive");
  PolyFilter f;
  f.delta = delta;
  f.s = s;
  const double y0 = f.phi(0.0);  // < -1
  double t_prev = 1.0, t_cur = 1.0;
  std::size_t t = 0;
  while (1.0 / std::abs(t_cur) > 1.0 / static_cast<double>(s)) {
    const double next = t == 0 ? y0 : 2.0 * y0 * t_cur - t_prev;
    t_prev = t_cur;
    t_cur = next;
    ++t;
  }
  f.coeffs.assign(t + 1, 0.0);
  f.coeffs[t] = 1.0 / t_cur;
  return f;
}

SparseOp apply_filter(const PolyFilter& f, const SparseOp& l) {
  const std::size_t n = l.window();
  const auto id = SparseOp::identity(n);
  // M = phi(L) = (2L - (delta + 2)) / (2 - delta)
  const double a = 2.0 / (2.0 - f.delta);
  const double c = -(f.delta + 2.0) / (2.0 - f.delta);
  const SparseOp m = scale(l, a) + scale(id, c);
  SparseOp b1(n), b2(n);
  for (std::size_t k = f.coeffs.size(); k-- > 1;) {
    SparseOp b0 = scale(id, f.coeffs[k]) + scale(m * b1, 2.0) - b2;
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  const double c0 = f.coeffs.empty() ? 0.0 : f.coeffs[0];
  return scale(id, c0) + m * b1 - b2;
}

CornerError corner_compression_error(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(2 * n + 1);
  Eigen::MatrixXcd diff = Eigen::MatrixXcd::Constant(m, m, 1.0 / static_cast<double>(m));
  diff.topLeftCorner(m - 1, m - 1).array() -= 1.0 / static_cast<double>(m - 1);
  const double nn = static_cast<double>(n);
  return {dense::norm(diff), (2.0 + 2.0 * std::sqrt(2.0 * nn)) / (2.0 * nn + 1.0)};
}

ExpanderReport build_even_projection_pipeline(std::size_t n_max, std::size_t d, std::size_t s, std::uint64_t seed) {
  if (n_max == 0) throw ContractViolation("expander pipeline: n_max must be positive");
  if (d < 3) throw ContractViolation("expander pipeline: degree must be at least 3");
  ExpanderReport rep;
  rep.n_max = n_max;
  rep.d = d;
  rep.s = s;
  rep.seed = seed;
  rep.blocks.resize(n_max);

  std::vector<SparseOp> laps(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    auto& blk = rep.blocks[n - 1];
    blk.n = n;
    blk.m = 2 * n;
    RegularGraph g;
    SpectralGap gap;
    for (std::size_t attempt = 0;; ++attempt) {
      blk.seed = derive_seed(seed, (static_cast<std::uint64_t>(n) << 20) + attempt);
      g = blk.m <= d ? complete_graph(blk.m) : random_regular_graph(blk.m, d, blk.seed);
      laps[n - 1] = laplacian(g);
      gap = spectral_gap(laps[n - 1]);
      if (gap.connected) break;
      if (attempt >= 1000) throw RetryExhausted("expander pipeline: block " + std::to_string(n) + " never connected");
      ++blk.regenerations;
    }
    blk.degree = g.degree;
    blk.lambda1 = gap.lambda1;
    const auto ev = dense::hermitian_eigenvalues(laps[n - 1]);
    blk.laplacian_norm = std::max(std::abs(ev.front()), std::abs(ev.back()));
    blk.graph = std::move(g.graph);
  }

  rep.delta_hat = std::numeric_limits<double>::infinity();
  for (const auto& b : rep.blocks) {
    rep.delta_hat = std::min(rep.delta_hat, b.lambda1);
    rep.max_laplacian_norm = std::max(rep.max_laplacian_norm, b.laplacian_norm);
  }
  // Only K_2 has lambda1 = 2; the filter needs delta < 2 and [lambda1, 2] stays inside [delta, 2].
  rep.delta_used = std::min(rep.delta_hat, 1.5);
  rep.filter = chebyshev_filter(rep.delta_used, s);

  std::vector<Triplet> all;
  std::size_t off = 0;
  for (const auto& l : laps) {
    for (auto t : l.triplets()) all.push_back({t.row + off, t.col + off, t.value});
    off += l.window();
  }
  const SparseOp big = SparseOp::from_triplets(off, std::move(all));
  rep.filtered = apply_filter(rep.filter, big);
  rep.measured_profile = rep.filtered.profile();
  rep.profile_bound = std::pow(static_cast<double>(d + 1), static_cast<double>(rep.filter.degree()));

  off = 0;
  for (auto& b : rep.blocks) {
    std::vector<std::size_t> idx(b.m);
    std::iota(idx.begin(), idx.end(), off);
    Eigen::MatrixXcd fb = dense::to_dense(compress(rep.filtered, idx, idx));
    fb.array() -= 1.0 / static_cast<double>(b.m);
    b.err = dense::norm(fb);
    rep.max_err = std::max(rep.max_err, b.err);
    off += b.m;
  }
  for (std::size_t n = 1; n <= n_max; ++n) rep.corner.push_back(corner_compression_error(n));
  return rep;
}

}  // namespace mfop
