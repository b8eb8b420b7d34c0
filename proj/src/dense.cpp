#include "mfop/dense.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace mfop::dense {

namespace {

// Eigen 3.4's divide-and-conquer SVD can return NaN on complex inputs with
// heavy deflation (e.g. 35x35 rank-two differences of averaging blocks).
Eigen::VectorXd robust_singular_values(const Eigen::MatrixXcd& m) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  if (svd.singularValues().allFinite()) return svd.singularValues();
  // fall back to the eigenvalues of the Hermitian dilation [[0, m], [m*, 0]]
  const Eigen::Index r = m.rows(), c = m.cols();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(r + c, r + c);
  h.topRightCorner(r, c) = m;
  h.bottomLeftCorner(c, r) = m.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  Eigen::VectorXd s(std::min(r, c));
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::max(es.eigenvalues()(r + c - 1 - i), 0.0);
  return s;
}

}  // namespace

Eigen::MatrixXcd to_dense(const SparseOp& a) {
  const auto n = static_cast<Eigen::Index>(a.window());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& t : a.triplets()) m(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) = t.value;
  return m;
}

SparseOp from_dense(const Eigen::MatrixXcd& m) {
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != Complex(0.0, 0.0)) t.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), m(i, j)});
    }
  }
  return SparseOp::from_triplets(static_cast<std::size_t>(std::max(m.rows(), m.cols())), std::move(t));
}

std::vector<Component> components(const SparseOp& a) {
  // Union-find over 2N nodes: rows are 0..N-1, columns N..2N-1.
  const std::size_t n = a.window();
  std::vector<std::size_t> parent(2 * n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& t : a.triplets()) {
    const std::size_t r = find(t.row), c = find(n + t.col);
    if (r != c) parent[std::max(r, c)] = std::min(r, c);
  }
  std::vector<std::size_t> slot(2 * n, static_cast<std::size_t>(-1));
  std::vector<Component> out;
  for (std::size_t x = 0; x < 2 * n; ++x) {
    const std::size_t root = find(x);
    if (slot[root] == static_cast<std::size_t>(-1)) {
      slot[root] = out.size();
      out.emplace_back();
    }
    auto& comp = out[slot[root]];
    if (x < n) {
      comp.rows.push_back(x);
    } else {
      comp.cols.push_back(x - n);
    }
  }
  return out;
}

namespace {

Eigen::MatrixXcd block_of(const SparseOp& a, const Component& c) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(c.rows.size()),
                                              static_cast<Eigen::Index>(c.cols.size()));
  std::vector<std::size_t> col_pos(a.window(), 0);
  for (std::size_t q = 0; q < c.cols.size(); ++q) col_pos[c.cols[q]] = q;
  for (std::size_t p = 0; p < c.rows.size(); ++p) {
    const auto rc = a.row_cols(c.rows[p]);
    const auto rv = a.row_values(c.rows[p]);
    for (std::size_t q = 0; q < rc.size(); ++q) {
      m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(col_pos[rc[q]])) = rv[q];
    }
  }
  return m;
}

// Singular values of one component block followed by the zeros its shape forces.
void append_component_singular_values(const Eigen::MatrixXcd& b, std::vector<double>& out, bool gram) {
  const auto r = static_cast<std::size_t>(b.rows());
  const auto c = static_cast<std::size_t>(b.cols());
  const std::size_t k = std::min(r, c);
  if (k > 0) {
    if (gram) {
      Eigen::MatrixXcd g = r >= c ? Eigen::MatrixXcd(b.adjoint() * b) : Eigen::MatrixXcd(b * b.adjoint());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i))));
    } else {
      const auto sv = robust_singular_values(b);
      for (Eigen::Index i = 0; i < sv.size(); ++i) out.push_back(sv(i));
    }
  }
  // A column with no partner row contributes a zero singular value.
  for (std::size_t z = k; z < c; ++z) out.push_back(0.0);
}

}  // namespace

std::vector<double> singular_values(const SparseOp& a) {
  std::vector<double> out;
  out.reserve(a.window());
  for (const auto& c : components(a)) append_component_singular_values(block_of(a, c), out, false);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

SingularExtremes singular_extremes(const SparseOp& a) {
  if (a.window() == 0) return {};
  SingularExtremes e{std::numeric_limits<double>::infinity(), 0.0};
  std::vector<double> buf;
  for (const auto& c : components(a)) {
    buf.clear();
    append_component_singular_values(block_of(a, c), buf, true);
    for (double s : buf) {
      e.sigma_min = std::min(e.sigma_min, s);
      e.sigma_max = std::max(e.sigma_max, s);
    }
  }
  return e;
}

double norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return robust_singular_values(m)(0);
}

double norm(const SparseOp& a) {
  const auto sv = singular_values(a);
  return sv.empty() ? 0.0 : sv.front();
}

double sigma_min(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  const auto sv = robust_singular_values(m);
  return sv(sv.size() - 1);
}

std::vector<double> hermitian_eigenvalues(const SparseOp& a) {
  const SparseOp h = scale(add(a, adjoint(a)), 0.5);
  std::vector<double> out;
  out.reserve(a.window());
  for (const auto& c : components(h)) {
    // Hermitian components have identical row and column sets, except that an
    // empty index shows up once as a lone row and once as a lone column.
    if (c.cols.empty()) {
      out.insert(out.end(), c.rows.size(), 0.0);
      continue;
    }
    if (c.rows.empty()) continue;
    Eigen::MatrixXcd b = block_of(h, c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mfop::dense
