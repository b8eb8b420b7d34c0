#include "mfop/random_ops.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace mfop {

Complex random_complex(Rng& rng, double max_modulus) {
  return std::polar(max_modulus * rng.uniform(), rng.uniform(-std::numbers::pi, std::numbers::pi));
}

SparseOp random_profile_op(std::size_t window, std::size_t k, double max_modulus, Rng& rng) {
  std::vector<Triplet> t;
  t.reserve(window * k);
  std::vector<std::size_t> perm(window);
  for (std::size_t m = 0; m < k; ++m) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(perm));
    for (std::size_t j = 0; j < window; ++j) t.push_back({perm[j], j, random_complex(rng, max_modulus)});
  }
  return SparseOp::from_triplets(window, std::move(t));
}

SparseOp random_row_sparse(std::size_t window, std::size_t row_k, double max_modulus, Rng& rng) {
  std::vector<Triplet> t;
  std::vector<std::size_t> cols(window);
  for (std::size_t i = 0; i < window; ++i) {
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    // Partial Fisher-Yates: the first row_k slots become a uniform sample.
    for (std::size_t q = 0; q < row_k && q < window; ++q) {
      const auto r = q + static_cast<std::size_t>(rng.index(window - q));
      std::swap(cols[q], cols[r]);
      t.push_back({i, cols[q], random_complex(rng, max_modulus)});
    }
  }
  return SparseOp::from_triplets(window, std::move(t));
}

SparseOp random_hermitian(std::size_t window, std::size_t k, double max_modulus, Rng& rng) {
  const SparseOp a = random_profile_op(window, k, max_modulus, rng);
  return scale(a + adjoint(a), 0.5);
}

}  // namespace mfop
