#pragma once

// Seeded random operators with a guaranteed sparsity profile.

#include <cstdint>

#include "mfop/rng.hpp"
#include "mfop/sparse_op.hpp"

namespace mfop {

/// Sum of k random permutation matrices with complex weights of modulus <= max_modulus.
/// Profile is at most (k, k); exact cancellations can make it smaller.
SparseOp random_profile_op(std::size_t window, std::size_t k, double max_modulus, Rng& rng);

/// Each row gets `row_k` entries in distinct random columns; column counts are unconstrained.
SparseOp random_row_sparse(std::size_t window, std::size_t row_k, double max_modulus, Rng& rng);

/// Hermitian part of random_profile_op.
SparseOp random_hermitian(std::size_t window, std::size_t k, double max_modulus, Rng& rng);

Complex random_complex(Rng& rng, double max_modulus);

}  // namespace mfop
