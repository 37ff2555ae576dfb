#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "krein/linalg.hpp"
#include "krein/pencil.hpp"

namespace krein {

using Rng = std::mt19937_64;

/// Entries uniform in [-1,1] + i[-1,1], then symmetrized.
Mat random_hermitian(int n, Rng& rng);
Mat random_real_symmetric(int n, Rng& rng);
Mat random_unitary(int n, Rng& rng);
Mat random_orthogonal(int n, Rng& rng);

/// Spectral surgery: eigenvectors of a random Hermitian (or real symmetric)
/// matrix with `pos` eigenvalues in [0.5, 2], `neg` in [-2, -0.5] and the
/// rest zero.
Mat hermitian_with_inertia(int n, int pos, int neg, Rng& rng, bool real = false);

/// Generic pencil of matrix degree p and g degree q. The leading g
/// coefficient has random sign and magnitude in [0.5, 1.5]; when q <= p the
/// leading combined matrix has eigenvalues bounded away from zero.
PolyPencil random_pencil(int n, int p, int q, Rng& rng);

enum class TableRow { q_gt_p_even_pos, q_gt_p_even_neg, q_gt_p_odd_pos, q_gt_p_odd_neg, q_lt_p, q_eq_p };

PolyPencil random_pencil_for_row(TableRow row, int n, Rng& rng);

/// M + lambda L + lambda^2 I with a characteristic value at 0.
struct EngineeredPencil {
    PolyPencil pencil;
    Mat M;
    Mat L;
    std::vector<int> orders;  // vanishing orders of the branches through 0
};

/// One branch vanishing to order m in {1, 2, 3} at 0; for odd m the sign of
/// mu^(m)(0) is eta. Other eigenvalues of M are positive.
EngineeredPencil engineered_quadratic(int n, int m, int eta, Rng& rng);
/// Two-dimensional kernel at 0 with branch orders (1, 3), where the order-3
/// branch couples to the order-1 branch through its first derivative.
EngineeredPencil engineered_coupled(int n, double a, Rng& rng);

/// Q^* P(lambda) Q coefficientwise (g unchanged).
PolyPencil conjugate(const PolyPencil& pencil, const Mat& Q);
/// Block-diagonal pencil; g polynomials must agree.
PolyPencil direct_sum(const PolyPencil& a, const PolyPencil& b);

/// Canonical problem with real symmetric blocks of size m and prescribed
/// inertias (pos, neg); kernels are placed on disjoint coordinates of a
/// common orthonormal basis so that they are orthogonal.
HamiltonianProblem random_canonical(int m, int plus_pos, int plus_neg, int minus_pos, int minus_neg, Rng& rng);

}  // namespace krein
