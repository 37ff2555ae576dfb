#pragma once

// Reference computations kept independent of the library's own numerics.

#include <vector>

#include "krein/linalg.hpp"
#include "krein/pencil.hpp"

namespace oracle {

using krein::cplx;
using krein::Mat;
using krein::RVec;

// ascending coefficients
using Poly = std::vector<cplx>;

Poly poly_mul(const Poly& a, const Poly& b);
cplx poly_eval(const Poly& a, cplx x);

// det P(lambda) by Leibniz expansion over polynomial entries, n <= 5
Poly det_polynomial(const krein::PolyPencil& pencil);

struct RealRoot {
    double value;
    int multiplicity;
};

// Real roots of det P with multiplicities: roots of the determinant
// polynomial counted inside a disk of radius `radius` (1 + |z|) around
// every real cluster.
std::vector<RealRoot> det_real_roots(const krein::PolyPencil& pencil, double radius = 1e-3);

// Negative eigenvalue count of a Hermitian matrix from an LDL^T factorization.
int ldlt_negative_count(const Mat& a);

// mu_j', mu_j'' of the j-th smallest eigenvalue (assumed simple) by
// Rayleigh-Schroedinger perturbation sums.
struct SimpleDerivatives {
    double mu;
    double d1;
    double d2;
};
SimpleDerivatives rs_derivatives(const krein::PolyPencil& pencil, double lambda, int j);

// Pencil L0 + lambda L1 with L1 definite: characteristic values and the
// sign of the branch slope (u, L1 u).
struct DefiniteRoot {
    double value;
    int slope_sign;
};
std::vector<DefiniteRoot> definite_linear_roots(const Mat& L0, const Mat& L1);

// Eigenvalues of J L straight from a general complex eigensolver.
std::vector<cplx> jl_eigenvalues(const Mat& J, const Mat& L);

}  // namespace oracle
