#pragma once

#include <optional>
#include <string>
#include <vector>

#include "krein/index_counts.hpp"
#include "krein/pencil.hpp"

namespace krein {

/// A real characteristic value lambda of L - lambda K, i.e. nu = -i lambda
/// in sigma(JL).
struct ImaginaryEigenvalue {
    double lambda = 0.0;
    int geo_mult = 0;
    int alg_mult = 0;
    int kappa_plus = 0;
    int kappa_minus = 0;
    /// -(u, K u) for simple values.
    std::optional<double> kappa_K;
};

struct JLSpectrum {
    std::vector<CompanionRoot> eigenvalues;  // of JL
    int k_r = 0;
    int k_c = 0;
    int n_uns = 0;
    int k_i_minus = 0;
    int zero_mult = 0;
    std::vector<ImaginaryEigenvalue> imaginary;
    bool reflection_ok = false;   // closed under nu -> -conj(nu)
    bool full_symmetry = false;   // also closed under nu -> -nu
    std::vector<std::string> warnings;
};

JLSpectrum jl_spectrum(const HamiltonianProblem& problem);

struct KernelFormD {
    Mat V_basis;
    Mat D;
    int n_D = 0;
};

/// D = (., L .) on gKer(JL) minus Ker L.
KernelFormD kernel_form_d(const HamiltonianProblem& problem);
/// Dimension of the generalized kernel of JL.
int generalized_kernel_dim(const HamiltonianProblem& problem);

struct Theorem1Result {
    bool applicable = false;
    std::string reason;
    int k_r = 0, k_c = 0, n_L = 0, n_D = 0, k_i_minus = 0;
    int residual = 0;
};

Theorem1Result theorem1_check(const HamiltonianProblem& problem);

struct Theorem2Result {
    int lower_bound = 0;
    int k_r = 0;
    int n_uns = 0;
    bool holds = false;
};

/// Requires canonical blocks with Ker L_+ orthogonal to Ker L_-; throws
/// UnsupportedError otherwise.
Theorem2Result theorem2_bound(const HamiltonianProblem& problem);

}  // namespace krein
