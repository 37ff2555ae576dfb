#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "krein/branches.hpp"
#include "krein/krein.hpp"
#include "krein/linalg.hpp"
#include "krein/pencil.hpp"

namespace krein {

/// Cutoff K with no real characteristic value in |lambda| >= K and constant
/// inertia of P(+-K 2^j) on a safety scan.
double compute_K_infinity(const PolyPencil& pencil);

/// (Z_-inf, Z_+inf) from the leading coefficients of L and g. Throws
/// UnsupportedError when the relevant leading matrix is singular.
std::pair<int, int> z_at_infinity(const PolyPencil& pencil);
/// (n(P(-K)), n(P(K))).
std::pair<int, int> z_at_infinity_scan(const PolyPencil& pencil, double K);

struct LocalZ {
    int down_left = 0;
    int down_right = 0;
    int up_left = 0;
    int up_right = 0;

    bool operator==(const LocalZ&) const = default;
};

/// Z counts from the per-order counts |K_m^+-|.
LocalZ z_local(const CharacteristicValue& cv);
/// Z counts from the signs of the geo_mult smallest eigenvalues at lambda0 -+ eps.
LocalZ z_local_sampled(const PolyPencil& pencil, const CharacteristicValue& cv, double eps);
/// Writes z_local into cv after cross-checking against sampling; throws
/// NumericalError on disagreement.
void apply_z_local(const PolyPencil& pencil, CharacteristicValue& cv, double eps);

/// Sum of |residuals| of the kernel identities at one characteristic value.
int kernel_identity_residual(const CharacteristicValue& cv);

struct CompanionRoot {
    cplx value;
    int multiplicity = 1;
};

/// Eigenvalues of the block companion linearization, clustered with
/// multiplicities. A singular or ill-conditioned leading coefficient is
/// handled through the reversed pencil about a random shift.
std::vector<CompanionRoot> companion_oracle(const PolyPencil& pencil, std::uint64_t seed = 0);
/// Single-linkage clustering at 1e-6 (1 + |z|); fans of a multiple root
/// within 1e-4 are merged when their spread is consistent with the
/// multiplicity. Near-real means are snapped to the real axis.
std::vector<CompanionRoot> cluster_roots(const std::vector<cplx>& values);
/// Real members of companion_oracle, ascending.
std::vector<CompanionRoot> companion_real_roots(const PolyPencil& pencil, std::uint64_t seed = 0);

struct QuadraticCounts {
    int n_r = 0, n_i = 0, n_c = 0, z = 0;
    int n_r_plus = 0;        // 2 sum_{lambda>0} kappa^+
    int n_r_minus = 0;       // 2 sum_{lambda>0} kappa^-
    int n_r_plus_left = 0;   // 2 sum_{lambda<0} kappa^+
    int n_M = 0;
    int residual_nsum = 0;
    int residual_LM5 = 0;
    bool symmetric = false;
    std::optional<int> residual_LM2;
    std::optional<int> residual_LM3;
    std::vector<std::string> notes;
};

struct LocalCheck {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    int residual = 0;
};

struct AnalysisOptions {
    int samples = 201;
    double refine_tol = 1e-7;
    std::optional<std::uint64_t> phase_seed;
    double fd_step = 1e-2;
    /// Number of random (lambda1, lambda2) pairs for the local identity.
    int local_pairs = 0;
    std::uint64_t seed = 0;
    bool quadratic = true;
    /// Extra range to cover besides [-K, K].
    std::optional<std::pair<double, double>> range;
};

struct IndexReport {
    std::optional<PolyPencil> pencil;
    double K = 0.0;
    int Z_minus_inf = 0;
    int Z_plus_inf = 0;
    std::optional<std::pair<int, int>> Z_inf_table;
    int n_L0 = 0;
    std::vector<CharacteristicValue> cvs;
    std::vector<KernelRecursionState> recursion;
    int Z0_plus = 0;
    int Z0_minus = 0;
    int sum_sign_kappa = 0;
    int sum_kappa = 0;
    int residual_eq1 = 0;
    int residual_eq2 = 0;
    std::vector<int> kernel_residuals;
    std::vector<LocalCheck> local_checks;
    std::optional<QuadraticCounts> quadratic;
    BranchFamily family;
    std::vector<std::string> warnings;
};

IndexReport analyze_pencil(const PolyPencil& pencil, const AnalysisOptions& options = {});

/// (residual_eq1, residual_eq2) recomputed from the report terms.
std::pair<int, int> verify_global(const IndexReport& report);
/// Residual of the local identity on (lambda1, lambda2) using the report's
/// characteristic values.
int verify_local(const PolyPencil& pencil, const IndexReport& report, double lambda1, double lambda2);

/// Example-style counts of M + lambda K + lambda^2 I; throws InputError when
/// the pencil has another form.
QuadraticCounts quadratic_counts(const PolyPencil& pencil, const IndexReport& report);

/// True when sigma(P(lambda)) = sigma(P(-lambda)) identically.
bool has_reflection_symmetry(const PolyPencil& pencil);

/// n(P(lambda)) with the tau_zero threshold.
int negative_count(const PolyPencil& pencil, double lambda);

}  // namespace krein
