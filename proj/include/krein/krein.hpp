#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "krein/branches.hpp"
#include "krein/linalg.hpp"
#include "krein/pencil.hpp"

namespace krein {

/// (kappa_plus, kappa_minus) of one branch vanishing to order m with
/// eta = sign mu^(m)(lambda0).
std::pair<int, int> graphical_krein(int m, int eta);

enum class ChainSource { branch_derivatives, manual };

struct RootChain {
    double lambda0 = 0.0;
    std::vector<Vec> vectors;  // u^[0], ..., u^[m-1]
    ChainSource source = ChainSource::manual;

    int length() const { return static_cast<int>(vectors.size()); }
};

/// max_s || sum_{j<=s} P^(s-j)(lambda0)/(s-j)! u^[j] ||, s = 0..m-1.
double chain_residual(const PolyPencil& pencil, const RootChain& chain);

/// Chain (u, u', ..., u^(m-1)/(m-1)!) of one vanishing branch, m its
/// vanishing order. Throws NumericalError when the chain relations fail.
RootChain chain_from_branch(const PolyPencil& pencil, const BranchFamily& family, const CharacteristicValue& cv,
                            int branch_id);
RootChain chain_from_jet(const PolyPencil& pencil, double lambda0, const BranchJet& jet, int length);

/// W_ij = (u^[i-1], -K u^[j-1]) for chains of L - lambda K.
Mat gram_matrix_linear(const Mat& K, const RootChain& chain);

struct QuadraticGram {
    Mat W;
    double det = 0.0;
    int kappa = 0;
};

/// Gram matrix of a chain of M + lambda L + lambda^2 I at lambda0 = 0:
/// W_ij = (u^[i-1], L u^[j-1]) + (u^[i-2], u^[j-1]) + (u^[i-1], u^[j-2]).
/// Length 3: kappa = -sign det W, error when |det W| < tau. Other lengths:
/// kappa = p(W) - n(W), error when W has an eigenvalue within tau of zero.
QuadraticGram gram_matrix_quadratic(const Mat& L, const RootChain& chain, double tau);

/// Kernel projector, regularized inverse and Taylor coefficients at lambda0.
struct LocalOperators {
    double lambda0 = 0.0;
    Mat kernel;       // orthonormal basis of Ker P(lambda0)
    Mat Pi;           // kernel * kernel^*
    Mat Ltilde_inv;   // -(P(lambda0) + Pi)^{-1}
    std::vector<Mat> taylor;  // taylor[j] = P^(j)(lambda0)/j!, j = 0..degree
};

LocalOperators local_operators(const PolyPencil& pencil, double lambda0, double tau);
LocalOperators local_operators(const PolyPencil& pencil, double lambda0);

/// Lambda_m as the sum over compositions alpha of m of
/// A_{a1} Lt A_{a2} Lt ... Lt A_{as}.
Mat lambda_operator(const LocalOperators& ops, int m);
/// Lambda_1..Lambda_max_m (index 0 holds a zero matrix) via
/// Lambda_m = A_m + sum_{j=1}^{m-1} A_j Lt Lambda_{m-j}.
std::vector<Mat> lambda_operators_recursive(const LocalOperators& ops, int max_m);

struct KernelRecursionState {
    double lambda0 = 0.0;
    std::vector<Mat> U_list;   // U_0, U_1, ... (orthonormal columns)
    std::vector<Mat> H_forms;  // H_forms[m-1] = U_{m-1}^* H_m U_{m-1}
    std::vector<RVec> form_eigenvalues;
    std::vector<double> thresholds;
    std::vector<std::array<int, 3>> Kcounts;  // (|K_m^+|, |K_m^-|, |K_m^0|)
    Mat Pi;
    Mat Ltilde_inv;
    std::optional<BranchDerivatives> jets;
    std::vector<std::string> warnings;

    int geo_mult() const { return U_list.empty() ? 0 : static_cast<int>(U_list.front().cols()); }
    int alg_mult() const;
};

struct RecursionOptions {
    double fd_step = 1e-2;
    /// Overrides the kernel threshold (default tau_zero(lambda0)).
    std::optional<double> tau;
};

/// Builds U_m, H_m and |K_m^{+,-,0}| until U_m is empty. Branch jets are used
/// for the correction terms from m = 3 on; when `jets` is missing or too
/// short they are computed near lambda0.
KernelRecursionState kernel_recursion(const PolyPencil& pencil, double lambda0,
                                      const BranchDerivatives* jets = nullptr, const RecursionOptions& options = {});

struct KreinSignature {
    int kappa_plus = 0;
    int kappa_minus = 0;
    int kappa = 0;
};

KreinSignature krein_signature_of_cv(const KernelRecursionState& state);

/// Fills Kcounts, alg_mult and kappa_plus/minus of cv from the recursion.
void apply_recursion(CharacteristicValue& cv, const KernelRecursionState& state);

}  // namespace krein
