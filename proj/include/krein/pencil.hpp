#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "krein/linalg.hpp"

namespace krein {

/// Relative Hermitian tolerance: inputs within it are symmetrized, beyond it
/// rejected.
inline constexpr double kHermitianTol = 1e-12;

/// Polynomial Hermitian pencil  L(lambda) - g(lambda) I  with
/// L(lambda) = sum_k lambda^k L_k and a real scalar polynomial g.
///
/// The split between L and g is kept as given; the asymptotic Z-count table
/// branches on it.
class PolyPencil {
public:
    PolyPencil(std::vector<Mat> coeffs, std::vector<double> g);

    int n() const { return n_; }
    int p() const { return static_cast<int>(coeffs_.size()) - 1; }
    int q() const { return static_cast<int>(g_.size()) - 1; }
    /// Degree of the combined matrix polynomial, max(p, q).
    int degree() const { return std::max(p(), q()); }

    const std::vector<Mat>& coeffs() const { return coeffs_; }
    const std::vector<double>& g() const { return g_; }

    /// Combined coefficient L_k - g_k I (zero matrices padded beyond p or q).
    Mat combined_coeff(int k) const;

    /// d^r/dlambda^r of the pencil at real lambda, by exact polynomial
    /// differentiation. Zero when r exceeds the degree.
    Mat eval(double lambda, int deriv_order = 0) const;
    /// Pencil at complex lambda (not Hermitian in general).
    Mat eval_complex(cplx lambda) const;

    /// Upper bound on ||pencil(lambda)||_max, sum_k |lambda|^k ||L_k - g_k I||.
    double norm_bound(double lambda) const;
    /// Absolute zero threshold at lambda: 1e-8 (1 + norm_bound(lambda)).
    double tau_zero(double lambda) const;
    /// Largest combined-coefficient magnitude.
    double coeff_scale() const;

    /// Pencil lambda -> P(lambda + c).
    PolyPencil shifted(double c) const;
    /// Pencil lambda -> c P(lambda).
    PolyPencil scaled(double c) const;

    friend PolyPencil operator+(const PolyPencil& a, const PolyPencil& b);

private:
    int n_ = 0;
    std::vector<Mat> coeffs_;
    std::vector<double> g_;
};

/// Same as PolyPencil::eval.
Mat eval_pencil(const PolyPencil& pencil, double lambda, int deriv_order);

struct CanonicalBlocks {
    Mat L_plus;
    Mat L_minus;
};

/// Finite-dimensional linearized Hamiltonian problem J L u = nu u.
class HamiltonianProblem {
public:
    HamiltonianProblem(Mat J, Mat L, std::optional<CanonicalBlocks> canonical = std::nullopt);
    /// Builds J = [[0,-I],[I,0]], L = diag(L_plus, L_minus).
    static HamiltonianProblem canonical(const Mat& L_plus, const Mat& L_minus);

    int n() const { return static_cast<int>(J_.rows()); }
    const Mat& J() const { return J_; }
    const Mat& L() const { return L_; }
    const std::optional<CanonicalBlocks>& blocks() const { return canonical_; }
    /// K = (iJ)^{-1}, Hermitian.
    const Mat& K() const { return K_; }
    double condition_J() const { return cond_J_; }

    /// The linear pencil L - lambda K whose real characteristic values are
    /// the eigenvalues of iJL.
    PolyPencil pencil() const;

private:
    Mat J_, L_, K_;
    std::optional<CanonicalBlocks> canonical_;
    double cond_J_ = 1.0;
};

struct GridSpec {
    double lambda_min = -1.0;
    double lambda_max = 1.0;
    int samples = 101;
    double refine_tol = 1e-7;

    void validate() const;
};

using Problem = std::variant<PolyPencil, HamiltonianProblem>;

struct LoadedProblem {
    Problem problem;
    std::vector<std::string> warnings;
};

/// Reads and validates a problem file. Near-Hermitian inputs are symmetrized
/// with a warning; violations throw InputError naming the invariant.
LoadedProblem load_problem(const std::string& path);
LoadedProblem parse_problem(const nlohmann::json& doc);

nlohmann::json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j, const std::string& what);
nlohmann::json problem_to_json(const PolyPencil& pencil);
nlohmann::json problem_to_json(const HamiltonianProblem& problem);

}  // namespace krein
