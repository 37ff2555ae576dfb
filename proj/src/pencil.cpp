#include "krein/pencil.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace krein {

namespace {

double hermitian_defect(const Mat& a) { return max_abs(a - a.adjoint()); }

bool within_hermitian_tol(const Mat& a) {
    return hermitian_defect(a) <= kHermitianTol * std::max(max_abs(a), 1e-300);
}

void require_square(const Mat& a, int n, const std::string& what) {
    if (a.rows() != n || a.cols() != n)
        throw InputError(what + ": expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
}

Mat checked_hermitian(const Mat& a, const std::string& what) {
    if (!within_hermitian_tol(a))
        throw InputError(what + " is not Hermitian (defect " + std::to_string(hermitian_defect(a)) + ")");
    return hermitian_part(a);
}

}  // namespace

PolyPencil::PolyPencil(std::vector<Mat> coeffs, std::vector<double> g)
    : coeffs_(std::move(coeffs)), g_(std::move(g)) {
    if (coeffs_.empty()) throw InputError("pencil: at least one coefficient matrix L_0 is required");
    if (g_.empty()) g_.push_back(0.0);
    n_ = static_cast<int>(coeffs_.front().rows());
    if (n_ < 1) throw InputError("pencil: dimension n must be positive");
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        const std::string name = "L_" + std::to_string(k);
        require_square(coeffs_[k], n_, name);
        coeffs_[k] = checked_hermitian(coeffs_[k], name);
    }
    for (double gk : g_)
        if (!std::isfinite(gk)) throw InputError("pencil: g coefficients must be finite");
    if (p() < 1 && q() < 1) throw InputError("pencil: constant pencil (p = q = 0) rejected");
    if (p() == q()) {
        const Mat lead = combined_coeff(p());
        if (max_abs(lead) <= kHermitianTol * std::max(1.0, max_abs(coeffs_.back())))
            throw InputError("pencil: leading term lambda^p L_p equals lambda^q g_q I");
    }
}

Mat PolyPencil::combined_coeff(int k) const {
    Mat a = Mat::Zero(n_, n_);
    if (k >= 0 && k <= p()) a += coeffs_[k];
    if (k >= 0 && k <= q()) a.diagonal().array() -= g_[k];
    return a;
}

Mat PolyPencil::eval(double lambda, int deriv_order) const {
    if (deriv_order < 0) throw InputError("eval_pencil: negative derivative order");
    Mat out = Mat::Zero(n_, n_);
    const int r = deriv_order;
    for (int k = degree(); k >= r; --k) {
        // Horner in lambda on the r-th derivative coefficients.
        double falling = 1.0;
        for (int i = 0; i < r; ++i) falling *= (k - i);
        out = out * lambda + falling * combined_coeff(k);
    }
    return hermitian_part(out);
}

Mat PolyPencil::eval_complex(cplx lambda) const {
    Mat out = Mat::Zero(n_, n_);
    for (int k = degree(); k >= 0; --k) out = out * lambda + combined_coeff(k);
    return out;
}

double PolyPencil::norm_bound(double lambda) const {
    double s = 0.0, pw = 1.0;
    for (int k = 0; k <= degree(); ++k) {
        s += pw * max_abs(combined_coeff(k));
        pw *= std::abs(lambda);
    }
    return s;
}

double PolyPencil::tau_zero(double lambda) const { return 1e-8 * (1.0 + norm_bound(lambda)); }

double PolyPencil::coeff_scale() const {
    double s = 0.0;
    for (int k = 0; k <= degree(); ++k) s = std::max(s, max_abs(combined_coeff(k)));
    return s;
}

PolyPencil PolyPencil::shifted(double c) const {
    std::vector<Mat> nc(coeffs_.size(), Mat::Zero(n_, n_));
    for (int j = 0; j <= p(); ++j)
        for (int k = 0; k <= j; ++k) nc[k] += binomial(j, k) * std::pow(c, j - k) * coeffs_[j];
    std::vector<double> ng(g_.size(), 0.0);
    for (int j = 0; j <= q(); ++j)
        for (int k = 0; k <= j; ++k) ng[k] += binomial(j, k) * std::pow(c, j - k) * g_[j];
    return PolyPencil(std::move(nc), std::move(ng));
}

PolyPencil PolyPencil::scaled(double c) const {
    std::vector<Mat> nc = coeffs_;
    for (auto& m : nc) m *= c;
    std::vector<double> ng = g_;
    for (auto& v : ng) v *= c;
    return PolyPencil(std::move(nc), std::move(ng));
}

PolyPencil operator+(const PolyPencil& a, const PolyPencil& b) {
    if (a.n() != b.n()) throw InputError("pencil sum: dimensions differ");
    std::vector<Mat> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Mat::Zero(a.n(), a.n()));
    for (std::size_t k = 0; k < a.coeffs_.size(); ++k) c[k] += a.coeffs_[k];
    for (std::size_t k = 0; k < b.coeffs_.size(); ++k) c[k] += b.coeffs_[k];
    std::vector<double> g(std::max(a.g_.size(), b.g_.size()), 0.0);
    for (std::size_t k = 0; k < a.g_.size(); ++k) g[k] += a.g_[k];
    for (std::size_t k = 0; k < b.g_.size(); ++k) g[k] += b.g_[k];
    return PolyPencil(std::move(c), std::move(g));
}

Mat eval_pencil(const PolyPencil& pencil, double lambda, int deriv_order) {
    return pencil.eval(lambda, deriv_order);
}

// ---------------------------------------------------------------------------

HamiltonianProblem::HamiltonianProblem(Mat J, Mat L, std::optional<CanonicalBlocks> canonical)
    : J_(std::move(J)), L_(std::move(L)), canonical_(std::move(canonical)) {
    const int n = static_cast<int>(J_.rows());
    if (n < 1) throw InputError("hamiltonian: empty J");
    require_square(J_, n, "J");
    require_square(L_, n, "L");
    if (max_abs(J_ + J_.adjoint()) > kHermitianTol * std::max(max_abs(J_), 1e-300))
        throw InputError("J is not skew-Hermitian");
    J_ = 0.5 * (J_ - J_.adjoint());
    L_ = checked_hermitian(L_, "L");

    Eigen::JacobiSVD<Mat> svd(J_);
    const RVec& s = svd.singularValues();
    if (s[0] == 0.0 || s[s.size() - 1] <= 1e-14 * s[0]) throw InputError("J singular");
    cond_J_ = s[0] / s[s.size() - 1];
    if (cond_J_ > 1e12) throw InputError("J ill-conditioned (cond > 1e12)");
    K_ = hermitian_part((cplx(0, 1) * J_).inverse());

    if (canonical_) {
        const Mat& lp = canonical_->L_plus;
        const Mat& lm = canonical_->L_minus;
        const int m = static_cast<int>(lp.rows());
        if (2 * m != n) throw InputError("canonical blocks: dimension mismatch");
        require_square(lp, m, "L_plus");
        require_square(lm, m, "L_minus");
        Mat jc = Mat::Zero(n, n);
        jc.topRightCorner(m, m) = -Mat::Identity(m, m);
        jc.bottomLeftCorner(m, m) = Mat::Identity(m, m);
        Mat lc = Mat::Zero(n, n);
        lc.topLeftCorner(m, m) = lp;
        lc.bottomRightCorner(m, m) = lm;
        const double tol = kHermitianTol * std::max(1.0, max_abs(L_));
        if (max_abs(jc - J_) > kHermitianTol || max_abs(lc - L_) > tol)
            throw InputError("canonical blocks do not reconstruct J and L");
        canonical_->L_plus = checked_hermitian(lp, "L_plus");
        canonical_->L_minus = checked_hermitian(lm, "L_minus");
    }
}

HamiltonianProblem HamiltonianProblem::canonical(const Mat& L_plus, const Mat& L_minus) {
    const Eigen::Index m = L_plus.rows();
    Mat J = Mat::Zero(2 * m, 2 * m);
    J.topRightCorner(m, m) = -Mat::Identity(m, m);
    J.bottomLeftCorner(m, m) = Mat::Identity(m, m);
    Mat L = Mat::Zero(2 * m, 2 * m);
    L.topLeftCorner(m, m) = L_plus;
    L.bottomRightCorner(m, m) = L_minus;
    return HamiltonianProblem(J, L, CanonicalBlocks{L_plus, L_minus});
}

PolyPencil HamiltonianProblem::pencil() const { return PolyPencil({L_, -K_}, {0.0}); }

void GridSpec::validate() const {
    if (!(lambda_min < lambda_max)) throw InputError("grid: lambda_min must be < lambda_max");
    if (samples < 3) throw InputError("grid: at least 3 samples required");
    if (!(refine_tol > 0)) throw InputError("grid: refine_tol must be positive");
}

// ---------------------------------------------------------------------------
// JSON problem files

nlohmann::json matrix_to_json(const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat matrix_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw InputError(what + ": matrix must be a non-empty list of rows");
    const auto n = static_cast<Eigen::Index>(j.size());
    Mat m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw InputError(what + ": row " + std::to_string(r) + " must have " + std::to_string(n) + " entries");
        for (Eigen::Index c = 0; c < n; ++c) {
            const auto& e = row[static_cast<std::size_t>(c)];
            if (e.is_number()) {
                m(r, c) = cplx(e.get<double>(), 0.0);
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
            } else {
                throw InputError(what + ": entries must be [re, im] pairs");
            }
        }
    }
    return m;
}

namespace {

Mat symmetrize_with_warning(Mat m, const std::string& what, bool skew, std::vector<std::string>& warnings) {
    const Mat defect = skew ? Mat(m + m.adjoint()) : Mat(m - m.adjoint());
    const double d = max_abs(defect);
    if (d > 0.0 && d <= kHermitianTol * std::max(max_abs(m), 1e-300)) {
        m = skew ? Mat(0.5 * (m - m.adjoint())) : Mat(0.5 * (m + m.adjoint()));
        warnings.push_back(what + " symmetrized (defect " + std::to_string(d) + ")");
    }
    return m;
}

}  // namespace

LoadedProblem parse_problem(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string())
        throw InputError("problem file: missing \"type\"");
    std::vector<std::string> warnings;
    const std::string type = doc["type"];
    if (type == "pencil") {
        if (!doc.contains("coeffs") || !doc["coeffs"].is_array() || doc["coeffs"].empty())
            throw InputError("pencil: \"coeffs\" must be a non-empty list");
        std::vector<Mat> coeffs;
        for (std::size_t k = 0; k < doc["coeffs"].size(); ++k) {
            const std::string name = "L_" + std::to_string(k);
            coeffs.push_back(symmetrize_with_warning(matrix_from_json(doc["coeffs"][k], name), name, false, warnings));
        }
        if (doc.contains("n") && doc["n"].get<int>() != coeffs.front().rows())
            throw InputError("pencil: \"n\" does not match the coefficient size");
        if (doc.contains("p") && doc["p"].get<int>() != static_cast<int>(coeffs.size()) - 1)
            throw InputError("pencil: \"p\" does not match the number of coefficients");
        std::vector<double> g;
        if (doc.contains("g")) {
            if (!doc["g"].is_array()) throw InputError("pencil: \"g\" must be a list of reals");
            for (const auto& v : doc["g"]) {
                if (!v.is_number()) throw InputError("pencil: \"g\" must be a list of reals");
                g.push_back(v.get<double>());
            }
        }
        return {PolyPencil(std::move(coeffs), std::move(g)), std::move(warnings)};
    }
    if (type == "hamiltonian") {
        if (!doc.contains("J") || !doc.contains("L")) throw InputError("hamiltonian: \"J\" and \"L\" required");
        Mat J = symmetrize_with_warning(matrix_from_json(doc["J"], "J"), "J", true, warnings);
        Mat L = symmetrize_with_warning(matrix_from_json(doc["L"], "L"), "L", false, warnings);
        std::optional<CanonicalBlocks> blocks;
        if (doc.contains("canonical") && !doc["canonical"].is_null()) {
            const auto& c = doc["canonical"];
            if (!c.contains("L_plus") || !c.contains("L_minus"))
                throw InputError("hamiltonian: canonical needs L_plus and L_minus");
            blocks = CanonicalBlocks{
                symmetrize_with_warning(matrix_from_json(c["L_plus"], "L_plus"), "L_plus", false, warnings),
                symmetrize_with_warning(matrix_from_json(c["L_minus"], "L_minus"), "L_minus", false, warnings)};
        }
        return {HamiltonianProblem(std::move(J), std::move(L), std::move(blocks)), std::move(warnings)};
    }
    throw InputError("problem file: unknown type \"" + type + "\"");
}

LoadedProblem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open problem file " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("problem file " + path + ": parse error: " + e.what());
    }
    try {
        return parse_problem(doc);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("problem file " + path + ": " + e.what());
    }
}

nlohmann::json problem_to_json(const PolyPencil& pencil) {
    nlohmann::json j;
    j["type"] = "pencil";
    j["n"] = pencil.n();
    j["p"] = pencil.p();
    j["coeffs"] = nlohmann::json::array();
    for (const auto& c : pencil.coeffs()) j["coeffs"].push_back(matrix_to_json(c));
    j["g"] = pencil.g();
    return j;
}

nlohmann::json problem_to_json(const HamiltonianProblem& problem) {
    nlohmann::json j;
    j["type"] = "hamiltonian";
    j["J"] = matrix_to_json(problem.J());
    j["L"] = matrix_to_json(problem.L());
    if (problem.blocks())
        j["canonical"] = {{"L_plus", matrix_to_json(problem.blocks()->L_plus)},
                          {"L_minus", matrix_to_json(problem.blocks()->L_minus)}};
    return j;
}

}  // namespace krein
