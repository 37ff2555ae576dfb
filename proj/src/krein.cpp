#include "krein/krein.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace krein {

std::pair<int, int> graphical_krein(int m, int eta) {
    if (m < 1) throw InputError("graphical_krein: order must be positive");
    if (eta != 1 && eta != -1) throw InputError("graphical_krein: eta must be +1 or -1");
    if (m % 2 == 0) return {m / 2, m / 2};
    return {(m + eta) / 2, (m - eta) / 2};
}

double chain_residual(const PolyPencil& pencil, const RootChain& chain) {
    const int m = chain.length();
    std::vector<Mat> a;
    for (int j = 0; j < m; ++j) a.push_back(pencil.eval(chain.lambda0, j) / static_cast<double>(factorial(j)));
    double worst = 0.0;
    for (int s = 0; s < m; ++s) {
        Vec r = Vec::Zero(pencil.n());
        for (int j = 0; j <= s; ++j) r += a[s - j] * chain.vectors[j];
        worst = std::max(worst, r.norm());
    }
    return worst;
}

RootChain chain_from_jet(const PolyPencil& pencil, double lambda0, const BranchJet& jet, int length) {
    if (length < 1 || length > static_cast<int>(jet.u.size()))
        throw InputError("chain_from_jet: chain length exceeds available derivatives");
    RootChain c;
    c.lambda0 = lambda0;
    c.source = ChainSource::branch_derivatives;
    const double norm0 = jet.u[0].norm();
    for (int j = 0; j < length; ++j) c.vectors.push_back(jet.u[j] / (factorial(j) * norm0));
    const double res = chain_residual(pencil, c);
    const double tol = 1e-6 * (1.0 + pencil.norm_bound(lambda0));
    if (res > tol) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "chain residual %.3g exceeds %.3g (unreliable derivatives)", res, tol);
        throw NumericalError(buf);
    }
    return c;
}

RootChain chain_from_branch(const PolyPencil& pencil, const BranchFamily& family, const CharacteristicValue& cv,
                            int branch_id) {
    const double thr = 1e-6 * (1.0 + pencil.norm_bound(cv.lambda0));
    int order = cv.geo_mult + 2;
    for (int attempt = 0; attempt < 4; ++attempt, order += 2) {
        const BranchDerivatives d = branch_derivatives(pencil, family, cv, order);
        const BranchJet* jet = nullptr;
        for (const auto& b : d.branches)
            if (b.branch_id == branch_id) jet = &b;
        if (jet == nullptr) throw InputError("chain_from_branch: branch does not vanish at this characteristic value");
        const int m = jet->vanishing_order(thr);
        if (m > 0) return chain_from_jet(pencil, cv.lambda0, *jet, m);
    }
    throw NumericalError("chain_from_branch: vanishing order not resolved");
}

Mat gram_matrix_linear(const Mat& K, const RootChain& chain) {
    const int m = chain.length();
    Mat w(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) w(i, j) = -chain.vectors[i].dot(K * chain.vectors[j]);
    return hermitian_part(w);
}

QuadraticGram gram_matrix_quadratic(const Mat& L, const RootChain& chain, double tau) {
    const int m = chain.length();
    if (m < 1) throw InputError("gram_matrix_quadratic: empty chain");
    auto u = [&](int idx) -> Vec {
        if (idx < 0) return Vec::Zero(L.rows());
        return chain.vectors[idx];
    };
    Mat w(m, m);
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j)
            w(i - 1, j - 1) = u(i - 1).dot(L * u(j - 1)) + u(i - 2).dot(u(j - 1)) + u(i - 1).dot(u(j - 2));
    QuadraticGram g;
    g.W = hermitian_part(w);
    g.det = g.W.determinant().real();
    if (m == 3) {
        if (std::abs(g.det) < tau) throw NumericalError("gram_matrix_quadratic: det W below threshold, signature indeterminate");
        g.kappa = g.det > 0 ? -1 : 1;
    } else {
        const Inertia in = inertia(g.W, tau);
        if (in.zero > 0) throw NumericalError("gram_matrix_quadratic: singular Gram matrix, signature indeterminate");
        g.kappa = in.positive - in.negative;
    }
    return g;
}

LocalOperators local_operators(const PolyPencil& pencil, double lambda0, double tau) {
    LocalOperators ops;
    ops.lambda0 = lambda0;
    const Mat l0 = pencil.eval(lambda0, 0);
    ops.kernel = kernel_basis(l0, tau);
    ops.Pi = ops.kernel * ops.kernel.adjoint();
    ops.Ltilde_inv = hermitian_part(-(l0 + ops.Pi).partialPivLu().inverse());
    for (int j = 0; j <= pencil.degree(); ++j)
        ops.taylor.push_back(pencil.eval(lambda0, j) / static_cast<double>(factorial(j)));
    return ops;
}

LocalOperators local_operators(const PolyPencil& pencil, double lambda0) {
    return local_operators(pencil, lambda0, pencil.tau_zero(lambda0));
}

namespace {

const Mat& taylor_or_zero(const LocalOperators& ops, int j, const Mat& zero) {
    return j < static_cast<int>(ops.taylor.size()) ? ops.taylor[j] : zero;
}

}  // namespace

Mat lambda_operator(const LocalOperators& ops, int m) {
    if (m < 1) throw InputError("lambda_operator: order must be positive");
    const Eigen::Index n = ops.Pi.rows();
    const Mat zero = Mat::Zero(n, n);
    Mat total = Mat::Zero(n, n);
    // Bit b of the mask set: a part boundary after position b+1.
    for (unsigned mask = 0; mask < (1u << (m - 1)); ++mask) {
        std::vector<int> parts;
        int len = 1;
        for (int b = 0; b < m - 1; ++b) {
            if (mask & (1u << b)) {
                parts.push_back(len);
                len = 1;
            } else {
                ++len;
            }
        }
        parts.push_back(len);
        bool vanishes = false;
        for (int a : parts)
            if (a >= static_cast<int>(ops.taylor.size())) vanishes = true;
        if (vanishes) continue;
        Mat term = taylor_or_zero(ops, parts[0], zero);
        for (std::size_t t = 1; t < parts.size(); ++t) term = term * ops.Ltilde_inv * ops.taylor[parts[t]];
        total += term;
    }
    return total;
}

std::vector<Mat> lambda_operators_recursive(const LocalOperators& ops, int max_m) {
    const Eigen::Index n = ops.Pi.rows();
    const Mat zero = Mat::Zero(n, n);
    std::vector<Mat> lam(max_m + 1, zero);
    for (int m = 1; m <= max_m; ++m) {
        Mat v = taylor_or_zero(ops, m, zero);
        for (int j = 1; j < m; ++j) {
            if (j >= static_cast<int>(ops.taylor.size())) break;
            v += ops.taylor[j] * ops.Ltilde_inv * lam[m - j];
        }
        lam[m] = v;
    }
    return lam;
}

int KernelRecursionState::alg_mult() const {
    int total = 0;
    for (std::size_t m = 0; m < Kcounts.size(); ++m)
        total += static_cast<int>(m + 1) * (Kcounts[m][0] + Kcounts[m][1]);
    return total;
}

namespace {

struct Correction {
    Mat basis;                          // B: orthonormal branch basis of the kernel
    std::vector<std::vector<Vec>> c;    // c[i][s] = B^* u_i^(s)
    std::vector<std::vector<double>> e; // error bounds of c[i][s]
};

Correction correction_data(const LocalOperators& ops, const BranchDerivatives& jets) {
    Correction out;
    const int k = static_cast<int>(jets.branches.size());
    const Eigen::Index n = ops.Pi.rows();
    Mat x(n, k);
    for (int i = 0; i < k; ++i) x.col(i) = ops.Pi * jets.branches[i].u[0];
    Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.basis = svd.matrixU() * svd.matrixV().adjoint();
    const double rt = std::sqrt(static_cast<double>(n));
    for (int i = 0; i < k; ++i) {
        std::vector<Vec> ci;
        std::vector<double> ei;
        for (std::size_t s = 0; s < jets.branches[i].u.size(); ++s) {
            ci.push_back(out.basis.adjoint() * jets.branches[i].u[s]);
            ei.push_back(rt * jets.branches[i].u_err[s]);
        }
        out.c.push_back(std::move(ci));
        out.e.push_back(std::move(ei));
    }
    return out;
}

}  // namespace

KernelRecursionState kernel_recursion(const PolyPencil& pencil, double lambda0, const BranchDerivatives* jets,
                                      const RecursionOptions& options) {
    const double tau = options.tau ? *options.tau : pencil.tau_zero(lambda0);
    const LocalOperators ops = local_operators(pencil, lambda0, tau);
    const int k = static_cast<int>(ops.kernel.cols());
    if (k == 0) throw InputError("kernel_recursion: P(lambda0) has trivial kernel");

    KernelRecursionState st;
    st.lambda0 = lambda0;
    st.Pi = ops.Pi;
    st.Ltilde_inv = ops.Ltilde_inv;
    st.U_list.push_back(ops.kernel);
    if (jets != nullptr) st.jets = *jets;

    const int cap = pencil.n() * (pencil.p() + pencil.q()) + 2;
    std::vector<Mat> lam{Mat::Zero(pencil.n(), pencil.n())};
    std::optional<Correction> corr;

    for (int m = 1;; ++m) {
        if (m > cap) throw NumericalError("kernel_recursion: recursion depth exceeds n(p+q)+2");
        lam.push_back(lambda_operator(ops, m));
        Mat H = lam[m];
        double thr = tau;
        if (m >= 3) {
            const int need = m - 2;
            const bool usable = st.jets && static_cast<int>(st.jets->branches.size()) == k &&
                                st.jets->max_order >= need;
            if (!usable) {
                const double h = options.fd_step * std::max(1.0, std::abs(lambda0));
                st.jets = local_jets(pencil, lambda0, k, std::max(m, k + 2), h);
                corr.reset();
            }
            if (!corr) corr = correction_data(ops, *st.jets);
            Mat d = Mat::Zero(k, k);
            double bound = 0.0;
            for (int s = 1; s <= m - 1; ++s)
                for (int r = 1; r <= m - s - 1; ++r) {
                    const Mat lhat = corr->basis.adjoint() * lam[m - s - r] * corr->basis;
                    const double lnorm = lhat.norm();
                    const double w = 1.0 / (factorial(r) * factorial(s));
                    for (int j = 0; j < k; ++j)
                        for (int i = 0; i < k; ++i) d(j, i) -= w * corr->c[j][r].dot(lhat * corr->c[i][s]);
                    double cr = 0, cs = 0, er = 0, es = 0;
                    for (int i = 0; i < k; ++i) {
                        cr = std::max(cr, corr->c[i][r].norm());
                        cs = std::max(cs, corr->c[i][s].norm());
                        er = std::max(er, corr->e[i][r]);
                        es = std::max(es, corr->e[i][s]);
                    }
                    bound += w * lnorm * (cr * es + er * cs + er * es);
                }
            H += corr->basis * hermitian_part(d) * corr->basis.adjoint();
            thr = tau + 10.0 * k * bound;
        }
        const Mat& U = st.U_list.back();
        const Mat form = hermitian_part(U.adjoint() * H * U);
        const HermitianEigen e = solve_hermitian(form);
        int pos = 0, neg = 0;
        std::vector<Eigen::Index> zero_idx;
        for (Eigen::Index i = 0; i < e.values.size(); ++i) {
            const double v = e.values[i];
            if (v > thr)
                ++pos;
            else if (v < -thr)
                ++neg;
            else
                zero_idx.push_back(i);
            if (std::abs(v) >= thr / 10 && std::abs(v) <= thr * 10) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "rank decision near tolerance at lambda0=%.17g, m=%d: eigenvalue %.3g vs threshold %.3g",
                              lambda0, m, v, thr);
                st.warnings.emplace_back(buf);
            }
        }
        st.H_forms.push_back(form);
        st.form_eigenvalues.push_back(e.values);
        st.thresholds.push_back(thr);
        st.Kcounts.push_back({pos, neg, static_cast<int>(zero_idx.size())});
        if (zero_idx.empty()) break;
        Mat next(U.rows(), static_cast<Eigen::Index>(zero_idx.size()));
        for (std::size_t t = 0; t < zero_idx.size(); ++t)
            next.col(static_cast<Eigen::Index>(t)) = U * e.vectors.col(zero_idx[t]);
        st.U_list.push_back(next);
    }
    return st;
}

KreinSignature krein_signature_of_cv(const KernelRecursionState& state) {
    KreinSignature s;
    for (std::size_t i = 0; i < state.Kcounts.size(); ++i) {
        const int m = static_cast<int>(i) + 1;
        const auto [pp, pm] = graphical_krein(m, 1);
        const auto [mp, mm] = graphical_krein(m, -1);
        s.kappa_plus += state.Kcounts[i][0] * pp + state.Kcounts[i][1] * mp;
        s.kappa_minus += state.Kcounts[i][0] * pm + state.Kcounts[i][1] * mm;
    }
    s.kappa = s.kappa_plus - s.kappa_minus;
    return s;
}

void apply_recursion(CharacteristicValue& cv, const KernelRecursionState& state) {
    cv.Kcounts.clear();
    for (const auto& c : state.Kcounts) cv.Kcounts.emplace_back(c[0], c[1]);
    cv.alg_mult = state.alg_mult();
    const KreinSignature s = krein_signature_of_cv(state);
    cv.kappa_plus = s.kappa_plus;
    cv.kappa_minus = s.kappa_minus;
}

}  // namespace krein
