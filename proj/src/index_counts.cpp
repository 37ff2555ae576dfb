#include "krein/index_counts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

namespace krein {

namespace {

bool well_conditioned(const Mat& a, double rcond_min) {
    Eigen::JacobiSVD<Mat> svd(a);
    const RVec& s = svd.singularValues();
    return s.size() > 0 && s[s.size() - 1] > rcond_min * s[0];
}

// Eigenvalues of the block companion matrix of sum_k lambda^k A_k, A_d invertible.
std::vector<cplx> companion_eigenvalues(const std::vector<Mat>& a) {
    const int d = static_cast<int>(a.size()) - 1;
    const Eigen::Index n = a.front().rows();
    Mat rhs(n, n * d);
    for (int j = 0; j < d; ++j) rhs.middleCols(j * n, n) = a[j];
    const Mat x = a[d].partialPivLu().solve(rhs);
    Mat c = Mat::Zero(n * d, n * d);
    for (int i = 0; i + 1 < d; ++i) c.block(i * n, (i + 1) * n, n, n).setIdentity();
    c.bottomRows(n) = -x;
    Eigen::ComplexEigenSolver<Mat> es(c, false);
    if (es.info() != Eigen::Success) throw NumericalError("companion_oracle: eigensolver did not converge");
    std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return out;
}

std::vector<Mat> combined(const PolyPencil& p) {
    std::vector<Mat> a;
    for (int k = 0; k <= p.degree(); ++k) a.push_back(p.combined_coeff(k));
    return a;
}

std::vector<cplx> raw_roots(const PolyPencil& pencil, std::uint64_t seed) {
    const std::vector<Mat> a = combined(pencil);
    if (well_conditioned(a.back(), 1e-10)) return companion_eigenvalues(a);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int attempt = 0; attempt < 8; ++attempt) {
        const double s = dist(rng);
        const std::vector<Mat> b = combined(pencil.shifted(s));
        if (!well_conditioned(b.front(), 1e-10)) continue;
        std::vector<Mat> rev(b.rbegin(), b.rend());
        std::vector<cplx> out;
        for (const cplx w : companion_eigenvalues(rev))
            if (std::abs(w) > 1e-8) out.push_back(s + 1.0 / w);
        return out;
    }
    throw NumericalError("companion_oracle: no shift made the reversed leading coefficient invertible");
}

}  // namespace

std::vector<CompanionRoot> companion_oracle(const PolyPencil& pencil, std::uint64_t seed) {
    return cluster_roots(raw_roots(pencil, seed));
}

std::vector<CompanionRoot> cluster_roots(const std::vector<cplx>& z) {
    const int N = static_cast<int>(z.size());
    std::vector<int> parent(N);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j)
            if (std::abs(z[i] - z[j]) <= 1e-6 * (1.0 + std::max(std::abs(z[i]), std::abs(z[j]))))
                parent[find(i)] = find(j);

    std::vector<std::vector<int>> groups;
    {
        std::vector<int> slot(N, -1);
        for (int i = 0; i < N; ++i) {
            const int r = find(i);
            if (slot[r] < 0) {
                slot[r] = static_cast<int>(groups.size());
                groups.emplace_back();
            }
            groups[slot[r]].push_back(i);
        }
    }
    auto mean = [&](const std::vector<int>& g) {
        cplx s = 0;
        for (int i : g) s += z[i];
        return s / static_cast<double>(g.size());
    };
    auto spread = [&](const std::vector<int>& g) {
        double s = 0;
        for (int i : g)
            for (int j : g) s = std::max(s, std::abs(z[i] - z[j]));
        return s;
    };
    // A root of multiplicity m splits by about eps^(1/m); merge such fans.
    // Grow from each group by nearest neighbours and keep the largest prefix
    // whose spread fits its own multiplicity.
    for (bool merged = true; merged;) {
        merged = false;
        for (std::size_t a = 0; a < groups.size() && !merged; ++a) {
            const cplx ma = mean(groups[a]);
            std::vector<std::pair<double, std::size_t>> near;
            for (std::size_t b = 0; b < groups.size(); ++b) {
                if (b == a) continue;
                const double d = std::abs(mean(groups[b]) - ma);
                if (d <= 1e-4 * (1.0 + std::abs(ma))) near.emplace_back(d, b);
            }
            std::sort(near.begin(), near.end());
            std::vector<int> g = groups[a];
            std::size_t take = 0;
            for (std::size_t t = 0; t < near.size(); ++t) {
                const auto& gb = groups[near[t].second];
                g.insert(g.end(), gb.begin(), gb.end());
                const double m = static_cast<double>(g.size());
                if (spread(g) <= 10.0 * std::pow(1e-15, 1.0 / m) * (1.0 + std::abs(mean(g)))) take = t + 1;
            }
            if (take == 0) continue;
            std::vector<std::size_t> drop;
            std::vector<int> merged_group = groups[a];
            for (std::size_t t = 0; t < take; ++t) {
                const auto& gb = groups[near[t].second];
                merged_group.insert(merged_group.end(), gb.begin(), gb.end());
                drop.push_back(near[t].second);
            }
            groups[a] = merged_group;
            std::sort(drop.rbegin(), drop.rend());
            for (std::size_t d : drop) groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(d));
            merged = true;
        }
    }
    std::vector<CompanionRoot> out;
    for (const auto& g : groups) {
        cplx v = mean(g);
        if (std::abs(v.imag()) <= 1e-7 * (1.0 + std::abs(v))) v = cplx(v.real(), 0.0);
        out.push_back({v, static_cast<int>(g.size())});
    }
    std::sort(out.begin(), out.end(), [](const CompanionRoot& a, const CompanionRoot& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    return out;
}

std::vector<CompanionRoot> companion_real_roots(const PolyPencil& pencil, std::uint64_t seed) {
    std::vector<CompanionRoot> out;
    for (const auto& r : companion_oracle(pencil, seed))
        if (r.value.imag() == 0.0) out.push_back(r);
    return out;
}

int negative_count(const PolyPencil& pencil, double lambda) {
    return inertia(pencil.eval(lambda, 0), pencil.tau_zero(lambda)).negative;
}

namespace {

int strict_negatives(const PolyPencil& pencil, double lambda, bool& has_zero) {
    const RVec v = solve_hermitian(pencil.eval(lambda, 0)).values;
    int neg = 0;
    const double tiny = 1e-14 * (1.0 + pencil.norm_bound(lambda));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] < 0) ++neg;
        if (std::abs(v[i]) <= tiny) has_zero = true;
    }
    return neg;
}

}  // namespace

double compute_K_infinity(const PolyPencil& pencil) {
    const int d = pencil.degree();
    const Eigen::Index n = pencil.n();
    const Mat lead = pencil.combined_coeff(d);
    double B = 1.0;
    if (well_conditioned(lead, 1e-10)) {
        Mat rhs(n, n * d);
        for (int j = 0; j < d; ++j) rhs.middleCols(j * n, n) = pencil.combined_coeff(j);
        const Mat x = lead.partialPivLu().solve(rhs);
        B = std::max(1.0, x.cwiseAbs().rowwise().sum().maxCoeff());
    } else {
        for (const auto& r : companion_oracle(pencil)) B = std::max(B, std::abs(r.value));
    }
    double K = 2.0 * (1.0 + B);
    for (int doubling = 0; doubling <= 10; ++doubling, K *= 2.0) {
        bool ok = true;
        for (int side : {-1, 1}) {
            bool zero = false;
            const int ref = strict_negatives(pencil, side * K, zero);
            for (int j = 1; j <= 4 && ok; ++j)
                if (strict_negatives(pencil, side * K * std::ldexp(1.0, j), zero) != ref) ok = false;
            if (zero) ok = false;
        }
        if (ok) return K;
    }
    throw NumericalError("compute_K_infinity: inertia not constant beyond K after 2^10 doublings");
}

std::pair<int, int> z_at_infinity_scan(const PolyPencil& pencil, double K) {
    bool zero = false;
    const int minus = strict_negatives(pencil, -K, zero);
    const int plus = strict_negatives(pencil, K, zero);
    if (zero) throw NumericalError("z_at_infinity_scan: singular pencil at the cutoff");
    return {minus, plus};
}

std::pair<int, int> z_at_infinity(const PolyPencil& pencil) {
    const int p = pencil.p(), q = pencil.q(), n = pencil.n();
    const double gq = pencil.g().back();
    if (q > p) {
        if (gq == 0.0) throw UnsupportedError("z_at_infinity: leading g coefficient is zero");
        if (q % 2 == 0) return gq > 0 ? std::pair{n, n} : std::pair{0, 0};
        return gq > 0 ? std::pair{0, n} : std::pair{n, 0};
    }
    Mat lead = pencil.coeffs().back();
    if (q == p) lead.diagonal().array() -= gq;
    if (!well_conditioned(lead, 1e-12)) throw UnsupportedError("z_at_infinity: leading coefficient is singular");
    const double tol = 1e-12 * max_abs(lead);
    const int np = inertia(lead, tol).negative;
    const int nm = inertia(Mat((p % 2 == 0 ? 1.0 : -1.0) * lead), tol).negative;
    return {nm, np};
}

LocalZ z_local(const CharacteristicValue& cv) {
    LocalZ z;
    for (std::size_t i = 0; i < cv.Kcounts.size(); ++i) {
        const int m = static_cast<int>(i) + 1;
        const auto [kp, km] = cv.Kcounts[i];
        z.down_right += km;
        z.up_right += kp;
        if (m % 2 == 1) {
            z.down_left += kp;
            z.up_left += km;
        } else {
            z.down_left += km;
            z.up_left += kp;
        }
    }
    return z;
}

LocalZ z_local_sampled(const PolyPencil& pencil, const CharacteristicValue& cv, double eps) {
    LocalZ z;
    auto count = [&](double x, int& down, int& up) {
        RVec v = solve_hermitian(pencil.eval(x, 0)).values;
        std::vector<double> s(v.data(), v.data() + v.size());
        std::sort(s.begin(), s.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        for (int i = 0; i < cv.geo_mult && i < static_cast<int>(s.size()); ++i) (s[i] < 0 ? down : up) += 1;
    };
    count(cv.lambda0 - eps, z.down_left, z.up_left);
    count(cv.lambda0 + eps, z.down_right, z.up_right);
    return z;
}

void apply_z_local(const PolyPencil& pencil, CharacteristicValue& cv, double eps) {
    const LocalZ f = z_local(cv);
    const LocalZ s = z_local_sampled(pencil, cv, eps);
    if (!(f == s)) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "Z counts at lambda0=%.17g: formula (%d,%d,%d,%d) vs sampling (%d,%d,%d,%d) at eps=%.3g",
                      cv.lambda0, f.down_left, f.down_right, f.up_left, f.up_right, s.down_left, s.down_right,
                      s.up_left, s.up_right, eps);
        throw NumericalError(buf);
    }
    cv.Zdown_left = f.down_left;
    cv.Zdown_right = f.down_right;
    cv.Zup_left = f.up_left;
    cv.Zup_right = f.up_right;
}

int kernel_identity_residual(const CharacteristicValue& cv) {
    const int kappa = cv.kappa();
    int r = std::abs(cv.Zdown_left - cv.Zdown_right - kappa);
    r += std::abs(cv.Zup_right - cv.Zup_left - kappa);
    r += std::abs(cv.Zdown_left + cv.Zdown_right - kappa - 2 * cv.Zdown_right);
    r += std::abs(cv.Zdown_left + cv.Zup_left - cv.geo_mult);
    r += std::abs(cv.Zdown_right + cv.Zup_right - cv.geo_mult);
    return r;
}

bool has_reflection_symmetry(const PolyPencil& pencil) {
    const int pts = 2 * pencil.n() * pencil.degree() + 1;
    for (int i = 0; i < pts; ++i) {
        const double x = 0.25 + 1.75 * i / pts;
        const RVec a = solve_hermitian(pencil.eval(x, 0)).values;
        const RVec b = solve_hermitian(pencil.eval(-x, 0)).values;
        if ((a - b).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + pencil.norm_bound(x))) return false;
    }
    return true;
}

namespace {

const CharacteristicValue* cv_at(const IndexReport& report, double x) {
    for (const auto& cv : report.cvs)
        if (std::abs(cv.lambda0 - x) <= 1e-6 * (1.0 + std::abs(x))) return &cv;
    return nullptr;
}

std::vector<double> warped_grid(double K, int samples) {
    if (samples % 2 == 0) ++samples;
    double alpha = 0.0;
    // Spacing near zero as for a uniform grid on [-2, 2].
    if (K > 4.0) {
        double lo = 1e-6, hi = 50.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (K * mid / std::sinh(mid) > 2.0 ? lo : hi) = mid;
        }
        alpha = 0.5 * (lo + hi);
    }
    std::vector<double> g(static_cast<std::size_t>(samples));
    const int h = samples / 2;
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i - h) / h;
        g[i] = alpha == 0.0 ? K * t : K * std::sinh(alpha * t) / std::sinh(alpha);
    }
    g[h] = 0.0;
    g.front() = -K;
    g.back() = K;
    return g;
}

}  // namespace

std::pair<int, int> verify_global(const IndexReport& r) {
    const int eq1 = (r.Z_minus_inf + r.Z_plus_inf) - 2 * r.n_L0 - (r.Z0_plus + r.Z0_minus) + r.sum_sign_kappa;
    const int eq2 = (r.Z_minus_inf - r.Z_plus_inf) + (r.Z0_plus - r.Z0_minus) - r.sum_kappa;
    return {eq1, eq2};
}

int verify_local(const PolyPencil& pencil, const IndexReport& report, double lambda1, double lambda2) {
    if (!(lambda1 < lambda2)) throw InputError("verify_local: need lambda1 < lambda2");
    const CharacteristicValue* c1 = cv_at(report, lambda1);
    const CharacteristicValue* c2 = cv_at(report, lambda2);
    const double x1 = c1 ? c1->lambda0 : lambda1;
    const double x2 = c2 ? c2->lambda0 : lambda2;
    int sum = 0;
    for (const auto& cv : report.cvs)
        if (cv.lambda0 > x1 && cv.lambda0 < x2 && &cv != c1 && &cv != c2) sum += cv.kappa();
    const int lhs = negative_count(pencil, x1) - negative_count(pencil, x2) + (c1 ? c1->Zdown_right : 0) -
                    (c2 ? c2->Zdown_left : 0);
    return lhs - sum;
}

QuadraticCounts quadratic_counts(const PolyPencil& pencil, const IndexReport& report) {
    if (pencil.degree() != 2 || max_abs(pencil.combined_coeff(2) - Mat::Identity(pencil.n(), pencil.n())) > 1e-12)
        throw InputError("quadratic_counts: pencil is not of the form M + lambda K + lambda^2 I");
    QuadraticCounts c;
    const CharacteristicValue* zero = cv_at(report, 0.0);
    if (zero != nullptr && zero->lambda0 != 0.0) zero = nullptr;
    c.z = zero ? zero->alg_mult : 0;
    int z_comp = 0;
    for (const auto& r : companion_oracle(pencil)) {
        const double a = std::abs(r.value);
        if (a <= 1e-7) {
            z_comp += r.multiplicity;
            continue;
        }
        const double tau = 1e-7 * (1.0 + a);
        const bool real = std::abs(r.value.imag()) <= tau;
        const bool imag = std::abs(r.value.real()) <= tau;
        if (real && imag) throw NumericalError("quadratic_counts: eigenvalue classification ambiguous near 0");
        if (real)
            c.n_r += r.multiplicity;
        else if (imag)
            c.n_i += r.multiplicity;
        else if (r.value.imag() > 0)
            c.n_c += r.multiplicity;
    }
    if (z_comp != c.z) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "quadratic_counts: zero multiplicity %d (companion) vs %d (recursion)", z_comp, c.z);
        throw NumericalError(buf);
    }
    for (const auto& cv : report.cvs) {
        if (cv.lambda0 > 0) {
            c.n_r_plus += 2 * cv.kappa_plus;
            c.n_r_minus += 2 * cv.kappa_minus;
        } else if (cv.lambda0 < 0) {
            c.n_r_plus_left += 2 * cv.kappa_plus;
        }
    }
    const int n = pencil.n();
    c.n_M = report.n_L0;
    c.residual_nsum = 2 * n - (c.z + c.n_r + 2 * c.n_c + c.n_i);
    c.residual_LM5 = 2 * c.n_M + (report.Z0_plus + report.Z0_minus) - (c.n_r - c.n_r_minus - c.n_r_plus_left);
    c.symmetric = has_reflection_symmetry(pencil);
    if (c.symmetric) {
        auto halve = [](int twice) { return twice % 2 == 0 ? twice / 2 : twice; };
        c.residual_LM2 = halve((2 * n - c.z) - 2 * (c.n_M + report.Z0_plus) - (2 * c.n_c + c.n_i + 2 * c.n_r_minus));
        c.residual_LM3 = halve((2 * n - c.z) + 2 * (c.n_M + report.Z0_plus) - (2 * c.n_c + c.n_i + 2 * c.n_r_plus));
    } else {
        c.notes.emplace_back("no (lambda, mu) -> (-lambda, mu) symmetry; symmetric-case identities skipped");
    }
    return c;
}

IndexReport analyze_pencil(const PolyPencil& pencil, const AnalysisOptions& options) {
    IndexReport rep;
    rep.pencil = pencil;
    rep.K = compute_K_infinity(pencil);
    double K = rep.K;
    if (options.range) K = std::max({K, std::abs(options.range->first), std::abs(options.range->second)});

    TrackOptions topt;
    topt.refine_tol = options.refine_tol;
    topt.phase_seed = options.phase_seed;
    rep.family = track_branches(pencil, warped_grid(K, options.samples), topt);
    rep.warnings = rep.family.warnings;

    RootSearchOptions ropt;
    ropt.fd_step = options.fd_step;
    rep.cvs = find_characteristic_values(pencil, rep.family, ropt);

    RecursionOptions kopt;
    kopt.fd_step = options.fd_step;
    for (std::size_t i = 0; i < rep.cvs.size(); ++i) {
        CharacteristicValue& cv = rep.cvs[i];
        KernelRecursionState st = kernel_recursion(pencil, cv.lambda0, nullptr, kopt);
        cv.geo_mult = st.geo_mult();
        apply_recursion(cv, st);
        for (const auto& w : st.warnings) rep.warnings.push_back(w);
        double eps = 1e-3 * (1.0 + std::abs(cv.lambda0));
        if (i > 0) eps = std::min(eps, 0.3 * (cv.lambda0 - rep.cvs[i - 1].lambda0));
        if (i + 1 < rep.cvs.size()) eps = std::min(eps, 0.3 * (rep.cvs[i + 1].lambda0 - cv.lambda0));
        apply_z_local(pencil, cv, eps);
        rep.kernel_residuals.push_back(kernel_identity_residual(cv));
        rep.recursion.push_back(std::move(st));
    }

    const auto [zm, zp] = z_at_infinity_scan(pencil, rep.K);
    rep.Z_minus_inf = zm;
    rep.Z_plus_inf = zp;
    try {
        rep.Z_inf_table = z_at_infinity(pencil);
        if (rep.Z_inf_table->first != zm || rep.Z_inf_table->second != zp)
            throw NumericalError("asymptotic table disagrees with the branch scan at +-K");
    } catch (const UnsupportedError& e) {
        rep.warnings.emplace_back(e.what());
    }

    rep.n_L0 = negative_count(pencil, 0.0);
    for (const auto& cv : rep.cvs) {
        if (cv.lambda0 == 0.0) {
            rep.Z0_plus = cv.Zdown_right;
            rep.Z0_minus = cv.Zdown_left;
            continue;
        }
        rep.sum_kappa += cv.kappa();
        rep.sum_sign_kappa += (cv.lambda0 > 0 ? 1 : -1) * cv.kappa();
    }
    std::tie(rep.residual_eq1, rep.residual_eq2) = verify_global(rep);

    if (options.local_pairs > 0) {
        std::mt19937_64 rng(options.seed);
        std::uniform_real_distribution<double> dist(-rep.K, rep.K);
        for (int i = 0; i < options.local_pairs; ++i) {
            double a = dist(rng), b = dist(rng);
            if (a > b) std::swap(a, b);
            if (a == b) continue;
            rep.local_checks.push_back({a, b, verify_local(pencil, rep, a, b)});
        }
    }

    if (options.quadratic && pencil.degree() == 2 &&
        max_abs(pencil.combined_coeff(2) - Mat::Identity(pencil.n(), pencil.n())) <= 1e-12)
        rep.quadratic = quadratic_counts(pencil, rep);
    return rep;
}

}  // namespace krein
