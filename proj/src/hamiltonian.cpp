#include "krein/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace krein {

namespace {

double l_tol(const HamiltonianProblem& h) { return 1e-8 * (1.0 + max_abs(h.L())); }

bool has_partner(const std::vector<CompanionRoot>& roots, const CompanionRoot& r, cplx target) {
    for (const auto& s : roots)
        if (s.multiplicity == r.multiplicity && std::abs(s.value - target) <= 1e-6 * (1.0 + std::abs(target)))
            return true;
    return false;
}

}  // namespace

JLSpectrum jl_spectrum(const HamiltonianProblem& problem) {
    JLSpectrum s;
    const Mat jl = problem.J() * problem.L();
    Eigen::ComplexEigenSolver<Mat> es(jl, false);
    if (es.info() != Eigen::Success) throw NumericalError("jl_spectrum: eigensolver did not converge");
    std::vector<cplx> vals(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    s.eigenvalues = cluster_roots(vals);

    const double zero_tol = 1e-6 * (1.0 + max_abs(jl));
    int imaginary_total = 0;
    for (auto& r : s.eigenvalues) {
        const double a = std::abs(r.value);
        if (a <= zero_tol) {
            s.zero_mult += r.multiplicity;
            continue;
        }
        const double tau = 1e-7 * (1.0 + a);
        const bool real = std::abs(r.value.imag()) <= tau;
        const bool imag = std::abs(r.value.real()) <= tau;
        if (real && imag) throw NumericalError("jl_spectrum: eigenvalue in the ambiguity band of both axes");
        if (real) {
            if (r.value.real() > 0) s.k_r += r.multiplicity;
        } else if (imag) {
            imaginary_total += r.multiplicity;
        } else if (r.value.real() > 0 && r.value.imag() > 0) {
            s.k_c += r.multiplicity;
        }
    }
    s.n_uns = s.k_r + 2 * s.k_c;

    s.reflection_ok = true;
    s.full_symmetry = true;
    for (const auto& r : s.eigenvalues) {
        if (!has_partner(s.eigenvalues, r, -std::conj(r.value))) s.reflection_ok = false;
        if (!has_partner(s.eigenvalues, r, -r.value) || !has_partner(s.eigenvalues, r, std::conj(r.value)))
            s.full_symmetry = false;
    }
    if (!s.reflection_ok) s.warnings.emplace_back("spectrum of JL not closed under nu -> -conj(nu)");

    const PolyPencil pencil = problem.pencil();
    AnalysisOptions opt;
    opt.quadratic = false;
    const IndexReport rep = analyze_pencil(pencil, opt);
    for (const auto& w : rep.warnings) s.warnings.push_back(w);
    int pencil_total = 0;
    for (std::size_t i = 0; i < rep.cvs.size(); ++i) {
        const auto& cv = rep.cvs[i];
        if (cv.lambda0 == 0.0) continue;
        ImaginaryEigenvalue im;
        im.lambda = cv.lambda0;
        im.geo_mult = cv.geo_mult;
        im.alg_mult = cv.alg_mult;
        im.kappa_plus = cv.kappa_plus;
        im.kappa_minus = cv.kappa_minus;
        if (cv.alg_mult == 1) {
            const Vec u = rep.recursion[i].U_list.front().col(0);
            im.kappa_K = -u.dot(problem.K() * u).real();
        }
        pencil_total += cv.alg_mult;
        if (cv.lambda0 < 0) s.k_i_minus += cv.kappa_minus;
        s.imaginary.push_back(im);
    }
    if (pencil_total != imaginary_total) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "jl_spectrum: %d purely imaginary eigenvalues of JL but %d real characteristic values of L - lambda K",
                      imaginary_total, pencil_total);
        throw NumericalError(buf);
    }
    return s;
}

int generalized_kernel_dim(const HamiltonianProblem& problem) {
    const Mat jl = problem.J() * problem.L();
    Mat power = Mat::Identity(jl.rows(), jl.cols());
    int prev = 0;
    for (int r = 1; r <= problem.n(); ++r) {
        power = power * jl;
        const int dim = static_cast<int>(kernel_basis(power, 1e-8 * (1.0 + max_abs(power))).cols());
        if (dim == prev) return dim;
        prev = dim;
    }
    return prev;
}

KernelFormD kernel_form_d(const HamiltonianProblem& problem) {
    const Mat jl = problem.J() * problem.L();
    Mat power = Mat::Identity(jl.rows(), jl.cols());
    Mat gker(jl.rows(), 0);
    for (int r = 1; r <= problem.n(); ++r) {
        power = power * jl;
        Mat next = kernel_basis(power, 1e-8 * (1.0 + max_abs(power)));
        if (next.cols() == gker.cols()) break;
        gker = next;
    }
    const Mat kerL = kernel_basis(problem.L(), l_tol(problem));
    const Mat proj = Mat::Identity(jl.rows(), jl.rows()) - kerL * kerL.adjoint();
    KernelFormD d;
    d.V_basis = orthonormal_range(proj * gker, 1e-8);
    d.D = hermitian_part(d.V_basis.adjoint() * problem.L() * d.V_basis);
    d.n_D = inertia(d.D, l_tol(problem)).negative;
    return d;
}

Theorem1Result theorem1_check(const HamiltonianProblem& problem) {
    Theorem1Result t;
    const int gdim = generalized_kernel_dim(problem);
    const int kdim = static_cast<int>(kernel_basis(problem.L(), l_tol(problem)).cols());
    if (gdim != 2 * kdim) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "dim gKer(JL) = %d differs from 2 dim Ker L = %d", gdim, 2 * kdim);
        t.reason = buf;
        return t;
    }
    const JLSpectrum s = jl_spectrum(problem);
    if (!s.full_symmetry) {
        t.reason = "spectrum of JL lacks the full Hamiltonian symmetry";
        return t;
    }
    const KernelFormD d = kernel_form_d(problem);
    t.applicable = true;
    t.k_r = s.k_r;
    t.k_c = s.k_c;
    t.k_i_minus = s.k_i_minus;
    t.n_L = inertia(problem.L(), l_tol(problem)).negative;
    t.n_D = d.n_D;
    t.residual = (t.k_r + 2 * t.k_c) - (t.n_L - t.n_D - 2 * t.k_i_minus);
    return t;
}

Theorem2Result theorem2_bound(const HamiltonianProblem& problem) {
    if (!problem.blocks()) throw UnsupportedError("theorem2_bound: problem has no canonical blocks");
    const Mat& lp = problem.blocks()->L_plus;
    const Mat& lm = problem.blocks()->L_minus;
    const double tol = 1e-8 * (1.0 + std::max(max_abs(lp), max_abs(lm)));
    const Mat kp = kernel_basis(lp, tol);
    const Mat km = kernel_basis(lm, tol);
    if (kp.cols() > 0 && km.cols() > 0 && max_abs(kp.adjoint() * km) > 1e-8)
        throw UnsupportedError("theorem2_bound: Ker L_+ is not orthogonal to Ker L_-");
    Mat both(lp.rows(), kp.cols() + km.cols());
    both << kp, km;
    const Mat q = both.cols() == 0 ? Mat(Mat::Identity(lp.rows(), lp.rows())) : kernel_basis(both.adjoint(), 1e-8);
    const int np = inertia(Mat(q.adjoint() * lp * q), tol).negative;
    const int nm = inertia(Mat(q.adjoint() * lm * q), tol).negative;
    const JLSpectrum s = jl_spectrum(problem);
    Theorem2Result t;
    t.lower_bound = std::abs(np - nm);
    t.k_r = s.k_r;
    t.n_uns = s.n_uns;
    t.holds = s.n_uns >= t.k_r && t.k_r >= t.lower_bound;
    return t;
}

}  // namespace krein
