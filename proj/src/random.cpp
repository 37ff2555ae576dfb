#include "krein/random.hpp"

#include <algorithm>
#include <cmath>

namespace krein {

namespace {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int random_sign(Rng& rng) { return std::bernoulli_distribution(0.5)(rng) ? 1 : -1; }

Mat with_eigenvalues(const Mat& basis, const RVec& values) {
    return hermitian_part(basis * values.cast<cplx>().asDiagonal() * basis.adjoint());
}

// Hermitian matrix with eigenvalues of magnitude in [0.3, 2] and random signs.
Mat invertible_hermitian(int n, Rng& rng) {
    RVec v(n);
    for (int i = 0; i < n; ++i) v[i] = random_sign(rng) * uniform(rng, 0.3, 2.0);
    return with_eigenvalues(random_unitary(n, rng), v);
}

}  // namespace

Mat random_hermitian(int n, Rng& rng) {
    Mat a(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a(i, j) = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
    return hermitian_part(a);
}

Mat random_real_symmetric(int n, Rng& rng) {
    Mat a(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a(i, j) = uniform(rng, -1, 1);
    return hermitian_part(a);
}

Mat random_unitary(int n, Rng& rng) {
    Mat a(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a(i, j) = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
    Eigen::HouseholderQR<Mat> qr(a);
    return qr.householderQ() * Mat::Identity(n, n);
}

Mat random_orthogonal(int n, Rng& rng) {
    RMat a(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a(i, j) = uniform(rng, -1, 1);
    Eigen::HouseholderQR<RMat> qr(a);
    RMat q = qr.householderQ() * RMat::Identity(n, n);
    return q.cast<cplx>();
}

Mat hermitian_with_inertia(int n, int pos, int neg, Rng& rng, bool real) {
    if (pos < 0 || neg < 0 || pos + neg > n) throw InputError("hermitian_with_inertia: inconsistent inertia");
    RVec v = RVec::Zero(n);
    for (int i = 0; i < pos; ++i) v[i] = uniform(rng, 0.5, 2.0);
    for (int i = 0; i < neg; ++i) v[pos + i] = -uniform(rng, 0.5, 2.0);
    const Mat basis = real ? random_orthogonal(n, rng) : random_unitary(n, rng);
    return with_eigenvalues(basis, v);
}

PolyPencil random_pencil(int n, int p, int q, Rng& rng) {
    if (n < 1 || p < 0 || q < 0 || (p == 0 && q == 0)) throw InputError("random_pencil: need n >= 1 and p + q >= 1");
    std::vector<double> g(static_cast<std::size_t>(q) + 1);
    for (int k = 0; k < q; ++k) g[k] = uniform(rng, -1, 1);
    g[q] = random_sign(rng) * uniform(rng, 0.5, 1.5);
    if (q == 0 && p > 0) g[0] = uniform(rng, -1, 1);
    std::vector<Mat> c;
    for (int k = 0; k < p; ++k) c.push_back(random_hermitian(n, rng));
    if (p >= q) {
        Mat lead = invertible_hermitian(n, rng);
        if (p == q) lead.diagonal().array() += g[q];
        c.push_back(lead);
    } else {
        c.push_back(random_hermitian(n, rng));
    }
    return PolyPencil(std::move(c), std::move(g));
}

PolyPencil random_pencil_for_row(TableRow row, int n, Rng& rng) {
    const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    int p = 0, q = 0, sign = 0;
    switch (row) {
        case TableRow::q_gt_p_even_pos:
        case TableRow::q_gt_p_even_neg:
            q = 2 * pick(1, 2);
            p = pick(0, q - 1);
            sign = row == TableRow::q_gt_p_even_pos ? 1 : -1;
            break;
        case TableRow::q_gt_p_odd_pos:
        case TableRow::q_gt_p_odd_neg:
            q = 2 * pick(0, 1) + 1;
            p = pick(0, q - 1);
            sign = row == TableRow::q_gt_p_odd_pos ? 1 : -1;
            break;
        case TableRow::q_lt_p:
            p = pick(1, 3);
            q = pick(0, p - 1);
            break;
        case TableRow::q_eq_p:
            p = q = pick(1, 3);
            break;
    }
    for (;;) {
        PolyPencil pencil = random_pencil(n, p, q, rng);
        if (sign == 0 || (pencil.g().back() > 0) == (sign > 0)) return pencil;
    }
}

EngineeredPencil engineered_quadratic(int n, int m, int eta, Rng& rng) {
    if (n < 2) throw InputError("engineered_quadratic: need n >= 2");
    if (m < 1 || m > 3) throw InputError("engineered_quadratic: order must be 1, 2 or 3");
    for (;;) {
        const Mat Q = random_unitary(n, rng);
        const Vec u = Q.col(0);
        RVec d(n);
        d[0] = 0.0;
        for (int i = 1; i < n; ++i) d[i] = uniform(rng, 0.5, 2.0);
        const Mat M = with_eigenvalues(Q, d);
        RVec dinv = d;
        dinv[0] = 1.0;
        for (int i = 1; i < n; ++i) dinv[i] = 1.0 / d[i];
        const Mat R = with_eigenvalues(Q, dinv);
        Mat L = random_hermitian(n, rng);
        L -= u.dot(L * u) * (u * u.adjoint());
        L = hermitian_part(L);
        const Vec Lu = L * u;
        const double t = Lu.dot(R * Lu).real();
        if (t < 1e-3) continue;
        if (m == 1) {
            L += eta * uniform(rng, 0.5, 1.5) * (u * u.adjoint());
        } else if (m == 2) {
            const double target = eta > 0 ? uniform(rng, 0.3, 0.7) : uniform(rng, 1.5, 2.5);
            L *= std::sqrt(target / t);
        } else {
            L /= std::sqrt(t);
            const Vec w = R * (L * u);
            const double val = w.dot(L * w).real();
            if (std::abs(val) < 0.05) continue;
            if ((val > 0) != (eta > 0)) L = -L;
        }
        L = hermitian_part(L);
        EngineeredPencil e{PolyPencil({M, L}, {0.0, 0.0, -1.0}), M, L, {m}};
        return e;
    }
}

EngineeredPencil engineered_coupled(int n, double a, Rng& rng) {
    if (n < 3) throw InputError("engineered_coupled: need n >= 3");
    for (;;) {
        const Mat Q = random_unitary(n, rng);
        const Mat P2 = Q.leftCols(2);
        RVec d(n);
        d[0] = d[1] = 0.0;
        for (int i = 2; i < n; ++i) d[i] = uniform(rng, 0.5, 2.0);
        const Mat M = with_eigenvalues(Q, d);
        RVec dinv = d;
        dinv[0] = dinv[1] = 1.0;
        for (int i = 2; i < n; ++i) dinv[i] = 1.0 / d[i];
        const Mat R = with_eigenvalues(Q, dinv);
        Mat L = random_hermitian(n, rng);
        L -= P2 * (P2.adjoint() * L * P2) * P2.adjoint();
        L = hermitian_part(L);
        const Vec q1 = Q.col(0), q2 = Q.col(1);
        const Vec Lq2 = L * q2;
        const double t = Lq2.dot(R * Lq2).real();
        if (t < 1e-3) continue;
        L /= std::sqrt(t);
        L += a * (q1 * q1.adjoint());
        L = hermitian_part(L);
        EngineeredPencil e{PolyPencil({M, L}, {0.0, 0.0, -1.0}), M, L, {1, 3}};
        return e;
    }
}

PolyPencil conjugate(const PolyPencil& pencil, const Mat& Q) {
    std::vector<Mat> c;
    for (const Mat& a : pencil.coeffs()) c.push_back(hermitian_part(Q.adjoint() * a * Q));
    return PolyPencil(std::move(c), pencil.g());
}

PolyPencil direct_sum(const PolyPencil& a, const PolyPencil& b) {
    if (a.g() != b.g()) throw InputError("direct_sum: g polynomials differ");
    const int p = std::max(a.p(), b.p());
    const int na = a.n(), nb = b.n();
    std::vector<Mat> c;
    for (int k = 0; k <= p; ++k) {
        Mat m = Mat::Zero(na + nb, na + nb);
        if (k <= a.p()) m.topLeftCorner(na, na) = a.coeffs()[k];
        if (k <= b.p()) m.bottomRightCorner(nb, nb) = b.coeffs()[k];
        c.push_back(m);
    }
    return PolyPencil(std::move(c), a.g());
}

HamiltonianProblem random_canonical(int m, int plus_pos, int plus_neg, int minus_pos, int minus_neg, Rng& rng) {
    const int zp = m - plus_pos - plus_neg, zm = m - minus_pos - minus_neg;
    if (zp < 0 || zm < 0 || zp + zm > m) throw InputError("random_canonical: inconsistent inertias");
    const Mat Q = random_orthogonal(m, rng);
    // Kernel of L_+ on the first zp basis vectors, of L_- on the next zm.
    RVec vp = RVec::Zero(m), vm = RVec::Zero(m);
    {
        std::vector<double> nz;
        for (int i = 0; i < plus_pos; ++i) nz.push_back(uniform(rng, 0.5, 2.0));
        for (int i = 0; i < plus_neg; ++i) nz.push_back(-uniform(rng, 0.5, 2.0));
        std::shuffle(nz.begin(), nz.end(), rng);
        for (int i = 0; i < m - zp; ++i) vp[zp + i] = nz[i];
    }
    {
        std::vector<double> nz;
        for (int i = 0; i < minus_pos; ++i) nz.push_back(uniform(rng, 0.5, 2.0));
        for (int i = 0; i < minus_neg; ++i) nz.push_back(-uniform(rng, 0.5, 2.0));
        std::shuffle(nz.begin(), nz.end(), rng);
        int t = 0;
        for (int i = 0; i < m; ++i)
            if (i < zp || i >= zp + zm) vm[i] = nz[t++];
    }
    return HamiltonianProblem::canonical(with_eigenvalues(Q, vp), with_eigenvalues(Q, vm));
}

}  // namespace krein
