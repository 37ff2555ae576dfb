#include <doctest.h>

#include <cmath>

#include "krein/hamiltonian.hpp"
#include "krein/random.hpp"
#include "oracles.hpp"

using namespace krein;

namespace {

Mat scalar(double v) { return Mat::Constant(1, 1, cplx(v, 0)); }

int unstable_count(const HamiltonianProblem& h) {
    int c = 0;
    for (const cplx& z : oracle::jl_eigenvalues(h.J(), h.L()))
        if (z.real() > 1e-8) ++c;
    return c;
}

}  // namespace

TEST_CASE("hand-checked 2x2 problems") {
    struct Case {
        double lp, lm;
        int k_r, n_L, k_i_minus;
    };
    for (const Case c : {Case{-1, 1, 1, 1, 0}, Case{1, 1, 0, 0, 0}, Case{-1, -1, 0, 2, 1}}) {
        const auto h = HamiltonianProblem::canonical(scalar(c.lp), scalar(c.lm));
        const Theorem1Result t = theorem1_check(h);
        REQUIRE(t.applicable);
        CHECK(t.k_r == c.k_r);
        CHECK(t.k_c == 0);
        CHECK(t.n_L == c.n_L);
        CHECK(t.n_D == 0);
        CHECK(t.k_i_minus == c.k_i_minus);
        CHECK(t.residual == 0);
    }
}

TEST_CASE("unstable count against a general eigensolver") {
    Rng rng(44);
    for (int t = 0; t < 20; ++t) {
        const int m = 2 + t % 4;
        const int pp = t % (m + 1), pm = (t / 2) % (m + 1);
        const auto h = random_canonical(m, pp, m - pp, pm, m - pm, rng);
        const JLSpectrum s = jl_spectrum(h);
        CHECK(s.n_uns == unstable_count(h));
        CHECK(s.reflection_ok);
        CHECK(s.k_r + 2 * s.k_c == s.n_uns);
    }
}

TEST_CASE("kappa_K equals the pencil signature on simple imaginary eigenvalues") {
    Rng rng(45);
    int seen = 0;
    for (int t = 0; t < 20; ++t) {
        const auto h = random_canonical(3, 2, 1, 3, 0, rng);
        const JLSpectrum s = jl_spectrum(h);
        for (const auto& ie : s.imaginary) {
            if (ie.geo_mult != 1 || ie.alg_mult != 1 || !ie.kappa_K) continue;
            ++seen;
            const int sign_K = *ie.kappa_K > 0 ? 1 : -1;
            CHECK(sign_K == ie.kappa_plus - ie.kappa_minus);
        }
    }
    CHECK(seen > 0);
}

TEST_CASE("theorems on random canonical problems") {
    Rng rng(46);
    int applied = 0;
    for (int t = 0; t < 30; ++t) {
        const int m = 1 + t % 5;
        auto pick = [&](int hi) { return static_cast<int>(rng() % static_cast<unsigned>(hi + 1)); };
        const int zp = pick(m / 2), zm = pick(m - zp);
        const int pp = pick(m - zp), mp = pick(m - zm);
        const auto h = random_canonical(m, pp, m - zp - pp, mp, m - zm - mp, rng);
        const Theorem1Result t1 = theorem1_check(h);
        if (t1.applicable) {
            ++applied;
            CHECK(t1.residual == 0);
        }
        const Theorem2Result t2 = theorem2_bound(h);
        CHECK(t2.holds);
        CHECK(t2.n_uns >= t2.k_r);
        CHECK(t2.k_r >= t2.lower_bound);
    }
    CHECK(applied > 10);
}

TEST_CASE("generalized kernel and kernel form") {
    // L = 0 on the first coordinate of each block: JL has a Jordan block at zero
    Mat lp = Mat::Identity(2, 2), lm = Mat::Identity(2, 2);
    lp(0, 0) = 0;
    const auto h = HamiltonianProblem::canonical(lp, lm);
    CHECK(generalized_kernel_dim(h) == 2);
    const KernelFormD d = kernel_form_d(h);
    CHECK(d.V_basis.cols() == 1);
    CHECK(d.n_D == 0);
}

TEST_CASE("theorem 2 needs canonical blocks") {
    Mat J(2, 2);
    J << 0, cplx(-1, 0), cplx(1, 0), 0;
    const HamiltonianProblem h(J, Mat::Identity(2, 2));
    CHECK_THROWS(theorem2_bound(h));
}
