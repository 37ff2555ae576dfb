#include <doctest.h>

#include <cmath>

#include "krein/random.hpp"

using namespace krein;

TEST_CASE("seeded generators are deterministic") {
    Rng a(99), b(99);
    const PolyPencil p = random_pencil(4, 2, 3, a);
    const PolyPencil q = random_pencil(4, 2, 3, b);
    for (int k = 0; k <= 3; ++k) CHECK(max_abs(p.combined_coeff(k) - q.combined_coeff(k)) == 0.0);
    CHECK(p.g() == q.g());
}

TEST_CASE("hermitian and unitary generators") {
    Rng rng(1);
    const Mat h = random_hermitian(5, rng);
    CHECK(max_abs(h - h.adjoint()) == 0.0);
    CHECK(max_abs(h) <= std::sqrt(2.0));
    const Mat s = random_real_symmetric(4, rng);
    CHECK(max_abs(s.imag()) == 0.0);
    const Mat u = random_unitary(5, rng);
    CHECK(max_abs(u.adjoint() * u - Mat::Identity(5, 5)) < 1e-13);
    const Mat o = random_orthogonal(5, rng);
    CHECK(max_abs(o.imag()) == 0.0);
    CHECK(max_abs(o.transpose() * o - Mat::Identity(5, 5)) < 1e-13);
}

TEST_CASE("prescribed inertia") {
    Rng rng(2);
    for (int pos = 0; pos <= 3; ++pos)
        for (int neg = 0; neg + pos <= 4; ++neg) {
            const Inertia in = inertia(hermitian_with_inertia(4, pos, neg, rng), 1e-10);
            CHECK(in.positive == pos);
            CHECK(in.negative == neg);
            CHECK(in.zero == 4 - pos - neg);
        }
    CHECK_THROWS_AS(hermitian_with_inertia(3, 2, 2, rng), InputError);
}

TEST_CASE("random pencil shape and leading coefficient") {
    Rng rng(3);
    for (int t = 0; t < 30; ++t) {
        const int n = 1 + t % 6, p = t % 4, q = 1 + t % 4;
        const PolyPencil P = random_pencil(n, p, q, rng);
        CHECK(P.n() == n);
        CHECK(P.p() == p);
        CHECK(P.q() == q);
        const double gq = P.g().back();
        CHECK(std::abs(gq) >= 0.5);
        CHECK(std::abs(gq) <= 1.5);
        if (q <= p) {
            const RVec ev = solve_hermitian(P.combined_coeff(p)).values;
            CHECK(ev.cwiseAbs().minCoeff() >= 0.3 - 1e-12);
            CHECK(ev.cwiseAbs().maxCoeff() <= 2.0 + 1e-12);
        }
    }
}

TEST_CASE("table rows are hit") {
    Rng rng(4);
    for (int t = 0; t < 5; ++t) {
        PolyPencil a = random_pencil_for_row(TableRow::q_gt_p_even_pos, 3, rng);
        CHECK((a.q() > a.p() && a.q() % 2 == 0 && a.g().back() > 0));
        PolyPencil b = random_pencil_for_row(TableRow::q_gt_p_even_neg, 3, rng);
        CHECK((b.q() > b.p() && b.q() % 2 == 0 && b.g().back() < 0));
        PolyPencil c = random_pencil_for_row(TableRow::q_gt_p_odd_pos, 3, rng);
        CHECK((c.q() > c.p() && c.q() % 2 == 1 && c.g().back() > 0));
        PolyPencil d = random_pencil_for_row(TableRow::q_gt_p_odd_neg, 3, rng);
        CHECK((d.q() > d.p() && d.q() % 2 == 1 && d.g().back() < 0));
        PolyPencil e = random_pencil_for_row(TableRow::q_lt_p, 3, rng);
        CHECK(e.q() < e.p());
        PolyPencil f = random_pencil_for_row(TableRow::q_eq_p, 3, rng);
        CHECK(f.q() == f.p());
    }
}

TEST_CASE("engineered pencils have a kernel at zero") {
    Rng rng(5);
    for (int m = 1; m <= 3; ++m) {
        const EngineeredPencil e = engineered_quadratic(4, m, 1, rng);
        CHECK(e.orders == std::vector<int>{m});
        CHECK(inertia(e.pencil.eval(0.0), 1e-10).zero == 1);
        CHECK(max_abs(e.pencil.combined_coeff(2) - Mat::Identity(4, 4)) == 0.0);
    }
    const EngineeredPencil c = engineered_coupled(5, 0.5, rng);
    CHECK(inertia(c.pencil.eval(0.0), 1e-10).zero == 2);
    CHECK(c.orders == std::vector<int>{1, 3});
}

TEST_CASE("unitary conjugation and direct sums") {
    Rng rng(6);
    const PolyPencil P = random_pencil(3, 2, 1, rng);
    const Mat U = random_unitary(3, rng);
    const PolyPencil C = conjugate(P, U);
    for (double x : {-1.0, 0.3}) {
        const RVec a = solve_hermitian(P.eval(x)).values, b = solve_hermitian(C.eval(x)).values;
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
    }
    const PolyPencil Q = random_pencil(2, 1, 1, rng);
    const PolyPencil D = direct_sum(P, PolyPencil(Q.coeffs(), P.g()));
    CHECK(D.n() == 5);
    CHECK(max_abs(D.eval(0.7).topLeftCorner(3, 3) - P.eval(0.7)) < 1e-13);
    CHECK(max_abs(D.eval(0.7).topRightCorner(3, 2)) == 0.0);
}

TEST_CASE("random canonical problems") {
    Rng rng(7);
    const auto h = random_canonical(4, 1, 2, 2, 1, rng);
    REQUIRE(h.blocks().has_value());
    const Inertia ip = inertia(h.blocks()->L_plus, 1e-10), im = inertia(h.blocks()->L_minus, 1e-10);
    CHECK(ip.positive == 1);
    CHECK(ip.negative == 2);
    CHECK(im.positive == 2);
    CHECK(im.negative == 1);
    CHECK(max_abs(h.L().imag()) == 0.0);
    CHECK_THROWS_AS(random_canonical(2, 0, 0, 0, 1, rng), InputError);
}
