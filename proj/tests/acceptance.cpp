// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "krein/hamiltonian.hpp"
#include "krein/index_counts.hpp"
#include "krein/krein.hpp"
#include "krein/random.hpp"
#include "krein/report.hpp"
#include "oracles.hpp"

using namespace krein;

namespace {

struct Outcome {
    int checked = 0;
    int failed = 0;
    std::string first_failure;

    void check(bool ok, const std::string& what) {
        ++checked;
        if (ok) return;
        if (failed == 0) first_failure = what;
        ++failed;
    }
    bool pass() const { return failed == 0 && checked > 0; }
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Pencils and reports gathered for the cross-cutting criteria.
struct Analyzed {
    PolyPencil pencil;
    IndexReport report;
};
std::vector<Analyzed> random_pool;
std::vector<Analyzed> kernel_pool;

void report_line(int id, const std::string& title, const Outcome& o, const std::string& extra = "") {
    std::printf("criterion %d: %s  %s (%d checks%s%s)%s%s\n", id, o.pass() ? "PASS" : "FAIL", title.c_str(), o.checked,
                o.failed ? ", failed " : "", o.failed ? std::to_string(o.failed).c_str() : "",
                extra.empty() ? "" : "  ", extra.c_str());
    if (o.failed) std::printf("    first failure: %s\n", o.first_failure.c_str());
    std::fflush(stdout);
}

PolyPencil seeded_pencil(std::uint64_t seed) {
    Rng rng(seed);
    const int n = 1 + static_cast<int>(rng() % 6);
    int p = static_cast<int>(rng() % 4);
    const int q = static_cast<int>(rng() % 5);
    if (p == 0 && q == 0) p = 1;
    return random_pencil(n, p, q, rng);
}

bool analyze_into(const PolyPencil& P, const AnalysisOptions& o, Outcome& out, const std::string& tag,
                  IndexReport& r) {
    try {
        r = analyze_pencil(P, o);
        return true;
    } catch (const std::exception& e) {
        out.check(false, tag + ": " + e.what());
        return false;
    }
}

// ---------------------------------------------------------------------------

bool criterion1() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t s = 0; s < 200; ++s) {
        const PolyPencil P = seeded_pencil(1000 + s);
        IndexReport r;
        const std::string tag = "pencil seed " + std::to_string(1000 + s);
        if (!analyze_into(P, {}, o, tag, r)) continue;
        o.check(r.residual_eq1 == 0 && r.residual_eq2 == 0,
                tag + fmt(": eq1 %g eq2 %g", r.residual_eq1, r.residual_eq2));
        random_pool.push_back({P, r});
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(secs < 60.0, fmt("runtime %.1f s", secs));
    report_line(1, "global index identities on 200 random pencils", o, fmt("%.2f s", secs));
    return o.pass();
}

bool criterion2() {
    Outcome o;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const PolyPencil P = seeded_pencil(5000 + s);
        AnalysisOptions opt;
        opt.local_pairs = 20;
        opt.seed = s;
        IndexReport r;
        const std::string tag = "pencil seed " + std::to_string(5000 + s);
        if (!analyze_into(P, opt, o, tag, r)) continue;
        o.check(r.local_checks.size() == 20, tag + ": wrong number of endpoint pairs");
        for (const auto& lc : r.local_checks)
            o.check(lc.residual == 0, tag + fmt(": residual %g on [%.6g, %.6g]", lc.residual, lc.lambda1, lc.lambda2));
        random_pool.push_back({P, r});
    }
    report_line(2, "local index identity, 50 pencils x 20 endpoint pairs", o);
    return o.pass();
}

bool criterion3() {
    Outcome o;
    for (int t = 0; t < 50; ++t) {
        const int m = 1 + t % 3;
        const int eta = (t / 3) % 2 ? -1 : 1;
        const int n = 2 + t % 5;
        Rng rng(static_cast<std::uint64_t>(7000 + t));
        const EngineeredPencil e = engineered_quadratic(n, m, eta, rng);
        const std::string tag = "engineered #" + std::to_string(t) + fmt(" (m=%g eta=%g)", m, eta);
        try {
            const KernelRecursionState st = kernel_recursion(e.pencil, 0.0);
            const BranchDerivatives d = local_jets(e.pencil, 0.0, 1, m + 1, 1e-2);
            const BranchJet& jet = d.branches.at(0);
            const double mum = jet.mu[static_cast<std::size_t>(m)];
            const int order = jet.vanishing_order(1e-5);
            o.check(order == m, tag + fmt(": vanishing order %g", order));
            const auto [gp, gm] = graphical_krein(m, mum > 0 ? 1 : -1);
            const int kappa_graph = gp - gm;
            const int kappa_rec = krein_signature_of_cv(st).kappa;
            const RootChain chain = chain_from_jet(e.pencil, 0.0, jet, m);
            const int kappa_gram = gram_matrix_quadratic(e.L, chain, 1e-9).kappa;
            o.check(kappa_graph == kappa_rec && kappa_rec == kappa_gram,
                    tag + fmt(": graphical %g recursion %g gram %g", kappa_graph, kappa_rec, kappa_gram));
            if (m == 3) {
                const LocalOperators ops = local_operators(e.pencil, 0.0);
                const Vec u = jet.u[0] / jet.u[0].norm();
                const Vec pu1 = ops.Pi * jet.u[1];
                const double lhs =
                    u.dot(lambda_operator(ops, 3) * u).real() - pu1.dot(e.L * pu1).real();
                const double rhs = mum / 6.0;
                o.check((lhs > 0) == (rhs > 0), tag + ": pd10 sign mismatch");
                o.check(std::abs(lhs - rhs) <= 1e-4 * std::abs(rhs), tag + fmt(": pd10 %.10g vs %.10g", lhs, rhs));
            }
            IndexReport r;
            if (analyze_into(e.pencil, {}, o, tag, r)) kernel_pool.push_back({e.pencil, r});
        } catch (const std::exception& ex) {
            o.check(false, tag + ": " + ex.what());
        }
    }
    report_line(3, "graphical, Gram and recursion signatures agree on 50 engineered pencils", o);
    return o.pass();
}

// Compare each recursion level with the branches that survive to it.
void diagonal_identity(const PolyPencil& P, Outcome& o, const std::string& tag) {
    const KernelRecursionState st = kernel_recursion(P, 0.0);
    const int levels = static_cast<int>(st.form_eigenvalues.size());
    const BranchDerivatives d = local_jets(P, 0.0, st.geo_mult(), levels + 1, 1e-2);
    for (int m = 1; m <= levels; ++m) {
        const RVec& ev = st.form_eigenvalues[static_cast<std::size_t>(m - 1)];
        std::vector<std::pair<double, const BranchJet*>> rank;
        for (const auto& b : d.branches) {
            double lower = 0;
            for (int r = 1; r < m; ++r) lower = std::max(lower, std::abs(b.mu[static_cast<std::size_t>(r)]));
            rank.emplace_back(lower, &b);
        }
        std::sort(rank.begin(), rank.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<double> form, fd, err;
        for (Eigen::Index i = 0; i < ev.size(); ++i) form.push_back(ev[i] * factorial(m));
        std::vector<std::pair<double, double>> branch;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            const BranchJet* b = rank.at(static_cast<std::size_t>(i)).second;
            branch.emplace_back(b->mu[static_cast<std::size_t>(m)], b->mu_err[static_cast<std::size_t>(m)]);
        }
        std::sort(form.begin(), form.end());
        std::sort(branch.begin(), branch.end());
        for (std::size_t i = 0; i < form.size(); ++i) {
            const double diff = std::abs(form[i] - branch[i].first);
            const double bound = std::max(branch[i].second, 1e-12);
            o.check(diff <= bound, tag + fmt(": level %g form %.10g vs fd", m, form[i]) +
                                       fmt(" %.10g (err %.2g)", branch[i].first, branch[i].second));
            if (std::abs(branch[i].first) > 1e-3)
                o.check(branch[i].second <= 1e-5 * std::abs(branch[i].first),
                        tag + fmt(": fd error %.2g too large at level %g", branch[i].second, m));
        }
    }
}

bool criterion4() {
    Outcome o;
    for (int t = 0; t < 30; ++t) {
        const int m = 2 + t % 2;
        Rng rng(static_cast<std::uint64_t>(7500 + t));
        const EngineeredPencil e = engineered_quadratic(2 + t % 5, m, t % 4 < 2 ? 1 : -1, rng);
        const std::string tag = "quadratic #" + std::to_string(t);
        try {
            diagonal_identity(e.pencil, o, tag);
        } catch (const std::exception& ex) {
            o.check(false, tag + ": " + ex.what());
        }
    }
    for (int t = 0; t < 10; ++t) {
        Rng rng(static_cast<std::uint64_t>(7800 + t));
        const EngineeredPencil e = engineered_coupled(3 + t % 4, t % 2 ? 0.6 + 0.1 * t : -0.5 - 0.1 * t, rng);
        const std::string tag = "coupled #" + std::to_string(t);
        try {
            diagonal_identity(e.pencil, o, tag);
            IndexReport r;
            if (analyze_into(e.pencil, {}, o, tag, r)) kernel_pool.push_back({e.pencil, r});
        } catch (const std::exception& ex) {
            o.check(false, tag + ": " + ex.what());
        }
    }
    report_line(4, "diagonal identity against finite-difference derivatives", o);
    return o.pass();
}

bool criterion5() {
    Outcome o;
    const TableRow rows[] = {TableRow::q_gt_p_even_pos, TableRow::q_gt_p_even_neg, TableRow::q_gt_p_odd_pos,
                             TableRow::q_gt_p_odd_neg,  TableRow::q_lt_p,          TableRow::q_eq_p};
    for (int i = 0; i < 6; ++i) {
        for (int t = 0; t < 10; ++t) {
            Rng rng(static_cast<std::uint64_t>(8000 + 100 * i + t));
            const PolyPencil P = random_pencil_for_row(rows[i], 1 + t % 5, rng);
            const std::string tag = fmt("row %g pencil %g", i, t);
            try {
                const double K = compute_K_infinity(P);
                const auto table = z_at_infinity(P);
                const auto scan = z_at_infinity_scan(P, K);
                o.check(table == scan, tag + fmt(": table (%g,%g)", table.first, table.second) +
                                           fmt(" scan (%g,%g)", scan.first, scan.second));
                IndexReport r;
                if (analyze_into(P, {}, o, tag, r)) random_pool.push_back({P, r});
            } catch (const std::exception& ex) {
                o.check(false, tag + ": " + ex.what());
            }
        }
    }
    report_line(5, "asymptotic table equals the direct count at +-K, 6 rows x 10 pencils", o);
    return o.pass();
}

bool criterion6() {
    Outcome o;
    std::vector<const Analyzed*> all;
    for (const auto& a : random_pool) all.push_back(&a);
    for (const auto& a : kernel_pool) all.push_back(&a);
    for (std::size_t i = 0; i < all.size(); ++i) {
        const PolyPencil& P = all[i]->pencil;
        const IndexReport& r = all[i]->report;
        const std::string tag = "pencil " + std::to_string(i);
        try {
            const auto comp = companion_real_roots(P);
            o.check(comp.size() == r.cvs.size(),
                    tag + fmt(": %g companion roots vs %g characteristic values", comp.size(), r.cvs.size()));
            if (comp.size() != r.cvs.size()) continue;
            for (std::size_t k = 0; k < comp.size(); ++k) {
                o.check(std::abs(comp[k].value.real() - r.cvs[k].lambda0) <= 1e-8,
                        tag + fmt(": root %.15g vs %.15g", comp[k].value.real(), r.cvs[k].lambda0));
                o.check(comp[k].multiplicity == r.cvs[k].alg_mult,
                        tag + fmt(": multiplicity %g vs %g", comp[k].multiplicity, r.cvs[k].alg_mult));
            }
        } catch (const std::exception& ex) {
            o.check(false, tag + ": " + ex.what());
        }
    }
    report_line(6, "companion oracle matches characteristic values bijectively", o,
                std::to_string(all.size()) + " pencils");
    return o.pass();
}

bool criterion7() {
    Outcome o;
    Mat one = Mat::Constant(1, 1, 1.0);
    struct Hand {
        double lp, lm;
    };
    for (const Hand h : {Hand{-1, 1}, Hand{1, 1}, Hand{-1, -1}}) {
        const auto prob = HamiltonianProblem::canonical(h.lp * one, h.lm * one);
        const Theorem1Result t = theorem1_check(prob);
        const std::string tag = fmt("hand case L=diag(%g,%g)", h.lp, h.lm);
        o.check(t.applicable && t.residual == 0, tag + ": " + t.reason);
        IndexReport r;
        if (analyze_into(prob.pencil(), {}, o, tag, r)) kernel_pool.push_back({prob.pencil(), r});
    }
    {
        // expected splits 1 = 1 - 0 - 0, 0 = 0, 0 = 2 - 0 - 2
        const auto a = theorem1_check(HamiltonianProblem::canonical(-one, one));
        const auto b = theorem1_check(HamiltonianProblem::canonical(one, one));
        const auto c = theorem1_check(HamiltonianProblem::canonical(-one, -one));
        o.check(a.k_r == 1 && a.n_L == 1 && a.n_D == 0 && a.k_i_minus == 0, "hand case 1 terms");
        o.check(b.k_r == 0 && b.n_L == 0 && b.k_i_minus == 0, "hand case 2 terms");
        o.check(c.k_r == 0 && c.n_L == 2 && c.n_D == 0 && c.k_i_minus == 1, "hand case 3 terms");
    }
    Rng rng(9000);
    auto pick = [&](int hi) { return static_cast<int>(rng() % static_cast<unsigned>(hi + 1)); };
    int applied = 0, tried = 0;
    while (applied < 100 && tried < 2000) {
        ++tried;
        const int m = 1 + pick(4);
        const int zp = pick(m / 2), zm = pick(m - zp);
        const int pp = pick(m - zp), mp = pick(m - zm);
        const auto h = random_canonical(m, pp, m - zp - pp, mp, m - zm - mp, rng);
        try {
            const Theorem1Result t = theorem1_check(h);
            if (!t.applicable) continue;
            ++applied;
            o.check(t.residual == 0, fmt("theorem 1 problem %g: residual %g", tried, t.residual));
            if (applied % 4 == 0) {
                IndexReport r;
                if (analyze_into(h.pencil(), {}, o, "hamiltonian pencil", r)) kernel_pool.push_back({h.pencil(), r});
            }
        } catch (const std::exception& ex) {
            o.check(false, fmt("theorem 1 problem %g: ", tried) + ex.what());
        }
    }
    o.check(applied == 100, fmt("only %g of %g problems passed the gate", applied, tried));
    for (int t = 0; t < 100; ++t) {
        const int m = 1 + pick(4);
        const int zp = pick(m / 2), zm = pick(m - zp);
        const int pp = pick(m - zp), mp = pick(m - zm);
        const auto h = random_canonical(m, pp, m - zp - pp, mp, m - zm - mp, rng);
        try {
            const Theorem2Result r = theorem2_bound(h);
            o.check(r.holds && r.k_r >= r.lower_bound && r.n_uns >= r.k_r,
                    fmt("theorem 2 problem %g: k_r %g bound %g", t, r.k_r, r.lower_bound));
        } catch (const std::exception& ex) {
            o.check(false, fmt("theorem 2 problem %g: ", t) + ex.what());
        }
    }
    report_line(7, "Hamiltonian counts: 3 hand cases, 100 + 100 random canonical problems", o,
                fmt("%g gated of %g tried", applied, tried));
    return o.pass();
}

bool criterion8() {
    Outcome o;
    int cvs = 0;
    for (const auto* pool : {&random_pool, &kernel_pool})
        for (const auto& a : *pool) {
            for (int k : a.report.kernel_residuals) o.check(k == 0, "kernel residual in report");
            for (const auto& cv : a.report.cvs) {
                ++cvs;
                o.check(kernel_identity_residual(cv) == 0, fmt("kernel identity fails at %.15g", cv.lambda0));
                o.check(z_local(cv) == LocalZ{cv.Zdown_left, cv.Zdown_right, cv.Zup_left, cv.Zup_right},
                        fmt("local Z counts inconsistent at %.15g", cv.lambda0));
            }
        }
    report_line(8, "kernel identities at every characteristic value", o, std::to_string(cvs) + " values");
    return o.pass();
}

std::vector<int> cv_counts(const CharacteristicValue& cv) {
    std::vector<int> v{cv.geo_mult, cv.alg_mult, cv.kappa_plus, cv.kappa_minus,
                       cv.Zdown_left, cv.Zdown_right, cv.Zup_left, cv.Zup_right};
    for (const auto& k : cv.Kcounts) {
        v.push_back(k.first);
        v.push_back(k.second);
    }
    return v;
}

std::vector<int> translation_counts(const IndexReport& r) {
    std::vector<int> v{r.Z_minus_inf, r.Z_plus_inf};
    for (const auto& cv : r.cvs) {
        const auto c = cv_counts(cv);
        v.insert(v.end(), c.begin(), c.end());
    }
    return v;
}

std::vector<int> all_counts(const IndexReport& r) {
    std::vector<int> v = translation_counts(r);
    v.insert(v.end(), {r.n_L0, r.Z0_plus, r.Z0_minus, r.sum_kappa, r.sum_sign_kappa, r.residual_eq1, r.residual_eq2});
    return v;
}

bool same_positions(const IndexReport& a, const IndexReport& b, double shift) {
    if (a.cvs.size() != b.cvs.size()) return false;
    for (std::size_t i = 0; i < a.cvs.size(); ++i)
        if (std::abs(a.cvs[i].lambda0 - shift - b.cvs[i].lambda0) > 1e-9 * (1.0 + std::abs(a.cvs[i].lambda0)))
            return false;
    return true;
}

bool criterion9() {
    Outcome o;
    for (std::uint64_t s = 0; s < 40; ++s) {
        Rng rng(s);
        const PolyPencil P = s < 30 ? seeded_pencil(1000 + s) : engineered_quadratic(3, 1 + s % 3, 1, rng).pencil;
        const std::string tag = "pencil " + std::to_string(s);
        IndexReport base;
        if (!analyze_into(P, {}, o, tag, base)) continue;

        IndexReport again;
        if (analyze_into(P, {}, o, tag, again))
            o.check(dump_json(report_to_json(base)) == dump_json(report_to_json(again)), tag + ": output not deterministic");

        AnalysisOptions phased;
        phased.phase_seed = 77 + s;
        IndexReport ph;
        if (analyze_into(P, phased, o, tag + " phases", ph))
            o.check(all_counts(ph) == all_counts(base) && same_positions(base, ph, 0.0), tag + ": phase re-gauging changed counts");

        for (double c : {0.25, 4.0}) {
            IndexReport sc;
            if (analyze_into(P.scaled(c), {}, o, tag + " scaled", sc))
                o.check(all_counts(sc) == all_counts(base) && same_positions(base, sc, 0.0),
                        tag + fmt(": scaling by %g changed counts", c));
        }
        for (double c : {0.37, -1.15}) {
            IndexReport tr;
            if (analyze_into(P.shifted(c), {}, o, tag + " shifted", tr)) {
                o.check(same_positions(base, tr, c), tag + fmt(": translation by %g moved values inexactly", c));
                o.check(translation_counts(tr) == translation_counts(base),
                        tag + fmt(": translation by %g changed counts", c));
            }
        }
    }
    report_line(9, "determinism, phase, scaling and translation invariance", o);
    return o.pass();
}

}  // namespace

int main() {
    std::setvbuf(stdout, nullptr, _IOLBF, 0);
    bool ok = true;
    ok &= criterion1();
    ok &= criterion2();
    ok &= criterion3();
    ok &= criterion4();
    ok &= criterion5();
    ok &= criterion6();
    ok &= criterion7();
    ok &= criterion8();
    ok &= criterion9();
    std::printf("%s\n", ok ? "all criteria passed" : "some criteria failed");
    return ok ? 0 : 1;
}
