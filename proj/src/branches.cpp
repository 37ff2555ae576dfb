#include "krein/branches.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "branch_internal.hpp"

namespace krein {

namespace detail {

Eigensampler::Eigensampler(const PolyPencil& pencil, std::optional<std::uint64_t> phase_seed)
    : pencil_(pencil) {
    if (phase_seed) rng_.emplace(*phase_seed);
}

RawSample Eigensampler::at(double lambda) {
    HermitianEigen e = solve_hermitian(pencil_.eval(lambda, 0));
    if (rng_) {
        std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
        for (Eigen::Index j = 0; j < e.vectors.cols(); ++j) e.vectors.col(j) *= std::polar(1.0, angle(*rng_));
    }
    return {lambda, std::move(e.values), std::move(e.vectors)};
}

double degenerate_tol(const PolyPencil& pencil, double lambda) {
    return 1e-10 * (1.0 + pencil.norm_bound(lambda));
}

std::vector<std::vector<int>> clusters(const RVec& sorted_values, double tol) {
    std::vector<std::vector<int>> out;
    for (Eigen::Index i = 0; i < sorted_values.size(); ++i) {
        if (!out.empty() && sorted_values[i] - sorted_values[out.back().back()] <= tol)
            out.back().push_back(static_cast<int>(i));
        else
            out.push_back({static_cast<int>(i)});
    }
    return out;
}

MatchResult match_sample(const BranchState& from, const RawSample& to, double overlap_threshold, double deg_tol) {
    const int n = static_cast<int>(to.values.size());
    const int k = static_cast<int>(from.vectors.cols());
    RMat weight = RMat::Zero(n, n);
    weight.topRows(k) = (from.vectors.adjoint() * to.vectors).cwiseAbs2();

    // Greedy first; optimal assignment when any greedy overlap is weak.
    std::vector<int> assign(k, -1);
    {
        RMat w = weight.topRows(k);
        std::vector<char> row_used(k, 0), col_used(n, 0);
        bool weak = false;
        for (int step = 0; step < k; ++step) {
            double best = -1.0;
            int bi = -1, bj = -1;
            for (int i = 0; i < k; ++i) {
                if (row_used[i]) continue;
                for (int j = 0; j < n; ++j)
                    if (!col_used[j] && w(i, j) > best) {
                        best = w(i, j);
                        bi = i;
                        bj = j;
                    }
            }
            row_used[bi] = col_used[bj] = 1;
            assign[bi] = bj;
            if (best < overlap_threshold) weak = true;
        }
        if (weak) {
            const std::vector<int> opt = max_weight_assignment(weight);
            for (int i = 0; i < k; ++i) assign[i] = opt[i];
        }
    }

    MatchResult r;
    r.state.lambda = to.lambda;
    r.state.values.resize(k);
    r.state.vectors.resize(to.vectors.rows(), k);
    for (int i = 0; i < k; ++i) {
        r.state.values[i] = to.values[assign[i]];
        r.state.vectors.col(i) = to.vectors.col(assign[i]);
    }

    // Degenerate clusters at the target: align the cluster basis to the
    // incoming vectors instead of trusting arbitrary eigensolver output.
    std::vector<int> inverse(n, -1);
    for (int i = 0; i < k; ++i) inverse[assign[i]] = i;
    std::vector<char> degenerate_target(n, 0);
    for (const auto& c : clusters(to.values, deg_tol)) {
        if (c.size() < 2) continue;
        std::vector<int> rows;
        std::vector<int> cols;
        for (int j : c) {
            degenerate_target[j] = 1;
            if (inverse[j] >= 0) {
                rows.push_back(inverse[j]);
                cols.push_back(j);
            }
        }
        if (rows.size() < 2) continue;
        const auto m = static_cast<Eigen::Index>(rows.size());
        Mat basis(to.vectors.rows(), m), target(to.vectors.rows(), m);
        for (Eigen::Index t = 0; t < m; ++t) {
            basis.col(t) = to.vectors.col(cols[t]);
            target.col(t) = from.vectors.col(rows[t]);
        }
        const Mat aligned = basis * procrustes(basis, target);
        for (Eigen::Index t = 0; t < m; ++t) r.state.vectors.col(rows[t]) = aligned.col(t);
    }

    // Degenerate clusters at the source make overlaps meaningless there.
    std::vector<char> degenerate_source(k, 0);
    {
        std::vector<int> order(k);
        for (int i = 0; i < k; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return from.values[a] < from.values[b]; });
        for (int t = 1; t < k; ++t)
            if (from.values[order[t]] - from.values[order[t - 1]] <= deg_tol)
                degenerate_source[order[t]] = degenerate_source[order[t - 1]] = 1;
    }

    r.min_overlap = 1.0;
    for (int i = 0; i < k; ++i) {
        Vec v = r.state.vectors.col(i);
        const cplx z = from.vectors.col(i).dot(v);
        if (std::abs(z) > 0) v *= std::conj(z) / std::abs(z);
        r.state.vectors.col(i) = v;
        const double ov = std::norm(from.vectors.col(i).dot(v));
        if (degenerate_target[assign[i]] || degenerate_source[i]) continue;
        r.min_overlap = std::min(r.min_overlap, ov);
    }
    r.ambiguous = r.min_overlap < overlap_threshold;
    return r;
}

BranchState initial_state(const RawSample& s) { return {s.lambda, s.values, s.vectors}; }

BranchEval follow_branch(Eigensampler& sampler, const PolyPencil& pencil, double x, const Vec& reference) {
    RawSample s = sampler.at(x);
    Eigen::Index best = 0;
    double best_ov = -1.0;
    for (Eigen::Index j = 0; j < s.vectors.cols(); ++j) {
        const double ov = std::norm(reference.dot(s.vectors.col(j)));
        if (ov > best_ov) {
            best_ov = ov;
            best = j;
        }
    }
    Vec u = s.vectors.col(best);
    const cplx z = reference.dot(u);
    if (std::abs(z) > 0) u *= std::conj(z) / std::abs(z);
    const double dmu = u.dot(pencil.eval(x, 1) * u).real();
    return {s.values[best], dmu, std::move(u)};
}

}  // namespace detail

using namespace detail;

namespace {

class Tracker {
public:
    Tracker(const PolyPencil& pencil, const TrackOptions& opt)
        : pencil_(pencil), opt_(opt), sampler_(pencil, opt.phase_seed) {}

    BranchFamily run(const std::vector<double>& samples) {
        if (samples.size() < 2) throw InputError("track_branches: need at least two samples");
        for (std::size_t i = 1; i < samples.size(); ++i)
            if (!(samples[i] > samples[i - 1])) throw InputError("track_branches: samples must be ascending");
        BranchState state = initial_state(sampler_.at(samples.front()));
        push(state);
        for (std::size_t i = 1; i < samples.size(); ++i) state = refine(state, sampler_.at(samples[i]), 0);
        family_.values.resize(static_cast<Eigen::Index>(values_.size()), values_.front().size());
        for (std::size_t k = 0; k < values_.size(); ++k)
            family_.values.row(static_cast<Eigen::Index>(k)) = values_[k].transpose();
        return std::move(family_);
    }

private:
    void push(const BranchState& s) {
        family_.grid.push_back(s.lambda);
        values_.push_back(s.values);
        family_.vectors.push_back(s.vectors);
    }

    bool dips(const BranchState& a, const BranchState& c, const BranchState& b) const {
        for (Eigen::Index j = 0; j < a.values.size(); ++j) {
            const double va = a.values[j], vc = c.values[j], vb = b.values[j];
            const bool same = (va > 0 && vc > 0 && vb > 0) || (va < 0 && vc < 0 && vb < 0);
            if (!same) continue;
            const double dev = std::abs(vc - 0.5 * (va + vb));
            const double floor = std::min({std::abs(va), std::abs(vb), std::abs(vc)});
            if (dev > 0.25 * floor) return true;
        }
        return false;
    }

    BranchState refine(const BranchState& a, const RawSample& b_raw, int depth) {
        const double deg = degenerate_tol(pencil_, b_raw.lambda);
        MatchResult ab = match_sample(a, b_raw, opt_.overlap_threshold, deg);
        const double width = b_raw.lambda - a.lambda;
        if (width <= opt_.refine_tol || depth >= opt_.max_depth) {
            if (ab.ambiguous) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "ambiguous branch matching on [%.17g, %.17g] (overlap %.3g)",
                              a.lambda, b_raw.lambda, ab.min_overlap);
                if (ab.min_overlap < 0.25) throw NumericalError(std::string("unresolvable crossing: ") + buf);
                family_.warnings.emplace_back(buf);
            }
            push(ab.state);
            return ab.state;
        }
        const RawSample c_raw = sampler_.at(0.5 * (a.lambda + b_raw.lambda));
        MatchResult ac = match_sample(a, c_raw, opt_.overlap_threshold, degenerate_tol(pencil_, c_raw.lambda));
        MatchResult cb = match_sample(ac.state, b_raw, opt_.overlap_threshold, deg);
        const bool again = ab.ambiguous || ac.ambiguous || cb.ambiguous || dips(a, ac.state, cb.state);
        if (!again) {
            push(ac.state);
            push(cb.state);
            return cb.state;
        }
        BranchState c = refine(a, c_raw, depth + 1);
        return refine(c, b_raw, depth + 1);
    }

    const PolyPencil& pencil_;
    TrackOptions opt_;
    Eigensampler sampler_;
    BranchFamily family_;
    std::vector<RVec> values_;
};

}  // namespace

BranchFamily track_branches(const PolyPencil& pencil, std::vector<double> samples, const TrackOptions& options) {
    Tracker t(pencil, options);
    return t.run(samples);
}

BranchFamily track_branches(const PolyPencil& pencil, const GridSpec& grid, const TrackOptions& options) {
    grid.validate();
    std::vector<double> s(static_cast<std::size_t>(grid.samples));
    for (int i = 0; i < grid.samples; ++i)
        s[i] = grid.lambda_min + (grid.lambda_max - grid.lambda_min) * i / (grid.samples - 1);
    TrackOptions opt = options;
    opt.refine_tol = grid.refine_tol;
    return track_branches(pencil, std::move(s), opt);
}

// ---------------------------------------------------------------------------
// Root finding

namespace {

struct RawRoot {
    double lambda;
    int branch;
    int order;  // estimated vanishing order of the located branch
};

double machine_width(double a, double b) {
    return 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::max(std::abs(a), std::abs(b)));
}

// Illinois regula falsi on a bracketed sign change of f.
template <class F>
double solve_bracket(F&& f, double a, double fa, double b, double fb) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    int side = 0;
    for (int it = 0; it < 200 && (b - a) > machine_width(a, b); ++it) {
        double x = (a * fb - b * fa) / (fb - fa);
        // Fall back to bisection when the secant point hugs an endpoint.
        const double w = b - a;
        if (!(x > a + 0.01 * w && x < b - 0.01 * w) && it % 3 == 2) x = 0.5 * (a + b);
        if (!(x > a && x < b)) x = 0.5 * (a + b);
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0) == (fa > 0)) {
            a = x;
            fa = fx;
            if (side == -1) fb *= 0.5;
            side = -1;
        } else {
            b = x;
            fb = fx;
            if (side == 1) fa *= 0.5;
            side = 1;
        }
    }
    return std::abs(fa) < std::abs(fb) ? a : b;
}

class RootFinder {
public:
    RootFinder(const PolyPencil& pencil, const BranchFamily& family, const RootSearchOptions& opt)
        : pencil_(pencil), family_(family), opt_(opt), sampler_(pencil, std::nullopt) {}

    std::vector<CharacteristicValue> run() {
        std::vector<RawRoot> raw;
        const int n = family_.n();
        const std::size_t ns = family_.size();
        for (int j = 0; j < n; ++j) {
            std::size_t run_best = ns, run_first = ns;
            for (std::size_t k = 0; k < ns; ++k) {
                const double v = family_.values(static_cast<Eigen::Index>(k), j);
                if (std::abs(v) <= pencil_.tau_zero(family_.grid[k])) {
                    // one candidate per run of zero samples
                    if (run_best == ns) run_first = k;
                    if (run_best == ns || std::abs(v) < std::abs(family_.values(static_cast<Eigen::Index>(run_best), j)))
                        run_best = k;
                    const bool last = k + 1 == ns || std::abs(family_.values(static_cast<Eigen::Index>(k + 1), j)) >
                                                         pencil_.tau_zero(family_.grid[k + 1]);
                    if (last) {
                        zero_run(j, run_first, k, run_best, raw);
                        run_best = ns;
                    }
                    continue;
                }
                if (k + 1 < ns) {
                    const double w = family_.values(static_cast<Eigen::Index>(k + 1), j);
                    if (std::abs(w) > pencil_.tau_zero(family_.grid[k + 1]) && (v > 0) != (w > 0))
                        raw.push_back({crossing(j, k), j, 1});
                }
                if (k > 0 && k + 1 < ns) tangency(j, k, raw);
            }
        }
        for (auto& r : raw) polish(r);
        return assemble(raw);
    }

private:
    double crossing(int j, std::size_t k) {
        const double a = family_.grid[k], b = family_.grid[k + 1];
        const Vec ua = family_.vectors[k].col(j), ub = family_.vectors[k + 1].col(j);
        auto f = [&](double x) {
            const Vec& ref = (x - a < b - x) ? ua : ub;
            return follow_branch(sampler_, pencil_, x, ref).mu;
        };
        return solve_bracket(f, a, family_.values(static_cast<Eigen::Index>(k), j), b,
                             family_.values(static_cast<Eigen::Index>(k + 1), j));
    }

    // Samples first..last of branch j are numerically zero. Bracket the run
    // by its nonzero neighbours: a sign change is a crossing, otherwise look
    // for the extremum of the branch.
    void zero_run(int j, std::size_t first, std::size_t last, std::size_t best, std::vector<RawRoot>& raw) {
        raw.push_back({family_.grid[best], j, 0});
        if (first == 0 || last + 1 >= family_.size()) return;
        const std::size_t ka = first - 1, kb = last + 1;
        const double a = family_.grid[ka], b = family_.grid[kb];
        const double va = family_.values(static_cast<Eigen::Index>(ka), j);
        const double vb = family_.values(static_cast<Eigen::Index>(kb), j);
        std::vector<std::pair<double, Vec>> refs;
        for (std::size_t k = ka; k <= kb; ++k) refs.emplace_back(family_.grid[k], family_.vectors[k].col(j));
        auto ref = [&](double x) -> const Vec& {
            std::size_t i = 0;
            for (std::size_t t = 1; t < refs.size(); ++t)
                if (std::abs(refs[t].first - x) < std::abs(refs[i].first - x)) i = t;
            return refs[i].second;
        };
        if ((va > 0) != (vb > 0)) {
            auto mu = [&](double x) { return follow_branch(sampler_, pencil_, x, ref(x)).mu; };
            raw.push_back({solve_bracket(mu, a, va, b, vb), j, 1});
            return;
        }
        auto dmu = [&](double x) { return follow_branch(sampler_, pencil_, x, ref(x)).dmu; };
        const double da = dmu(a), db = dmu(b);
        if ((da > 0) == (db > 0) || da == 0.0 || db == 0.0) return;
        raw.push_back({solve_bracket(dmu, a, da, b, db), j, 2});
    }

    void tangency(int j, std::size_t k, std::vector<RawRoot>& raw) {
        const auto K = static_cast<Eigen::Index>(k);
        const double vl = family_.values(K - 1, j), vc = family_.values(K, j), vr = family_.values(K + 1, j);
        const bool same = (vl > 0 && vc > 0 && vr > 0) || (vl < 0 && vc < 0 && vr < 0);
        if (!same || std::abs(vc) > std::abs(vl) || std::abs(vc) > std::abs(vr)) return;
        const double a = family_.grid[k - 1], c = family_.grid[k], b = family_.grid[k + 1];
        const Vec ua = family_.vectors[k - 1].col(j), uc = family_.vectors[k].col(j), ub = family_.vectors[k + 1].col(j);
        auto ref = [&](double x) -> const Vec& {
            const double da = std::abs(x - a), dc = std::abs(x - c), db = std::abs(x - b);
            return (da <= dc && da <= db) ? ua : (dc <= db ? uc : ub);
        };
        auto dmu = [&](double x) { return follow_branch(sampler_, pencil_, x, ref(x)).dmu; };
        const double da = dmu(a), db = dmu(b);
        if ((da > 0) == (db > 0) || da == 0.0 || db == 0.0) return;
        const double x = solve_bracket(dmu, a, da, b, db);
        const double mx = follow_branch(sampler_, pencil_, x, ref(x)).mu;
        if (std::abs(mx) <= pencil_.tau_zero(x)) {
            raw.push_back({x, j, 2});
            return;
        }
        if ((mx > 0) == (vc > 0)) return;
        // The branch dips through zero twice between samples.
        auto mu = [&](double t) { return follow_branch(sampler_, pencil_, t, ref(t)).mu; };
        raw.push_back({solve_bracket(mu, a, vl, x, mx), j, 1});
        raw.push_back({solve_bracket(mu, x, mx, b, vr), j, 1});
    }

    // Newton steps on mu^(m-1) for roots whose branches vanish to order >= 2.
    void polish(RawRoot& r) {
        const RawRoot start = r;
        newton_polish(r);
        if (r.lambda != start.lambda && zero_score(r.lambda).first < zero_score(start.lambda).first) r = start;
    }

    void newton_polish(RawRoot& r) {
        double x = r.lambda;
        double prev_step = 0.0;
        int prev_order = 0, floor_order = 0;
        for (int iter = 0; iter < 16; ++iter) {
            const RawSample s = sampler_.at(x);
            const double scale = 1.0 + pencil_.norm_bound(x);
            std::vector<int> near;
            for (Eigen::Index i = 0; i < s.values.size(); ++i)
                if (std::abs(s.values[i]) <= 1e-4 * scale) near.push_back(static_cast<int>(i));
            if (near.empty()) return;
            Mat q(s.vectors.rows(), static_cast<Eigen::Index>(near.size()));
            for (std::size_t t = 0; t < near.size(); ++t) q.col(static_cast<Eigen::Index>(t)) = s.vectors.col(near[t]);
            const RVec f = solve_hermitian(hermitian_part(q.adjoint() * pencil_.eval(x, 1) * q)).values;
            const double dscale = 1.0 + pencil_.norm_bound(x) + max_abs(pencil_.eval(x, 1));
            if (f.cwiseAbs().minCoeff() > 1e-5 * dscale) {
                r.order = std::max(r.order, 1);
                return;
            }
            const int count = static_cast<int>(near.size());
            const double h = opt_.fd_step * std::max(1.0, std::abs(x));
            const BranchDerivatives jets = local_jets(pencil_, x, count, std::min(count + 3, 7), h);
            int best_order = 0;
            const BranchJet* best = nullptr;
            for (const auto& jet : jets.branches) {
                if (std::abs(jet.mu[0]) > 1e-6 * scale) continue;
                const int m = jet.vanishing_order(1e-6 * scale);
                if (m > best_order) {
                    best_order = m;
                    best = &jet;
                }
            }
            if (best == nullptr || best_order < 2) {
                r.order = std::max(best_order, 1);
                return;
            }
            // halving steps: Newton sits on a multiple root of mu^(m-1)
            const int max_order = static_cast<int>(best->mu.size()) - 1;
            auto newton = [&](int m) { return std::clamp(-best->mu[m - 1] / best->mu[m], -h, h); };
            double step = newton(best_order);
            if (floor_order > best_order && floor_order <= max_order) {
                const double bumped = newton(floor_order);
                if (std::abs(bumped) <= 4.0 * std::abs(prev_step)) {
                    best_order = floor_order;
                    step = bumped;
                }
            }
            if (!std::isfinite(step)) return;
            r.order = best_order;
            if (prev_order == best_order && prev_step != 0.0 && std::abs(step) > 1e-9 * (1.0 + std::abs(x))) {
                const double ratio = step / prev_step;
                if (ratio > 0.3 && ratio < 0.8) floor_order = best_order + 1;
            }
            prev_step = step;
            prev_order = best_order;
            x += step;
            r.lambda = x;
            if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) return;
        }
    }

    std::vector<int> branch_ids_at(double x, int count) const {
        const auto& g = family_.grid;
        std::size_t k = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), x) - g.begin());
        k = std::clamp<std::size_t>(k, 1, g.size() - 1);
        const double t = std::clamp((x - g[k - 1]) / (g[k] - g[k - 1]), 0.0, 1.0);
        std::vector<std::pair<double, int>> mags;
        for (int j = 0; j < family_.n(); ++j) {
            const double v = (1 - t) * family_.values(static_cast<Eigen::Index>(k - 1), j) +
                             t * family_.values(static_cast<Eigen::Index>(k), j);
            mags.emplace_back(std::abs(v), j);
        }
        std::sort(mags.begin(), mags.end());
        std::vector<int> ids;
        for (int i = 0; i < count && i < static_cast<int>(mags.size()); ++i) ids.push_back(mags[i].second);
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    std::pair<int, double> zero_score(double x) {
        const RVec v = sampler_.at(x).values;
        const double tau = pencil_.tau_zero(x);
        int k = 0;
        double sum = 0.0;
        for (Eigen::Index t = 0; t < v.size(); ++t)
            if (std::abs(v[t]) <= tau) {
                ++k;
                sum += std::abs(v[t]);
            }
        return {k, sum};
    }

    bool kernel_persists(double a, double b) {
        if (zero_score(a).first == 0 || zero_score(b).first == 0) return false;
        for (double t : {0.25, 0.5, 0.75})
            if (zero_score(a + t * (b - a)).first == 0) return false;
        return true;
    }

    std::vector<CharacteristicValue> assemble(std::vector<RawRoot> raw) {
        std::sort(raw.begin(), raw.end(), [](const RawRoot& a, const RawRoot& b) { return a.lambda < b.lambda; });
        // Always probe lambda = 0: the global identities treat it specially.
        {
            const RVec v0 = sampler_.at(0.0).values;
            if (v0.cwiseAbs().minCoeff() <= pencil_.tau_zero(0.0) && family_.grid.front() <= 0.0 &&
                family_.grid.back() >= 0.0) {
                raw.push_back({0.0, -1, 0});
                std::sort(raw.begin(), raw.end(),
                          [](const RawRoot& a, const RawRoot& b) { return a.lambda < b.lambda; });
            }
        }
        std::vector<CharacteristicValue> out;
        std::size_t i = 0;
        while (i < raw.size()) {
            std::size_t j = i + 1;
            while (j < raw.size() && (raw[j].lambda - raw[j - 1].lambda <=
                                          opt_.cluster_tol * (1.0 + std::abs(raw[j].lambda)) ||
                                      kernel_persists(raw[j - 1].lambda, raw[j].lambda)))
                ++j;
            // Representative: most zero eigenvalues, then smallest residual;
            // an exact zero probe wins outright.
            std::size_t rep = i;
            std::pair<int, double> best{-1, 0.0};
            for (std::size_t t = i; t < j; ++t) {
                if (raw[t].branch < 0) {
                    rep = t;
                    break;
                }
                const auto sc = zero_score(raw[t].lambda);
                const bool higher = raw[t].order > raw[rep].order;
                const bool same = raw[t].order == raw[rep].order;
                if (sc.first > best.first ||
                    (sc.first == best.first && (higher || (same && sc.second < best.second)))) {
                    best = sc;
                    rep = t;
                }
            }
            double lambda0 = raw[rep].lambda;
            const double zero_tau = pencil_.tau_zero(0.0);
            if (std::abs(lambda0) <= opt_.cluster_tol &&
                sampler_.at(0.0).values.cwiseAbs().minCoeff() <= zero_tau)
                lambda0 = 0.0;
            const RVec vals = sampler_.at(lambda0).values;
            int k = 0;
            for (Eigen::Index t = 0; t < vals.size(); ++t)
                if (std::abs(vals[t]) <= pencil_.tau_zero(lambda0)) ++k;
            if (k > 0 && lambda0 >= family_.grid.front() && lambda0 <= family_.grid.back()) {
                if (!out.empty() && std::abs(out.back().lambda0 - lambda0) <= opt_.cluster_tol * (1.0 + std::abs(lambda0))) {
                    i = j;
                    continue;
                }
                CharacteristicValue cv;
                cv.lambda0 = lambda0;
                cv.geo_mult = k;
                cv.branch_ids = branch_ids_at(lambda0, k);
                out.push_back(std::move(cv));
            }
            i = j;
        }
        return out;
    }

    const PolyPencil& pencil_;
    const BranchFamily& family_;
    RootSearchOptions opt_;
    Eigensampler sampler_;
};

}  // namespace

std::vector<CharacteristicValue> find_characteristic_values(const PolyPencil& pencil, const BranchFamily& family,
                                                            const RootSearchOptions& options) {
    if (family.size() < 2) throw InputError("find_characteristic_values: family has fewer than two samples");
    RootFinder f(pencil, family, options);
    return f.run();
}

// ---------------------------------------------------------------------------

int BranchJet::vanishing_order(double threshold) const {
    for (std::size_t r = 1; r < mu.size(); ++r)
        if (std::abs(mu[r]) / factorial(static_cast<int>(r)) > threshold) return static_cast<int>(r);
    return 0;
}

BranchDerivatives branch_derivatives(const PolyPencil& pencil, const BranchFamily& family,
                                     const CharacteristicValue& cv, int max_order, double fd_step) {
    if (cv.geo_mult < 1) throw InputError("branch_derivatives: characteristic value has no kernel");
    if (max_order < 0) max_order = cv.geo_mult + 2;
    const double h = fd_step * std::max(1.0, std::abs(cv.lambda0));
    BranchDerivatives d = local_jets(pencil, cv.lambda0, cv.geo_mult, max_order, h);

    // Attach family branch ids by overlap at the nearest sample.
    if (!family.grid.empty() && !cv.branch_ids.empty()) {
        const auto it = std::lower_bound(family.grid.begin(), family.grid.end(), cv.lambda0);
        std::size_t k = static_cast<std::size_t>(it - family.grid.begin());
        if (k == family.grid.size()) --k;
        if (k > 0 && std::abs(family.grid[k - 1] - cv.lambda0) < std::abs(family.grid[k] - cv.lambda0)) --k;
        const int m = static_cast<int>(d.branches.size());
        const int c = static_cast<int>(cv.branch_ids.size());
        const int dim = std::max(m, c);
        RMat w = RMat::Zero(dim, dim);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < c; ++b)
                w(a, b) = std::norm(d.branches[a].u[0].dot(family.vectors[k].col(cv.branch_ids[b])));
        const std::vector<int> assign = max_weight_assignment(w);
        for (int a = 0; a < m; ++a)
            d.branches[a].branch_id = assign[a] < c ? cv.branch_ids[assign[a]] : -1;
    }
    return d;
}

std::string branches_to_csv(const BranchFamily& family) {
    std::string out = "lambda,branch,mu";
    const int n = family.n();
    for (int i = 0; i < n; ++i) out += ",re_u_" + std::to_string(i) + ",im_u_" + std::to_string(i);
    out += '\n';
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (std::size_t k = 0; k < family.size(); ++k) {
        for (int j = 0; j < n; ++j) {
            out += num(family.grid[k]) + ',' + std::to_string(j) + ',' +
                   num(family.values(static_cast<Eigen::Index>(k), j));
            for (int i = 0; i < n; ++i) {
                const cplx z = family.vectors[k](i, j);
                out += ',' + num(z.real()) + ',' + num(z.imag());
            }
            out += '\n';
        }
    }
    return out;
}

}  // namespace krein
