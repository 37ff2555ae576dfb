#include <algorithm>
#include <cmath>
#include <map>

#include "branch_internal.hpp"
#include "krein/branches.hpp"

namespace krein {

using namespace detail;

namespace {

// Fornberg weights: w[r][i] is the weight of nodes[i] in the r-th derivative at 0.
std::vector<std::vector<double>> fd_weights(const std::vector<double>& nodes, int max_order) {
    const int n = static_cast<int>(nodes.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(max_order + 1, 0.0));
    c[0][0] = 1.0;
    double c1 = 1.0, c4 = nodes[0];
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, max_order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i];
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<std::vector<double>> w(max_order + 1, std::vector<double>(n));
    for (int r = 0; r <= max_order; ++r)
        for (int i = 0; i < n; ++i) w[r][i] = c[i][r];
    return w;
}

}  // namespace

BranchDerivatives local_jets(const PolyPencil& pencil, double x, int count, int max_order, double h) {
    if (count < 1 || count > pencil.n()) throw InputError("local_jets: branch count out of range");
    if (max_order < 0) throw InputError("local_jets: negative derivative order");
    if (!(h > 0)) throw InputError("local_jets: step must be positive");

    const int N = std::max(4, max_order / 2 + 3);
    const int levels = 3;
    std::vector<double> unit;
    for (int j = -N; j <= N; ++j)
        if (j != 0) unit.push_back(static_cast<double>(j));
    const auto weights = fd_weights(unit, std::max(max_order, 0));

    std::vector<double> steps(levels);
    for (int l = 0; l < levels; ++l) steps[l] = h / static_cast<double>(1 << l);

    std::vector<double> pos, neg;
    for (int l = 0; l < levels; ++l)
        for (int j = 1; j <= N; ++j) {
            pos.push_back(steps[l] * j);
            neg.push_back(-steps[l] * j);
        }
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    std::sort(neg.begin(), neg.end(), std::greater<double>());
    neg.erase(std::unique(neg.begin(), neg.end()), neg.end());

    Eigensampler sampler(pencil, std::nullopt);
    std::map<double, BranchState> track;

    BranchState start;
    {
        RawSample s = sampler.at(x + pos.front());
        std::vector<int> idx(s.values.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return std::abs(s.values[a]) < std::abs(s.values[b]); });
        idx.resize(count);
        std::sort(idx.begin(), idx.end());
        start.lambda = s.lambda;
        start.values.resize(count);
        start.vectors.resize(s.vectors.rows(), count);
        for (int i = 0; i < count; ++i) {
            start.values[i] = s.values[idx[i]];
            start.vectors.col(i) = s.vectors.col(idx[i]);
        }
    }
    track[pos.front()] = start;
    BranchState prev = start;
    for (std::size_t i = 1; i < pos.size(); ++i) {
        const double t = pos[i];
        prev = match_sample(prev, sampler.at(x + t), 0.75, degenerate_tol(pencil, x + t)).state;
        track[t] = prev;
    }
    prev = start;
    for (double t : neg) {
        prev = match_sample(prev, sampler.at(x + t), 0.75, degenerate_tol(pencil, x + t)).state;
        track[t] = prev;
    }

    // Gauge: (u(x), u(x+t)) real and positive, u(x) interpolated from the finest stencil.
    for (int pass = 0; pass < 2; ++pass) {
        for (int b = 0; b < count; ++b) {
            Vec u0 = Vec::Zero(pencil.n());
            for (std::size_t i = 0; i < unit.size(); ++i)
                u0 += weights[0][i] * track.at(steps[levels - 1] * unit[i]).vectors.col(b);
            if (u0.norm() == 0) continue;
            u0.normalize();
            for (auto& [t, st] : track) {
                const cplx z = u0.dot(st.vectors.col(b));
                if (std::abs(z) > 0) st.vectors.col(b) *= std::conj(z) / std::abs(z);
            }
        }
    }

    const double eps = 1e-15;
    const double noise_mu = eps * (1.0 + pencil.norm_bound(std::abs(x) + N * h));
    const double noise_u = 1e-13;

    BranchDerivatives out;
    out.lambda0 = x;
    out.step = h;
    out.max_order = max_order;
    out.branches.resize(count);
    for (int b = 0; b < count; ++b) {
        BranchJet& jet = out.branches[b];
        jet.mu.assign(max_order + 1, 0.0);
        jet.mu_err.assign(max_order + 1, 0.0);
        jet.u.assign(max_order + 1, Vec::Zero(pencil.n()));
        jet.u_err.assign(max_order + 1, 0.0);
        for (int r = 0; r <= max_order; ++r) {
            std::vector<double> dmu(levels);
            std::vector<Vec> du(levels, Vec::Zero(pencil.n()));
            double wsum = 0.0;
            for (double w : weights[r]) wsum += std::abs(w);
            for (int l = 0; l < levels; ++l) {
                double acc = 0.0;
                for (std::size_t i = 0; i < unit.size(); ++i) {
                    const BranchState& st = track.at(steps[l] * unit[i]);
                    acc += weights[r][i] * st.values[b];
                    du[l] += weights[r][i] * st.vectors.col(b);
                }
                const double scale = std::pow(steps[l], r);
                dmu[l] = acc / scale;
                du[l] /= scale;
            }
            const int p = 2 * N - r;
            const double f = 1.0 / (std::pow(2.0, p) - 1.0);
            const double r1 = dmu[1] + (dmu[1] - dmu[0]) * f;
            const double r2 = dmu[2] + (dmu[2] - dmu[1]) * f;
            const Vec v1 = du[1] + (du[1] - du[0]) * f;
            const Vec v2 = du[2] + (du[2] - du[1]) * f;
            const double round = wsum / std::pow(steps[levels - 1], r);
            jet.mu[r] = r2;
            jet.mu_err[r] = std::abs(r2 - r1) + noise_mu * round;
            jet.u[r] = v2;
            jet.u_err[r] = (v2 - v1).cwiseAbs().maxCoeff() + noise_u * round;
            if (jet.mu_err[r] > 1e-5 * std::max(1.0, std::abs(r2))) out.reliable = false;
        }
    }
    return out;
}

}  // namespace krein
