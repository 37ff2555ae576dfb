#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "krein/linalg.hpp"
#include "krein/pencil.hpp"

namespace krein::detail {

struct RawSample {
    double lambda;
    RVec values;  // ascending
    Mat vectors;
};

// Branch-ordered eigenpairs at one lambda.
struct BranchState {
    double lambda = 0.0;
    RVec values;
    Mat vectors;
};

struct MatchResult {
    BranchState state;
    double min_overlap = 1.0;
    bool ambiguous = false;
};

class Eigensampler {
public:
    Eigensampler(const PolyPencil& pencil, std::optional<std::uint64_t> phase_seed);
    RawSample at(double lambda);

private:
    const PolyPencil& pencil_;
    std::optional<std::mt19937_64> rng_;
};

struct BranchEval {
    double mu;
    double dmu;
    Vec u;
};

double degenerate_tol(const PolyPencil& pencil, double lambda);
std::vector<std::vector<int>> clusters(const RVec& sorted_values, double tol);
MatchResult match_sample(const BranchState& from, const RawSample& to, double overlap_threshold, double deg_tol);
BranchState initial_state(const RawSample& s);
BranchEval follow_branch(Eigensampler& sampler, const PolyPencil& pencil, double x, const Vec& reference);

}  // namespace krein::detail
