#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "krein/linalg.hpp"
#include "krein/pencil.hpp"

namespace krein {

/// Eigenvalue branches mu_j(lambda) and unit eigenvectors u_j(lambda) sampled
/// on an ascending grid. Column j of every sample follows one analytic branch;
/// consecutive vectors of a branch have a real non-negative inner product.
struct BranchFamily {
    std::vector<double> grid;
    RMat values;               // values(k, j) = mu_j(grid[k])
    std::vector<Mat> vectors;  // vectors[k].col(j) = u_j(grid[k])
    std::vector<std::string> warnings;

    int n() const { return static_cast<int>(values.cols()); }
    std::size_t size() const { return grid.size(); }
};

struct TrackOptions {
    double refine_tol = 1e-7;
    int max_depth = 20;
    double overlap_threshold = 0.75;
    /// When set, every eigensolver output is multiplied by random unit phases
    /// drawn from this seed (gauge-invariance testing).
    std::optional<std::uint64_t> phase_seed;
};

/// Uniform initial grid from `grid`, adaptively refined.
BranchFamily track_branches(const PolyPencil& pencil, const GridSpec& grid, const TrackOptions& options = {});
/// Explicit ascending initial samples, adaptively refined.
BranchFamily track_branches(const PolyPencil& pencil, std::vector<double> samples, const TrackOptions& options);

/// Real characteristic value and its local counts. Count fields are filled
/// by the Krein and index stages; find_characteristic_values only sets
/// lambda0, geo_mult and branch_ids.
struct CharacteristicValue {
    double lambda0 = 0.0;
    int geo_mult = 0;
    std::vector<int> branch_ids;
    /// Kcounts[m-1] = (|K_m^+|, |K_m^-|)
    std::vector<std::pair<int, int>> Kcounts;
    int alg_mult = 0;
    int kappa_plus = 0;
    int kappa_minus = 0;
    int Zdown_left = 0;
    int Zdown_right = 0;
    int Zup_left = 0;
    int Zup_right = 0;

    int kappa() const { return kappa_plus - kappa_minus; }
};

struct RootSearchOptions {
    /// Separation below which roots are merged, relative: tau * (1 + |lambda|).
    double cluster_tol = 1e-6;
    /// Base finite-difference step for polishing higher-order roots.
    double fd_step = 1e-2;
};

/// Locates every real characteristic value covered by the family: sign
/// changes are bracketed and refined on the branch value, tangencies are
/// found at local minima of |mu_j|; roots of higher vanishing order are
/// polished with finite-difference Newton steps on mu^(m-1).
std::vector<CharacteristicValue> find_characteristic_values(const PolyPencil& pencil, const BranchFamily& family,
                                                            const RootSearchOptions& options = {});

/// Derivative data of one branch vanishing at lambda0.
struct BranchJet {
    int branch_id = -1;
    std::vector<double> mu;      // mu^(r)(lambda0), r = 0..max_order
    std::vector<double> mu_err;  // extrapolation error estimates
    std::vector<Vec> u;          // u^(r)(lambda0), gauge (u(lambda0), u(lambda)) > 0
    std::vector<double> u_err;

    /// Smallest r >= 1 whose derivative exceeds `threshold` in magnitude
    /// (0 when none up to max_order).
    int vanishing_order(double threshold) const;
};

struct BranchDerivatives {
    double lambda0 = 0.0;
    double step = 0.0;
    int max_order = 0;
    std::vector<BranchJet> branches;
    bool reliable = true;
};

/// Jets of the `count` branches closest to zero near x, from Richardson
/// extrapolated central-difference stencils at steps h, h/2, h/4.
BranchDerivatives local_jets(const PolyPencil& pencil, double x, int count, int max_order, double h);

/// Jets of the branches vanishing at cv.lambda0; branch ids are matched to
/// the family by eigenvector overlap at the nearest sample. A negative
/// max_order selects geo_mult + 2.
BranchDerivatives branch_derivatives(const PolyPencil& pencil, const BranchFamily& family,
                                     const CharacteristicValue& cv, int max_order = -1, double fd_step = 1e-2);

/// Eigencurve CSV: header "lambda,branch,mu,re_u_0,im_u_0,...", 17 significant digits.
std::string branches_to_csv(const BranchFamily& family);

}  // namespace krein
