#include "krein/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace krein {

HermitianEigen solve_hermitian(const Mat& a) {
    if (a.rows() != a.cols()) throw InputError("solve_hermitian: matrix is not square");
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    if (es.info() != Eigen::Success)
        throw NumericalError("solve_hermitian: eigensolver did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

Inertia inertia(const RVec& eigenvalues, double threshold) {
    Inertia in;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        if (eigenvalues[i] > threshold)
            ++in.positive;
        else if (eigenvalues[i] < -threshold)
            ++in.negative;
        else
            ++in.zero;
    }
    return in;
}

Inertia inertia(const Mat& hermitian, double threshold) {
    if (hermitian.size() == 0) return {};
    return inertia(solve_hermitian(hermitian_part(hermitian)).values, threshold);
}

double max_abs(const Mat& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

Mat kernel_basis(const Mat& a, double threshold) {
    const Eigen::Index n = a.cols();
    if (n == 0) return Mat(0, 0);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const RVec& s = svd.singularValues();
    // Singular values are sorted descending; rows < cols pads with zeros.
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > threshold) ++rank;
    return svd.matrixV().rightCols(n - rank);
}

Mat orthonormal_range(const Mat& a, double threshold) {
    if (a.cols() == 0) return Mat(a.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
    const RVec& s = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > threshold) ++rank;
    return svd.matrixU().leftCols(rank);
}

// Shortest augmenting path (Jonker-Volgenant style) on cost = -weight.
std::vector<int> max_weight_assignment(const RMat& weight) {
    const int n = static_cast<int>(weight.rows());
    if (weight.cols() != n) throw InputError("max_weight_assignment: weight matrix must be square");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = -weight(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> assign(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) assign[p[j] - 1] = j - 1;
    return assign;
}

Mat procrustes(const Mat& a, const Mat& b) {
    // argmin ||aQ - b|| = polar factor of a^* b
    Eigen::JacobiSVD<Mat> svd(a.adjoint() * b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

int factorial(int k) {
    int f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

}  // namespace krein
