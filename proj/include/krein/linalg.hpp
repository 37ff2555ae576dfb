#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace krein {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invariant-violating input.
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed (non-convergence, ambiguous rank, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A theorem hypothesis is not met by the input.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

struct HermitianEigen {
    RVec values;   // ascending
    Mat vectors;   // orthonormal columns
};

/// Dense Hermitian eigendecomposition; throws NumericalError on non-convergence.
HermitianEigen solve_hermitian(const Mat& a);

/// Inertia counts of a Hermitian matrix with an absolute zero threshold.
struct Inertia {
    int positive = 0;
    int negative = 0;
    int zero = 0;
};
Inertia inertia(const RVec& eigenvalues, double threshold);
Inertia inertia(const Mat& hermitian, double threshold);

double max_abs(const Mat& a);
Mat hermitian_part(const Mat& a);

/// Orthonormal basis of the numerical kernel: right singular vectors whose
/// singular value is <= threshold.
Mat kernel_basis(const Mat& a, double threshold);

/// Orthonormal basis of span(a) (columns), rank decided by `threshold` on the
/// singular values.
Mat orthonormal_range(const Mat& a, double threshold);

/// Maximum-weight perfect assignment on a square weight matrix.
/// Returns assign[row] = column.
std::vector<int> max_weight_assignment(const RMat& weight);

/// Unitary Q minimising ||a Q - b||_F over unitary Q (square, a and b with the
/// same shape).
Mat procrustes(const Mat& a, const Mat& b);

int factorial(int k);
double binomial(int n, int k);

}  // namespace krein
