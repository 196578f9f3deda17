#pragma once

#include <Eigen/Dense>
#include <vector>

namespace pdtomo::linalg {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultKappaMax = 1e8;
inline constexpr double kDefaultRankTol = 1e-10;

struct RankReport {
    std::vector<double> singular_values;  // nonincreasing
    int numerical_rank = 0;
    double tolerance_used = 0.0;  // relative to the largest singular value
};

/// sigma_max / sigma_min; +inf for a singular or empty matrix.
double condition_estimate(const RealMatrix& m);

/// Inverse of a square matrix, guarded by a condition-number cap.
RealMatrix invert(const RealMatrix& m, double kappa_max = kDefaultKappaMax);

/// Rank as the number of singular values above tol * sigma_1.
RankReport numerical_rank(const RealMatrix& m, double tol = kDefaultRankTol);

double determinant(const RealMatrix& m);

struct SchurCorners {
    double a_over_m = 0.0;
    double b_over_m = 0.0;
    double c_over_m = 0.0;
    double d_over_m = 0.0;
};

// Border partition of an (r+1)x(r+1) matrix: first and last row/column are
// the border (a, beta^T, b / alpha, M, delta / c, gamma^T, d), the interior
// block is M. Returns the four scalar complements a - beta^T M^-1 alpha etc.
// A 2x2 input has an empty M and the complements are the corner entries.
SchurCorners schur_complement(const RealMatrix& s,
                              double kappa_max = kDefaultKappaMax);

double max_abs(const RealMatrix& m);
bool all_finite(const RealMatrix& m);

}  // namespace pdtomo::linalg
