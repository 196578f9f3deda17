#include "pdtomo/linalg.hpp"

#include <cmath>
#include <limits>

#include "pdtomo/errors.hpp"

namespace pdtomo::linalg {

double condition_estimate(const RealMatrix& m) {
    if (m.size() == 0) {
        return std::numeric_limits<double>::infinity();
    }
    Eigen::JacobiSVD<RealMatrix> svd(m);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return sv(0) / smin;
}

RealMatrix invert(const RealMatrix& m, double kappa_max) {
    if (m.rows() != m.cols()) {
        throw NonSquareError("invert requires a square matrix");
    }
    if (m.size() == 0) {
        throw EmptyMatrixError("invert on an empty matrix");
    }
    const double kappa = condition_estimate(m);
    if (!(kappa <= kappa_max)) {
        throw IllConditionedError(
            "matrix condition " + std::to_string(kappa) + " exceeds cap " +
                std::to_string(kappa_max),
            kappa);
    }
    return m.partialPivLu().inverse();
}

RankReport numerical_rank(const RealMatrix& m, double tol) {
    if (m.size() == 0) {
        throw EmptyMatrixError("numerical_rank on an empty matrix");
    }
    if (!(tol > 0.0 && tol < 1.0)) {
        throw Error("rank tolerance must lie in (0, 1)");
    }
    Eigen::JacobiSVD<RealMatrix> svd(m);
    const auto& sv = svd.singularValues();
    RankReport report;
    report.tolerance_used = tol;
    report.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double cutoff = tol * sv(0);
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) {
            ++report.numerical_rank;
        }
    }
    return report;
}

double determinant(const RealMatrix& m) {
    if (m.rows() != m.cols()) {
        throw NonSquareError("determinant requires a square matrix");
    }
    if (m.size() == 0) {
        throw EmptyMatrixError("determinant on an empty matrix");
    }
    return m.determinant();
}

SchurCorners schur_complement(const RealMatrix& s, double kappa_max) {
    if (s.rows() != s.cols()) {
        throw NonSquareError("border partition requires a square matrix");
    }
    const Eigen::Index n = s.rows();
    if (n < 2) {
        throw Error("border partition needs at least a 2x2 matrix");
    }
    SchurCorners out;
    const Eigen::Index r = n - 2;  // interior size
    if (r == 0) {
        out.a_over_m = s(0, 0);
        out.b_over_m = s(0, 1);
        out.c_over_m = s(1, 0);
        out.d_over_m = s(1, 1);
        return out;
    }
    const RealMatrix interior = s.block(1, 1, r, r);
    const double kappa = condition_estimate(interior);
    if (!(kappa <= kappa_max)) {
        throw IllConditionedError(
            "interior block condition " + std::to_string(kappa) +
                " exceeds cap " + std::to_string(kappa_max),
            kappa);
    }
    Eigen::PartialPivLU<RealMatrix> lu(interior);
    const Eigen::VectorXd alpha = s.block(1, 0, r, 1);
    const Eigen::VectorXd delta = s.block(1, n - 1, r, 1);
    const Eigen::RowVectorXd beta = s.block(0, 1, 1, r);
    const Eigen::RowVectorXd gamma = s.block(n - 1, 1, 1, r);
    const Eigen::VectorXd m_inv_alpha = lu.solve(alpha);
    const Eigen::VectorXd m_inv_delta = lu.solve(delta);
    out.a_over_m = s(0, 0) - beta * m_inv_alpha;
    out.b_over_m = s(0, n - 1) - beta * m_inv_delta;
    out.c_over_m = s(n - 1, 0) - gamma * m_inv_alpha;
    out.d_over_m = s(n - 1, n - 1) - gamma * m_inv_delta;
    return out;
}

double max_abs(const RealMatrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    return m.cwiseAbs().maxCoeff();
}

bool all_finite(const RealMatrix& m) {
    return m.allFinite();
}

}  // namespace pdtomo::linalg
