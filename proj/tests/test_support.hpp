#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "pdtomo/linalg.hpp"
#include "pdtomo/pd.hpp"
#include "pdtomo/rng.hpp"

namespace test_support {

using pdtomo::linalg::RealMatrix;

inline RealMatrix random_matrix(pdtomo::rng::Stream& stream, int rows,
                                int cols) {
    RealMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            m(r, c) = stream.normal();
        }
    }
    return m;
}

inline RealMatrix random_orthogonal(pdtomo::rng::Stream& stream, int n) {
    const RealMatrix g = random_matrix(stream, n, n);
    Eigen::HouseholderQR<RealMatrix> qr(g);
    RealMatrix q = qr.householderQ();
    return q;
}

inline double max_corner_condition(const pdtomo::pd::Square& s) {
    return std::max({pdtomo::linalg::condition_estimate(s.a),
                     pdtomo::linalg::condition_estimate(s.b),
                     pdtomo::linalg::condition_estimate(s.c),
                     pdtomo::linalg::condition_estimate(s.d)});
}

// rank <= r by construction: the product of a tall and a wide factor.
// Corners are kept invertible (the PD needs them); resample otherwise.
inline RealMatrix rank_deficient_square(pdtomo::rng::Stream& stream, int r) {
    while (true) {
        const RealMatrix p = random_matrix(stream, 2 * r, r);
        const RealMatrix w = random_matrix(stream, r, 2 * r);
        const RealMatrix m = p * w;
        const pdtomo::pd::Square square =
            pdtomo::pd::assemble_square(m, "rank-deficient");
        if (max_corner_condition(square) < 1e4) {
            return m;
        }
    }
}

// Generic full-rank draw: the smallest singular value is required to stay a
// fixed fraction of the largest so the instance is genuinely far from the
// rank-r set.
inline RealMatrix full_rank_square(pdtomo::rng::Stream& stream, int r) {
    while (true) {
        const RealMatrix m = random_matrix(stream, 2 * r, 2 * r);
        Eigen::JacobiSVD<RealMatrix> svd(m);
        const auto& sv = svd.singularValues();
        if (sv(r) < 0.1 * sv(0)) {
            continue;
        }
        const pdtomo::pd::Square square =
            pdtomo::pd::assemble_square(m, "full-rank");
        if (max_corner_condition(square) < 1e4) {
            return m;
        }
    }
}

// (r+1)x(r+1) of rank <= r with a well-conditioned interior block.
inline RealMatrix rank_deficient_plus_one(pdtomo::rng::Stream& stream, int r) {
    while (true) {
        const RealMatrix p = random_matrix(stream, r + 1, r);
        const RealMatrix w = random_matrix(stream, r, r + 1);
        const RealMatrix s = p * w;
        if (r >= 2 &&
            !(pdtomo::linalg::condition_estimate(s.block(1, 1, r - 1, r - 1)) <
              1e3)) {
            continue;
        }
        const pdtomo::linalg::SchurCorners schur =
            pdtomo::linalg::schur_complement(s);
        const double scale = s.cwiseAbs().maxCoeff();
        if (std::abs(schur.a_over_m) < 1e-3 * scale ||
            std::abs(schur.d_over_m) < 1e-3 * scale) {
            continue;
        }
        return s;
    }
}

inline RealMatrix full_rank_plus_one(pdtomo::rng::Stream& stream, int r) {
    while (true) {
        const RealMatrix s = random_matrix(stream, r + 1, r + 1);
        Eigen::JacobiSVD<RealMatrix> svd(s);
        const auto& sv = svd.singularValues();
        if (sv(r) < 0.1 * sv(0)) {
            continue;
        }
        if (r >= 2 &&
            !(pdtomo::linalg::condition_estimate(s.block(1, 1, r - 1, r - 1)) <
              1e3)) {
            continue;
        }
        const pdtomo::linalg::SchurCorners schur =
            pdtomo::linalg::schur_complement(s);
        const double scale = s.cwiseAbs().maxCoeff();
        if (std::abs(schur.a_over_m) < 1e-3 * scale ||
            std::abs(schur.d_over_m) < 1e-3 * scale) {
            continue;
        }
        return s;
    }
}

}  // namespace test_support
