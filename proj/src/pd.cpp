#include "pdtomo/pd.hpp"

#include <cmath>
#include <utility>

#include "pdtomo/errors.hpp"

namespace pdtomo::pd {

namespace {

void score(PDResult& result) {
    const RealMatrix deviation =
        result.delta - RealMatrix::Identity(result.delta.rows(),
                                            result.delta.cols());
    result.frobenius_score = deviation.norm();
    result.max_abs_score = linalg::max_abs(deviation);
}

}  // namespace

Square assemble_square(const RealMatrix& m, std::string provenance) {
    if (m.rows() != m.cols()) {
        throw NonSquareError("square assembly requires a square matrix");
    }
    if (m.rows() % 2 != 0 || m.rows() == 0) {
        throw OddDimensionError("square assembly requires even dimensions");
    }
    const Eigen::Index r = m.rows() / 2;
    Square out;
    out.a = m.topLeftCorner(r, r);
    out.b = m.topRightCorner(r, r);
    out.c = m.bottomLeftCorner(r, r);
    out.d = m.bottomRightCorner(r, r);
    out.provenance = std::move(provenance);
    return out;
}

PDResult partial_determinant(const Square& s, double kappa_max) {
    PDResult result;
    result.corner_conditions = {linalg::condition_estimate(s.a),
                                linalg::condition_estimate(s.b),
                                linalg::condition_estimate(s.c),
                                linalg::condition_estimate(s.d)};
    if (!(result.corner_conditions[0] <= kappa_max)) {
        throw IllConditionedCornerError('A', result.corner_conditions[0]);
    }
    if (!(result.corner_conditions[3] <= kappa_max)) {
        throw IllConditionedCornerError('D', result.corner_conditions[3]);
    }
    result.delta = s.a.partialPivLu().solve(s.b) *
                   s.d.partialPivLu().solve(s.c);
    score(result);
    return result;
}

std::array<PDResult, 8> pd_variants(const Square& s, double kappa_max) {
    const std::array<double, 4> kappas = {linalg::condition_estimate(s.a),
                                          linalg::condition_estimate(s.b),
                                          linalg::condition_estimate(s.c),
                                          linalg::condition_estimate(s.d)};
    const char names[4] = {'A', 'B', 'C', 'D'};
    for (int i = 0; i < 4; ++i) {
        if (!(kappas[i] <= kappa_max)) {
            throw IllConditionedCornerError(names[i], kappas[i]);
        }
    }
    const RealMatrix ai = s.a.partialPivLu().inverse();
    const RealMatrix bi = s.b.partialPivLu().inverse();
    const RealMatrix ci = s.c.partialPivLu().inverse();
    const RealMatrix di = s.d.partialPivLu().inverse();
    std::array<PDResult, 8> out;
    out[0].delta = ai * s.b * di * s.c;
    out[1].delta = s.b * di * s.c * ai;
    out[2].delta = di * s.c * ai * s.b;
    out[3].delta = s.c * ai * s.b * di;
    out[4].delta = ci * s.d * bi * s.a;
    out[5].delta = s.d * bi * s.a * ci;
    out[6].delta = bi * s.a * ci * s.d;
    out[7].delta = s.a * ci * s.d * bi;
    for (PDResult& result : out) {
        result.corner_conditions = kappas;
        score(result);
    }
    return out;
}

Square gauge_transform(const Square& s, const RealMatrix& l1,
                       const RealMatrix& l2, const RealMatrix& r1,
                       const RealMatrix& r2) {
    for (const RealMatrix* t : {&l1, &l2, &r1, &r2}) {
        if (t->rows() != t->cols() || t->rows() != s.a.rows()) {
            throw SingularTransformError("transform blocks must match the corner size");
        }
        if (std::abs(t->determinant()) == 0.0) {
            throw SingularTransformError("transform block is singular");
        }
    }
    Square out;
    out.a = l1 * s.a * r1;
    out.b = l1 * s.b * r2;
    out.c = l2 * s.c * r1;
    out.d = l2 * s.d * r2;
    out.provenance = s.provenance;
    return out;
}

TrivialityReport triviality_test(const PDResult& result, double threshold) {
    if (!(threshold > 0.0)) {
        throw Error("triviality threshold must be positive");
    }
    TrivialityReport report;
    report.trivial = result.frobenius_score <= threshold;
    report.frobenius_score = result.frobenius_score;
    report.max_abs_score = result.max_abs_score;
    report.threshold = threshold;
    report.corner_conditions = result.corner_conditions;
    return report;
}

double shots_aware_threshold(int r, std::uint64_t shots) {
    return 10.0 * static_cast<double>(r) /
           std::sqrt(static_cast<double>(shots));
}

RealMatrix embed_plus_one(const RealMatrix& s) {
    if (s.rows() != s.cols()) {
        throw NonSquareError("border embedding requires a square matrix");
    }
    const Eigen::Index n = s.rows();
    if (n < 2) {
        throw Error("border embedding needs at least a 2x2 matrix");
    }
    const Eigen::Index r = n - 1;
    const Eigen::Index k = r - 1;  // interior size
    RealMatrix out(2 * r, 2 * r);
    // Top border row, doubled interior columns, then the right border.
    out(0, 0) = s(0, 0);
    out.block(0, 1, 1, k) = s.block(0, 1, 1, k);
    out.block(0, 1 + k, 1, k) = s.block(0, 1, 1, k);
    out(0, 2 * r - 1) = s(0, n - 1);
    // Doubled interior rows.
    for (int copy = 0; copy < 2; ++copy) {
        const Eigen::Index row0 = 1 + copy * k;
        out.block(row0, 0, k, 1) = s.block(1, 0, k, 1);
        out.block(row0, 1, k, k) = s.block(1, 1, k, k);
        out.block(row0, 1 + k, k, k) = s.block(1, 1, k, k);
        out.block(row0, 2 * r - 1, k, 1) = s.block(1, n - 1, k, 1);
    }
    // Bottom border row.
    out(2 * r - 1, 0) = s(n - 1, 0);
    out.block(2 * r - 1, 1, 1, k) = s.block(n - 1, 1, 1, k);
    out.block(2 * r - 1, 1 + k, 1, k) = s.block(n - 1, 1, 1, k);
    out(2 * r - 1, 2 * r - 1) = s(n - 1, n - 1);
    return out;
}

Translations translation_matrices(const RealMatrix& s, double kappa_max) {
    if (s.rows() != s.cols() || s.rows() < 2) {
        throw NonSquareError("translation matrices need a square matrix of size >= 2");
    }
    const Eigen::Index n = s.rows();
    const Eigen::Index r = n - 1;
    const Eigen::Index k = r - 1;
    Translations t;
    t.alpha = RealMatrix::Identity(r, r);
    t.beta = RealMatrix::Identity(r, r);
    t.gamma = RealMatrix::Identity(r, r);
    t.delta = RealMatrix::Identity(r, r);
    if (k == 0) {
        return t;
    }
    const RealMatrix interior = s.block(1, 1, k, k);
    const double kappa = linalg::condition_estimate(interior);
    if (!(kappa <= kappa_max)) {
        throw IllConditionedError("interior block is ill-conditioned", kappa);
    }
    const RealMatrix interior_inv = interior.partialPivLu().inverse();
    const Eigen::VectorXd alpha_vec = s.block(1, 0, k, 1);
    const Eigen::VectorXd delta_vec = s.block(1, n - 1, k, 1);
    const Eigen::RowVectorXd beta_vec = s.block(0, 1, 1, k);
    const Eigen::RowVectorXd gamma_vec = s.block(n - 1, 1, 1, k);
    t.alpha.block(1, 0, k, 1) = -(interior_inv * alpha_vec);
    t.beta.block(0, 1, 1, k) = -(beta_vec * interior_inv);
    t.gamma.block(k, 0, 1, k) = -(gamma_vec * interior_inv);
    t.delta.block(0, k, k, 1) = -(interior_inv * delta_vec);
    return t;
}

Projectors border_projectors(const RealMatrix& s, double kappa_max) {
    const Translations t = translation_matrices(s, kappa_max);
    const Eigen::Index r = t.alpha.rows();
    Projectors p;
    // First-column / first-row / last-column / last-row rank-one idempotents
    // built from the shear vectors.
    p.alpha = RealMatrix::Zero(r, r);
    p.alpha.col(0) = t.alpha.col(0);
    p.beta = RealMatrix::Zero(r, r);
    p.beta.row(0) = t.beta.row(0);
    p.gamma = RealMatrix::Zero(r, r);
    p.gamma.row(r - 1) = t.gamma.row(r - 1);
    p.delta = RealMatrix::Zero(r, r);
    p.delta.col(r - 1) = t.delta.col(r - 1);
    return p;
}

ReducedPD reduced_pd(const RealMatrix& s, double kappa_max) {
    ReducedPD out;
    out.schur = linalg::schur_complement(s, kappa_max);
    const double numerator = out.schur.b_over_m * out.schur.c_over_m;
    const double denominator = out.schur.a_over_m * out.schur.d_over_m;
    if (denominator == 0.0) {
        throw IllConditionedError("degenerate A/M or D/M complement", 0.0);
    }
    out.x = numerator / denominator;
    const Square square = assemble_square(embed_plus_one(s), "plus-one");
    PDResult pd = partial_determinant(square, kappa_max);
    out.delta = pd.delta;
    out.alpha_tilde = translation_matrices(s, kappa_max).alpha;
    const RealMatrix pi_alpha = border_projectors(s, kappa_max).alpha;
    const Eigen::Index r = out.delta.rows();
    const RealMatrix closed_form =
        RealMatrix::Identity(r, r) + (out.x - 1.0) * pi_alpha;
    out.form_residual = linalg::max_abs(out.delta - closed_form);
    const double tol = 1e-9 * std::max(1.0, std::abs(out.x));
    if (!(out.form_residual <= tol)) {
        throw Error("reduced PD does not match its translation form");
    }
    return out;
}

RealMatrix select_plus_one(const RealMatrix& m,
                           const std::vector<int>& shared_rows,
                           const std::vector<int>& shared_cols,
                           std::pair<int, int> displaced_rows,
                           std::pair<int, int> displaced_cols) {
    if (shared_rows.size() != shared_cols.size()) {
        throw Error("shared row and column selections must have equal size");
    }
    const int k = static_cast<int>(shared_rows.size());
    std::vector<int> rows;
    rows.push_back(displaced_rows.first);
    rows.insert(rows.end(), shared_rows.begin(), shared_rows.end());
    rows.push_back(displaced_rows.second);
    std::vector<int> cols;
    cols.push_back(displaced_cols.first);
    cols.insert(cols.end(), shared_cols.begin(), shared_cols.end());
    cols.push_back(displaced_cols.second);
    RealMatrix out(k + 2, k + 2);
    for (int i = 0; i < k + 2; ++i) {
        for (int j = 0; j < k + 2; ++j) {
            if (rows[i] < 0 || rows[i] >= m.rows() || cols[j] < 0 ||
                cols[j] >= m.cols()) {
                throw RangeOutOfBoundsError("selected index outside the matrix");
            }
            out(i, j) = m(rows[i], cols[j]);
        }
    }
    return out;
}

}  // namespace pdtomo::pd
