#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pdtomo/linalg.hpp"

namespace pdtomo::pd {

using linalg::RealMatrix;

// Four equal-sized square corners of a 2r x 2r arrangement of the data.
struct Square {
    RealMatrix a, b, c, d;
    std::string provenance;

    int block_size() const { return static_cast<int>(a.rows()); }
};

Square assemble_square(const RealMatrix& m, std::string provenance = {});

struct PDResult {
    RealMatrix delta;
    double frobenius_score = 0.0;         // ||delta - I||_F
    double max_abs_score = 0.0;           // max |delta - I|
    std::array<double, 4> corner_conditions{};  // kappa of A, B, C, D
};

/// delta = A^-1 B D^-1 C.
PDResult partial_determinant(const Square& s,
                             double kappa_max = linalg::kDefaultKappaMax);

// The eight loop traversals, in order:
//   A^-1 B D^-1 C,  B D^-1 C A^-1,  D^-1 C A^-1 B,  C A^-1 B D^-1,
//   C^-1 D B^-1 A,  D B^-1 A C^-1,  B^-1 A C^-1 D,  A C^-1 D B^-1.
// Entry i+4 is the inverse of entry i; entries within the first row are
// conjugate to each other.
std::array<PDResult, 8> pd_variants(const Square& s,
                                    double kappa_max = linalg::kDefaultKappaMax);

// A -> L1 A R1, B -> L1 B R2, C -> L2 C R1, D -> L2 D R2. Left factors never
// change delta; R1 conjugates it; R2 cancels.
Square gauge_transform(const Square& s, const RealMatrix& l1,
                       const RealMatrix& l2, const RealMatrix& r1,
                       const RealMatrix& r2);

struct TrivialityReport {
    bool trivial = false;
    double frobenius_score = 0.0;
    double max_abs_score = 0.0;
    double threshold = 0.0;
    std::array<double, 4> corner_conditions{};
};

TrivialityReport triviality_test(const PDResult& result, double threshold);

inline constexpr double kNoiselessThreshold = 1e-6;
double shots_aware_threshold(int r, std::uint64_t shots);  // 10 r / sqrt(shots)

// ---------------------------------------------------------------------------
// r x r PD for an (r+1) x (r+1) matrix via the doubled border construction.
// ---------------------------------------------------------------------------

// The doubled 2r x 2r matrix: interior rows/columns repeated once, border
// rows/columns kept at the outside.
RealMatrix embed_plus_one(const RealMatrix& s);

// Border-shear translation matrices of the partition; each pair
// T(v1) T(v2) = T(v1 + v2) composes additively.
struct Translations {
    RealMatrix alpha, beta, gamma, delta;
};
Translations translation_matrices(const RealMatrix& s,
                                  double kappa_max = linalg::kDefaultKappaMax);

// Rank-one idempotents conjugating the x-direction of each traversal:
// pi_alpha = alpha~ diag(1,0,...,0) alpha~^-1 and so on. The eight loop
// traversals of the doubled matrix collapse to
//   I + (x-1) pi        (forward row)
//   I + (1/x-1) pi      (reversed row)
// with pi one of these four. Note det(I + (x-1) pi) = x = det(delta).
struct Projectors {
    RealMatrix alpha, beta, gamma, delta;
};
Projectors border_projectors(const RealMatrix& s,
                             double kappa_max = linalg::kDefaultKappaMax);

struct ReducedPD {
    double x = 0.0;  // (B/M)(C/M) / ((A/M)(D/M)); 1 exactly when rank <= r
    linalg::SchurCorners schur;
    RealMatrix delta;        // r x r PD of the doubled matrix
    RealMatrix alpha_tilde;  // border translation matrix of the partition
    double form_residual = 0.0;  // max-abs of delta - (I + (x-1) pi_alpha)
};

ReducedPD reduced_pd(const RealMatrix& s,
                     double kappa_max = linalg::kDefaultKappaMax);

// General s x s rank test: picks r-1 shared rows/columns plus two displacing
// rows/columns and assembles the (r+1) x (r+1) matrix with the displacing
// pair on the border.
RealMatrix select_plus_one(const RealMatrix& m,
                           const std::vector<int>& shared_rows,
                           const std::vector<int>& shared_cols,
                           std::pair<int, int> displaced_rows,
                           std::pair<int, int> displaced_cols);

}  // namespace pdtomo::pd
