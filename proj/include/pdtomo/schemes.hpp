#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pdtomo/pd.hpp"
#include "pdtomo/tensor.hpp"

namespace pdtomo::schemes {

// One slot of bracket notation. The corner uses d^dexp settings of the
// device; a displaced slot doubles that across the square (the leading "2").
struct SlotSpec {
    int dexp = 0;
    bool displaced = false;

    int corner_count(int d) const;
    int total_count(int d) const;
    bool fixed(int d) const { return total_count(d) == 1; }

    friend bool operator==(const SlotSpec&, const SlotSpec&) = default;
};

// Parsed [N; L_1,...,L_{m-k} : M_1,...,M_k] descriptor with an optional
// qudit permutation prefix in cycle notation. slot_qudit maps slot position
// (left slots first, then right slots) to the physical qudit it drives.
struct BracketScheme {
    int m = 0;
    int d = 0;
    SlotSpec state;
    std::vector<SlotSpec> left;
    std::vector<SlotSpec> right;
    std::vector<int> slot_qudit;

    int k() const { return static_cast<int>(right.size()); }
    int corner_size() const;  // product of row-side corner counts
    bool is_square() const;   // carries the row/column displacement pair
    bool qudit_on_row_side(int q) const;
    SlotSpec qudit_slot(int q) const;

    friend bool operator==(const BracketScheme&, const BracketScheme&) = default;
};

BracketScheme parse(const std::string& text, int m, int d);
std::string print(const BracketScheme& s);

// Relabels physical qudits: slot holding qudit q now holds sigma[q-1].
BracketScheme apply_permutation(const BracketScheme& s,
                                const std::vector<int>& sigma);

// Same-side slots with identical specs sorted into canonical qudit order.
BracketScheme canonical(const BracketScheme& s);

// Equality up to canonical reordering, and for single-state-setting schemes
// also up to exchanging the row and column sides (the transpose reading).
bool equivalent(const BracketScheme& a, const BracketScheme& b);

struct SensitivityProfile {
    std::vector<std::string> sensitive_to;
    std::vector<std::string> insensitive_to;

    bool is_sensitive(const std::string& label) const;
};

// Correlation kinds the PD of this scheme reacts to, derived from the cut
// topology of the underlying factorization.
SensitivityProfile sensitivity(const BracketScheme& s);

struct EnumerationReport {
    int m = 0;
    int d = 0;
    int k = 0;
    std::vector<BracketScheme> corners;   // base corner templates
    std::vector<BracketScheme> squares;   // base square templates
    std::vector<BracketScheme> variants;  // all permutation variants
    std::vector<std::string> symmetry_notes;

    std::size_t count() const { return variants.size(); }
};

EnumerationReport enumerate_schemes(int m, int d, int k);

std::size_t scalable_count(int m);        // m(7m^2 - 12m + 7) / 2
std::size_t reduced_scheme_count(int r);  // C(r+1, 2)^2

// Concrete settings feeding a square: per-axis starting offsets (axis 0 is
// the state axis). Displaced devices take two adjacent blocks from their
// offset; fixed slots take the single setting at theirs (index 0 selects the
// identity observable of synthesized devices).
struct SettingSelection {
    std::vector<int> axis_offsets;

    int offset(int axis) const;
};

pd::Square build_square(const tensor::DataTensor& t, const BracketScheme& s,
                        const SettingSelection& sel = {});

}  // namespace pdtomo::schemes
