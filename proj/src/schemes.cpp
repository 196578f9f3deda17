#include "pdtomo/schemes.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include "pdtomo/errors.hpp"

namespace pdtomo::schemes {

namespace {

int ipow(int base, int exp) {
    int out = 1;
    for (int i = 0; i < exp; ++i) {
        out *= base;
    }
    return out;
}

std::string format_slot(const SlotSpec& s) {
    std::string out;
    if (s.displaced) {
        out += "2";
    }
    if (s.dexp == 0) {
        if (!s.displaced) {
            out += "1";
        }
    } else if (s.dexp == 1) {
        out += "d";
    } else {
        out += "d^" + std::to_string(s.dexp);
    }
    return out;
}

// Sort slots by (dexp desc, displaced first) and qudits ascending within
// runs of identical specs; template listings follow this order.
void canonicalize_side(std::vector<SlotSpec>& slots, std::vector<int>& qudits) {
    const std::size_t n = slots.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) {
                         if (slots[i].dexp != slots[j].dexp) {
                             return slots[i].dexp > slots[j].dexp;
                         }
                         if (slots[i].displaced != slots[j].displaced) {
                             return slots[i].displaced;
                         }
                         return qudits[i] < qudits[j];
                     });
    std::vector<SlotSpec> new_slots(n);
    std::vector<int> new_qudits(n);
    for (std::size_t i = 0; i < n; ++i) {
        new_slots[i] = slots[order[i]];
        new_qudits[i] = qudits[order[i]];
    }
    slots = std::move(new_slots);
    qudits = std::move(new_qudits);
}

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    void skip_space() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
    }
    bool done() const { return pos >= text.size(); }
    char peek() const { return pos < text.size() ? text[pos] : '\0'; }
    char take() { return text[pos++]; }
    void expect(char c) {
        skip_space();
        if (done() || text[pos] != c) {
            throw ParseError(std::string("expected '") + c + "'", pos);
        }
        ++pos;
    }
};

SlotSpec parse_slot(Cursor& cur) {
    cur.skip_space();
    SlotSpec slot;
    if (cur.peek() == '2') {
        slot.displaced = true;
        cur.take();
    }
    cur.skip_space();
    if (cur.peek() == '1') {
        if (slot.displaced) {
            throw ParseError("'2' already denotes a displaced single setting", cur.pos);
        }
        cur.take();
        slot.dexp = 0;
        return slot;
    }
    if (cur.peek() == 'd') {
        cur.take();
        slot.dexp = 1;
        if (cur.peek() == '^') {
            cur.take();
            if (!std::isdigit(static_cast<unsigned char>(cur.peek()))) {
                throw ParseError("expected an exponent after '^'", cur.pos);
            }
            int exp = 0;
            while (std::isdigit(static_cast<unsigned char>(cur.peek()))) {
                exp = exp * 10 + (cur.take() - '0');
            }
            slot.dexp = exp;
        }
        return slot;
    }
    if (slot.displaced) {
        return slot;  // bare "2"
    }
    throw ParseError("expected a setting count (1, 2, d, 2d, d^k, 2d^k)", cur.pos);
}

std::vector<int> parse_cycles(Cursor& cur, int m) {
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 1);
    std::vector<char> used(m, 0);
    cur.skip_space();
    while (cur.peek() == '(') {
        cur.take();
        std::vector<int> cycle;
        cur.skip_space();
        while (std::isdigit(static_cast<unsigned char>(cur.peek()))) {
            const int q = cur.take() - '0';
            if (q < 1 || q > m) {
                throw ParseError("cycle entry outside 1.." + std::to_string(m),
                                 cur.pos - 1);
            }
            if (used[q - 1]++) {
                throw ParseError("qudit repeated across cycles", cur.pos - 1);
            }
            cycle.push_back(q);
            cur.skip_space();
        }
        cur.expect(')');
        if (cycle.size() < 2) {
            throw ParseError("a cycle needs at least two entries", cur.pos);
        }
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            perm[cycle[i] - 1] = cycle[(i + 1) % cycle.size()];
        }
        cur.skip_space();
    }
    return perm;
}

std::string format_cycles(const std::vector<int>& perm) {
    const int m = static_cast<int>(perm.size());
    std::vector<char> visited(m, 0);
    std::string out;
    for (int start = 1; start <= m; ++start) {
        if (visited[start - 1] || perm[start - 1] == start) {
            continue;
        }
        out += '(';
        int q = start;
        while (!visited[q - 1]) {
            visited[q - 1] = 1;
            out += std::to_string(q);
            q = perm[q - 1];
        }
        out += ')';
    }
    return out;
}

void validate(const BracketScheme& s, std::size_t err_pos) {
    if (static_cast<int>(s.left.size() + s.right.size()) != s.m) {
        throw ParseError("scheme lists " +
                             std::to_string(s.left.size() + s.right.size()) +
                             " qudit slots but m=" + std::to_string(s.m),
                         err_pos);
    }
    if (s.right.empty()) {
        throw ParseError("no column entries after ':'", err_pos);
    }
    int row_dexp = s.state.dexp;
    int row_disp = s.state.displaced ? 1 : 0;
    for (const SlotSpec& slot : s.left) {
        row_dexp += slot.dexp;
        row_disp += slot.displaced ? 1 : 0;
    }
    int col_dexp = 0;
    int col_disp = 0;
    for (const SlotSpec& slot : s.right) {
        col_dexp += slot.dexp;
        col_disp += slot.displaced ? 1 : 0;
    }
    if (row_dexp != col_dexp) {
        throw InconsistentCornerSizeError(
            "corner rows d^" + std::to_string(row_dexp) +
            " do not match corner columns d^" + std::to_string(col_dexp));
    }
    if (row_disp > 1 || col_disp > 1 || row_disp != col_disp) {
        throw ParseError(
            "a square needs exactly one displaced row entry and one displaced "
            "column entry",
            err_pos);
    }
}

// --- enumeration helpers ---------------------------------------------------

struct Assignment {
    SlotSpec state;
    std::vector<std::pair<SlotSpec, int>> left;   // spec, qudit
    std::vector<std::pair<SlotSpec, int>> right;  // spec, qudit
};

// Assignments are built in listing order already; keep their labels as-is.
BracketScheme realize(int m, int d, const Assignment& asg) {
    BracketScheme s;
    s.m = m;
    s.d = d;
    s.state = asg.state;
    for (const auto& [spec, q] : asg.left) {
        s.left.push_back(spec);
        s.slot_qudit.push_back(q);
    }
    for (const auto& [spec, q] : asg.right) {
        s.right.push_back(spec);
        s.slot_qudit.push_back(q);
    }
    return s;
}

// Remaining qudits in ascending order, excluding the listed ones.
std::vector<int> others(int m, std::initializer_list<int> taken) {
    std::vector<int> out;
    for (int q = 1; q <= m; ++q) {
        if (std::find(taken.begin(), taken.end(), q) == taken.end()) {
            out.push_back(q);
        }
    }
    return out;
}

const SlotSpec kTraced{0, false};
const SlotSpec kDisplacedSingle{0, true};

void enumerate_most_scalable(int m, int d, EnumerationReport& report) {
    const SlotSpec n_d2{2, false}, n_2d2{2, true}, n_d{1, false}, n_2d{1, true};
    const SlotSpec n_one{0, false}, n_two{0, true};
    const SlotSpec l_d{1, false}, l_2d{1, true}, l_d2{2, false}, l_2d2{2, true};
    const SlotSpec m_2d2{2, true};

    auto traced_rest = [&](Assignment& asg, std::initializer_list<int> taken) {
        for (int q : others(m, taken)) {
            asg.left.emplace_back(kTraced, q);
        }
    };

    // [2d^2; 1,... : 2d^2]
    for (int qm = 1; qm <= m; ++qm) {
        Assignment asg{n_2d2, {}, {{m_2d2, qm}}};
        traced_rest(asg, {qm});
        report.variants.push_back(realize(m, d, asg));
    }
    // [d^2; 2,1,... : 2d^2]
    for (int qm = 1; qm <= m; ++qm) {
        for (int qdisp : others(m, {qm})) {
            Assignment asg{n_d2, {{kDisplacedSingle, qdisp}}, {{m_2d2, qm}}};
            traced_rest(asg, {qm, qdisp});
            report.variants.push_back(realize(m, d, asg));
        }
    }
    // [2d; d,1,... : 2d^2]
    for (int qm = 1; qm <= m; ++qm) {
        for (int ql : others(m, {qm})) {
            Assignment asg{n_2d, {{l_d, ql}}, {{m_2d2, qm}}};
            traced_rest(asg, {qm, ql});
            report.variants.push_back(realize(m, d, asg));
        }
    }
    // [d; 2d,1,... : 2d^2]
    for (int qm = 1; qm <= m; ++qm) {
        for (int ql : others(m, {qm})) {
            Assignment asg{n_d, {{l_2d, ql}}, {{m_2d2, qm}}};
            traced_rest(asg, {qm, ql});
            report.variants.push_back(realize(m, d, asg));
        }
    }
    // [d; d,2,1,... : 2d^2]
    for (int qm = 1; qm <= m; ++qm) {
        for (int ql : others(m, {qm})) {
            for (int qdisp : others(m, {qm, ql})) {
                Assignment asg{n_d,
                               {{l_d, ql}, {kDisplacedSingle, qdisp}},
                               {{m_2d2, qm}}};
                traced_rest(asg, {qm, ql, qdisp});
                report.variants.push_back(realize(m, d, asg));
            }
        }
    }
    // [2; d^2,1,... : 2d^2]
    for (int qm = 1; qm <= m; ++qm) {
        for (int ql : others(m, {qm})) {
            Assignment asg{n_two, {{l_d2, ql}}, {{m_2d2, qm}}};
            traced_rest(asg, {qm, ql});
            report.variants.push_back(realize(m, d, asg));
        }
    }
    // [1; 2d^2,1,... : 2d^2]  (symmetric: counted once per unordered pair)
    for (int ql = 1; ql <= m; ++ql) {
        for (int qm = ql + 1; qm <= m; ++qm) {
            Assignment asg{n_one, {{l_2d2, ql}}, {{m_2d2, qm}}};
            traced_rest(asg, {qm, ql});
            report.variants.push_back(realize(m, d, asg));
        }
    }
    // [1; d^2,2,1,... : 2d^2]
    for (int qm = 1; qm <= m; ++qm) {
        for (int ql : others(m, {qm})) {
            for (int qdisp : others(m, {qm, ql})) {
                Assignment asg{n_one,
                               {{l_d2, ql}, {kDisplacedSingle, qdisp}},
                               {{m_2d2, qm}}};
                traced_rest(asg, {qm, ql, qdisp});
                report.variants.push_back(realize(m, d, asg));
            }
        }
    }
    // [2; d,d,1,... : 2d^2]  (symmetric in the two d slots)
    for (int qm = 1; qm <= m; ++qm) {
        const std::vector<int> rest = others(m, {qm});
        for (std::size_t i = 0; i < rest.size(); ++i) {
            for (std::size_t j = i + 1; j < rest.size(); ++j) {
                Assignment asg{n_two,
                               {{l_d, rest[i]}, {l_d, rest[j]}},
                               {{m_2d2, qm}}};
                traced_rest(asg, {qm, rest[i], rest[j]});
                report.variants.push_back(realize(m, d, asg));
            }
        }
    }
    // [1; 2d,d,1,... : 2d^2]
    for (int qm = 1; qm <= m; ++qm) {
        for (int qdisp : others(m, {qm})) {
            for (int ql : others(m, {qm, qdisp})) {
                Assignment asg{n_one,
                               {{l_2d, qdisp}, {l_d, ql}},
                               {{m_2d2, qm}}};
                traced_rest(asg, {qm, qdisp, ql});
                report.variants.push_back(realize(m, d, asg));
            }
        }
    }

    // Base templates with the identity assignment.
    auto base = [&](SlotSpec n, std::vector<SlotSpec> lefts, SlotSpec mslot) {
        Assignment asg{n, {}, {}};
        int q = 1;
        for (const SlotSpec& spec : lefts) {
            asg.left.emplace_back(spec, q++);
        }
        while (q < m) {
            asg.left.emplace_back(kTraced, q++);
        }
        asg.right.emplace_back(mslot, m);
        return realize(m, d, asg);
    };
    const SlotSpec m_d2{2, false};
    report.corners = {base(n_d2, {}, m_d2), base(n_d, {l_d}, m_d2),
                      base(n_one, {l_d2}, m_d2)};
    if (m >= 3) {
        report.corners.push_back(base(n_one, {l_d, l_d}, m_d2));
    }
    // squares in listing order, one corner row at a time
    report.squares = {base(n_2d2, {}, m_2d2),
                      base(n_d2, {kDisplacedSingle}, m_2d2),
                      base(n_2d, {l_d}, m_2d2),
                      base(n_d, {l_2d}, m_2d2)};
    if (m >= 3) {
        report.squares.push_back(base(n_d, {l_d, kDisplacedSingle}, m_2d2));
    }
    report.squares.push_back(base(n_two, {l_d2}, m_2d2));
    report.squares.push_back(base(n_one, {l_2d2}, m_2d2));
    if (m >= 3) {
        report.squares.push_back(base(n_one, {l_d2, kDisplacedSingle}, m_2d2));
        report.squares.push_back(base(n_two, {l_d, l_d}, m_2d2));
        report.squares.push_back(base(n_one, {l_2d, l_d}, m_2d2));
    }
    report.symmetry_notes.push_back(
        "[1;2d^2,...:2d^2] is symmetric under exchanging its two active "
        "qudits; counted once per unordered pair");
    if (m >= 3) {
        report.symmetry_notes.push_back(
            "[2;d,d,...:2d^2] is symmetric in its two d-slot qudits; counted "
            "once per unordered pair");
    }
}

void enumerate_generic(int m, int d, EnumerationReport& report) {
    const SlotSpec n_corner{2 * m, false};
    const SlotSpec n_square{2 * m, true};
    const SlotSpec m_d2{2, false};
    const SlotSpec m_2d2{2, true};

    Assignment corner{n_corner, {}, {}};
    for (int q = 1; q <= m; ++q) {
        corner.right.emplace_back(m_d2, q);
    }
    report.corners.push_back(realize(m, d, corner));

    for (int qdisp = 1; qdisp <= m; ++qdisp) {
        // transposition labels: the displaced first slot swaps with qudit 1,
        // undisplaced slots keep their identity positions
        Assignment asg{n_square, {}, {}};
        asg.right.emplace_back(m_2d2, qdisp);
        for (int slot = 2; slot <= m; ++slot) {
            asg.right.emplace_back(m_d2, slot == qdisp ? 1 : slot);
        }
        report.variants.push_back(realize(m, d, asg));
        if (qdisp == 1) {
            report.squares.push_back(report.variants.back());
        }
    }
    if (m >= 2) {
        report.symmetry_notes.push_back(
            "the undisplaced column qudits are interchangeable; variants are "
            "indexed by the displaced qudit only");
    }
}

void enumerate_k2(int m, int d, EnumerationReport& report) {
    const int k = 2;
    const SlotSpec m_d2{2, false};
    const SlotSpec m_2d2{2, true};
    struct Kind {
        SlotSpec n_corner;
        SlotSpec left_active;      // dexp < 0 means no active left slot
        SlotSpec n_square;         // state slot in the square
        SlotSpec left_square;      // active left slot in the square
        bool symmetric = false;
    };
    const SlotSpec none{-1, false};
    const std::vector<Kind> kinds = {
        {{2 * k, false}, none, {2 * k, true}, none, false},
        {{2 * k, false}, none, {2 * k, false}, {0, true}, false},
        {{2 * k - 1, false}, {1, false}, {2 * k - 1, true}, {1, false}, false},
        {{2 * k - 1, false}, {1, false}, {2 * k - 1, false}, {1, true}, false},
        {{2 * k - 2, false}, {2, false}, {2 * k - 2, true}, {2, false}, false},
        {{2 * k - 2, false}, {2, false}, {2 * k - 2, false}, {2, true}, true},
    };

    auto assemble = [&](const Kind& kind, bool squared, int r_disp, int r_other) {
        Assignment asg;
        asg.state = squared ? kind.n_square : kind.n_corner;
        const SlotSpec active = squared ? kind.left_square : kind.left_active;
        const std::vector<int> rest = others(m, {r_disp, r_other});
        bool active_placed = (active.dexp < 0);
        for (int q : rest) {
            if (!active_placed) {
                asg.left.emplace_back(active, q);
                active_placed = true;
            } else {
                asg.left.emplace_back(kTraced, q);
            }
        }
        asg.right.emplace_back(squared ? m_2d2 : m_d2, r_disp);
        asg.right.emplace_back(m_d2, r_other);
        return realize(m, d, asg);
    };

    for (const Kind& kind : kinds) {
        for (int r1 = 1; r1 <= m; ++r1) {
            for (int r2 = 1; r2 <= m; ++r2) {
                if (r1 == r2) {
                    continue;
                }
                if (kind.symmetric && r2 < r1) {
                    continue;  // unordered pair for the symmetric square
                }
                report.variants.push_back(assemble(kind, true, r1, r2));
            }
        }
    }
    for (std::size_t i = 0; i < kinds.size(); i += 2) {
        report.corners.push_back(assemble(kinds[i], false, m - 1, m));
    }
    for (const Kind& kind : kinds) {
        report.squares.push_back(assemble(kind, true, m - 1, m));
    }
    report.symmetry_notes.push_back(
        "[d^2;2d^2,...:2d^2,d^2] retains a swap symmetry between its active "
        "row qudit and its displaced column qudit; counted once per pair");
}

}  // namespace

int SlotSpec::corner_count(int d) const {
    return ipow(d, dexp);
}

int SlotSpec::total_count(int d) const {
    return corner_count(d) * (displaced ? 2 : 1);
}

int BracketScheme::corner_size() const {
    int dexp = state.dexp;
    for (const SlotSpec& slot : left) {
        dexp += slot.dexp;
    }
    return ipow(d, dexp);
}

bool BracketScheme::is_square() const {
    int row_disp = state.displaced ? 1 : 0;
    for (const SlotSpec& slot : left) {
        row_disp += slot.displaced ? 1 : 0;
    }
    int col_disp = 0;
    for (const SlotSpec& slot : right) {
        col_disp += slot.displaced ? 1 : 0;
    }
    return row_disp == 1 && col_disp == 1;
}

bool BracketScheme::qudit_on_row_side(int q) const {
    const int n_left = static_cast<int>(left.size());
    for (int s = 0; s < static_cast<int>(slot_qudit.size()); ++s) {
        if (slot_qudit[s] == q) {
            return s < n_left;
        }
    }
    throw RangeOutOfBoundsError("qudit " + std::to_string(q) +
                                " is not part of the scheme");
}

SlotSpec BracketScheme::qudit_slot(int q) const {
    const int n_left = static_cast<int>(left.size());
    for (int s = 0; s < static_cast<int>(slot_qudit.size()); ++s) {
        if (slot_qudit[s] == q) {
            return s < n_left ? left[s] : right[s - n_left];
        }
    }
    throw RangeOutOfBoundsError("qudit " + std::to_string(q) +
                                " is not part of the scheme");
}

BracketScheme parse(const std::string& text, int m, int d) {
    if (m < 1 || d < 2) {
        throw BadDimensionError("need m >= 1 and d >= 2");
    }
    Cursor cur{text};
    BracketScheme s;
    s.m = m;
    s.d = d;
    const std::vector<int> perm = parse_cycles(cur, m);
    cur.expect('[');
    s.state = parse_slot(cur);
    cur.skip_space();
    if (cur.peek() == ';') {
        cur.take();
        while (true) {
            s.left.push_back(parse_slot(cur));
            cur.skip_space();
            if (cur.peek() == ',') {
                cur.take();
                continue;
            }
            break;
        }
    }
    cur.expect(':');
    while (true) {
        s.right.push_back(parse_slot(cur));
        cur.skip_space();
        if (cur.peek() == ',') {
            cur.take();
            continue;
        }
        break;
    }
    cur.expect(']');
    cur.skip_space();
    if (!cur.done()) {
        throw ParseError("trailing characters after ']'", cur.pos);
    }
    for (int slot = 0; slot < m; ++slot) {
        s.slot_qudit.push_back(perm[slot]);
    }
    validate(s, text.size());
    return s;
}

std::string print(const BracketScheme& s) {
    std::string out = format_cycles(s.slot_qudit);
    out += '[';
    out += format_slot(s.state);
    for (std::size_t i = 0; i < s.left.size(); ++i) {
        out += (i == 0) ? ";" : ",";
        out += format_slot(s.left[i]);
    }
    out += ':';
    for (std::size_t i = 0; i < s.right.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += format_slot(s.right[i]);
    }
    out += ']';
    return out;
}

BracketScheme apply_permutation(const BracketScheme& s,
                                const std::vector<int>& sigma) {
    if (static_cast<int>(sigma.size()) != s.m) {
        throw RangeOutOfBoundsError("permutation size must equal m");
    }
    BracketScheme out = s;
    for (int& q : out.slot_qudit) {
        q = sigma[q - 1];
    }
    return out;
}

BracketScheme canonical(const BracketScheme& s) {
    BracketScheme out = s;
    std::vector<int> left_q(out.slot_qudit.begin(),
                            out.slot_qudit.begin() + out.left.size());
    std::vector<int> right_q(out.slot_qudit.begin() + out.left.size(),
                             out.slot_qudit.end());
    canonicalize_side(out.left, left_q);
    canonicalize_side(out.right, right_q);
    out.slot_qudit.clear();
    out.slot_qudit.insert(out.slot_qudit.end(), left_q.begin(), left_q.end());
    out.slot_qudit.insert(out.slot_qudit.end(), right_q.begin(), right_q.end());
    return out;
}

namespace {

// Row/column sides exchanged; spectator (traced) slots stay on the row side.
// Only meaningful when the state contributes a single fixed setting.
bool transposable(const BracketScheme& s) {
    return s.state.dexp == 0 && !s.state.displaced;
}

BracketScheme transpose(const BracketScheme& s) {
    BracketScheme out;
    out.m = s.m;
    out.d = s.d;
    out.state = s.state;
    std::vector<int> left_q, right_q;
    for (std::size_t i = 0; i < s.right.size(); ++i) {
        out.left.push_back(s.right[i]);
        left_q.push_back(s.slot_qudit[s.left.size() + i]);
    }
    for (std::size_t i = 0; i < s.left.size(); ++i) {
        const SlotSpec& slot = s.left[i];
        if (slot.dexp == 0 && !slot.displaced) {
            out.left.push_back(slot);
            left_q.push_back(s.slot_qudit[i]);
        } else {
            out.right.push_back(slot);
            right_q.push_back(s.slot_qudit[i]);
        }
    }
    out.slot_qudit = left_q;
    out.slot_qudit.insert(out.slot_qudit.end(), right_q.begin(), right_q.end());
    return out;
}

}  // namespace

bool equivalent(const BracketScheme& a, const BracketScheme& b) {
    if (a.m != b.m || a.d != b.d) {
        return false;
    }
    const BracketScheme ca = canonical(a);
    const BracketScheme cb = canonical(b);
    if (ca == cb) {
        return true;
    }
    if (transposable(a) && !transpose(a).right.empty()) {
        if (canonical(transpose(a)) == cb) {
            return true;
        }
    }
    return false;
}

bool SensitivityProfile::is_sensitive(const std::string& label) const {
    return std::find(sensitive_to.begin(), sensitive_to.end(), label) !=
           sensitive_to.end();
}

SensitivityProfile sensitivity(const BracketScheme& s) {
    const int d = s.d;
    // A correlation is invisible whenever the square still factors corner by
    // corner as H(r) K(c) with square invertible maps. That happens when the
    // correlated pair sits on one side of the colon, when its column
    // endpoint is an undisplaced device (its settings index the internal
    // space consistently across corners), or when its row endpoint is
    // undisplaced and the rest of the row side spans full parameter blocks
    // so the endpoint's settings fold into the column map.
    const bool state_static = !s.state.displaced;
    const bool state_fixed = s.state.fixed(d);
    auto quds_span = [&](int exclude_q) {
        for (std::size_t i = 0; i < s.left.size(); ++i) {
            const int q = s.slot_qudit[i];
            if (q == exclude_q) {
                continue;
            }
            if (!s.left[i].fixed(d) && s.left[i].dexp != 2) {
                return false;
            }
        }
        return true;
    };
    // row_q == 0 denotes the state device.
    auto cross_insensitive = [&](int row_q, int col_q) {
        if (!s.qudit_slot(col_q).displaced) {
            return true;  // static column device folds into the row side
        }
        if (row_q == 0) {
            return state_static && quds_span(0);
        }
        return !s.qudit_slot(row_q).displaced && state_fixed &&
               quds_span(row_q);
    };
    SensitivityProfile profile;
    auto record = [&](const std::string& label, bool sensitive) {
        (sensitive ? profile.sensitive_to : profile.insensitive_to)
            .push_back(label);
    };
    for (int q = 1; q <= s.m; ++q) {
        const bool sensitive =
            !s.qudit_on_row_side(q) && !cross_insensitive(0, q);
        record("spam:" + std::to_string(q), sensitive);
    }
    for (int p = 1; p <= s.m; ++p) {
        for (int q = p + 1; q <= s.m; ++q) {
            const bool p_rows = s.qudit_on_row_side(p);
            const bool q_rows = s.qudit_on_row_side(q);
            bool sensitive = false;
            if (p_rows != q_rows) {
                sensitive = !cross_insensitive(p_rows ? p : q, p_rows ? q : p);
            }
            record("nonlocal:" + std::to_string(p) + "," + std::to_string(q),
                   sensitive);
        }
    }
    return profile;
}

EnumerationReport enumerate_schemes(int m, int d, int k) {
    if (m < 1 || d < 2) {
        throw BadDimensionError("need m >= 1 and d >= 2");
    }
    if (k < 1 || k > m) {
        throw BadClassError("class k must lie in 1..m");
    }
    EnumerationReport report;
    report.m = m;
    report.d = d;
    report.k = k;
    if (k == m) {
        enumerate_generic(m, d, report);
    } else if (k == 1) {
        enumerate_most_scalable(m, d, report);
    } else if (k == 2) {
        enumerate_k2(m, d, report);
    } else {
        throw BadClassError(
            "no classification for 2 < k < m; assemble such squares manually");
    }
    return report;
}

std::size_t scalable_count(int m) {
    const std::size_t mm = static_cast<std::size_t>(m);
    return mm * (7 * mm * mm - 12 * mm + 7) / 2;
}

std::size_t reduced_scheme_count(int r) {
    if (r < 1) {
        throw Error("rank must be positive");
    }
    const std::size_t pairs =
        static_cast<std::size_t>(r) * (static_cast<std::size_t>(r) + 1) / 2;
    return pairs * pairs;
}

int SettingSelection::offset(int axis) const {
    if (axis < 0) {
        throw RangeOutOfBoundsError("negative axis");
    }
    if (axis >= static_cast<int>(axis_offsets.size())) {
        return 0;
    }
    return axis_offsets[axis];
}

pd::Square build_square(const tensor::DataTensor& t, const BracketScheme& s,
                        const SettingSelection& sel) {
    if (t.m != s.m || t.d != s.d) {
        throw IncompatibleDevicesError("tensor and scheme disagree on (m, d)");
    }
    if (!s.is_square()) {
        throw Error("scheme '" + print(s) +
                    "' is a corner template; a square needs one displaced row "
                    "entry and one displaced column entry");
    }
    struct AxisSlot {
        int axis;
        SlotSpec spec;
    };
    std::vector<AxisSlot> row_slots;
    row_slots.push_back({0, s.state});
    for (std::size_t i = 0; i < s.left.size(); ++i) {
        row_slots.push_back({s.slot_qudit[i], s.left[i]});
    }
    std::vector<AxisSlot> col_slots;
    for (std::size_t i = 0; i < s.right.size(); ++i) {
        col_slots.push_back({s.slot_qudit[s.left.size() + i], s.right[i]});
    }
    for (const auto* slots : {&row_slots, &col_slots}) {
        for (const AxisSlot& slot : *slots) {
            const int needed = sel.offset(slot.axis) + slot.spec.total_count(s.d);
            if (sel.offset(slot.axis) < 0) {
                throw RangeOutOfBoundsError("negative setting offset");
            }
            if (needed > t.shape[slot.axis]) {
                throw InsufficientSettingsError(
                    "axis " + std::to_string(slot.axis) + " has " +
                    std::to_string(t.shape[slot.axis]) + " settings but '" +
                    print(s) + "' needs " + std::to_string(needed));
            }
        }
    }
    auto corner = [&](int row_block, int col_block) {
        tensor::SplitDescriptor split;
        for (const AxisSlot& slot : row_slots) {
            const int count = slot.spec.corner_count(s.d);
            const int start = sel.offset(slot.axis) +
                              (slot.spec.displaced ? row_block * count : 0);
            split.row_axes.push_back({slot.axis, start, count});
        }
        for (const AxisSlot& slot : col_slots) {
            const int count = slot.spec.corner_count(s.d);
            const int start = sel.offset(slot.axis) +
                              (slot.spec.displaced ? col_block * count : 0);
            split.col_axes.push_back({slot.axis, start, count});
        }
        return tensor::flatten(t, split);
    };
    pd::Square square;
    square.a = corner(0, 0);
    square.b = corner(0, 1);
    square.c = corner(1, 0);
    square.d = corner(1, 1);
    std::ostringstream prov;
    prov << print(s) << " offsets=[";
    for (int ax = 0; ax <= s.m; ++ax) {
        prov << (ax ? "," : "") << sel.offset(ax);
    }
    prov << "]";
    square.provenance = prov.str();
    return square;
}

}  // namespace pdtomo::schemes
