#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "pdtomo/errors.hpp"
#include "pdtomo/model.hpp"
#include "pdtomo/pd.hpp"
#include "pdtomo/schemes.hpp"

using namespace pdtomo;

namespace {

std::vector<std::string> printed(const std::vector<schemes::BracketScheme>& v) {
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& s : v) {
        out.push_back(schemes::print(s));
    }
    return out;
}

tensor::DataTensor two_qubit_data(std::uint64_t seed) {
    const model::Devices dev = model::random_devices(2, 2, 32, {8, 8}, seed);
    return model::synthesize(dev, {});
}

}  // namespace

TEST_CASE("parse resolves counts and displacement against d") {
    const schemes::BracketScheme s = schemes::parse("[2d^2;1:2d^2]", 2, 2);
    CHECK(s.state.total_count(2) == 8);
    CHECK(s.state.displaced);
    REQUIRE(s.left.size() == 1);
    CHECK(s.left[0].total_count(2) == 1);
    REQUIRE(s.right.size() == 1);
    CHECK(s.right[0].total_count(2) == 8);
    CHECK(s.right[0].displaced);
    CHECK(s.corner_size() == 4);
    CHECK(s.k() == 1);
    CHECK(s.is_square());
}

TEST_CASE("parse handles the generic three-qudit square") {
    const schemes::BracketScheme s =
        schemes::parse("[2d^6:2d^2,d^2,d^2]", 3, 2);
    CHECK(s.k() == 3);
    CHECK(s.left.empty());
    CHECK(s.state.total_count(2) == 128);
    CHECK(s.corner_size() == 64);
}

TEST_CASE("parse accepts permutation prefixes") {
    const schemes::BracketScheme s = schemes::parse("(123)[d;d,1:d^2]", 3, 2);
    CHECK(s.slot_qudit == std::vector<int>{2, 3, 1});
    CHECK(schemes::print(s) == "(123)[d;d,1:d^2]");
}

TEST_CASE("the symmetric scheme is invariant under the qudit swap") {
    const schemes::BracketScheme s = schemes::parse("[1;2d^2:2d^2]", 2, 2);
    const schemes::BracketScheme swapped = schemes::apply_permutation(s, {2, 1});
    CHECK(schemes::equivalent(swapped, s));
    // a displaced-state scheme is not transpose-symmetric
    const schemes::BracketScheme other = schemes::parse("[2d^2;1:2d^2]", 2, 2);
    CHECK_FALSE(
        schemes::equivalent(schemes::apply_permutation(other, {2, 1}), other));
}

TEST_CASE("asterisked three-qudit schemes are symmetric once") {
    // active-pair swap for [1;2d^2,1:2d^2]
    const auto starred = schemes::parse("[1;2d^2,1:2d^2]", 3, 2);
    CHECK(schemes::equivalent(
        schemes::apply_permutation(starred, {3, 2, 1}), starred));
    CHECK_FALSE(schemes::equivalent(
        schemes::apply_permutation(starred, {2, 1, 3}), starred));
    // d-slot swap for [2;d,d:2d^2]
    const auto double_starred = schemes::parse("[2;d,d:2d^2]", 3, 2);
    CHECK(schemes::equivalent(
        schemes::apply_permutation(double_starred, {2, 1, 3}), double_starred));
    // each symmetric scheme appears exactly once in the enumeration
    const auto variants = schemes::enumerate_schemes(3, 2, 1).variants;
    int starred_count = 0, double_starred_count = 0;
    for (const auto& v : variants) {
        if (schemes::equivalent(v, starred)) {
            ++starred_count;
        }
        if (schemes::equivalent(v, double_starred)) {
            ++double_starred_count;
        }
    }
    CHECK(starred_count == 1);
    CHECK(double_starred_count == 1);
}

TEST_CASE("single-qudit enumeration degenerates to the original square") {
    const auto report = schemes::enumerate_schemes(1, 2, 1);
    CHECK(printed(report.variants) == std::vector<std::string>{"[2d^2:2d^2]"});
    CHECK(report.count() == schemes::scalable_count(1));
}

TEST_CASE("parse rejects malformed schemes") {
    CHECK_THROWS_AS(schemes::parse("[3;1:d^2]", 2, 2), ParseError);
    CHECK_THROWS_AS(schemes::parse("[d^2;d^2:d^2]", 2, 2),
                    InconsistentCornerSizeError);
    CHECK_THROWS_AS(schemes::parse("[2d^2;1:d^2]", 2, 2), ParseError);
    CHECK_THROWS_AS(schemes::parse("[d^2;1:d^2]x", 2, 2), ParseError);
    CHECK_THROWS_AS(schemes::parse("[d^2;1:d^2", 2, 2), ParseError);
    CHECK_THROWS_AS(schemes::parse("(14)[d^2;1:d^2]", 2, 2), ParseError);
    CHECK_THROWS_AS(schemes::parse("[d^2;1,1:d^2]", 2, 2), ParseError);
    // positions are reported
    try {
        schemes::parse("[q]", 2, 2);
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.position() == 1);
    }
}

TEST_CASE("odd-power corners parse for manual assembly") {
    const schemes::BracketScheme s = schemes::parse("[d;d,d:d^3]", 3, 2);
    CHECK(s.corner_size() == 8);
    CHECK_FALSE(s.is_square());
}

TEST_CASE("print round-trips through parse on every enumerated scheme") {
    const std::vector<std::pair<int, int>> cases = {
        {2, 1}, {2, 2}, {3, 1}, {3, 2}, {3, 3}};
    for (const auto& [m, k] : cases) {
        const schemes::EnumerationReport report =
            schemes::enumerate_schemes(m, 2, k);
        for (const auto& s : report.variants) {
            const schemes::BracketScheme back =
                schemes::parse(schemes::print(s), m, 2);
            CHECK(back == s);
        }
    }
}

TEST_CASE("enumeration counts match the tables and the closed form") {
    CHECK(schemes::enumerate_schemes(2, 2, 1).count() == 11);
    CHECK(schemes::enumerate_schemes(3, 2, 2).count() == 33);
    CHECK(schemes::enumerate_schemes(3, 2, 1).count() == 51);
    CHECK(schemes::enumerate_schemes(3, 2, 3).count() == 3);
    CHECK(schemes::enumerate_schemes(2, 2, 2).count() == 2);
    for (int m = 2; m <= 6; ++m) {
        CHECK(schemes::enumerate_schemes(m, 2, 1).count() ==
              schemes::scalable_count(m));
    }
    CHECK_THROWS_AS(schemes::enumerate_schemes(3, 2, 4), BadClassError);
    CHECK_THROWS_AS(schemes::enumerate_schemes(5, 2, 3), BadClassError);
}

TEST_CASE("enumerated schemes are pairwise distinct") {
    for (const auto& [m, k] :
         std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}}) {
        const auto texts = printed(schemes::enumerate_schemes(m, 2, k).variants);
        const std::set<std::string> unique(texts.begin(), texts.end());
        CHECK(unique.size() == texts.size());
    }
}

TEST_CASE("two-qudit template table") {
    const schemes::EnumerationReport report = schemes::enumerate_schemes(2, 2, 1);
    CHECK(printed(report.corners) ==
          std::vector<std::string>{"[d^2;1:d^2]", "[d;d:d^2]", "[1;d^2:d^2]"});
    CHECK(printed(report.squares) ==
          std::vector<std::string>{"[2d^2;1:2d^2]", "[d^2;2:2d^2]",
                                   "[2d;d:2d^2]", "[d;2d:2d^2]",
                                   "[2;d^2:2d^2]", "[1;2d^2:2d^2]"});
}

TEST_CASE("three-qudit k=2 template table") {
    const schemes::EnumerationReport report = schemes::enumerate_schemes(3, 2, 2);
    CHECK(printed(report.corners) ==
          std::vector<std::string>{"[d^4;1:d^2,d^2]", "[d^3;d:d^2,d^2]",
                                   "[d^2;d^2:d^2,d^2]"});
    CHECK(printed(report.squares) ==
          std::vector<std::string>{"[2d^4;1:2d^2,d^2]", "[d^4;2:2d^2,d^2]",
                                   "[2d^3;d:2d^2,d^2]", "[d^3;2d:2d^2,d^2]",
                                   "[2d^2;d^2:2d^2,d^2]",
                                   "[d^2;2d^2:2d^2,d^2]"});
}

TEST_CASE("three-qudit k=1 template table") {
    const schemes::EnumerationReport report = schemes::enumerate_schemes(3, 2, 1);
    CHECK(printed(report.corners) ==
          std::vector<std::string>{"[d^2;1,1:d^2]", "[d;d,1:d^2]",
                                   "[1;d^2,1:d^2]", "[1;d,d:d^2]"});
    CHECK(printed(report.squares) ==
          std::vector<std::string>{
              "[2d^2;1,1:2d^2]", "[d^2;2,1:2d^2]", "[2d;d,1:2d^2]",
              "[d;2d,1:2d^2]", "[d;d,2:2d^2]", "[2;d^2,1:2d^2]",
              "[1;2d^2,1:2d^2]", "[1;d^2,2:2d^2]", "[2;d,d:2d^2]",
              "[1;2d,d:2d^2]"});
}

TEST_CASE("generic class for three qudits") {
    const schemes::EnumerationReport report = schemes::enumerate_schemes(3, 2, 3);
    CHECK(printed(report.variants) ==
          std::vector<std::string>{"[2d^6:2d^2,d^2,d^2]",
                                   "(12)[2d^6:2d^2,d^2,d^2]",
                                   "(13)[2d^6:2d^2,d^2,d^2]"});
}

TEST_CASE("reduced scheme counts") {
    CHECK(schemes::reduced_scheme_count(4) == 100);
    CHECK(schemes::reduced_scheme_count(1) == 1);
    CHECK(schemes::reduced_scheme_count(9) == 2025);
}

TEST_CASE("sensitivity of the two-qudit squares") {
    const auto s1 = schemes::parse("[2d^2;1:2d^2]", 2, 2);
    const auto p1 = schemes::sensitivity(s1);
    CHECK_FALSE(p1.is_sensitive("spam:1"));
    CHECK(p1.is_sensitive("spam:2"));
    CHECK(p1.is_sensitive("nonlocal:1,2"));

    const auto generic = schemes::parse("[2d^4:2d^2,d^2]", 2, 2);
    const auto pg = schemes::sensitivity(generic);
    CHECK_FALSE(pg.is_sensitive("nonlocal:1,2"));
    CHECK(pg.is_sensitive("spam:1"));
    // spam on the undisplaced qudit needs the other displacement variant
    CHECK_FALSE(pg.is_sensitive("spam:2"));
    CHECK(schemes::sensitivity(schemes::parse("(12)[2d^4:2d^2,d^2]", 2, 2))
              .is_sensitive("spam:2"));

    // one state setting: the row side collapses, only the cross
    // nonlocality remains visible
    const auto sym = schemes::parse("[1;2d^2:2d^2]", 2, 2);
    const auto ps = schemes::sensitivity(sym);
    CHECK_FALSE(ps.is_sensitive("spam:1"));
    CHECK_FALSE(ps.is_sensitive("spam:2"));
    CHECK(ps.is_sensitive("nonlocal:1,2"));
}

TEST_CASE("sensitivity of three-qudit schemes") {
    const auto k2 = schemes::parse("[2d^4;1:2d^2,d^2]", 3, 2);
    const auto p = schemes::sensitivity(k2);
    CHECK_FALSE(p.is_sensitive("nonlocal:2,3"));
    CHECK_FALSE(p.is_sensitive("spam:1"));
    CHECK(p.is_sensitive("spam:2"));
    CHECK(p.is_sensitive("nonlocal:1,2"));
    // the undisplaced column qudit folds into the row side: only the
    // permutation variant that displaces qudit 3 exposes these
    CHECK_FALSE(p.is_sensitive("spam:3"));
    CHECK_FALSE(p.is_sensitive("nonlocal:1,3"));
    const auto swapped = schemes::apply_permutation(k2, {1, 3, 2});
    const auto ps = schemes::sensitivity(swapped);
    CHECK(ps.is_sensitive("spam:3"));
    CHECK(ps.is_sensitive("nonlocal:1,3"));
    CHECK_FALSE(ps.is_sensitive("spam:2"));

    const auto collapsible = schemes::parse("[1;2d^2,1:2d^2]", 3, 2);
    const auto pc = schemes::sensitivity(collapsible);
    CHECK(pc.is_sensitive("nonlocal:1,3"));
    CHECK_FALSE(pc.is_sensitive("nonlocal:1,2"));
    CHECK_FALSE(pc.is_sensitive("nonlocal:2,3"));
    CHECK_FALSE(pc.is_sensitive("spam:1"));
    CHECK_FALSE(pc.is_sensitive("spam:2"));
    CHECK_FALSE(pc.is_sensitive("spam:3"));

    const auto displaced_trace = schemes::parse("[1;d^2,2:2d^2]", 3, 2);
    const auto pd_ = schemes::sensitivity(displaced_trace);
    CHECK(pd_.is_sensitive("spam:3"));
    CHECK(pd_.is_sensitive("nonlocal:2,3"));
}

TEST_CASE("build_square produces trivial PDs on uncorrelated data") {
    const tensor::DataTensor t = two_qubit_data(301);
    for (const std::string text :
         {"[2d^2;1:2d^2]", "[d;2d:2d^2]", "(12)[d^2;2:2d^2]"}) {
        const schemes::BracketScheme s = schemes::parse(text, 2, 2);
        const pd::Square square = schemes::build_square(t, s);
        CHECK(pd::partial_determinant(square).frobenius_score < 1e-8);
    }
}

TEST_CASE("a three-qudit square from few settings") {
    const model::Devices dev =
        model::random_devices(3, 2, 2, {2, 2, 8}, 303);
    const tensor::DataTensor t = model::synthesize(dev, {});
    const schemes::BracketScheme s = schemes::parse("[2;d,d:2d^2]", 3, 2);
    const pd::Square square = schemes::build_square(t, s);
    CHECK(pd::partial_determinant(square).frobenius_score < 1e-8);
}

TEST_CASE("build_square validates shapes and displacement") {
    const tensor::DataTensor t = two_qubit_data(305);
    const schemes::BracketScheme corner = schemes::parse("[d^2;1:d^2]", 2, 2);
    CHECK_THROWS_AS(schemes::build_square(t, corner), Error);
    const model::Devices small = model::random_devices(2, 2, 4, {4, 4}, 307);
    const tensor::DataTensor tiny = model::synthesize(small, {});
    const schemes::BracketScheme s = schemes::parse("[2d^2;1:2d^2]", 2, 2);
    CHECK_THROWS_AS(schemes::build_square(tiny, s),
                    InsufficientSettingsError);
    schemes::SettingSelection off;
    off.axis_offsets = {28, 0, 0};
    CHECK_THROWS_AS(schemes::build_square(t, s, off),
                    InsufficientSettingsError);
}

TEST_CASE("setting offsets shift the selected blocks") {
    const tensor::DataTensor t = two_qubit_data(311);
    const schemes::BracketScheme s = schemes::parse("[d^2;2:2d^2]", 2, 2);
    schemes::SettingSelection sel;
    sel.axis_offsets = {2, 3, 0};
    const pd::Square square = schemes::build_square(t, s, sel);
    CHECK(pd::partial_determinant(square).frobenius_score < 1e-8);
    CHECK(square.provenance.find("offsets=[2,3,0]") != std::string::npos);
}

TEST_CASE("permuted schemes read permuted data consistently") {
    const tensor::DataTensor t = two_qubit_data(313);
    const tensor::DataTensor swapped = tensor::permute_qudits(t, {2, 1});
    const schemes::BracketScheme s = schemes::parse("[2d^2;1:2d^2]", 2, 2);
    const schemes::BracketScheme sp = schemes::parse("(12)[2d^2;1:2d^2]", 2, 2);
    const pd::Square direct = schemes::build_square(swapped, s);
    const pd::Square via_perm = schemes::build_square(t, sp);
    CHECK(linalg::max_abs(direct.a - via_perm.a) == 0.0);
    CHECK(linalg::max_abs(direct.d - via_perm.d) == 0.0);
}
