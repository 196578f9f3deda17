#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>

#include "pdtomo/errors.hpp"
#include "pdtomo/rng.hpp"
#include "pdtomo/tensor.hpp"

using namespace pdtomo;
using linalg::RealMatrix;

namespace {

tensor::DataTensor counting_tensor(int m, int d, std::vector<int> shape) {
    tensor::DataTensor t = tensor::make_tensor(m, d, std::move(shape));
    std::iota(t.values.begin(), t.values.end(), 0.0);
    return t;
}

tensor::DataTensor random_tensor(int m, int d, std::vector<int> shape,
                                 std::uint64_t seed) {
    tensor::DataTensor t = tensor::make_tensor(m, d, std::move(shape));
    rng::Stream stream(rng::derive_key(seed, "tensor"));
    for (double& v : t.values) {
        v = stream.normal();
    }
    return t;
}

}  // namespace

TEST_CASE("row-major flatten of a counting tensor") {
    const tensor::DataTensor t = counting_tensor(2, 2, {2, 2, 2});
    const RealMatrix m = tensor::flatten(t, tensor::full_split(t, {0, 1}, {2}));
    REQUIRE(m.rows() == 4);
    REQUIRE(m.cols() == 2);
    RealMatrix expected(4, 2);
    expected << 0, 1, 2, 3, 4, 5, 6, 7;
    CHECK(linalg::max_abs(m - expected) == 0.0);
}

TEST_CASE("fuse and defuse") {
    CHECK(tensor::fuse(0, 0, 3) == 0);
    CHECK(tensor::fuse(1, 2, 3) == 5);
    CHECK_THROWS_AS(tensor::fuse(3, 0, 3), RangeOutOfBoundsError);
    CHECK_THROWS_AS(tensor::defuse(16, 4), RangeOutOfBoundsError);
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const auto [ra, rb] = tensor::defuse(tensor::fuse(a, b, 4), 4);
            CHECK(ra == a);
            CHECK(rb == b);
        }
    }
}

TEST_CASE("split validation") {
    const tensor::DataTensor t = counting_tensor(2, 2, {3, 4, 5});
    tensor::SplitDescriptor twice;
    twice.row_axes = {{0, 0, 3}, {1, 0, 4}};
    twice.col_axes = {{1, 0, 4}, {2, 0, 5}};
    CHECK_THROWS_AS(tensor::flatten(t, twice), AxisCoveredTwiceError);

    tensor::SplitDescriptor missing;
    missing.row_axes = {{0, 0, 3}};
    missing.col_axes = {{2, 0, 5}};
    CHECK_THROWS_AS(tensor::flatten(t, missing), SplitError);

    tensor::SplitDescriptor oob;
    oob.row_axes = {{0, 1, 3}, {1, 0, 4}};
    oob.col_axes = {{2, 0, 5}};
    CHECK_THROWS_AS(tensor::flatten(t, oob), RangeOutOfBoundsError);
}

TEST_CASE("flatten is lossless over its selection") {
    const tensor::DataTensor t = random_tensor(2, 2, {4, 5, 6}, 21);
    tensor::SplitDescriptor split;
    split.row_axes = {{1, 1, 3}, {0, 0, 2}};
    split.col_axes = {{2, 2, 4}};
    const RealMatrix m = tensor::flatten(t, split);
    tensor::DataTensor copy = t;
    for (double& v : copy.values) {
        v = -100.0;
    }
    tensor::unflatten_into(copy, split, m);
    for (int i1 = 1; i1 < 4; ++i1) {
        for (int a = 0; a < 2; ++a) {
            for (int j = 2; j < 6; ++j) {
                CHECK(copy.at({a, i1, j}) == t.at({a, i1, j}));
            }
        }
    }
}

TEST_CASE("reversing the split transposes the matrix") {
    const tensor::DataTensor t = random_tensor(2, 2, {3, 4, 5}, 22);
    tensor::SplitDescriptor split;
    split.row_axes = {{0, 0, 3}, {1, 0, 4}};
    split.col_axes = {{2, 0, 5}};
    tensor::SplitDescriptor reversed;
    reversed.row_axes = split.col_axes;
    reversed.col_axes = split.row_axes;
    const RealMatrix m = tensor::flatten(t, split);
    const RealMatrix mt = tensor::flatten(t, reversed);
    CHECK(linalg::max_abs(m - mt.transpose()) == 0.0);
}

TEST_CASE("qudit permutation relabels measurement axes") {
    const tensor::DataTensor t = random_tensor(3, 2, {2, 3, 4, 5}, 23);
    const std::vector<int> perm = {2, 3, 1};  // axis u of the result reads
                                              // source qudit perm[u-1]
    const tensor::DataTensor p = tensor::permute_qudits(t, perm);
    REQUIRE(p.shape.size() == 4);
    CHECK(p.shape[0] == t.shape[0]);
    CHECK(p.shape[1] == t.shape[2]);
    CHECK(p.shape[2] == t.shape[3]);
    CHECK(p.shape[3] == t.shape[1]);
    // flatten of the permuted tensor equals flatten of the source with axes
    // mapped through the permutation
    tensor::SplitDescriptor split;
    split.row_axes = {{0, 0, 2}, {1, 0, p.shape[1]}};
    split.col_axes = {{2, 0, p.shape[2]}, {3, 0, p.shape[3]}};
    tensor::SplitDescriptor mapped;
    mapped.row_axes = {{0, 0, 2}, {perm[0], 0, t.shape[perm[0]]}};
    mapped.col_axes = {{perm[1], 0, t.shape[perm[1]]},
                       {perm[2], 0, t.shape[perm[2]]}};
    CHECK(linalg::max_abs(tensor::flatten(p, split) -
                          tensor::flatten(t, mapped)) == 0.0);
    CHECK_THROWS_AS(tensor::permute_qudits(t, {1, 1, 2}),
                    RangeOutOfBoundsError);
}
