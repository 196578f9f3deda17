#include "pdtomo/tensor.hpp"

#include <algorithm>
#include <numeric>

#include "pdtomo/errors.hpp"

namespace pdtomo::tensor {

namespace {

std::size_t shape_product(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int s : shape) {
        n *= static_cast<std::size_t>(s);
    }
    return n;
}

// Validates coverage and bounds, returns ranges ordered as (rows, cols).
void check_split(const DataTensor& t, const SplitDescriptor& split) {
    const int n_axes = static_cast<int>(t.shape.size());
    std::vector<int> seen(n_axes, 0);
    for (const auto* list : {&split.row_axes, &split.col_axes}) {
        for (const AxisRange& r : *list) {
            if (r.axis < 0 || r.axis >= n_axes) {
                throw RangeOutOfBoundsError("axis " + std::to_string(r.axis) +
                                            " does not exist");
            }
            if (r.count < 1 || r.start < 0 ||
                r.start + r.count > t.shape[r.axis]) {
                throw RangeOutOfBoundsError(
                    "range [" + std::to_string(r.start) + ", " +
                    std::to_string(r.start + r.count) + ") exceeds axis " +
                    std::to_string(r.axis) + " of size " +
                    std::to_string(t.shape[r.axis]));
            }
            if (seen[r.axis]++) {
                throw AxisCoveredTwiceError("axis " + std::to_string(r.axis) +
                                            " listed more than once");
            }
        }
    }
    for (int ax = 0; ax < n_axes; ++ax) {
        if (!seen[ax]) {
            throw SplitError("axis " + std::to_string(ax) +
                             " is not covered by the split");
        }
    }
}

}  // namespace

std::size_t DataTensor::flat_index(const std::vector<int>& idx) const {
    std::size_t flat = 0;
    for (std::size_t ax = 0; ax < shape.size(); ++ax) {
        flat = flat * static_cast<std::size_t>(shape[ax]) +
               static_cast<std::size_t>(idx[ax]);
    }
    return flat;
}

double DataTensor::at(const std::vector<int>& idx) const {
    return values[flat_index(idx)];
}

double& DataTensor::at(const std::vector<int>& idx) {
    return values[flat_index(idx)];
}

DataTensor make_tensor(int m, int d, std::vector<int> shape) {
    DataTensor t;
    t.m = m;
    t.d = d;
    t.shape = std::move(shape);
    t.values.assign(shape_product(t.shape), 0.0);
    return t;
}

int fuse(int a, int b, int d) {
    if (a < 0 || a >= d || b < 0 || b >= d) {
        throw RangeOutOfBoundsError("fuse indices must lie in [0, d)");
    }
    return a * d + b;
}

std::pair<int, int> defuse(int fused, int d) {
    if (fused < 0 || fused >= d * d) {
        throw RangeOutOfBoundsError("fused index must lie in [0, d^2)");
    }
    return {fused / d, fused % d};
}

linalg::RealMatrix flatten(const DataTensor& t, const SplitDescriptor& split) {
    check_split(t, split);
    std::size_t n_rows = 1;
    std::size_t n_cols = 1;
    for (const AxisRange& r : split.row_axes) {
        n_rows *= static_cast<std::size_t>(r.count);
    }
    for (const AxisRange& r : split.col_axes) {
        n_cols *= static_cast<std::size_t>(r.count);
    }
    linalg::RealMatrix out(n_rows, n_cols);
    std::vector<int> idx(t.shape.size(), 0);
    for (std::size_t row = 0; row < n_rows; ++row) {
        std::size_t rem = row;
        for (std::size_t i = split.row_axes.size(); i-- > 0;) {
            const AxisRange& r = split.row_axes[i];
            idx[r.axis] = r.start + static_cast<int>(rem % r.count);
            rem /= r.count;
        }
        for (std::size_t col = 0; col < n_cols; ++col) {
            std::size_t crem = col;
            for (std::size_t i = split.col_axes.size(); i-- > 0;) {
                const AxisRange& r = split.col_axes[i];
                idx[r.axis] = r.start + static_cast<int>(crem % r.count);
                crem /= r.count;
            }
            out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                t.at(idx);
        }
    }
    return out;
}

void unflatten_into(DataTensor& t, const SplitDescriptor& split,
                    const linalg::RealMatrix& m) {
    check_split(t, split);
    std::vector<int> idx(t.shape.size(), 0);
    for (Eigen::Index row = 0; row < m.rows(); ++row) {
        std::size_t rem = static_cast<std::size_t>(row);
        for (std::size_t i = split.row_axes.size(); i-- > 0;) {
            const AxisRange& r = split.row_axes[i];
            idx[r.axis] = r.start + static_cast<int>(rem % r.count);
            rem /= r.count;
        }
        for (Eigen::Index col = 0; col < m.cols(); ++col) {
            std::size_t crem = static_cast<std::size_t>(col);
            for (std::size_t i = split.col_axes.size(); i-- > 0;) {
                const AxisRange& r = split.col_axes[i];
                idx[r.axis] = r.start + static_cast<int>(crem % r.count);
                crem /= r.count;
            }
            t.at(idx) = m(row, col);
        }
    }
}

DataTensor permute_qudits(const DataTensor& t, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != t.m) {
        throw RangeOutOfBoundsError("permutation size must equal qudit count");
    }
    std::vector<char> hit(t.m, 0);
    for (int q : perm) {
        if (q < 1 || q > t.m || hit[q - 1]++) {
            throw RangeOutOfBoundsError("invalid qudit permutation");
        }
    }
    std::vector<int> shape(t.shape.size());
    shape[0] = t.shape[0];
    for (int u = 1; u <= t.m; ++u) {
        shape[u] = t.shape[perm[u - 1]];
    }
    DataTensor out = make_tensor(t.m, t.d, shape);
    std::vector<int> src(t.shape.size(), 0);
    std::vector<int> dst(t.shape.size(), 0);
    const std::size_t total = out.size();
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (std::size_t ax = shape.size(); ax-- > 0;) {
            dst[ax] = static_cast<int>(rem % shape[ax]);
            rem /= shape[ax];
        }
        src[0] = dst[0];
        for (int u = 1; u <= t.m; ++u) {
            src[perm[u - 1]] = dst[u];
        }
        out.values[flat] = t.at(src);
    }
    return out;
}

SplitDescriptor full_split(const DataTensor& t, const std::vector<int>& row_axes,
                           const std::vector<int>& col_axes) {
    SplitDescriptor split;
    for (int ax : row_axes) {
        if (ax < 0 || ax >= static_cast<int>(t.shape.size())) {
            throw RangeOutOfBoundsError("axis " + std::to_string(ax));
        }
        split.row_axes.push_back({ax, 0, t.shape[ax]});
    }
    for (int ax : col_axes) {
        if (ax < 0 || ax >= static_cast<int>(t.shape.size())) {
            throw RangeOutOfBoundsError("axis " + std::to_string(ax));
        }
        split.col_axes.push_back({ax, 0, t.shape[ax]});
    }
    return split;
}

}  // namespace pdtomo::tensor
