#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pdtomo/linalg.hpp"

namespace pdtomo::tensor {

// Contiguous slice of one tensor axis. Axis 0 is the state-setting axis,
// axis q (1-based) is the measurement-setting axis of qudit q.
struct AxisRange {
    int axis = 0;
    int start = 0;
    int count = 0;
};

// Which axes fuse into rows and which into columns. Fusion is row-major in
// the listed order: leftmost axis slowest. Every tensor axis must appear in
// exactly one of the two lists (single-setting axes as 1-element ranges).
struct SplitDescriptor {
    std::vector<AxisRange> row_axes;
    std::vector<AxisRange> col_axes;
};

struct DataTensor {
    int m = 0;  // qudit count
    int d = 0;  // qudit dimension
    std::vector<int> shape;       // (N, M_1, ..., M_m)
    std::vector<double> values;   // row-major flat
    std::string provenance_json;  // synthesis metadata or "ingested" record

    std::size_t flat_index(const std::vector<int>& idx) const;
    double at(const std::vector<int>& idx) const;
    double& at(const std::vector<int>& idx);
    std::size_t size() const { return values.size(); }
};

DataTensor make_tensor(int m, int d, std::vector<int> shape);

/// Fused pair index a*d + b.
int fuse(int a, int b, int d);
std::pair<int, int> defuse(int fused, int d);

linalg::RealMatrix flatten(const DataTensor& t, const SplitDescriptor& split);

// Inverse of flatten over the same selection; used to check losslessness.
void unflatten_into(DataTensor& t, const SplitDescriptor& split,
                    const linalg::RealMatrix& m);

// Relabels qudits: result's qudit-u axis is the source's qudit-perm[u-1]
// axis (perm is 1-based, size m). The state axis is untouched.
DataTensor permute_qudits(const DataTensor& t, const std::vector<int>& perm);

// Full-axis split helper: every listed axis with its complete range.
SplitDescriptor full_split(const DataTensor& t, const std::vector<int>& row_axes,
                           const std::vector<int>& col_axes);

}  // namespace pdtomo::tensor
