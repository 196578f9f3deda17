#pragma once

#include <cstdint>
#include <vector>

#include "pdtomo/linalg.hpp"
#include "pdtomo/tensor.hpp"

namespace pdtomo::model {

using linalg::ComplexMatrix;
using linalg::RealMatrix;

// Trace-orthonormal Hermitian operator basis for one qudit. sigma[0] is
// I/sqrt(d); the rest are the generalized traceless generators normalized so
// Tr(sigma_mu sigma_nu) = delta_mu_nu. With that normalization the basis is
// its own dual.
struct OperatorBasis {
    int d = 0;
    std::vector<ComplexMatrix> sigma;
    const std::vector<ComplexMatrix>& dual() const { return sigma; }
};

OperatorBasis make_basis(int d);

struct StateDevice {
    int settings = 0;  // N
    int m = 0;
    int d = 0;
    // Row a holds the coefficients of rho_a over the m-fold product basis,
    // fused row-major (leftmost qudit slowest). Column 0 is the identity
    // component and equals d^(-m/2) so every state has unit trace.
    RealMatrix coeffs;

    ComplexMatrix state(int a, const OperatorBasis& basis) const;
};

struct MeasurementDevice {
    int qudit = 0;     // 1-based
    int settings = 0;  // M_q
    int d = 0;
    // d^2 x M_q; column i holds the coefficients of Sigma_q^i. Column 0 is
    // reserved for the identity observable.
    RealMatrix coeffs;

    ComplexMatrix observable(int i, const OperatorBasis& basis) const;
};

struct Devices {
    StateDevice state;
    std::vector<MeasurementDevice> measurements;
};

enum class CorrelationKind { none, spam, nonlocal };

struct CorrelationConfig {
    CorrelationKind kind = CorrelationKind::none;
    int q = 0;  // spam target, or second member of the nonlocal pair
    int p = 0;  // first member of the nonlocal pair (p < q)
    double epsilon = 0.0;
    std::uint64_t seed = 0;
};

// Generic random devices: states are random Hermitian perturbations of the
// maximally mixed state (unit trace), observables random Hermitian
// combinations with setting 0 pinned to the identity. Square flattenings of
// generic setting blocks are kept invertible (condition < 1e6), resampling
// up to 100 times.
Devices random_devices(int m, int d, int n_states,
                       const std::vector<int>& m_list, std::uint64_t seed);

tensor::DataTensor synthesize(const Devices& devices,
                              const CorrelationConfig& config);

tensor::DataTensor add_shot_noise(const tensor::DataTensor& t,
                                  std::uint64_t shots, std::uint64_t seed);

}  // namespace pdtomo::model
