#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "pdtomo/errors.hpp"
#include "pdtomo/linalg.hpp"
#include "pdtomo/model.hpp"
#include "pdtomo/tensor.hpp"

using namespace pdtomo;
using linalg::ComplexMatrix;
using linalg::RealMatrix;

namespace {

double hermiticity_residual(const ComplexMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Independent route: contract coefficients directly instead of tracing
// operator products.
tensor::DataTensor contraction_oracle(const model::Devices& dev) {
    const int m = dev.state.m;
    const int d2 = dev.state.d * dev.state.d;
    std::vector<int> shape = {dev.state.settings};
    for (const auto& meas : dev.measurements) {
        shape.push_back(meas.settings);
    }
    tensor::DataTensor out = tensor::make_tensor(m, dev.state.d, shape);
    std::vector<int> idx(m + 1, 0);
    const int n_params = static_cast<int>(dev.state.coeffs.cols());
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        std::size_t rem = flat;
        for (int ax = m; ax >= 0; --ax) {
            idx[ax] = static_cast<int>(rem % shape[ax]);
            rem /= shape[ax];
        }
        double total = 0.0;
        for (int col = 0; col < n_params; ++col) {
            double term = dev.state.coeffs(idx[0], col);
            int fused = col;
            for (int u = m; u-- > 0;) {
                const int mu = fused % d2;
                fused /= d2;
                term *= dev.measurements[u].coeffs(mu, idx[u + 1]);
            }
            total += term;
        }
        out.values[flat] = total;
    }
    return out;
}

}  // namespace

TEST_CASE("qubit basis is the rescaled Pauli set") {
    const model::OperatorBasis basis = model::make_basis(2);
    REQUIRE(basis.sigma.size() == 4);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(basis.sigma[0](0, 0) - s) < 1e-15);
    CHECK(std::abs(basis.sigma[0](1, 1) - s) < 1e-15);
    CHECK(std::abs(basis.sigma[1](0, 1) - s) < 1e-15);  // X
    CHECK(std::abs(basis.sigma[1](1, 0) - s) < 1e-15);
    CHECK(std::abs(basis.sigma[2](0, 1) - std::complex<double>(0, -s)) <
          1e-15);  // Y
    CHECK(std::abs(basis.sigma[2](1, 0) - std::complex<double>(0, s)) < 1e-15);
    CHECK(std::abs(basis.sigma[3](0, 0) - s) < 1e-15);  // Z
    CHECK(std::abs(basis.sigma[3](1, 1) + s) < 1e-15);
}

TEST_CASE("basis Gram matrix is the identity for d up to 5") {
    for (int d = 2; d <= 5; ++d) {
        const model::OperatorBasis basis = model::make_basis(d);
        REQUIRE(static_cast<int>(basis.sigma.size()) == d * d);
        for (std::size_t i = 0; i < basis.sigma.size(); ++i) {
            CHECK(hermiticity_residual(basis.sigma[i]) < 1e-12);
            for (std::size_t j = 0; j < basis.sigma.size(); ++j) {
                const std::complex<double> overlap =
                    (basis.sigma[i] * basis.sigma[j]).trace();
                const double expected = (i == j) ? 1.0 : 0.0;
                CHECK(std::abs(overlap - expected) < 1e-12);
            }
        }
    }
    CHECK_THROWS_AS(model::make_basis(1), BadDimensionError);
}

TEST_CASE("random devices are deterministic per seed") {
    const model::Devices a = model::random_devices(2, 2, 6, {4, 5}, 42);
    const model::Devices b = model::random_devices(2, 2, 6, {4, 5}, 42);
    CHECK(a.state.coeffs == b.state.coeffs);
    for (int u = 0; u < 2; ++u) {
        CHECK(a.measurements[u].coeffs == b.measurements[u].coeffs);
    }
    const model::Devices c = model::random_devices(2, 2, 6, {4, 5}, 43);
    CHECK(a.state.coeffs != c.state.coeffs);
}

TEST_CASE("device invariants: unit-trace Hermitian states, Hermitian observables") {
    const model::Devices dev = model::random_devices(2, 3, 4, {3, 3}, 5);
    const model::OperatorBasis basis = model::make_basis(3);
    for (int a = 0; a < 4; ++a) {
        const ComplexMatrix rho = dev.state.state(a, basis);
        CHECK(hermiticity_residual(rho) < 1e-12);
        CHECK(std::abs(rho.trace() - std::complex<double>(1.0, 0.0)) < 1e-10);
    }
    for (const auto& meas : dev.measurements) {
        for (int i = 0; i < meas.settings; ++i) {
            CHECK(hermiticity_residual(meas.observable(i, basis)) < 1e-12);
        }
        // setting 0 is the identity observable
        const ComplexMatrix identity = meas.observable(0, basis);
        CHECK((identity - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() <
              1e-12);
    }
}

TEST_CASE("single-qudit data matrix has full rank") {
    const model::Devices dev = model::random_devices(1, 2, 4, {4}, 7);
    const tensor::DataTensor t = model::synthesize(dev, {});
    const RealMatrix m = tensor::flatten(t, tensor::full_split(t, {0}, {1}));
    CHECK(linalg::numerical_rank(m, 1e-10).numerical_rank == 4);
}

TEST_CASE("uncorrelated synthesis matches the coefficient contraction") {
    const model::Devices dev = model::random_devices(2, 2, 6, {5, 5}, 11);
    const tensor::DataTensor born = model::synthesize(dev, {});
    const tensor::DataTensor direct = contraction_oracle(dev);
    REQUIRE(born.size() == direct.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < born.size(); ++i) {
        worst = std::max(worst, std::abs(born.values[i] - direct.values[i]));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("uncorrelated rank bounds for two qubits") {
    const model::Devices dev = model::random_devices(2, 2, 20, {6, 6}, 13);
    const tensor::DataTensor t = model::synthesize(dev, {});
    const RealMatrix generic =
        tensor::flatten(t, tensor::full_split(t, {0}, {1, 2}));
    CHECK(linalg::numerical_rank(generic, 1e-10).numerical_rank <= 16);
    const RealMatrix effective =
        tensor::flatten(t, tensor::full_split(t, {0, 1}, {2}));
    CHECK(linalg::numerical_rank(effective, 1e-10).numerical_rank <= 4);
}

TEST_CASE("spam with epsilon 0 is bit-identical to none") {
    const model::Devices dev = model::random_devices(2, 2, 5, {4, 4}, 17);
    model::CorrelationConfig cfg;
    cfg.kind = model::CorrelationKind::spam;
    cfg.q = 2;
    cfg.epsilon = 0.0;
    cfg.seed = 99;
    const tensor::DataTensor with = model::synthesize(dev, cfg);
    model::CorrelationConfig none;
    none.seed = 99;
    const tensor::DataTensor without = model::synthesize(dev, none);
    CHECK(with.values == without.values);
}

TEST_CASE("spam(q) leaves the split that hides qudit q factorizable") {
    const model::Devices dev = model::random_devices(2, 2, 20, {6, 6}, 19);
    model::CorrelationConfig cfg;
    cfg.kind = model::CorrelationKind::spam;
    cfg.q = 2;
    cfg.epsilon = 0.1;
    cfg.seed = 19;
    const tensor::DataTensor t = model::synthesize(dev, cfg);
    // rows (a, j) fused with qudit-2 settings: still rank <= d^2
    const RealMatrix hidden =
        tensor::flatten(t, tensor::full_split(t, {0, 2}, {1}));
    CHECK(linalg::numerical_rank(hidden, 1e-10).numerical_rank <= 4);
    // rows (a, i): the correlated organization breaks the bound
    const RealMatrix exposed =
        tensor::flatten(t, tensor::full_split(t, {0, 1}, {2}));
    CHECK(linalg::numerical_rank(exposed, 1e-10).numerical_rank > 4);
}

TEST_CASE("nonlocal correlation raises the effective-state rank") {
    const model::Devices dev = model::random_devices(2, 2, 20, {6, 6}, 23);
    model::CorrelationConfig cfg;
    cfg.kind = model::CorrelationKind::nonlocal;
    cfg.p = 1;
    cfg.q = 2;
    cfg.epsilon = 0.1;
    cfg.seed = 23;
    const tensor::DataTensor t = model::synthesize(dev, cfg);
    const RealMatrix effective =
        tensor::flatten(t, tensor::full_split(t, {0, 1}, {2}));
    CHECK(linalg::numerical_rank(effective, 1e-10).numerical_rank > 4);
    // the generic organization still satisfies its own bound
    const RealMatrix generic =
        tensor::flatten(t, tensor::full_split(t, {0}, {1, 2}));
    CHECK(linalg::numerical_rank(generic, 1e-10).numerical_rank <= 16);
}

TEST_CASE("incompatible devices are rejected") {
    model::Devices dev = model::random_devices(2, 2, 4, {4, 4}, 29);
    dev.measurements.pop_back();
    CHECK_THROWS_AS(model::synthesize(dev, {}), IncompatibleDevicesError);
    model::Devices bad_pair = model::random_devices(2, 2, 4, {4, 4}, 29);
    model::CorrelationConfig cfg;
    cfg.kind = model::CorrelationKind::nonlocal;
    cfg.p = 2;
    cfg.q = 2;
    cfg.epsilon = 0.5;
    CHECK_THROWS_AS(model::synthesize(bad_pair, cfg),
                    IncompatibleDevicesError);
}

TEST_CASE("shot noise is seeded and scales as 1/sqrt(shots)") {
    const model::Devices dev = model::random_devices(2, 2, 6, {4, 4}, 31);
    const tensor::DataTensor clean = model::synthesize(dev, {});
    const tensor::DataTensor a = model::add_shot_noise(clean, 10000, 3);
    const tensor::DataTensor b = model::add_shot_noise(clean, 10000, 3);
    CHECK(a.values == b.values);
    const tensor::DataTensor c = model::add_shot_noise(clean, 10000, 4);
    CHECK(a.values != c.values);

    double worst = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        worst = std::max(worst, std::abs(a.values[i] - clean.values[i]));
    }
    CHECK(worst > 0.0);
    CHECK(worst < 5e-2);  // 5 sigma at 1e4 shots

    const tensor::DataTensor huge =
        model::add_shot_noise(clean, 1000000000000000000ULL, 5);
    double drift = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        drift = std::max(drift, std::abs(huge.values[i] - clean.values[i]));
    }
    CHECK(drift < 1e-8);
    CHECK_THROWS_AS(model::add_shot_noise(clean, 0, 1), Error);
}
