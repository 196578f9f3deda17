#include "pdtomo/model.hpp"

#include <cmath>
#include <complex>
#include <cstdlib>
#include <string>

#include "json.hpp"
#include "pdtomo/errors.hpp"
#include "pdtomo/rng.hpp"

namespace pdtomo::model {

namespace {

using Complex = std::complex<double>;

constexpr double kConditionCap = 1e6;
constexpr int kResampleBudget = 100;

int ipow(int base, int exp) {
    int out = 1;
    for (int i = 0; i < exp; ++i) {
        out *= base;
    }
    return out;
}

// m-fold product-basis element for a fused coefficient index.
ComplexMatrix product_basis_element(const OperatorBasis& basis, int m,
                                    int fused) {
    const int d2 = basis.d * basis.d;
    std::vector<int> mu(m, 0);
    for (int u = m; u-- > 0;) {
        mu[u] = fused % d2;
        fused /= d2;
    }
    ComplexMatrix out = basis.sigma[mu[0]];
    for (int u = 1; u < m; ++u) {
        ComplexMatrix next(out.rows() * basis.d, out.cols() * basis.d);
        for (Eigen::Index r = 0; r < out.rows(); ++r) {
            for (Eigen::Index c = 0; c < out.cols(); ++c) {
                next.block(r * basis.d, c * basis.d, basis.d, basis.d) =
                    out(r, c) * basis.sigma[mu[u]];
            }
        }
        out = std::move(next);
    }
    return out;
}

RealMatrix state_coefficients(int n_states, int m, int d, std::uint64_t key) {
    const int n_params = ipow(d * d, m);
    const double identity_coeff = std::pow(static_cast<double>(d), -0.5 * m);
    const double scale = 0.5 * identity_coeff;
    RealMatrix coeffs(n_states, n_params);
    for (int a = 0; a < n_states; ++a) {
        rng::Stream stream(rng::derive_key(key, "state-row",
                                           {static_cast<std::uint64_t>(a)}));
        coeffs(a, 0) = identity_coeff;
        for (int col = 1; col < n_params; ++col) {
            coeffs(a, col) = scale * stream.normal();
        }
    }
    return coeffs;
}

RealMatrix measurement_coefficients(int settings, int d, std::uint64_t key) {
    const int d2 = d * d;
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    RealMatrix coeffs = RealMatrix::Zero(d2, settings);
    coeffs(0, 0) = std::sqrt(static_cast<double>(d));  // identity observable
    for (int i = 1; i < settings; ++i) {
        rng::Stream stream(rng::derive_key(key, "meas-col",
                                           {static_cast<std::uint64_t>(i)}));
        for (int mu = 0; mu < d2; ++mu) {
            coeffs(mu, i) = scale * stream.normal();
        }
    }
    return coeffs;
}

bool blocks_well_conditioned(const RealMatrix& m, int block, bool by_rows) {
    const int limit = by_rows ? static_cast<int>(m.rows())
                              : static_cast<int>(m.cols());
    for (int start = 0; start + block <= limit; start += block) {
        const RealMatrix sub =
            by_rows ? RealMatrix(m.middleRows(start, block))
                    : RealMatrix(m.middleCols(start, block));
        if (!(linalg::condition_estimate(sub) < kConditionCap)) {
            return false;
        }
    }
    return true;
}

// Slice of the state coefficients with every qudit except `which` pinned to
// its identity component: rows a, columns the d^2 parameters of `which`.
RealMatrix single_qudit_slice(const RealMatrix& coeffs, int m, int d,
                              int which) {
    const int d2 = d * d;
    RealMatrix out(coeffs.rows(), d2);
    for (int mu = 0; mu < d2; ++mu) {
        int fused = 0;
        for (int u = 0; u < m; ++u) {
            fused = fused * d2 + (u == which ? mu : 0);
        }
        out.col(mu) = coeffs.col(fused);
    }
    return out;
}

bool devices_well_conditioned(const Devices& dev) {
    const int d2 = dev.state.d * dev.state.d;
    for (const MeasurementDevice& meas : dev.measurements) {
        if (!blocks_well_conditioned(meas.coeffs, d2, /*by_rows=*/false)) {
            return false;
        }
    }
    const int full = ipow(d2, dev.state.m);
    if (!blocks_well_conditioned(dev.state.coeffs, full, /*by_rows=*/true)) {
        return false;
    }
    for (int u = 0; u < dev.state.m; ++u) {
        const RealMatrix slice =
            single_qudit_slice(dev.state.coeffs, dev.state.m, dev.state.d, u);
        if (!blocks_well_conditioned(slice, d2, /*by_rows=*/true)) {
            return false;
        }
    }
    return true;
}

void check_devices(const Devices& dev) {
    const int m = dev.state.m;
    if (static_cast<int>(dev.measurements.size()) != m) {
        throw IncompatibleDevicesError("measurement device count != m");
    }
    for (int u = 0; u < m; ++u) {
        const MeasurementDevice& meas = dev.measurements[u];
        if (meas.qudit != u + 1 || meas.d != dev.state.d) {
            throw IncompatibleDevicesError(
                "measurement device " + std::to_string(u + 1) +
                " does not match the state device");
        }
    }
}

std::string synthesis_provenance(const CorrelationConfig& cfg) {
    nlohmann::json corr;
    switch (cfg.kind) {
        case CorrelationKind::none:
            corr = {{"kind", "none"}};
            break;
        case CorrelationKind::spam:
            corr = {{"kind", "spam"}, {"q", cfg.q}, {"epsilon", cfg.epsilon}};
            break;
        case CorrelationKind::nonlocal:
            corr = {{"kind", "nonlocal"},
                    {"p", cfg.p},
                    {"q", cfg.q},
                    {"epsilon", cfg.epsilon}};
            break;
    }
    nlohmann::json j = {{"kind", "synthesized"},
                        {"seed", cfg.seed},
                        {"correlation", corr}};
    return j.dump();
}

}  // namespace

OperatorBasis make_basis(int d) {
    if (d < 2) {
        throw BadDimensionError("qudit dimension must be at least 2");
    }
    OperatorBasis basis;
    basis.d = d;
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    basis.sigma.push_back(ComplexMatrix::Identity(d, d) * inv_sqrt_d);
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            ComplexMatrix sym = ComplexMatrix::Zero(d, d);
            sym(j, k) = inv_sqrt2;
            sym(k, j) = inv_sqrt2;
            basis.sigma.push_back(sym);
            ComplexMatrix asym = ComplexMatrix::Zero(d, d);
            asym(j, k) = Complex(0.0, -inv_sqrt2);
            asym(k, j) = Complex(0.0, inv_sqrt2);
            basis.sigma.push_back(asym);
        }
    }
    for (int l = 1; l < d; ++l) {
        ComplexMatrix diag = ComplexMatrix::Zero(d, d);
        const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
        for (int j = 0; j < l; ++j) {
            diag(j, j) = norm;
        }
        diag(l, l) = -static_cast<double>(l) * norm;
        basis.sigma.push_back(diag);
    }
    return basis;
}

ComplexMatrix StateDevice::state(int a, const OperatorBasis& basis) const {
    const int dim = ipow(d, m);
    ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
    for (int col = 0; col < coeffs.cols(); ++col) {
        rho += coeffs(a, col) * product_basis_element(basis, m, col);
    }
    return rho;
}

ComplexMatrix MeasurementDevice::observable(int i,
                                            const OperatorBasis& basis) const {
    ComplexMatrix sigma = ComplexMatrix::Zero(d, d);
    for (int mu = 0; mu < d * d; ++mu) {
        sigma += coeffs(mu, i) * basis.dual()[mu];
    }
    return sigma;
}

Devices random_devices(int m, int d, int n_states,
                       const std::vector<int>& m_list, std::uint64_t seed) {
    if (m < 1) {
        throw BadDimensionError("need at least one qudit");
    }
    if (d < 2) {
        throw BadDimensionError("qudit dimension must be at least 2");
    }
    if (n_states < 1) {
        throw Error("need at least one state setting");
    }
    if (static_cast<int>(m_list.size()) != m) {
        throw IncompatibleDevicesError("need one setting count per qudit");
    }
    for (int settings : m_list) {
        if (settings < 1) {
            throw Error("need at least one measurement setting per qudit");
        }
    }
    for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
        const std::uint64_t key = rng::derive_key(
            seed, "devices", {static_cast<std::uint64_t>(attempt)});
        Devices dev;
        dev.state.settings = n_states;
        dev.state.m = m;
        dev.state.d = d;
        dev.state.coeffs = state_coefficients(n_states, m, d,
                                              rng::derive_key(key, "state"));
        for (int u = 0; u < m; ++u) {
            MeasurementDevice meas;
            meas.qudit = u + 1;
            meas.settings = m_list[u];
            meas.d = d;
            meas.coeffs = measurement_coefficients(
                m_list[u], d,
                rng::derive_key(key, "meas", {static_cast<std::uint64_t>(u)}));
            dev.measurements.push_back(std::move(meas));
        }
        if (devices_well_conditioned(dev)) {
            return dev;
        }
    }
    throw ConditioningFailureError(
        "could not draw well-conditioned devices within the resample budget");
}

tensor::DataTensor synthesize(const Devices& dev,
                              const CorrelationConfig& config) {
    check_devices(dev);
    const int m = dev.state.m;
    const int d = dev.state.d;
    const int d2 = d * d;
    const int dim = ipow(d, m);
    const int n_params = ipow(d2, m);

    CorrelationConfig cfg = config;
    if (cfg.epsilon == 0.0) {
        cfg.kind = CorrelationKind::none;  // epsilon 0 is exactly uncorrelated
    }
    if (cfg.kind == CorrelationKind::spam && (cfg.q < 1 || cfg.q > m)) {
        throw IncompatibleDevicesError("spam target qudit out of range");
    }
    if (cfg.kind == CorrelationKind::nonlocal &&
        (cfg.p < 1 || cfg.q <= cfg.p || cfg.q > m)) {
        throw IncompatibleDevicesError("nonlocal pair must satisfy 1 <= p < q <= m");
    }

    const OperatorBasis basis = make_basis(d);
    std::vector<ComplexMatrix> full_basis(n_params);
    for (int col = 0; col < n_params; ++col) {
        full_basis[col] = product_basis_element(basis, m, col);
    }

    // Per-qudit observables.
    std::vector<std::vector<ComplexMatrix>> obs(m);
    for (int u = 0; u < m; ++u) {
        obs[u].reserve(dev.measurements[u].settings);
        for (int i = 0; i < dev.measurements[u].settings; ++i) {
            obs[u].push_back(dev.measurements[u].observable(i, basis));
        }
    }

    // Base states.
    std::vector<ComplexMatrix> rho(dev.state.settings);
    for (int a = 0; a < dev.state.settings; ++a) {
        ComplexMatrix acc = ComplexMatrix::Zero(dim, dim);
        for (int col = 0; col < n_params; ++col) {
            acc += dev.state.coeffs(a, col) * full_basis[col];
        }
        rho[a] = std::move(acc);
    }

    // spam(q): realized state for a setting tuple depends jointly on
    // (a, i_q); the perturbation tau is unit trace with a seeded traceless
    // random part.
    std::vector<std::vector<ComplexMatrix>> realized;
    if (cfg.kind == CorrelationKind::spam) {
        const double identity_coeff =
            std::pow(static_cast<double>(d), -0.5 * m);
        const double scale = 0.5 * identity_coeff;
        const int mq = dev.measurements[cfg.q - 1].settings;
        realized.assign(dev.state.settings, {});
        for (int a = 0; a < dev.state.settings; ++a) {
            realized[a].reserve(mq);
            for (int iq = 0; iq < mq; ++iq) {
                rng::Stream stream(rng::derive_key(
                    cfg.seed, "spam-tau",
                    {static_cast<std::uint64_t>(a),
                     static_cast<std::uint64_t>(iq)}));
                ComplexMatrix tau = identity_coeff * full_basis[0];
                for (int col = 1; col < n_params; ++col) {
                    tau += scale * stream.normal() * full_basis[col];
                }
                realized[a].push_back((1.0 - cfg.epsilon) * rho[a] +
                                      cfg.epsilon * tau);
            }
        }
    }

    // nonlocal(p, q): realized joint observable on the pair carries a seeded
    // non-product Hermitian term; its identity-pair component stays zero.
    std::vector<std::vector<ComplexMatrix>> pair_obs;
    const int p_idx = cfg.p - 1;
    const int q_idx = cfg.q - 1;
    if (cfg.kind == CorrelationKind::nonlocal) {
        std::vector<ComplexMatrix> pair_basis(d2 * d2);
        for (int col = 0; col < d2 * d2; ++col) {
            pair_basis[col] = product_basis_element(basis, 2, col);
        }
        const int mp = dev.measurements[p_idx].settings;
        const int mq = dev.measurements[q_idx].settings;
        pair_obs.assign(mp, {});
        for (int i = 0; i < mp; ++i) {
            pair_obs[i].reserve(mq);
            for (int j = 0; j < mq; ++j) {
                rng::Stream stream(rng::derive_key(
                    cfg.seed, "nonlocal-gamma",
                    {static_cast<std::uint64_t>(i),
                     static_cast<std::uint64_t>(j)}));
                ComplexMatrix gamma = ComplexMatrix::Zero(d2, d2);
                for (int col = 1; col < d2 * d2; ++col) {
                    gamma += stream.normal() * pair_basis[col];
                }
                ComplexMatrix joint = ComplexMatrix::Zero(d2, d2);
                const ComplexMatrix& sp = obs[p_idx][i];
                const ComplexMatrix& sq = obs[q_idx][j];
                for (int r = 0; r < d; ++r) {
                    for (int c = 0; c < d; ++c) {
                        joint.block(r * d, c * d, d, d) = sp(r, c) * sq;
                    }
                }
                // epsilon measures the perturbation relative to the product
                // term, so gamma is a unit direction rescaled per pair.
                const double scale =
                    std::max(joint.norm(), 1.0) / std::max(gamma.norm(), 1e-300);
                pair_obs[i].push_back(joint + cfg.epsilon * scale * gamma);
            }
        }
    }

    std::vector<int> shape(m + 1);
    shape[0] = dev.state.settings;
    for (int u = 0; u < m; ++u) {
        shape[u + 1] = dev.measurements[u].settings;
    }
    tensor::DataTensor out = tensor::make_tensor(m, d, shape);
    out.provenance_json = synthesis_provenance(cfg);

    // Digit tables for the full Hilbert space.
    std::vector<std::vector<int>> digits(dim, std::vector<int>(m));
    for (int x = 0; x < dim; ++x) {
        int rem = x;
        for (int u = m; u-- > 0;) {
            digits[x][u] = rem % d;
            rem /= d;
        }
    }

    std::vector<int> idx(m + 1, 0);
    ComplexMatrix joint(dim, dim);
    const std::size_t total = out.size();
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (int ax = m; ax >= 0; --ax) {
            idx[ax] = static_cast<int>(rem % shape[ax]);
            rem /= shape[ax];
        }
        // Joint observable for this setting tuple.
        for (int x = 0; x < dim; ++x) {
            for (int y = 0; y < dim; ++y) {
                Complex v(1.0, 0.0);
                if (cfg.kind == CorrelationKind::nonlocal) {
                    const int xp = digits[x][p_idx], yp = digits[y][p_idx];
                    const int xq = digits[x][q_idx], yq = digits[y][q_idx];
                    v = pair_obs[idx[p_idx + 1]][idx[q_idx + 1]](xp * d + xq,
                                                                 yp * d + yq);
                    for (int u = 0; u < m; ++u) {
                        if (u != p_idx && u != q_idx) {
                            v *= obs[u][idx[u + 1]](digits[x][u], digits[y][u]);
                        }
                    }
                } else {
                    for (int u = 0; u < m; ++u) {
                        v *= obs[u][idx[u + 1]](digits[x][u], digits[y][u]);
                    }
                }
                joint(x, y) = v;
            }
        }
        const ComplexMatrix& state_matrix =
            (cfg.kind == CorrelationKind::spam)
                ? realized[idx[0]][idx[cfg.q]]
                : rho[idx[0]];
        Complex trace(0.0, 0.0);
        for (int x = 0; x < dim; ++x) {
            for (int y = 0; y < dim; ++y) {
                trace += state_matrix(x, y) * joint(y, x);
            }
        }
        if (std::abs(trace.imag()) >= 1e-12) {
            throw Error("synthesized value has a non-negligible imaginary part");
        }
        out.values[flat] = trace.real();
    }
    return out;
}

tensor::DataTensor add_shot_noise(const tensor::DataTensor& t,
                                  std::uint64_t shots, std::uint64_t seed) {
    if (shots < 1) {
        throw Error("shots must be at least 1");
    }
    tensor::DataTensor out = t;
    const double sigma = 1.0 / std::sqrt(static_cast<double>(shots));
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        rng::Stream stream(rng::derive_key(seed, "shot-noise", {i}));
        out.values[i] += sigma * stream.normal();
    }
    nlohmann::json prov;
    if (!t.provenance_json.empty()) {
        prov = nlohmann::json::parse(t.provenance_json, nullptr, false);
        if (prov.is_discarded()) {
            prov = nlohmann::json{{"kind", "unknown"}};
        }
    }
    prov["shots"] = shots;
    prov["shot_seed"] = seed;
    out.provenance_json = prov.dump();
    return out;
}

}  // namespace pdtomo::model
