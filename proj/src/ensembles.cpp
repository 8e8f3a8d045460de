#include "modnet/ensembles.hpp"

#include <cfenv>
#include <cmath>
#include <random>
#include <stdexcept>

namespace modnet {

namespace {

void check_dim(Eigen::Index n, Eigen::Index min_n) {
    if (n < min_n)
        throw std::invalid_argument("ensemble sampler: dimension must be >= " +
                                    std::to_string(min_n));
}

}  // namespace

SymmetricMatrix sample_goe(Eigen::Index n, Seed seed) {
    check_dim(n, 1);
    RngStream rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd m(n, n);
    const double sqrt2 = std::sqrt(2.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = sqrt2 * normal(rng);
        for (Eigen::Index j = i + 1; j < n; ++j) m(i, j) = normal(rng);
    }
    return SymmetricMatrix(std::move(m));
}

SymmetricMatrix sample_wigner_exp(Eigen::Index n, Seed seed) {
    check_dim(n, 1);
    RngStream rng(seed);
    std::exponential_distribution<double> expo(1.0);
    // Symmetrize a fully iid Exp(1) matrix: W = (X + X^T)/sqrt(2) with
    // X_ij = E_ij - 1. Off-diagonal entries are (E + E' - 2)/sqrt(2)
    // (mean 0, variance 1) and diagonal entries sqrt(2)*(E - 1)
    // (variance 2), matching the GOE first two moments.
    Eigen::MatrixXd x(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) x(i, j) = expo(rng) - 1.0;
    Eigen::MatrixXd m = (x + x.transpose()) / std::sqrt(2.0);
    return SymmetricMatrix(std::move(m));
}

SymmetricMatrix sample_er_adjacency(Eigen::Index n, double p, Seed seed) {
    check_dim(n, 1);
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("sample_er_adjacency: p must lie in (0,1)");
    RngStream rng(seed);
    std::bernoulli_distribution bern(p);
    const double scale = 1.0 / std::sqrt(p * (1.0 - p));
    const double sqrt2 = std::sqrt(2.0);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = sqrt2 * ((bern(rng) ? 1.0 : 0.0) - p) * scale;
        for (Eigen::Index j = i + 1; j < n; ++j)
            m(i, j) = ((bern(rng) ? 1.0 : 0.0) - p) * scale;
    }
    return SymmetricMatrix(std::move(m));
}

SymmetricMatrix sample_correlation_null(Eigen::Index n, std::int64_t num_obs, Seed seed) {
    check_dim(n, 2);
    if (num_obs < static_cast<std::int64_t>(n) + 2)
        throw std::invalid_argument(
            "sample_correlation_null: need N >= n + 2 observations for a "
            "full-rank scatter matrix");
    RngStream rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    // The centered scatter matrix of N iid N(0, I_n) observations is
    // Wishart_n(N-1, I_n); sample it directly via the Bartlett
    // decomposition S = L L^T instead of materialising the N x n data.
    const double dof = static_cast<double>(num_obs - 1);
    Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        std::chi_squared_distribution<double> chi2(dof - static_cast<double>(i));
        chol(i, i) = std::sqrt(chi2(rng));
        for (Eigen::Index j = 0; j < i; ++j) chol(i, j) = normal(rng);
    }
    Eigen::MatrixXd scatter = chol * chol.transpose();

    const double sqrt_n_obs = std::sqrt(static_cast<double>(num_obs));
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double r = scatter(i, j) / std::sqrt(scatter(i, i) * scatter(j, j));
            out(i, j) = sqrt_n_obs * r;
            out(j, i) = out(i, j);
        }
    }
    return SymmetricMatrix(std::move(out));
}

SymmetricMatrix sample_spiked(const SpikedParams& params, Eigen::Index n, Seed seed,
                              bool zero_noise) {
    check_dim(n, 1);
    if (params.u.size() != n || params.d.size() != n)
        throw std::invalid_argument("sample_spiked: u and d must have length n");
    if (std::abs(params.u.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("sample_spiked: u must be a unit vector");
    Eigen::MatrixXd m = params.beta * (params.u * params.u.transpose());
    m += params.d.asDiagonal();
    if (!zero_noise) m += sample_goe(n, seed).mat();
    return SymmetricMatrix(std::move(m));
}

SpikedParams make_balanced_spike(Eigen::Index n, Seed seed) {
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("make_balanced_spike: n must be even and >= 2");
    const double root_n = std::sqrt(static_cast<double>(n));
    SpikedParams params;
    params.beta = root_n;
    params.u = Eigen::VectorXd::Constant(n, 1.0 / root_n);
    params.u.tail(n / 2) *= -1.0;
    RngStream rng(seed);
    std::uniform_real_distribution<double> unif(-root_n, root_n);
    params.d.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) params.d(i) = unif(rng);
    return params;
}

std::int64_t correlation_default_num_obs(Eigen::Index n) {
    const double v = std::pow(static_cast<double>(n), 2.5);
    std::fesetround(FE_TONEAREST);  // round half to even
    return static_cast<std::int64_t>(std::nearbyint(v));
}

SymmetricMatrix sample_ensemble(const EnsembleSpec& spec, Seed seed) {
    return std::visit(
        [&](const auto& k) -> SymmetricMatrix {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, GoeSpec>) {
                return sample_goe(spec.n, seed);
            } else if constexpr (std::is_same_v<T, WignerExpSpec>) {
                return sample_wigner_exp(spec.n, seed);
            } else if constexpr (std::is_same_v<T, ErdosRenyiSpec>) {
                return sample_er_adjacency(spec.n, k.p, seed);
            } else if constexpr (std::is_same_v<T, CorrelationNullSpec>) {
                return sample_correlation_null(spec.n, k.num_obs, seed);
            } else {
                return sample_spiked(k.params, spec.n, seed);
            }
        },
        spec.kind);
}

}  // namespace modnet
