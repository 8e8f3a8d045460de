#pragma once
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "modnet/matrix.hpp"
#include "modnet/rng.hpp"

namespace modnet {

// Rank-one spike parameters for the deformed model W = beta*u*u^T + diag(d) + Z.
struct SpikedParams {
    double beta = 0.0;
    Eigen::VectorXd u;  // unit vector
    Eigen::VectorXd d;  // diagonal heterogeneity
};

struct GoeSpec {};
struct WignerExpSpec {};
struct ErdosRenyiSpec {
    double p;
};
struct CorrelationNullSpec {
    std::int64_t num_obs;  // N
};
struct SpikedGoeSpec {
    SpikedParams params;
};

struct EnsembleSpec {
    std::variant<GoeSpec, WignerExpSpec, ErdosRenyiSpec, CorrelationNullSpec, SpikedGoeSpec> kind;
    Eigen::Index n;
};

// Samplers are pure functions of (parameters, seed): same seed, same matrix.
SymmetricMatrix sample_goe(Eigen::Index n, Seed seed);
SymmetricMatrix sample_wigner_exp(Eigen::Index n, Seed seed);
SymmetricMatrix sample_er_adjacency(Eigen::Index n, double p, Seed seed);
SymmetricMatrix sample_correlation_null(Eigen::Index n, std::int64_t num_obs, Seed seed);

// beta*u*u^T + diag(d) + Z with Z a fresh GOE draw from `seed`. Setting
// zero_noise suppresses Z (test hook).
SymmetricMatrix sample_spiked(const SpikedParams& params, Eigen::Index n, Seed seed,
                              bool zero_noise = false);

// Two equal clusters: beta = sqrt(n), u = (+n^{-1/2},...,-n^{-1/2},...),
// d_i ~ Uniform[-sqrt(n), sqrt(n)].
SpikedParams make_balanced_spike(Eigen::Index n, Seed seed);

// Default sample count N = round(n^{5/2}) for the correlation null
// (round half to even).
std::int64_t correlation_default_num_obs(Eigen::Index n);

SymmetricMatrix sample_ensemble(const EnsembleSpec& spec, Seed seed);

}  // namespace modnet
