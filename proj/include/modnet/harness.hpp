#pragma once
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <string>
#include <vector>

#include "modnet/ensembles.hpp"
#include "modnet/hypothesis.hpp"
#include "modnet/laws.hpp"

namespace modnet {

enum class ReferenceLaw { NormalLimit, ConvolutionF };

enum class EnsembleKind { Goe, WignerExp, ErdosRenyi, CorrelationNull, Spiked };

std::string ensemble_kind_name(EnsembleKind k);

// Empirical rejection rates pr(stat > q_{1-alpha}) of the normalized
// modularity against a reference law's quantiles.
struct CalibrationReport {
    EnsembleKind ensemble = EnsembleKind::Goe;
    ReferenceLaw law = ReferenceLaw::ConvolutionF;
    std::vector<std::int64_t> n_values;
    std::vector<double> alphas;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
    // cells[i][j]: ensemble n_values[i], level alphas[j]
    std::vector<std::vector<double>> cells;
    std::vector<std::vector<double>> std_errors;
};

struct PowerReport {
    std::vector<std::int64_t> n_values;
    double alpha = 0.05;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
    double beta_scale = 1.0;  // beta = beta_scale * sqrt(n)
    std::vector<TestMethod> methods;
    // powers[i][j]: n_values[i], methods[j]
    std::vector<std::vector<double>> powers;
    std::vector<std::vector<double>> std_errors;
};

struct CorrelationReport {
    std::vector<std::int64_t> n_values;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
    std::vector<double> cor_ab;        // cor(A_n, B_n) per n
    std::vector<double> cor_q_lambda;  // cor(Q/n, n^{1/6} lambda_1) per n
    // Optional scatter of (Q/n, n^{1/6} lambda_1) pairs, capped per n.
    std::vector<std::vector<std::pair<double, double>>> scatter;
};

struct QuantileSummary {
    double q05 = 0, q25 = 0, q50 = 0, q75 = 0, q95 = 0;
};

struct ComparisonReport {
    std::vector<std::int64_t> n_values;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
    double beta_scale = 2.0;
    // [i][v]: n_values[i], statistic v in {Q/n, centered-l1, centered-4/pi}
    std::vector<std::array<QuantileSummary, 3>> null_quantiles;
    std::vector<std::array<QuantileSummary, 3>> alt_quantiles;
};

struct HarnessConfig {
    unsigned threads = 0;  // 0 => hardware concurrency
    const Tw1Table* tw1 = nullptr;
    std::size_t conv_samples = 100000;
};

CalibrationReport run_calibration(EnsembleKind ensemble, const std::vector<std::int64_t>& n_values,
                                  const std::vector<double>& alphas, std::uint64_t reps,
                                  ReferenceLaw law, std::uint64_t seed,
                                  const HarnessConfig& cfg);

PowerReport run_power_study(const std::vector<std::int64_t>& n_values, double alpha,
                            std::uint64_t reps, std::uint64_t seed, const HarnessConfig& cfg,
                            double beta_scale = 1.0);

CorrelationReport run_correlation_study(const std::vector<std::int64_t>& n_values,
                                        std::uint64_t reps, std::uint64_t seed,
                                        const HarnessConfig& cfg,
                                        std::size_t scatter_cap = 5000);

ComparisonReport run_comparison_study(const std::vector<std::int64_t>& n_values,
                                      std::uint64_t reps, double beta_scale, std::uint64_t seed,
                                      const HarnessConfig& cfg);

// Deterministic parallel map over replicate indices: results land in
// per-replicate slots so the reduction order never depends on scheduling.
void parallel_replicates(std::uint64_t reps, unsigned threads,
                         const std::function<void(std::uint64_t)>& body);

// CSV / JSON serialization (one row per cell for CSV).
std::string to_csv(const CalibrationReport& r);
std::string to_csv(const PowerReport& r);
std::string to_csv(const CorrelationReport& r);
std::string to_csv(const ComparisonReport& r);
std::string to_json(const CalibrationReport& r);
std::string to_json(const PowerReport& r);
std::string to_json(const CorrelationReport& r);
std::string to_json(const ComparisonReport& r);

}  // namespace modnet
