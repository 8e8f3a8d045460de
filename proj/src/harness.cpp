#include "modnet/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace modnet {

namespace {

constexpr std::uint64_t kTagCalibration = 0x11;
constexpr std::uint64_t kTagPowerSpike = 0x22;
constexpr std::uint64_t kTagPowerNoise = 0x23;
constexpr std::uint64_t kTagCorrelation = 0x33;
constexpr std::uint64_t kTagComparisonNull = 0x44;
constexpr std::uint64_t kTagComparisonAlt = 0x45;
constexpr std::uint64_t kTagConvolution = 0x55;

std::uint64_t tag_n(std::uint64_t tag, std::int64_t n) {
    return tag * 0x10001ULL + static_cast<std::uint64_t>(n);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double binomial_se(double p, std::uint64_t reps) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

EnsembleSpec spec_for(EnsembleKind kind, std::int64_t n) {
    EnsembleSpec s;
    s.n = static_cast<Eigen::Index>(n);
    switch (kind) {
        case EnsembleKind::Goe: s.kind = GoeSpec{}; break;
        case EnsembleKind::WignerExp: s.kind = WignerExpSpec{}; break;
        case EnsembleKind::ErdosRenyi:
            s.kind = ErdosRenyiSpec{std::pow(static_cast<double>(n), -0.25)};
            break;
        case EnsembleKind::CorrelationNull:
            s.kind = CorrelationNullSpec{correlation_default_num_obs(s.n)};
            break;
        case EnsembleKind::Spiked:
            throw std::invalid_argument("calibration: spiked ensemble is not a null model");
    }
    return s;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double m = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

QuantileSummary summarize(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    EmpiricalLaw law(std::move(v));
    QuantileSummary s;
    s.q05 = law.quantile(0.05);
    s.q25 = law.quantile(0.25);
    s.q50 = law.quantile(0.50);
    s.q75 = law.quantile(0.75);
    s.q95 = law.quantile(0.95);
    return s;
}

}  // namespace

std::string ensemble_kind_name(EnsembleKind k) {
    switch (k) {
        case EnsembleKind::Goe: return "goe";
        case EnsembleKind::WignerExp: return "exp";
        case EnsembleKind::ErdosRenyi: return "er";
        case EnsembleKind::CorrelationNull: return "corr";
        case EnsembleKind::Spiked: return "spiked";
    }
    return "unknown";
}

void parallel_replicates(std::uint64_t reps, unsigned threads,
                         const std::function<void(std::uint64_t)>& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads == 1 || reps < 2) {
        for (std::uint64_t r = 0; r < reps; ++r) body(r);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::uint64_t r = t; r < reps; r += threads) body(r);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

CalibrationReport run_calibration(EnsembleKind ensemble, const std::vector<std::int64_t>& n_values,
                                  const std::vector<double>& alphas, std::uint64_t reps,
                                  ReferenceLaw law, std::uint64_t seed,
                                  const HarnessConfig& cfg) {
    if (reps < 100) throw std::invalid_argument("run_calibration: reps must be >= 100");
    if (law == ReferenceLaw::ConvolutionF && cfg.tw1 == nullptr)
        throw std::invalid_argument("run_calibration: convolution law requires a TW1 table");

    CalibrationReport report;
    report.ensemble = ensemble;
    report.law = law;
    report.n_values = n_values;
    report.alphas = alphas;
    report.reps = reps;
    report.seed = seed;

    for (std::int64_t n : n_values) {
        // cell at level alpha is the empirical rejection rate
        // pr(stat > q_{1-alpha}) of the one-sided test
        std::vector<double> quantiles(alphas.size());
        if (law == ReferenceLaw::NormalLimit) {
            for (std::size_t j = 0; j < alphas.size(); ++j)
                quantiles[j] = normal_limit::quantile(1.0 - alphas[j]);
        } else {
            const ConvolutionF f = convolution_f(
                n, cfg.conv_samples, *cfg.tw1,
                Seed{derive_root(seed, tag_n(kTagConvolution, n)), 0});
            for (std::size_t j = 0; j < alphas.size(); ++j)
                quantiles[j] = f.quantile(1.0 - alphas[j]);
        }

        const EnsembleSpec spec = spec_for(ensemble, n);
        const std::uint64_t root = derive_root(seed, tag_n(kTagCalibration, n));
        std::vector<double> stats(reps);
        parallel_replicates(reps, cfg.threads, [&](std::uint64_t r) {
            const SymmetricMatrix w = sample_ensemble(spec, Seed{root, r});
            stats[r] = normalized_modularity(modularity(w), NormalizedVariant::CenteredL1);
        });

        std::vector<double> cells(alphas.size()), ses(alphas.size());
        for (std::size_t j = 0; j < alphas.size(); ++j) {
            std::uint64_t count = 0;
            for (double s : stats)
                if (s > quantiles[j]) ++count;
            cells[j] = static_cast<double>(count) / static_cast<double>(reps);
            ses[j] = binomial_se(cells[j], reps);
        }
        report.cells.push_back(std::move(cells));
        report.std_errors.push_back(std::move(ses));
    }
    return report;
}

PowerReport run_power_study(const std::vector<std::int64_t>& n_values, double alpha,
                            std::uint64_t reps, std::uint64_t seed, const HarnessConfig& cfg,
                            double beta_scale) {
    if (reps < 100) throw std::invalid_argument("run_power_study: reps must be >= 100");
    if (cfg.tw1 == nullptr) throw std::invalid_argument("run_power_study: TW1 table required");

    PowerReport report;
    report.n_values = n_values;
    report.alpha = alpha;
    report.reps = reps;
    report.seed = seed;
    report.beta_scale = beta_scale;
    report.methods = {TestMethod::ModularityI, TestMethod::ModularityII,
                      TestMethod::LargestEigenvalue, TestMethod::EntrywiseMaximum};

    for (std::int64_t n : n_values) {
        const ConvolutionF f = convolution_f(
            n, cfg.conv_samples, *cfg.tw1, Seed{derive_root(seed, tag_n(kTagConvolution, n)), 0});
        const std::uint64_t root_spike = derive_root(seed, tag_n(kTagPowerSpike, n));
        const std::uint64_t root_noise = derive_root(seed, tag_n(kTagPowerNoise, n));
        std::vector<std::array<bool, 4>> rejects(reps);
        parallel_replicates(reps, cfg.threads, [&](std::uint64_t r) {
            SpikedParams params =
                make_balanced_spike(static_cast<Eigen::Index>(n), Seed{root_spike, r});
            params.beta = beta_scale * std::sqrt(static_cast<double>(n));
            const SymmetricMatrix w =
                sample_spiked(params, static_cast<Eigen::Index>(n), Seed{root_noise, r});
            const ModularityDecomposition md = modularity(w);
            rejects[r][0] = modularity_test_i_from(md, alpha).reject;
            rejects[r][1] = modularity_test_ii_from(md, alpha, f).reject;
            rejects[r][2] = largest_eigenvalue_test_from(md, alpha, *cfg.tw1).reject;
            rejects[r][3] = entrywise_max_test(w, alpha).reject;
        });
        std::vector<double> powers(4), ses(4);
        for (std::size_t j = 0; j < 4; ++j) {
            std::uint64_t count = 0;
            for (const auto& rr : rejects)
                if (rr[j]) ++count;
            powers[j] = static_cast<double>(count) / static_cast<double>(reps);
            ses[j] = binomial_se(powers[j], reps);
        }
        report.powers.push_back(std::move(powers));
        report.std_errors.push_back(std::move(ses));
    }
    return report;
}

CorrelationReport run_correlation_study(const std::vector<std::int64_t>& n_values,
                                        std::uint64_t reps, std::uint64_t seed,
                                        const HarnessConfig& cfg, std::size_t scatter_cap) {
    if (reps < 1000) throw std::invalid_argument("run_correlation_study: reps must be >= 1000");
    CorrelationReport report;
    report.n_values = n_values;
    report.reps = reps;
    report.seed = seed;

    for (std::int64_t n : n_values) {
        const std::uint64_t root = derive_root(seed, tag_n(kTagCorrelation, n));
        std::vector<double> a(reps), b(reps), q_over_n(reps), scaled_l1(reps);
        parallel_replicates(reps, cfg.threads, [&](std::uint64_t r) {
            const SymmetricMatrix w = sample_goe(static_cast<Eigen::Index>(n), Seed{root, r});
            const ModularityDecomposition md = modularity(w);
            const double nd = static_cast<double>(n);
            a[r] = md.a_n;
            b[r] = md.b_n;
            q_over_n[r] = md.q / nd;
            scaled_l1[r] = std::pow(nd, 1.0 / 6.0) * md.lambda1;
        });
        report.cor_ab.push_back(pearson(a, b));
        report.cor_q_lambda.push_back(pearson(q_over_n, scaled_l1));
        std::vector<std::pair<double, double>> scatter;
        const std::size_t keep = std::min<std::size_t>(scatter_cap, reps);
        scatter.reserve(keep);
        for (std::size_t r = 0; r < keep; ++r) scatter.emplace_back(q_over_n[r], scaled_l1[r]);
        report.scatter.push_back(std::move(scatter));
    }
    return report;
}

ComparisonReport run_comparison_study(const std::vector<std::int64_t>& n_values,
                                      std::uint64_t reps, double beta_scale, std::uint64_t seed,
                                      const HarnessConfig& cfg) {
    if (reps < 500) throw std::invalid_argument("run_comparison_study: reps must be >= 500");
    ComparisonReport report;
    report.n_values = n_values;
    report.reps = reps;
    report.seed = seed;
    report.beta_scale = beta_scale;

    for (std::int64_t n : n_values) {
        const std::uint64_t root_null = derive_root(seed, tag_n(kTagComparisonNull, n));
        const std::uint64_t root_spike = derive_root(seed, tag_n(kTagComparisonAlt, n));
        const std::uint64_t root_noise = derive_root(seed, tag_n(kTagComparisonAlt + 0x100, n));

        std::array<std::vector<double>, 3> null_stats, alt_stats;
        for (auto& v : null_stats) v.resize(reps);
        for (auto& v : alt_stats) v.resize(reps);

        parallel_replicates(reps, cfg.threads, [&](std::uint64_t r) {
            const auto record = [&](const SymmetricMatrix& w,
                                    std::array<std::vector<double>, 3>& out) {
                const ModularityDecomposition md = modularity(w);
                out[0][r] = normalized_modularity(md, NormalizedVariant::RawOverN);
                out[1][r] = normalized_modularity(md, NormalizedVariant::CenteredL1);
                out[2][r] = normalized_modularity(md, NormalizedVariant::Centered4OverPi);
            };
            record(sample_goe(static_cast<Eigen::Index>(n), Seed{root_null, r}), null_stats);
            SpikedParams params =
                make_balanced_spike(static_cast<Eigen::Index>(n), Seed{root_spike, r});
            params.beta = beta_scale * std::sqrt(static_cast<double>(n));
            record(sample_spiked(params, static_cast<Eigen::Index>(n), Seed{root_noise, r}),
                   alt_stats);
        });

        std::array<QuantileSummary, 3> nq, aq;
        for (std::size_t v = 0; v < 3; ++v) {
            nq[v] = summarize(null_stats[v]);
            aq[v] = summarize(alt_stats[v]);
        }
        report.null_quantiles.push_back(nq);
        report.alt_quantiles.push_back(aq);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Serialization

std::string to_csv(const CalibrationReport& r) {
    std::ostringstream out;
    out << "ensemble,law,n,alpha,cell,se,reps,seed\n";
    const std::string law = r.law == ReferenceLaw::NormalLimit ? "normal" : "f";
    for (std::size_t i = 0; i < r.n_values.size(); ++i)
        for (std::size_t j = 0; j < r.alphas.size(); ++j)
            out << ensemble_kind_name(r.ensemble) << "," << law << "," << r.n_values[i] << ","
                << fmt_double(r.alphas[j]) << "," << fmt_double(r.cells[i][j]) << ","
                << fmt_double(r.std_errors[i][j]) << "," << r.reps << "," << r.seed << "\n";
    return out.str();
}

std::string to_csv(const PowerReport& r) {
    std::ostringstream out;
    out << "n,method,power,se,alpha,beta_scale,reps,seed\n";
    for (std::size_t i = 0; i < r.n_values.size(); ++i)
        for (std::size_t j = 0; j < r.methods.size(); ++j)
            out << r.n_values[i] << "," << test_method_name(r.methods[j]) << ","
                << fmt_double(r.powers[i][j]) << "," << fmt_double(r.std_errors[i][j]) << ","
                << fmt_double(r.alpha) << "," << fmt_double(r.beta_scale) << "," << r.reps << ","
                << r.seed << "\n";
    return out.str();
}

std::string to_csv(const CorrelationReport& r) {
    std::ostringstream out;
    out << "n,cor_ab,cor_q_lambda,reps,seed\n";
    for (std::size_t i = 0; i < r.n_values.size(); ++i)
        out << r.n_values[i] << "," << fmt_double(r.cor_ab[i]) << ","
            << fmt_double(r.cor_q_lambda[i]) << "," << r.reps << "," << r.seed << "\n";
    return out.str();
}

std::string to_csv(const ComparisonReport& r) {
    std::ostringstream out;
    out << "n,model,statistic,q05,q25,q50,q75,q95,reps,beta_scale,seed\n";
    static const char* stat_names[3] = {"q_over_n", "centered_l1", "centered_4_over_pi"};
    const auto row = [&](std::int64_t n, const char* model, const char* stat,
                         const QuantileSummary& q) {
        out << n << "," << model << "," << stat << "," << fmt_double(q.q05) << ","
            << fmt_double(q.q25) << "," << fmt_double(q.q50) << "," << fmt_double(q.q75) << ","
            << fmt_double(q.q95) << "," << r.reps << "," << fmt_double(r.beta_scale) << ","
            << r.seed << "\n";
    };
    for (std::size_t i = 0; i < r.n_values.size(); ++i)
        for (std::size_t v = 0; v < 3; ++v) {
            row(r.n_values[i], "null", stat_names[v], r.null_quantiles[i][v]);
            row(r.n_values[i], "spiked", stat_names[v], r.alt_quantiles[i][v]);
        }
    return out.str();
}

namespace {

nlohmann::json base_json(const char* kind, std::uint64_t seed, std::uint64_t reps) {
    nlohmann::json j;
    j["version"] = 1;
    j["report"] = kind;
    j["seed"] = seed;
    j["reps"] = reps;
    return j;
}

}  // namespace

std::string to_json(const CalibrationReport& r) {
    nlohmann::json j = base_json("calibration", r.seed, r.reps);
    j["ensemble"] = ensemble_kind_name(r.ensemble);
    j["law"] = r.law == ReferenceLaw::NormalLimit ? "normal" : "f";
    j["n_values"] = r.n_values;
    j["alphas"] = r.alphas;
    j["cells"] = r.cells;
    j["std_errors"] = r.std_errors;
    return j.dump(2);
}

std::string to_json(const PowerReport& r) {
    nlohmann::json j = base_json("power", r.seed, r.reps);
    j["alpha"] = r.alpha;
    j["beta_scale"] = r.beta_scale;
    j["n_values"] = r.n_values;
    std::vector<std::string> names;
    for (auto m : r.methods) names.push_back(test_method_name(m));
    j["methods"] = names;
    j["powers"] = r.powers;
    j["std_errors"] = r.std_errors;
    return j.dump(2);
}

std::string to_json(const CorrelationReport& r) {
    nlohmann::json j = base_json("correlation", r.seed, r.reps);
    j["n_values"] = r.n_values;
    j["cor_ab"] = r.cor_ab;
    j["cor_q_lambda"] = r.cor_q_lambda;
    nlohmann::json scatter = nlohmann::json::array();
    for (const auto& per_n : r.scatter) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& [q, l] : per_n) pts.push_back({q, l});
        scatter.push_back(std::move(pts));
    }
    j["scatter"] = std::move(scatter);
    return j.dump(2);
}

std::string to_json(const ComparisonReport& r) {
    nlohmann::json j = base_json("comparison", r.seed, r.reps);
    j["beta_scale"] = r.beta_scale;
    j["n_values"] = r.n_values;
    static const char* stat_names[3] = {"q_over_n", "centered_l1", "centered_4_over_pi"};
    const auto pack = [&](const std::vector<std::array<QuantileSummary, 3>>& src) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& per_n : src) {
            nlohmann::json obj;
            for (std::size_t v = 0; v < 3; ++v) {
                const auto& q = per_n[v];
                obj[stat_names[v]] = {{"q05", q.q05}, {"q25", q.q25}, {"q50", q.q50},
                                      {"q75", q.q75}, {"q95", q.q95}};
            }
            arr.push_back(std::move(obj));
        }
        return arr;
    };
    j["null"] = pack(r.null_quantiles);
    j["spiked"] = pack(r.alt_quantiles);
    return j.dump(2);
}

}  // namespace modnet
