#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "modnet/harness.hpp"
#include "modnet/netio.hpp"

namespace {

using namespace modnet;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

std::string default_tw1_path(const char* argv0) {
    if (const char* env = std::getenv("MODNET_TW1_TABLE")) return env;
    // look next to the binary, then in ./data
    namespace fs = std::filesystem;
    std::error_code ec;
    const fs::path exe_dir = fs::absolute(fs::path(argv0), ec).parent_path();
    for (const fs::path candidate :
         {exe_dir / "tw1_table.txt", exe_dir / ".." / "data" / "tw1_table.txt",
          fs::path("data/tw1_table.txt")}) {
        if (fs::exists(candidate, ec)) return candidate.string();
    }
    return "data/tw1_table.txt";
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + out_path);
    out << text;
}

EnsembleKind parse_ensemble(const std::string& name) {
    if (name == "goe") return EnsembleKind::Goe;
    if (name == "exp") return EnsembleKind::WignerExp;
    if (name == "er") return EnsembleKind::ErdosRenyi;
    if (name == "corr") return EnsembleKind::CorrelationNull;
    if (name == "spiked") return EnsembleKind::Spiked;
    throw CLI::ValidationError("--ensemble", "unknown ensemble: " + name);
}

TestMethod parse_method(const std::string& name) {
    if (name == "modularity1") return TestMethod::ModularityI;
    if (name == "modularity2") return TestMethod::ModularityII;
    if (name == "eigenvalue") return TestMethod::LargestEigenvalue;
    if (name == "maxentry") return TestMethod::EntrywiseMaximum;
    throw CLI::ValidationError("--method", "unknown test method: " + name);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modularity inference for weighted signed networks"};
    app.require_subcommand(1);

    std::uint64_t seed = 42;
    std::uint64_t reps = 2000;
    unsigned threads = 0;
    std::string out_path;
    std::string format = "csv";
    std::string tw1_path = default_tw1_path(argv[0]);
    app.add_option("--seed", seed, "root RNG seed")->capture_default_str();
    app.add_option("--reps", reps, "Monte Carlo replicates")->capture_default_str();
    app.add_option("--threads", threads, "worker threads (0 = auto)")->capture_default_str();
    app.add_option("--out", out_path, "output file ('-' or empty = stdout)");
    app.add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--tw1-table", tw1_path, "TW1 table file")->capture_default_str();

    // simulate
    auto* sim = app.add_subcommand("simulate", "null-calibration study");
    std::string sim_ensemble = "goe";
    std::vector<std::int64_t> sim_n{500};
    std::vector<double> sim_alphas{0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99};
    std::string sim_law = "f";
    sim->add_option("--ensemble", sim_ensemble, "goe|exp|er|corr");
    sim->add_option("--n", sim_n, "dimensions");
    sim->add_option("--alpha", sim_alphas, "quantile levels");
    sim->add_option("--law", sim_law, "normal|f")->check(CLI::IsMember({"normal", "f"}));

    // power
    auto* pow_cmd = app.add_subcommand("power", "power study under the spiked model");
    std::vector<std::int64_t> pow_n{50, 100, 200, 400, 600, 800};
    double pow_alpha = 0.05;
    double pow_beta_scale = 1.0;
    pow_cmd->add_option("--n", pow_n, "dimensions (even)");
    pow_cmd->add_option("--alpha", pow_alpha, "test level");
    pow_cmd->add_option("--beta-scale", pow_beta_scale, "beta = scale*sqrt(n)");

    // correlate
    auto* cor = app.add_subcommand("correlate", "decorrelation study");
    std::vector<std::int64_t> cor_n{50, 100, 500, 1000};
    cor->add_option("--n", cor_n, "dimensions");

    // compare
    auto* cmp = app.add_subcommand("compare", "normalized-statistic comparison");
    std::vector<std::int64_t> cmp_n{50, 100, 150, 200};
    double cmp_beta_scale = 2.0;
    cmp->add_option("--n", cmp_n, "dimensions (even)");
    cmp->add_option("--beta-scale", cmp_beta_scale, "beta = scale*sqrt(n)");

    // quantiles
    auto* qnt = app.add_subcommand("quantiles", "dump reference-law quantiles");
    std::string qnt_law = "normal";
    std::int64_t qnt_n = 500;
    std::vector<double> qnt_p{0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99};
    qnt->add_option("--law", qnt_law, "normal|f|tw1|gumbel")
        ->check(CLI::IsMember({"normal", "f", "tw1", "gumbel"}));
    qnt->add_option("--n", qnt_n, "dimension (for law=f)");
    qnt->add_option("--p", qnt_p, "probabilities");

    // test
    auto* tst = app.add_subcommand("test", "run one test on a matrix file");
    std::string tst_input;
    std::string tst_method = "modularity1";
    double tst_alpha = 0.05;
    tst->add_option("--input", tst_input, "square CSV matrix")->required();
    tst->add_option("--method", tst_method, "modularity1|modularity2|eigenvalue|maxentry");
    tst->add_option("--alpha", tst_alpha, "test level");

    // analyze
    auto* ana = app.add_subcommand("analyze", "normalize data and split recursively");
    std::string ana_obs, ana_matrix, ana_missing = "?";
    std::string ana_method = "modularity1";
    double ana_alpha = 0.05;
    int ana_max_depth = 3;
    bool ana_votes = false, ana_transpose = false;
    ana->add_option("--obs", ana_obs, "observations CSV (rows = observations)");
    ana->add_option("--input", ana_matrix, "already-built matrix CSV");
    ana->add_option("--missing", ana_missing, "missing-value token");
    ana->add_flag("--votes", ana_votes, "decode y/n/abstain vote records");
    ana->add_flag("--transpose", ana_transpose, "treat input rows as members");
    ana->add_option("--method", ana_method, "test used at every node");
    ana->add_option("--alpha", ana_alpha, "test level");
    ana->add_option("--max-depth", ana_max_depth, "maximum split depth");

    // tw1-table
    auto* gen = app.add_subcommand("tw1-table", "generate and persist the TW1 table");
    std::uint64_t gen_m = 100000, gen_n = 2000;
    gen->add_option("--m", gen_m, "replicates (>= 1e4)");
    gen->add_option("--n-gen", gen_n, "generation dimension (>= 500)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        const bool json = format == "json";
        std::optional<Tw1Table> tw1;
        const auto need_tw1 = [&]() -> const Tw1Table& {
            if (!tw1) tw1 = Tw1Table::load_file(tw1_path);
            return *tw1;
        };
        HarnessConfig cfg;
        cfg.threads = threads;

        if (*sim) {
            const ReferenceLaw law =
                sim_law == "normal" ? ReferenceLaw::NormalLimit : ReferenceLaw::ConvolutionF;
            if (law == ReferenceLaw::ConvolutionF) cfg.tw1 = &need_tw1();
            const auto report = run_calibration(parse_ensemble(sim_ensemble), sim_n, sim_alphas,
                                                reps, law, seed, cfg);
            write_output(json ? to_json(report) : to_csv(report), out_path);
        } else if (*pow_cmd) {
            cfg.tw1 = &need_tw1();
            const auto report =
                run_power_study(pow_n, pow_alpha, reps, seed, cfg, pow_beta_scale);
            write_output(json ? to_json(report) : to_csv(report), out_path);
        } else if (*cor) {
            const auto report = run_correlation_study(cor_n, reps, seed, cfg);
            write_output(json ? to_json(report) : to_csv(report), out_path);
        } else if (*cmp) {
            const auto report = run_comparison_study(cmp_n, reps, cmp_beta_scale, seed, cfg);
            write_output(json ? to_json(report) : to_csv(report), out_path);
        } else if (*qnt) {
            std::ostringstream text;
            text << "law,n,p,quantile\n";
            text.precision(17);
            for (double p : qnt_p) {
                double q;
                if (qnt_law == "normal") q = normal_limit::quantile(p);
                else if (qnt_law == "gumbel") q = gumbel_coherence::quantile(p);
                else if (qnt_law == "tw1") q = need_tw1().quantile(p);
                else {
                    const ConvolutionF f = convolution_f(qnt_n, cfg.conv_samples, need_tw1(),
                                                         Seed{derive_root(seed, 0x55), 0});
                    q = f.quantile(p);
                }
                text << qnt_law << "," << qnt_n << "," << p << "," << q << "\n";
            }
            write_output(text.str(), out_path);
        } else if (*tst) {
            const LoadedMatrix loaded = load_matrix_csv(tst_input);
            const TestMethod method = parse_method(tst_method);
            TestResult result;
            switch (method) {
                case TestMethod::ModularityI:
                    result = modularity_test_i(loaded.matrix, tst_alpha);
                    break;
                case TestMethod::ModularityII: {
                    const ConvolutionF f =
                        convolution_f(loaded.matrix.n(), cfg.conv_samples, need_tw1(),
                                      Seed{derive_root(seed, 0x55), 0});
                    result = modularity_test_ii(loaded.matrix, tst_alpha, f);
                    break;
                }
                case TestMethod::LargestEigenvalue:
                    result = largest_eigenvalue_test(loaded.matrix, tst_alpha, need_tw1());
                    break;
                case TestMethod::EntrywiseMaximum:
                    result = entrywise_max_test(loaded.matrix, tst_alpha);
                    break;
            }
            for (const auto& w : loaded.warnings) result.notes.push_back(w);
            write_output(test_result_json(result) + "\n", out_path);
        } else if (*ana) {
            SymmetricMatrix matrix = SymmetricMatrix::zero(1);
            std::vector<std::string> labels;
            if (!ana_obs.empty()) {
                const RawObservations obs =
                    load_observations_csv(ana_obs, ana_missing, ana_votes, ana_transpose);
                NormalizedNetwork net = build_correlation_network(obs);
                matrix = std::move(net.matrix);
                labels = std::move(net.member_labels);
            } else if (!ana_matrix.empty()) {
                LoadedMatrix loaded = load_matrix_csv(ana_matrix);
                matrix = std::move(loaded.matrix);
                labels = std::move(loaded.labels);
            } else {
                std::cerr << "analyze: --obs or --input is required\n";
                return kExitUsage;
            }
            SplitContext ctx;
            ctx.alpha = ana_alpha;
            ctx.max_depth = ana_max_depth;
            ctx.method = parse_method(ana_method);
            if (ctx.method == TestMethod::LargestEigenvalue) ctx.tw1 = &need_tw1();
            if (ctx.method == TestMethod::ModularityII) {
                const Tw1Table& table = need_tw1();
                const std::size_t conv_samples = cfg.conv_samples;
                const std::uint64_t conv_seed = derive_root(seed, 0x55);
                ctx.make_f = [&table, conv_samples, conv_seed](Eigen::Index n) {
                    return convolution_f(n, conv_samples, table, Seed{conv_seed, 0});
                };
            }
            const auto tree = recursive_split(matrix, ctx);
            write_output(community_tree_json(*tree, labels) + "\n", out_path);
        } else if (*gen) {
            const Tw1Table table = build_tw1_table(gen_m, gen_n, seed);
            std::ostringstream text;
            table.save(text);
            write_output(text.str(), out_path.empty() ? tw1_path : out_path);
            std::cerr << "tw1 table: m=" << gen_m << " n_gen=" << gen_n
                      << " mean=" << table.provenance().sample_mean << "\n";
        }
    } catch (const FormatError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
