// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Monte Carlo cells are compared with |got - expected| <=
// max(stated tolerance, 3 * standard error).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "modnet/ensembles.hpp"
#include "modnet/harness.hpp"
#include "modnet/hypothesis.hpp"
#include "modnet/laws.hpp"
#include "modnet/netio.hpp"
#include "modnet/spectral.hpp"

using namespace modnet;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

bool within(double got, double expected, double tol, double se, std::string& out) {
    const double allowed = std::max(tol, 3.0 * se);
    const bool ok = std::abs(got - expected) <= allowed;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s%.4f vs %.4f (tol %.4f)", ok ? "" : "MISS ", got,
                  expected, allowed);
    if (!out.empty() && out.back() != ' ') out += ", ";
    out += buf;
    return ok;
}

constexpr std::uint64_t kSeed = 42;

// --- 1: spectral identity and decomposition ---------------------------------

void criterion1() {
    double worst = 0.0;
    bool ok = true;
    for (Eigen::Index n : {4, 8, 16, 32, 64}) {
        const double tol = 1e-8 * static_cast<double>(n);
        for (std::uint64_t r = 0; r < 200; ++r) {
            const auto w = sample_goe(n, Seed{derive_root(kSeed, 0x01), r});
            const auto md = modularity(w);
            const auto dec = eigendecompose_symmetric(w);
            const Eigen::VectorXd s = md.sign_vector.cast<double>();
            double q_spec = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double proj = dec.eigenvectors.col(i).dot(s);
                q_spec += dec.eigenvalues(i) * proj * proj;
            }
            const double e1 = std::abs(md.q - q_spec);
            const double e2 = std::abs(md.q - (md.a_n + md.b_n));
            worst = std::max(worst, std::max(e1, e2) / tol);
            ok = ok && e1 <= tol && e2 <= tol;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "1000 draws, worst residual %.2e of budget", worst);
    report(1, ok, buf);
}

// --- 2: l1 norm concentration at 2/pi ---------------------------------------

void criterion2() {
    const Eigen::Index n = 500;
    double mean = 0.0;
    for (std::uint64_t r = 0; r < 500; ++r) {
        const auto w = sample_goe(n, Seed{derive_root(kSeed, 0x02), r});
        mean += modularity(w).l1norm_sq / static_cast<double>(n);
    }
    mean /= 500.0;

    double oracle = 0.0;
    {
        RngStream rng(Seed{derive_root(kSeed, 0x03), 0});
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int r = 0; r < 500; ++r) {
            double s1 = 0, s2 = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double x = normal(rng);
                s1 += std::abs(x);
                s2 += x * x;
            }
            oracle += s1 * s1 / (static_cast<double>(n) * s2);
        }
        oracle /= 500.0;
    }
    const double target = 2.0 / std::numbers::pi;
    const bool ok = std::abs(mean - target) <= 0.03 && std::abs(oracle - target) <= 0.01;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "goe mean %.4f, sphere oracle %.4f, 2/pi = %.4f", mean,
                  oracle, target);
    report(2, ok, buf);
}

// --- 3/4/5: calibration tables ----------------------------------------------

bool check_row(const CalibrationReport& rep, std::size_t i, const std::vector<double>& paper,
               double tol, std::string& detail) {
    bool ok = true;
    for (std::size_t j = 0; j < paper.size(); ++j)
        ok = within(rep.cells[i][j], paper[j], tol, rep.std_errors[i][j], detail) && ok;
    return ok;
}

void criterion3(const HarnessConfig& cfg) {
    const auto rep = run_calibration(EnsembleKind::Goe, {500}, {0.05, 0.50, 0.95}, 2000,
                                     ReferenceLaw::NormalLimit, kSeed, cfg);
    std::string detail = "n=500: ";
    const bool ok = check_row(rep, 0, {0.0251, 0.2927, 0.8134}, 0.025, detail);
    report(3, ok, detail);
}

void criterion4(const HarnessConfig& cfg) {
    const auto rep = run_calibration(EnsembleKind::Goe, {100, 500}, {0.01, 0.05, 0.50, 0.95},
                                     2000, ReferenceLaw::ConvolutionF, kSeed, cfg);
    std::string detail = "n=100: ";
    bool ok = check_row(rep, 0, {0.0154, 0.0709, 0.4314, 0.9286}, 0.025, detail);
    detail += "; n=500: ";
    ok = check_row(rep, 1, {0.0125, 0.0580, 0.4689, 0.9432}, 0.025, detail) && ok;
    report(4, ok, detail);
}

void criterion5(const HarnessConfig& cfg) {
    const auto exp_rep = run_calibration(EnsembleKind::WignerExp, {500}, {0.05, 0.50}, 2000,
                                         ReferenceLaw::ConvolutionF, kSeed, cfg);
    std::string detail = "exp n=500: ";
    bool ok = check_row(exp_rep, 0, {0.0957, 0.6086}, 0.03, detail);

    const auto er_rep = run_calibration(EnsembleKind::ErdosRenyi, {500}, {0.05, 0.50}, 2000,
                                        ReferenceLaw::ConvolutionF, kSeed, cfg);
    detail += "; er n=500: ";
    ok = check_row(er_rep, 0, {0.0374, 0.4464}, 0.03, detail) && ok;

    const auto corr_rep = run_calibration(EnsembleKind::CorrelationNull, {100}, {0.05, 0.50},
                                          2000, ReferenceLaw::ConvolutionF, kSeed, cfg);
    detail += "; corr n=100: ";
    ok = check_row(corr_rep, 0, {0.0383, 0.4648}, 0.03, detail) && ok;
    report(5, ok, detail);
}

// --- 6: decorrelation of A_n/B_n and of Q vs lambda_1 -----------------------

void criterion6(const HarnessConfig& cfg) {
    const auto rep = run_correlation_study({50, 500}, 5000, kSeed, cfg);
    const bool shrink = std::abs(rep.cor_q_lambda[1]) < std::abs(rep.cor_q_lambda[0]);
    const bool small_ab = std::abs(rep.cor_ab[1]) <= 0.05;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "cor(Q/n,lambda1): %.3f (n=50) -> %.3f (n=500); cor(A,B) at n=500: %.4f",
                  rep.cor_q_lambda[0], rep.cor_q_lambda[1], rep.cor_ab[1]);
    report(6, shrink && small_ab, buf);
}

// --- 7: power study ----------------------------------------------------------

void criterion7(const HarnessConfig& cfg) {
    const auto rep = run_power_study({200, 400}, 0.05, 2000, kSeed, cfg, 1.0);
    const std::vector<std::vector<double>> paper = {{0.5819, 0.6493, 0.6159, 0.6655},
                                                    {0.6653, 0.7164, 0.6510, 0.6206}};
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < 2; ++i) {
        detail += (i ? "; n=400: " : "n=200: ");
        for (std::size_t j = 0; j < 4; ++j)
            ok = within(rep.powers[i][j], paper[i][j], 0.03, rep.std_errors[i][j], detail) && ok;
    }
    report(7, ok, detail);
}

// --- 8: type I errors of the alternative tests -------------------------------

void criterion8(const HarnessConfig& cfg, const Tw1Table& tw1) {
    const Eigen::Index n = 400;
    const std::uint64_t reps = 2000;
    std::vector<char> rej_le(reps), rej_em(reps);
    parallel_replicates(reps, cfg.threads, [&](std::uint64_t r) {
        const auto w = sample_goe(n, Seed{derive_root(kSeed, 0x08), r});
        rej_le[r] = largest_eigenvalue_test_from(modularity(w), 0.05, tw1).reject;
        rej_em[r] = entrywise_max_test(w, 0.05).reject;
    });
    const double d_reps = static_cast<double>(reps);
    const double p_le = std::count(rej_le.begin(), rej_le.end(), 1) / d_reps;
    const double p_em = std::count(rej_em.begin(), rej_em.end(), 1) / d_reps;
    std::string detail = "eigenvalue: ";
    bool ok = within(p_le, 0.0456, 0.02, std::sqrt(p_le * (1 - p_le) / d_reps), detail);
    detail += "; maxentry: ";
    ok = within(p_em, 0.0700, 0.02, std::sqrt(p_em * (1 - p_em) / d_reps), detail) && ok;
    report(8, ok, detail);
}

// --- 9: consistency under a supercritical spike ------------------------------

void criterion9(const HarnessConfig& cfg, const Tw1Table& tw1) {
    const Eigen::Index n = 400;
    const std::uint64_t reps = 500;
    const auto f = convolution_f(n, cfg.conv_samples, tw1, Seed{derive_root(kSeed, 0x09), 0});
    std::vector<char> rej1(reps), rej2(reps);
    parallel_replicates(reps, cfg.threads, [&](std::uint64_t r) {
        auto params = make_balanced_spike(n, Seed{derive_root(kSeed, 0x0a), r});
        params.beta = 2.0 * std::sqrt(static_cast<double>(n));
        const auto md = modularity(sample_spiked(params, n, Seed{derive_root(kSeed, 0x0b), r}));
        rej1[r] = modularity_test_i_from(md, 0.05).reject;
        rej2[r] = modularity_test_ii_from(md, 0.05, f).reject;
    });
    const double p1 = std::count(rej1.begin(), rej1.end(), 1) / static_cast<double>(reps);
    const double p2 = std::count(rej2.begin(), rej2.end(), 1) / static_cast<double>(reps);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "rejection rates: test I %.3f, test II %.3f (need >= 0.99)",
                  p1, p2);
    report(9, p1 >= 0.99 && p2 >= 0.99, buf);
}

// --- 10: distribution-law properties ----------------------------------------

void criterion10(const Tw1Table& tw1, const Tw1Table& tw1_alt) {
    bool ok = true;
    std::string detail;

    const auto monotone = [&](const char* name, auto cdf) {
        double prev = -1.0;
        for (int i = 0; i < 10000; ++i) {
            const double x = -20.0 + 40.0 * i / 9999.0;
            const double c = cdf(x);
            if (c < prev - 1e-15) {
                detail += std::string("non-monotone ") + name + "; ";
                ok = false;
                return;
            }
            prev = c;
        }
    };
    monotone("normal", [](double x) { return normal_limit::cdf(x); });
    monotone("gumbel", [](double x) { return gumbel_coherence::cdf(x); });
    monotone("tw1", [&](double x) { return tw1.cdf(x); });
    const auto f = convolution_f(500, 100000, tw1, Seed{derive_root(kSeed, 0x0c), 0});
    monotone("convolution", [&](double x) { return f.cdf(x); });

    double worst_rt = 0.0;
    for (int i = 1; i < 1000; ++i) {
        const double p = i / 1000.0;
        worst_rt = std::max(worst_rt,
                            std::abs(gumbel_coherence::cdf(gumbel_coherence::quantile(p)) - p));
    }
    if (worst_rt > 1e-12) {
        ok = false;
        detail += "gumbel round trip off; ";
    }

    const double m1 = tw1.provenance().sample_mean;
    const double m2 = tw1_alt.provenance().sample_mean;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "gumbel round trip %.1e; table means %.4f / %.4f (target -1.2065 +- 0.02)",
                  worst_rt, m1, m2);
    detail += buf;
    ok = ok && std::abs(m1 + 1.2065) <= 0.02 && std::abs(m2 + 1.2065) <= 0.02 &&
         std::abs(m1 - m2) <= 0.02;
    report(10, ok, detail);
}

// --- 11: real-data workflow ---------------------------------------------------

std::vector<std::string> read_party_column(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> party;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        party.push_back(line.substr(0, line.find(',')));
    }
    return party;
}

// members are labeled m<row>; map back to the input row index
std::size_t label_row(const std::string& label) {
    return static_cast<std::size_t>(std::stoul(label.substr(1)));
}

void criterion11(const std::string& votes_path) {
    const bool have_data = !votes_path.empty() && std::filesystem::exists(votes_path);
    std::string path = votes_path;
    std::vector<std::string> party;

    if (!have_data) {
        // synthetic two-party roll call in the same layout: one member per
        // row, party first, then 60 votes with occasional missing cells
        path = (std::filesystem::temp_directory_path() / "modnet_synthetic_votes.csv").string();
        std::ofstream out(path);
        RngStream rng(Seed{derive_root(kSeed, 0x0d), 0});
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int i = 0; i < 240; ++i) {
            const bool rep = i % 2 == 0;
            out << (rep ? "republican" : "democrat");
            for (int b = 0; b < 60; ++b) {
                const bool rep_bill = b % 2 == 0;
                const double p_yes = (rep == rep_bill) ? 0.85 : 0.15;
                out << ',';
                if (unif(rng) < 0.05)
                    out << '?';
                else
                    out << (unif(rng) < p_yes ? 'y' : 'n');
            }
            out << '\n';
        }
    }
    party = read_party_column(path);

    const auto obs = load_observations_csv(path, "?", /*votes_encoding=*/true,
                                           /*transpose=*/true);
    const auto net = build_correlation_network(obs);
    const Eigen::Index n = net.matrix.n();

    SplitContext ctx;
    ctx.alpha = 0.05;
    ctx.max_depth = 2;
    ctx.method = TestMethod::ModularityI;
    const auto root = recursive_split(net.matrix, ctx);

    bool ok = root->test.reject && root->test.p_value.value < 1e-4;
    std::string detail;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s, n=%ld, root stat %.1f, ",
                  have_data ? "dataset" : "dataset absent, synthetic pipeline", long(n),
                  root->test.statistic);
    detail += buf;

    if (have_data) ok = ok && n >= 420 && n <= 435;

    const auto rep_fraction = [&](const CommunityNode& node) {
        std::size_t reps = 0;
        for (Eigen::Index m : node.members)
            if (party[label_row(net.member_labels[static_cast<std::size_t>(m)])] ==
                "republican")
                ++reps;
        return node.members.empty() ? 0.0
                                    : static_cast<double>(reps) /
                                          static_cast<double>(node.members.size());
    };

    if (root->positive_child && root->negative_child) {
        const double fp = rep_fraction(*root->positive_child);
        const double fn = rep_fraction(*root->negative_child);
        const CommunityNode& rep_child = fp > fn ? *root->positive_child : *root->negative_child;
        std::snprintf(buf, sizeof(buf),
                      "republican fractions %.2f / %.2f, republican-side child %s", fp, fn,
                      rep_child.test.reject ? "rejects" : "does not reject");
        detail += buf;
        // one republican-majority and one democrat-majority community
        ok = ok && std::max(fp, fn) > 0.5 && std::min(fp, fn) < 0.5;
        if (have_data) ok = ok && rep_child.test.reject;
    } else {
        ok = false;
        detail += "root did not split";
    }
    report(11, ok, detail);
}

// --- 12: determinism across thread counts and reruns -------------------------

void criterion12(const Tw1Table& tw1) {
    HarnessConfig one, four;
    one.threads = 1;
    one.tw1 = &tw1;
    four.threads = 4;
    four.tw1 = &tw1;

    const auto cal = [&](const HarnessConfig& cfg) {
        const auto r = run_calibration(EnsembleKind::Goe, {100}, {0.05, 0.5}, 300,
                                       ReferenceLaw::ConvolutionF, kSeed, cfg);
        return to_csv(r) + to_json(r);
    };
    const auto pow = [&](const HarnessConfig& cfg) {
        const auto r = run_power_study({60}, 0.05, 120, kSeed, cfg, 2.0);
        return to_csv(r) + to_json(r);
    };
    const std::string c1 = cal(one);
    const bool ok = c1 == cal(four) && c1 == cal(one) && pow(one) == pow(four);
    report(12, ok, ok ? "reports byte-identical across 1/4 threads and reruns"
                      : "reports differ between runs");
}

}  // namespace

int main(int argc, char** argv) {
    std::string tw1_path = "data/tw1_table.txt";
    std::string tw1_alt_path = "data/tw1_table_alt.txt";
    std::string votes_path = "data/house-votes-84.data";
    for (int i = 1; i + 1 < argc; i += 2) {
        if (!std::strcmp(argv[i], "--tw1")) tw1_path = argv[i + 1];
        else if (!std::strcmp(argv[i], "--tw1-alt")) tw1_alt_path = argv[i + 1];
        else if (!std::strcmp(argv[i], "--votes")) votes_path = argv[i + 1];
    }

    try {
        const auto tw1 = Tw1Table::load_file(tw1_path);
        const auto tw1_alt = Tw1Table::load_file(tw1_alt_path);

        HarnessConfig cfg;
        cfg.threads = 1;
        cfg.tw1 = &tw1;

        criterion1();
        criterion2();
        criterion3(cfg);
        criterion4(cfg);
        criterion5(cfg);
        criterion6(cfg);
        criterion7(cfg);
        criterion8(cfg, tw1);
        criterion9(cfg, tw1);
        criterion10(tw1, tw1_alt);
        criterion11(std::filesystem::exists(votes_path) ? votes_path : "");
        criterion12(tw1);
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 1;
    }

    std::printf("%s\n", g_failures == 0 ? "all criteria passed"
                                        : (std::to_string(g_failures) + " criteria failed").c_str());
    return g_failures == 0 ? 0 : 1;
}
