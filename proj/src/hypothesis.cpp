#include "modnet/hypothesis.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace modnet {

std::string test_method_name(TestMethod m) {
    switch (m) {
        case TestMethod::ModularityI: return "modularity1";
        case TestMethod::ModularityII: return "modularity2";
        case TestMethod::LargestEigenvalue: return "eigenvalue";
        case TestMethod::EntrywiseMaximum: return "maxentry";
    }
    return "unknown";
}

std::string PValue::to_string() const {
    char buf[32];
    if (is_upper_bound)
        std::snprintf(buf, sizeof(buf), "<%.0e", value);
    else
        std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

namespace {

void note_degenerate(const ModularityDecomposition& md, TestResult& r) {
    if (md.degenerate_top)
        r.notes.push_back("top eigenvalue nearly degenerate; u1 ill-defined");
}

}  // namespace

TestResult modularity_test_i_from(const ModularityDecomposition& md, double alpha,
                                  bool sigma_scaled_cutoff) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("modularity_test_i: alpha must lie in (0,1)");
    TestResult r;
    r.method = TestMethod::ModularityI;
    r.n = md.n;
    r.alpha = alpha;
    r.statistic = normalized_modularity(md, NormalizedVariant::CenteredL1);
    // The p-value convention follows the cutoff: the default treats the
    // statistic as standard normal, the sigma-scaled variant uses the
    // limiting N(0, 2(1-2/pi)^2) law.
    if (sigma_scaled_cutoff) {
        r.critical_value = normal_limit::quantile(1.0 - alpha);
        r.p_value.value = 1.0 - normal_limit::cdf(r.statistic);
    } else {
        r.critical_value = std_normal_quantile(1.0 - alpha);
        r.p_value.value = 1.0 - std_normal_cdf(r.statistic);
    }
    r.reject = r.statistic > r.critical_value;
    note_degenerate(md, r);
    return r;
}

TestResult modularity_test_ii_from(const ModularityDecomposition& md, double alpha,
                                   const ConvolutionF& f) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("modularity_test_ii: alpha must lie in (0,1)");
    if (f.n() != md.n)
        throw std::invalid_argument("modularity_test_ii: convolution law built for n=" +
                                    std::to_string(f.n()) + ", matrix has n=" +
                                    std::to_string(md.n));
    TestResult r;
    r.method = TestMethod::ModularityII;
    r.n = md.n;
    r.alpha = alpha;
    r.statistic = normalized_modularity(md, NormalizedVariant::CenteredL1);
    r.critical_value = f.quantile(1.0 - alpha);
    const double resolution = 1.0 / static_cast<double>(f.size());
    const double p = 1.0 - f.cdf(r.statistic);
    if (p < resolution) {
        r.p_value.value = resolution;
        r.p_value.is_upper_bound = true;
    } else {
        r.p_value.value = p;
    }
    r.reject = r.statistic > r.critical_value;
    note_degenerate(md, r);
    return r;
}

TestResult largest_eigenvalue_test_from(const ModularityDecomposition& md, double alpha,
                                        const Tw1Table& tw1) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("largest_eigenvalue_test: alpha must lie in (0,1)");
    TestResult r;
    r.method = TestMethod::LargestEigenvalue;
    r.n = md.n;
    r.alpha = alpha;
    const double n = static_cast<double>(md.n);
    r.statistic = std::pow(n, 1.0 / 6.0) * (md.lambda1 - 2.0 * std::sqrt(n));
    r.critical_value = tw1.quantile(1.0 - alpha);
    const double p = 1.0 - tw1.cdf(r.statistic);
    if (p < 1e-4) {
        r.p_value.value = 1e-4;
        r.p_value.is_upper_bound = true;
    } else {
        r.p_value.value = p;
    }
    r.reject = r.statistic > r.critical_value;
    note_degenerate(md, r);
    return r;
}

TestResult modularity_test_i(const SymmetricMatrix& w, double alpha,
                             bool sigma_scaled_cutoff) {
    return modularity_test_i_from(modularity(w), alpha, sigma_scaled_cutoff);
}

TestResult modularity_test_ii(const SymmetricMatrix& w, double alpha, const ConvolutionF& f) {
    return modularity_test_ii_from(modularity(w), alpha, f);
}

TestResult largest_eigenvalue_test(const SymmetricMatrix& w, double alpha,
                                   const Tw1Table& tw1) {
    return largest_eigenvalue_test_from(modularity(w), alpha, tw1);
}

TestResult entrywise_max_test(const SymmetricMatrix& w, double alpha, bool use_correlation) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("entrywise_max_test: alpha must lie in (0,1)");
    const Eigen::Index n = w.n();
    if (n < 3) throw std::invalid_argument("entrywise_max_test: n must be >= 3");

    // Columns of W act as n observations of an n-vector.
    Eigen::MatrixXd centered = w.mat();
    const Eigen::VectorXd row_mean = centered.rowwise().mean();
    centered.colwise() -= row_mean;
    const Eigen::MatrixXd gram = centered * centered.transpose();

    double max_abs = 0.0;
    const double nd = static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (gram(i, i) <= 0.0)
            throw std::invalid_argument("entrywise_max_test: zero-variance column " +
                                        std::to_string(i));
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = use_correlation
                                 ? std::abs(gram(i, j)) / std::sqrt(gram(i, i) * gram(j, j))
                                 : std::abs(gram(i, j)) / (nd - 1.0);
            max_abs = std::max(max_abs, v);
        }
    }

    TestResult r;
    r.method = TestMethod::EntrywiseMaximum;
    r.n = n;
    r.alpha = alpha;
    r.statistic = nd * max_abs * max_abs - 4.0 * std::log(nd) + std::log(std::log(nd));
    r.critical_value = gumbel_coherence::quantile(1.0 - alpha);
    r.p_value.value = 1.0 - gumbel_coherence::cdf(r.statistic);
    r.reject = r.statistic > r.critical_value;
    return r;
}

SymmetricMatrix renormalize_offdiagonal(const SymmetricMatrix& w) {
    const Eigen::Index n = w.n();
    if (n < 2) throw std::invalid_argument("renormalize_offdiagonal: n must be >= 2");
    double sum = 0.0, sumsq = 0.0;
    const double cells = static_cast<double>(n) * static_cast<double>(n - 1);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            sum += w(i, j);
            sumsq += w(i, j) * w(i, j);
        }
    const double mean = sum / cells;
    const double var = sumsq / cells - mean * mean;
    if (!(var > 0.0))
        throw std::invalid_argument("renormalize_offdiagonal: off-diagonal variance is zero");
    const double sd = std::sqrt(var);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            out(i, j) = (w(i, j) - mean) / sd;
            out(j, i) = out(i, j);
        }
    return SymmetricMatrix(std::move(out));
}

namespace {

TestResult run_node_test(const SymmetricMatrix& w, const ModularityDecomposition& md,
                         const SplitContext& ctx) {
    switch (ctx.method) {
        case TestMethod::ModularityI:
            return modularity_test_i_from(md, ctx.alpha);
        case TestMethod::ModularityII: {
            if (ctx.f && ctx.f->n() == md.n) return modularity_test_ii_from(md, ctx.alpha, *ctx.f);
            if (!ctx.make_f)
                throw std::invalid_argument("recursive_split: no convolution law for n=" +
                                            std::to_string(md.n));
            return modularity_test_ii_from(md, ctx.alpha, ctx.make_f(md.n));
        }
        case TestMethod::LargestEigenvalue:
            if (!ctx.tw1)
                throw std::invalid_argument("recursive_split: TW1 table required");
            return largest_eigenvalue_test_from(md, ctx.alpha, *ctx.tw1);
        case TestMethod::EntrywiseMaximum:
            return entrywise_max_test(w, ctx.alpha);
    }
    throw std::logic_error("recursive_split: unknown method");
}

SymmetricMatrix extract_submatrix(const SymmetricMatrix& w,
                                  const std::vector<Eigen::Index>& local) {
    const Eigen::Index k = static_cast<Eigen::Index>(local.size());
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b)
            sub(a, b) = w(local[static_cast<std::size_t>(a)], local[static_cast<std::size_t>(b)]);
    return SymmetricMatrix(std::move(sub));
}

std::unique_ptr<CommunityNode> split_node(const SymmetricMatrix& w,
                                          std::vector<Eigen::Index> members,
                                          const SplitContext& ctx, int depth) {
    auto node = std::make_unique<CommunityNode>();
    node->members = std::move(members);

    const ModularityDecomposition md = modularity(w);
    node->test = run_node_test(w, md, ctx);
    if (!node->test.reject || depth >= ctx.max_depth) return node;

    std::vector<Eigen::Index> pos_local, neg_local;
    for (Eigen::Index i = 0; i < md.n; ++i) {
        if (md.sign_vector(i) > 0) pos_local.push_back(i);
        else if (md.sign_vector(i) < 0) neg_local.push_back(i);
        // zero-sign members remain at this node
    }
    const auto recurse = [&](const std::vector<Eigen::Index>& local)
        -> std::unique_ptr<CommunityNode> {
        auto child = std::make_unique<CommunityNode>();
        for (Eigen::Index i : local)
            child->members.push_back(node->members[static_cast<std::size_t>(i)]);
        if (local.size() < 4) {
            child->notes.push_back("too small to split (size " +
                                   std::to_string(local.size()) + ")");
            return child;
        }
        const SymmetricMatrix sub = renormalize_offdiagonal(extract_submatrix(w, local));
        auto full = split_node(sub, std::move(child->members), ctx, depth + 1);
        return full;
    };
    node->positive_child = recurse(pos_local);
    node->negative_child = recurse(neg_local);
    return node;
}

}  // namespace

std::unique_ptr<CommunityNode> recursive_split(const SymmetricMatrix& w,
                                               const SplitContext& ctx) {
    if (w.n() < 4) throw std::invalid_argument("recursive_split: n must be >= 4");
    std::vector<Eigen::Index> members(static_cast<std::size_t>(w.n()));
    for (Eigen::Index i = 0; i < w.n(); ++i) members[static_cast<std::size_t>(i)] = i;
    return split_node(w, std::move(members), ctx, 0);
}

}  // namespace modnet
