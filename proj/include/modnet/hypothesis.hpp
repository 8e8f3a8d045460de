#pragma once
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "modnet/laws.hpp"
#include "modnet/matrix.hpp"
#include "modnet/spectral.hpp"

namespace modnet {

enum class TestMethod { ModularityI, ModularityII, LargestEigenvalue, EntrywiseMaximum };

std::string test_method_name(TestMethod m);

// p-value with an optional "below table resolution" marker; such values
// print as "<bound" instead of a point estimate.
struct PValue {
    double value = 1.0;
    bool is_upper_bound = false;
    std::string to_string() const;
};

struct TestResult {
    TestMethod method = TestMethod::ModularityI;
    double statistic = 0.0;
    double critical_value = 0.0;
    PValue p_value;
    double alpha = 0.05;
    bool reject = false;
    Eigen::Index n = 0;
    std::vector<std::string> notes;
};

// Test I rejects when the normalized modularity statistic exceeds the
// standard-normal quantile Phi^{-1}(1-alpha) (a conservative cutoff, since
// the limit law has sigma < 1). `sigma_scaled_cutoff` switches to the
// exact-size cutoff sigma * Phi^{-1}(1-alpha) from the limiting normal.
TestResult modularity_test_i(const SymmetricMatrix& w, double alpha,
                             bool sigma_scaled_cutoff = false);
TestResult modularity_test_ii(const SymmetricMatrix& w, double alpha, const ConvolutionF& f);
TestResult largest_eigenvalue_test(const SymmetricMatrix& w, double alpha, const Tw1Table& tw1);

// Coherence test on the largest off-diagonal entry of the sample covariance
// matrix of the columns of W, divisor n-1 (`use_correlation` switches to the
// scale-invariant correlation reading).
TestResult entrywise_max_test(const SymmetricMatrix& w, double alpha,
                              bool use_correlation = false);

// Variants of the four tests that reuse a precomputed modularity
// decomposition (the Monte Carlo harness shares one solve per replicate).
TestResult modularity_test_i_from(const ModularityDecomposition& md, double alpha,
                                  bool sigma_scaled_cutoff = false);
TestResult modularity_test_ii_from(const ModularityDecomposition& md, double alpha,
                                   const ConvolutionF& f);
TestResult largest_eigenvalue_test_from(const ModularityDecomposition& md, double alpha,
                                        const Tw1Table& tw1);

// Binary recursive community split: reject => partition members by the
// sign of the top eigenvector, renormalize each submatrix, recurse.
struct CommunityNode {
    std::vector<Eigen::Index> members;  // indices into the root matrix
    TestResult test;
    std::vector<std::string> notes;
    std::unique_ptr<CommunityNode> positive_child;
    std::unique_ptr<CommunityNode> negative_child;
};

struct SplitContext {
    double alpha = 0.05;
    int max_depth = 3;
    TestMethod method = TestMethod::ModularityI;
    const ConvolutionF* f = nullptr;       // required for ModularityII at the root n
    const Tw1Table* tw1 = nullptr;         // required for LargestEigenvalue
    // Builds an n-specific convolution law on demand (submatrices shrink).
    std::function<ConvolutionF(Eigen::Index)> make_f;
};

std::unique_ptr<CommunityNode> recursive_split(const SymmetricMatrix& w,
                                               const SplitContext& ctx);

// Pooled off-diagonal standardization with a zero diagonal, as applied to
// each submatrix before re-testing.
SymmetricMatrix renormalize_offdiagonal(const SymmetricMatrix& w);

}  // namespace modnet
