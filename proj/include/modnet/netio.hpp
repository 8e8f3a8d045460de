#pragma once
#include <optional>
#include <string>
#include <vector>

#include "modnet/hypothesis.hpp"
#include "modnet/matrix.hpp"

namespace modnet {

// Parse failures carry the offending location; they map to the CLI's
// data-error exit code.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoadedMatrix {
    SymmetricMatrix matrix;
    std::vector<std::string> labels;  // empty when the file has no header
    std::vector<std::string> warnings;
};

// Square numeric CSV, optional header row of labels. Asymmetric input is
// symmetrized by averaging; asymmetry beyond 1e-8 adds a warning.
LoadedMatrix load_matrix_csv(const std::string& path);

void save_matrix_csv(const SymmetricMatrix& w, const std::vector<std::string>& labels,
                     const std::string& path);

// Rows are observations, columns are members; missing cells hold
// `missing_token`. With `votes_encoding`, cells y/yea/1 map to +1 and
// n/nay/-1 to -1, anything else to missing.
struct RawObservations {
    std::vector<std::vector<std::optional<double>>> columns;  // per member
    std::vector<std::string> member_labels;
    std::vector<std::string> dropped_members;  // > 50% missing
    std::size_t n_rows = 0;
};

RawObservations load_observations_csv(const std::string& path, const std::string& missing_token,
                                      bool votes_encoding = false, bool transpose = false);

struct NormalizedNetwork {
    SymmetricMatrix matrix;
    std::vector<std::string> member_labels;
    std::vector<std::string> provenance;  // normalization steps applied
    std::vector<std::string> excluded_members;
};

// Pairwise-complete Pearson correlations, then pooled off-diagonal
// centering/scaling with a zero diagonal.
NormalizedNetwork build_correlation_network(const RawObservations& obs);

std::string test_result_json(const TestResult& r);
std::string community_tree_json(const CommunityNode& root,
                                const std::vector<std::string>& labels);

}  // namespace modnet
