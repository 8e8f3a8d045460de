#include "modnet/netio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace modnet {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    for (auto& cell : cells) {
        const auto b = cell.find_first_not_of(" \t");
        const auto e = cell.find_last_not_of(" \t");
        cell = (b == std::string::npos) ? "" : cell.substr(b, e - b + 1);
    }
    return cells;
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) return std::nullopt;
    return v;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw FormatError(path + ": empty file");
    return rows;
}

bool is_numeric_row(const std::vector<std::string>& row) {
    for (const auto& cell : row)
        if (!parse_number(cell)) return false;
    return true;
}

}  // namespace

LoadedMatrix load_matrix_csv(const std::string& path) {
    auto rows = read_csv(path);
    std::vector<std::string> labels;
    if (!is_numeric_row(rows.front())) {
        labels = rows.front();
        rows.erase(rows.begin());
        if (rows.empty()) throw FormatError(path + ": header without data");
    }
    const std::size_t n = rows.size();
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n)
            throw FormatError(path + ": row " + std::to_string(i + 1) + " has " +
                              std::to_string(rows[i].size()) + " cells, expected " +
                              std::to_string(n) + " (matrix must be square)");
        for (std::size_t j = 0; j < n; ++j) {
            const auto v = parse_number(rows[i][j]);
            if (!v)
                throw FormatError(path + ": non-numeric cell at row " + std::to_string(i + 1) +
                                  ", column " + std::to_string(j + 1));
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *v;
        }
    }
    if (!labels.empty() && labels.size() != n)
        throw FormatError(path + ": header has " + std::to_string(labels.size()) +
                          " labels for " + std::to_string(n) + " columns");

    std::vector<std::string> warnings;
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8)
        warnings.push_back("input asymmetric by " + fmt_double(asym) +
                           "; symmetrized by averaging");
    Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    return LoadedMatrix{SymmetricMatrix(std::move(sym)), std::move(labels), std::move(warnings)};
}

void save_matrix_csv(const SymmetricMatrix& w, const std::vector<std::string>& labels,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    if (!labels.empty()) {
        for (Eigen::Index j = 0; j < w.n(); ++j)
            out << (j ? "," : "") << labels[static_cast<std::size_t>(j)];
        out << "\n";
    }
    for (Eigen::Index i = 0; i < w.n(); ++i) {
        for (Eigen::Index j = 0; j < w.n(); ++j) out << (j ? "," : "") << fmt_double(w(i, j));
        out << "\n";
    }
}

RawObservations load_observations_csv(const std::string& path, const std::string& missing_token,
                                      bool votes_encoding, bool transpose) {
    auto rows = read_csv(path);

    const auto decode = [&](const std::string& cell) -> std::optional<double> {
        if (cell == missing_token) return std::nullopt;
        if (votes_encoding) {
            std::string low;
            for (char c : cell) low.push_back(static_cast<char>(std::tolower(c)));
            if (low == "y" || low == "yea" || low == "yes" || low == "1" || low == "+1")
                return 1.0;
            if (low == "n" || low == "nay" || low == "no" || low == "-1") return -1.0;
            return std::nullopt;  // abstain / unknown token counts as missing
        }
        return parse_number(cell);
    };

    std::vector<std::string> labels;
    if (!transpose && !is_numeric_row(rows.front()) &&
        std::none_of(rows.front().begin(), rows.front().end(),
                     [&](const std::string& c) { return decode(c).has_value(); })) {
        labels = rows.front();
        rows.erase(rows.begin());
        if (rows.empty()) throw FormatError(path + ": header without data");
    }

    const std::size_t width = rows.front().size();
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].size() != width)
            throw FormatError(path + ": ragged row " + std::to_string(i + 1));

    // members along columns; --transpose treats input rows as members
    const std::size_t n_members = transpose ? rows.size() : width;
    const std::size_t n_obs = transpose ? width : rows.size();
    std::vector<std::vector<std::optional<double>>> cols(
        n_members, std::vector<std::optional<double>>(n_obs));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j) {
            const auto v = decode(rows[i][j]);
            if (transpose)
                cols[i][j] = v;
            else
                cols[j][i] = v;
        }
    if (labels.empty())
        for (std::size_t j = 0; j < n_members; ++j) labels.push_back("m" + std::to_string(j));

    RawObservations obs;
    obs.n_rows = n_obs;
    for (std::size_t j = 0; j < n_members; ++j) {
        std::size_t missing = 0;
        for (const auto& v : cols[j])
            if (!v) ++missing;
        if (2 * missing > n_obs) {
            obs.dropped_members.push_back(labels[j]);
        } else {
            obs.columns.push_back(std::move(cols[j]));
            obs.member_labels.push_back(labels[j]);
        }
    }
    if (obs.columns.size() < 2)
        throw FormatError(path + ": fewer than 2 members remain after the 50% missing filter");
    return obs;
}

NormalizedNetwork build_correlation_network(const RawObservations& obs) {
    const std::size_t total = obs.columns.size();
    if (total < 2 || obs.n_rows < 3)
        throw FormatError("build_correlation_network: need >= 2 members and >= 3 observations");

    // Exclude zero-variance members first (their correlations are undefined).
    std::vector<std::size_t> keep;
    std::vector<std::string> excluded;
    for (std::size_t j = 0; j < total; ++j) {
        double sum = 0, sumsq = 0, count = 0;
        for (const auto& v : obs.columns[j])
            if (v) {
                sum += *v;
                sumsq += *v * *v;
                count += 1;
            }
        const double var = count > 1 ? (sumsq - sum * sum / count) / (count - 1) : 0.0;
        if (var > 0.0)
            keep.push_back(j);
        else
            excluded.push_back(obs.member_labels[j]);
    }
    const std::size_t n = keep.size();
    if (n < 2) throw FormatError("build_correlation_network: fewer than 2 usable members");

    Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                 static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            const auto& x = obs.columns[keep[a]];
            const auto& y = obs.columns[keep[b]];
            // pairwise-complete Pearson
            double sx = 0, sy = 0, m = 0;
            for (std::size_t i = 0; i < obs.n_rows; ++i)
                if (x[i] && y[i]) {
                    sx += *x[i];
                    sy += *y[i];
                    m += 1;
                }
            double r = 0.0;
            if (m >= 3) {
                const double mx = sx / m, my = sy / m;
                double sxy = 0, sxx = 0, syy = 0;
                for (std::size_t i = 0; i < obs.n_rows; ++i)
                    if (x[i] && y[i]) {
                        sxy += (*x[i] - mx) * (*y[i] - my);
                        sxx += (*x[i] - mx) * (*x[i] - mx);
                        syy += (*y[i] - my) * (*y[i] - my);
                    }
                if (sxx > 0 && syy > 0) r = sxy / std::sqrt(sxx * syy);
            }
            corr(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = r;
            corr(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = r;
        }

    NormalizedNetwork net{renormalize_offdiagonal(SymmetricMatrix(std::move(corr))), {}, {}, {}};
    for (std::size_t a = 0; a < n; ++a) net.member_labels.push_back(obs.member_labels[keep[a]]);
    net.excluded_members = std::move(excluded);
    net.provenance = {"pairwise-complete Pearson correlation",
                      "pooled off-diagonal centering and scaling", "zero diagonal"};
    return net;
}

namespace {

nlohmann::json test_result_to_json(const TestResult& r) {
    nlohmann::json j;
    j["test"] = test_method_name(r.method);
    j["statistic"] = r.statistic;
    j["critical_value"] = r.critical_value;
    j["p_value"] = r.p_value.is_upper_bound ? nlohmann::json(r.p_value.to_string())
                                            : nlohmann::json(r.p_value.value);
    j["alpha"] = r.alpha;
    j["reject"] = r.reject;
    j["n"] = static_cast<std::int64_t>(r.n);
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j;
}

nlohmann::json node_to_json(const CommunityNode& node,
                            const std::vector<std::string>& labels) {
    nlohmann::json j;
    j["size"] = node.members.size();
    nlohmann::json members = nlohmann::json::array();
    for (Eigen::Index m : node.members) {
        if (!labels.empty())
            members.push_back(labels[static_cast<std::size_t>(m)]);
        else
            members.push_back(static_cast<std::int64_t>(m));
    }
    j["members"] = std::move(members);
    if (node.test.n > 0) j["test"] = test_result_to_json(node.test);
    if (!node.notes.empty()) j["notes"] = node.notes;
    if (node.positive_child) j["positive"] = node_to_json(*node.positive_child, labels);
    if (node.negative_child) j["negative"] = node_to_json(*node.negative_child, labels);
    return j;
}

}  // namespace

std::string test_result_json(const TestResult& r) { return test_result_to_json(r).dump(2); }

std::string community_tree_json(const CommunityNode& root,
                                const std::vector<std::string>& labels) {
    nlohmann::json j;
    j["version"] = 1;
    j["tree"] = node_to_json(root, labels);
    return j.dump(2);
}

}  // namespace modnet
