#pragma once
#include <optional>
#include <string>
#include <vector>

#include "modnet/matrix.hpp"

namespace modnet {

// Full eigendecomposition with eigenvalues in descending order and a
// deterministic sign convention on the eigenvectors (largest-magnitude
// entry positive, lowest index wins ties).
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;   // descending
    Eigen::MatrixXd eigenvectors;  // column i pairs with eigenvalues(i)
};

// Q together with its additive split Q = A_n + B_n, B_n = lambda1*||u1||_1^2.
struct ModularityDecomposition {
    double q = 0.0;
    double a_n = 0.0;
    double b_n = 0.0;
    double lambda1 = 0.0;
    double l1norm_sq = 0.0;  // ||u1||_1^2
    Eigen::Index n = 0;
    Eigen::VectorXi sign_vector;  // entries in {-1, 0, +1}
    bool degenerate_top = false;  // lambda1 multiplicity within tolerance
};

enum class NormalizedVariant {
    CenteredL1,      // (Q - 2*sqrt(n)*||u1||_1^2) / n
    Centered4OverPi, // (Q - n^{3/2}*4/pi) / n
    RawOverN,        // Q / n
};

SpectralDecomposition eigendecompose_symmetric(const SymmetricMatrix& w);

Eigen::VectorXi sign_vector(const Eigen::VectorXd& u);

ModularityDecomposition modularity(const SymmetricMatrix& w);

double normalized_modularity(const ModularityDecomposition& md, NormalizedVariant variant);

// Classical eigenvalue locations gamma_1 < ... < gamma_n of the
// semicircle density on [-2, 2]: gamma_j solves F_sc(gamma_j) = j/n.
std::vector<double> classical_locations(Eigen::Index n);

// Semicircle CDF on [-2, 2], clamped outside.
double semicircle_cdf(double x);

}  // namespace modnet
