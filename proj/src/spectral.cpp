#include "modnet/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace modnet {

SpectralDecomposition eigendecompose_symmetric(const SymmetricMatrix& w) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w.mat());
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecompose_symmetric: solver did not converge (n=" +
                                 std::to_string(w.n()) + ")");
    const Eigen::Index n = w.n();
    SpectralDecomposition dec;
    dec.eigenvalues.resize(n);
    dec.eigenvectors.resize(n, n);
    // Eigen returns ascending order; flip to descending.
    for (Eigen::Index i = 0; i < n; ++i) {
        dec.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
        dec.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    // Sign convention: largest-magnitude entry positive, lowest index wins.
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index best = 0;
        double best_abs = -1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double a = std::abs(dec.eigenvectors(j, i));
            if (a > best_abs) {
                best_abs = a;
                best = j;
            }
        }
        if (dec.eigenvectors(best, i) < 0.0) dec.eigenvectors.col(i) *= -1.0;
    }
    return dec;
}

Eigen::VectorXi sign_vector(const Eigen::VectorXd& u) {
    Eigen::VectorXi s(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i)
        s(i) = (u(i) > 0.0) ? 1 : (u(i) < 0.0 ? -1 : 0);
    return s;
}

ModularityDecomposition modularity(const SymmetricMatrix& w) {
    if (w.n() < 2) throw std::invalid_argument("modularity: n must be >= 2");
    const SpectralDecomposition dec = eigendecompose_symmetric(w);
    const Eigen::Index n = w.n();

    ModularityDecomposition md;
    md.n = n;
    md.lambda1 = dec.eigenvalues(0);
    md.sign_vector = sign_vector(dec.eigenvectors.col(0));

    const Eigen::VectorXd s = md.sign_vector.cast<double>();
    md.q = s.dot(w.mat() * s);

    const Eigen::VectorXd proj = dec.eigenvectors.transpose() * s;  // sgn(u1)^T u_i
    md.l1norm_sq = proj(0) * proj(0);  // sgn(u1)^T u1 = ||u1||_1
    md.b_n = md.lambda1 * md.l1norm_sq;
    md.a_n = 0.0;
    for (Eigen::Index i = 1; i < n; ++i) md.a_n += dec.eigenvalues(i) * proj(i) * proj(i);

    if (n >= 2) {
        const double tol = 1e-9 * w.mat().norm();
        md.degenerate_top = std::abs(dec.eigenvalues(0) - dec.eigenvalues(1)) <= tol;
    }
    return md;
}

double normalized_modularity(const ModularityDecomposition& md, NormalizedVariant variant) {
    const double n = static_cast<double>(md.n);
    switch (variant) {
        case NormalizedVariant::CenteredL1:
            return (md.q - 2.0 * std::sqrt(n) * md.l1norm_sq) / n;
        case NormalizedVariant::Centered4OverPi:
            return (md.q - std::pow(n, 1.5) * 4.0 / std::numbers::pi) / n;
        case NormalizedVariant::RawOverN:
            return md.q / n;
    }
    throw std::logic_error("normalized_modularity: unknown variant");
}

double semicircle_cdf(double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    using std::numbers::pi;
    return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * pi) + std::asin(x / 2.0) / pi;
}

std::vector<double> classical_locations(Eigen::Index n) {
    if (n < 1) throw std::invalid_argument("classical_locations: n must be >= 1");
    std::vector<double> gamma(static_cast<std::size_t>(n));
    for (Eigen::Index j = 1; j <= n; ++j) {
        const double target = static_cast<double>(j) / static_cast<double>(n);
        if (j == n) {
            gamma[static_cast<std::size_t>(j - 1)] = 2.0;
            continue;
        }
        double lo = -2.0, hi = 2.0;
        // Bisection: F_sc is strictly increasing on [-2, 2].
        for (int iter = 0; iter < 200; ++iter) {
            const double mid = 0.5 * (lo + hi);
            const double f = semicircle_cdf(mid) - target;
            if (std::abs(f) <= 1e-13) {
                lo = hi = mid;
                break;
            }
            (f < 0.0 ? lo : hi) = mid;
        }
        gamma[static_cast<std::size_t>(j - 1)] = 0.5 * (lo + hi);
    }
    return gamma;
}

}  // namespace modnet
