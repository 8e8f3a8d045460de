#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace modnet {

// Dense real symmetric edge-weight matrix. Symmetry is enforced at
// construction by mirroring the upper triangle; entries must be finite.
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
        if (m_.rows() == 0 || m_.rows() != m_.cols())
            throw std::invalid_argument("SymmetricMatrix: dimension must be positive and square");
        for (Eigen::Index j = 0; j < m_.cols(); ++j)
            for (Eigen::Index i = 0; i <= j; ++i) {
                const double v = m_(i, j);
                if (!std::isfinite(v))
                    throw std::invalid_argument("SymmetricMatrix: non-finite entry at (" +
                                                std::to_string(i) + "," + std::to_string(j) + ")");
                m_(j, i) = v;
            }
    }

    static SymmetricMatrix zero(Eigen::Index n) {
        return SymmetricMatrix(Eigen::MatrixXd::Zero(n, n));
    }

    Eigen::Index n() const { return m_.rows(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
    const Eigen::MatrixXd& mat() const { return m_; }

    void set(Eigen::Index i, Eigen::Index j, double v) {
        m_(i, j) = v;
        m_(j, i) = v;
    }

    SymmetricMatrix scaled(double c) const { return SymmetricMatrix(c * m_); }

private:
    Eigen::MatrixXd m_;
};

}  // namespace modnet
