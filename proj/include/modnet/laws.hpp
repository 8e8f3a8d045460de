#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "modnet/rng.hpp"

namespace modnet {

// Standard normal CDF, accurate to ~1e-15.
double std_normal_cdf(double x);
// Standard normal quantile (Acklam's rational approximation plus one
// Halley refinement).
double std_normal_quantile(double p);

// Limit law N(0, 2*(1-2/pi)^2) of the normalized modularity.
namespace normal_limit {
double sigma();  // sqrt(2)*(1 - 2/pi)
double cdf(double x);
double quantile(double p);
}  // namespace normal_limit

// Gumbel-type coherence limit exp(-K*exp(-y/2)) with K = 1/sqrt(8*pi),
// the constant for the maximal off-diagonal coherence of an n x n sample
// with ~n^2/2 distinct pairs.
namespace gumbel_coherence {
double k();
double cdf(double y);
double quantile(double p);
}  // namespace gumbel_coherence

// Right-continuous empirical CDF over a sorted sample; quantile(p) is the
// order statistic at index ceil(p*m), clamped.
class EmpiricalLaw {
public:
    explicit EmpiricalLaw(std::vector<double> sorted_samples);
    double cdf(double x) const;
    double quantile(double p) const;
    std::size_t size() const { return samples_.size(); }
    const std::vector<double>& samples() const { return samples_; }

private:
    std::vector<double> samples_;
};

// Monte Carlo table of the Tracy-Widom (beta = 1) CDF, built from scaled
// largest eigenvalues of GOE draws (with edge-corrected centering, see
// tw1_scaled_largest_eigenvalue).
// Interpolation is monotone piecewise-linear; outside the grid the tails
// decay exponentially, clamped to [1e-6, 1 - 1e-6].
class Tw1Table {
public:
    struct Provenance {
        std::uint64_t replicates = 0;  // m
        std::uint64_t n_gen = 0;
        std::uint64_t seed = 0;
        double sample_mean = 0.0;
    };

    Tw1Table(std::vector<double> grid_x, std::vector<double> grid_cdf, Provenance prov);

    double cdf(double x) const;
    double quantile(double p) const;
    const Provenance& provenance() const { return prov_; }

    void save(std::ostream& out) const;
    static Tw1Table load(std::istream& in);
    static Tw1Table load_file(const std::string& path);
    void save_file(const std::string& path) const;

private:
    std::vector<double> x_;
    std::vector<double> p_;
    Provenance prov_;
};

// Generates the TW1 table from m scaled largest-eigenvalue replicates at
// dimension n_gen. Requires m >= 1e4 and n_gen >= 500.
Tw1Table build_tw1_table(std::uint64_t m, std::uint64_t n_gen, std::uint64_t seed);

// One scaled largest-eigenvalue draw as used by build_tw1_table, i.e.
// (n - 1/2)^{1/6} * (lambda_1(GOE_n) - 2*sqrt(n - 1/2)); the half-integer
// shift removes the dominant finite-size bias. Exposed so tests can
// cross-check the tridiagonal route against dense solves.
double tw1_scaled_largest_eigenvalue(std::uint64_t n, RngStream& rng);

// Finite-n second-order law: N(0, 2*(1-2/pi)^2) + (2/pi)*n^{-1/6}*TW1,
// held as m sorted Monte Carlo draws.
class ConvolutionF {
public:
    ConvolutionF(std::int64_t n, std::vector<double> sorted_samples);
    std::int64_t n() const { return n_; }
    double cdf(double x) const { return law_.cdf(x); }
    double quantile(double p) const { return law_.quantile(p); }
    std::size_t size() const { return law_.size(); }
    const std::vector<double>& samples() const { return law_.samples(); }

private:
    std::int64_t n_;
    EmpiricalLaw law_;
};

ConvolutionF convolution_f(std::int64_t n, std::size_t m, const Tw1Table& tw1, Seed seed);

}  // namespace modnet
