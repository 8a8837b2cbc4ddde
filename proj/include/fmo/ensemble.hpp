// Orientation sampling, ensemble statistics and state fidelity.

#pragma once

#include "fmo/control.hpp"
#include "fmo/model.hpp"
#include "fmo/orientation.hpp"
#include "fmo/pulse.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fmo {

// theta = theta_c + eta s1, phi = phi_c + eta s2 with s1, s2 uniform on [0, 2 pi].
std::vector<Orientation> disorder_orientations(const Orientation& center, double eta, int n,
                                               std::uint64_t seed);

// Directions uniform on the sphere.
std::vector<Orientation> isotropic_orientations(int n, std::uint64_t seed);

// The 20 vertices of a regular dodecahedron as directions.
std::vector<Orientation> dodecahedron_orientations();

// Directions uniform over the spherical cap of half-angle `opening` about `axis`.
std::vector<Orientation> cone_orientations(const Orientation& axis, double opening, int n,
                                           std::uint64_t seed);

// Angle between two orientations' unit vectors, rad.
double angular_separation(const Orientation& a, const Orientation& b);

struct EnsembleDistribution {
    std::vector<double> values;
    double mean{0.0};
    double stddev{0.0};
    std::vector<double> edges;      // bins + 1 increasing edges
    std::vector<double> densities;  // per bin; sum(density * width) = 1

    std::size_t bins() const { return densities.size(); }
};

inline constexpr int kDefaultBins = 50;

// Histogram over the given edges; values outside are clamped into the end bins.
EnsembleDistribution make_distribution(std::vector<double> values, const std::vector<double>& edges);
EnsembleDistribution make_distribution(std::vector<double> values, int bins = kDefaultBins,
                                       double lo = 0.0, double hi = 1.0);
std::vector<double> uniform_edges(int bins, double lo, double hi);

// Probability mass of values strictly below the threshold.
double mass_below(const EnsembleDistribution& d, double threshold);

class EnsembleError : public std::runtime_error {
public:
    EnsembleError(std::size_t index, const std::string& what)
        : std::runtime_error("orientation sample " + std::to_string(index) + ": " + what), index(index) {}
    std::size_t index;
};

// Final states rho(t_pulse) for each orientation (spec.orientations is ignored).
std::vector<DensityMatrix> ensemble_states(const CostSpec& spec, const PulseParams& pulse,
                                           const std::vector<Orientation>& orientations, int threads = 1);

// One propagation and cost per orientation.
EnsembleDistribution ensemble_evaluate(const CostSpec& spec, const PulseParams& pulse,
                                       const std::vector<Orientation>& orientations, int threads = 1);

DensityMatrix ensemble_mean_density(const CostSpec& spec, const PulseParams& pulse,
                                    const std::vector<Orientation>& orientations, int threads = 1);

DensityMatrix mean_density(const std::vector<DensityMatrix>& states);

Matrix9d modulus(const DensityMatrix& rho);

// Negative eigenvalues above this are treated as round-off and clipped to zero.
inline constexpr double kPsdTolerance = 1e-8;

// Square root of a Hermitian positive semidefinite matrix.
template <typename Real, int N>
Eigen::Matrix<std::complex<Real>, N, N> psd_sqrt(const Eigen::Matrix<std::complex<Real>, N, N>& m) {
    using Matrix = Eigen::Matrix<std::complex<Real>, N, N>;
    const Matrix h = (m + m.adjoint()) / Real(2);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    auto lambda = es.eigenvalues();
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < Real(-kPsdTolerance)) {
            throw ValidationError("matrix is not positive semidefinite (eigenvalue " +
                                  std::to_string(static_cast<double>(lambda(i))) + ")");
        }
        lambda(i) = std::sqrt(std::max(lambda(i), Real(0)));
    }
    return es.eigenvectors() * lambda.template cast<std::complex<Real>>().asDiagonal() *
           es.eigenvectors().adjoint();
}

// F(rho, sigma) = tr sqrt(sqrt(sigma) rho sqrt(sigma)).
template <typename Real, int N>
Real fidelity(const Eigen::Matrix<std::complex<Real>, N, N>& rho,
              const Eigen::Matrix<std::complex<Real>, N, N>& sigma) {
    using Matrix = Eigen::Matrix<std::complex<Real>, N, N>;
    psd_sqrt<Real, N>(rho);  // validates rho
    const Matrix s = psd_sqrt<Real, N>(sigma);
    const Matrix inner = s * rho * s;
    Eigen::SelfAdjointEigenSolver<Matrix> es((inner + inner.adjoint()) / Real(2));
    Real f = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) f += std::sqrt(std::max(es.eigenvalues()(i), Real(0)));
    return f;
}

}  // namespace fmo
