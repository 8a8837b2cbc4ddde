#include "fmo/model.hpp"

#include <cmath>
#include <string>

namespace fmo {

Matrix7d default_hamiltonian() {
    Matrix7d h;
    // clang-format off
    h <<  215.0, -104.1,   5.1,  -4.3,   4.7, -15.1,  -7.8,
         -104.1,  220.0,  32.6,   7.1,   5.4,   8.3,   0.8,
            5.1,   32.6,   0.0, -46.8,   1.0,  -8.1,   5.1,
           -4.3,    7.1, -46.8, 125.0, -70.7, -14.7, -61.5,
            4.7,    5.4,   1.0, -70.7, 450.0,  89.7,  -2.5,
          -15.1,    8.3,  -8.1, -14.7,  89.7, 330.0,  32.7,
           -7.8,    0.8,   5.1, -61.5,  -2.5,  32.7, 280.0;
    // clang-format on
    return h;
}

DipoleTable default_dipoles() {
    DipoleTable mu;
    // clang-format off
    mu << -3.081,  2.119, -1.669,
          -3.481, -2.083, -0.190,
          -0.819, -3.972, -0.331,
          -3.390,  2.111, -1.080,
          -3.196, -2.361,  0.792,
          -0.621,  3.636,  1.882,
          -1.619,  2.850, -2.584;
    // clang-format on
    return mu;
}

namespace {

void require_rate(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw ValidationError(std::string(name) + ": rate must be finite");
    }
    if (value < 0.0) {
        throw ValidationError(std::string(name) + ": rate must be non-negative, got " +
                              std::to_string(value));
    }
}

}  // namespace

FmoModel FmoModel::with_dephasing(double gamma) const {
    require_rate(gamma, "dephasing");
    FmoModel copy = *this;
    copy.gamma_deph.setConstant(gamma);
    return copy;
}

FmoModel build_fmo_model(const ModelOverrides& overrides) {
    FmoModel model;
    model.h_site = default_hamiltonian();
    model.dipoles = default_dipoles();
    model.gamma_deph.setConstant(1.0);
    model.gamma_diss.setConstant(5e-4);
    model.gamma_sink = 6.3;

    if (overrides.dephasing) {
        require_rate(*overrides.dephasing, "dephasing");
        model.gamma_deph.setConstant(*overrides.dephasing);
    }
    if (overrides.dissipation) {
        require_rate(*overrides.dissipation, "dissipation");
        model.gamma_diss.setConstant(*overrides.dissipation);
    }
    if (overrides.sink_rate) {
        require_rate(*overrides.sink_rate, "sink_rate");
        model.gamma_sink = *overrides.sink_rate;
    }
    if (overrides.hamiltonian) {
        const Matrix7d& h = *overrides.hamiltonian;
        if (!h.allFinite()) throw ValidationError("hamiltonian: entries must be finite");
        if (h != h.transpose()) throw ValidationError("hamiltonian: matrix must be symmetric");
        model.h_site = h;
    }
    if (overrides.dipoles) {
        if (!overrides.dipoles->allFinite()) throw ValidationError("dipoles: entries must be finite");
        model.dipoles = *overrides.dipoles;
    }
    return model;
}

std::pair<double, double> site1_polar_angles(const FmoModel& model) {
    const Eigen::Vector3d mu = model.dipole(1);
    const double norm = mu.norm();
    if (norm == 0.0) throw ValidationError("site1_polar_angles: site-1 dipole has zero length");
    return {std::acos(mu.z() / norm), std::atan2(mu.y(), mu.x())};
}

Eigen::Vector3d polarization_vector(double theta, double phi) {
    const double st = std::sin(theta);
    return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

Vector7d exciton_energies(const FmoModel& model) {
    Eigen::SelfAdjointEigenSolver<Matrix7d> solver(model.h_site, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

DensityMatrix ground_state() {
    DensityMatrix rho = DensityMatrix::Zero();
    rho(kGround, kGround) = 1.0;
    return rho;
}

DensityMatrix site_state(int site) {
    if (site < 1 || site > kSites) throw ValidationError("site_state: site must be in 1..7");
    DensityMatrix rho = DensityMatrix::Zero();
    rho(site, site) = 1.0;
    return rho;
}

DensityMatrix single_excitation_state(const Vector7cd& amplitudes) {
    const double norm = amplitudes.norm();
    if (norm == 0.0) throw ValidationError("single_excitation_state: zero amplitude vector");
    const Vector7cd psi = amplitudes / norm;
    DensityMatrix rho = DensityMatrix::Zero();
    rho.block<kSites, kSites>(1, 1) = psi * psi.adjoint();
    return rho;
}

DensityMatrix bright_state() {
    Vector7cd psi = Vector7cd::Zero();
    psi(0) = psi(1) = 1.0;
    return single_excitation_state(psi);
}

DensityMatrix antisymmetric_state() {
    Vector7cd psi = Vector7cd::Zero();
    psi(0) = 1.0;
    psi(1) = -1.0;
    return single_excitation_state(psi);
}

DensityMatrix dark_target_state() {
    DensityMatrix rho = DensityMatrix::Zero();
    rho(5, 5) = 0.70;
    rho(6, 6) = 0.25;
    rho(7, 7) = 0.05;
    return rho;
}

double hermiticity_error(const DensityMatrix& rho) {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double trace_error(const DensityMatrix& rho) { return std::abs(rho.trace() - 1.0); }

double min_eigenvalue(const DensityMatrix& rho) {
    const DensityMatrix h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<DensityMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

Eigen::Matrix<double, kLevels, 1> populations(const DensityMatrix& rho) {
    return rho.diagonal().real();
}

}  // namespace fmo
