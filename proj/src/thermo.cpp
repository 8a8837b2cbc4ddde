#include "fmo/thermo.hpp"

#include "fmo/orientation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace fmo {

double orientation_energy(double theta, double phi, const OrientingField& field, const FmoModel& model) {
    const Eigen::Vector3d e = polarization_vector(theta, phi);
    double delta = 0.0;
    for (int i = 1; i <= kSites; ++i) {
        const double detuning = model.site_energy(i) - field.omega_l;
        if (std::abs(detuning) < 1.0) {
            std::ostringstream msg;
            msg << "orienting field at " << field.omega_l << " cm^-1 is within 1 cm^-1 of site " << i;
            throw ValidationError(msg.str());
        }
        const double rabi = model.dipole(i).dot(e) * field.e0;
        delta += rabi * rabi / detuning;
    }
    return delta;
}

double max_rabi(double theta, double phi, double e0, const FmoModel& model) {
    const Eigen::Vector3d e = polarization_vector(theta, phi);
    return (model.dipoles * e).cwiseAbs().maxCoeff() * std::abs(e0);
}

double AngleGrid::weight(Eigen::Index i) const {
    const double dtheta = theta.size() > 1 ? std::numbers::pi / static_cast<double>(theta.size() - 1) : std::numbers::pi;
    const double dphi = 2.0 * std::numbers::pi / static_cast<double>(phi.size());
    // Trapezoid in theta: half weight at the poles.
    const bool pole = i == 0 || i == theta.size() - 1;
    return std::sin(theta(i)) * dtheta * dphi * (pole ? 0.5 : 1.0);
}

AngleGrid angle_grid(int n_theta, int n_phi) {
    if (n_theta < 2 || n_phi < 1) throw ValidationError("angle grid: need n_theta >= 2 and n_phi >= 1");
    AngleGrid g;
    g.theta = Eigen::VectorXd::LinSpaced(n_theta, 0.0, std::numbers::pi);
    g.phi.resize(n_phi);
    for (int j = 0; j < n_phi; ++j) g.phi(j) = 2.0 * std::numbers::pi * j / n_phi;
    g.values = Eigen::MatrixXd::Zero(n_theta, n_phi);
    return g;
}

AngleGrid energy_landscape(const OrientingField& field, const FmoModel& model, int n_theta, int n_phi) {
    AngleGrid g = angle_grid(n_theta, n_phi);
    for (Eigen::Index i = 0; i < g.theta.size(); ++i) {
        for (Eigen::Index j = 0; j < g.phi.size(); ++j) {
            g.values(i, j) = orientation_energy(g.theta(i), g.phi(j), field, model);
        }
    }
    return g;
}

AngleGrid rabi_map(const OrientingField& field, const FmoModel& model, int n_theta, int n_phi) {
    AngleGrid g = angle_grid(n_theta, n_phi);
    for (Eigen::Index i = 0; i < g.theta.size(); ++i) {
        for (Eigen::Index j = 0; j < g.phi.size(); ++j) g.values(i, j) = max_rabi(g.theta(i), g.phi(j), field.e0, model);
    }
    return g;
}

std::pair<double, double> grid_argmax(const AngleGrid& grid) {
    const double top = grid.values.maxCoeff();
    const double tol = 1e-12 * std::max(1.0, std::abs(top));
    for (Eigen::Index j = 0; j < grid.phi.size(); ++j) {
        for (Eigen::Index i = 0; i < grid.theta.size(); ++i) {
            if (grid.values(i, j) >= top - tol) return {grid.theta(i), grid.phi(j)};
        }
    }
    return {grid.theta(0), grid.phi(0)};
}

OrientationPdf boltzmann_orientation_pdf(const OrientingField& field, const FmoModel& model, double temperature,
                                         int n_theta, int n_phi) {
    if (!(temperature > 0.0)) throw ValidationError("temperature must be positive");
    const AngleGrid delta = energy_landscape(field, model, n_theta, n_phi);
    const double kt = kBoltzmannWavenumber * temperature;
    const double top = delta.values.maxCoeff();
    OrientationPdf pdf;
    pdf.probability = delta;
    pdf.density = Eigen::MatrixXd::Zero(delta.values.rows(), delta.values.cols());
    double z = 0.0;
    for (Eigen::Index i = 0; i < delta.theta.size(); ++i) {
        const double w = delta.weight(i);
        for (Eigen::Index j = 0; j < delta.phi.size(); ++j) {
            const double boltz = std::exp((delta.values(i, j) - top) / kt);
            pdf.density(i, j) = boltz;
            pdf.probability.values(i, j) = w * boltz;
            z += w * boltz;
        }
    }
    pdf.probability.values /= z;
    pdf.density /= z;
    return pdf;
}

double cone_population_fraction(const OrientingField& field, const FmoModel& model, double temperature,
                                double opening, int n_theta, int n_phi) {
    if (!(opening > 0.0)) throw ValidationError("cone opening must be positive");
    const OrientationPdf pdf = boltzmann_orientation_pdf(field, model, temperature, n_theta, n_phi);
    const AngleGrid& p = pdf.probability;
    const auto [theta_max, phi_max] = grid_argmax(energy_landscape(field, model, n_theta, n_phi));
    const Eigen::Vector3d axis = polarization_vector(theta_max, phi_max);
    const double cmin = std::cos(opening);
    double inside = 0.0;
    for (Eigen::Index i = 0; i < p.theta.size(); ++i) {
        for (Eigen::Index j = 0; j < p.phi.size(); ++j) {
            if (polarization_vector(p.theta(i), p.phi(j)).dot(axis) >= cmin - 1e-12) inside += p.values(i, j);
        }
    }
    return inside;
}

double moment_of_inertia(const RotorSpec& rotor) {
    if (!(rotor.mass > 0.0 && rotor.radius > 0.0 && rotor.thermal_energy > 0.0)) {
        throw ValidationError("rotor parameters must be positive");
    }
    return 0.25 * rotor.mass * rotor.radius * rotor.radius;
}

double rotation_time(const RotorSpec& rotor) {
    const double inertia = moment_of_inertia(rotor);
    return 0.5 * std::numbers::pi * std::sqrt(inertia / (2.0 * rotor.thermal_energy * kElectronVolt));
}

}  // namespace fmo
