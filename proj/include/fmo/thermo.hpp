// Orienting a sample with a far-detuned field.
//
// Light shift of the ground state for polarization e:
//   Delta(theta, phi) = sum_i |mu_i . e E0|^2 / (omega_i - omega_l)   [cm^-1]
// The equilibrium orientation density is proportional to exp(+Delta / k_B T).
// Angles here are absolute polarization angles in the molecular frame.

#pragma once

#include "fmo/model.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace fmo {

// Boltzmann constant, cm^-1 / K.
inline constexpr double kBoltzmannWavenumber = 0.6950348;
inline constexpr double kElectronVolt = 1.602176634e-19;  // J

struct OrientingField {
    double omega_l{-1000.0};  // cm^-1
    double e0{70.0};          // D^-1 cm^-1
};

// Throws ValidationError when omega_l lies within 1 cm^-1 of a site energy.
double orientation_energy(double theta, double phi, const OrientingField& field, const FmoModel& model);

// max_i |mu_i . e| e0, cm^-1.
double max_rabi(double theta, double phi, double e0, const FmoModel& model);

struct AngleGrid {
    Eigen::VectorXd theta;   // [0, pi], n_theta points
    Eigen::VectorXd phi;     // [0, 2 pi), n_phi points
    Eigen::MatrixXd values;  // n_theta x n_phi

    // Quadrature weight sin(theta) dtheta dphi of a node.
    double weight(Eigen::Index i) const;
};

inline constexpr int kGridTheta = 181;
inline constexpr int kGridPhi = 360;

AngleGrid angle_grid(int n_theta = kGridTheta, int n_phi = kGridPhi);
AngleGrid energy_landscape(const OrientingField& field, const FmoModel& model, int n_theta = kGridTheta,
                           int n_phi = kGridPhi);
AngleGrid rabi_map(const OrientingField& field, const FmoModel& model, int n_theta = kGridTheta,
                   int n_phi = kGridPhi);

// Grid node of the maximum. Delta(e) = Delta(-e), so the maximum comes in antipodal
// pairs; ties (relative 1e-12) go to the smaller phi, then the smaller theta.
std::pair<double, double> grid_argmax(const AngleGrid& grid);

struct OrientationPdf {
    AngleGrid probability;  // node probabilities, sum to 1
    Eigen::MatrixXd density;  // per steradian (probability / weight)
};

OrientationPdf boltzmann_orientation_pdf(const OrientingField& field, const FmoModel& model, double temperature,
                                         int n_theta = kGridTheta, int n_phi = kGridPhi);

// Probability within the cap of half-angle `opening` about the landscape argmax.
double cone_population_fraction(const OrientingField& field, const FmoModel& model, double temperature,
                                double opening, int n_theta = kGridTheta, int n_phi = kGridPhi);

struct RotorSpec {
    double mass{15e-23};        // kg
    double radius{2e-9};        // m
    double thermal_energy{0.025};  // eV
};

// I = M R^2 / 4 (disk about a diameter), kg m^2.
double moment_of_inertia(const RotorSpec& rotor);
// t_rot = (pi/2) sqrt(I / (2 E_th)), seconds.
double rotation_time(const RotorSpec& rotor);

}  // namespace fmo
