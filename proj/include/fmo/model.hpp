// FMO exciton Hamiltonian, transition dipoles, noise rates and basis states.
//
// Units: energies in cm^-1, times in ps, dipoles in Debye, fields in D^-1 cm^-1.
// Level ordering of every 9x9 operator: 0 = electronic ground state,
// 1..7 = single excitation on sites 1..7, 8 = sink (reaction center).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>
#include <utility>

namespace fmo {

inline constexpr int kSites = 7;
inline constexpr int kLevels = 9;
inline constexpr int kGround = 0;
inline constexpr int kSink = 8;
inline constexpr int kSinkFeedSite = 3;

// hbar in cm^-1 ps (1 / (2 pi c) with c in cm/ps).
inline constexpr double kHbar = 5.308837458876145;
// Zero of the site energies.
inline constexpr double kEnergyShift = 12230.0;

template <typename Real = double>
using DensityMatrixT = Eigen::Matrix<std::complex<Real>, kLevels, kLevels>;
using DensityMatrix = DensityMatrixT<double>;

using Matrix7d = Eigen::Matrix<double, kSites, kSites>;
using Vector7d = Eigen::Matrix<double, kSites, 1>;
using Vector7cd = Eigen::Matrix<std::complex<double>, kSites, 1>;
using DipoleTable = Eigen::Matrix<double, kSites, 3>;
using Matrix9d = Eigen::Matrix<double, kLevels, kLevels>;

class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct FmoModel {
    Matrix7d h_site;       // cm^-1, diagonal relative to kEnergyShift
    DipoleTable dipoles;   // row j = dipole of site j+1, Debye
    Vector7d gamma_deph;   // ps^-1
    Vector7d gamma_diss;   // ps^-1
    double gamma_sink{0};  // ps^-1
    double hbar{kHbar};

    double site_energy(int site) const { return h_site(site - 1, site - 1); }
    Eigen::Vector3d dipole(int site) const { return dipoles.row(site - 1).transpose(); }

    // Copy with uniform dephasing rate gamma on every site.
    FmoModel with_dephasing(double gamma) const;
};

struct ModelOverrides {
    std::optional<double> dephasing;    // uniform gamma
    std::optional<double> dissipation;  // uniform Gamma
    std::optional<double> sink_rate;
    std::optional<Matrix7d> hamiltonian;
    std::optional<DipoleTable> dipoles;
};

Matrix7d default_hamiltonian();
DipoleTable default_dipoles();

// Throws ValidationError on negative or non-finite overrides, or an asymmetric matrix.
FmoModel build_fmo_model(const ModelOverrides& overrides = {});

// Spherical angles (theta, phi) of the site-1 dipole.
std::pair<double, double> site1_polar_angles(const FmoModel& model);

Eigen::Vector3d polarization_vector(double theta, double phi);

// Exciton energies (ascending) of the site Hamiltonian.
Vector7d exciton_energies(const FmoModel& model);

// --- basis states -----------------------------------------------------------

DensityMatrix ground_state();
DensityMatrix site_state(int site);  // 1-based
// |psi><psi| for a single-excitation amplitude vector over sites 1..7 (normalized internally).
DensityMatrix single_excitation_state(const Vector7cd& amplitudes);
DensityMatrix bright_state();          // (|1> + |2>)/sqrt2
DensityMatrix antisymmetric_state();   // (|1> - |2>)/sqrt2
// Incoherent 0.70/0.25/0.05 mixture of sites 5, 6, 7.
DensityMatrix dark_target_state();

// --- density-matrix diagnostics ---------------------------------------------

double hermiticity_error(const DensityMatrix& rho);
double trace_error(const DensityMatrix& rho);
double min_eigenvalue(const DensityMatrix& rho);
Eigen::Matrix<double, kLevels, 1> populations(const DensityMatrix& rho);

}  // namespace fmo
