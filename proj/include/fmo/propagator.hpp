// Lindblad master equation for the driven FMO complex.
//
//   d rho/dt = -(i/hbar) [H(t), rho] + L_diss(rho) + L_deph(rho) + L_sink(rho)
//
// In the frame rotating at the carrier omega_l the excited block of H carries
// omega_j - omega_l on the diagonal and the static couplings off it, and the
// ground <-> site elements are -mu_j . e E(t) with a real envelope E(t).

#pragma once

#include "fmo/model.hpp"
#include "fmo/orientation.hpp"
#include "fmo/pulse.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace fmo {

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Frame {
    Rotating,  // co-rotating with frame_omega; drive has a real envelope
    Lab,       // frame of the 12230 cm^-1 shift; drive carries exp(-i omega_l t)
};

struct DriveSpec {
    PulseParams pulse;
    Orientation orientation;
    bool enabled{false};
    double frame_omega{0.0};
    Frame frame{Frame::Rotating};
    std::optional<LinearShape> shape;  // replaces the CRAB envelope when set

    static DriveSpec off(double frame_omega = 0.0) {
        DriveSpec d;
        d.frame_omega = frame_omega;
        return d;
    }
    static DriveSpec pulsed(const PulseParams& p, const Orientation& o = {}) {
        DriveSpec d;
        d.pulse = p;
        d.orientation = o;
        d.enabled = true;
        d.frame_omega = p.omega_l;
        return d;
    }

    // Real field amplitude E(t), D^-1 cm^-1.
    double amplitude(double t) const;
};

struct Integration {
    double dt{1e-4};
    double t_end{0.0};
    double t_start{0.0};
    int stride{1};
    bool sink{true};
};

// Default fixed steps (ps): 0.1 fs while a pulse acts, 2 fs for free evolution.
inline constexpr double kDriveStep = 1e-4;
inline constexpr double kFreeStep = 2e-3;
inline constexpr double kTraceTolerance = 1e-6;

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    std::vector<double> p_sink;

    const DensityMatrix& final_state() const { return states.back(); }
};

// Precomputed generator for one (model, drive, sink) combination.
class Liouvillian {
public:
    Liouvillian(const FmoModel& model, const DriveSpec& drive, bool sink = true);

    DensityMatrix apply(const DensityMatrix& rho, double t) const;

    // Hamiltonian at time t in the propagation frame, cm^-1.
    Eigen::Matrix<std::complex<double>, kLevels, kLevels> hamiltonian(double t) const;
    double amplitude(double t) const { return drive_.amplitude(t); }
    Frame frame() const { return drive_.frame; }

    // Rotating-frame generator on the split layout [Re rho | Im rho] (column-major
    // 9x18) for a given field amplitude e.
    void apply_split(const double* in, double* out, double e) const;

private:
    DriveSpec drive_;
    double inv_hbar_;
    Matrix9d h_static_;                       // rotating frame or lab static part
    Matrix7d h_site_;                         // site block of h_static_
    Eigen::Matrix<double, kLevels, 1> coupling_;  // -mu_j . e, zero for ground and sink
    Matrix9d decay_;                          // elementwise decay of rho_ab
    Eigen::Matrix<double, kLevels, 1> to_ground_;  // 2 Gamma_j feeding rho_00
    double to_sink_;                          // 2 Gamma_sink feeding rho_88
};

DensityMatrix liouvillian_apply(const DensityMatrix& rho, double t, const FmoModel& model,
                                const DriveSpec& drive, bool sink = true);

// Fixed-step RK4. States are re-hermitized each step; a trace drift above
// kTraceTolerance raises IntegrationError.
Trajectory propagate(const DensityMatrix& rho0, const FmoModel& model, const DriveSpec& drive,
                     const Integration& opts);

// Final state only, no trajectory storage.
DensityMatrix propagate_final(const DensityMatrix& rho0, const FmoModel& model,
                              const DriveSpec& drive, const Integration& opts);

// 2 Gamma_sink * int_0^t rho_33 dt' by the trapezoid rule over the trajectory samples.
std::vector<double> accumulated_sink(const Trajectory& traj, double sink_rate);

// Maps a rotating-frame state at time t to the lab frame (or back with inverse = true).
DensityMatrix rotating_to_lab(const DensityMatrix& rho, double omega, double t, bool inverse = false);

}  // namespace fmo
