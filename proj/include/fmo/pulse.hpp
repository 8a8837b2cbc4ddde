// Chopped-random-basis (CRAB) field parametrization.
//
//   E(t) = e0 * f(t),
//   f(t) = G(t; t0, sigma) / lambda(t) * [1 + sum_k A_k sin(nu_k t) + B_k cos(nu_k t)]
//                                      / [1 + sum_k |A_k| + |B_k|],
//   lambda(t) = 1 + 5 [exp(200 (t - T)/T) + exp(-200 t / T)].
//
// Times in ps, frequencies nu_k in rad/ps, field in D^-1 cm^-1.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace fmo {

// Shortest modulation period the pulse shaper resolves (10 fs).
inline constexpr double kMinModulationPeriod = 0.010;
inline constexpr double kMaxModulationFrequency = 2.0 * 3.14159265358979323846 / kMinModulationPeriod;
inline constexpr double kDefaultFieldAmplitude = 15.0;
inline constexpr double kDefaultPumpDuration = 0.250;
inline constexpr double kDefaultProbeDuration = 0.125;
inline constexpr int kDefaultHarmonics = 7;

struct PulseParams {
    double e0{kDefaultFieldAmplitude};
    double t0{kDefaultPumpDuration / 2};
    double sigma{kDefaultPumpDuration / 6};
    Eigen::VectorXd a;   // A_k
    Eigen::VectorXd b;   // B_k
    Eigen::VectorXd nu;  // nu_k, rad/ps, frozen per restart
    double omega_l{0.0}; // carrier detuning from the 12230 cm^-1 shift, cm^-1
    double dtheta{0.0};
    double dphi{0.0};
    double t_total{kDefaultPumpDuration};
    std::uint64_t seed{0};  // seed the frequencies were drawn with

    int harmonics() const { return static_cast<int>(a.size()); }
};

// Pulse with m harmonics, zero Fourier coefficients and frequencies drawn from seed.
PulseParams make_pulse(int m, double t_total, std::uint64_t seed);

double ramp_lambda(double t, double t_total);
double crab_envelope(double t, const PulseParams& p);
// e0 * f(t) inside [0, T], zero outside.
double field(double t, const PulseParams& p);

// nu_k = 2 pi k r_k / T with r_k uniform in (0, 1]; any nu_k above the resolution
// bound is redrawn. With shared_r a single r is used for every harmonic.
Eigen::VectorXd sample_frequencies(int m, double t_total, std::uint64_t seed, bool shared_r = false);

enum class ViolationKind { Amplitude, Resolution, Width };

struct ConstraintViolation {
    ViolationKind kind;
    double magnitude;  // how far past the bound, in the bound's own units
    std::string message;
};

std::vector<ConstraintViolation> check_constraints(const PulseParams& p, double e0_max);

// Same carrier, polarization, center and width with the Fourier modulation removed.
PulseParams gaussian_reference(const PulseParams& p);

// Piecewise-linear envelope through a set of knots; zero outside the knot span.
struct LinearShape {
    std::vector<double> t;
    std::vector<double> f;

    double operator()(double time) const;
};

// Linear shape through the endpoints and every local extremum of f(t) sampled on
// `samples` grid points.
LinearShape linear_interpolation(const PulseParams& p, int samples = 2001);

}  // namespace fmo
