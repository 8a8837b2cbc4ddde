#include "fmo/pulse.hpp"

#include "fmo/model.hpp"
#include "fmo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fmo {

PulseParams make_pulse(int m, double t_total, std::uint64_t seed) {
    PulseParams p;
    p.t_total = t_total;
    p.t0 = t_total / 2;
    p.sigma = t_total / 6;
    p.a = Eigen::VectorXd::Zero(m);
    p.b = Eigen::VectorXd::Zero(m);
    p.nu = sample_frequencies(m, t_total, seed);
    p.seed = seed;
    return p;
}

double ramp_lambda(double t, double t_total) {
    return 1.0 + 5.0 * (std::exp(200.0 * (t - t_total) / t_total) + std::exp(-200.0 * t / t_total));
}

double crab_envelope(double t, const PulseParams& p) {
    const double d = t - p.t0;
    const double gauss = std::exp(-d * d / (2.0 * p.sigma * p.sigma));
    double series = 1.0;
    for (Eigen::Index k = 0; k < p.a.size(); ++k) {
        const double arg = p.nu(k) * t;
        series += p.a(k) * std::sin(arg) + p.b(k) * std::cos(arg);
    }
    const double norm = 1.0 + p.a.cwiseAbs().sum() + p.b.cwiseAbs().sum();
    return gauss / ramp_lambda(t, p.t_total) * series / norm;
}

double field(double t, const PulseParams& p) {
    if (t < 0.0 || t > p.t_total) return 0.0;
    return p.e0 * crab_envelope(t, p);
}

Eigen::VectorXd sample_frequencies(int m, double t_total, std::uint64_t seed, bool shared_r) {
    if (m < 1) throw ValidationError("sample_frequencies: need at least one harmonic");
    if (!(t_total > 0.0)) throw ValidationError("sample_frequencies: pulse duration must be positive");
    Rng rng(seed, "frequencies");
    Eigen::VectorXd nu(m);
    const double base = 2.0 * std::numbers::pi / t_total;
    const double shared = rng.uniform_open_closed();
    for (int k = 1; k <= m; ++k) {
        double r = shared_r ? shared : rng.uniform_open_closed();
        // Redraw until the harmonic respects the resolution limit; r -> 0 always does.
        while (base * k * r > kMaxModulationFrequency) r = rng.uniform_open_closed();
        nu(k - 1) = base * k * r;
    }
    return nu;
}

std::vector<ConstraintViolation> check_constraints(const PulseParams& p, double e0_max) {
    std::vector<ConstraintViolation> out;
    if (std::abs(p.e0) > e0_max) {
        std::ostringstream msg;
        msg << "field amplitude " << p.e0 << " exceeds " << e0_max << " D^-1 cm^-1";
        out.push_back({ViolationKind::Amplitude, std::abs(p.e0) - e0_max, msg.str()});
    }
    for (Eigen::Index k = 0; k < p.nu.size(); ++k) {
        const double excess = std::abs(p.nu(k)) - kMaxModulationFrequency;
        if (excess > 0.0) {
            std::ostringstream msg;
            msg << "nu_" << (k + 1) << " = " << p.nu(k) << " rad/ps modulates faster than 10 fs";
            out.push_back({ViolationKind::Resolution, excess, msg.str()});
        }
    }
    if (!(p.sigma > 0.0)) {
        out.push_back({ViolationKind::Width, -p.sigma, "Gaussian width must be positive"});
    }
    return out;
}

PulseParams gaussian_reference(const PulseParams& p) {
    PulseParams g = p;
    g.a.setZero();
    g.b.setZero();
    return g;
}

double LinearShape::operator()(double time) const {
    if (t.empty() || time < t.front() || time > t.back()) return 0.0;
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    if (it == t.end()) return f.back();
    const auto i = static_cast<std::size_t>(it - t.begin());
    const double w = (time - t[i - 1]) / (t[i] - t[i - 1]);
    return (1.0 - w) * f[i - 1] + w * f[i];
}

LinearShape linear_interpolation(const PulseParams& p, int samples) {
    const double h = p.t_total / (samples - 1);
    std::vector<double> values(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) values[static_cast<std::size_t>(i)] = crab_envelope(i * h, p);

    LinearShape shape;
    shape.t.push_back(0.0);
    shape.f.push_back(values.front());
    for (int i = 1; i + 1 < samples; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const bool peak = values[u] > values[u - 1] && values[u] >= values[u + 1];
        const bool dip = values[u] < values[u - 1] && values[u] <= values[u + 1];
        if (peak || dip) {
            shape.t.push_back(i * h);
            shape.f.push_back(values[u]);
        }
    }
    shape.t.push_back(p.t_total);
    shape.f.push_back(values.back());
    return shape;
}

}  // namespace fmo
