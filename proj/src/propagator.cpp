#include "fmo/propagator.hpp"

#include <cmath>
#include <sstream>

namespace fmo {

namespace {

using Matrix9cd = Eigen::Matrix<std::complex<double>, kLevels, kLevels>;

struct StepPlan {
    long long steps;
    double h;
};

StepPlan plan_steps(const Integration& opts) {
    if (!(opts.dt > 0.0)) throw ValidationError("propagate: dt must be positive");
    const double span = opts.t_end - opts.t_start;
    if (!(span >= 0.0)) throw ValidationError("propagate: t_end must not precede t_start");
    if (opts.stride < 1) throw ValidationError("propagate: stride must be >= 1");
    if (span == 0.0) return {0, opts.dt};
    const long long n = std::max(1LL, std::llround(span / opts.dt));
    return {n, span / static_cast<double>(n)};
}

}  // namespace

double DriveSpec::amplitude(double t) const {
    if (!enabled) return 0.0;
    if (shape) return (t < 0.0 || t > pulse.t_total) ? 0.0 : pulse.e0 * (*shape)(t);
    return field(t, pulse);
}

Liouvillian::Liouvillian(const FmoModel& model, const DriveSpec& drive, bool sink)
    : drive_(drive), inv_hbar_(1.0 / model.hbar) {
    h_static_.setZero();
    h_static_.block<kSites, kSites>(1, 1) = model.h_site;
    if (drive.frame == Frame::Rotating) {
        for (int j = 1; j <= kSites; ++j) h_static_(j, j) -= drive.frame_omega;
    }

    h_site_ = h_static_.block<kSites, kSites>(1, 1);

    coupling_.setZero();
    if (drive.enabled) {
        const auto [theta1, phi1] = site1_polar_angles(model);
        const Eigen::Vector3d e = effective_polarization(theta1 + drive.pulse.dtheta,
                                                         phi1 + drive.pulse.dphi, drive.orientation);
        coupling_.segment<kSites>(1) = -(model.dipoles * e);
    }

    // Per-level decay of coherences: dephasing + dissipation + sink feed.
    Eigen::Matrix<double, kLevels, 1> coherence_rate = Eigen::Matrix<double, kLevels, 1>::Zero();
    Eigen::Matrix<double, kLevels, 1> population_rate = Eigen::Matrix<double, kLevels, 1>::Zero();
    for (int j = 1; j <= kSites; ++j) {
        coherence_rate(j) = model.gamma_deph(j - 1) + model.gamma_diss(j - 1);
        population_rate(j) = 2.0 * model.gamma_diss(j - 1);
    }
    to_sink_ = 0.0;
    if (sink) {
        coherence_rate(kSinkFeedSite) += model.gamma_sink;
        population_rate(kSinkFeedSite) += 2.0 * model.gamma_sink;
        to_sink_ = 2.0 * model.gamma_sink;
    }
    for (int a = 0; a < kLevels; ++a) {
        for (int b = 0; b < kLevels; ++b) {
            decay_(a, b) = (a == b) ? population_rate(a) : coherence_rate(a) + coherence_rate(b);
        }
    }
    to_ground_.setZero();
    for (int j = 1; j <= kSites; ++j) to_ground_(j) = 2.0 * model.gamma_diss(j - 1);
}

Matrix9cd Liouvillian::hamiltonian(double t) const {
    const double e = drive_.amplitude(t);
    if (!std::isfinite(e)) {
        std::ostringstream msg;
        msg << "non-finite field amplitude at t = " << t << " ps";
        throw IntegrationError(msg.str());
    }
    Matrix9cd h = h_static_.cast<std::complex<double>>();
    if (drive_.frame == Frame::Rotating) {
        for (int j = 1; j <= kSites; ++j) h(j, 0) = h(0, j) = coupling_(j) * e;
    } else {
        const std::complex<double> phase = std::polar(1.0, -drive_.pulse.omega_l * inv_hbar_ * t);
        for (int j = 1; j <= kSites; ++j) {
            h(j, 0) = coupling_(j) * e * phase;
            h(0, j) = std::conj(h(j, 0));
        }
    }
    return h;
}

DensityMatrix Liouvillian::apply(const DensityMatrix& rho, double t) const {
    DensityMatrix out;
    if (drive_.frame == Frame::Rotating) {
        const double e = drive_.amplitude(t);
        if (!std::isfinite(e)) {
            std::ostringstream msg;
            msg << "non-finite field amplitude at t = " << t << " ps";
            throw IntegrationError(msg.str());
        }
        Matrix9d h = h_static_;
        h.col(0) = coupling_ * e;
        h.row(0) = h.col(0).transpose();
        // H real symmetric: [H, rho] = X - X^dagger with X = H rho.
        const Matrix9d xr = h * rho.real();
        const Matrix9d xi = h * rho.imag();
        out.real() = inv_hbar_ * (xi + xi.transpose());
        out.imag() = -inv_hbar_ * (xr - xr.transpose());
    } else {
        const Matrix9cd x = hamiltonian(t) * rho;
        out = std::complex<double>(0.0, -inv_hbar_) * (x - x.adjoint());
    }
    out -= decay_.cast<std::complex<double>>().cwiseProduct(rho);
    out(kGround, kGround) += to_ground_.dot(rho.diagonal().real());
    out(kSink, kSink) += to_sink_ * rho(kSinkFeedSite, kSinkFeedSite).real();
    return out;
}

DensityMatrix liouvillian_apply(const DensityMatrix& rho, double t, const FmoModel& model,
                                const DriveSpec& drive, bool sink) {
    return Liouvillian(model, drive, sink).apply(rho, t);
}

namespace {

// Rotating-frame state as [Re rho | Im rho]; one real 9x18 product per generator call.
using Split = Eigen::Matrix<double, kLevels, 2 * kLevels>;

Split to_split(const DensityMatrix& rho) {
    Split s;
    s.leftCols<kLevels>() = rho.real();
    s.rightCols<kLevels>() = rho.imag();
    return s;
}

DensityMatrix from_split(const Split& s) {
    DensityMatrix rho;
    rho.real() = s.leftCols<kLevels>();
    rho.imag() = s.rightCols<kLevels>();
    return rho;
}

}  // namespace

void Liouvillian::apply_split(const double* in, double* out, double e) const {
    constexpr int n = kLevels;
    constexpr int cols = 2 * kLevels;
    // x = H s, column by column; H is the site block plus the ground <-> site couplings.
    double x[cols * n];
    double c[kSites];
    for (int j = 0; j < kSites; ++j) c[j] = e * coupling_(j + 1);
    for (int col = 0; col < cols; ++col) {
        const double* sc = in + col * n;
        double* xc = x + col * n;
        double g = 0.0;
        for (int j = 0; j < kSites; ++j) g += c[j] * sc[j + 1];
        xc[kGround] = g;
        for (int i = 0; i < kSites; ++i) xc[i + 1] = c[i] * sc[kGround];
        for (int k = 0; k < kSites; ++k) {
            const double v = sc[k + 1];
            const double* hk = h_site_.data() + k * kSites;
            for (int i = 0; i < kSites; ++i) xc[i + 1] += hk[i] * v;
        }
        xc[kSink] = 0.0;
    }
    const double* xr = x;
    const double* xi = x + n * n;
    const double* sr = in;
    const double* si = in + n * n;
    double* dr = out;
    double* di = out + n * n;
    const double* dec = decay_.data();
    for (int b = 0; b < n; ++b) {
        for (int a = 0; a < n; ++a) {
            const int ab = a + b * n;
            const int ba = b + a * n;
            dr[ab] = inv_hbar_ * (xi[ab] + xi[ba]) - dec[ab] * sr[ab];
            di[ab] = inv_hbar_ * (xr[ba] - xr[ab]) - dec[ab] * si[ab];
        }
    }
    double gain = 0.0;
    for (int j = 0; j < n; ++j) gain += to_ground_(j) * sr[j * (n + 1)];
    dr[kGround * (n + 1)] += gain;
    dr[kSink * (n + 1)] += to_sink_ * sr[kSinkFeedSite * (n + 1)];
}

namespace {

template <typename Observer>
DensityMatrix integrate_rotating(const DensityMatrix& rho0, const Liouvillian& lv,
                                 const Integration& opts, Observer&& observe) {
    const StepPlan plan = plan_steps(opts);
    const double h = plan.h;
    const double trace0 = rho0.trace().real();
    Split rho = to_split(rho0);
    Split k1, k2, k3, k4, tmp;
    observe(0LL, opts.t_start, [&] { return from_split(rho); });

    auto field_at = [&](double t) {
        const double e = lv.amplitude(t);
        if (!std::isfinite(e)) {
            std::ostringstream msg;
            msg << "non-finite field amplitude at t = " << t << " ps";
            throw IntegrationError(msg.str());
        }
        return e;
    };
    double e_start = field_at(opts.t_start);
    for (long long n = 0; n < plan.steps; ++n) {
        const double t = opts.t_start + static_cast<double>(n) * h;
        const double e_mid = field_at(t + 0.5 * h);
        const double e_end = field_at(t + h);
        lv.apply_split(rho.data(), k1.data(), e_start);
        tmp = rho + (0.5 * h) * k1;
        lv.apply_split(tmp.data(), k2.data(), e_mid);
        tmp = rho + (0.5 * h) * k2;
        lv.apply_split(tmp.data(), k3.data(), e_mid);
        tmp = rho + h * k3;
        lv.apply_split(tmp.data(), k4.data(), e_end);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        // Re-hermitize: symmetric real part, antisymmetric imaginary part.
        rho.leftCols<kLevels>() = 0.5 * (rho.leftCols<kLevels>() + rho.leftCols<kLevels>().transpose()).eval();
        rho.rightCols<kLevels>() = 0.5 * (rho.rightCols<kLevels>() - rho.rightCols<kLevels>().transpose()).eval();
        e_start = e_end;

        const double drift = std::abs(rho.leftCols<kLevels>().trace() - trace0);
        if (!(drift <= kTraceTolerance)) {
            std::ostringstream msg;
            msg << "trace drifted by " << drift << " at t = " << t + h
                << " ps; reduce the step size (dt = " << h << " ps)";
            throw IntegrationError(msg.str());
        }
        observe(n + 1, (n + 1 == plan.steps) ? opts.t_end : t + h, [&] { return from_split(rho); });
    }
    return from_split(rho);
}

template <typename Observer>
DensityMatrix integrate_complex(const DensityMatrix& rho0, const Liouvillian& lv, const Integration& opts,
                                Observer&& observe) {
    const StepPlan plan = plan_steps(opts);
    const double h = plan.h;
    DensityMatrix rho = rho0;
    observe(0LL, opts.t_start, [&] { return rho; });
    for (long long n = 0; n < plan.steps; ++n) {
        const double t = opts.t_start + static_cast<double>(n) * h;
        const DensityMatrix k1 = lv.apply(rho, t);
        const DensityMatrix k2 = lv.apply(rho + (0.5 * h) * k1, t + 0.5 * h);
        const DensityMatrix k3 = lv.apply(rho + (0.5 * h) * k2, t + 0.5 * h);
        const DensityMatrix k4 = lv.apply(rho + h * k3, t + h);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rho = 0.5 * (rho + rho.adjoint()).eval();

        const double drift = std::abs(rho.trace() - rho0.trace());
        if (!(drift <= kTraceTolerance)) {
            std::ostringstream msg;
            msg << "trace drifted by " << drift << " at t = " << t + h
                << " ps; reduce the step size (dt = " << h << " ps)";
            throw IntegrationError(msg.str());
        }
        observe(n + 1, (n + 1 == plan.steps) ? opts.t_end : t + h, [&] { return rho; });
    }
    return rho;
}

template <typename Observer>
DensityMatrix integrate(const DensityMatrix& rho0, const Liouvillian& lv, const Integration& opts,
                        Observer&& observe) {
    if (lv.frame() == Frame::Rotating) return integrate_rotating(rho0, lv, opts, observe);
    return integrate_complex(rho0, lv, opts, observe);
}

}  // namespace

Trajectory propagate(const DensityMatrix& rho0, const FmoModel& model, const DriveSpec& drive,
                     const Integration& opts) {
    const Liouvillian lv(model, drive, opts.sink);
    const long long steps = plan_steps(opts).steps;
    Trajectory traj;
    const auto expected = static_cast<std::size_t>(steps / opts.stride + 2);
    traj.times.reserve(expected);
    traj.states.reserve(expected);
    traj.p_sink.reserve(expected);
    integrate(rho0, lv, opts, [&](long long n, double t, auto&& state) {
        if (n % opts.stride == 0 || n == steps) {
            traj.times.push_back(t);
            traj.states.push_back(state());
            traj.p_sink.push_back(traj.states.back()(kSink, kSink).real());
        }
    });
    return traj;
}

DensityMatrix propagate_final(const DensityMatrix& rho0, const FmoModel& model,
                              const DriveSpec& drive, const Integration& opts) {
    const Liouvillian lv(model, drive, opts.sink);
    return integrate(rho0, lv, opts, [](long long, double, auto&&) {});
}

std::vector<double> accumulated_sink(const Trajectory& traj, double sink_rate) {
    std::vector<double> out(traj.times.size(), 0.0);
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        const double dt = traj.times[k] - traj.times[k - 1];
        const double area = 0.5 * dt *
                            (traj.states[k - 1](kSinkFeedSite, kSinkFeedSite).real() +
                             traj.states[k](kSinkFeedSite, kSinkFeedSite).real());
        out[k] = out[k - 1] + 2.0 * sink_rate * area;
    }
    return out;
}

DensityMatrix rotating_to_lab(const DensityMatrix& rho, double omega, double t, bool inverse) {
    // rho_lab = U^dagger rho_rot U with U = exp(i omega t P_excited / hbar), P_excited = sites 1..7.
    const double angle = (inverse ? 1.0 : -1.0) * omega * t / kHbar;
    Eigen::Matrix<std::complex<double>, kLevels, 1> u;
    u.setOnes();
    for (int j = 1; j <= kSites; ++j) u(j) = std::polar(1.0, angle);
    DensityMatrix out = rho;
    for (int a = 0; a < kLevels; ++a) {
        for (int b = 0; b < kLevels; ++b) out(a, b) = u(a) * rho(a, b) * std::conj(u(b));
    }
    return out;
}

}  // namespace fmo
