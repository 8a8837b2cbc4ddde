#include "fmo/analysis.hpp"

#include "fmo/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace fmo {

std::string to_string(InitialKind kind) {
    switch (kind) {
        case InitialKind::Bright: return "bright";
        case InitialKind::Dark: return "dark";
        case InitialKind::Antisymmetric: return "antisymmetric";
        case InitialKind::Prepared: return "prepared";
        case InitialKind::Custom: return "custom";
    }
    return "?";
}

InitialKind initial_kind_from_string(const std::string& name) {
    if (name == "bright" || name == "B") return InitialKind::Bright;
    if (name == "dark" || name == "D") return InitialKind::Dark;
    if (name == "antisymmetric" || name == "minus") return InitialKind::Antisymmetric;
    if (name == "prepared") return InitialKind::Prepared;
    if (name == "custom") return InitialKind::Custom;
    throw ValidationError("unknown initial state '" + name +
                          "' (expected bright, dark, antisymmetric, prepared or custom)");
}

DensityMatrix initial_state(const TransportScenario& s) {
    switch (s.initial) {
        case InitialKind::Bright: return bright_state();
        case InitialKind::Dark: return dark_target_state();
        case InitialKind::Antisymmetric: return antisymmetric_state();
        case InitialKind::Prepared: return ground_state();
        case InitialKind::Custom:
            if (!s.state) throw ValidationError("custom transport scenario needs a state");
            return *s.state;
    }
    return ground_state();
}

double resolved_free_step(const FmoModel& model, double dt) {
    const double fastest = 2.0 * (model.gamma_deph.maxCoeff() + model.gamma_diss.maxCoeff()) + 2.0 * model.gamma_sink;
    return fastest > 0.0 ? std::min(dt, 0.25 / fastest) : dt;
}

Trajectory transport_curve(const TransportScenario& s, const FmoModel& base) {
    if (!(s.horizon > 0.0)) throw ValidationError("transport: horizon must be positive");
    const FmoModel model = base.with_dephasing(s.gamma);
    DensityMatrix rho = initial_state(s);
    Trajectory out;
    double t = 0.0;
    double frame = 0.0;

    if (s.initial == InitialKind::Prepared) {
        if (!s.pulse) throw ValidationError("prepared transport scenario needs a pulse");
        const double t_pulse = std::min(s.pulse->t_total, s.horizon);
        Integration stage;
        stage.dt = s.drive_dt;
        stage.t_end = t_pulse;
        stage.sink = false;
        stage.stride = std::max(1, static_cast<int>(std::llround(t_pulse / s.drive_dt / 10.0)));
        Trajectory pulse_stage = propagate(rho, model, DriveSpec::pulsed(*s.pulse, s.orientation), stage);
        out = std::move(pulse_stage);
        rho = out.final_state();
        t = t_pulse;
        frame = s.pulse->omega_l;
        if (t >= s.horizon) return out;
    }

    Integration free;
    free.dt = resolved_free_step(model, s.free_dt);
    free.t_start = t;
    free.t_end = s.horizon;
    free.sink = s.sink;
    free.stride = std::max(1, s.stride);
    Trajectory tail = propagate(rho, model, DriveSpec::off(frame), free);
    const std::size_t skip = out.times.empty() ? 0 : 1;  // shared boundary sample
    out.times.insert(out.times.end(), tail.times.begin() + static_cast<std::ptrdiff_t>(skip), tail.times.end());
    out.states.insert(out.states.end(), tail.states.begin() + static_cast<std::ptrdiff_t>(skip), tail.states.end());
    out.p_sink.insert(out.p_sink.end(), tail.p_sink.begin() + static_cast<std::ptrdiff_t>(skip), tail.p_sink.end());
    return out;
}

double transport_efficiency(const TransportScenario& s, const FmoModel& base) {
    const FmoModel model = base.with_dephasing(s.gamma);
    DensityMatrix rho = initial_state(s);
    double t = 0.0;
    double frame = 0.0;
    if (s.initial == InitialKind::Prepared) {
        if (!s.pulse) throw ValidationError("prepared transport scenario needs a pulse");
        Integration stage;
        stage.dt = s.drive_dt;
        stage.t_end = std::min(s.pulse->t_total, s.horizon);
        stage.sink = false;
        rho = propagate_final(rho, model, DriveSpec::pulsed(*s.pulse, s.orientation), stage);
        t = stage.t_end;
        frame = s.pulse->omega_l;
    }
    Integration free;
    free.dt = resolved_free_step(model, s.free_dt);
    free.t_start = t;
    free.t_end = s.horizon;
    free.sink = s.sink;
    return propagate_final(rho, model, DriveSpec::off(frame), free)(kSink, kSink).real();
}

EnsembleDistribution transport_ensemble(const PulseParams& pulse, const std::vector<Orientation>& orientations,
                                        double gamma, double t, const FmoModel& model, int threads) {
    if (orientations.empty()) throw ValidationError("transport: no orientations");
    std::vector<double> values(orientations.size());
    parallel_for(orientations.size(), threads, [&](std::size_t i) {
        TransportScenario s;
        s.initial = InitialKind::Prepared;
        s.gamma = gamma;
        s.horizon = t;
        s.pulse = pulse;
        s.orientation = orientations[i];
        try {
            values[i] = transport_efficiency(s, model);
        } catch (const std::exception& e) {
            throw EnsembleError(i, e.what());
        }
    });
    return make_distribution(std::move(values));
}

std::pair<EnsembleDistribution, EnsembleDistribution> transport_distribution(
    const PulseParams& pulse_b, const PulseParams& pulse_d, const std::vector<Orientation>& orientations,
    double gamma, double t, const FmoModel& model, int threads) {
    return {transport_ensemble(pulse_b, orientations, gamma, t, model, threads),
            transport_ensemble(pulse_d, orientations, gamma, t, model, threads)};
}

double distribution_overlap_error(const EnsembleDistribution& d1, const EnsembleDistribution& d2) {
    const EnsembleDistribution* a = &d1;
    const EnsembleDistribution* b = &d2;
    EnsembleDistribution r1, r2;
    if (d1.edges != d2.edges) {
        const double lo = std::min(d1.edges.front(), d2.edges.front());
        const double hi = std::max(d1.edges.back(), d2.edges.back());
        const int bins = static_cast<int>(std::max(d1.bins(), d2.bins()));
        const auto edges = uniform_edges(bins, lo, hi);
        r1 = make_distribution(d1.values, edges);
        r2 = make_distribution(d2.values, edges);
        a = &r1;
        b = &r2;
    }
    double overlap = 0.0;
    for (std::size_t k = 0; k < a->bins(); ++k) {
        overlap += std::min(a->densities[k], b->densities[k]) * (a->edges[k + 1] - a->edges[k]);
    }
    return 0.5 * overlap;
}

}  // namespace fmo
