// Transport into the sink for prepared states, and distribution overlap.

#pragma once

#include "fmo/ensemble.hpp"
#include "fmo/model.hpp"
#include "fmo/propagator.hpp"
#include "fmo/pulse.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fmo {

enum class InitialKind {
    Bright,         // (|1> + |2>)/sqrt2
    Dark,           // 0.70/0.25/0.05 mixture on sites 5, 6, 7
    Antisymmetric,  // (|1> - |2>)/sqrt2
    Prepared,       // ground state driven by `pulse` (sink off), then released
    Custom,         // `state`
};

std::string to_string(InitialKind kind);
InitialKind initial_kind_from_string(const std::string& name);

struct TransportScenario {
    InitialKind initial{InitialKind::Bright};
    double gamma{1.0};
    double horizon{2.0};  // ps, measured from t = 0 (the pulse start for Prepared)
    bool sink{true};
    std::optional<PulseParams> pulse;
    Orientation orientation{};
    std::optional<DensityMatrix> state;
    double drive_dt{kDriveStep};
    double free_dt{kFreeStep};
    int stride{1};  // free-evolution samples kept
};

DensityMatrix initial_state(const TransportScenario& s);

// Step no larger than `dt` that keeps RK4 accurate for the fastest decay in the model.
double resolved_free_step(const FmoModel& model, double dt = kFreeStep);

// p_sink(t) on [0, horizon]. Prepared states run the pulse stage sink-free on [0, T],
// then evolve freely with the sink from T on; the pulse stage contributes its end point.
Trajectory transport_curve(const TransportScenario& s, const FmoModel& model);

// p_sink at the horizon only.
double transport_efficiency(const TransportScenario& s, const FmoModel& model);

// Per-orientation p_sink(t) for the B- and D-preparation pulses.
std::pair<EnsembleDistribution, EnsembleDistribution> transport_distribution(
    const PulseParams& pulse_b, const PulseParams& pulse_d, const std::vector<Orientation>& orientations,
    double gamma, double t, const FmoModel& model, int threads = 1);

EnsembleDistribution transport_ensemble(const PulseParams& pulse, const std::vector<Orientation>& orientations,
                                        double gamma, double t, const FmoModel& model, int threads = 1);

// Bayes error 1/2 sum_b min(p1, p2) width_b. Distributions on different binnings are
// re-histogrammed from their values on shared uniform edges spanning both ranges.
double distribution_overlap_error(const EnsembleDistribution& d1, const EnsembleDistribution& d2);

}  // namespace fmo
