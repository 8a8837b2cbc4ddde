#include "fmo/analysis.hpp"
#include "fmo/rng.hpp"

#include <doctest.h>

using namespace fmo;

TEST_SUITE("analysis") {

TEST_CASE("site 3 drains into the sink without noise") {
    ModelOverrides o;
    o.dissipation = 0.0;
    TransportScenario s;
    s.initial = InitialKind::Custom;
    s.state = site_state(3);
    s.gamma = 0.0;
    double last = 0.0;
    for (double t : {2.0, 5.0, 20.0}) {
        s.horizon = t;
        const double p = transport_efficiency(s, build_fmo_model(o));
        CHECK(p > last);
        last = p;
        if (t >= 5.0) CHECK(p >= 0.99);
    }
}

TEST_CASE("transport curves") {
    const FmoModel m = build_fmo_model();
    TransportScenario s;
    s.initial = InitialKind::Bright;
    s.horizon = 1.0;
    s.stride = 5;
    const Trajectory t = transport_curve(s, m);
    CHECK(t.times.front() == 0.0);
    CHECK(t.times.back() == 1.0);
    for (std::size_t k = 1; k < t.times.size(); ++k) {
        CHECK(t.times[k] > t.times[k - 1]);
        CHECK(t.p_sink[k] >= t.p_sink[k - 1] - 1e-15);
    }
    CHECK(transport_efficiency(s, m) == doctest::Approx(t.p_sink.back()).epsilon(1e-12));

    PulseParams p = make_pulse(7, 0.25, 2);
    p.omega_l = 200;
    s.initial = InitialKind::Prepared;
    s.pulse = p;
    const Trajectory prep = transport_curve(s, m);
    CHECK(prep.times.back() == 1.0);
    double at_pulse_end = -1.0;
    for (std::size_t k = 0; k < prep.times.size(); ++k) {
        if (prep.times[k] == 0.25) at_pulse_end = prep.p_sink[k];
        if (k > 0) CHECK(prep.times[k] > prep.times[k - 1]);
    }
    CHECK(at_pulse_end == 0.0);
    CHECK(prep.p_sink.back() > 0.0);

    s.pulse.reset();
    CHECK_THROWS_AS(transport_curve(s, m), ValidationError);
    s.initial = InitialKind::Custom;
    CHECK_THROWS_AS(transport_curve(s, m), ValidationError);
    CHECK(initial_kind_from_string(to_string(InitialKind::Antisymmetric)) == InitialKind::Antisymmetric);
    CHECK_THROWS_AS(initial_kind_from_string("nope"), ValidationError);
}

TEST_CASE("free step follows the fastest decay") {
    const FmoModel m = build_fmo_model();
    CHECK(resolved_free_step(m) == kFreeStep);
    const double fast = resolved_free_step(m.with_dephasing(1000.0));
    CHECK(fast == doctest::Approx(0.25 / (2 * (1000.0 + 5e-4) + 2 * 6.3)));
}

TEST_CASE("overlap error") {
    const EnsembleDistribution a = make_distribution({0.1, 0.12, 0.15}, 50, 0.0, 1.0);
    const EnsembleDistribution b = make_distribution({0.8, 0.9}, 50, 0.0, 1.0);
    CHECK(distribution_overlap_error(a, b) == 0.0);
    CHECK(distribution_overlap_error(a, a) == doctest::Approx(0.5));

    Rng rng(7, "overlap");
    std::vector<double> x(100000), y(100000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal();
        y[i] = 4.0 + rng.normal();
    }
    const auto edges = uniform_edges(200, -6.0, 10.0);
    const double expected = 0.5 * std::erfc(std::sqrt(2.0));
    CHECK(expected == doctest::Approx(0.0228).epsilon(0.01));
    CHECK(distribution_overlap_error(make_distribution(x, edges), make_distribution(y, edges)) ==
          doctest::Approx(expected).epsilon(0.1));
    // Different binnings are re-histogrammed onto shared edges.
    const double mixed =
        distribution_overlap_error(make_distribution(x, uniform_edges(200, -6.0, 6.0)),
                                   make_distribution(y, uniform_edges(200, -2.0, 10.0)));
    CHECK(mixed == doctest::Approx(expected).epsilon(0.15));
}

TEST_CASE("identical preparation pulses are indistinguishable") {
    const FmoModel m = build_fmo_model();
    PulseParams p = make_pulse(7, 0.25, 4);
    p.omega_l = 200;
    const auto o = disorder_orientations(Orientation{}, 1.0, 6, 1);
    const auto [db, dd] = transport_distribution(p, p, o, 1.0, 0.5, m, 2);
    CHECK(db.values == dd.values);
    CHECK(distribution_overlap_error(db, dd) == doctest::Approx(0.5));
    const EnsembleDistribution single = transport_ensemble(p, o, 1.0, 0.5, m, 1);
    CHECK(single.values == db.values);
}

}
