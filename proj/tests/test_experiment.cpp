#include "fmo/experiment.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>

using namespace fmo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "fmo_experiment_tests" / name;
    fs::remove_all(dir);
    return dir;
}

ExperimentConfig config(Json j) { return ExperimentConfig::from_json(j); }

Json tiny_optimize(const fs::path& out, int threads) {
    return {{"command", "optimize"},
            {"seed", 5},
            {"threads", threads},
            {"output_dir", out.string()},
            {"optimize", {{"restarts", 2}, {"max_evaluations", 30}}}};
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config validation") {
    CHECK_THROWS_AS(config({{"command", "simulate"}, {"colour", "red"}}), ValidationError);
    CHECK_THROWS_AS(config({{"command", "launch"}}), ValidationError);
    CHECK_THROWS_AS(config({{"command", "simulate"}, {"optimize", Json::object()}}), ValidationError);
    CHECK_THROWS_AS(config({{"command", "simulate"}, {"threads", 0}}), ValidationError);
    CHECK_THROWS_AS(config({{"command", "simulate"}, {"seed", -3}}), ValidationError);
    CHECK_THROWS_AS(config({{"command", "simulate"}, {"scale", "huge"}}), ValidationError);

    const fs::path out = scratch("bad");
    ExperimentConfig c = config({{"command", "simulate"}, {"output_dir", out.string()}, {"simulate", {{"tend", 1}}}});
    CHECK_THROWS_AS(run(c), ValidationError);
    c = config({{"command", "optimize"}, {"output_dir", out.string()}});
    CHECK_THROWS_AS(run(c), ValidationError);  // seed required
    c = config({{"command", "simulate"}, {"output_dir", out.string()}, {"model", {{"dephasing", -1.0}}}});
    CHECK_THROWS_AS(run(c), ValidationError);

    const ExperimentConfig ok = config(tiny_optimize(out, 2));
    CHECK(ok.seed == 5u);
    CHECK(ok.threads == 2);
    CHECK(config(ok.to_json()).to_json() == ok.to_json());
    CHECK(counts_for(Scale::Ci).samples == 200);
    CHECK(counts_for(Scale::Paper).restarts == 1000);
}

TEST_CASE("simulate writes outputs and a manifest") {
    const fs::path out = scratch("simulate");
    const Json j{{"command", "simulate"},
                 {"output_dir", out.string()},
                 {"simulate", {{"gammas", {0.0, 1.0, 1000.0}}, {"t_end", 0.5}}}};
    const RunResult a = run(config(j));
    CHECK(fs::exists(out / "efficiency.csv"));
    CHECK(fs::exists(out / "trajectory_2.csv"));
    const Json manifest = read_json(out / "manifest.json");
    CHECK(manifest.at("output_hash") == a.output_hash);
    CHECK(manifest.at("config").at("command") == "simulate");
    CHECK(a.summary.at("p_sink").size() == 3);
    CHECK(run(config(j)).output_hash == a.output_hash);
}

TEST_CASE("optimize is reproducible across reruns and thread counts") {
    const fs::path first = scratch("opt1");
    const RunResult a = run(config(tiny_optimize(first, 1)));
    const RunResult b = run(config(tiny_optimize(scratch("opt2"), 1)));
    const RunResult c = run(config(tiny_optimize(scratch("opt3"), 3)));
    CHECK(a.output_hash == b.output_hash);
    CHECK(a.output_hash == c.output_hash);
    const OptimizationResult r = result_from_json(read_json(first / "result.json"));
    CHECK(r.best_cost == a.summary.at("best_cost").get<double>());
    CHECK(a.summary.contains("linear_cost"));
}

TEST_CASE("ensemble from a saved pulse") {
    const fs::path dir = scratch("ens");
    fs::create_directories(dir);
    PulseParams p = make_pulse(7, 0.25, 3);
    p.omega_l = 200;
    save_pulse(dir / "p.json", p);
    auto cfg = [&](int threads, const std::string& sub) {
        return config({{"command", "ensemble"},
                       {"seed", 9},
                       {"threads", threads},
                       {"output_dir", (dir / sub).string()},
                       {"ensemble", {{"pulse", (dir / "p.json").string()}, {"samples", 6}, {"dt", 5e-4}}}});
    };
    const RunResult a = run(cfg(1, "a"));
    const RunResult b = run(cfg(2, "b"));
    CHECK(a.output_hash == b.output_hash);
    CHECK(a.summary.at("samples") == 6);
    CHECK(a.summary.contains("fidelity"));
}

TEST_CASE("orient on a coarse grid") {
    const fs::path out = scratch("orient");
    const RunResult r = run(config({{"command", "orient"},
                                    {"output_dir", out.string()},
                                    {"orient", {{"n_theta", 19}, {"n_phi", 36}, {"temperatures", {77, 300}}}}}));
    CHECK(fs::exists(out / "fractions.csv"));
    CHECK(r.summary.contains("rotation_time_s"));
}

TEST_CASE("default output directory and figure identifiers") {
    ::setenv(kOutputDirEnv, "/tmp/fmo-env-out", 1);
    CHECK(default_output_dir() == fs::path("/tmp/fmo-env-out"));
    ::unsetenv(kOutputDirEnv);
    CHECK(default_output_dir() == fs::path("fmo-out"));

    const auto ids = figure_ids();
    CHECK(ids.front() == "fig2");
    CHECK(std::find(ids.begin(), ids.end(), "fig12") != ids.end());
    try {
        reproduce("fig99", Scale::Ci, 1, 1, scratch("fig"));
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("fig5") != std::string::npos);
    }
}

}
