// Command-line front end for the FMO control toolkit.
//
//   fmoctl optimize --cost eps_B --seed 7 --ci
//   fmoctl ensemble --pulse out/pulse.json --mode disorder --eta 0.01 --seed 7
//   fmoctl reproduce fig5 --seed 7 --paper --threads 4
//
// Flags override values from --config. Outputs go to --out, else $FMO_OUTPUT_DIR, else ./fmo-out.

#include "fmo/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool ci{false};
    bool paper{false};
    std::optional<int> threads;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Seed for every random stream");
    auto* ci = cmd->add_flag("--ci", c.ci, "CI scale: 200 samples, 8 restarts");
    auto* paper = cmd->add_flag("--paper", c.paper, "Paper scale: 10^4 samples, 10^3 restarts");
    ci->excludes(paper);
    cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out, "Output directory");
}

fmo::Json base_config(const Common& c, const std::string& command) {
    fmo::Json j = c.config.empty() ? fmo::Json::object() : fmo::read_json(c.config);
    if (j.contains("command") && j["command"] != command) {
        throw fmo::ValidationError("config command '" + j["command"].get<std::string>() + "' does not match '" +
                                   command + "'");
    }
    j["command"] = command;
    if (c.seed) j["seed"] = *c.seed;
    if (c.ci) j["scale"] = "ci";
    if (c.paper) j["scale"] = "paper";
    if (c.threads) j["threads"] = *c.threads;
    if (!c.out.empty()) j["output_dir"] = c.out;
    if (!j.contains(command)) j[command] = fmo::Json::object();
    return j;
}

// Per-command flags that map one-to-one onto section keys.
struct Section {
    std::map<std::string, std::string> strings;
    std::map<std::string, double> numbers;
    std::map<std::string, long> integers;
    std::map<std::string, bool> flags;
    std::map<std::string, std::vector<double>> lists;

    void apply(fmo::Json& section) const {
        for (const auto& [k, v] : strings) section[k] = v;
        for (const auto& [k, v] : numbers) section[k] = v;
        for (const auto& [k, v] : integers) section[k] = v;
        for (const auto& [k, v] : flags) section[k] = v;
        for (const auto& [k, v] : lists) section[k] = v;
    }
};

template <typename T>
void opt(CLI::App* cmd, const std::string& flag, const std::string& key, std::map<std::string, T>& into,
         const std::string& help) {
    cmd->add_option_function<T>(flag, [&into, key](const T& v) { into[key] = v; }, help);
}

void flag(CLI::App* cmd, const std::string& name, const std::string& key, std::map<std::string, bool>& into,
          const std::string& help) {
    cmd->add_flag_function(name, [&into, key](std::int64_t) { into[key] = true; }, help);
}

int report(const fmo::RunResult& r) {
    std::cout << r.summary.dump(2) << "\noutput hash " << r.output_hash << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coherent control of the FMO complex: propagation, pulse optimization, ensembles"};
    app.require_subcommand(1);

    Common common;
    std::map<std::string, Section> sections;
    std::map<std::string, CLI::App*> subs;

    auto* simulate = app.add_subcommand("simulate", "Transfer efficiency vs dephasing from a prepared site state");
    auto* optimize = app.add_subcommand("optimize", "CRAB pulse optimization");
    auto* ensemble = app.add_subcommand("ensemble", "Apply a pulse to an orientation ensemble");
    auto* orient = app.add_subcommand("orient", "Orientation landscape, Boltzmann fractions, rotation time");
    auto* probe = app.add_subcommand("probe", "Gaussian and shaped probes for the site-3 population");
    auto* transport = app.add_subcommand("transport", "Sink efficiency curves and distributions");
    for (auto* s : {simulate, optimize, ensemble, orient, probe, transport}) {
        add_common(s, common);
        subs[s->get_name()] = s;
    }

    auto& sim = sections["simulate"];
    opt(simulate, "--initial", "initial", sim.strings, "ground, site1..site7, bright, dark or antisymmetric");
    opt(simulate, "--gammas", "gammas", sim.lists, "Dephasing rates, ps^-1");
    opt(simulate, "--t-end", "t_end", sim.numbers, "Horizon, ps");
    opt(simulate, "--dt", "dt", sim.numbers, "Step, ps");

    auto& op = sections["optimize"];
    opt(optimize, "--cost", "cost", op.strings, "eps_B, eps_D or eps_P");
    opt(optimize, "--gamma", "gamma", op.numbers, "Dephasing rate, ps^-1");
    opt(optimize, "--restarts", "restarts", op.integers, "Random restarts");
    opt(optimize, "--max-evaluations", "max_evaluations", op.integers, "Budget per restart");
    opt(optimize, "--e0-max", "e0_max", op.numbers, "Field amplitude bound, D^-1 cm^-1");
    opt(optimize, "--harmonics", "harmonics", op.integers, "Fourier harmonics m");
    opt(optimize, "--method", "method", op.strings, "subplex or nelder-mead");
    opt(optimize, "--orientations", "orientations", op.strings, "single, dodecahedron, cone, disorder or isotropic");
    opt(optimize, "--cone-opening", "cone_opening", op.numbers, "Cone half-angle, rad");
    opt(optimize, "--warm-start", "warm_start", op.strings, "Pulse JSON for restart 0");
    flag(optimize, "--shared-r", "shared_r", op.flags, "One r for all harmonics");

    auto& en = sections["ensemble"];
    opt(ensemble, "--pulse", "pulse", en.strings, "Pulse or result JSON");
    opt(ensemble, "--cost", "cost", en.strings, "eps_B, eps_D or eps_P");
    opt(ensemble, "--gamma", "gamma", en.numbers, "Dephasing rate, ps^-1");
    opt(ensemble, "--mode", "mode", en.strings, "disorder, isotropic, cone or dodecahedron");
    opt(ensemble, "--eta", "eta", en.numbers, "Disorder strength (0.01 = 1%)");
    opt(ensemble, "--samples", "samples", en.integers, "Sample count");
    opt(ensemble, "--cone-opening", "cone_opening", en.numbers, "Cone half-angle, rad");
    flag(ensemble, "--gaussian", "gaussian", en.flags, "Strip the Fourier modulation from the pulse");

    auto& orr = sections["orient"];
    opt(orient, "--omega-l", "omega_l", orr.numbers, "Orienting-field carrier, cm^-1");
    opt(orient, "--e0", "e0", orr.numbers, "Orienting-field amplitude, D^-1 cm^-1");
    opt(orient, "--temperatures", "temperatures", orr.lists, "Temperatures, K");

    auto& pr = sections["probe"];
    opt(probe, "--gamma", "gamma", pr.numbers, "Dephasing rate, ps^-1");
    opt(probe, "--restarts", "restarts", pr.integers, "Random restarts");
    opt(probe, "--samples", "samples", pr.integers, "Cone samples for evaluation");

    auto& tr = sections["transport"];
    opt(transport, "--gammas", "gammas", tr.lists, "Dephasing rates, ps^-1");
    opt(transport, "--horizon", "horizon", tr.numbers, "Horizon, ps");
    opt(transport, "--pulse-b", "pulse_b", tr.strings, "B-preparation pulse JSON");
    opt(transport, "--pulse-d", "pulse_d", tr.strings, "D-preparation pulse JSON");
    opt(transport, "--samples", "samples", tr.integers, "Orientation samples");
    flag(transport, "--distribution", "distribution", tr.flags, "Per-orientation p_sink distributions");

    auto* reproduce = app.add_subcommand("reproduce", "Canned figure configurations");
    std::string figure;
    Common rep;
    reproduce->add_option("figure", figure, "Figure identifier")->required();
    reproduce->add_option("--seed", rep.seed, "Seed");
    auto* rci = reproduce->add_flag("--ci", rep.ci, "CI scale");
    auto* rpaper = reproduce->add_flag("--paper", rep.paper, "Paper scale");
    rci->excludes(rpaper);
    reproduce->add_option("--threads", rep.threads, "Worker threads")->check(CLI::PositiveNumber);
    reproduce->add_option("--out", rep.out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (reproduce->parsed()) {
            const fmo::Scale scale = rep.paper ? fmo::Scale::Paper : fmo::Scale::Ci;
            const auto dir = rep.out.empty() ? fmo::default_output_dir() : std::filesystem::path(rep.out);
            return report(fmo::reproduce(figure, scale, rep.seed.value_or(1), rep.threads.value_or(1), dir));
        }
        for (const auto& [name, sub] : subs) {
            if (!sub->parsed()) continue;
            fmo::Json j = base_config(common, name);
            sections[name].apply(j[name]);
            return report(fmo::run(fmo::ExperimentConfig::from_json(j)));
        }
    } catch (const fmo::ValidationError& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
