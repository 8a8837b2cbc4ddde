#include "fmo/experiment.hpp"

#include "fmo/analysis.hpp"
#include "fmo/control.hpp"
#include "fmo/ensemble.hpp"
#include "fmo/rng.hpp"
#include "fmo/thermo.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <set>

namespace fs = std::filesystem;

namespace fmo {

ScaleCounts counts_for(Scale scale) {
    return scale == Scale::Paper ? ScaleCounts{10000, 1000, 20000} : ScaleCounts{200, 8, 3000};
}

Scale scale_from_string(const std::string& s) {
    if (s == "ci") return Scale::Ci;
    if (s == "paper") return Scale::Paper;
    throw ValidationError("scale: expected 'ci' or 'paper', got '" + s + "'");
}

std::string to_string(Scale scale) { return scale == Scale::Paper ? "paper" : "ci"; }

fs::path default_output_dir() {
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
    return "fmo-out";
}

namespace {

const std::set<std::string> kCommands{"simulate", "optimize", "ensemble", "orient", "probe", "transport"};
const std::set<std::string> kStochastic{"optimize", "ensemble", "probe", "transport"};

// Typed access to one parameter section; every key must be declared.
class Params {
public:
    Params(const Json& j, std::string where, std::initializer_list<const char*> allowed) : j_(j), where_(std::move(where)) {
        require_keys(j_, allowed, where_);
    }

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    double num(const char* key, double fallback) const {
        if (!has(key)) return fallback;
        if (!j_.at(key).is_number()) fail(key, "must be a number");
        const double v = j_.at(key).get<double>();
        if (!std::isfinite(v)) fail(key, "must be finite");
        return v;
    }
    long integer(const char* key, long fallback) const {
        if (!has(key)) return fallback;
        if (!j_.at(key).is_number_integer()) fail(key, "must be an integer");
        return j_.at(key).get<long>();
    }
    bool flag(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        if (!j_.at(key).is_boolean()) fail(key, "must be true or false");
        return j_.at(key).get<bool>();
    }
    std::string str(const char* key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        if (!j_.at(key).is_string()) fail(key, "must be a string");
        return j_.at(key).get<std::string>();
    }
    std::vector<double> list(const char* key, std::vector<double> fallback) const {
        if (!has(key)) return fallback;
        if (!j_.at(key).is_array()) fail(key, "must be an array of numbers");
        std::vector<double> out;
        for (const auto& x : j_.at(key)) {
            if (!x.is_number()) fail(key, "must be an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }
    const Json& raw(const char* key) const { return j_.at(key); }

    [[noreturn]] void fail(const char* key, const std::string& what) const {
        throw ValidationError(where_ + "." + key + ": " + what);
    }

private:
    const Json& j_;
    std::string where_;
};

struct Context {
    FmoModel model;
    std::uint64_t seed{0};
    ScaleCounts counts{};
    int threads{1};
    fs::path dir;
    std::vector<fs::path>* outputs{nullptr};

    fs::path out(const std::string& name) const {
        outputs->push_back(dir / name);
        return dir / name;
    }
};

DensityMatrix named_state(const std::string& name) {
    if (name == "ground") return ground_state();
    if (name == "bright") return bright_state();
    if (name == "dark") return dark_target_state();
    if (name == "antisymmetric") return antisymmetric_state();
    if (name.size() == 5 && name.rfind("site", 0) == 0 && name[4] >= '1' && name[4] <= '7') {
        return site_state(name[4] - '0');
    }
    throw ValidationError("unknown state '" + name +
                          "' (expected ground, site1..site7, bright, dark or antisymmetric)");
}

std::optional<DensityMatrix> fidelity_target(CostKind kind) {
    switch (kind) {
        case CostKind::Bright: return bright_state();
        case CostKind::Dark: return dark_target_state();
        case CostKind::Probe: return std::nullopt;
    }
    return std::nullopt;
}

std::vector<Orientation> sample_orientations(const std::string& mode, double eta, double opening, int n,
                                             std::uint64_t seed) {
    if (mode == "disorder") return disorder_orientations(Orientation{}, eta, n, seed);
    if (mode == "isotropic") return isotropic_orientations(n, seed);
    if (mode == "cone") return cone_orientations(Orientation::direction(0.0, 0.0), opening, n, seed);
    if (mode == "dodecahedron") return dodecahedron_orientations();
    if (mode == "single") return {Orientation{}};
    throw ValidationError("unknown orientation mode '" + mode +
                          "' (expected single, disorder, isotropic, cone or dodecahedron)");
}

std::string wide_gamma_label(double g) {
    std::string s = format_number(g);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

// --- simulate ---------------------------------------------------------------

Json cmd_simulate(const Context& ctx, const Json& section) {
    const Params p(section, "simulate", {"initial", "gammas", "t_end", "dt", "stride", "sink"});
    const DensityMatrix rho0 = named_state(p.str("initial", "site1"));
    const auto gammas = p.list("gammas", {0.0, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0});
    const double t_end = p.num("t_end", 10.0);
    if (!(t_end > 0.0)) p.fail("t_end", "must be positive");

    CsvWriter eff(ctx.out("efficiency.csv"), {"gamma", "p_sink"});
    Json values = Json::array();
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        TransportScenario s;
        s.initial = InitialKind::Custom;
        s.state = rho0;
        s.gamma = gammas[k];
        s.horizon = t_end;
        s.sink = p.flag("sink", true);
        s.free_dt = p.num("dt", kFreeStep);
        s.stride = static_cast<int>(p.integer("stride", 50));
        const Trajectory traj = transport_curve(s, ctx.model);
        write_trajectory_csv(ctx.out("trajectory_" + std::to_string(k) + ".csv"), traj);
        eff.row({gammas[k], traj.p_sink.back()});
        values.push_back(traj.p_sink.back());
    }
    return {{"gammas", gammas}, {"p_sink", values}};
}

// --- optimize ---------------------------------------------------------------

struct OptimizeRun {
    CostSpec spec;
    OptimizeOptions opts;
};

OptimizeRun optimize_setup(const Context& ctx, const Params& p) {
    OptimizeRun r;
    const CostKind kind = cost_kind_from_string(p.str("cost", "eps_B"));
    const double gamma = p.num("gamma", 1.0);
    r.spec = kind == CostKind::Probe ? CostSpec::probe(gamma) : CostSpec::pump(kind, gamma);
    r.spec.model = ctx.model.with_dephasing(gamma);
    r.spec.t_pulse = p.num("t_pulse", r.spec.t_pulse);
    r.spec.dt = p.num("dt", r.spec.dt);
    if (p.has("initial")) r.spec.initial = named_state(p.str("initial", "ground"));

    const std::string mode = p.str("orientations", "single");
    r.spec.orientations = sample_orientations(mode, p.num("eta", 0.0), p.num("cone_opening", 0.1 * std::numbers::pi),
                                              static_cast<int>(p.integer("cone_samples", 21)),
                                              substream_seed(ctx.seed, "optimize-orientations"));

    r.opts.seed = ctx.seed;
    r.opts.threads = ctx.threads;
    r.opts.restarts = static_cast<int>(p.integer("restarts", ctx.counts.restarts));
    r.opts.simplex.max_evaluations = p.integer("max_evaluations", ctx.counts.max_evaluations);
    r.opts.e0_max = p.num("e0_max", kDefaultFieldAmplitude);
    r.opts.harmonics = static_cast<int>(p.integer("harmonics", kDefaultHarmonics));
    if (r.opts.harmonics < 1 || r.opts.harmonics > 25) p.fail("harmonics", "must lie in 1..25");
    r.opts.shared_r = p.flag("shared_r", false);
    r.opts.staged = p.flag("staged", true);
    r.opts.search_dt = p.num("search_dt", kSearchStep);
    const std::string method = p.str("method", "subplex");
    if (method == "subplex") {
        r.opts.method = SearchMethod::Subplex;
    } else if (method == "nelder-mead") {
        r.opts.method = SearchMethod::NelderMead;
    } else {
        p.fail("method", "expected subplex or nelder-mead");
    }
    if (p.has("space")) {
        const Params s(p.raw("space"), "optimize.space", {"polarization", "carrier", "envelope", "fourier"});
        r.opts.space.polarization = s.flag("polarization", true);
        r.opts.space.carrier = s.flag("carrier", true);
        r.opts.space.envelope = s.flag("envelope", true);
        r.opts.space.fourier = s.flag("fourier", true);
    }
    if (p.has("omega_l")) {
        PulseParams fixed;
        fixed.omega_l = p.num("omega_l", 0.0);
        r.opts.fixed = fixed;
    }
    if (p.has("warm_start")) r.opts.warm_start = load_pulse(p.str("warm_start", ""));
    return r;
}

double linear_cost(const CostSpec& spec, const PulseParams& pulse) {
    const FmoModel model = spec.model.with_dephasing(spec.gamma);
    Integration opts;
    opts.dt = spec.dt;
    opts.t_end = spec.t_pulse;
    opts.sink = spec.sink;
    DriveSpec drive = DriveSpec::pulsed(pulse, spec.orientations.front());
    drive.shape = linear_interpolation(pulse);
    return evaluate_cost(spec.kind, propagate_final(spec.initial, model, drive, opts));
}

Json write_optimization(const Context& ctx, const CostSpec& spec, const OptimizationResult& result,
                        const std::string& prefix) {
    write_json(ctx.out(prefix + "result.json"), to_json(result));
    save_pulse(ctx.out(prefix + "pulse.json"), result.best_params);
    write_envelope_csv(ctx.out(prefix + "envelope.csv"), result.best_params);
    CsvWriter curve(ctx.out(prefix + "learning_curve.csv"), {"evaluation", "best_cost"});
    for (const auto& [e, c] : result.learning_curve) curve.row({static_cast<double>(e), c});
    const PulseParams& b = result.best_params;
    Json summary{{"cost", to_string(spec.kind)},
                 {"gamma", spec.gamma},
                 {"orientations", spec.orientations.size()},
                 {"best_cost", result.best_cost},
                 {"dtheta", b.dtheta},
                 {"dphi", b.dphi},
                 {"dtheta_wrapped", wrap_angle(b.dtheta)},
                 {"dphi_wrapped", wrap_angle(b.dphi)},
                 {"omega_l", b.omega_l},
                 {"evaluations_total", result.evaluations_total}};
    if (spec.orientations.size() == 1) {
        LinearShape shape = linear_interpolation(b);
        CsvWriter lin(ctx.out(prefix + "linear_envelope.csv"), {"t_fs", "f"});
        for (std::size_t i = 0; i < shape.t.size(); ++i) lin.row({shape.t[i] * 1000.0, shape.f[i]});
        summary["linear_cost"] = linear_cost(spec, b);
    }
    return summary;
}

Json cmd_optimize(const Context& ctx, const Json& section) {
    const Params p(section, "optimize",
                   {"cost", "gamma", "restarts", "max_evaluations", "e0_max", "harmonics", "t_pulse", "dt", "method",
                    "shared_r", "staged", "search_dt", "orientations", "eta", "cone_opening", "cone_samples", "space",
                    "omega_l", "warm_start", "initial"});
    const OptimizeRun r = optimize_setup(ctx, p);
    const OptimizationResult result = optimize_pulse(r.spec, r.opts);
    return write_optimization(ctx, r.spec, result, "");
}

// --- ensemble ---------------------------------------------------------------

Json cmd_ensemble(const Context& ctx, const Json& section) {
    const Params p(section, "ensemble",
                   {"pulse", "cost", "gamma", "mode", "eta", "samples", "cone_opening", "gaussian", "bins", "dt",
                    "initial"});
    if (!p.has("pulse")) throw ValidationError("ensemble.pulse: a pulse file is required");
    PulseParams pulse = load_pulse(p.str("pulse", ""));
    if (p.flag("gaussian", false)) pulse = gaussian_reference(pulse);
    const CostKind kind = cost_kind_from_string(p.str("cost", "eps_B"));
    const double gamma = p.num("gamma", 1.0);
    CostSpec spec = kind == CostKind::Probe ? CostSpec::probe(gamma) : CostSpec::pump(kind, gamma);
    spec.model = ctx.model.with_dephasing(gamma);
    spec.t_pulse = pulse.t_total;
    spec.dt = p.num("dt", kDriveStep);
    if (p.has("initial")) spec.initial = named_state(p.str("initial", "ground"));

    const auto orientations =
        sample_orientations(p.str("mode", "disorder"), p.num("eta", 1.0), p.num("cone_opening", 0.1 * std::numbers::pi),
                            static_cast<int>(p.integer("samples", ctx.counts.samples)),
                            substream_seed(ctx.seed, "ensemble-orientations"));
    const auto states = ensemble_states(spec, pulse, orientations, ctx.threads);
    std::vector<double> values(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) values[i] = evaluate_cost(kind, states[i]);
    const EnsembleDistribution dist = make_distribution(values, static_cast<int>(p.integer("bins", kDefaultBins)));
    const DensityMatrix mean = mean_density(states);

    write_samples_csv(ctx.out("samples.csv"), orientations, values);
    write_histogram_csv(ctx.out("histogram.csv"), dist);
    write_matrix_csv(ctx.out("mean_density_modulus.csv"), modulus(mean));
    Json summary{{"cost", to_string(kind)}, {"samples", values.size()}, {"mean", dist.mean}, {"stddev", dist.stddev}};
    if (const auto target = fidelity_target(kind)) summary["fidelity"] = fidelity<double, kLevels>(mean, *target);
    return summary;
}

// --- orient -----------------------------------------------------------------

Json cmd_orient(const Context& ctx, const Json& section) {
    const Params p(section, "orient",
                   {"omega_l", "e0", "n_theta", "n_phi", "temperatures", "openings", "pdf_temperature", "rotor"});
    OrientingField field;
    field.omega_l = p.num("omega_l", field.omega_l);
    field.e0 = p.num("e0", field.e0);
    const int nt = static_cast<int>(p.integer("n_theta", kGridTheta));
    const int np = static_cast<int>(p.integer("n_phi", kGridPhi));

    const AngleGrid delta = energy_landscape(field, ctx.model, nt, np);
    const AngleGrid rabi = rabi_map(field, ctx.model, nt, np);
    const OrientationPdf pdf = boltzmann_orientation_pdf(field, ctx.model, p.num("pdf_temperature", 300.0), nt, np);
    write_grid_csv(ctx.out("delta.csv"), delta);
    write_grid_csv(ctx.out("rabi.csv"), rabi);
    write_grid_csv(ctx.out("pdf.csv"), pdf.probability);

    const auto temps = p.list("temperatures", {10, 25, 50, 77, 100, 150, 200, 250, 300, 400, 500});
    const auto openings = p.list("openings", {0.2 * std::numbers::pi, 0.5 * std::numbers::pi});
    std::vector<std::string> header{"temperature_K"};
    for (double o : openings) {
        char label[32];
        std::snprintf(label, sizeof label, "cone_%.4gpi", o / std::numbers::pi);
        header.push_back(label);
    }
    CsvWriter fractions(ctx.out("fractions.csv"), header);
    for (double t : temps) {
        std::vector<double> r{t};
        for (double o : openings) r.push_back(cone_population_fraction(field, ctx.model, t, o, nt, np));
        fractions.row(r);
    }

    RotorSpec rotor;
    if (p.has("rotor")) {
        const Params rp(p.raw("rotor"), "orient.rotor", {"mass", "radius", "thermal_energy"});
        rotor.mass = rp.num("mass", rotor.mass);
        rotor.radius = rp.num("radius", rotor.radius);
        rotor.thermal_energy = rp.num("thermal_energy", rotor.thermal_energy);
    }
    const auto [th, ph] = grid_argmax(delta);
    return {{"argmax_theta", th},
            {"argmax_phi", ph},
            {"delta_max", delta.values.maxCoeff()},
            {"delta_min", delta.values.minCoeff()},
            {"rabi_max", rabi.values.maxCoeff()},
            {"moment_of_inertia", moment_of_inertia(rotor)},
            {"rotation_time_s", rotation_time(rotor)}};
}

// --- probe ------------------------------------------------------------------

struct ProbeOutcome {
    OptimizationResult gaussian;
    OptimizationResult shaped;
    EnsembleDistribution gaussian_cone;
    EnsembleDistribution shaped_cone;
    double single_eps_p{1.0};
};

Json cmd_probe(const Context& ctx, const Json& section) {
    const Params p(section, "probe",
                   {"gamma", "restarts", "max_evaluations", "e0_max", "t_pulse", "cone_opening", "cone_samples",
                    "samples", "threshold", "harmonics"});
    const double gamma = p.num("gamma", 1.0);
    const double opening = p.num("cone_opening", 0.1 * std::numbers::pi);
    const double threshold = p.num("threshold", 0.2);
    CostSpec single = CostSpec::probe(gamma);
    single.model = ctx.model.with_dephasing(gamma);
    single.t_pulse = p.num("t_pulse", kDefaultProbeDuration);

    OptimizeOptions base;
    base.seed = ctx.seed;
    base.threads = ctx.threads;
    base.restarts = static_cast<int>(p.integer("restarts", ctx.counts.restarts));
    base.simplex.max_evaluations = p.integer("max_evaluations", ctx.counts.max_evaluations);
    base.e0_max = p.num("e0_max", kDefaultFieldAmplitude);
    base.harmonics = static_cast<int>(p.integer("harmonics", kDefaultHarmonics));

    // Resonant Gaussian probe: polarization, center and width only.
    OptimizeOptions g = base;
    g.space = {true, false, true, false};
    PulseParams resonant;
    resonant.omega_l = 0.0;
    g.fixed = resonant;
    const OptimizationResult gaussian = optimize_pulse(single, g);

    CostSpec cone = single;
    cone.orientations = cone_orientations(Orientation::direction(0.0, 0.0), opening,
                                          static_cast<int>(p.integer("cone_samples", 21)),
                                          substream_seed(ctx.seed, "probe-cone-opt"));
    OptimizeOptions s = base;
    s.seed = substream_seed(ctx.seed, "probe-shaped");
    s.warm_start = gaussian.best_params;
    const OptimizationResult shaped = optimize_pulse(cone, s);

    const auto samples = cone_orientations(Orientation::direction(0.0, 0.0), opening,
                                           static_cast<int>(p.integer("samples", ctx.counts.samples)),
                                           substream_seed(ctx.seed, "probe-cone-eval"));
    const EnsembleDistribution dg = ensemble_evaluate(single, gaussian.best_params, samples, ctx.threads);
    const EnsembleDistribution ds = ensemble_evaluate(single, shaped.best_params, samples, ctx.threads);

    Json gsum = write_optimization(ctx, single, gaussian, "gaussian_");
    Json ssum = write_optimization(ctx, cone, shaped, "shaped_");
    write_histogram_csv(ctx.out("gaussian_cone_histogram.csv"), dg);
    write_histogram_csv(ctx.out("shaped_cone_histogram.csv"), ds);
    const double mg = mass_below(dg, threshold);
    const double ms = mass_below(ds, threshold);
    return {{"gaussian", gsum},
            {"shaped", ssum},
            {"single_absorption", 1.0 - gaussian.best_cost},
            {"gaussian_cone_mean", dg.mean},
            {"shaped_cone_mean", ds.mean},
            {"gaussian_mass_below", mg},
            {"shaped_mass_below", ms},
            {"threshold", threshold},
            {"mass_ratio", mg > 0.0 ? ms / mg : std::numeric_limits<double>::infinity()}};
}

// --- transport --------------------------------------------------------------

Json cmd_transport(const Context& ctx, const Json& section) {
    const Params p(section, "transport",
                   {"gammas", "horizon", "step", "pulse_b", "pulse_d", "prepared_gammas", "distribution", "samples",
                    "mode", "eta", "t"});
    const auto gammas = p.list("gammas", {0.0, 1.0});
    const double horizon = p.num("horizon", 2.0);
    const double step = p.num("step", 0.01);
    if (!(horizon > 0.0) || !(step > 0.0)) throw ValidationError("transport: horizon and step must be positive");

    struct Curve {
        std::string name;
        Trajectory traj;
    };
    std::vector<Curve> curves;
    const std::pair<const char*, InitialKind> exact[] = {
        {"D", InitialKind::Dark}, {"minus", InitialKind::Antisymmetric}, {"B", InitialKind::Bright}};
    for (double g : gammas) {
        for (auto [name, kind] : exact) {
            TransportScenario s;
            s.initial = kind;
            s.gamma = g;
            s.horizon = horizon;
            curves.push_back({std::string(name) + "_g" + wide_gamma_label(g), transport_curve(s, ctx.model)});
        }
    }
    std::optional<PulseParams> pulse_b, pulse_d;
    if (p.has("pulse_b")) pulse_b = load_pulse(p.str("pulse_b", ""));
    if (p.has("pulse_d")) pulse_d = load_pulse(p.str("pulse_d", ""));
    for (double g : p.list("prepared_gammas", gammas)) {
        for (auto [name, pulse] : {std::pair{"prepB", &pulse_b}, std::pair{"prepD", &pulse_d}}) {
            if (!*pulse) continue;
            TransportScenario s;
            s.initial = InitialKind::Prepared;
            s.pulse = **pulse;
            s.gamma = g;
            s.horizon = horizon;
            curves.push_back({std::string(name) + "_g" + wide_gamma_label(g), transport_curve(s, ctx.model)});
        }
    }

    std::vector<std::string> header{"t_ps"};
    for (const auto& c : curves) header.push_back(c.name);
    CsvWriter csv(ctx.out("curves.csv"), header);
    const long rows = std::lround(horizon / step);
    Json at_horizon = Json::object();
    for (long k = 0; k <= rows; ++k) {
        const double t = std::min(horizon, k * step);
        std::vector<double> r{t};
        for (const auto& c : curves) {
            const auto& ts = c.traj.times;
            const auto it = std::lower_bound(ts.begin(), ts.end(), t - 1e-12);
            std::size_t i = static_cast<std::size_t>(it - ts.begin());
            double v;
            if (i == 0) {
                v = c.traj.p_sink.front();
            } else if (i >= ts.size()) {
                v = c.traj.p_sink.back();
            } else {
                const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
                v = (1.0 - w) * c.traj.p_sink[i - 1] + w * c.traj.p_sink[i];
            }
            r.push_back(v);
        }
        csv.row(r);
    }
    for (const auto& c : curves) at_horizon[c.name] = c.traj.p_sink.back();
    Json summary{{"horizon", horizon}, {"p_sink_at_horizon", at_horizon}};

    if (p.flag("distribution", false)) {
        if (!pulse_b || !pulse_d) throw ValidationError("transport.distribution needs pulse_b and pulse_d");
        const auto orientations = sample_orientations(p.str("mode", "disorder"), p.num("eta", 1.0),
                                                      0.1 * std::numbers::pi,
                                                      static_cast<int>(p.integer("samples", ctx.counts.samples)),
                                                      substream_seed(ctx.seed, "transport-orientations"));
        const double gamma = gammas.size() == 1 ? gammas.front() : 1.0;
        const auto [db, dd] = transport_distribution(*pulse_b, *pulse_d, orientations, gamma, p.num("t", 2.0),
                                                     ctx.model, ctx.threads);
        write_histogram_csv(ctx.out("distribution_B.csv"), db);
        write_histogram_csv(ctx.out("distribution_D.csv"), dd);
        summary["distribution"] = {{"mean_B", db.mean},
                                   {"mean_D", dd.mean},
                                   {"stddev_B", db.stddev},
                                   {"stddev_D", dd.stddev},
                                   {"overlap_error", distribution_overlap_error(db, dd)}};
    }
    return summary;
}

using Command = std::function<Json(const Context&, const Json&)>;

const std::map<std::string, Command>& commands() {
    static const std::map<std::string, Command> table{{"simulate", cmd_simulate}, {"optimize", cmd_optimize},
                                                      {"ensemble", cmd_ensemble}, {"orient", cmd_orient},
                                                      {"probe", cmd_probe},       {"transport", cmd_transport}};
    return table;
}

std::string compiler_version() {
#if defined(__clang__)
    return "clang " __clang_version__;
#elif defined(__GNUC__)
    return "gcc " __VERSION__;
#else
    return "unknown";
#endif
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
    std::vector<const char*> allowed{"command", "seed", "scale", "threads", "output_dir", "model"};
    for (const auto& c : kCommands) allowed.push_back(c.c_str());
    if (!j.is_object()) throw ValidationError("config: expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        if (!ok.count(item.key())) throw ValidationError("config: unknown key '" + item.key() + "'");
    }
    ExperimentConfig c;
    if (!j.contains("command") || !j.at("command").is_string()) throw ValidationError("config.command: required");
    c.command = j.at("command").get<std::string>();
    if (!kCommands.count(c.command)) throw ValidationError("config.command: unknown command '" + c.command + "'");
    for (const auto& other : kCommands) {
        if (other != c.command && j.contains(other)) {
            throw ValidationError("config: section '" + other + "' does not belong to command '" + c.command + "'");
        }
    }
    if (j.contains("seed")) {
        const Json& v = j.at("seed");
        if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0))) throw ValidationError("config.seed: must be a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("scale")) c.scale = scale_from_string(j.at("scale").get<std::string>());
    if (j.contains("threads")) {
        if (!j.at("threads").is_number_integer() || j.at("threads").get<int>() < 1) {
            throw ValidationError("config.threads: must be a positive integer");
        }
        c.threads = j.at("threads").get<int>();
    }
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("model")) c.model = overrides_from_json(j.at("model"));
    if (j.contains(c.command)) c.params = j.at(c.command);
    if (!c.params.is_object()) throw ValidationError("config." + c.command + ": expected an object");
    return c;
}

Json ExperimentConfig::to_json() const {
    Json j{{"command", command}, {"scale", fmo::to_string(scale)}, {"threads", threads},
           {"output_dir", output_dir.string()}, {"model", fmo::to_json(model)}, {command, params}};
    if (seed) j["seed"] = *seed;
    return j;
}

RunResult run(const ExperimentConfig& config) {
    if (!commands().count(config.command)) throw ValidationError("unknown command '" + config.command + "'");
    if (kStochastic.count(config.command) && !config.seed) {
        throw ValidationError("config.seed: required for the stochastic command '" + config.command + "'");
    }
    const fs::path dir = config.output_dir.empty() ? default_output_dir() : config.output_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ValidationError("output_dir: cannot create " + dir.string());

    std::vector<fs::path> outputs;
    Context ctx;
    ctx.model = build_fmo_model(config.model);
    ctx.seed = config.seed.value_or(0);
    ctx.counts = counts_for(config.scale);
    ctx.threads = config.threads;
    ctx.dir = dir;
    ctx.outputs = &outputs;

    const auto start = std::chrono::steady_clock::now();
    Json summary = commands().at(config.command)(ctx, config.params);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    RunResult result;
    result.outputs = outputs;
    result.output_hash = hex(hash_files(outputs));
    result.summary = summary;

    Json files = Json::array();
    for (const auto& f : outputs) files.push_back(f.filename().string());
    const Json manifest{{"config", config.to_json()},
                        {"seed", ctx.seed},
                        {"version", kVersion},
                        {"compiler", compiler_version()},
                        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                      std::to_string(EIGEN_MINOR_VERSION)},
                        {"wall_time_s", wall},
                        {"outputs", files},
                        {"output_hash", result.output_hash},
                        {"summary", summary}};
    write_json(dir / "manifest.json", manifest);
    return result;
}

// --- figure recipes -----------------------------------------------------------

namespace {

struct Recipe {
    Scale scale;
    std::uint64_t seed;
    int threads;
    fs::path dir;
    std::vector<fs::path> outputs;
    Json summary = Json::object();

    RunResult step(const std::string& name, const std::string& command, Json params) {
        ExperimentConfig c;
        c.command = command;
        c.seed = seed;
        c.scale = scale;
        c.threads = threads;
        c.output_dir = dir / name;
        c.params = std::move(params);
        RunResult r = run(c);
        outputs.insert(outputs.end(), r.outputs.begin(), r.outputs.end());
        summary[name] = r.summary;
        return r;
    }
    std::string pulse(const std::string& name) const { return (dir / name / "pulse.json").string(); }
};

void fig_disorder_ensembles(Recipe& r, const std::string& cost, const std::string& opt, bool gaussian,
                            const std::vector<double>& etas) {
    for (double eta : etas) {
        const std::string tag = (gaussian ? "gaussian" : "optimal") + std::string("_eta") + wide_gamma_label(eta);
        r.step(tag, "ensemble",
               {{"pulse", r.pulse(opt)}, {"cost", cost}, {"mode", "disorder"}, {"eta", eta}, {"gaussian", gaussian}});
    }
}

const std::map<std::string, std::function<void(Recipe&)>>& recipes() {
    static const std::map<std::string, std::function<void(Recipe&)>> table{
        {"fig2",
         [](Recipe& r) {
             r.step("inset", "simulate", {{"initial", "site1"}});
             for (double g : {0.0, 0.1, 0.5, 1.0, 5.0, 10.0}) {
                 r.step("eps_B_g" + wide_gamma_label(g), "optimize", {{"cost", "eps_B"}, {"gamma", g}});
                 r.step("eps_D_g" + wide_gamma_label(g), "optimize", {{"cost", "eps_D"}, {"gamma", g}});
             }
         }},
        {"fig3",
         [](Recipe& r) {
             r.step("optimize", "optimize", {{"cost", "eps_B"}});
             fig_disorder_ensembles(r, "eps_B", "optimize", false, {0.01, 1.0});
             fig_disorder_ensembles(r, "eps_B", "optimize", true, {0.01, 1.0});
         }},
        {"fig4",
         [](Recipe& r) {
             r.step("optimize", "optimize", {{"cost", "eps_D"}});
             fig_disorder_ensembles(r, "eps_D", "optimize", false, {0.01, 1.0});
             fig_disorder_ensembles(r, "eps_D", "optimize", true, {0.01, 1.0});
         }},
        {"fig5",
         [](Recipe& r) {
             Json prepared = Json::object();
             for (double g : {0.0, 1.0}) {
                 const std::string lb = "opt_B_g" + wide_gamma_label(g), ld = "opt_D_g" + wide_gamma_label(g);
                 r.step(lb, "optimize", {{"cost", "eps_B"}, {"gamma", g}});
                 r.step(ld, "optimize", {{"cost", "eps_D"}, {"gamma", g}});
                 r.step("transport_g" + wide_gamma_label(g), "transport",
                        {{"gammas", {g}}, {"pulse_b", r.pulse(lb)}, {"pulse_d", r.pulse(ld)}});
             }
         }},
        {"fig6",
         [](Recipe& r) {
             r.step("opt_B", "optimize", {{"cost", "eps_B"}});
             r.step("opt_D", "optimize", {{"cost", "eps_D"}});
             r.step("transport", "transport",
                    {{"gammas", {1.0}},
                     {"pulse_b", r.pulse("opt_B")},
                     {"pulse_d", r.pulse("opt_D")},
                     {"distribution", true},
                     {"eta", 1.0}});
         }},
        {"fig7",
         [](Recipe& r) {
             r.step("opt_single", "optimize", {{"cost", "eps_D"}});
             r.step("opt_dodecahedron", "optimize",
                    {{"cost", "eps_D"}, {"orientations", "dodecahedron"}, {"warm_start", r.pulse("opt_single")}});
             r.step("opt_cone", "optimize",
                    {{"cost", "eps_D"}, {"orientations", "cone"}, {"warm_start", r.pulse("opt_single")}});
             r.step("single_isotropic", "ensemble", {{"pulse", r.pulse("opt_single")}, {"cost", "eps_D"}, {"mode", "isotropic"}});
             r.step("dodecahedron_isotropic", "ensemble",
                    {{"pulse", r.pulse("opt_dodecahedron")}, {"cost", "eps_D"}, {"mode", "isotropic"}});
             r.step("cone_cone", "ensemble", {{"pulse", r.pulse("opt_cone")}, {"cost", "eps_D"}, {"mode", "cone"}});
         }},
        {"fig8", [](Recipe& r) { r.step("probe", "probe", Json::object()); }},
        {"fig9", [](Recipe& r) { r.step("orient", "orient", Json::object()); }},
        {"fig11", [](Recipe& r) { r.step("orient", "orient", {{"pdf_temperature", 300.0}}); }},
        {"fig12", [](Recipe& r) { r.step("orient", "orient", {{"n_theta", 91}, {"n_phi", 180}}); }},
        {"fig13",
         [](Recipe& r) {
             r.step("optimize", "optimize", {{"cost", "eps_B"}});
             fig_disorder_ensembles(r, "eps_B", "optimize", false, {0.01, 1.0});
         }},
        {"fig14",
         [](Recipe& r) {
             r.step("optimize", "optimize", {{"cost", "eps_B"}});
             fig_disorder_ensembles(r, "eps_B", "optimize", true, {0.01, 1.0});
         }},
        {"fig15",
         [](Recipe& r) {
             r.step("optimize", "optimize", {{"cost", "eps_D"}});
             fig_disorder_ensembles(r, "eps_D", "optimize", false, {0.01, 1.0});
         }},
        {"fig16",
         [](Recipe& r) {
             r.step("opt_B", "optimize", {{"cost", "eps_B"}});
             r.step("opt_D", "optimize", {{"cost", "eps_D"}});
             r.step("B_eta0p1", "ensemble", {{"pulse", r.pulse("opt_B")}, {"cost", "eps_B"}, {"eta", 0.1}});
             r.step("D_eta0p1", "ensemble", {{"pulse", r.pulse("opt_D")}, {"cost", "eps_D"}, {"eta", 0.1}});
         }},
    };
    return table;
}

}  // namespace

std::vector<std::string> figure_ids() {
    std::vector<std::string> ids;
    for (const auto& [k, v] : recipes()) ids.push_back(k);
    std::sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
        return std::stoi(a.substr(3)) < std::stoi(b.substr(3));
    });
    return ids;
}

RunResult reproduce(const std::string& figure, Scale scale, std::uint64_t seed, int threads, const fs::path& output_dir) {
    const auto it = recipes().find(figure);
    if (it == recipes().end()) {
        std::string valid;
        for (const auto& id : figure_ids()) valid += (valid.empty() ? "" : ", ") + id;
        throw ValidationError("unknown figure '" + figure + "'; valid identifiers: " + valid);
    }
    Recipe r{scale, seed, threads, output_dir / figure, {}};
    it->second(r);
    RunResult result;
    result.outputs = r.outputs;
    result.output_hash = hex(hash_files(r.outputs));
    result.summary = r.summary;
    write_json(r.dir / "summary.json", Json{{"figure", figure}, {"output_hash", result.output_hash}, {"steps", r.summary}});
    return result;
}

}  // namespace fmo
