#include "fmo/control.hpp"

#include "fmo/parallel.hpp"
#include "fmo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

namespace fmo {

namespace {
constexpr double kRejectedCost = 1e3;
}

double eps_b(const DensityMatrix& rho) {
    return 1.0 - 0.5 * (rho(1, 1).real() + rho(2, 2).real()) - rho(1, 2).real();
}

double eps_d(const DensityMatrix& rho) {
    return 1.0 - rho(5, 5).real() - rho(6, 6).real() - rho(7, 7).real();
}

double eps_p(const DensityMatrix& rho) { return rho(3, 3).real(); }

double evaluate_cost(CostKind kind, const DensityMatrix& rho) {
    switch (kind) {
        case CostKind::Bright: return eps_b(rho);
        case CostKind::Dark: return eps_d(rho);
        case CostKind::Probe: return eps_p(rho);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::string to_string(CostKind kind) {
    switch (kind) {
        case CostKind::Bright: return "eps_B";
        case CostKind::Dark: return "eps_D";
        case CostKind::Probe: return "eps_P";
    }
    return "?";
}

CostKind cost_kind_from_string(const std::string& name) {
    if (name == "eps_B" || name == "B" || name == "bright") return CostKind::Bright;
    if (name == "eps_D" || name == "D" || name == "dark") return CostKind::Dark;
    if (name == "eps_P" || name == "P" || name == "probe") return CostKind::Probe;
    throw ValidationError("unknown cost kind '" + name + "' (expected eps_B, eps_D or eps_P)");
}

CostSpec CostSpec::pump(CostKind kind, double gamma) {
    CostSpec spec;
    spec.kind = kind;
    spec.gamma = gamma;
    spec.model = build_fmo_model().with_dephasing(gamma);
    return spec;
}

CostSpec CostSpec::probe(double gamma) {
    CostSpec spec = pump(CostKind::Probe, gamma);
    spec.t_pulse = kDefaultProbeDuration;
    spec.initial = site_state(kSinkFeedSite);
    return spec;
}

double pulse_cost(const CostSpec& spec, const PulseParams& pulse) {
    if (spec.orientations.empty()) throw ValidationError("pulse_cost: no orientations");
    if (!(spec.t_pulse > 0.0)) throw ValidationError("pulse_cost: t_pulse must be positive");
    const FmoModel model = spec.model.with_dephasing(spec.gamma);
    Integration opts;
    opts.dt = spec.dt;
    opts.t_end = spec.t_pulse;
    opts.sink = spec.sink;
    double total = 0.0;
    for (const Orientation& o : spec.orientations) {
        const DensityMatrix rho = propagate_final(spec.initial, model, DriveSpec::pulsed(pulse, o), opts);
        total += evaluate_cost(spec.kind, rho);
    }
    return total / static_cast<double>(spec.orientations.size());
}

Eigen::Index SearchSpace::dimension(int harmonics) const {
    return (polarization ? 2 : 0) + (carrier ? 1 : 0) + (envelope ? 2 : 0) + (fourier ? 2 * harmonics : 0);
}

Eigen::VectorXd pack(const PulseParams& p, const SearchSpace& space) {
    Eigen::VectorXd x(space.dimension(p.harmonics()));
    Eigen::Index i = 0;
    if (space.polarization) {
        x(i++) = p.dtheta;
        x(i++) = p.dphi;
    }
    if (space.carrier) x(i++) = p.omega_l;
    if (space.envelope) {
        x(i++) = p.t0;
        x(i++) = p.sigma;
    }
    if (space.fourier) {
        x.segment(i, p.harmonics()) = p.a;
        i += p.harmonics();
        x.segment(i, p.harmonics()) = p.b;
    }
    return x;
}

PulseParams unpack(const Eigen::VectorXd& x, const PulseParams& base, const SearchSpace& space) {
    PulseParams p = base;
    Eigen::Index i = 0;
    if (space.polarization) {
        p.dtheta = x(i++);
        p.dphi = x(i++);
    }
    if (space.carrier) p.omega_l = x(i++);
    if (space.envelope) {
        p.t0 = x(i++);
        p.sigma = x(i++);
    }
    if (space.fourier) {
        p.a = x.segment(i, base.harmonics());
        i += base.harmonics();
        p.b = x.segment(i, base.harmonics());
    }
    return p;
}

Eigen::VectorXd search_steps(const PulseParams& base, const SearchSpace& space) {
    PulseParams s = base;
    s.dtheta = s.dphi = 0.3;
    s.omega_l = 50.0;
    s.t0 = 0.05 * base.t_total;
    s.sigma = 0.03 * base.t_total;
    s.a = Eigen::VectorXd::Constant(base.harmonics(), 0.3);
    s.b = s.a;
    return pack(s, space);
}

double penalized_cost(const CostSpec& spec, const PulseParams& pulse, double e0_max) {
    double penalty = 0.0;
    for (const auto& v : check_constraints(pulse, e0_max)) penalty += v.magnitude;
    PulseParams evaluated = pulse;
    // The envelope is even in sigma; keep it away from the degenerate zero width.
    evaluated.sigma = std::max(std::abs(pulse.sigma), 1e-6);
    return pulse_cost(spec, evaluated) + 10.0 * penalty;
}

double wrap_angle(double a) {
    const double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(a, two_pi);
    if (w < 0.0) w += two_pi;
    return w;
}

PulseParams random_initial_pulse(const CostSpec& spec, const OptimizeOptions& opts, int restart) {
    const std::uint64_t restart_seed = substream_seed(opts.seed, "restart", static_cast<std::uint64_t>(restart));
    PulseParams p = opts.fixed.value_or(PulseParams{});
    p.t_total = spec.t_pulse;
    p.e0 = opts.e0_max;
    p.seed = restart_seed;
    p.nu = sample_frequencies(opts.harmonics, spec.t_pulse, restart_seed, opts.shared_r);
    if (p.a.size() != opts.harmonics) p.a = Eigen::VectorXd::Zero(opts.harmonics);
    if (p.b.size() != opts.harmonics) p.b = Eigen::VectorXd::Zero(opts.harmonics);
    if (!opts.fixed) {
        p.t0 = spec.t_pulse / 2;
        p.sigma = spec.t_pulse / 6;
    }

    Rng rng(restart_seed, "initial-guess");
    const double two_pi = 2.0 * std::numbers::pi;
    const double T = spec.t_pulse;
    // Draw everything unconditionally so the stream does not depend on the search space.
    const double dtheta = rng.uniform(0.0, two_pi);
    const double dphi = rng.uniform(0.0, two_pi);
    const double omega = rng.uniform(-200.0, 600.0);
    const double t0 = rng.uniform(0.3 * T, 0.7 * T);
    const double sigma = rng.uniform(0.05 * T, 0.3 * T);
    Eigen::VectorXd a(opts.harmonics), b(opts.harmonics);
    for (int k = 0; k < opts.harmonics; ++k) a(k) = rng.uniform(-1.0, 1.0);
    for (int k = 0; k < opts.harmonics; ++k) b(k) = rng.uniform(-1.0, 1.0);

    if (opts.space.polarization) {
        p.dtheta = dtheta;
        p.dphi = dphi;
    }
    if (opts.space.carrier) p.omega_l = omega;
    if (opts.space.envelope) {
        p.t0 = t0;
        p.sigma = sigma;
    }
    if (opts.space.fourier) {
        p.a = a;
        p.b = b;
    }
    return p;
}

OptimizationResult optimize_pulse(const CostSpec& spec, const OptimizeOptions& opts) {
    if (opts.restarts < 1) throw ValidationError("optimize_pulse: restarts must be >= 1");
    if (spec.orientations.empty()) throw ValidationError("optimize_pulse: no orientations");

    CostSpec search_spec = spec;
    search_spec.dt = opts.search_dt > 0.0 ? std::max(opts.search_dt, spec.dt) : spec.dt;

    std::vector<RestartRecord> records(static_cast<std::size_t>(opts.restarts));
    std::vector<std::vector<std::pair<long, double>>> curves(records.size());

    parallel_for(records.size(), opts.threads, [&](std::size_t r) {
        const int restart = static_cast<int>(r);
        PulseParams start = random_initial_pulse(spec, opts, restart);
        if (restart == 0 && opts.warm_start) {
            start = *opts.warm_start;
            start.e0 = opts.e0_max;
        }

        auto run = [&](const PulseParams& from, const SearchSpace& space, long budget,
                       std::vector<std::pair<long, double>>& curve, long offset) {
            auto objective = [&](const Eigen::VectorXd& x) {
                try {
                    return penalized_cost(search_spec, unpack(x, from, space), opts.e0_max);
                } catch (const IntegrationError&) {
                    return kRejectedCost;  // unresolvable at the search step; treat as infeasible
                }
            };
            opt::SimplexOptions simplex = opts.simplex;
            simplex.max_evaluations = budget;
            simplex.initial_step = search_steps(from, space);
            const Eigen::VectorXd x0 = pack(from, space);
            auto result = opts.method == SearchMethod::Subplex ? opt::subplex(objective, x0, simplex)
                                                               : opt::nelder_mead(objective, x0, simplex);
            for (const auto& [e, c] : result.history) curve.emplace_back(e + offset, c);
            PulseParams out = unpack(result.x, from, space);
            out.sigma = std::abs(out.sigma);
            return std::make_tuple(out, result.f, result.evaluations, result.converged);
        };

        std::vector<std::pair<long, double>> curve;
        PulseParams found = start;
        double found_cost = 0.0;
        long evaluations = 0;
        bool converged = false;
        const bool warm = restart == 0 && opts.warm_start.has_value();
        if (opts.staged && opts.space.fourier && !warm) {
            SearchSpace coarse = opts.space;
            coarse.fourier = false;
            PulseParams plain = start;
            plain.a.setZero();
            plain.b.setZero();
            auto [p1, f1, n1, c1] = run(plain, coarse, opts.simplex.max_evaluations, curve, 0);
            (void)f1;
            (void)c1;
            p1.a = opts.fourier_start_scale * start.a;
            p1.b = opts.fourier_start_scale * start.b;
            const long left = std::max(1L, opts.simplex.max_evaluations - n1);
            std::tie(found, found_cost, evaluations, converged) = run(p1, opts.space, left, curve, n1);
            evaluations += n1;
        } else {
            std::tie(found, found_cost, evaluations, converged) =
                run(start, opts.space, opts.simplex.max_evaluations, curve, 0);
        }

        RestartRecord& rec = records[r];
        rec.index = restart;
        rec.seed = start.seed;
        rec.initial = start;
        rec.final_params = found;
        rec.search_cost = found_cost;
        rec.final_cost = search_spec.dt == spec.dt ? found_cost
                                                   : penalized_cost(spec, found, opts.e0_max);
        rec.evaluations = evaluations;
        rec.converged = converged;
        curves[r] = std::move(curve);
    });

    OptimizationResult out;
    std::size_t best = 0;
    for (std::size_t r = 0; r < records.size(); ++r) {
        out.evaluations_total += records[r].evaluations;
        if (records[r].final_cost < records[best].final_cost) best = r;
    }
    out.best_params = records[best].final_params;
    out.best_cost = records[best].final_cost;
    out.learning_curve = std::move(curves[best]);
    out.restarts = std::move(records);
    return out;
}

}  // namespace fmo
