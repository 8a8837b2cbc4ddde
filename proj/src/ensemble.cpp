#include "fmo/ensemble.hpp"

#include "fmo/parallel.hpp"
#include "fmo/rng.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>

namespace fmo {

std::vector<Orientation> disorder_orientations(const Orientation& center, double eta, int n,
                                               std::uint64_t seed) {
    if (!(eta >= 0.0)) throw ValidationError("disorder_orientations: eta must be >= 0");
    if (n < 0) throw ValidationError("disorder_orientations: negative sample count");
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<Orientation> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Rng rng(seed, "disorder", static_cast<std::uint64_t>(i));
        const double s1 = rng.uniform(0.0, two_pi);
        const double s2 = rng.uniform(0.0, two_pi);
        out.push_back({center.theta + eta * s1, center.phi + eta * s2, center.kind});
    }
    return out;
}

std::vector<Orientation> isotropic_orientations(int n, std::uint64_t seed) {
    return cone_orientations(Orientation::direction(0.0, 0.0), std::numbers::pi, n, seed);
}

std::vector<Orientation> dodecahedron_orientations() {
    const double g = std::numbers::phi;
    std::vector<Eigen::Vector3d> v;
    for (int sx : {-1, 1}) {
        for (int sy : {-1, 1}) {
            for (int sz : {-1, 1}) v.emplace_back(sx, sy, sz);
        }
    }
    for (int s1 : {-1, 1}) {
        for (int s2 : {-1, 1}) {
            v.emplace_back(0.0, s1 / g, s2 * g);
            v.emplace_back(s1 / g, s2 * g, 0.0);
            v.emplace_back(s1 * g, 0.0, s2 / g);
        }
    }
    std::vector<Orientation> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(Orientation::direction(x));
    return out;
}

std::vector<Orientation> cone_orientations(const Orientation& axis, double opening, int n,
                                           std::uint64_t seed) {
    if (!(opening > 0.0 && opening <= std::numbers::pi)) {
        throw ValidationError("cone_orientations: opening must lie in (0, pi]");
    }
    if (n < 0) throw ValidationError("cone_orientations: negative sample count");
    const Eigen::Vector3d a = axis.unit_vector();
    const Eigen::Matrix3d q = minimal_rotation(std::acos(std::clamp(a.z(), -1.0, 1.0)), std::atan2(a.y(), a.x()));
    const double cmin = std::cos(opening);
    std::vector<Orientation> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Rng rng(seed, "cone", static_cast<std::uint64_t>(i));
        // Uniform on the cap: cos(alpha) uniform on [cos(opening), 1].
        const double c = 1.0 - rng.uniform() * (1.0 - cmin);
        const double beta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        const Eigen::Vector3d local(s * std::cos(beta), s * std::sin(beta), c);
        out.push_back(Orientation::direction(q * local));
    }
    return out;
}

double angular_separation(const Orientation& a, const Orientation& b) {
    return std::acos(std::clamp(a.unit_vector().dot(b.unit_vector()), -1.0, 1.0));
}

std::vector<double> uniform_edges(int bins, double lo, double hi) {
    if (bins < 1 || !(hi > lo)) throw ValidationError("histogram: need bins >= 1 and hi > lo");
    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
    return edges;
}

EnsembleDistribution make_distribution(std::vector<double> values, const std::vector<double>& edges) {
    if (edges.size() < 2) throw ValidationError("histogram: need at least two edges");
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1])) throw ValidationError("histogram: edges must increase");
    }
    EnsembleDistribution d;
    d.values = std::move(values);
    d.edges = edges;
    const std::size_t bins = edges.size() - 1;
    d.densities.assign(bins, 0.0);
    if (d.values.empty()) return d;

    const double n = static_cast<double>(d.values.size());
    d.mean = std::accumulate(d.values.begin(), d.values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : d.values) ss += (v - d.mean) * (v - d.mean);
    d.stddev = d.values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

    std::vector<double> counts(bins, 0.0);
    for (double v : d.values) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), v);
        std::size_t bin = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
        counts[std::min(bin, bins - 1)] += 1.0;
    }
    for (std::size_t b = 0; b < bins; ++b) d.densities[b] = counts[b] / (n * (edges[b + 1] - edges[b]));
    return d;
}

EnsembleDistribution make_distribution(std::vector<double> values, int bins, double lo, double hi) {
    return make_distribution(std::move(values), uniform_edges(bins, lo, hi));
}

double mass_below(const EnsembleDistribution& d, double threshold) {
    if (d.values.empty()) return 0.0;
    const auto count = std::count_if(d.values.begin(), d.values.end(), [&](double v) { return v < threshold; });
    return static_cast<double>(count) / static_cast<double>(d.values.size());
}

std::vector<DensityMatrix> ensemble_states(const CostSpec& spec, const PulseParams& pulse,
                                           const std::vector<Orientation>& orientations, int threads) {
    if (orientations.empty()) throw ValidationError("ensemble: no orientations");
    const FmoModel model = spec.model.with_dephasing(spec.gamma);
    Integration opts;
    opts.dt = spec.dt;
    opts.t_end = spec.t_pulse;
    opts.sink = spec.sink;
    std::vector<DensityMatrix> states(orientations.size());
    parallel_for(orientations.size(), threads, [&](std::size_t i) {
        try {
            states[i] = propagate_final(spec.initial, model, DriveSpec::pulsed(pulse, orientations[i]), opts);
        } catch (const EnsembleError&) {
            throw;
        } catch (const std::exception& e) {
            throw EnsembleError(i, e.what());
        }
    });
    return states;
}

EnsembleDistribution ensemble_evaluate(const CostSpec& spec, const PulseParams& pulse,
                                       const std::vector<Orientation>& orientations, int threads) {
    const auto states = ensemble_states(spec, pulse, orientations, threads);
    std::vector<double> values(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) values[i] = evaluate_cost(spec.kind, states[i]);
    return make_distribution(std::move(values));
}

DensityMatrix mean_density(const std::vector<DensityMatrix>& states) {
    if (states.empty()) throw ValidationError("mean_density: no states");
    DensityMatrix sum = DensityMatrix::Zero();
    for (const auto& s : states) sum += s;  // fixed index order: independent of worker count
    return sum / static_cast<double>(states.size());
}

DensityMatrix ensemble_mean_density(const CostSpec& spec, const PulseParams& pulse,
                                    const std::vector<Orientation>& orientations, int threads) {
    return mean_density(ensemble_states(spec, pulse, orientations, threads));
}

Matrix9d modulus(const DensityMatrix& rho) { return rho.cwiseAbs(); }

}  // namespace fmo
