// State-preparation and probe costs, and multi-restart CRAB optimization.

#pragma once

#include "fmo/model.hpp"
#include "fmo/orientation.hpp"
#include "fmo/propagator.hpp"
#include "fmo/pulse.hpp"
#include "fmo/simplex.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fmo {

enum class CostKind {
    Bright,  // eps_B = 1 - <+|rho|+>
    Dark,    // eps_D = 1 - rho_55 - rho_66 - rho_77
    Probe,   // eps_P = rho_33
};

double eps_b(const DensityMatrix& rho);
double eps_d(const DensityMatrix& rho);
double eps_p(const DensityMatrix& rho);
double evaluate_cost(CostKind kind, const DensityMatrix& rho);

std::string to_string(CostKind kind);
CostKind cost_kind_from_string(const std::string& name);

// Propagation step inside pulse searches (ps). Costs agree with kDriveStep to ~1e-10.
inline constexpr double kSearchStep = 5e-4;

struct CostSpec {
    CostKind kind{CostKind::Bright};
    FmoModel model{build_fmo_model()};
    double gamma{1.0};
    double t_pulse{kDefaultPumpDuration};
    std::vector<Orientation> orientations{Orientation{}};
    DensityMatrix initial{ground_state()};
    bool sink{false};
    double dt{kDriveStep};

    static CostSpec pump(CostKind kind, double gamma = 1.0);
    static CostSpec probe(double gamma = 1.0);
};

// Mean cost of a pulse over spec.orientations after propagating spec.initial to t_pulse.
double pulse_cost(const CostSpec& spec, const PulseParams& pulse);

// Which pulse parameters the search may move; the rest stay at the template's values.
struct SearchSpace {
    bool polarization{true};  // dtheta, dphi
    bool carrier{true};       // omega_l
    bool envelope{true};      // t0, sigma
    bool fourier{true};       // A_k, B_k

    Eigen::Index dimension(int harmonics) const;
};

Eigen::VectorXd pack(const PulseParams& p, const SearchSpace& space);
PulseParams unpack(const Eigen::VectorXd& x, const PulseParams& base, const SearchSpace& space);
// Simplex step per coordinate of the packed vector.
Eigen::VectorXd search_steps(const PulseParams& base, const SearchSpace& space);

enum class SearchMethod { Subplex, NelderMead };

struct OptimizeOptions {
    int restarts{64};
    std::uint64_t seed{1};
    double e0_max{kDefaultFieldAmplitude};
    int harmonics{kDefaultHarmonics};
    bool shared_r{false};
    SearchSpace space{};
    SearchMethod method{SearchMethod::Subplex};
    opt::SimplexOptions simplex{};
    int threads{1};
    // Step used inside the search; final costs are re-evaluated at spec.dt.
    double search_dt{kSearchStep};
    // Two-stage restarts: first the search space without the Fourier series (A = B = 0),
    // then the full space from there with the drawn A_k, B_k scaled by fourier_start_scale.
    // Ignored when the search space has no Fourier part.
    bool staged{true};
    double fourier_start_scale{0.0};
    // Restart 0 starts here instead of at a random draw (frequencies included).
    std::optional<PulseParams> warm_start;
    // Fixed values for parameters outside the search space (e.g. omega_l = 0 for a
    // resonant probe). Random draws are used for any parameter inside it.
    std::optional<PulseParams> fixed;
};

struct RestartRecord {
    int index{0};
    std::uint64_t seed{0};
    PulseParams initial;
    PulseParams final_params;
    double final_cost{0.0};   // at CostSpec::dt
    double search_cost{0.0};  // at the search step
    long evaluations{0};
    bool converged{false};
};

struct OptimizationResult {
    PulseParams best_params;
    double best_cost{1.0};
    std::vector<RestartRecord> restarts;
    long evaluations_total{0};
    std::vector<std::pair<long, double>> learning_curve;  // best restart
};

// Penalized objective used by the search: cost + 10 * total violation magnitude.
double penalized_cost(const CostSpec& spec, const PulseParams& pulse, double e0_max);

// Random initial pulse for a restart: frequencies frozen from the restart seed,
// angles, carrier, envelope and Fourier coefficients drawn from fixed ranges.
PulseParams random_initial_pulse(const CostSpec& spec, const OptimizeOptions& opts, int restart);

OptimizationResult optimize_pulse(const CostSpec& spec, const OptimizeOptions& opts);

// Angle wrapped into [0, 2 pi).
double wrap_angle(double a);

}  // namespace fmo
