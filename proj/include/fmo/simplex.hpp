// Derivative-free minimizers: Nelder-Mead and the Subplex variant.
//
// Subplex (T. Rowan) runs Nelder-Mead cyclically on low-dimensional subspaces of
// the coordinates, ordered by how far each coordinate moved in the last cycle,
// and adapts per-coordinate step sizes between cycles.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

namespace fmo::opt {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct SimplexOptions {
    double ftol{1e-6};           // cost spread (plain only)
    double xtol{1e-6};           // simplex diameter (plain) / relative step (subplex)
    long max_evaluations{20000};
    std::optional<double> target;  // stop as soon as a cost <= target is seen
    double default_step{0.1};
    Eigen::VectorXd initial_step;  // per-coordinate; default_step where empty

    // Subplex only.
    int min_subspace{2};
    int max_subspace{5};
    double psi{0.25};    // inner simplex reduction factor
    double omega{0.1};   // step reduction bound
};

template <typename Scalar>
struct SimplexResult {
    Vector<Scalar> x;
    Scalar f{};
    long evaluations{0};
    bool converged{false};
    std::vector<std::pair<long, Scalar>> history;  // (evaluation, best cost) at each improvement
};

namespace detail {

template <typename Scalar, typename F>
class CountedCost {
public:
    CountedCost(F& f, const SimplexOptions& opts) : f_(f), opts_(opts) {}

    Scalar operator()(const Vector<Scalar>& x) {
        ++evaluations;
        Scalar v = f_(x);
        if (!std::isfinite(static_cast<double>(v))) v = std::numeric_limits<Scalar>::max();
        if (evaluations == 1 || v < best_f) {
            best_f = v;
            best_x = x;
            history.emplace_back(evaluations, v);
        }
        return v;
    }

    bool exhausted() const { return evaluations >= opts_.max_evaluations || hit_target(); }
    bool hit_target() const {
        return opts_.target && evaluations > 0 && static_cast<double>(best_f) <= *opts_.target;
    }

    long evaluations{0};
    Scalar best_f{};
    Vector<Scalar> best_x;
    std::vector<std::pair<long, Scalar>> history;

private:
    F& f_;
    const SimplexOptions& opts_;
};

enum class StopRule { Absolute, Relative };

// Nelder-Mead on the coordinates `idx` of `x` (others frozen). With StopRule::Relative
// the search ends once the simplex size drops below psi times its initial size.
template <typename Scalar, typename Counted>
std::pair<Vector<Scalar>, Scalar> simplex_search(Counted& cost, Vector<Scalar> x, Scalar fx,
                                                 const std::vector<int>& idx,
                                                 const Vector<Scalar>& step, StopRule rule,
                                                 const SimplexOptions& opts, bool& converged) {
    const int k = static_cast<int>(idx.size());
    using Point = Vector<Scalar>;
    auto embed = [&](const Point& y) {
        Vector<Scalar> full = x;
        for (int i = 0; i < k; ++i) full(idx[static_cast<std::size_t>(i)]) = y(i);
        return full;
    };

    std::vector<Point> v(static_cast<std::size_t>(k + 1), Point(k));
    std::vector<Scalar> fv(static_cast<std::size_t>(k + 1), std::numeric_limits<Scalar>::max());
    for (int i = 0; i < k; ++i) v[0](i) = x(idx[static_cast<std::size_t>(i)]);
    fv[0] = fx;
    for (int j = 1; j <= k; ++j) {
        v[static_cast<std::size_t>(j)] = v[0];
        v[static_cast<std::size_t>(j)](j - 1) += step(idx[static_cast<std::size_t>(j - 1)]);
        if (cost.exhausted()) break;
        fv[static_cast<std::size_t>(j)] = cost(embed(v[static_cast<std::size_t>(j)]));
    }

    auto size_of = [&](std::size_t best) {
        Scalar s = 0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (j != best) s = std::max(s, (v[j] - v[best]).template lpNorm<1>());
        }
        return s;
    };
    auto diameter = [&](std::size_t best) {
        Scalar s = 0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (j != best) s = std::max(s, (v[j] - v[best]).template lpNorm<Eigen::Infinity>());
        }
        return s;
    };

    std::vector<std::size_t> order(v.size());
    auto sort_vertices = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };
    sort_vertices();
    const Scalar initial_size = size_of(order[0]);

    constexpr Scalar alpha = 1.0, gamma = 2.0, beta = 0.5, delta = 0.5;
    converged = false;
    while (!cost.exhausted()) {
        sort_vertices();
        const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];

        if (rule == StopRule::Absolute) {
            const bool flat = static_cast<double>(fv[worst] - fv[best]) < opts.ftol;
            const bool small = static_cast<double>(diameter(best)) < opts.xtol;
            if (flat || small) {
                converged = true;
                break;
            }
        } else if (size_of(best) <= opts.psi * initial_size) {
            converged = true;
            break;
        }

        Point centroid = Point::Zero(k);
        for (std::size_t j : order) {
            if (j != worst) centroid += v[j];
        }
        centroid /= static_cast<Scalar>(k);

        const Point xr = centroid + alpha * (centroid - v[worst]);
        const Scalar fr = cost(embed(xr));
        if (fr < fv[best]) {
            const Point xe = centroid + gamma * (xr - centroid);
            const Scalar fe = cost.exhausted() ? fr : cost(embed(xe));
            if (fe < fr) {
                v[worst] = xe;
                fv[worst] = fe;
            } else {
                v[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            v[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        // Contraction: outside if the reflected point beats the worst, else inside.
        const bool outside = fr < fv[worst];
        const Point xc = outside ? Point(centroid + beta * (xr - centroid))
                                 : Point(centroid + beta * (v[worst] - centroid));
        const Scalar fc = cost(embed(xc));
        if (fc < std::min(fr, fv[worst])) {
            v[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        if (outside && fr < fv[worst]) {
            v[worst] = xr;
            fv[worst] = fr;
        }
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (j == best || cost.exhausted()) continue;
            v[j] = v[best] + delta * (v[j] - v[best]);
            fv[j] = cost(embed(v[j]));
        }
    }
    sort_vertices();
    return {embed(v[order.front()]), fv[order.front()]};
}

inline std::vector<std::vector<int>> partition_subspaces(const Eigen::VectorXd& movement, int nsmin,
                                                         int nsmax) {
    const int n = static_cast<int>(movement.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(movement(a)) > std::abs(movement(b));
    });

    std::vector<std::vector<int>> out;
    int start = 0;
    while (start < n) {
        const int remaining = n - start;
        int take = remaining;
        if (remaining > nsmax) {
            const int hi = std::min(nsmax, remaining - nsmin);
            if (hi < nsmin) {
                take = nsmax;
            } else {
                double best_goodness = -std::numeric_limits<double>::infinity();
                for (int kk = nsmin; kk <= hi; ++kk) {
                    double head = 0, tail = 0;
                    for (int i = 0; i < remaining; ++i) {
                        const double m = std::abs(movement(order[static_cast<std::size_t>(start + i)]));
                        (i < kk ? head : tail) += m;
                    }
                    const double goodness = head / kk - tail / (remaining - kk);
                    if (goodness > best_goodness) {
                        best_goodness = goodness;
                        take = kk;
                    }
                }
            }
        }
        out.emplace_back(order.begin() + start, order.begin() + start + take);
        start += take;
    }
    return out;
}

template <typename Scalar>
Vector<Scalar> initial_steps(const SimplexOptions& opts, Eigen::Index n) {
    if (opts.initial_step.size() == n) return opts.initial_step.template cast<Scalar>();
    return Vector<Scalar>::Constant(n, static_cast<Scalar>(opts.default_step));
}

}  // namespace detail

// Plain Nelder-Mead over all coordinates. Stops when the cost spread drops below
// ftol, the simplex diameter below xtol, or the budget runs out (converged = false).
template <typename Scalar = double, typename F>
SimplexResult<Scalar> nelder_mead(F&& f, const Vector<Scalar>& x0, const SimplexOptions& opts = {}) {
    detail::CountedCost<Scalar, std::remove_reference_t<F>> cost(f, opts);
    const Scalar f0 = cost(x0);
    std::vector<int> all(static_cast<std::size_t>(x0.size()));
    std::iota(all.begin(), all.end(), 0);
    bool converged = false;
    detail::simplex_search<Scalar>(cost, x0, f0, all, detail::initial_steps<Scalar>(opts, x0.size()),
                                   detail::StopRule::Absolute, opts, converged);
    return {cost.best_x, cost.best_f, cost.evaluations, converged || cost.hit_target(),
            std::move(cost.history)};
}

// Subplex: Nelder-Mead restarted cyclically on subspaces of min_subspace..max_subspace
// coordinates from the current best point.
template <typename Scalar = double, typename F>
SimplexResult<Scalar> subplex(F&& f, const Vector<Scalar>& x0, const SimplexOptions& opts = {}) {
    detail::CountedCost<Scalar, std::remove_reference_t<F>> cost(f, opts);
    const Eigen::Index n = x0.size();
    const int nsmax = std::min<int>(opts.max_subspace, static_cast<int>(n));
    const int nsmin = std::min<int>(std::max(1, opts.min_subspace), nsmax);

    Vector<Scalar> x = x0;
    Scalar fx = cost(x);
    Vector<Scalar> step = detail::initial_steps<Scalar>(opts, n);
    Eigen::VectorXd movement = step.template cast<double>();
    bool converged = false;

    while (!cost.exhausted()) {
        const Vector<Scalar> x_prev = x;
        const auto subspaces = detail::partition_subspaces(movement, nsmin, nsmax);
        for (const auto& idx : subspaces) {
            if (cost.exhausted()) break;
            bool inner = false;
            auto [xs, fs] = detail::simplex_search<Scalar>(cost, x, fx, idx, step,
                                                           detail::StopRule::Relative, opts, inner);
            if (fs <= fx) {
                x = std::move(xs);
                fx = fs;
            }
        }
        if (cost.exhausted()) break;

        const Vector<Scalar> dx = x - x_prev;
        movement = dx.template cast<double>();
        Scalar scale = static_cast<Scalar>(opts.psi);
        if (subspaces.size() > 1) {
            const Scalar ratio = dx.template lpNorm<1>() / step.template lpNorm<1>();
            scale = std::clamp(ratio, static_cast<Scalar>(opts.omega), static_cast<Scalar>(1.0 / opts.omega));
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const Scalar mag = std::abs(step(i)) * scale;
            step(i) = dx(i) > 0 ? mag : (dx(i) < 0 ? -mag : -std::copysign(mag, step(i)));
        }

        double rel = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double denom = std::max(1.0, std::abs(static_cast<double>(x(i))));
            const double moved = std::max(std::abs(static_cast<double>(dx(i))),
                                          std::abs(static_cast<double>(step(i))) * opts.psi);
            rel = std::max(rel, moved / denom);
        }
        // A cycle without progress only shrinks the steps; the step test decides.
        if (rel <= opts.xtol) {
            converged = true;
            break;
        }
    }
    return {cost.best_x, cost.best_f, cost.evaluations, converged || cost.hit_target(),
            std::move(cost.history)};
}

}  // namespace fmo::opt
