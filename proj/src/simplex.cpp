#include "dino/simplex.hpp"

#include "dino/errors.hpp"
#include "dino/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dino::optim
{
void Bounds::validate() const
{
    if (lo.empty() || lo.size() != hi.size())
    {
        throw ValidationError("bounds: lo/hi must be nonempty and of equal length");
    }
    for (std::size_t i = 0; i < lo.size(); ++i)
    {
        if (!(lo[i] < hi[i]))
        {
            throw ValidationError("bounds: parameter " + std::to_string(i) +
                                  " requires lo < hi");
        }
    }
}

namespace
{
struct Incumbent
{
    std::vector<double> x;
    double f = -std::numeric_limits<double>::infinity();
    std::vector<TracePoint> trace;
    int evaluations = 0;

    double evaluate(const std::function<double(std::span<const double>)> &objective,
                    const std::vector<double> &point)
    {
        const double value = objective(point);
        ++evaluations;
        if (value > f)
        {
            f = value;
            x = point;
            trace.push_back({evaluations, value});
        }
        return value;
    }
};

std::vector<double> clamp_to_box(std::vector<double> x, const Bounds &bounds)
{
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        x[i] = std::clamp(x[i], bounds.lo[i], bounds.hi[i]);
    }
    return x;
}

// One latin-hypercube sample batch of `count` points in the box.
std::vector<std::vector<double>> latin_hypercube(const Bounds &bounds, int count,
                                                 rng::Engine &engine)
{
    const std::size_t dim = bounds.size();
    std::vector<std::vector<double>> points(static_cast<std::size_t>(count),
                                            std::vector<double>(dim, 0.0));
    std::vector<std::size_t> perm(static_cast<std::size_t>(count));
    for (std::size_t d = 0; d < dim; ++d)
    {
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = perm.size(); i > 1; --i)
        {
            const auto j = static_cast<std::size_t>(engine.uniform() * static_cast<double>(i));
            std::swap(perm[i - 1], perm[std::min(j, i - 1)]);
        }
        for (int p = 0; p < count; ++p)
        {
            const double u = (static_cast<double>(perm[static_cast<std::size_t>(p)]) +
                              engine.uniform()) /
                             static_cast<double>(count);
            points[static_cast<std::size_t>(p)][d] =
                bounds.lo[d] + u * (bounds.hi[d] - bounds.lo[d]);
        }
    }
    return points;
}

// Nelder-Mead (maximization) from `start`, spending at most `budget`
// evaluations; proposals are clamped to the box.
void nelder_mead(const std::function<double(std::span<const double>)> &objective,
                 const Bounds &bounds, const std::vector<double> &start, int budget,
                 double xtol_rel, double ftol_abs, Incumbent &incumbent)
{
    const std::size_t dim = bounds.size();
    if (budget <= 0)
    {
        return;
    }

    struct Vertex
    {
        std::vector<double> x;
        double f = 0.0;
    };
    std::vector<Vertex> simplex;
    simplex.reserve(dim + 1);
    simplex.push_back({start, incumbent.evaluate(objective, start)});
    int remaining = budget - 1;
    for (std::size_t d = 0; d < dim && remaining > 0; ++d)
    {
        std::vector<double> v = start;
        const double span = bounds.hi[d] - bounds.lo[d];
        double step = 0.05 * span;
        if (v[d] + step > bounds.hi[d])
        {
            step = -step;
        }
        v[d] = std::clamp(v[d] + step, bounds.lo[d], bounds.hi[d]);
        simplex.push_back({v, incumbent.evaluate(objective, v)});
        --remaining;
    }
    if (simplex.size() < dim + 1)
    {
        return;
    }

    auto order = [&]() {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const Vertex &a, const Vertex &b) { return a.f > b.f; });
    };
    order();

    while (remaining > 0)
    {
        // Convergence: simplex collapsed in both objective and coordinates.
        const double f_spread = std::abs(simplex.front().f - simplex.back().f);
        double x_spread = 0.0;
        for (std::size_t d = 0; d < dim; ++d)
        {
            double lo = simplex.front().x[d];
            double hi = lo;
            for (const auto &v : simplex)
            {
                lo = std::min(lo, v.x[d]);
                hi = std::max(hi, v.x[d]);
            }
            const double scale = std::max(1.0, std::abs(simplex.front().x[d]));
            x_spread = std::max(x_spread, (hi - lo) / scale);
        }
        if (f_spread < ftol_abs && x_spread < xtol_rel)
        {
            break;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t v = 0; v < simplex.size() - 1; ++v)
        {
            for (std::size_t d = 0; d < dim; ++d)
            {
                centroid[d] += simplex[v].x[d];
            }
        }
        for (double &c : centroid)
        {
            c /= static_cast<double>(dim);
        }
        const Vertex &worst = simplex.back();

        auto blend = [&](double alpha) {
            std::vector<double> x(dim);
            for (std::size_t d = 0; d < dim; ++d)
            {
                x[d] = centroid[d] + alpha * (centroid[d] - worst.x[d]);
            }
            return clamp_to_box(std::move(x), bounds);
        };

        const std::vector<double> reflected = blend(1.0);
        const double f_reflected = incumbent.evaluate(objective, reflected);
        --remaining;

        if (f_reflected > simplex.front().f && remaining > 0)
        {
            const std::vector<double> expanded = blend(2.0);
            const double f_expanded = incumbent.evaluate(objective, expanded);
            --remaining;
            simplex.back() = f_expanded > f_reflected ? Vertex{expanded, f_expanded}
                                                      : Vertex{reflected, f_reflected};
        }
        else if (f_reflected > simplex[simplex.size() - 2].f)
        {
            simplex.back() = {reflected, f_reflected};
        }
        else if (remaining > 0)
        {
            const std::vector<double> contracted = blend(f_reflected > worst.f ? 0.5 : -0.5);
            const double f_contracted = incumbent.evaluate(objective, contracted);
            --remaining;
            if (f_contracted > std::max(f_reflected, worst.f))
            {
                simplex.back() = {contracted, f_contracted};
            }
            else
            {
                // Shrink toward the best vertex.
                for (std::size_t v = 1; v < simplex.size() && remaining > 0; ++v)
                {
                    for (std::size_t d = 0; d < dim; ++d)
                    {
                        simplex[v].x[d] = 0.5 * (simplex[v].x[d] + simplex.front().x[d]);
                    }
                    simplex[v].f = incumbent.evaluate(objective, simplex[v].x);
                    --remaining;
                }
            }
        }
        order();
    }
}
} // namespace

Result maximize(const std::function<double(std::span<const double>)> &objective,
                const Bounds &bounds, const Options &options)
{
    bounds.validate();
    if (options.budget < 1)
    {
        throw ValidationError("optimizer: budget must be positive");
    }
    if (options.start)
    {
        if (options.start->size() != bounds.size())
        {
            throw ValidationError("optimizer: start point dimension mismatch");
        }
        for (std::size_t d = 0; d < bounds.size(); ++d)
        {
            if ((*options.start)[d] < bounds.lo[d] || (*options.start)[d] > bounds.hi[d])
            {
                throw ValidationError("optimizer: start point violates bounds of parameter " +
                                      std::to_string(d));
            }
        }
    }

    const int restarts = std::max(1, options.restarts);
    rng::Engine engine(rng::derive_seed(options.seed, 0x5157ULL));
    std::vector<std::vector<double>> starts = latin_hypercube(bounds, restarts, engine);
    if (options.start)
    {
        starts.front() = *options.start;
    }

    Incumbent incumbent;
    const int per_restart = std::max(1, options.budget / restarts);
    for (int r = 0; r < restarts; ++r)
    {
        const int budget = (r + 1 == restarts)
                               ? options.budget - incumbent.evaluations
                               : std::min(per_restart, options.budget - incumbent.evaluations);
        if (budget <= 0)
        {
            break;
        }
        nelder_mead(objective, bounds, starts[static_cast<std::size_t>(r)], budget,
                    options.xtol_rel, options.ftol_abs, incumbent);
    }

    Result result;
    result.best_x = incumbent.x;
    result.best_f = incumbent.f;
    result.trace = std::move(incumbent.trace);
    result.evaluations = incumbent.evaluations;
    return result;
}

} // namespace dino::optim
