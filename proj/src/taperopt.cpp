#include "dino/taperopt.hpp"

#include "dino/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

namespace dino::taperopt
{
namespace
{
double *resolve_field(geometry::TaperSpec &spec, const std::string &name)
{
    if (name == "waveguide_half_width")
    {
        return &spec.waveguide_half_width_nm;
    }
    if (name == "periodic.a")
    {
        return &spec.periodic_cell.a_nm;
    }
    if (name == "periodic.A")
    {
        return &spec.periodic_cell.amplitude_nm;
    }
    if (name == "periodic.g")
    {
        return &spec.periodic_cell.gap_nm;
    }
    if (name.rfind("cells.", 0) == 0)
    {
        const std::string rest = name.substr(6);
        const auto dot = rest.find('.');
        if (dot != std::string::npos)
        {
            std::size_t index = 0;
            const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + dot, index);
            if (ec == std::errc() && ptr == rest.data() + dot && index < spec.cells.size())
            {
                const std::string field = rest.substr(dot + 1);
                if (field == "a")
                {
                    return &spec.cells[index].a_nm;
                }
                if (field == "x_plus")
                {
                    return &spec.cells[index].x_plus_nm;
                }
                if (field == "x_minus")
                {
                    return &spec.cells[index].x_minus_nm;
                }
            }
        }
    }
    return nullptr;
}
} // namespace

void OptimizationProblem::validate() const
{
    base.validate();
    if (free_parameters.empty())
    {
        throw ValidationError("optimization problem: no free parameters");
    }
    if (!(window_lo_THz < window_hi_THz))
    {
        throw ValidationError("optimization problem: objective window requires lo < hi");
    }
    std::set<std::string> seen;
    geometry::TaperSpec probe = base;
    for (const auto &param : free_parameters)
    {
        if (!(param.lo < param.hi))
        {
            throw ValidationError("optimization problem: parameter '" + param.name +
                                  "' requires lo < hi bounds");
        }
        if (!seen.insert(param.name).second)
        {
            throw ValidationError("optimization problem: duplicate parameter '" + param.name + "'");
        }
        if (resolve_field(probe, param.name) == nullptr)
        {
            throw ValidationError("optimization problem: unknown parameter '" + param.name + "'");
        }
        if (tie_last_x_plus_to_periodic && !base.cells.empty() &&
            param.name == "cells." + std::to_string(base.cells.size() - 1) + ".x_plus" &&
            seen.count("periodic.A") + seen.count("periodic.g") > 0)
        {
            throw ValidationError(
                "optimization problem: last x_plus is tied to the periodic cell and cannot also "
                "be free");
        }
    }
}

geometry::TaperSpec OptimizationProblem::apply(std::span<const double> values) const
{
    geometry::TaperSpec spec = base;
    for (std::size_t i = 0; i < free_parameters.size(); ++i)
    {
        *resolve_field(spec, free_parameters[i].name) = values[i];
    }
    if (tie_last_x_plus_to_periodic && !spec.cells.empty() && spec.n_periodic > 0)
    {
        spec.cells.back().x_plus_nm = spec.periodic_cell.max_half_width();
    }
    return spec;
}

std::vector<double> OptimizationProblem::current_values() const
{
    geometry::TaperSpec probe = base;
    std::vector<double> values;
    values.reserve(free_parameters.size());
    for (const auto &param : free_parameters)
    {
        values.push_back(*resolve_field(probe, param.name));
    }
    return values;
}

double mean_reflectance_objective(const geometry::TaperSpec &spec, double window_lo_THz,
                                  double window_hi_THz, double grid_step_THz,
                                  const scatter::EvaluationSettings &settings)
{
    const auto grid = scatter::make_grid(window_lo_THz, window_hi_THz, grid_step_THz);
    const auto spectrum = scatter::reflectance_spectrum(spec, grid, settings);
    return scatter::band_average(spectrum, window_lo_THz, window_hi_THz).mean;
}

OptimizationResult optimize(const OptimizationProblem &problem, const OptimizeOptions &options)
{
    problem.validate();
    const auto n_free = static_cast<int>(problem.free_parameters.size());
    if (options.budget < 10 * n_free)
    {
        throw ValidationError("optimize: budget must be at least 10 x free parameters (" +
                              std::to_string(10 * n_free) + ")");
    }

    optim::Bounds bounds;
    for (const auto &param : problem.free_parameters)
    {
        bounds.lo.push_back(param.lo);
        bounds.hi.push_back(param.hi);
    }

    optim::Options opt;
    opt.budget = options.budget;
    opt.seed = options.seed;
    opt.restarts = options.restarts;
    if (options.start_from_base)
    {
        std::vector<double> start = problem.current_values();
        bool inside = true;
        for (std::size_t d = 0; d < start.size(); ++d)
        {
            inside = inside && start[d] >= bounds.lo[d] && start[d] <= bounds.hi[d];
        }
        if (inside)
        {
            opt.start = std::move(start);
        }
    }

    // Infeasible candidates score -inf; the run fails only when nothing was
    // feasible.
    const auto objective = [&](std::span<const double> values) {
        try
        {
            const geometry::TaperSpec candidate = problem.apply(values);
            return mean_reflectance_objective(candidate, problem.window_lo_THz,
                                              problem.window_hi_THz, problem.grid_step_THz,
                                              problem.settings);
        }
        catch (const ValidationError &)
        {
            return -std::numeric_limits<double>::infinity();
        }
    };

    const optim::Result raw = optim::maximize(objective, bounds, opt);
    if (raw.best_x.empty() || !std::isfinite(raw.best_f))
    {
        std::string names;
        for (const auto &param : problem.free_parameters)
        {
            names += names.empty() ? param.name : (", " + param.name);
        }
        throw ValidationError("optimize: every start inside the bounds of {" + names +
                              "} produced an infeasible geometry");
    }

    OptimizationResult result;
    result.best = problem.apply(raw.best_x);
    result.best_objective = raw.best_f;
    result.trace = raw.trace;
    result.evaluations = raw.evaluations;
    return result;
}

} // namespace dino::taperopt
