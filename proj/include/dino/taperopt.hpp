#ifndef DINO_TAPEROPT_HPP
#define DINO_TAPEROPT_HPP

#include "dino/geometry.hpp"
#include "dino/scatter.hpp"
#include "dino/simplex.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dino::taperopt
{
// A free parameter addressed by name into a TaperSpec:
//   "cells.<i>.a", "cells.<i>.x_plus", "cells.<i>.x_minus",
//   "periodic.a", "periodic.A", "periodic.g", "waveguide_half_width"
struct FreeParameter
{
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
};

struct OptimizationProblem
{
    geometry::TaperSpec base;
    std::vector<FreeParameter> free_parameters;
    double window_lo_THz = 290.0;
    double window_hi_THz = 330.0;
    double grid_step_THz = 1.0;
    scatter::EvaluationSettings settings;

    // Keep the taper-periodic junction continuous when periodic.A or
    // periodic.g vary: the last cell's x_plus follows 2A+g.
    bool tie_last_x_plus_to_periodic = true;

    void validate() const;
    geometry::TaperSpec apply(std::span<const double> values) const;
    std::vector<double> current_values() const;
};

double mean_reflectance_objective(const geometry::TaperSpec &spec, double window_lo_THz,
                                  double window_hi_THz, double grid_step_THz,
                                  const scatter::EvaluationSettings &settings = {});

struct OptimizationResult
{
    geometry::TaperSpec best;
    double best_objective = 0.0;
    std::vector<optim::TracePoint> trace;
    int evaluations = 0;
};

struct OptimizeOptions
{
    int budget = 0; // must be >= 10 x number of free parameters
    std::uint64_t seed = 0;
    int restarts = 4;
    bool start_from_base = true;
};

OptimizationResult optimize(const OptimizationProblem &problem, const OptimizeOptions &options);

} // namespace dino::taperopt

#endif // DINO_TAPEROPT_HPP
