#ifndef DINO_SIMPLEX_HPP
#define DINO_SIMPLEX_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace dino::optim
{
struct Bounds
{
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t size() const { return lo.size(); }
    void validate() const;
};

struct Options
{
    int budget = 200;          // total objective evaluations across restarts
    std::uint64_t seed = 0;
    int restarts = 4;          // latin-hypercube restarts (the first may use `start`)
    double xtol_rel = 1e-10;
    double ftol_abs = 1e-13;
    std::optional<std::vector<double>> start;
};

struct TracePoint
{
    int evaluation = 0;    // 1-based evaluation count when the incumbent improved
    double objective = 0.0;
};

struct Result
{
    std::vector<double> best_x;
    double best_f = 0.0;
    std::vector<TracePoint> trace; // incumbent improvements, nondecreasing objective
    int evaluations = 0;
};

// Derivative-free maximization with Nelder-Mead simplex descent inside a box,
// restarted from latin-hypercube samples. Deterministic for a fixed seed.
Result maximize(const std::function<double(std::span<const double>)> &objective,
                const Bounds &bounds, const Options &options);

} // namespace dino::optim

#endif // DINO_SIMPLEX_HPP
