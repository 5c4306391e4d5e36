#ifndef DINO_TESTS_ORACLES_HPP
#define DINO_TESTS_ORACLES_HPP

// Test-only reference implementations, kept independent of the library code
// paths they are used to check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracles
{
// Composite Simpson rule with n (even) intervals.
inline double simpson(const std::function<double(double)> &f, double a, double b, int n = 2000)
{
    if (n % 2 != 0)
    {
        ++n;
    }
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i)
    {
        sum += f(a + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
    }
    return sum * h / 3.0;
}

// Trapezoid over uniformly spaced samples.
inline double trapezoid(const std::vector<double> &y, double spacing)
{
    double sum = 0.0;
    for (std::size_t i = 1; i < y.size(); ++i)
    {
        sum += 0.5 * (y[i - 1] + y[i]) * spacing;
    }
    return sum;
}

// Quarter-wave Bragg stack reflectance at the design frequency, vacuum leads.
inline double bragg_reflectance(double n1, double n2, int periods)
{
    const double t = std::tanh(periods * std::log(n1 / n2));
    return t * t;
}

inline double population_mean(const std::vector<double> &v)
{
    double sum = 0.0;
    for (const double x : v)
    {
        sum += x;
    }
    return sum / static_cast<double>(v.size());
}

inline double population_std(const std::vector<double> &v)
{
    const double mean = population_mean(v);
    double var = 0.0;
    for (const double x : v)
    {
        var += (x - mean) * (x - mean);
    }
    return std::sqrt(var / static_cast<double>(v.size()));
}

inline double poisson_pmf(int k, double mean)
{
    if (mean <= 0.0)
    {
        return k == 0 ? 1.0 : 0.0;
    }
    return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

// Deterministic Gaussian noise source for synthetic fit data.
class NoiseSource
{
public:
    explicit NoiseSource(std::uint64_t seed) : gen_(seed) {}
    double gaussian(double sigma) { return sigma * normal_(gen_); }
    double uniform() { return uniform_(gen_); }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace oracles

#endif // DINO_TESTS_ORACLES_HPP
