#ifndef DINO_RNG_HPP
#define DINO_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace dino::rng
{
// splitmix64 step; used to derive independent per-batch seeds so that shot
// batches can be evaluated in any order (or concurrently) with identical
// results.
inline std::uint64_t splitmix64(std::uint64_t &state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t s = seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
    splitmix64(s);
    return splitmix64(s);
}

class Engine
{
public:
    explicit Engine(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform()
    {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Knuth's multiplication method. Our Poisson means are a few counts at
    // most, so the expected cost per draw is small.
    std::uint64_t poisson(double mean)
    {
        if (mean <= 0.0)
        {
            return 0;
        }
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do
        {
            ++k;
            p *= uniform();
        } while (p > limit);
        return k - 1;
    }

    // Exponential with rate gamma, truncated to [0, t_max].
    double truncated_exponential(double gamma, double t_max)
    {
        if (gamma <= 0.0)
        {
            return uniform() * t_max;
        }
        const double mass = -std::expm1(-gamma * t_max); // 1 - exp(-gamma t_max)
        return -std::log1p(-uniform() * mass) / gamma;
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

} // namespace dino::rng

#endif // DINO_RNG_HPP
