#include "dino/readout.hpp"

#include "dino/errors.hpp"
#include "dino/quadrature.hpp"
#include "dino/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dino::readout
{
std::string to_string(Convention convention)
{
    return convention == Convention::KernelNormalized ? "kernel_normalized" : "decay_density";
}

Convention convention_from_string(const std::string &name)
{
    if (name == "kernel_normalized")
    {
        return Convention::KernelNormalized;
    }
    if (name == "decay_density")
    {
        return Convention::DecayDensity;
    }
    throw ValidationError("unknown normalization convention '" + name +
                          "' (expected kernel_normalized or decay_density)");
}

void ReadoutModel::validate() const
{
    if (lambda_b_cps < 0.0 || lambda_d_cps < 0.0)
    {
        throw ValidationError("readout model: count rates must be nonnegative");
    }
    if (lambda_b_cps < lambda_d_cps)
    {
        throw ValidationError("readout model: requires lambda_b >= lambda_d");
    }
    if (std::abs(a_prime + a_double_prime - 1.0) > 1e-9)
    {
        throw ValidationError("readout model: weights must satisfy a' + a'' = 1");
    }
    if (a_prime < 0.0 || a_double_prime < 0.0)
    {
        throw ValidationError("readout model: weights must be nonnegative");
    }
    if (gamma_prime_per_us < 0.0 || gamma_double_prime_per_us < 0.0)
    {
        throw ValidationError("readout model: ISC rates must be nonnegative");
    }
    if (!(window_us > 0.0))
    {
        throw ValidationError("readout model: window T must be positive");
    }
}

ReadoutModel ReadoutModel::si_table1()
{
    ReadoutModel model;
    model.lambda_b_cps = 105000.0;
    model.lambda_d_cps = 490.0;
    model.a_prime = 0.768;
    model.a_double_prime = 0.232;
    model.gamma_prime_per_us = 1.0 / 0.48;
    model.gamma_double_prime_per_us = 1.0 / 3.15;
    model.window_us = 10.0;
    model.convention = Convention::KernelNormalized;
    return model;
}

double poisson_pmf(int k, double mean)
{
    if (k < 0)
    {
        return 0.0;
    }
    if (mean <= 0.0)
    {
        return k == 0 ? 1.0 : 0.0;
    }
    return std::exp(static_cast<double>(k) * std::log(mean) - mean -
                    std::lgamma(static_cast<double>(k) + 1.0));
}

double PhotonPmf::mean() const
{
    double m = 0.0;
    for (std::size_t k = 1; k < p.size(); ++k)
    {
        m += static_cast<double>(k) * p[k];
    }
    return m;
}

double PhotonPmf::tail_above(int threshold) const
{
    double head = 0.0;
    const int cut = std::min(threshold, k_max());
    for (int k = 0; k <= cut; ++k)
    {
        head += p[static_cast<std::size_t>(k)];
    }
    return std::max(0.0, 1.0 - truncation_bound - head);
}

namespace
{
// Smallest k_max such that the Poisson(mean) tail beyond it is < 1e-12,
// floored at 64 which is ample for the paper's sub-3-count means.
int k_max_for_mean(double mean)
{
    constexpr int kFloor = 64;
    if (mean <= 0.0)
    {
        return kFloor;
    }
    int k = static_cast<int>(mean) + 1;
    double cdf = 0.0;
    for (int i = 0; i <= k; ++i)
    {
        cdf += poisson_pmf(i, mean);
    }
    while (1.0 - cdf > 1e-12 && k < 4096)
    {
        ++k;
        cdf += poisson_pmf(k, mean);
    }
    return std::max(kFloor, k);
}

void check_normalized(PhotonPmf &pmf, const char *what)
{
    double sum = 0.0;
    for (const double v : pmf.p)
    {
        if (v < 0.0)
        {
            throw NumericalError(std::string(what) + ": negative probability entry");
        }
        sum += v;
    }
    pmf.truncation_bound = 1.0 - sum;
    if (std::abs(pmf.truncation_bound) > 1e-6)
    {
        std::ostringstream oss;
        oss << what << ": pmf sums to " << sum << ", outside the 1e-6 normalization tolerance";
        throw NumericalError(oss.str());
    }
}

struct Kernel
{
    double weight_fast = 0.0;  // multiplies e^{-g' t}
    double weight_slow = 0.0;  // multiplies e^{-g'' t}
    double atom_at_T = 0.0;    // point mass at t = T (DecayDensity survival)
    double normalization = 1.0;
};

Kernel decay_kernel(const ReadoutModel &model)
{
    Kernel kernel;
    const double T = model.window_us;
    const double gp = model.gamma_prime_per_us;
    const double gpp = model.gamma_double_prime_per_us;
    if (model.convention == Convention::KernelNormalized)
    {
        kernel.weight_fast = model.a_prime;
        kernel.weight_slow = model.a_double_prime;
        const auto kernel_mass = [T](double a, double g) {
            if (a == 0.0)
            {
                return 0.0;
            }
            if (g <= 0.0)
            {
                return a * T;
            }
            return a * (-std::expm1(-g * T)) / g;
        };
        kernel.normalization = kernel_mass(model.a_prime, gp) +
                               kernel_mass(model.a_double_prime, gpp);
    }
    else
    {
        kernel.weight_fast = model.a_prime * gp;
        kernel.weight_slow = model.a_double_prime * gpp;
        kernel.atom_at_T = model.a_prime * std::exp(-gp * T) +
                           model.a_double_prime * std::exp(-gpp * T);
        kernel.normalization = 1.0;
    }
    return kernel;
}

double kernel_density(const Kernel &kernel, const ReadoutModel &model, double t)
{
    return kernel.weight_fast * std::exp(-model.gamma_prime_per_us * t) +
           kernel.weight_slow * std::exp(-model.gamma_double_prime_per_us * t);
}
} // namespace

PhotonPmf pmf_dark(const ReadoutModel &model)
{
    model.validate();
    const double mean = model.lambda_d_per_us() * model.window_us;
    PhotonPmf pmf;
    const int k_max = k_max_for_mean(mean);
    pmf.p.reserve(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k)
    {
        pmf.p.push_back(poisson_pmf(k, mean));
    }
    check_normalized(pmf, "pmf_dark");
    return pmf;
}

PhotonPmf pmf_bright_single(const ReadoutModel &model)
{
    model.validate();
    const double T = model.window_us;
    const double lb = model.lambda_b_per_us();
    const double ld = model.lambda_d_per_us();
    const Kernel kernel = decay_kernel(model);

    const auto poisson_mean = [&](double t) { return lb * t + ld * (T - t); };

    const int k_max = k_max_for_mean(std::max(lb, ld) * T);
    PhotonPmf pmf;
    pmf.p.reserve(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k)
    {
        double value = quad::integrate(
            [&](double t) { return kernel_density(kernel, model, t) * poisson_pmf(k, poisson_mean(t)); },
            0.0, T, 1e-10);
        value += kernel.atom_at_T * poisson_pmf(k, poisson_mean(T));
        pmf.p.push_back(value / kernel.normalization);
    }
    check_normalized(pmf, "pmf_bright_single");
    return pmf;
}

PhotonPmf pmf_bright_double(const ReadoutModel &model)
{
    const PhotonPmf single = pmf_bright_single(model);
    const std::size_t n = single.p.size();
    PhotonPmf pmf;
    pmf.p.assign(2 * n - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = 0; j < n; ++j)
        {
            pmf.p[i + j] += single.p[i] * single.p[j];
        }
    }
    // The self-convolution inherits the single-readout truncation twice over.
    double sum = 0.0;
    for (const double v : pmf.p)
    {
        sum += v;
    }
    pmf.truncation_bound = 1.0 - sum;
    return pmf;
}

SsrResult ssr_metrics(const ReadoutModel &model, int threshold, const SsrOptions &options)
{
    if (threshold < 0)
    {
        throw ValidationError("ssr_metrics: threshold must be nonnegative");
    }
    SsrResult result;
    result.threshold = threshold;
    result.pmf_bright = pmf_bright_double(model);

    ReadoutModel dark_model = model;
    if (options.dark_window_doubled)
    {
        dark_model.window_us *= 2.0;
    }
    result.pmf_dark = pmf_dark(dark_model);

    const double tail_bright = result.pmf_bright.tail_above(threshold);
    const double tail_dark = result.pmf_dark.tail_above(threshold);
    if (tail_bright == 0.0 && tail_dark == 0.0)
    {
        throw NumericalError("ssr_metrics: both tail probabilities vanish at threshold " +
                             std::to_string(threshold) + "; fidelity undefined");
    }
    result.success_rate = tail_bright;
    result.discard_fraction = 1.0 - tail_bright;
    result.fidelity = tail_bright / (tail_bright + tail_dark);
    return result;
}

std::vector<SweepRow> sweep_metrics(const std::vector<std::pair<std::string, ReadoutModel>> &models,
                                    int threshold, const SsrOptions &options)
{
    if (models.empty())
    {
        throw ValidationError("sweep_metrics: empty model list");
    }
    std::vector<SweepRow> rows;
    rows.reserve(models.size());
    for (const auto &[label, model] : models)
    {
        SweepRow row;
        row.label = label;
        try
        {
            const SsrResult res = ssr_metrics(model, threshold, options);
            row.fidelity = res.fidelity;
            row.success_rate = res.success_rate;
        }
        catch (const std::exception &e)
        {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace
{
// Draw a decay time from the model's convention.
double sample_decay_time(const ReadoutModel &model, rng::Engine &engine)
{
    const double T = model.window_us;
    const double gp = model.gamma_prime_per_us;
    const double gpp = model.gamma_double_prime_per_us;
    if (model.convention == Convention::KernelNormalized)
    {
        const auto mass = [T](double a, double g) {
            if (a == 0.0)
            {
                return 0.0;
            }
            if (g <= 0.0)
            {
                return a * T;
            }
            return a * (-std::expm1(-g * T)) / g;
        };
        const double m_fast = mass(model.a_prime, gp);
        const double m_slow = mass(model.a_double_prime, gpp);
        const bool fast = engine.uniform() * (m_fast + m_slow) < m_fast;
        return engine.truncated_exponential(fast ? gp : gpp, T);
    }
    const double decayed_fast = model.a_prime * (-std::expm1(-gp * T));
    const double decayed_slow = model.a_double_prime * (-std::expm1(-gpp * T));
    const double u = engine.uniform();
    if (u >= decayed_fast + decayed_slow)
    {
        return T; // survived the window
    }
    const bool fast = u < decayed_fast;
    return engine.truncated_exponential(fast ? gp : gpp, T);
}

std::uint64_t sample_bright_counts(const ReadoutModel &model, rng::Engine &engine)
{
    const double t = sample_decay_time(model, engine);
    const double mean = model.lambda_b_per_us() * t +
                        model.lambda_d_per_us() * (model.window_us - t);
    return engine.poisson(mean);
}
} // namespace

std::vector<std::uint64_t> simulate_histogram(const ReadoutModel &model, std::size_t shots,
                                              std::uint64_t seed, SimMode mode)
{
    model.validate();
    if (shots < 1)
    {
        throw ValidationError("simulate_histogram: shots must be >= 1");
    }
    std::vector<std::uint64_t> histogram;
    const double dark_mean = model.lambda_d_per_us() * model.window_us;

    constexpr std::size_t kBatch = 65536;
    const std::size_t n_batches = (shots + kBatch - 1) / kBatch;
    for (std::size_t b = 0; b < n_batches; ++b)
    {
        rng::Engine engine(rng::derive_seed(seed, b));
        const std::size_t begin = b * kBatch;
        const std::size_t end = std::min(shots, begin + kBatch);
        for (std::size_t s = begin; s < end; ++s)
        {
            std::uint64_t counts = 0;
            if (mode == SimMode::BrightDouble)
            {
                counts = sample_bright_counts(model, engine) + sample_bright_counts(model, engine);
            }
            else
            {
                counts = engine.poisson(dark_mean);
            }
            if (counts >= histogram.size())
            {
                histogram.resize(counts + 1, 0);
            }
            ++histogram[counts];
        }
    }
    return histogram;
}

} // namespace dino::readout
