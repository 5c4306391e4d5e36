#ifndef DINO_READOUT_HPP
#define DINO_READOUT_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dino::readout
{
// How the bi-exponential bright-state kernel is turned into a decay-time
// distribution on [0, T]:
//  - KernelNormalized: the kernel a'e^{-g't} + a''e^{-g''t} itself,
//    normalized by its integral over the window.
//  - DecayDensity: the proper decay-time density a'g'e^{-g't} + a''g''e^{-g''t}
//    plus the survival mass (a'e^{-g'T} + a''e^{-g''T}) placed at t = T.
enum class Convention
{
    KernelNormalized,
    DecayDensity,
};

std::string to_string(Convention convention);
Convention convention_from_string(const std::string &name);

struct ReadoutModel
{
    double lambda_b_cps = 0.0;  // bright-state count rate
    double lambda_d_cps = 0.0;  // dark-state count rate
    double a_prime = 1.0;       // fast ISC weight a'
    double a_double_prime = 0.0; // slow ISC weight a''
    double gamma_prime_per_us = 0.0;       // fast ISC rate g'
    double gamma_double_prime_per_us = 0.0; // slow ISC rate g''
    double window_us = 0.0;     // readout window T
    Convention convention = Convention::KernelNormalized;

    void validate() const;

    double lambda_b_per_us() const { return lambda_b_cps * 1e-6; }
    double lambda_d_per_us() const { return lambda_d_cps * 1e-6; }

    // SI Table I parameter set.
    static ReadoutModel si_table1();
};

struct PhotonPmf
{
    std::vector<double> p;           // index = photon number k
    double truncation_bound = 0.0;   // 1 - sum(p)

    int k_max() const { return static_cast<int>(p.size()) - 1; }
    double at(int k) const { return k >= 0 && k < static_cast<int>(p.size()) ? p[static_cast<std::size_t>(k)] : 0.0; }
    double mean() const;
    // P(k > threshold)
    double tail_above(int threshold) const;
};

double poisson_pmf(int k, double mean);

PhotonPmf pmf_dark(const ReadoutModel &model);
PhotonPmf pmf_bright_single(const ReadoutModel &model);
// Nuclear-assisted double readout: self-convolution of the single pmf.
PhotonPmf pmf_bright_double(const ReadoutModel &model);

struct SsrOptions
{
    // Compare against dark counts accumulated over 2T instead of T.
    bool dark_window_doubled = false;
};

struct SsrResult
{
    int threshold = 0;
    double fidelity = 0.0;
    double success_rate = 0.0;
    double discard_fraction = 0.0;
    PhotonPmf pmf_bright; // double readout
    PhotonPmf pmf_dark;
};

SsrResult ssr_metrics(const ReadoutModel &model, int threshold, const SsrOptions &options = {});

struct SweepRow
{
    std::string label;
    double fidelity = 0.0;
    double success_rate = 0.0;
    std::string error; // empty on success
};

// ssr_metrics per entry; per-entry failures are collected, not fail-fast.
std::vector<SweepRow> sweep_metrics(const std::vector<std::pair<std::string, ReadoutModel>> &models,
                                    int threshold, const SsrOptions &options = {});

enum class SimMode
{
    BrightDouble,
    DarkSingle,
};

// Monte Carlo histogram of photon counts; histogram[k] = shots with k counts.
// Deterministic for a fixed seed and independent of batch evaluation order.
std::vector<std::uint64_t> simulate_histogram(const ReadoutModel &model, std::size_t shots,
                                              std::uint64_t seed, SimMode mode);

} // namespace dino::readout

#endif // DINO_READOUT_HPP
