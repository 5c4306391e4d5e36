#ifndef DINO_CRC_HPP
#define DINO_CRC_HPP

#include "dino/value_err.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace dino::crc
{
struct PulseSequence
{
    double repump_us = 1.0;
    double crc_window_us = 20.0;
    double readout_window_us = 100.0;

    void validate() const;
};

struct ShotRecord
{
    std::uint32_t crc_counts = 0;
    std::uint32_t readout_counts = 0;
};

struct FilterResult
{
    std::vector<ShotRecord> kept;
    double discard_fraction = 0.0;
};

// Keeps records with crc_counts strictly above the threshold.
FilterResult filter_shots(std::span<const ShotRecord> records, std::uint32_t threshold = 5);

// Poisson maximum-likelihood fit of the readout counts: lambda_hat is the
// sample mean, the quoted uncertainty is sqrt(lambda_hat).
ValueErr fit_poisson(std::span<const ShotRecord> kept);

// counts per window -> counts per second.
ValueErr rescale_to_rate(ValueErr lambda_per_window, double window_us);

// Two-state telegraph generator: each shot is on-resonance with probability
// p_on and emits Poisson counts at the state's rate in both windows.
struct TelegraphModel
{
    double rate_on_cps = 0.0;
    double rate_off_cps = 0.0;
    double p_on = 0.0;

    void validate() const;
};

std::vector<ShotRecord> simulate_crc(const PulseSequence &sequence, const TelegraphModel &telegraph,
                                     std::size_t shots, std::uint64_t seed);

} // namespace dino::crc

#endif // DINO_CRC_HPP
