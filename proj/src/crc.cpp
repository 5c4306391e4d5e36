#include "dino/crc.hpp"

#include "dino/errors.hpp"
#include "dino/rng.hpp"

#include <algorithm>
#include <cmath>

namespace dino::crc
{
void PulseSequence::validate() const
{
    if (!(repump_us > 0.0) || !(crc_window_us > 0.0) || !(readout_window_us > 0.0))
    {
        throw ValidationError("pulse sequence: all durations must be positive");
    }
}

void TelegraphModel::validate() const
{
    if (rate_on_cps < 0.0 || rate_off_cps < 0.0)
    {
        throw ValidationError("telegraph model: rates must be nonnegative");
    }
    if (p_on < 0.0 || p_on > 1.0)
    {
        throw ValidationError("telegraph model: p_on must lie in [0, 1]");
    }
}

FilterResult filter_shots(std::span<const ShotRecord> records, std::uint32_t threshold)
{
    if (records.empty())
    {
        throw ValidationError("filter_shots: empty record list");
    }
    FilterResult result;
    result.kept.reserve(records.size());
    for (const auto &record : records)
    {
        if (record.crc_counts > threshold)
        {
            result.kept.push_back(record);
        }
    }
    result.discard_fraction =
        1.0 - static_cast<double>(result.kept.size()) / static_cast<double>(records.size());
    return result;
}

ValueErr fit_poisson(std::span<const ShotRecord> kept)
{
    if (kept.empty())
    {
        throw ValidationError("fit_poisson: needs at least one record");
    }
    double sum = 0.0;
    for (const auto &record : kept)
    {
        sum += static_cast<double>(record.readout_counts);
    }
    const double lambda_hat = sum / static_cast<double>(kept.size());
    return {lambda_hat, std::sqrt(lambda_hat)};
}

ValueErr rescale_to_rate(ValueErr lambda_per_window, double window_us)
{
    if (!(window_us > 0.0))
    {
        throw ValidationError("rescale_to_rate: window must be positive");
    }
    const double per_second = 1.0 / (window_us * 1e-6);
    return {lambda_per_window.value * per_second, lambda_per_window.err * per_second};
}

std::vector<ShotRecord> simulate_crc(const PulseSequence &sequence, const TelegraphModel &telegraph,
                                     std::size_t shots, std::uint64_t seed)
{
    sequence.validate();
    telegraph.validate();
    std::vector<ShotRecord> records;
    records.reserve(shots);

    constexpr std::size_t kBatch = 65536;
    const std::size_t n_batches = (shots + kBatch - 1) / kBatch;
    for (std::size_t b = 0; b < n_batches; ++b)
    {
        rng::Engine engine(rng::derive_seed(seed, b));
        const std::size_t begin = b * kBatch;
        const std::size_t end = std::min(shots, begin + kBatch);
        for (std::size_t s = begin; s < end; ++s)
        {
            const bool on = engine.uniform() < telegraph.p_on;
            const double rate = on ? telegraph.rate_on_cps : telegraph.rate_off_cps;
            ShotRecord record;
            record.crc_counts =
                static_cast<std::uint32_t>(engine.poisson(rate * sequence.crc_window_us * 1e-6));
            record.readout_counts =
                static_cast<std::uint32_t>(engine.poisson(rate * sequence.readout_window_us * 1e-6));
            records.push_back(record);
        }
    }
    return records;
}

} // namespace dino::crc
