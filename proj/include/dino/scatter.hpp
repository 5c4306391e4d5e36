#ifndef DINO_SCATTER_HPP
#define DINO_SCATTER_HPP

#include "dino/bloch.hpp"
#include "dino/geometry.hpp"
#include "dino/transfer_matrix.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dino::scatter
{
// Reflectance/transmittance/scatter triple on a probe-frequency grid.
// S = 1 - R - T by construction.
struct Spectrum
{
    std::vector<double> nu_THz;
    std::vector<double> R;
    std::vector<double> T;
    std::vector<double> S;

    std::size_t size() const { return nu_THz.size(); }
};

struct EvaluationSettings
{
    double loss = 0.0;              // imaginary index added inside the corrugated region
    int n_slices_per_cell = 32;
    double n_mat = bloch::kDefaultMaterialIndex;
    double lead_length_nm = 5000.0; // 5 um waveguide leads
    bloch::IndexMap index_map;      // empty -> volume-average with n_mat
};

// Effective-index layer sequence of the full device between waveguide leads.
struct DeviceStack
{
    double lead_index = 1.0;
    double reference_half_width_nm = 0.0;
    std::vector<tmm::Layer> layers; // lead, taper slices, periodic slices, lead
};

DeviceStack build_device_stack(const geometry::TaperSpec &device,
                               const EvaluationSettings &settings = {});

Spectrum reflectance_spectrum(const geometry::TaperSpec &device, std::span<const double> nu_grid,
                              const EvaluationSettings &settings = {});

// Default probe grid: 260..380 THz at 1 THz spacing.
std::vector<double> default_grid();
std::vector<double> make_grid(double lo_THz, double hi_THz, double step_THz);

struct OperatingRange
{
    double lo_THz = 0.0;
    double hi_THz = 0.0;
    double mean_R = 0.0;
    double std_R = 0.0;
    double threshold = 0.5;
};

// Widest contiguous grid interval with R > threshold (ties: lowest
// frequency); nullopt when no grid point exceeds the threshold.
std::optional<OperatingRange> operating_range(const Spectrum &spectrum, double threshold = 0.5);

struct BandStats
{
    double mean = 0.0;
    double stddev = 0.0;
};

BandStats band_average(const Spectrum &spectrum, double lo_THz, double hi_THz);

std::vector<std::pair<int, Spectrum>> convergence_scan(const geometry::TaperSpec &device,
                                                       int n_max, std::span<const double> nu_grid,
                                                       const EvaluationSettings &settings = {});

// CSV "nu_THz,R,T,S"
void export_spectrum(const Spectrum &spectrum, const std::filesystem::path &destination);

} // namespace dino::scatter

#endif // DINO_SCATTER_HPP
