#include "dino/scatter.hpp"

#include "dino/errors.hpp"
#include "dino/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>

namespace dino::scatter
{
namespace
{
bloch::IndexMap resolve_index_map(const EvaluationSettings &settings)
{
    if (settings.index_map)
    {
        return settings.index_map;
    }
    return bloch::volume_average_index(settings.n_mat);
}

double device_reference_half_width(const geometry::TaperSpec &device)
{
    double reference = device.waveguide_half_width_nm;
    for (const auto &cell : device.cells)
    {
        reference = std::max(reference, cell.x_plus_nm);
    }
    if (device.n_periodic > 0)
    {
        reference = std::max(reference, device.periodic_cell.max_half_width());
    }
    return reference;
}

// Mean of (x/reference)^2 over [z0, z1] of the analytic device profile.
double slice_fill(const geometry::TaperSpec &device, double z0, double z1, double reference)
{
    return quad::gauss_legendre(
               [&](double z) {
                   const double x = geometry::taper_half_width(device, z);
                   const double r = x / reference;
                   return r * r;
               },
               z0, z1, 32) /
           (z1 - z0);
}
} // namespace

DeviceStack build_device_stack(const geometry::TaperSpec &device, const EvaluationSettings &settings)
{
    device.validate();
    if (settings.loss < 0.0)
    {
        throw ValidationError("reflectance_spectrum: loss must be nonnegative");
    }
    if (settings.n_slices_per_cell < 8)
    {
        throw ValidationError("reflectance_spectrum: n_slices_per_cell must be >= 8");
    }

    const bloch::IndexMap index_map = resolve_index_map(settings);
    DeviceStack stack;
    stack.reference_half_width_nm = device_reference_half_width(device);
    const double wg_fill =
        (device.waveguide_half_width_nm / stack.reference_half_width_nm) *
        (device.waveguide_half_width_nm / stack.reference_half_width_nm);
    stack.lead_index = index_map(wg_fill);

    const std::complex<double> lead_n(stack.lead_index, 0.0);
    stack.layers.push_back({lead_n, settings.lead_length_nm});

    // Taper cells, sliced in place against the device-wide reference.
    double cell_start = 0.0;
    for (const auto &cell : device.cells)
    {
        const double dz = cell.a_nm / static_cast<double>(settings.n_slices_per_cell);
        for (int j = 0; j < settings.n_slices_per_cell; ++j)
        {
            const double z0 = cell_start + static_cast<double>(j) * dz;
            const double z1 = (j + 1 == settings.n_slices_per_cell)
                                  ? cell_start + cell.a_nm
                                  : cell_start + static_cast<double>(j + 1) * dz;
            const double fill = slice_fill(device, z0, z1, stack.reference_half_width_nm);
            stack.layers.push_back({std::complex<double>(index_map(fill), settings.loss), z1 - z0});
        }
        cell_start += cell.a_nm;
    }

    // Periodic section: slice one cell, repeat.
    if (device.n_periodic > 0)
    {
        const auto &cell = device.periodic_cell;
        std::vector<tmm::Layer> unit;
        unit.reserve(static_cast<std::size_t>(settings.n_slices_per_cell));
        const double dz = cell.a_nm / static_cast<double>(settings.n_slices_per_cell);
        for (int j = 0; j < settings.n_slices_per_cell; ++j)
        {
            const double z0 = static_cast<double>(j) * dz;
            const double z1 =
                (j + 1 == settings.n_slices_per_cell) ? cell.a_nm : static_cast<double>(j + 1) * dz;
            const double fill = quad::gauss_legendre(
                                    [&](double z) {
                                        const double x = geometry::corrugation_half_width(cell, z);
                                        const double r = x / stack.reference_half_width_nm;
                                        return r * r;
                                    },
                                    z0, z1, 32) /
                                (z1 - z0);
            unit.push_back({std::complex<double>(index_map(fill), settings.loss), z1 - z0});
        }
        for (int rep = 0; rep < device.n_periodic; ++rep)
        {
            stack.layers.insert(stack.layers.end(), unit.begin(), unit.end());
        }
    }

    stack.layers.push_back({lead_n, settings.lead_length_nm});
    return stack;
}

Spectrum reflectance_spectrum(const geometry::TaperSpec &device, std::span<const double> nu_grid,
                              const EvaluationSettings &settings)
{
    if (nu_grid.empty())
    {
        throw ValidationError("reflectance_spectrum: empty frequency grid");
    }
    for (std::size_t i = 1; i < nu_grid.size(); ++i)
    {
        if (!(nu_grid[i] > nu_grid[i - 1]))
        {
            throw ValidationError("reflectance_spectrum: grid must be strictly increasing");
        }
    }
    const DeviceStack stack = build_device_stack(device, settings);

    Spectrum spectrum;
    spectrum.nu_THz.assign(nu_grid.begin(), nu_grid.end());
    spectrum.R.reserve(nu_grid.size());
    spectrum.T.reserve(nu_grid.size());
    spectrum.S.reserve(nu_grid.size());
    for (const double nu : nu_grid)
    {
        const tmm::RT rt = tmm::reflect_transmit(stack.lead_index, stack.lead_index,
                                                 stack.layers, nu);
        spectrum.R.push_back(rt.R);
        spectrum.T.push_back(rt.T);
        spectrum.S.push_back(rt.S);
    }
    return spectrum;
}

std::vector<double> make_grid(double lo_THz, double hi_THz, double step_THz)
{
    if (!(lo_THz < hi_THz) || !(step_THz > 0.0))
    {
        throw ValidationError("make_grid: require lo < hi and step > 0");
    }
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::floor((hi_THz - lo_THz) / step_THz + 1e-9));
    grid.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
    {
        grid.push_back(lo_THz + static_cast<double>(i) * step_THz);
    }
    return grid;
}

std::vector<double> default_grid()
{
    return make_grid(260.0, 380.0, 1.0);
}

std::optional<OperatingRange> operating_range(const Spectrum &spectrum, double threshold)
{
    if (!(threshold > 0.0) || !(threshold < 1.0))
    {
        throw ValidationError("operating_range: threshold must lie in (0, 1)");
    }
    const std::size_t n = spectrum.size();
    std::size_t best_begin = 0;
    std::size_t best_end = 0; // exclusive
    double best_width = -1.0;
    std::size_t i = 0;
    while (i < n)
    {
        if (spectrum.R[i] > threshold)
        {
            std::size_t j = i;
            while (j < n && spectrum.R[j] > threshold)
            {
                ++j;
            }
            const double width = spectrum.nu_THz[j - 1] - spectrum.nu_THz[i];
            if (width > best_width)
            {
                best_width = width;
                best_begin = i;
                best_end = j;
            }
            i = j;
        }
        else
        {
            ++i;
        }
    }
    if (best_width < 0.0)
    {
        return std::nullopt;
    }
    OperatingRange range;
    range.threshold = threshold;
    range.lo_THz = spectrum.nu_THz[best_begin];
    range.hi_THz = spectrum.nu_THz[best_end - 1];
    const auto count = static_cast<double>(best_end - best_begin);
    double mean = 0.0;
    for (std::size_t k = best_begin; k < best_end; ++k)
    {
        mean += spectrum.R[k];
    }
    mean /= count;
    double var = 0.0;
    for (std::size_t k = best_begin; k < best_end; ++k)
    {
        const double d = spectrum.R[k] - mean;
        var += d * d;
    }
    range.mean_R = mean;
    range.std_R = std::sqrt(var / count);
    return range;
}

BandStats band_average(const Spectrum &spectrum, double lo_THz, double hi_THz)
{
    if (!(lo_THz <= hi_THz))
    {
        throw ValidationError("band_average: require lo <= hi");
    }
    double mean = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < spectrum.size(); ++i)
    {
        if (spectrum.nu_THz[i] >= lo_THz && spectrum.nu_THz[i] <= hi_THz)
        {
            mean += spectrum.R[i];
            ++count;
        }
    }
    if (count == 0)
    {
        throw ValidationError("band_average: band does not overlap the spectrum grid");
    }
    mean /= static_cast<double>(count);
    double var = 0.0;
    for (std::size_t i = 0; i < spectrum.size(); ++i)
    {
        if (spectrum.nu_THz[i] >= lo_THz && spectrum.nu_THz[i] <= hi_THz)
        {
            const double d = spectrum.R[i] - mean;
            var += d * d;
        }
    }
    return {mean, std::sqrt(var / static_cast<double>(count))};
}

std::vector<std::pair<int, Spectrum>> convergence_scan(const geometry::TaperSpec &device, int n_max,
                                                       std::span<const double> nu_grid,
                                                       const EvaluationSettings &settings)
{
    if (n_max < 12)
    {
        throw ValidationError("convergence_scan: n_max must be >= 12");
    }
    std::vector<std::pair<int, Spectrum>> result;
    result.reserve(static_cast<std::size_t>(n_max));
    geometry::TaperSpec variant = device;
    for (int n = 1; n <= n_max; ++n)
    {
        variant.n_periodic = n;
        result.emplace_back(n, reflectance_spectrum(variant, nu_grid, settings));
    }
    return result;
}

void export_spectrum(const Spectrum &spectrum, const std::filesystem::path &destination)
{
    std::ofstream out(destination, std::ios::trunc);
    if (!out)
    {
        throw ValidationError("export_spectrum: failed to open " + destination.string());
    }
    out << std::setprecision(17);
    out << "nu_THz,R,T,S\n";
    for (std::size_t i = 0; i < spectrum.size(); ++i)
    {
        out << spectrum.nu_THz[i] << "," << spectrum.R[i] << "," << spectrum.T[i] << ","
            << spectrum.S[i] << "\n";
    }
}

} // namespace dino::scatter
