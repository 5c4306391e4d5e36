#include "dino/bloch.hpp"

#include "dino/constants.hpp"
#include "dino/errors.hpp"
#include "dino/quadrature.hpp"
#include "dino/transfer_matrix.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace dino::bloch
{
void LayerStack::validate() const
{
    if (layers.empty())
    {
        throw ValidationError("layer stack: empty");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < layers.size(); ++i)
    {
        if (!(layers[i].thickness_nm > 0.0))
        {
            throw ValidationError("layer stack: layer " + std::to_string(i) +
                                  " has nonpositive thickness");
        }
        if (layers[i].n_eff < 1.0)
        {
            throw ValidationError("layer stack: layer " + std::to_string(i) + " has n_eff < 1");
        }
        sum += layers[i].thickness_nm;
    }
    if (std::abs(sum - period_nm) > 1e-6)
    {
        throw ValidationError("layer stack: period does not equal the thickness sum");
    }
}

IndexMap volume_average_index(double n_mat)
{
    return [n_mat](double fill) { return std::sqrt(fill * n_mat * n_mat + (1.0 - fill)); };
}

namespace
{
void check_index_map(const IndexMap &index_map)
{
    if (std::abs(index_map(0.0) - 1.0) > 1e-9)
    {
        throw ValidationError("index map: must satisfy index_map(0) = 1");
    }
    double prev = index_map(0.0);
    for (int i = 1; i <= 64; ++i)
    {
        const double fill = static_cast<double>(i) / 64.0;
        const double n = index_map(fill);
        if (n < prev - 1e-12)
        {
            throw ValidationError("index map: not monotone nondecreasing at fill " +
                                  std::to_string(fill));
        }
        prev = n;
    }
}
} // namespace

LayerStack slice_unit_cell(const geometry::UnitCellSpec &cell, int n_slices,
                           const IndexMap &index_map, double reference_half_width)
{
    cell.validate();
    if (n_slices < 8)
    {
        throw ValidationError("slice_unit_cell: n_slices must be >= 8, got " +
                              std::to_string(n_slices));
    }
    if (reference_half_width < 0.0)
    {
        throw ValidationError("slice_unit_cell: reference half-width must be nonnegative");
    }
    check_index_map(index_map);

    const double reference =
        reference_half_width > 0.0 ? reference_half_width : cell.max_half_width();
    const double dz = cell.a_nm / static_cast<double>(n_slices);
    LayerStack stack;
    stack.period_nm = cell.a_nm;
    stack.layers.reserve(static_cast<std::size_t>(n_slices));
    for (int j = 0; j < n_slices; ++j)
    {
        const double z0 = static_cast<double>(j) * dz;
        const double z1 = (j + 1 == n_slices) ? cell.a_nm : (static_cast<double>(j + 1) * dz);
        const double fill = quad::gauss_legendre(
                                [&](double z) {
                                    const double x = geometry::corrugation_half_width(cell, z);
                                    const double r = x / reference;
                                    return r * r;
                                },
                                z0, z1, 32) /
                            (z1 - z0);
        stack.layers.push_back({index_map(fill), z1 - z0});
    }
    return stack;
}

double half_trace(const LayerStack &stack, double nu_THz)
{
    if (!(nu_THz > 0.0))
    {
        throw ValidationError("half_trace: frequency must be positive");
    }
    tmm::Mat2 m;
    for (const auto &layer : stack.layers)
    {
        m = m * tmm::layer_matrix({std::complex<double>(layer.n_eff, 0.0), layer.thickness_nm},
                                  nu_THz);
    }
    return 0.5 * m.trace().real();
}

namespace
{
// |half_trace| - 1; positive inside a gap.
double gap_indicator(const LayerStack &stack, double nu)
{
    return std::abs(half_trace(stack, nu)) - 1.0;
}

// Bisect the sign change of the gap indicator between lo and hi.
double refine_edge(const LayerStack &stack, double lo, double hi, double g_lo)
{
    for (int iter = 0; iter < 80 && (hi - lo) > 1e-9; ++iter)
    {
        const double mid = 0.5 * (lo + hi);
        const double g_mid = gap_indicator(stack, mid);
        if ((g_mid > 0.0) == (g_lo > 0.0))
        {
            lo = mid;
            g_lo = g_mid;
        }
        else
        {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}
} // namespace

std::vector<Bandgap> find_bandgaps(const LayerStack &stack, double nu_lo_THz, double nu_hi_THz,
                                   double resolution_THz)
{
    stack.validate();
    if (!(nu_lo_THz > 0.0) || !(nu_lo_THz < nu_hi_THz))
    {
        throw ValidationError("find_bandgaps: require 0 < nu_lo < nu_hi");
    }
    if (!(resolution_THz > 0.0) || resolution_THz > (nu_hi_THz - nu_lo_THz) / 10.0)
    {
        throw ValidationError(
            "find_bandgaps: resolution must be positive and no coarser than (nu_hi-nu_lo)/10");
    }

    const auto n_steps = static_cast<std::size_t>(std::ceil((nu_hi_THz - nu_lo_THz) / resolution_THz));
    std::vector<Bandgap> gaps;
    bool in_gap = gap_indicator(stack, nu_lo_THz) > 0.0;
    double gap_start = nu_lo_THz;
    double prev_nu = nu_lo_THz;
    double prev_g = gap_indicator(stack, nu_lo_THz);
    for (std::size_t i = 1; i <= n_steps; ++i)
    {
        const double nu = (i == n_steps) ? nu_hi_THz
                                         : nu_lo_THz + static_cast<double>(i) * resolution_THz;
        const double g = gap_indicator(stack, nu);
        if ((g > 0.0) != in_gap)
        {
            const double edge = refine_edge(stack, prev_nu, nu, prev_g);
            if (in_gap)
            {
                gaps.push_back({gap_start, edge, 0.0, 0.0});
            }
            else
            {
                gap_start = edge;
            }
            in_gap = g > 0.0;
        }
        prev_nu = nu;
        prev_g = g;
    }
    if (in_gap)
    {
        gaps.push_back({gap_start, nu_hi_THz, 0.0, 0.0});
    }
    for (auto &gap : gaps)
    {
        gap.midgap_THz = 0.5 * (gap.lo_THz + gap.hi_THz);
        gap.gap_midgap_ratio = (gap.hi_THz - gap.lo_THz) / gap.midgap_THz;
    }
    return gaps;
}

BandStructure band_scan(const LayerStack &stack, double nu_lo_THz, double nu_hi_THz,
                        double resolution_THz)
{
    stack.validate();
    if (!(nu_lo_THz > 0.0) || !(nu_lo_THz < nu_hi_THz) || !(resolution_THz > 0.0))
    {
        throw ValidationError("band_scan: invalid frequency range or resolution");
    }
    BandStructure bands;
    const auto n_steps = static_cast<std::size_t>(std::ceil((nu_hi_THz - nu_lo_THz) / resolution_THz));
    bands.trace_values.reserve(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i)
    {
        const double nu = (i == n_steps) ? nu_hi_THz
                                         : nu_lo_THz + static_cast<double>(i) * resolution_THz;
        const double h = half_trace(stack, nu);
        bands.trace_values.push_back({nu, h});
        if (std::abs(h) <= 1.0)
        {
            bands.points.push_back({std::acos(h) / stack.period_nm, nu});
        }
    }
    return bands;
}

void export_band_scan(const BandStructure &bands, const std::filesystem::path &destination)
{
    std::ofstream out(destination, std::ios::trunc);
    if (!out)
    {
        throw ValidationError("export_band_scan: failed to open " + destination.string());
    }
    out << std::setprecision(17);
    out << "nu_THz,half_trace\n";
    for (const auto &point : bands.trace_values)
    {
        out << point.nu_THz << "," << point.half_trace << "\n";
    }
}

void export_bandgaps(const std::vector<Bandgap> &gaps, const std::filesystem::path &destination)
{
    std::ofstream out(destination, std::ios::trunc);
    if (!out)
    {
        throw ValidationError("export_bandgaps: failed to open " + destination.string());
    }
    out << std::setprecision(17);
    out << "lo_THz,hi_THz,midgap_THz,ratio\n";
    for (const auto &gap : gaps)
    {
        out << gap.lo_THz << "," << gap.hi_THz << "," << gap.midgap_THz << ","
            << gap.gap_midgap_ratio << "\n";
    }
}

} // namespace dino::bloch
