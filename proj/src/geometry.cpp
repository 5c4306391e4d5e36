#include "dino/geometry.hpp"

#include "dino/constants.hpp"
#include "dino/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace dino::geometry
{
namespace
{
// Declared extrema are considered continuous when they agree to this
// tolerance (nm).
constexpr double kJoinTol = 1e-6;

double ipow(double base, int exponent)
{
    double result = 1.0;
    double b = base;
    int e = exponent;
    while (e > 0)
    {
        if (e & 1)
        {
            result *= b;
        }
        b *= b;
        e >>= 1;
    }
    return result;
}

double cos_power(double z, double period, int exponent)
{
    return ipow(std::cos(kPi * z / period), exponent);
}
} // namespace

void UnitCellSpec::validate() const
{
    if (!(a_nm > 0.0))
    {
        throw ValidationError("unit cell: a must be positive, got " + std::to_string(a_nm));
    }
    if (amplitude_nm < 0.0)
    {
        throw ValidationError("unit cell: A must be nonnegative, got " + std::to_string(amplitude_nm));
    }
    if (!(gap_nm > 0.0))
    {
        throw ValidationError("unit cell: g must be positive, got " + std::to_string(gap_nm));
    }
    if (exponent < 2 || exponent % 2 != 0)
    {
        throw ValidationError("unit cell: e must be an even integer >= 2, got " + std::to_string(exponent));
    }
    if (!(sidewall_angle_deg > 0.0) || !(sidewall_angle_deg < 90.0))
    {
        throw ValidationError("unit cell: delta must lie in (0, 90) degrees, got " +
                              std::to_string(sidewall_angle_deg));
    }
}

double TaperSpec::taper_length_nm() const
{
    double length = 0.0;
    for (const auto &cell : cells)
    {
        length += cell.a_nm;
    }
    return length;
}

double TaperSpec::total_length_nm() const
{
    return taper_length_nm() + static_cast<double>(n_periodic) * periodic_cell.a_nm;
}

void TaperSpec::validate() const
{
    if (exponent < 2 || exponent % 2 != 0)
    {
        throw ValidationError("taper: e must be an even integer >= 2, got " + std::to_string(exponent));
    }
    if (!(waveguide_half_width_nm > 0.0))
    {
        throw ValidationError("taper: waveguide_half_width must be positive");
    }
    if (n_periodic < 0)
    {
        throw ValidationError("taper: n_periodic must be nonnegative");
    }
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        const auto &cell = cells[i];
        if (!(cell.a_nm > 0.0))
        {
            throw ValidationError("taper cell " + std::to_string(i) + ": a must be positive");
        }
        if (!(cell.x_minus_nm > 0.0) || cell.x_plus_nm < cell.x_minus_nm)
        {
            throw ValidationError("taper cell " + std::to_string(i) +
                                  ": requires x_plus >= x_minus > 0");
        }
    }
    if (!cells.empty() &&
        std::abs(cells.front().x_minus_nm - waveguide_half_width_nm) > kJoinTol)
    {
        throw ValidationError(
            "taper cell 0: x_minus must equal the waveguide half-width (the leading half is "
            "constant); declared " +
            std::to_string(cells.front().x_minus_nm) + " vs " +
            std::to_string(waveguide_half_width_nm));
    }
    if (n_periodic > 0)
    {
        periodic_cell.validate();
        if (!cells.empty() &&
            std::abs(cells.back().x_plus_nm - periodic_cell.max_half_width()) > kJoinTol)
        {
            throw ValidationError(
                "taper cell " + std::to_string(cells.size() - 1) +
                ": x_plus does not meet the periodic cell's maximum half-width (discontinuity at "
                "the taper-periodic junction): " +
                std::to_string(cells.back().x_plus_nm) + " vs " +
                std::to_string(periodic_cell.max_half_width()));
        }
    }
}

double corrugation_half_width(const UnitCellSpec &cell, double z_nm)
{
    if (z_nm < 0.0 || z_nm > cell.a_nm)
    {
        std::ostringstream oss;
        oss << "corrugation_half_width: z=" << z_nm << " outside [0, " << cell.a_nm << "]";
        throw ValidationError(oss.str());
    }
    return 2.0 * cell.amplitude_nm * cos_power(z_nm, cell.a_nm, cell.exponent) + cell.gap_nm;
}

double taper_half_width(const TaperSpec &spec, double z_nm)
{
    if (spec.cells.empty() && spec.n_periodic == 0)
    {
        throw ValidationError("taper_half_width: device has no corrugated section");
    }
    const double taper_len = spec.taper_length_nm();
    const double total_len = spec.total_length_nm();
    if (z_nm < 0.0 || z_nm > total_len)
    {
        std::ostringstream oss;
        oss << "taper_half_width: z=" << z_nm << " outside [0, " << total_len << "]";
        throw ValidationError(oss.str());
    }

    if (z_nm < taper_len || (spec.n_periodic == 0 && !spec.cells.empty()))
    {
        double cell_start = 0.0;
        std::size_t index = 0;
        for (; index + 1 < spec.cells.size(); ++index)
        {
            if (z_nm < cell_start + spec.cells[index].a_nm)
            {
                break;
            }
            cell_start += spec.cells[index].a_nm;
        }
        const auto &cell = spec.cells[index];
        const double local = std::min(z_nm - cell_start, cell.a_nm);
        const bool first_half = local <= 0.5 * cell.a_nm;
        if (index == 0 && first_half)
        {
            return spec.waveguide_half_width_nm;
        }
        double boundary_max = cell.x_plus_nm;
        if (first_half)
        {
            boundary_max = spec.cells[index - 1].x_plus_nm;
        }
        return cell.x_minus_nm +
               (boundary_max - cell.x_minus_nm) * cos_power(local, cell.a_nm, spec.exponent);
    }

    const double a = spec.periodic_cell.a_nm;
    double local = z_nm - taper_len;
    int cell_index = static_cast<int>(local / a);
    cell_index = std::clamp(cell_index, 0, spec.n_periodic - 1);
    local -= static_cast<double>(cell_index) * a;
    local = std::clamp(local, 0.0, a);
    return corrugation_half_width(spec.periodic_cell, local);
}

CorrugationProfile build_taper(const TaperSpec &spec, double spacing_nm)
{
    spec.validate();
    if (spec.cells.empty() && spec.n_periodic == 0)
    {
        throw ValidationError("build_taper: no cells and no periodic section, nothing to sample");
    }
    double min_cell = spec.n_periodic > 0 ? spec.periodic_cell.a_nm
                                          : std::numeric_limits<double>::max();
    for (const auto &cell : spec.cells)
    {
        min_cell = std::min(min_cell, cell.a_nm);
    }
    // The spec's guidance is spacing <= shortest cell / 20 (the 1 nm default
    // more than satisfies it); only spacings that undersample a whole cell
    // are rejected outright.
    if (!(spacing_nm > 0.0) || spacing_nm > min_cell)
    {
        std::ostringstream oss;
        oss << "build_taper: spacing " << spacing_nm << " must be positive and <= " << min_cell
            << " (shortest cell)";
        throw ValidationError(oss.str());
    }

    const double total_len = spec.total_length_nm();

    // Global grid points k*spacing, then the exact cell boundaries. Grid
    // points survive spacing refinement bit-identically.
    std::vector<double> zs;
    const auto n_grid = static_cast<std::size_t>(total_len / spacing_nm);
    zs.reserve(n_grid + spec.cells.size() + static_cast<std::size_t>(spec.n_periodic) + 2);
    for (std::size_t k = 0; k <= n_grid; ++k)
    {
        const double z = static_cast<double>(k) * spacing_nm;
        if (z <= total_len)
        {
            zs.push_back(z);
        }
    }
    double boundary = 0.0;
    for (const auto &cell : spec.cells)
    {
        boundary += cell.a_nm;
        zs.push_back(std::min(boundary, total_len));
    }
    for (int j = 1; j <= spec.n_periodic; ++j)
    {
        zs.push_back(std::min(boundary + static_cast<double>(j) * spec.periodic_cell.a_nm, total_len));
    }
    zs.push_back(total_len);
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());

    CorrugationProfile profile;
    profile.sample_spacing_nm = spacing_nm;
    profile.z_nm = std::move(zs);
    profile.x_nm.reserve(profile.z_nm.size());
    for (const double z : profile.z_nm)
    {
        profile.x_nm.push_back(taper_half_width(spec, z));
    }
    return profile;
}

double CorrugationProfile::interpolate(double z) const
{
    if (z_nm.empty() || z < z_nm.front() || z > z_nm.back())
    {
        throw ValidationError("profile interpolation: z outside sampled range");
    }
    const auto it = std::lower_bound(z_nm.begin(), z_nm.end(), z);
    const auto idx = static_cast<std::size_t>(it - z_nm.begin());
    if (idx == 0 || z_nm[idx] == z)
    {
        return x_nm[idx];
    }
    const double z0 = z_nm[idx - 1];
    const double z1 = z_nm[idx];
    const double w = (z - z0) / (z1 - z0);
    return (1.0 - w) * x_nm[idx - 1] + w * x_nm[idx];
}

double fill_fraction(const CorrugationProfile &profile, double z_lo_nm, double z_hi_nm,
                     double reference_half_width_nm)
{
    if (!(z_hi_nm > z_lo_nm))
    {
        throw ValidationError("fill_fraction: empty interval");
    }
    if (!(reference_half_width_nm > 0.0))
    {
        throw ValidationError("fill_fraction: reference half-width must be positive");
    }
    if (profile.z_nm.size() < 2 || z_lo_nm < profile.z_nm.front() || z_hi_nm > profile.z_nm.back())
    {
        throw ValidationError("fill_fraction: interval outside the sampled profile");
    }

    const auto ratio_sq = [&](double x) {
        const double r = x / reference_half_width_nm;
        return r * r;
    };

    // Trapezoidal integration of (x/ref)^2 over [z_lo, z_hi] with exact
    // endpoint handling via linear interpolation.
    double integral = 0.0;
    double prev_z = z_lo_nm;
    double prev_v = ratio_sq(profile.interpolate(z_lo_nm));
    const auto begin =
        std::upper_bound(profile.z_nm.begin(), profile.z_nm.end(), z_lo_nm) - profile.z_nm.begin();
    for (auto i = static_cast<std::size_t>(begin); i < profile.z_nm.size(); ++i)
    {
        if (profile.z_nm[i] >= z_hi_nm)
        {
            break;
        }
        const double v = ratio_sq(profile.x_nm[i]);
        integral += 0.5 * (prev_v + v) * (profile.z_nm[i] - prev_z);
        prev_z = profile.z_nm[i];
        prev_v = v;
    }
    const double last_v = ratio_sq(profile.interpolate(z_hi_nm));
    integral += 0.5 * (prev_v + last_v) * (z_hi_nm - prev_z);
    return integral / (z_hi_nm - z_lo_nm);
}

void export_profile(const CorrugationProfile &profile, const std::filesystem::path &destination)
{
    std::ofstream out(destination, std::ios::trunc);
    if (!out)
    {
        throw ValidationError("export_profile: failed to open for writing: " + destination.string());
    }
    out << std::setprecision(17);
    out << "z_nm,x_nm\n";
    for (std::size_t i = 0; i < profile.z_nm.size(); ++i)
    {
        out << profile.z_nm[i] << "," << profile.x_nm[i] << "\n";
    }
    if (!out)
    {
        throw ValidationError("export_profile: write failed: " + destination.string());
    }
}

} // namespace dino::geometry
