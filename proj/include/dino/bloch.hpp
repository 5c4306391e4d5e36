#ifndef DINO_BLOCH_HPP
#define DINO_BLOCH_HPP

#include "dino/geometry.hpp"

#include <filesystem>
#include <functional>
#include <vector>

namespace dino::bloch
{
struct Layer
{
    double n_eff = 1.0;
    double thickness_nm = 0.0;
};

// Effective-index discretization of one unit cell, used as the Bloch period.
struct LayerStack
{
    std::vector<Layer> layers;
    double period_nm = 0.0;

    void validate() const;
};

// fill fraction in [0, 1] -> effective refractive index; must be monotone
// nondecreasing with index_map(0) = 1.
using IndexMap = std::function<double(double)>;

// Volume averaging of the permittivity: n_eff = sqrt(f*n_mat^2 + (1-f)).
IndexMap volume_average_index(double n_mat);

inline constexpr double kDefaultMaterialIndex = 2.6;

// reference_half_width = 0 uses the cell's own maximum half-width. Pass an
// explicit reference to compare perturbed cells on a common fill scale
// (required for the monotone gap-shift property: with a fixed reference a
// pointwise-larger profile gives pointwise-larger permittivity, which can
// only lower band frequencies).
LayerStack slice_unit_cell(const geometry::UnitCellSpec &cell, int n_slices,
                           const IndexMap &index_map, double reference_half_width = 0.0);

// (1/2) Tr M(nu) of the unit-cell characteristic matrix; the Bloch condition
// is cos(k_z * period) = half_trace, so |half_trace| > 1 inside a band gap.
double half_trace(const LayerStack &stack, double nu_THz);

struct Bandgap
{
    double lo_THz = 0.0;
    double hi_THz = 0.0;
    double midgap_THz = 0.0;
    double gap_midgap_ratio = 0.0;
};

std::vector<Bandgap> find_bandgaps(const LayerStack &stack, double nu_lo_THz, double nu_hi_THz,
                                   double resolution_THz);

struct TracePoint
{
    double nu_THz = 0.0;
    double half_trace = 0.0;
};

struct BandPoint
{
    double k_z_rad_per_nm = 0.0;
    double nu_THz = 0.0;
};

struct BandStructure
{
    std::vector<BandPoint> points;       // propagating points only (|half_trace| <= 1)
    std::vector<TracePoint> trace_values;
};

BandStructure band_scan(const LayerStack &stack, double nu_lo_THz, double nu_hi_THz,
                        double resolution_THz);

// CSV "nu_THz,half_trace"
void export_band_scan(const BandStructure &bands, const std::filesystem::path &destination);
// CSV "lo_THz,hi_THz,midgap_THz,ratio"
void export_bandgaps(const std::vector<Bandgap> &gaps, const std::filesystem::path &destination);

} // namespace dino::bloch

#endif // DINO_BLOCH_HPP
