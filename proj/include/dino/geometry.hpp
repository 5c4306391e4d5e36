#ifndef DINO_GEOMETRY_HPP
#define DINO_GEOMETRY_HPP

#include <filesystem>
#include <vector>

namespace dino::geometry
{
// One period of the corrugated nanobeam. The half-width profile along the
// propagation axis is x(z) = 2*A*cos^e(pi*z/a) + g with z = 0 at a cell
// boundary, where the profile takes its maximum 2*A + g. The cross section
// is an isosceles triangle with sidewall angle delta, so cross-section areas
// scale with x^2 and delta cancels out of area ratios.
struct UnitCellSpec
{
    double a_nm = 0.0;         // unit-cell length
    double amplitude_nm = 0.0; // corrugation amplitude A
    int exponent = 2;          // corrugation exponent e (even, >= 2)
    double gap_nm = 0.0;       // half-width at the corrugation minimum g
    double sidewall_angle_deg = 54.0;

    double max_half_width() const { return 2.0 * amplitude_nm + gap_nm; }
    double min_half_width() const { return gap_nm; }

    void validate() const;
};

// One tapered cell: length plus the half-width extrema. The maximum x_plus
// sits at the cell's trailing boundary (shared with the next cell), the
// minimum x_minus at the cell centre.
struct TaperCell
{
    double a_nm = 0.0;
    double x_plus_nm = 0.0;
    double x_minus_nm = 0.0;
};

// Tapered waveguide-reflector interface followed by a periodic section.
// Within each taper cell the two half-segments interpolate between the
// boundary maximum and the centre minimum as
//   x(z') = x_minus + (x_plus - x_minus) * cos^e(pi * z' / a),
// where the leading half of cell 0 is held constant at the waveguide
// half-width. Adjacent cells share their boundary maximum, which makes the
// profile continuous by construction; the junction to the periodic section
// must match the periodic cell's maximum half-width.
struct TaperSpec
{
    std::vector<TaperCell> cells;
    int exponent = 2;
    double waveguide_half_width_nm = 0.0;
    int n_periodic = 0;
    UnitCellSpec periodic_cell;

    double taper_length_nm() const;
    double total_length_nm() const;

    void validate() const;
};

// Sampled half-width profile. Samples sit on the global grid z = k*spacing
// plus the exact cell boundaries, so halving the spacing refines the sample
// set without moving existing points.
struct CorrugationProfile
{
    std::vector<double> z_nm;
    std::vector<double> x_nm;
    double sample_spacing_nm = 0.0;

    std::size_t size() const { return z_nm.size(); }

    // Linear interpolation between samples; z must lie inside the range.
    double interpolate(double z) const;
};

// Half-width of a periodic unit cell at position z in [0, a] measured from a
// cell boundary.
double corrugation_half_width(const UnitCellSpec &cell, double z_nm);

// Analytic half-width of the full taper + periodic profile at z in
// [0, total_length].
double taper_half_width(const TaperSpec &spec, double z_nm);

CorrugationProfile build_taper(const TaperSpec &spec, double spacing_nm);

// Mean of (x/reference)^2 over [z_lo, z_hi]: the cross-section area ratio
// averaged over the interval, by trapezoidal integration of the samples.
double fill_fraction(const CorrugationProfile &profile, double z_lo_nm, double z_hi_nm,
                     double reference_half_width_nm);

// Two-column CSV "z_nm,x_nm" at full precision.
void export_profile(const CorrugationProfile &profile, const std::filesystem::path &destination);

} // namespace dino::geometry

#endif // DINO_GEOMETRY_HPP
