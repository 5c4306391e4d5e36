#ifndef DINO_CALIB_HPP
#define DINO_CALIB_HPP

#include "dino/scatter.hpp"
#include "dino/value_err.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace dino::calib
{
// Four intensity spectra on a shared frequency grid plus the retroreflector
// reference reflectance. Units are arbitrary but must be consistent within
// each ratio pair.
struct CalibrationInputs
{
    std::vector<double> nu_THz;
    std::vector<double> i_sig_r;
    std::vector<double> i_ref_r;
    std::vector<double> i_sig_t;
    std::vector<double> i_ref_t;
    double eta_retro = 0.97;

    void validate() const;
};

struct CalibWarning
{
    double nu_THz = 0.0;
    double R = 0.0;
    std::string message;
};

// Calibrated reflectance R(nu) = (I_sig_R/I_ref_R) * eta_retro *
// (I_ref_T/I_sig_T). Out-of-range values are flagged, never clamped.
struct CalibratedSpectrum
{
    scatter::Spectrum spectrum;           // R filled; T = 0; S = 1 - R bookkeeping
    std::vector<std::size_t> out_of_range; // indices with R outside [0, 1]
    std::vector<CalibWarning> warnings;    // R > 1.05 entries
};

CalibratedSpectrum reflectance_from_spectra(const CalibrationInputs &inputs);

// Reflectance from saturation intensities: R_V2 = 2*I_s_ref/I_s_wg - 1 with
// first-order error propagation; collection_fraction = (1+R_V2)/2.
struct SaturationReflectance
{
    ValueErr i_s_ref;
    ValueErr i_s_wg;
    ValueErr r_v2;
    double collection_fraction = 0.0;
};

SaturationReflectance reflectance_from_saturation(ValueErr i_s_ref, ValueErr i_s_wg);

// Forward evaluation of the saturation relation: I_s_ref from (I_s_wg, R_V2).
double saturation_forward(double i_s_wg, double r_v2);

} // namespace dino::calib

#endif // DINO_CALIB_HPP
