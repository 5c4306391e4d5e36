#include "dino/calib.hpp"

#include "dino/errors.hpp"

#include <cmath>
#include <sstream>

namespace dino::calib
{
void CalibrationInputs::validate() const
{
    const std::size_t n = nu_THz.size();
    if (n == 0)
    {
        throw ValidationError("calibration inputs: empty grid");
    }
    if (i_sig_r.size() != n || i_ref_r.size() != n || i_sig_t.size() != n || i_ref_t.size() != n)
    {
        throw ValidationError("calibration inputs: all four spectra must share the frequency grid");
    }
    for (std::size_t i = 1; i < n; ++i)
    {
        if (!(nu_THz[i] > nu_THz[i - 1]))
        {
            throw ValidationError("calibration inputs: grid must be strictly increasing");
        }
    }
    if (!(eta_retro > 0.0) || eta_retro > 1.0)
    {
        throw ValidationError("calibration inputs: eta_retro must lie in (0, 1]");
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        if (i_sig_r[i] < 0.0 || i_ref_r[i] < 0.0 || i_sig_t[i] < 0.0 || i_ref_t[i] < 0.0)
        {
            std::ostringstream oss;
            oss << "calibration inputs: negative intensity at nu=" << nu_THz[i] << " THz";
            throw ValidationError(oss.str());
        }
    }
}

CalibratedSpectrum reflectance_from_spectra(const CalibrationInputs &inputs)
{
    inputs.validate();
    CalibratedSpectrum out;
    const std::size_t n = inputs.nu_THz.size();
    out.spectrum.nu_THz = inputs.nu_THz;
    out.spectrum.R.reserve(n);
    out.spectrum.T.assign(n, 0.0);
    out.spectrum.S.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (inputs.i_ref_r[i] == 0.0 || inputs.i_sig_t[i] == 0.0)
        {
            std::ostringstream oss;
            oss << "reflectance_from_spectra: division by zero at nu=" << inputs.nu_THz[i]
                << " THz";
            throw ValidationError(oss.str());
        }
        const double R = (inputs.i_sig_r[i] / inputs.i_ref_r[i]) * inputs.eta_retro *
                         (inputs.i_ref_t[i] / inputs.i_sig_t[i]);
        out.spectrum.R.push_back(R);
        out.spectrum.S.push_back(1.0 - R);
        if (R < 0.0 || R > 1.0)
        {
            out.out_of_range.push_back(i);
        }
        if (R > 1.05)
        {
            std::ostringstream oss;
            oss << "calibrated reflectance " << R << " exceeds 1.05 at nu=" << inputs.nu_THz[i]
                << " THz";
            out.warnings.push_back({inputs.nu_THz[i], R, oss.str()});
        }
    }
    return out;
}

SaturationReflectance reflectance_from_saturation(ValueErr i_s_ref, ValueErr i_s_wg)
{
    if (!(i_s_wg.value > 0.0))
    {
        throw ValidationError("reflectance_from_saturation: I_s,wg must be positive");
    }
    if (i_s_ref.err < 0.0 || i_s_wg.err < 0.0)
    {
        throw ValidationError("reflectance_from_saturation: uncertainties must be nonnegative");
    }
    SaturationReflectance out;
    out.i_s_ref = i_s_ref;
    out.i_s_wg = i_s_wg;
    out.r_v2.value = 2.0 * i_s_ref.value / i_s_wg.value - 1.0;
    const double d_ref = i_s_ref.err / i_s_wg.value;
    const double d_wg = i_s_ref.value * i_s_wg.err / (i_s_wg.value * i_s_wg.value);
    out.r_v2.err = 2.0 * std::sqrt(d_ref * d_ref + d_wg * d_wg);
    out.collection_fraction = 0.5 * (1.0 + out.r_v2.value);
    return out;
}

double saturation_forward(double i_s_wg, double r_v2)
{
    return 0.5 * i_s_wg * (1.0 + r_v2);
}

} // namespace dino::calib
