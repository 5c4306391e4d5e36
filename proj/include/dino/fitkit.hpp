#ifndef DINO_FITKIT_HPP
#define DINO_FITKIT_HPP

#include "dino/levmar.hpp"

#include <array>
#include <optional>
#include <vector>

namespace dino::fitkit
{
struct DataPoint
{
    double x = 0.0;
    double y = 0.0;
};

// Saturation curve I(P) = I_s * P / (P + P_s), optionally plus a linear
// background c * P.
struct SaturationFit
{
    double i_s = 0.0;
    double p_s = 0.0;
    std::optional<double> background_slope;
    double i_s_err = 0.0;
    double p_s_err = 0.0;
    double background_slope_err = 0.0;
    Eigen::MatrixXd covariance;
    double residual_norm = 0.0;
    double initial_residual_norm = 0.0;
    bool converged = false;
    bool ill_conditioned = false;
};

SaturationFit fit_saturation(const std::vector<DataPoint> &points, bool with_linear_background);

// Voigt peak: amplitude (area) * V(x - center; sigma, gamma) + offset.
struct VoigtFit
{
    double center = 0.0;
    double gaussian_sigma = 0.0;
    double lorentzian_gamma = 0.0;
    double amplitude = 0.0;
    double offset = 0.0;
    double center_err = 0.0;
    double sigma_err = 0.0;
    double gamma_err = 0.0;
    double amplitude_err = 0.0;
    double offset_err = 0.0;
    double peak_height() const;
    double residual_norm = 0.0;
    double initial_residual_norm = 0.0;
    bool converged = false;
    bool ill_conditioned = false;
};

VoigtFit fit_voigt(const std::vector<DataPoint> &points);

// Lorentzian peak: amplitude (height) * hwhm^2 / ((x-center)^2 + hwhm^2) + offset.
struct LorentzFit
{
    double center = 0.0;
    double fwhm = 0.0;
    double amplitude = 0.0;
    double offset = 0.0;
    double center_err = 0.0;
    double fwhm_err = 0.0;
    double amplitude_err = 0.0;
    double offset_err = 0.0;
    double residual_norm = 0.0;
    double initial_residual_norm = 0.0;
    bool converged = false;
    bool ill_conditioned = false;
};

LorentzFit fit_lorentzian(const std::vector<DataPoint> &points);

// Simultaneous multi-peak bi-exponential fit of a pulsed g2 histogram:
// every peak j at tau_j = j * period is A_j' e^{-|tau-tau_j|/tau1} +
// A_j'' e^{-|tau-tau_j|/tau2} with shared decay constants. g2(0) is the
// dark-subtracted center-peak area over the mean side-peak area; its error
// comes from maximum-error estimation over +-1 sigma parameter corners.
struct G2Fit
{
    double tau1 = 0.0;
    double tau2 = 0.0;
    double tau1_err = 0.0;
    double tau2_err = 0.0;
    std::vector<std::array<double, 2>> amplitudes;     // per peak, ordered by peak index
    std::vector<std::array<double, 2>> amplitude_errs;
    double dark_count_level = 0.0;
    std::vector<double> peak_areas;
    double g2_0 = 0.0;
    double g2_0_err = 0.0;
    bool overlap_warning = false; // period < 6 * max(tau1, tau2)
    double residual_norm = 0.0;
    double initial_residual_norm = 0.0;
    bool converged = false;
};

G2Fit fit_g2_pulsed(const std::vector<DataPoint> &histogram, double pulse_period_ns,
                    int n_side_peaks, double dark_rate);

// Paper-style single-photon criterion, stable under the maximum-error bound.
bool single_photon_within_error(const G2Fit &fit);

} // namespace dino::fitkit

#endif // DINO_FITKIT_HPP
