#include "dino/fitkit.hpp"

#include "dino/errors.hpp"
#include "dino/voigt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dino::fitkit
{
namespace
{
void require_sorted_x(const std::vector<DataPoint> &points, const char *what)
{
    for (std::size_t i = 1; i < points.size(); ++i)
    {
        if (!(points[i].x > points[i - 1].x))
        {
            throw ValidationError(std::string(what) + ": x values must be strictly increasing");
        }
    }
}

levmar::Fit run_fit(const levmar::ResidualFn &residuals, Eigen::VectorXd init, const char *what)
{
    const levmar::Fit fit = levmar::fit_least_squares(residuals, std::move(init));
    if (!fit.converged)
    {
        throw NumericalError(std::string(what) + ": no convergence after " +
                             std::to_string(fit.iterations) +
                             " iterations; last residual norm " + std::to_string(fit.residual_norm));
    }
    return fit;
}

double median(std::vector<double> values)
{
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Peak-shape initialization: center from the extremum against the edge
// baseline, width from the half-maximum crossings.
struct PeakGuess
{
    double center = 0.0;
    double fwhm = 0.0;
    double height = 0.0; // signed, relative to offset
    double offset = 0.0;
};

PeakGuess guess_peak(const std::vector<DataPoint> &points)
{
    PeakGuess guess;
    const std::size_t n = points.size();
    const std::size_t edge = std::max<std::size_t>(1, n / 10);
    std::vector<double> edges;
    for (std::size_t i = 0; i < edge; ++i)
    {
        edges.push_back(points[i].y);
        edges.push_back(points[n - 1 - i].y);
    }
    guess.offset = median(std::move(edges));

    std::size_t peak_index = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double dev = std::abs(points[i].y - guess.offset);
        if (dev > best)
        {
            best = dev;
            peak_index = i;
        }
    }
    guess.center = points[peak_index].x;
    guess.height = points[peak_index].y - guess.offset;

    const double half = guess.offset + 0.5 * guess.height;
    const auto crosses = [&](std::size_t i) {
        const bool above_prev = (points[i - 1].y - half) * (guess.height > 0 ? 1.0 : -1.0) > 0.0;
        const bool above_here = (points[i].y - half) * (guess.height > 0 ? 1.0 : -1.0) > 0.0;
        return above_prev != above_here;
    };
    double left = points.front().x;
    double right = points.back().x;
    for (std::size_t i = peak_index; i >= 1; --i)
    {
        if (crosses(i))
        {
            left = 0.5 * (points[i - 1].x + points[i].x);
            break;
        }
    }
    for (std::size_t i = peak_index + 1; i < n; ++i)
    {
        if (crosses(i))
        {
            right = 0.5 * (points[i - 1].x + points[i].x);
            break;
        }
    }
    guess.fwhm = right - left;
    if (!(guess.fwhm > 0.0))
    {
        guess.fwhm = 0.25 * (points.back().x - points.front().x);
    }
    return guess;
}
} // namespace

SaturationFit fit_saturation(const std::vector<DataPoint> &points, bool with_linear_background)
{
    const std::size_t min_points = with_linear_background ? 4 : 3;
    if (points.size() < min_points)
    {
        throw ValidationError("fit_saturation: needs at least " + std::to_string(min_points) +
                              " points");
    }
    std::vector<double> powers;
    for (const auto &point : points)
    {
        if (!(point.x > 0.0))
        {
            throw ValidationError("fit_saturation: powers must be positive");
        }
        powers.push_back(point.x);
    }
    std::sort(powers.begin(), powers.end());
    if (std::adjacent_find(powers.begin(), powers.end()) != powers.end())
    {
        throw ValidationError("fit_saturation: powers must be distinct");
    }

    double i_max = points.front().y;
    for (const auto &point : points)
    {
        i_max = std::max(i_max, point.y);
    }

    const auto model = [&](const Eigen::VectorXd &params, double p) {
        double value = params[0] * p / (p + std::abs(params[1]));
        if (with_linear_background)
        {
            value += params[2] * p;
        }
        return value;
    };
    const auto residuals = [&](const Eigen::VectorXd &params) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(points.size()));
        for (std::size_t i = 0; i < points.size(); ++i)
        {
            r[static_cast<Eigen::Index>(i)] = model(params, points[i].x) - points[i].y;
        }
        return r;
    };

    Eigen::VectorXd init(with_linear_background ? 3 : 2);
    init[0] = i_max;
    init[1] = median(powers);
    if (with_linear_background)
    {
        init[2] = 0.0;
    }

    const levmar::Fit fit = run_fit(residuals, init, "fit_saturation");
    SaturationFit out;
    out.i_s = fit.params[0];
    out.p_s = std::abs(fit.params[1]);
    out.i_s_err = fit.std_errors[0];
    out.p_s_err = fit.std_errors[1];
    if (with_linear_background)
    {
        out.background_slope = fit.params[2];
        out.background_slope_err = fit.std_errors[2];
    }
    out.covariance = fit.covariance;
    out.residual_norm = fit.residual_norm;
    out.initial_residual_norm = fit.initial_residual_norm;
    out.converged = fit.converged;
    out.ill_conditioned = fit.ill_conditioned;
    return out;
}

double VoigtFit::peak_height() const
{
    return amplitude * math::voigt_profile(0.0, gaussian_sigma, lorentzian_gamma);
}

VoigtFit fit_voigt(const std::vector<DataPoint> &points)
{
    if (points.size() < 6)
    {
        throw ValidationError("fit_voigt: needs at least 6 points spanning the peak");
    }
    require_sorted_x(points, "fit_voigt");
    const PeakGuess guess = guess_peak(points);

    // params: center, sigma, gamma, amplitude (area), offset
    const auto residuals = [&](const Eigen::VectorXd &params) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(points.size()));
        for (std::size_t i = 0; i < points.size(); ++i)
        {
            const double v = params[3] * math::voigt_profile(points[i].x - params[0],
                                                             params[1], params[2]) +
                             params[4];
            r[static_cast<Eigen::Index>(i)] = v - points[i].y;
        }
        return r;
    };

    Eigen::VectorXd init(5);
    init[0] = guess.center;
    init[1] = guess.fwhm / (2.0 * 2.3548200450309493) * 2.0; // half the width as Gaussian
    init[2] = 0.25 * guess.fwhm;                             // half the width as Lorentzian
    init[4] = guess.offset;
    init[3] = guess.height / math::voigt_profile(0.0, init[1], init[2]);

    const levmar::Fit fit = run_fit(residuals, init, "fit_voigt");
    VoigtFit out;
    out.center = fit.params[0];
    out.gaussian_sigma = std::abs(fit.params[1]);
    out.lorentzian_gamma = std::abs(fit.params[2]);
    out.amplitude = fit.params[3];
    out.offset = fit.params[4];
    out.center_err = fit.std_errors[0];
    out.sigma_err = fit.std_errors[1];
    out.gamma_err = fit.std_errors[2];
    out.amplitude_err = fit.std_errors[3];
    out.offset_err = fit.std_errors[4];
    out.residual_norm = fit.residual_norm;
    out.initial_residual_norm = fit.initial_residual_norm;
    out.converged = fit.converged;
    out.ill_conditioned = fit.ill_conditioned;
    return out;
}

LorentzFit fit_lorentzian(const std::vector<DataPoint> &points)
{
    if (points.size() < 4)
    {
        throw ValidationError("fit_lorentzian: needs at least 4 points");
    }
    require_sorted_x(points, "fit_lorentzian");
    const PeakGuess guess = guess_peak(points);

    // params: center, hwhm, amplitude (height), offset
    const auto residuals = [&](const Eigen::VectorXd &params) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(points.size()));
        for (std::size_t i = 0; i < points.size(); ++i)
        {
            const double dx = points[i].x - params[0];
            const double g = params[1] * params[1];
            const double v = params[2] * g / (dx * dx + g) + params[3];
            r[static_cast<Eigen::Index>(i)] = v - points[i].y;
        }
        return r;
    };

    Eigen::VectorXd init(4);
    init[0] = guess.center;
    init[1] = 0.5 * guess.fwhm;
    init[2] = guess.height;
    init[3] = guess.offset;

    const levmar::Fit fit = run_fit(residuals, init, "fit_lorentzian");
    LorentzFit out;
    out.center = fit.params[0];
    out.fwhm = 2.0 * std::abs(fit.params[1]);
    out.amplitude = fit.params[2];
    out.offset = fit.params[3];
    out.center_err = fit.std_errors[0];
    out.fwhm_err = 2.0 * fit.std_errors[1];
    out.amplitude_err = fit.std_errors[2];
    out.offset_err = fit.std_errors[3];
    out.residual_norm = fit.residual_norm;
    out.initial_residual_norm = fit.initial_residual_norm;
    out.converged = fit.converged;
    out.ill_conditioned = fit.ill_conditioned;
    return out;
}

namespace
{
// Closed-form area of A1 e^{-|u|/tau1} + A2 e^{-|u|/tau2} over |u| <= half.
double peak_component_area(double a1, double a2, double tau1, double tau2, double half)
{
    const auto one_sided = [half](double a, double tau) {
        if (a == 0.0 || tau <= 0.0)
        {
            return 0.0;
        }
        return a * tau * (-std::expm1(-half / tau));
    };
    return 2.0 * (one_sided(a1, tau1) + one_sided(a2, tau2));
}

struct G2Params
{
    double tau1 = 0.0;
    double tau2 = 0.0;
    std::vector<std::array<double, 2>> amplitudes;
};

G2Params unpack_g2(const Eigen::VectorXd &params, int n_peaks)
{
    G2Params out;
    out.tau1 = std::abs(params[0]);
    out.tau2 = std::abs(params[1]);
    out.amplitudes.resize(static_cast<std::size_t>(n_peaks));
    for (int j = 0; j < n_peaks; ++j)
    {
        out.amplitudes[static_cast<std::size_t>(j)] = {params[2 + 2 * j], params[3 + 2 * j]};
    }
    return out;
}

double g2_ratio_from_params(const G2Params &params, int n_side, double half_window,
                            std::vector<double> *areas_out)
{
    const int n_peaks = 2 * n_side + 1;
    std::vector<double> areas(static_cast<std::size_t>(n_peaks));
    for (int j = 0; j < n_peaks; ++j)
    {
        const auto &[a1, a2] = params.amplitudes[static_cast<std::size_t>(j)];
        areas[static_cast<std::size_t>(j)] =
            peak_component_area(a1, a2, params.tau1, params.tau2, half_window);
    }
    double side_mean = 0.0;
    for (int j = 0; j < n_peaks; ++j)
    {
        if (j != n_side)
        {
            side_mean += areas[static_cast<std::size_t>(j)];
        }
    }
    side_mean /= static_cast<double>(n_peaks - 1);
    const double g2 = areas[static_cast<std::size_t>(n_side)] / side_mean;
    if (areas_out != nullptr)
    {
        *areas_out = std::move(areas);
    }
    return g2;
}
} // namespace

G2Fit fit_g2_pulsed(const std::vector<DataPoint> &histogram, double pulse_period_ns,
                    int n_side_peaks, double dark_rate)
{
    if (!(pulse_period_ns > 0.0))
    {
        throw ValidationError("fit_g2_pulsed: pulse period must be positive");
    }
    if (n_side_peaks < 2)
    {
        throw ValidationError("fit_g2_pulsed: needs at least 2 side peaks on each side");
    }
    require_sorted_x(histogram, "fit_g2_pulsed");
    const int n_peaks = 2 * n_side_peaks + 1;
    const double half_window = 0.5 * pulse_period_ns;
    const double span_lo = -(static_cast<double>(n_side_peaks) * pulse_period_ns + half_window);
    const double span_hi = -span_lo;
    if (histogram.front().x > span_lo + half_window || histogram.back().x < span_hi - half_window)
    {
        throw ValidationError(
            "fit_g2_pulsed: histogram does not cover the requested center and side peaks");
    }

    // Dark subtraction, then normalization by the peak count so that the fit
    // is exactly invariant under a uniform rescaling of the histogram.
    std::vector<DataPoint> data = histogram;
    double scale = 0.0;
    for (auto &point : data)
    {
        point.y -= dark_rate;
        scale = std::max(scale, std::abs(point.y));
    }
    if (scale == 0.0)
    {
        throw ValidationError("fit_g2_pulsed: histogram is flat after dark subtraction");
    }
    for (auto &point : data)
    {
        point.y /= scale;
    }

    const auto peak_position = [&](int j) {
        return (static_cast<double>(j) - static_cast<double>(n_side_peaks)) * pulse_period_ns;
    };

    const auto model = [&](const Eigen::VectorXd &params, double tau) {
        const double tau1 = std::abs(params[0]);
        const double tau2 = std::abs(params[1]);
        double value = 0.0;
        for (int j = 0; j < n_peaks; ++j)
        {
            const double d = std::abs(tau - peak_position(j));
            value += params[2 + 2 * j] * std::exp(-d / tau1) + params[3 + 2 * j] * std::exp(-d / tau2);
        }
        return value;
    };
    const auto residuals = [&](const Eigen::VectorXd &params) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(data.size()));
        for (std::size_t i = 0; i < data.size(); ++i)
        {
            r[static_cast<Eigen::Index>(i)] = model(params, data[i].x) - data[i].y;
        }
        return r;
    };

    Eigen::VectorXd init(2 + 2 * n_peaks);
    init[0] = pulse_period_ns / 10.0;
    init[1] = pulse_period_ns / 3.0;
    for (int j = 0; j < n_peaks; ++j)
    {
        const double pos = peak_position(j);
        double height = 0.0;
        for (const auto &point : data)
        {
            if (std::abs(point.x - pos) <= 0.25 * pulse_period_ns)
            {
                height = std::max(height, point.y);
            }
        }
        init[2 + 2 * j] = 0.65 * height;
        init[3 + 2 * j] = 0.35 * height;
    }

    const levmar::Fit fit = run_fit(residuals, init, "fit_g2_pulsed");
    G2Params params = unpack_g2(fit.params, n_peaks);
    std::vector<std::array<double, 2>> amplitude_errs(static_cast<std::size_t>(n_peaks));
    for (int j = 0; j < n_peaks; ++j)
    {
        amplitude_errs[static_cast<std::size_t>(j)] = {fit.std_errors[2 + 2 * j],
                                                       fit.std_errors[3 + 2 * j]};
    }

    // Canonical order tau1 <= tau2.
    if (params.tau1 > params.tau2)
    {
        std::swap(params.tau1, params.tau2);
        for (auto &pair : params.amplitudes)
        {
            std::swap(pair[0], pair[1]);
        }
        for (auto &pair : amplitude_errs)
        {
            std::swap(pair[0], pair[1]);
        }
    }

    G2Fit out;
    out.tau1 = params.tau1;
    out.tau2 = params.tau2;
    out.dark_count_level = dark_rate;
    out.amplitudes = params.amplitudes;
    out.amplitude_errs = amplitude_errs;
    out.overlap_warning = pulse_period_ns < 6.0 * std::max(params.tau1, params.tau2);
    out.residual_norm = fit.residual_norm * scale;
    out.initial_residual_norm = fit.initial_residual_norm * scale;
    out.converged = fit.converged;

    std::vector<double> areas;
    out.g2_0 = g2_ratio_from_params(params, n_side_peaks, half_window, &areas);
    out.peak_areas = areas;
    for (double &area : out.peak_areas)
    {
        area *= scale;
    }

    // tau errors read from the (possibly swapped) ordering.
    const bool swapped = std::abs(fit.params[0]) > std::abs(fit.params[1]);
    out.tau1_err = fit.std_errors[swapped ? 1 : 0];
    out.tau2_err = fit.std_errors[swapped ? 0 : 1];

    // Maximum-error estimation over +-1 sigma corners of the most sensitive
    // parameters (capped at 8).
    struct Sensitivity
    {
        int param_index;
        double impact;
    };
    const Eigen::VectorXd &p0 = fit.params;
    std::vector<Sensitivity> sensitivities;
    for (Eigen::Index i = 0; i < p0.size(); ++i)
    {
        const double sigma = fit.std_errors[i];
        if (sigma <= 0.0)
        {
            continue;
        }
        Eigen::VectorXd shifted = p0;
        shifted[i] += sigma;
        const double g2_shifted =
            g2_ratio_from_params(unpack_g2(shifted, n_peaks), n_side_peaks, half_window, nullptr);
        sensitivities.push_back({static_cast<int>(i), std::abs(g2_shifted - out.g2_0)});
    }
    std::stable_sort(sensitivities.begin(), sensitivities.end(),
                     [](const Sensitivity &a, const Sensitivity &b) { return a.impact > b.impact; });
    const int corner_params = std::min<int>(8, static_cast<int>(sensitivities.size()));
    double max_dev = 0.0;
    for (int mask = 0; mask < (1 << corner_params); ++mask)
    {
        Eigen::VectorXd corner = p0;
        for (int b = 0; b < corner_params; ++b)
        {
            const int idx = sensitivities[static_cast<std::size_t>(b)].param_index;
            corner[idx] += ((mask >> b) & 1) ? fit.std_errors[idx] : -fit.std_errors[idx];
        }
        const double g2_corner =
            g2_ratio_from_params(unpack_g2(corner, n_peaks), n_side_peaks, half_window, nullptr);
        if (std::isfinite(g2_corner))
        {
            max_dev = std::max(max_dev, std::abs(g2_corner - out.g2_0));
        }
    }
    out.g2_0_err = max_dev;
    return out;
}

bool single_photon_within_error(const G2Fit &fit)
{
    return fit.g2_0 + fit.g2_0_err < 0.5;
}

} // namespace dino::fitkit
