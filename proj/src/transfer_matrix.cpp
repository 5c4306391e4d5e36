#include "dino/transfer_matrix.hpp"

#include "dino/constants.hpp"
#include "dino/errors.hpp"

#include <cmath>
#include <sstream>

namespace dino::tmm
{
Mat2 layer_matrix(const Layer &layer, double nu_THz)
{
    const std::complex<double> phase = 2.0 * kPi * nu_THz * layer.n * layer.thickness_nm / kSpeedOfLight;
    const std::complex<double> c = std::cos(phase);
    const std::complex<double> s = std::sin(phase);
    const std::complex<double> i(0.0, 1.0);
    return {c, i * s / layer.n, i * layer.n * s, c};
}

Mat2 stack_matrix(std::span<const Layer> layers, double nu_THz)
{
    Mat2 m;
    for (const auto &layer : layers)
    {
        m = m * layer_matrix(layer, nu_THz);
    }
    return m;
}

RT reflect_transmit(double n_in, double n_out, std::span<const Layer> layers, double nu_THz)
{
    if (!(n_in > 0.0) || !(n_out > 0.0))
    {
        throw ValidationError("reflect_transmit: ambient indices must be positive and real");
    }
    const Mat2 m = stack_matrix(layers, nu_THz);
    const std::complex<double> upper = m.m11 + m.m12 * n_out;
    const std::complex<double> lower = m.m21 + m.m22 * n_out;
    const std::complex<double> denom = upper * n_in + lower;

    RT rt;
    rt.r = (upper * n_in - lower) / denom;
    rt.t = 2.0 * n_in / denom;
    rt.R = std::norm(rt.r);
    rt.T = (n_out / n_in) * std::norm(rt.t);
    rt.S = 1.0 - rt.R - rt.T;
    if (rt.S < -1e-9)
    {
        std::ostringstream oss;
        oss << "reflect_transmit: energy bookkeeping violated at nu=" << nu_THz
            << " THz (R+T-1=" << -rt.S << ")";
        throw NumericalError(oss.str());
    }
    return rt;
}

} // namespace dino::tmm
