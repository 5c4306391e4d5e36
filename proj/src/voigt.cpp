#include "dino/voigt.hpp"

#include "dino/constants.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace dino::math
{
namespace
{
constexpr int kWeidemanN = 64;

struct WeidemanTable
{
    double L = 0.0;
    std::array<double, kWeidemanN> coeff{}; // highest power first
};

// Fourier construction of the rational-approximation coefficients
// (Weideman, SIAM J. Numer. Anal. 31, 1994).
WeidemanTable build_weideman_table()
{
    WeidemanTable table;
    const int N = kWeidemanN;
    const int M = 2 * N;
    const int M2 = 2 * M;
    table.L = std::sqrt(static_cast<double>(N) / std::sqrt(2.0));

    // Sampled function values, index i corresponds to k = i - M (k = -M..M-1
    // with f(k=-M) := 0), then rotated by M (fftshift).
    std::vector<double> samples(static_cast<std::size_t>(M2), 0.0);
    for (int k = -M + 1; k <= M - 1; ++k)
    {
        const double theta = static_cast<double>(k) * kPi / static_cast<double>(M);
        const double t = table.L * std::tan(0.5 * theta);
        const double f = (t * t > 700.0) ? 0.0 : std::exp(-t * t) * (table.L * table.L + t * t);
        samples[static_cast<std::size_t>(k + M)] = f;
    }
    std::vector<double> shifted(static_cast<std::size_t>(M2));
    for (int i = 0; i < M2; ++i)
    {
        shifted[static_cast<std::size_t>(i)] = samples[static_cast<std::size_t>((i + M) % M2)];
    }

    // Direct DFT; only the first N+1 coefficients are needed and the input is
    // tiny, so no FFT machinery is warranted.
    for (int n = 1; n <= N; ++n)
    {
        double re = 0.0;
        for (int i = 0; i < M2; ++i)
        {
            const double angle = -2.0 * kPi * static_cast<double>(n) * static_cast<double>(i) /
                                 static_cast<double>(M2);
            re += shifted[static_cast<std::size_t>(i)] * std::cos(angle);
        }
        // Stored highest-power-first for Horner: p(Z) = sum_n A_n Z^{n-1}.
        table.coeff[static_cast<std::size_t>(N - n)] = re / static_cast<double>(M2);
    }
    return table;
}

const WeidemanTable &weideman_table()
{
    static const WeidemanTable table = build_weideman_table();
    return table;
}

constexpr double kInvSqrtPi = 0.5641895835477562869; // 1/sqrt(pi)
} // namespace

std::complex<double> faddeeva(std::complex<double> z)
{
    // Purely real argument: Re w(x) = exp(-x^2) exactly; keep it exact so the
    // Voigt profile degenerates to the Gaussian without approximation error.
    if (z.imag() == 0.0)
    {
        const double x = z.real();
        std::complex<double> w = faddeeva(std::complex<double>(x, 1e-300));
        return {std::exp(-x * x), w.imag()};
    }

    const WeidemanTable &table = weideman_table();
    const std::complex<double> iz(-z.imag(), z.real()); // i*z
    const std::complex<double> lmiz = table.L - iz;     // L - i*z
    const std::complex<double> Z = (table.L + iz) / lmiz;

    std::complex<double> poly(0.0, 0.0);
    for (const double c : table.coeff)
    {
        poly = poly * Z + c;
    }
    return 2.0 * poly / (lmiz * lmiz) + kInvSqrtPi / lmiz;
}

double gaussian_profile(double x, double sigma)
{
    const double u = x / sigma;
    return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * kPi));
}

double lorentzian_profile(double x, double gamma)
{
    return (gamma / kPi) / (x * x + gamma * gamma);
}

double voigt_profile(double x, double sigma, double gamma)
{
    sigma = std::abs(sigma);
    gamma = std::abs(gamma);
    if (sigma < 1e-12 * std::max(1.0, gamma))
    {
        return lorentzian_profile(x, gamma);
    }
    if (gamma == 0.0)
    {
        return gaussian_profile(x, sigma);
    }
    const double scale = 1.0 / (sigma * std::sqrt(2.0));
    const std::complex<double> z(x * scale, gamma * scale);
    return faddeeva(z).real() * scale / std::sqrt(kPi);
}

} // namespace dino::math
