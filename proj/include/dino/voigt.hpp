#ifndef DINO_VOIGT_HPP
#define DINO_VOIGT_HPP

#include <complex>

namespace dino::math
{
// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im(z) >= 0, via
// Weideman's rational approximation (N = 64 terms).
std::complex<double> faddeeva(std::complex<double> z);

// Area-normalized Voigt profile: Gaussian (sigma) convolved with Lorentzian
// (half-width gamma). Degenerates to the pure Gaussian or Lorentzian when the
// other width vanishes.
double voigt_profile(double x, double sigma, double gamma);

double gaussian_profile(double x, double sigma);
double lorentzian_profile(double x, double gamma);

} // namespace dino::math

#endif // DINO_VOIGT_HPP
