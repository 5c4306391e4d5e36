#ifndef DINO_QUADRATURE_HPP
#define DINO_QUADRATURE_HPP

#include <functional>

namespace dino::quad
{
struct Result
{
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

// Adaptive Simpson integration on [a, b] to an absolute tolerance.
// Throws NumericalError when the requested tolerance cannot be met; the
// non-throwing variant reports the achieved estimate instead.
Result integrate_adaptive(const std::function<double(double)> &f, double a, double b,
                          double abs_tol, int max_depth = 40);

double integrate(const std::function<double(double)> &f, double a, double b,
                 double abs_tol = 1e-10);

// Fixed-order Gauss-Legendre rule on [a, b] (n in {8, 16, 32}).
double gauss_legendre(const std::function<double(double)> &f, double a, double b, int n = 32);

} // namespace dino::quad

#endif // DINO_QUADRATURE_HPP
