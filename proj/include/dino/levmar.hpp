#ifndef DINO_LEVMAR_HPP
#define DINO_LEVMAR_HPP

#include <Eigen/Dense>

#include <functional>

namespace dino::levmar
{
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd &)>;

struct Options
{
    int max_iterations = 400;
    double ftol = 1e-14;          // relative cost improvement
    double xtol = 1e-14;          // relative step size
    double initial_damping = 1e-3;
    double max_damping = 1e14;
};

struct Fit
{
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;   // sigma^2 (J^T J)^+ at the solution
    Eigen::VectorXd std_errors;   // sqrt(diag(covariance))
    double residual_norm = 0.0;   // ||r|| at the solution
    double initial_residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool ill_conditioned = false; // Jacobian condition number beyond 1e12
};

// Levenberg-Marquardt least squares with a forward-difference Jacobian.
// Only improving steps are accepted, so the returned residual norm never
// exceeds the initial one.
Fit fit_least_squares(const ResidualFn &residuals, Eigen::VectorXd x0, const Options &options = {});

} // namespace dino::levmar

#endif // DINO_LEVMAR_HPP
