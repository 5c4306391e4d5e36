#include "dino/levmar.hpp"

#include "dino/errors.hpp"

#include <cmath>

namespace dino::levmar
{
namespace
{
Eigen::MatrixXd numeric_jacobian(const ResidualFn &residuals, const Eigen::VectorXd &x,
                                 const Eigen::VectorXd &r0)
{
    const auto n = x.size();
    const auto m = r0.size();
    Eigen::MatrixXd jac(m, n);
    const double sqrt_eps = std::sqrt(2.220446049250313e-16);
    for (Eigen::Index j = 0; j < n; ++j)
    {
        const double h = sqrt_eps * std::max(std::abs(x[j]), 1.0);
        Eigen::VectorXd xh = x;
        xh[j] += h;
        jac.col(j) = (residuals(xh) - r0) / h;
    }
    return jac;
}
} // namespace

Fit fit_least_squares(const ResidualFn &residuals, Eigen::VectorXd x0, const Options &options)
{
    Fit fit;
    Eigen::VectorXd x = std::move(x0);
    Eigen::VectorXd r = residuals(x);
    if (!r.allFinite())
    {
        throw NumericalError("levmar: residuals not finite at the initial point");
    }
    double cost = 0.5 * r.squaredNorm();
    fit.initial_residual_norm = std::sqrt(2.0 * cost);

    const auto n = x.size();
    double damping = options.initial_damping;
    bool converged = false;

    Eigen::MatrixXd jac = numeric_jacobian(residuals, x, r);
    for (int iter = 0; iter < options.max_iterations; ++iter)
    {
        fit.iterations = iter + 1;
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd gradient = jac.transpose() * r;

        // Marquardt scaling with a floor so that zero-sensitivity parameters
        // cannot make the damped system singular.
        Eigen::VectorXd diag = jtj.diagonal();
        const double diag_floor = std::max(1e-12, 1e-12 * diag.maxCoeff());
        for (Eigen::Index i = 0; i < n; ++i)
        {
            diag[i] = std::max(diag[i], diag_floor);
        }

        bool stepped = false;
        while (damping <= options.max_damping)
        {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += damping * diag;
            const Eigen::VectorXd step = a.ldlt().solve(-gradient);
            if (!step.allFinite())
            {
                damping *= 10.0;
                continue;
            }
            const Eigen::VectorXd x_new = x + step;
            const Eigen::VectorXd r_new = residuals(x_new);
            if (r_new.allFinite())
            {
                const double cost_new = 0.5 * r_new.squaredNorm();
                if (cost_new < cost)
                {
                    const double improvement = (cost - cost_new) / std::max(cost, 1e-300);
                    const double step_rel = step.norm() / std::max(x.norm(), 1.0);
                    x = x_new;
                    r = r_new;
                    cost = cost_new;
                    damping = std::max(damping * 0.1, 1e-12);
                    stepped = true;
                    if (improvement < options.ftol || step_rel < options.xtol)
                    {
                        converged = true;
                    }
                    break;
                }
            }
            damping *= 10.0;
        }
        if (!stepped)
        {
            // No improving step exists at any damping: stationary point.
            converged = true;
        }
        if (converged)
        {
            break;
        }
        jac = numeric_jacobian(residuals, x, r);
    }

    fit.params = x;
    fit.residual_norm = std::sqrt(2.0 * cost);
    fit.converged = converged;

    // Covariance from the SVD of the final Jacobian; a pseudo-inverse keeps
    // degenerate problems finite while letting their variances blow up.
    jac = numeric_jacobian(residuals, x, r);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd &sv = svd.singularValues();
    const double sv_max = sv.size() > 0 ? sv[0] : 0.0;
    const double cond_cut = sv_max * 1e-12;
    fit.ill_conditioned = sv_max <= 0.0 || sv[sv.size() - 1] <= cond_cut;

    const auto m = r.size();
    const double dof = static_cast<double>(m > n ? m - n : 1);
    const double sigma_sq = 2.0 * cost / dof;
    Eigen::VectorXd inv_sq(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
    {
        const double floor = std::max(cond_cut, 1e-150);
        const double s = std::max(sv[i], floor);
        inv_sq[i] = 1.0 / (s * s);
    }
    fit.covariance = sigma_sq * svd.matrixV() * inv_sq.asDiagonal() * svd.matrixV().transpose();
    fit.std_errors = fit.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    return fit;
}

} // namespace dino::levmar
