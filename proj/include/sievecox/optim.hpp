#pragma once
// Dense quasi-Newton maximizer (BFGS, backtracking line search with the
// Armijo condition, step halving). Used for marginal-likelihood fits where
// the objective is smooth and unconstrained after reparameterization.

#include <Eigen/Dense>
#include <functional>
#include <limits>

namespace sievecox {

struct OptimOptions {
    double grad_tol = 1e-6;      // infinity norm of the gradient
    int max_iter = 500;
    double armijo_c = 1e-4;
    int max_halvings = 40;
};

struct OptimResult {
    Eigen::VectorXd x;
    double value = -std::numeric_limits<double>::infinity();
    double grad_inf_norm = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

// objective(x, grad) returns the value and fills grad with the exact gradient.
using Objective =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

inline OptimResult bfgs_maximize(const Objective& objective,
                                 const Eigen::VectorXd& x0,
                                 const OptimOptions& opts = {}) {
    const Eigen::Index dim = x0.size();
    OptimResult out;
    out.x = x0;

    Eigen::VectorXd grad(dim), grad_new(dim);
    double value = objective(out.x, grad);
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(dim, dim);

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        out.iterations = iter;
        out.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
        if (out.grad_inf_norm < opts.grad_tol) {
            out.converged = true;
            break;
        }

        Eigen::VectorXd direction = hinv * grad;
        double slope = grad.dot(direction);
        if (!(slope > 0.0)) {
            // curvature information went bad; restart from steepest ascent
            hinv.setIdentity();
            direction = grad;
            slope = grad.squaredNorm();
            if (!(slope > 0.0)) break;
        }

        double step = 1.0;
        double value_new = -std::numeric_limits<double>::infinity();
        Eigen::VectorXd x_new;
        bool accepted = false;
        for (int h = 0; h < opts.max_halvings; ++h) {
            x_new = out.x + step * direction;
            value_new = objective(x_new, grad_new);
            if (std::isfinite(value_new) &&
                value_new >= value + opts.armijo_c * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // line search stalled; report last iterate

        const Eigen::VectorXd s = x_new - out.x;
        const Eigen::VectorXd y = grad - grad_new;  // negated-gradient convention
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const Eigen::VectorXd hy = hinv * y;
            const double yhy = y.dot(hy);
            hinv += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
                    (hy * s.transpose() + s * hy.transpose()) / sy;
        } else {
            hinv.setIdentity();
        }

        out.x = x_new;
        value = value_new;
        grad = grad_new;
    }

    out.value = value;
    out.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
    if (out.grad_inf_norm < opts.grad_tol) out.converged = true;
    return out;
}

}  // namespace sievecox
