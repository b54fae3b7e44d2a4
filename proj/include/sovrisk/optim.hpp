#pragma once

#include <Eigen/Dense>

#include <functional>

namespace sovrisk {

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;

struct OptimOptions {
    double tol = 1e-8;      // relative objective-change stopping rule
    int max_iter = 500;
    double grad_step = 1e-6; // relative central-difference step
};

struct OptimResult {
    Eigen::VectorXd x;
    double fmin = 0;        // minimized objective value
    int iterations = 0;
    double grad_norm = 0;
    bool converged = false;
};

// Central-difference gradient with per-coordinate step h*(1+|x_i|). This is
// the optimizer's internal gradient; tests diff it against an independent
// finite-difference evaluation.
Eigen::VectorXd numerical_gradient(const ObjectiveFn& f, const Eigen::VectorXd& x,
                                   double rel_step = 1e-6);

// Central-difference Hessian (for observed-information standard errors).
Eigen::MatrixXd numerical_hessian(const ObjectiveFn& f, const Eigen::VectorXd& x,
                                  double rel_step = 1e-4);

// BFGS minimizer with backtracking Armijo line search. Accepted steps never
// increase the objective.
OptimResult bfgs_minimize(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                          const OptimOptions& opts = {});

} // namespace sovrisk
