#include "sovrisk/optim.hpp"

#include <cmath>
#include <limits>

namespace sovrisk {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const ObjectiveFn& f, const Eigen::VectorXd& x) {
    double v = f(x);
    return std::isfinite(v) ? v : kInf;
}
} // namespace

Eigen::VectorXd numerical_gradient(const ObjectiveFn& f, const Eigen::VectorXd& x,
                                   double rel_step) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double h = rel_step * (1.0 + std::fabs(x[i]));
        xp[i] = x[i] + h;
        double fp = f(xp);
        xp[i] = x[i] - h;
        double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Eigen::MatrixXd numerical_hessian(const ObjectiveFn& f, const Eigen::VectorXd& x,
                                  double rel_step) {
    Eigen::Index n = x.size();
    Eigen::MatrixXd H(n, n);
    Eigen::VectorXd h(n);
    for (Eigen::Index i = 0; i < n; ++i) h[i] = rel_step * (1.0 + std::fabs(x[i]));
    double f0 = f(x);
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            double v;
            if (i == j) {
                xp[i] = x[i] + h[i];
                double fpp = f(xp);
                xp[i] = x[i] - h[i];
                double fmm = f(xp);
                xp[i] = x[i];
                v = (fpp - 2.0 * f0 + fmm) / (h[i] * h[i]);
            } else {
                xp[i] = x[i] + h[i]; xp[j] = x[j] + h[j];
                double fpp = f(xp);
                xp[j] = x[j] - h[j];
                double fpm = f(xp);
                xp[i] = x[i] - h[i]; xp[j] = x[j] + h[j];
                double fmp = f(xp);
                xp[j] = x[j] - h[j];
                double fmm = f(xp);
                xp[i] = x[i]; xp[j] = x[j];
                v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            }
            H(i, j) = H(j, i) = v;
        }
    }
    return H;
}

OptimResult bfgs_minimize(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                          const OptimOptions& opts) {
    const Eigen::Index n = x0.size();
    Eigen::VectorXd x = x0;
    double fx = safe_eval(f, x);
    Eigen::VectorXd g = numerical_gradient(f, x, opts.grad_step);
    Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);

    OptimResult res;
    res.converged = false;
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        if (!g.allFinite()) break;
        Eigen::VectorXd p = -Hinv * g;
        double slope = g.dot(p);
        if (slope >= 0) { // reset on loss of descent direction
            Hinv.setIdentity();
            p = -g;
            slope = g.dot(p);
            if (slope >= 0) break; // zero gradient
        }

        // Backtracking Armijo search.
        double alpha = 1.0;
        double fnew = kInf;
        Eigen::VectorXd xnew;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            xnew = x + alpha * p;
            fnew = safe_eval(f, xnew);
            if (fnew <= fx + 1e-4 * alpha * slope) { accepted = true; break; }
            alpha *= 0.5;
        }
        if (!accepted) break;

        Eigen::VectorXd gnew = numerical_gradient(f, xnew, opts.grad_step);
        Eigen::VectorXd s = xnew - x;
        Eigen::VectorXd y = gnew - g;
        double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            double rho = 1.0 / sy;
            Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            Hinv = (I - rho * s * y.transpose()) * Hinv *
                       (I - rho * y * s.transpose()) +
                   rho * s * s.transpose();
        } else {
            Hinv.setIdentity();
        }

        double rel_change = std::fabs(fx - fnew) / (1.0 + std::fabs(fx));
        x = xnew;
        fx = fnew;
        g = gnew;
        if (rel_change < opts.tol && g.norm() < 1e-3 * (1.0 + std::fabs(fx))) {
            res.converged = true;
            ++iter;
            break;
        }
    }

    res.x = x;
    res.fmin = fx;
    res.iterations = iter;
    res.grad_norm = g.allFinite() ? g.norm() : kInf;
    if (!res.converged && res.grad_norm < 1e-5 * (1.0 + std::fabs(fx)))
        res.converged = true;
    return res;
}

} // namespace sovrisk
