#pragma once

#include <Eigen/Dense>

namespace sovrisk {

struct OlsFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd se;
    Eigen::VectorXd resid;
    Eigen::MatrixXd cov;
    double sigma2 = 0; // e'e / (n - k)
    double r2 = 0;
    double adj_r2 = 0;
    int n = 0;
    int k = 0;
};

// OLS via QR; robust=true switches to HC0 sandwich standard errors.
// Throws DataError on rank deficiency or n <= k.
OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool robust = false);

// Residual maker: y minus its projection on the columns of X.
Eigen::VectorXd partial_out(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);
Eigen::MatrixXd partial_out(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

} // namespace sovrisk
