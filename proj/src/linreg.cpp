#include "sovrisk/linreg.hpp"

#include "sovrisk/error.hpp"

namespace sovrisk {

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool robust) {
    const Eigen::Index n = X.rows(), k = X.cols();
    if (y.size() != n) throw DataError("ols: X and y row counts differ");
    if (n <= k) throw DataError("ols: more regressors than observations");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k) throw DataError("ols: design matrix is rank deficient");

    OlsFit fit;
    fit.n = static_cast<int>(n);
    fit.k = static_cast<int>(k);
    fit.coef = qr.solve(y);
    fit.resid = y - X * fit.coef;
    double ssr = fit.resid.squaredNorm();
    fit.sigma2 = ssr / static_cast<double>(n - k);

    Eigen::MatrixXd xtx_inv =
        (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    if (robust) {
        Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
        for (Eigen::Index i = 0; i < n; ++i) {
            double u2 = fit.resid[i] * fit.resid[i];
            meat.noalias() += u2 * X.row(i).transpose() * X.row(i);
        }
        fit.cov = xtx_inv * meat * xtx_inv;
    } else {
        fit.cov = fit.sigma2 * xtx_inv;
    }
    fit.se = fit.cov.diagonal().cwiseMax(0.0).cwiseSqrt();

    double ybar = y.mean();
    double sst = (y.array() - ybar).square().sum();
    fit.r2 = sst > 0 ? 1.0 - ssr / sst : 0.0;
    fit.adj_r2 = 1.0 - (1.0 - fit.r2) * (n - 1.0) / (n - k);
    return fit;
}

Eigen::VectorXd partial_out(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    return y - X * X.colPivHouseholderQr().solve(y);
}

Eigen::MatrixXd partial_out(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
    return Y - X * X.colPivHouseholderQr().solve(Y);
}

} // namespace sovrisk
