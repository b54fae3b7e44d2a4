#include "sovrisk/selection.hpp"

#include <cmath>
#include <numbers>

#include "sovrisk/dist.hpp"
#include "sovrisk/error.hpp"
#include "sovrisk/linreg.hpp"
#include "sovrisk/optim.hpp"

namespace sovrisk {

namespace {

double probit_loglik(const Eigen::VectorXd& index, const Eigen::VectorXd& y) {
    double ll = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        double p = norm_cdf(index[i]);
        p = std::min(std::max(p, 1e-15), 1.0 - 1e-15);
        ll += y[i] > 0.5 ? std::log(p) : std::log1p(-p);
    }
    return ll;
}

} // namespace

ProbitFit probit_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const Eigen::Index n = X.rows(), k = X.cols();
    if (y.size() != n) throw DataError("probit: X and y row counts differ");
    int ones = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y[i] != 0.0 && y[i] != 1.0)
            throw DataError("probit: response must be 0/1");
        ones += y[i] > 0.5;
    }
    if (ones == 0 || ones == n)
        throw DataError("probit: response takes a single value; both classes required");
    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
        if (qr.rank() < k) throw DataError("probit: design matrix is rank deficient");
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    ProbitFit fit;
    fit.n = static_cast<int>(n);
    double pbar = static_cast<double>(ones) / n;
    fit.null_loglik = ones * std::log(pbar) + (n - ones) * std::log1p(-pbar);

    for (int iter = 0; iter < 200; ++iter) {
        Eigen::VectorXd idx = X * beta;
        Eigen::VectorXd g = Eigen::VectorXd::Zero(k);
        Eigen::MatrixXd info = Eigen::MatrixXd::Zero(k, k);
        for (Eigen::Index i = 0; i < n; ++i) {
            double z = idx[i];
            double phi = norm_pdf(z);
            double Phi = std::min(std::max(norm_cdf(z), 1e-12), 1.0 - 1e-12);
            double w = phi * phi / (Phi * (1.0 - Phi));
            double score = phi * (y[i] - Phi) / (Phi * (1.0 - Phi));
            g.noalias() += score * X.row(i).transpose();
            info.noalias() += w * X.row(i).transpose() * X.row(i);
        }
        Eigen::VectorXd step = info.ldlt().solve(g);
        if (!step.allFinite())
            throw NumericError("probit: singular information matrix");
        beta += step;
        fit.iterations = iter + 1;
        if (beta.cwiseAbs().maxCoeff() > 1e3 || idx.cwiseAbs().maxCoeff() > 1e4)
            throw NumericError(
                "probit: diverging coefficients (perfect separation)");
        if (g.norm() < 1e-8) {
            fit.coef = beta;
            fit.index = X * beta;
            fit.loglik = probit_loglik(fit.index, y);
            // a perfect in-sample fit means the classes are separable and
            // the true maximizer sits at infinity
            if (fit.loglik > -1e-3)
                throw NumericError(
                    "probit: diverging coefficients (perfect separation)");
            fit.cov = info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
            fit.se = fit.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
            return fit;
        }
    }
    throw NumericError("probit: Newton iterations failed to converge");
}

HeckmanFit heckman(const Eigen::MatrixXd& X, const Eigen::VectorXd& s,
                   const Eigen::MatrixXd& W, const Eigen::VectorXd& y,
                   HeckmanMethod method) {
    const Eigen::Index n = X.rows();
    if (s.size() != n || W.rows() != n || y.size() != n)
        throw DataError("heckman: row counts differ across inputs");
    int n1 = 0;
    for (Eigen::Index i = 0; i < n; ++i) n1 += s[i] > 0.5;
    if (n1 == n)
        throw DataError("heckman: every row selected; selection model undefined");
    if (n1 < 30) throw DataError("heckman: fewer than 30 selected rows");

    HeckmanFit fit;
    fit.method = method;
    fit.n_total = static_cast<int>(n);
    fit.n_selected = n1;
    fit.first_stage = probit_fit(X, s);

    // selected-row views
    Eigen::MatrixXd W1(n1, W.cols());
    Eigen::VectorXd y1(n1), idx1(n1);
    Eigen::MatrixXd X1(n1, X.cols());
    for (Eigen::Index i = 0, r = 0; i < n; ++i) {
        if (s[i] > 0.5) {
            W1.row(r) = W.row(i);
            X1.row(r) = X.row(i);
            y1[r] = y[i];
            idx1[r] = fit.first_stage.index[i];
            ++r;
        }
    }

    // functional-form-only identification warning: every selection regressor
    // already lies in the span of the outcome regressors
    fit.no_exclusion_warning =
        partial_out(W1, X1).cwiseAbs().maxCoeff() < 1e-8 * (1.0 + X1.cwiseAbs().maxCoeff());

    // two-step estimates double as the ML starting point
    Eigen::VectorXd mills(n1);
    for (Eigen::Index i = 0; i < n1; ++i) mills[i] = inverse_mills(idx1[i]);
    Eigen::MatrixXd Wstar(n1, W.cols() + 1);
    Wstar << W1, mills;
    OlsFit step2 = ols(Wstar, y1);

    const Eigen::Index kw = W.cols();
    double beta_m = step2.coef[kw];
    Eigen::VectorXd delta(n1);
    for (Eigen::Index i = 0; i < n1; ++i)
        delta[i] = mills[i] * (mills[i] + idx1[i]);
    double sigma2 = step2.resid.squaredNorm() / n1 + delta.mean() * beta_m * beta_m;
    double sigma = std::sqrt(sigma2);
    double rho = std::clamp(beta_m / sigma, -0.999, 0.999);

    if (method == HeckmanMethod::two_step) {
        // Heckman-corrected covariance:
        //   sigma2 [W*'W*]^-1 [W*'(I - rho^2 D)W* + rho^2 (W*'D X)V (X'D W*)] [W*'W*]^-1
        double rho2 = rho * rho;
        Eigen::MatrixXd WtW_inv = (Wstar.transpose() * Wstar)
                                      .ldlt()
                                      .solve(Eigen::MatrixXd::Identity(kw + 1, kw + 1));
        Eigen::MatrixXd WD = Wstar.transpose() * delta.asDiagonal();
        Eigen::MatrixXd middle =
            Wstar.transpose() * Wstar - rho2 * (WD * Wstar) +
            rho2 * (WD * X1) * fit.first_stage.cov * (X1.transpose() * delta.asDiagonal() * Wstar);
        Eigen::MatrixXd cov = sigma2 * WtW_inv * middle * WtW_inv;
        Eigen::VectorXd se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();

        fit.outcome_coef = step2.coef.head(kw);
        fit.outcome_se = se.head(kw);
        fit.mills_coef = beta_m;
        fit.mills_se = se[kw];
        fit.rho = rho;
        fit.sigma = sigma;
        return fit;
    }

    // ML: joint bivariate-normal likelihood over selection and outcome
    const Eigen::Index kx = X.cols();
    auto negll = [&](const Eigen::VectorXd& v) -> double {
        Eigen::VectorXd gamma = v.head(kx);
        Eigen::VectorXd beta = v.segment(kx, kw);
        double r = std::tanh(v[kx + kw]);
        double sg = std::exp(v[kx + kw + 1]);
        double sr = std::sqrt(1.0 - r * r);
        double ll = 0;
        Eigen::VectorXd xi = X * gamma;
        for (Eigen::Index i = 0, r1 = 0; i < n; ++i) {
            if (s[i] < 0.5) {
                double p = std::min(std::max(norm_cdf(-xi[i]), 1e-300), 1.0);
                ll += std::log(p);
            } else {
                double e = (y[i] - W.row(i).dot(beta)) / sg;
                double arg = (xi[i] + r * e) / sr;
                double p = std::min(std::max(norm_cdf(arg), 1e-300), 1.0);
                ll += -0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * e * e -
                      std::log(sg) + std::log(p);
                (void)r1;
            }
        }
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };

    Eigen::VectorXd v0(kx + kw + 2);
    v0.head(kx) = fit.first_stage.coef;
    v0.segment(kx, kw) = step2.coef.head(kw);
    v0[kx + kw] = std::atanh(rho);
    v0[kx + kw + 1] = std::log(sigma);

    OptimOptions oo;
    oo.tol = 1e-10;
    oo.max_iter = 1000;
    OptimResult res = bfgs_minimize(negll, v0, oo);
    if (!res.converged)
        throw NumericError("heckman ml: optimizer failed to converge (grad norm " +
                           std::to_string(res.grad_norm) + ")");

    // observed information in the original parameter space
    Eigen::VectorXd orig(kx + kw + 2);
    orig.head(kx + kw) = res.x.head(kx + kw);
    orig[kx + kw] = std::tanh(res.x[kx + kw]);
    orig[kx + kw + 1] = std::exp(res.x[kx + kw + 1]);
    auto negll_orig = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd t = v;
        t[kx + kw] = std::atanh(std::clamp(v[kx + kw], -0.9999999, 0.9999999));
        t[kx + kw + 1] = std::log(std::max(v[kx + kw + 1], 1e-12));
        return negll(t);
    };
    Eigen::MatrixXd H = numerical_hessian(negll_orig, orig, 1e-5);
    Eigen::MatrixXd cov = H.ldlt().solve(
        Eigen::MatrixXd::Identity(kx + kw + 2, kx + kw + 2));
    Eigen::VectorXd se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();

    fit.outcome_coef = orig.segment(kx, kw);
    fit.outcome_se = se.segment(kx, kw);
    fit.rho = orig[kx + kw];
    fit.sigma = orig[kx + kw + 1];
    fit.rho_se = se[kx + kw];
    fit.sigma_se = se[kx + kw + 1];
    fit.mills_coef = fit.rho * fit.sigma;
    fit.loglik = -res.fmin;
    fit.converged = res.converged;
    return fit;
}

IvGmmFit iv_gmm(const Eigen::VectorXd& y, const Eigen::MatrixXd& X_exog,
                const Eigen::VectorXd& x_endog, const Eigen::MatrixXd& Z) {
    const Eigen::Index n = y.size();
    if (X_exog.rows() != n || x_endog.size() != n || Z.rows() != n)
        throw DataError("iv_gmm: row counts differ across inputs");
    const Eigen::Index L = Z.cols();
    if (L < 1) throw DataError("iv_gmm: at least one instrument required");

    const Eigen::Index k1 = X_exog.cols();
    Eigen::MatrixXd W(n, k1 + 1);
    W << X_exog, x_endog;
    Eigen::MatrixXd Zf(n, k1 + L);
    Zf << X_exog, Z;
    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Zf);
        if (qr.rank() < k1 + L)
            throw DataError("iv_gmm: instrument matrix is rank deficient");
    }

    const Eigen::Index km = k1 + L; // moment count
    Eigen::MatrixXd G = Zf.transpose() * W / static_cast<double>(n);
    Eigen::VectorXd Zy = Zf.transpose() * y / static_cast<double>(n);

    // step 1: 2SLS weighting
    Eigen::MatrixXd W1 = (Zf.transpose() * Zf / static_cast<double>(n))
                             .ldlt()
                             .solve(Eigen::MatrixXd::Identity(km, km));
    Eigen::MatrixXd A1 = G.transpose() * W1;
    Eigen::VectorXd b1 = (A1 * G).ldlt().solve(A1 * Zy);

    auto meat = [&](const Eigen::VectorXd& beta) {
        Eigen::VectorXd u = y - W * beta;
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(km, km);
        for (Eigen::Index i = 0; i < n; ++i)
            S.noalias() += (u[i] * u[i]) * Zf.row(i).transpose() * Zf.row(i);
        return Eigen::MatrixXd(S / static_cast<double>(n));
    };

    // step 2: efficient weighting from step-1 residuals
    Eigen::MatrixXd S = meat(b1);
    Eigen::MatrixXd W2 = S.ldlt().solve(Eigen::MatrixXd::Identity(km, km));
    Eigen::MatrixXd A2 = G.transpose() * W2;
    Eigen::MatrixXd bread = (A2 * G).ldlt().solve(
        Eigen::MatrixXd::Identity(k1 + 1, k1 + 1));
    Eigen::VectorXd b2 = bread * (A2 * Zy);

    IvGmmFit fit;
    fit.n = static_cast<int>(n);
    fit.coef = b2;
    fit.se = (bread / static_cast<double>(n)).diagonal().cwiseMax(0.0).cwiseSqrt();

    fit.hansen_df = static_cast<int>(L - 1);
    fit.hansen_applicable = fit.hansen_df > 0;
    if (fit.hansen_applicable) {
        Eigen::VectorXd gbar = Zy - G * b2;
        fit.hansen_j = static_cast<double>(n) * gbar.dot(W2 * gbar);
        fit.hansen_p = pvalue_chisq(fit.hansen_j, fit.hansen_df);
    }

    // Kleibergen-Paap rk LM for one endogenous regressor: robust score test
    // that the partialled instruments carry no first-stage signal
    Eigen::VectorXd xt = partial_out(X_exog, x_endog);
    Eigen::MatrixXd Zt = partial_out(X_exog, Eigen::MatrixXd(Z));
    Eigen::VectorXd zx = Zt.transpose() * xt;
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(L, L);
    for (Eigen::Index i = 0; i < n; ++i)
        V.noalias() += (xt[i] * xt[i]) * Zt.row(i).transpose() * Zt.row(i);
    fit.kp_df = static_cast<int>(L);
    fit.kp_stat = zx.dot(V.ldlt().solve(zx));
    fit.kp_p = pvalue_chisq(fit.kp_stat, fit.kp_df);
    return fit;
}

} // namespace sovrisk
