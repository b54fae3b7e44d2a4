#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace sovrisk {

struct ProbitFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd se;
    Eigen::MatrixXd cov;
    double loglik = 0;
    double null_loglik = 0; // intercept-only reference
    Eigen::VectorXd index;  // X * coef per row
    int iterations = 0;
    int n = 0;
};

// Probit maximum likelihood via Newton (Fisher scoring); converged gradient
// norm < 1e-8. Throws DataError when y is not binary with both classes, and
// NumericError on perfect separation or non-convergence.
ProbitFit probit_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

enum class HeckmanMethod { two_step, ml };

struct HeckmanFit {
    HeckmanMethod method = HeckmanMethod::two_step;
    ProbitFit first_stage;
    Eigen::VectorXd outcome_coef; // aligned with the W columns
    Eigen::VectorXd outcome_se;
    double mills_coef = 0; // two_step: coefficient on the inverse Mills ratio
    double mills_se = 0;
    double rho = 0;
    double sigma = 0;
    double rho_se = 0;   // ml only
    double sigma_se = 0; // ml only
    double loglik = 0;   // ml only
    int n_selected = 0;
    int n_total = 0;
    bool no_exclusion_warning = false; // W spans the selection regressors
    bool converged = true;
};

// Heckman selection model. X drives the probit selection equation over all n
// rows; W and y are the outcome design and response with only the rows where
// s == 1 used. two_step applies the inverse-Mills correction with
// Heckman-corrected standard errors; ml maximizes the joint bivariate-normal
// likelihood with rho reparameterized through tanh.
HeckmanFit heckman(const Eigen::MatrixXd& X, const Eigen::VectorXd& s,
                   const Eigen::MatrixXd& W, const Eigen::VectorXd& y,
                   HeckmanMethod method);

struct IvGmmFit {
    Eigen::VectorXd coef; // exogenous columns first, endogenous last
    Eigen::VectorXd se;   // heteroskedasticity-robust
    double hansen_j = 0;
    double hansen_p = 1;
    int hansen_df = 0;
    bool hansen_applicable = false; // false when exactly identified
    double kp_stat = 0; // Kleibergen-Paap rk LM underidentification statistic
    double kp_p = 1;
    int kp_df = 0;
    int n = 0;
};

// Two-step efficient GMM for a linear model with one endogenous regressor.
// X_exog enters both the regressor and instrument sets (include the constant
// there); Z holds the excluded instruments.
IvGmmFit iv_gmm(const Eigen::VectorXd& y, const Eigen::MatrixXd& X_exog,
                const Eigen::VectorXd& x_endog, const Eigen::MatrixXd& Z);

} // namespace sovrisk
