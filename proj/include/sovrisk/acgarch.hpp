#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sovrisk/features.hpp"
#include "sovrisk/optim.hpp"

namespace sovrisk {

enum class InMeanTransform { identity, ln, sqrt_ };
enum class AsymmetryMode { negative_residual, unrest_dummy };
enum class Innovation { student_t, ged };

std::string to_string(InMeanTransform t);
InMeanTransform parse_in_mean_transform(const std::string& s);
Innovation parse_innovation(const std::string& s);
AsymmetryMode parse_asymmetry_mode(const std::string& s);

// Model layout: which design-matrix columns play which part in the mean and
// variance equations. Parameters may be pinned via `fixed` (by report name),
// which is how nested models (plain GARCH, no-leverage, ...) are expressed.
struct AcgarchSpec {
    std::string dependent;
    bool include_lagged_dependent = true;
    std::vector<std::string> unrest_columns;
    std::vector<std::string> control_columns;
    bool include_in_mean = true;
    InMeanTransform in_mean_transform = InMeanTransform::identity;
    std::vector<std::string> longrun_exog;
    std::vector<std::string> shortrun_exog;
    AsymmetryMode asymmetry_mode = AsymmetryMode::negative_residual;
    std::string asymmetry_column; // required for unrest_dummy mode
    Innovation innovation = Innovation::student_t;
    std::map<std::string, double> fixed;
};

// Mean equation  y_t = mu + phi_lag y_{t-1} + beta'U_t + rho'M_t
//                      + delta g(sigma2_t) + eps_t
// Long-run      q_t = omega + rho_q (q_{t-1} - omega)
//                      + phi_q (eps2_{t-1} - sigma2_{t-1}) + theta1'Z1_t
// Short-run     sigma2_t - q_t = alpha_s (eps2_{t-1} - q_{t-1})
//                      + kappa_lev (eps2_{t-1} - q_{t-1}) d_{t-1}
//                      + beta_s (sigma2_{t-1} - q_{t-1}) + theta2'Z2_t
struct AcgarchParams {
    double mu = 0;
    double phi_lag = 0;
    std::vector<double> beta_unrest;
    std::vector<double> rho_controls;
    double delta_mean = 0;
    double omega = 0.1;
    double rho_q = 0.95;
    double phi_q = 0.03;
    std::vector<double> theta1;
    double alpha_s = 0.05;
    double kappa_lev = 0.0;
    double beta_s = 0.85;
    std::vector<double> theta2;
    double shape = 8.0; // nu > 2 for student_t, > 0 for ged

    void validate(Innovation innovation) const;
};

struct ConvergenceReport {
    int iterations = 0;
    double grad_norm = 0;
    int restarts = 0;
    int floored_count = 0;   // variance-floor activations during filtering
    bool floor_warning = false; // flooring hit on >= 1% of observations
    bool converged = false;
};

struct AcgarchFit {
    AcgarchSpec spec;
    AcgarchParams params;
    std::vector<std::string> param_names;
    std::vector<double> estimates;      // aligned with param_names
    std::vector<double> std_errors;     // aligned with param_names
    double loglik = 0;
    int n_obs = 0;
    int n_params = 0;
    double aic = 0; // per-observation: (-2 ll + 2 k) / n
    double bic = 0; // per-observation: (-2 ll + k ln n) / n
    double adj_r2 = 0;
    std::vector<double> sigma2_path; // aligned with usable observations
    std::vector<double> q_path;
    std::vector<double> fitted_mean;
    ConvergenceReport convergence;

    double tstat(size_t i) const;
};

struct AcgarchFitOptions {
    int multistarts = 5;
    double tol = 1e-6;
    int max_iter = 500;
    uint64_t seed = 1; // multistart jitter
    bool robust_se = false;
};

struct AcgarchSim {
    std::vector<double> y;
    std::vector<double> sigma2;
    std::vector<double> q;
};

// Prepared (spec, data) pair: validates columns, extracts dense arrays, and
// evaluates the filtered likelihood.
class AcgarchModel {
public:
    AcgarchModel(AcgarchSpec spec, const DesignMatrix& data);

    const AcgarchSpec& spec() const { return spec_; }
    int n_obs() const { return n_obs_; }
    int n_free_params() const;
    std::vector<std::string> free_param_names() const;
    std::vector<std::string> all_param_names() const;

    double loglik(const AcgarchParams& p) const; // throws on invalid/non-finite

    struct Paths {
        std::vector<double> sigma2, q, eps, mean;
        int floored = 0;
        std::optional<int> bad_t; // first non-finite intermediate
        double loglik = 0;
    };
    Paths filter(const AcgarchParams& p) const;

    // transformed (unconstrained) <-> constrained parameters
    Eigen::VectorXd pack(const AcgarchParams& p) const;
    AcgarchParams unpack(const Eigen::VectorXd& v) const;

    AcgarchParams start_params() const; // OLS + variance targeting

    AcgarchFit fit(const AcgarchFitOptions& opts = {}) const;

private:
    AcgarchSpec spec_;
    int n_rows_ = 0;
    int t0_ = 0; // first usable observation
    int n_obs_ = 0;
    std::vector<double> y_;
    std::vector<std::vector<double>> unrest_, controls_, z1_, z2_;
    std::vector<double> asym_dummy_; // unrest_dummy mode
    double init_var_ = 1.0;          // OLS residual variance
    std::vector<double> ols_coef_;   // mu, [phi], beta..., rho...
    std::vector<double> neg_d_;      // negative_residual indicator, fixed from
                                     // the preliminary OLS residual signs so
                                     // the likelihood stays smooth
};

double acgarch_loglik(const AcgarchSpec& spec, const AcgarchParams& params,
                      const DesignMatrix& data);

AcgarchFit acgarch_fit(const AcgarchSpec& spec, const DesignMatrix& data,
                       const AcgarchFitOptions& opts = {});

// Deterministic simulation of the recursions with unit-variance innovations
// drawn from the spec's distribution. Exogenous regressors come from `exog`.
AcgarchSim acgarch_simulate(const AcgarchSpec& spec, const AcgarchParams& params,
                            int T, uint64_t seed, const DesignMatrix& exog,
                            int burn_in = 200);

struct TransformSelection {
    InMeanTransform chosen;
    std::map<InMeanTransform, AcgarchFit> fits;
    bool use_bic = false;
};

// Fits all three in-mean transforms and keeps the information-criterion
// winner; deterministic preference identity > ln > sqrt on ties within 1e-9.
TransformSelection select_in_mean_transform(const AcgarchSpec& spec,
                                            const DesignMatrix& data,
                                            const AcgarchFitOptions& opts = {},
                                            bool use_bic = false);

} // namespace sovrisk
