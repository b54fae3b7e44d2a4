#include "sovrisk/acgarch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "sovrisk/dist.hpp"
#include "sovrisk/error.hpp"
#include "sovrisk/rng.hpp"

namespace sovrisk {

namespace {

constexpr double kVarFloor = 1e-10;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

double in_mean_g(double sigma2, InMeanTransform t) {
    switch (t) {
        case InMeanTransform::identity: return sigma2;
        case InMeanTransform::ln: return std::log(sigma2);
        case InMeanTransform::sqrt_: return std::sqrt(sigma2);
    }
    return sigma2;
}

std::vector<double> dense_column(const DesignMatrix& data, const std::string& name) {
    const auto& col = data.column(name); // throws if absent, naming the column
    std::vector<double> out(data.n_rows());
    for (size_t t = 0; t < data.n_rows(); ++t) {
        Cell c = col.series.at_index(t);
        if (!c)
            throw DataError("column '" + name + "' missing at " +
                            data.range().first.plus(static_cast<int>(t)).str());
        out[t] = *c;
    }
    return out;
}

} // namespace

std::string to_string(InMeanTransform t) {
    switch (t) {
        case InMeanTransform::identity: return "identity";
        case InMeanTransform::ln: return "ln";
        case InMeanTransform::sqrt_: return "sqrt";
    }
    return "?";
}

InMeanTransform parse_in_mean_transform(const std::string& s) {
    if (s == "identity") return InMeanTransform::identity;
    if (s == "ln") return InMeanTransform::ln;
    if (s == "sqrt") return InMeanTransform::sqrt_;
    throw DataError("unknown in-mean transform '" + s + "'");
}

Innovation parse_innovation(const std::string& s) {
    if (s == "student_t") return Innovation::student_t;
    if (s == "ged") return Innovation::ged;
    throw DataError("unknown innovation '" + s + "'");
}

AsymmetryMode parse_asymmetry_mode(const std::string& s) {
    if (s == "negative_residual") return AsymmetryMode::negative_residual;
    if (s == "unrest_dummy") return AsymmetryMode::unrest_dummy;
    throw DataError("unknown asymmetry mode '" + s + "'");
}

void AcgarchParams::validate(Innovation innovation) const {
    if (!(omega > 0)) throw DataError("acgarch: omega must be > 0");
    if (!(rho_q > 0 && rho_q < 1)) throw DataError("acgarch: rho_q must be in (0,1)");
    if (alpha_s < 0) throw DataError("acgarch: alpha_s must be >= 0");
    if (!(alpha_s + beta_s < 1))
        throw DataError("acgarch: alpha_s + beta_s must be < 1");
    if (alpha_s + kappa_lev / 2.0 < 0)
        throw DataError("acgarch: alpha_s + kappa_lev/2 must be >= 0");
    if (innovation == Innovation::student_t && !(shape > 2))
        throw DataError("acgarch: Student-t requires nu > 2");
    if (innovation == Innovation::ged && !(shape > 0))
        throw DataError("acgarch: GED requires shape > 0");
}

AcgarchModel::AcgarchModel(AcgarchSpec spec, const DesignMatrix& data)
    : spec_(std::move(spec)) {
    for (const auto& u : spec_.unrest_columns)
        if (u == spec_.dependent)
            throw DataError("acgarch: dependent '" + u + "' cannot also be a regressor");
    for (const auto& c : spec_.control_columns)
        if (c == spec_.dependent)
            throw DataError("acgarch: dependent '" + c + "' cannot also be a regressor");

    n_rows_ = static_cast<int>(data.n_rows());
    y_ = dense_column(data, spec_.dependent);
    for (const auto& u : spec_.unrest_columns) unrest_.push_back(dense_column(data, u));
    for (const auto& c : spec_.control_columns) controls_.push_back(dense_column(data, c));
    for (const auto& z : spec_.longrun_exog) z1_.push_back(dense_column(data, z));
    for (const auto& z : spec_.shortrun_exog) z2_.push_back(dense_column(data, z));
    if (spec_.asymmetry_mode == AsymmetryMode::unrest_dummy) {
        if (spec_.asymmetry_column.empty())
            throw DataError("acgarch: unrest_dummy asymmetry needs asymmetry_column");
        asym_dummy_ = dense_column(data, spec_.asymmetry_column);
    }

    t0_ = spec_.include_lagged_dependent ? 1 : 0;
    n_obs_ = n_rows_ - t0_;
    if (n_obs_ < 3) throw DataError("acgarch: too few rows");

    double ymin = *std::min_element(y_.begin(), y_.end());
    double ymax = *std::max_element(y_.begin(), y_.end());
    if (ymax - ymin < 1e-12)
        throw DataError("acgarch: constant dependent variable '" + spec_.dependent + "'");

    // OLS of the mean equation (without the in-mean term) for starting
    // values and the variance-path initialization.
    int k = 1 + (spec_.include_lagged_dependent ? 1 : 0) +
            static_cast<int>(unrest_.size() + controls_.size());
    Eigen::MatrixXd X(n_obs_, k);
    Eigen::VectorXd yy(n_obs_);
    for (int t = t0_; t < n_rows_; ++t) {
        int r = t - t0_, c = 0;
        X(r, c++) = 1.0;
        if (spec_.include_lagged_dependent) X(r, c++) = y_[static_cast<size_t>(t - 1)];
        for (const auto& u : unrest_) X(r, c++) = u[static_cast<size_t>(t)];
        for (const auto& m : controls_) X(r, c++) = m[static_cast<size_t>(t)];
        yy(r) = y_[static_cast<size_t>(t)];
    }
    Eigen::VectorXd beta = X.colPivHouseholderQr().solve(yy);
    Eigen::VectorXd resid = yy - X * beta;
    double dof = std::max(1, n_obs_ - k);
    init_var_ = resid.squaredNorm() / dof;
    if (!(init_var_ > 0)) init_var_ = 1e-8;
    ols_coef_.assign(beta.data(), beta.data() + beta.size());

    // Threshold indicator for the leverage term. Using the model residual's
    // sign directly makes the likelihood discontinuous in the mean
    // parameters (each residual crossing zero flips the variance path), so
    // the indicator is pinned to the preliminary OLS residual signs; the two
    // differ only for residuals in a vanishing neighborhood of zero.
    neg_d_.assign(static_cast<size_t>(n_rows_), 0.0);
    for (int t = t0_; t < n_rows_; ++t)
        neg_d_[static_cast<size_t>(t)] = resid(t - t0_) < 0 ? 1.0 : 0.0;
}

std::vector<std::string> AcgarchModel::all_param_names() const {
    std::vector<std::string> names = {"mu"};
    if (spec_.include_lagged_dependent) names.push_back("phi_lag");
    for (const auto& u : spec_.unrest_columns) names.push_back("beta:" + u);
    for (const auto& c : spec_.control_columns) names.push_back("rho:" + c);
    if (spec_.include_in_mean) names.push_back("delta_mean");
    names.push_back("omega");
    names.push_back("rho_q");
    names.push_back("phi_q");
    for (const auto& z : spec_.longrun_exog) names.push_back("theta1:" + z);
    names.push_back("alpha_s");
    names.push_back("kappa_lev");
    names.push_back("beta_s");
    for (const auto& z : spec_.shortrun_exog) names.push_back("theta2:" + z);
    names.push_back("shape");
    return names;
}

std::vector<std::string> AcgarchModel::free_param_names() const {
    std::vector<std::string> out;
    for (const auto& n : all_param_names())
        if (!spec_.fixed.count(n)) out.push_back(n);
    return out;
}

int AcgarchModel::n_free_params() const {
    return static_cast<int>(free_param_names().size());
}

namespace {

// read/write a named parameter on AcgarchParams
double get_param(const AcgarchParams& p, const AcgarchSpec& spec, const std::string& n) {
    if (n == "mu") return p.mu;
    if (n == "phi_lag") return p.phi_lag;
    if (n == "delta_mean") return p.delta_mean;
    if (n == "omega") return p.omega;
    if (n == "rho_q") return p.rho_q;
    if (n == "phi_q") return p.phi_q;
    if (n == "alpha_s") return p.alpha_s;
    if (n == "kappa_lev") return p.kappa_lev;
    if (n == "beta_s") return p.beta_s;
    if (n == "shape") return p.shape;
    auto indexed = [&](const char* prefix, const std::vector<std::string>& cols,
                       const std::vector<double>& vals) -> std::optional<double> {
        std::string pre = std::string(prefix) + ":";
        if (n.rfind(pre, 0) != 0) return std::nullopt;
        std::string col = n.substr(pre.size());
        for (size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == col) return i < vals.size() ? vals[i] : 0.0;
        return std::nullopt;
    };
    if (auto v = indexed("beta", spec.unrest_columns, p.beta_unrest)) return *v;
    if (auto v = indexed("rho", spec.control_columns, p.rho_controls)) return *v;
    if (auto v = indexed("theta1", spec.longrun_exog, p.theta1)) return *v;
    if (auto v = indexed("theta2", spec.shortrun_exog, p.theta2)) return *v;
    throw DataError("acgarch: unknown parameter '" + n + "'");
}

void set_param(AcgarchParams& p, const AcgarchSpec& spec, const std::string& n,
               double v) {
    if (n == "mu") { p.mu = v; return; }
    if (n == "phi_lag") { p.phi_lag = v; return; }
    if (n == "delta_mean") { p.delta_mean = v; return; }
    if (n == "omega") { p.omega = v; return; }
    if (n == "rho_q") { p.rho_q = v; return; }
    if (n == "phi_q") { p.phi_q = v; return; }
    if (n == "alpha_s") { p.alpha_s = v; return; }
    if (n == "kappa_lev") { p.kappa_lev = v; return; }
    if (n == "beta_s") { p.beta_s = v; return; }
    if (n == "shape") { p.shape = v; return; }
    auto indexed = [&](const char* prefix, const std::vector<std::string>& cols,
                       std::vector<double>& vals) -> bool {
        std::string pre = std::string(prefix) + ":";
        if (n.rfind(pre, 0) != 0) return false;
        std::string col = n.substr(pre.size());
        for (size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == col) {
                if (vals.size() < cols.size()) vals.resize(cols.size(), 0.0);
                vals[i] = v;
                return true;
            }
        return false;
    };
    if (indexed("beta", spec.unrest_columns, p.beta_unrest)) return;
    if (indexed("rho", spec.control_columns, p.rho_controls)) return;
    if (indexed("theta1", spec.longrun_exog, p.theta1)) return;
    if (indexed("theta2", spec.shortrun_exog, p.theta2)) return;
    throw DataError("acgarch: unknown parameter '" + n + "'");
}

AcgarchParams sized_params(const AcgarchSpec& spec) {
    AcgarchParams p;
    p.beta_unrest.assign(spec.unrest_columns.size(), 0.0);
    p.rho_controls.assign(spec.control_columns.size(), 0.0);
    p.theta1.assign(spec.longrun_exog.size(), 0.0);
    p.theta2.assign(spec.shortrun_exog.size(), 0.0);
    return p;
}

} // namespace

Eigen::VectorXd AcgarchModel::pack(const AcgarchParams& p) const {
    auto names = free_param_names();
    Eigen::VectorXd v(static_cast<Eigen::Index>(names.size()));
    double denom = 1.0 - p.alpha_s - p.beta_s;
    for (size_t i = 0; i < names.size(); ++i) {
        const std::string& n = names[i];
        double raw = get_param(p, spec_, n);
        double out;
        if (n == "omega") out = std::log(raw);
        else if (n == "rho_q") out = logit(raw);
        else if (n == "alpha_s") out = std::log(std::max(raw, 1e-8) / std::max(denom, 1e-8));
        else if (n == "beta_s") out = std::log(std::max(raw, 1e-8) / std::max(denom, 1e-8));
        else if (n == "kappa_lev") out = std::log(std::max(raw + 2.0 * p.alpha_s, 1e-8));
        else if (n == "shape")
            out = spec_.innovation == Innovation::student_t ? std::log(raw - 2.0)
                                                            : std::log(raw);
        else out = raw;
        v[static_cast<Eigen::Index>(i)] = out;
    }
    return v;
}

AcgarchParams AcgarchModel::unpack(const Eigen::VectorXd& v) const {
    AcgarchParams p = sized_params(spec_);
    // fixed values first (alpha/beta may be pinned)
    for (const auto& [name, value] : spec_.fixed) set_param(p, spec_, name, value);

    auto names = free_param_names();
    // simplex pair first: kappa's transform depends on alpha_s
    for (size_t i = 0; i < names.size(); ++i) {
        if (names[i] == "alpha_s" || names[i] == "beta_s") {
            double a = 0, b = 0;
            bool has_a = false, has_b = false;
            for (size_t j = 0; j < names.size(); ++j) {
                if (names[j] == "alpha_s") { a = v[static_cast<Eigen::Index>(j)]; has_a = true; }
                if (names[j] == "beta_s") { b = v[static_cast<Eigen::Index>(j)]; has_b = true; }
            }
            double ea = has_a ? std::exp(a) : 0.0;
            double eb = has_b ? std::exp(b) : 0.0;
            double norm = 1.0 + ea + eb;
            if (has_a) p.alpha_s = ea / norm;
            if (has_b) p.beta_s = eb / norm;
            break;
        }
    }
    for (size_t i = 0; i < names.size(); ++i) {
        const std::string& n = names[i];
        double raw = v[static_cast<Eigen::Index>(i)];
        if (n == "alpha_s" || n == "beta_s") continue; // handled above
        double out;
        if (n == "omega") out = std::exp(raw);
        else if (n == "rho_q") out = logistic(raw);
        else if (n == "kappa_lev") out = std::exp(raw) - 2.0 * p.alpha_s;
        else if (n == "shape")
            out = spec_.innovation == Innovation::student_t ? 2.0 + std::exp(raw)
                                                            : std::exp(raw);
        else out = raw;
        set_param(p, spec_, n, out);
    }
    return p;
}

AcgarchModel::Paths AcgarchModel::filter(const AcgarchParams& p) const {
    Paths out;
    const int n = n_rows_;
    out.sigma2.assign(static_cast<size_t>(n), 0.0);
    out.q.assign(static_cast<size_t>(n), 0.0);
    out.eps.assign(static_cast<size_t>(n), 0.0);
    out.mean.assign(static_cast<size_t>(n), 0.0);
    double ll = 0;

    auto mean_at = [&](int t, double sigma2) {
        double m = p.mu;
        if (spec_.include_lagged_dependent) m += p.phi_lag * y_[static_cast<size_t>(t - 1)];
        for (size_t i = 0; i < unrest_.size(); ++i)
            m += p.beta_unrest[i] * unrest_[i][static_cast<size_t>(t)];
        for (size_t i = 0; i < controls_.size(); ++i)
            m += p.rho_controls[i] * controls_[i][static_cast<size_t>(t)];
        if (spec_.include_in_mean)
            m += p.delta_mean * in_mean_g(sigma2, spec_.in_mean_transform);
        return m;
    };
    // normalization constants hoisted out of the loop (lgamma is costly)
    const bool is_t = spec_.innovation == Innovation::student_t;
    const double nu = p.shape;
    const double t_const = is_t ? std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
                                      0.5 * std::log((nu - 2.0) * std::numbers::pi)
                                : 0.0;
    const double lam = is_t ? 1.0 : ged_lambda(nu);
    const double g_const = is_t ? 0.0
                                : std::log(nu) - std::log(lam) -
                                      (1.0 + 1.0 / nu) * std::numbers::ln2 -
                                      std::lgamma(1.0 / nu);
    auto obs_ll = [&](double eps, double sigma2) {
        double z2 = eps * eps / sigma2;
        double lp = is_t ? t_const - (nu + 1.0) / 2.0 * std::log1p(z2 / (nu - 2.0))
                         : g_const - 0.5 * std::pow(std::sqrt(z2) / lam, nu);
        return lp - 0.5 * std::log(sigma2);
    };

    for (int t = t0_; t < n; ++t) {
        double q, s2;
        if (t == t0_) {
            q = s2 = init_var_;
        } else {
            double eps_prev = out.eps[static_cast<size_t>(t - 1)];
            double eps2_prev = eps_prev * eps_prev;
            double s2_prev = out.sigma2[static_cast<size_t>(t - 1)];
            double q_prev = out.q[static_cast<size_t>(t - 1)];
            double d_prev = spec_.asymmetry_mode == AsymmetryMode::negative_residual
                                ? neg_d_[static_cast<size_t>(t - 1)]
                                : asym_dummy_[static_cast<size_t>(t - 1)];
            q = p.omega + p.rho_q * (q_prev - p.omega) +
                p.phi_q * (eps2_prev - s2_prev);
            for (size_t i = 0; i < z1_.size(); ++i)
                q += p.theta1[i] * z1_[i][static_cast<size_t>(t)];
            if (q < kVarFloor) { q = kVarFloor; ++out.floored; }
            double shock = eps2_prev - q_prev;
            double shortrun = p.alpha_s * shock + p.kappa_lev * shock * d_prev +
                              p.beta_s * (s2_prev - q_prev);
            for (size_t i = 0; i < z2_.size(); ++i)
                shortrun += p.theta2[i] * z2_[i][static_cast<size_t>(t)];
            s2 = q + shortrun;
            if (s2 < kVarFloor) { s2 = kVarFloor; ++out.floored; }
        }
        if (!std::isfinite(q) || !std::isfinite(s2)) {
            out.bad_t = t;
            out.loglik = kNegInf;
            return out;
        }
        out.q[static_cast<size_t>(t)] = q;
        out.sigma2[static_cast<size_t>(t)] = s2;
        double m = mean_at(t, s2);
        double eps = y_[static_cast<size_t>(t)] - m;
        out.mean[static_cast<size_t>(t)] = m;
        out.eps[static_cast<size_t>(t)] = eps;
        double lt = obs_ll(eps, s2);
        if (!std::isfinite(lt)) {
            out.bad_t = t;
            out.loglik = kNegInf;
            return out;
        }
        ll += lt;
    }
    out.loglik = ll;
    return out;
}

double AcgarchModel::loglik(const AcgarchParams& p) const {
    p.validate(spec_.innovation);
    Paths paths = filter(p);
    if (paths.bad_t)
        throw NumericError("acgarch loglik: non-finite intermediate at t=" +
                           std::to_string(*paths.bad_t));
    return paths.loglik;
}

AcgarchParams AcgarchModel::start_params() const {
    AcgarchParams p = sized_params(spec_);
    int c = 0;
    p.mu = ols_coef_[static_cast<size_t>(c++)];
    if (spec_.include_lagged_dependent) {
        p.phi_lag = ols_coef_[static_cast<size_t>(c++)];
        p.phi_lag = std::clamp(p.phi_lag, -0.98, 0.98);
    }
    for (size_t i = 0; i < unrest_.size(); ++i)
        p.beta_unrest[i] = ols_coef_[static_cast<size_t>(c++)];
    for (size_t i = 0; i < controls_.size(); ++i)
        p.rho_controls[i] = ols_coef_[static_cast<size_t>(c++)];
    p.delta_mean = 0.0;
    p.omega = init_var_; // variance targeting
    p.rho_q = 0.95;
    p.phi_q = 0.03;
    p.alpha_s = 0.05;
    p.kappa_lev = 0.03;
    p.beta_s = 0.80;
    p.shape = spec_.innovation == Innovation::student_t ? 8.0 : 1.5;
    // honor pinned values in the start too
    for (const auto& [name, value] : spec_.fixed) set_param(p, spec_, name, value);
    return p;
}

double AcgarchFit::tstat(size_t i) const {
    if (i >= estimates.size() || !(std_errors[i] > 0)) return 0.0;
    return estimates[i] / std_errors[i];
}

AcgarchFit AcgarchModel::fit(const AcgarchFitOptions& opts) const {
    if (n_obs_ < 100)
        throw DataError("acgarch fit: need >= 100 usable observations, have " +
                        std::to_string(n_obs_));

    auto objective = [this](const Eigen::VectorXd& v) -> double {
        Paths paths = filter(unpack(v));
        return paths.bad_t ? std::numeric_limits<double>::infinity() : -paths.loglik;
    };

    OptimOptions oo;
    oo.tol = opts.tol;
    oo.max_iter = opts.max_iter;

    Eigen::VectorXd base = pack(start_params());
    std::optional<OptimResult> best;
    int converged_runs = 0;
    for (int s = 0; s < std::max(1, opts.multistarts); ++s) {
        Eigen::VectorXd x0 = base;
        if (s > 0) {
            Rng rng = make_rng(opts.seed, static_cast<uint64_t>(s));
            std::normal_distribution<double> jitter(0.0, 0.3);
            for (Eigen::Index i = 0; i < x0.size(); ++i) x0[i] += jitter(rng);
        }
        if (!std::isfinite(objective(x0))) continue;
        OptimResult r = bfgs_minimize(objective, x0, oo);
        if (r.converged) ++converged_runs;
        if (!best || r.fmin < best->fmin) best = r;
    }
    if (!best || !std::isfinite(best->fmin))
        throw NumericError("acgarch fit: no feasible multistart for '" +
                           spec_.dependent + "'");
    if (converged_runs == 0)
        throw NumericError("acgarch fit: non-convergence after " +
                           std::to_string(opts.multistarts) + " restarts (grad norm " +
                           std::to_string(best->grad_norm) + ")");

    AcgarchParams phat = unpack(best->x);
    Paths paths = filter(phat);

    AcgarchFit fit;
    fit.spec = spec_;
    fit.params = phat;
    fit.param_names = all_param_names();
    fit.n_obs = n_obs_;
    fit.n_params = n_free_params();
    fit.loglik = paths.loglik;
    fit.aic = (-2.0 * fit.loglik + 2.0 * fit.n_params) / fit.n_obs;
    fit.bic = (-2.0 * fit.loglik + fit.n_params * std::log(fit.n_obs)) / fit.n_obs;

    fit.sigma2_path.assign(paths.sigma2.begin() + t0_, paths.sigma2.end());
    fit.q_path.assign(paths.q.begin() + t0_, paths.q.end());
    fit.fitted_mean.assign(paths.mean.begin() + t0_, paths.mean.end());

    // adjusted R^2 of the fitted conditional mean
    double ybar = 0;
    for (int t = t0_; t < n_rows_; ++t) ybar += y_[static_cast<size_t>(t)];
    ybar /= n_obs_;
    double sst = 0, ssr = 0;
    for (int t = t0_; t < n_rows_; ++t) {
        double d = y_[static_cast<size_t>(t)] - ybar;
        sst += d * d;
        double e = paths.eps[static_cast<size_t>(t)];
        ssr += e * e;
    }
    double r2 = sst > 0 ? 1.0 - ssr / sst : 0.0;
    fit.adj_r2 = 1.0 - (1.0 - r2) * (fit.n_obs - 1.0) /
                           std::max(1.0, fit.n_obs - fit.n_params - 1.0);

    // standard errors: observed information in the original parameter space
    auto free_names = free_param_names();
    auto to_params = [&](const Eigen::VectorXd& v) {
        AcgarchParams p = sized_params(spec_);
        for (const auto& [name, value] : spec_.fixed) set_param(p, spec_, name, value);
        for (size_t i = 0; i < free_names.size(); ++i)
            set_param(p, spec_, free_names[i], v[static_cast<Eigen::Index>(i)]);
        return p;
    };
    Eigen::VectorXd theta(static_cast<Eigen::Index>(free_names.size()));
    for (size_t i = 0; i < free_names.size(); ++i)
        theta[static_cast<Eigen::Index>(i)] = get_param(phat, spec_, free_names[i]);
    auto negll_orig = [&](const Eigen::VectorXd& v) -> double {
        Paths pp = filter(to_params(v));
        return pp.bad_t ? std::numeric_limits<double>::infinity() : -pp.loglik;
    };
    Eigen::MatrixXd H = numerical_hessian(negll_orig, theta, 1e-4);
    Eigen::MatrixXd cov;
    bool se_ok = H.allFinite();
    if (se_ok) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
            cov = ldlt.solve(Eigen::MatrixXd::Identity(H.rows(), H.cols()));
        } else {
            // near-boundary estimates can leave the observed information
            // indefinite; clamp its spectrum to stay invertible
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
            se_ok = es.info() == Eigen::Success;
            if (se_ok) {
                Eigen::VectorXd ev = es.eigenvalues();
                double floor_ev = 1e-8 * std::max(1.0, ev.cwiseAbs().maxCoeff());
                for (Eigen::Index i = 0; i < ev.size(); ++i)
                    ev[i] = std::max(ev[i], floor_ev);
                cov = es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                      es.eigenvectors().transpose();
            }
        }
    }
    if (se_ok && opts.robust_se) {
        // sandwich: H^-1 (sum_t s_t s_t') H^-1 with per-observation scores
        auto per_obs = [&](const Eigen::VectorXd& v) {
            AcgarchParams p = to_params(v);
            Paths pp = filter(p);
            Eigen::VectorXd lt(n_obs_);
            for (int t = t0_; t < n_rows_; ++t) {
                double s2 = pp.sigma2[static_cast<size_t>(t)];
                double z = pp.eps[static_cast<size_t>(t)] / std::sqrt(s2);
                double lp = spec_.innovation == Innovation::student_t
                                ? std_t_logpdf(z, p.shape)
                                : std_ged_logpdf(z, p.shape);
                lt[t - t0_] = lp - 0.5 * std::log(s2);
            }
            return lt;
        };
        Eigen::MatrixXd S(n_obs_, static_cast<Eigen::Index>(free_names.size()));
        Eigen::VectorXd vp = theta;
        for (size_t i = 0; i < free_names.size(); ++i) {
            double h = 1e-5 * (1.0 + std::fabs(theta[static_cast<Eigen::Index>(i)]));
            vp[static_cast<Eigen::Index>(i)] += h;
            Eigen::VectorXd up = per_obs(vp);
            vp[static_cast<Eigen::Index>(i)] = theta[static_cast<Eigen::Index>(i)] - h;
            Eigen::VectorXd dn = per_obs(vp);
            vp[static_cast<Eigen::Index>(i)] = theta[static_cast<Eigen::Index>(i)];
            S.col(static_cast<Eigen::Index>(i)) = (up - dn) / (2.0 * h);
        }
        cov = cov * (S.transpose() * S) * cov;
    }

    fit.estimates.resize(fit.param_names.size());
    fit.std_errors.assign(fit.param_names.size(),
                          std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 0; i < fit.param_names.size(); ++i)
        fit.estimates[i] = get_param(phat, spec_, fit.param_names[i]);
    if (se_ok) {
        for (size_t i = 0; i < free_names.size(); ++i) {
            auto it = std::find(fit.param_names.begin(), fit.param_names.end(),
                                free_names[i]);
            double v = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
            if (v > 0)
                fit.std_errors[static_cast<size_t>(it - fit.param_names.begin())] =
                    std::sqrt(v);
        }
    }
    for (size_t i = 0; i < fit.param_names.size(); ++i)
        if (spec_.fixed.count(fit.param_names[i])) fit.std_errors[i] = 0.0;

    fit.convergence.iterations = best->iterations;
    fit.convergence.grad_norm = best->grad_norm;
    fit.convergence.restarts = std::max(0, opts.multistarts - 1);
    fit.convergence.floored_count = paths.floored;
    fit.convergence.floor_warning =
        paths.floored >= std::max(1, n_obs_ / 100);
    fit.convergence.converged = true;
    return fit;
}

double acgarch_loglik(const AcgarchSpec& spec, const AcgarchParams& params,
                      const DesignMatrix& data) {
    return AcgarchModel(spec, data).loglik(params);
}

AcgarchFit acgarch_fit(const AcgarchSpec& spec, const DesignMatrix& data,
                       const AcgarchFitOptions& opts) {
    return AcgarchModel(spec, data).fit(opts);
}

AcgarchSim acgarch_simulate(const AcgarchSpec& spec, const AcgarchParams& params,
                            int T, uint64_t seed, const DesignMatrix& exog,
                            int burn_in) {
    params.validate(spec.innovation);
    if (T < 1) throw DataError("acgarch simulate: T must be >= 1");
    if (static_cast<int>(exog.n_rows()) < T)
        throw DataError("acgarch simulate: exog matrix shorter than T");

    auto col = [&](const std::string& name) { return dense_column(exog, name); };
    std::vector<std::vector<double>> unrest, controls, z1, z2;
    for (const auto& u : spec.unrest_columns) unrest.push_back(col(u));
    for (const auto& c : spec.control_columns) controls.push_back(col(c));
    for (const auto& z : spec.longrun_exog) z1.push_back(col(z));
    for (const auto& z : spec.shortrun_exog) z2.push_back(col(z));
    std::vector<double> asym;
    if (spec.asymmetry_mode == AsymmetryMode::unrest_dummy) {
        if (spec.asymmetry_column.empty())
            throw DataError("acgarch simulate: unrest_dummy asymmetry needs a column");
        asym = col(spec.asymmetry_column);
    }

    Rng rng = make_rng(seed);
    std::student_t_distribution<double> tdist(params.shape);
    std::gamma_distribution<double> gdist(1.0 / params.shape, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    auto draw_z = [&]() {
        if (spec.innovation == Innovation::student_t)
            return tdist(rng) / std::sqrt(params.shape / (params.shape - 2.0));
        double u = gdist(rng);
        double mag = ged_lambda(params.shape) *
                     std::pow(2.0 * u, 1.0 / params.shape);
        return coin(rng) < 0.5 ? -mag : mag;
    };

    AcgarchSim out;
    out.y.reserve(static_cast<size_t>(T));
    out.sigma2.reserve(static_cast<size_t>(T));
    out.q.reserve(static_cast<size_t>(T));

    double q_prev = params.omega, s2_prev = params.omega;
    double eps_prev = 0.0, d_prev = 0.0;
    double y_prev = std::fabs(params.phi_lag) < 1.0
                        ? params.mu / (1.0 - params.phi_lag)
                        : params.mu;

    for (int t = -burn_in; t < T; ++t) {
        bool live = t >= 0;
        double q = params.omega + params.rho_q * (q_prev - params.omega) +
                   params.phi_q * (eps_prev * eps_prev - s2_prev);
        double shock = eps_prev * eps_prev - q_prev;
        double shortrun = params.alpha_s * shock + params.kappa_lev * shock * d_prev +
                          params.beta_s * (s2_prev - q_prev);
        if (live) {
            for (size_t i = 0; i < z1.size(); ++i)
                q += params.theta1[i] * z1[i][static_cast<size_t>(t)];
            for (size_t i = 0; i < z2.size(); ++i)
                shortrun += params.theta2[i] * z2[i][static_cast<size_t>(t)];
        }
        if (q < kVarFloor) q = kVarFloor;
        double s2 = q + shortrun;
        if (s2 < kVarFloor) s2 = kVarFloor;

        double m = params.mu;
        if (spec.include_lagged_dependent) m += params.phi_lag * y_prev;
        if (live) {
            for (size_t i = 0; i < unrest.size(); ++i)
                m += params.beta_unrest[i] * unrest[i][static_cast<size_t>(t)];
            for (size_t i = 0; i < controls.size(); ++i)
                m += params.rho_controls[i] * controls[i][static_cast<size_t>(t)];
        }
        if (spec.include_in_mean)
            m += params.delta_mean * in_mean_g(s2, spec.in_mean_transform);

        double eps = std::sqrt(s2) * draw_z();
        double y = m + eps;

        if (live) {
            out.y.push_back(y);
            out.sigma2.push_back(s2);
            out.q.push_back(q);
        }
        d_prev = spec.asymmetry_mode == AsymmetryMode::negative_residual
                     ? (eps < 0 ? 1.0 : 0.0)
                     : (live ? asym[static_cast<size_t>(t)] : 0.0);
        q_prev = q;
        s2_prev = s2;
        eps_prev = eps;
        y_prev = y;
    }
    return out;
}

TransformSelection select_in_mean_transform(const AcgarchSpec& spec,
                                            const DesignMatrix& data,
                                            const AcgarchFitOptions& opts,
                                            bool use_bic) {
    const InMeanTransform order[] = {InMeanTransform::identity, InMeanTransform::ln,
                                     InMeanTransform::sqrt_};
    TransformSelection sel;
    sel.use_bic = use_bic;
    for (InMeanTransform t : order) {
        AcgarchSpec s = spec;
        s.in_mean_transform = t;
        try {
            sel.fits.emplace(t, acgarch_fit(s, data, opts));
        } catch (const std::exception&) {
            // candidate failed; selection proceeds over the rest
        }
    }
    if (sel.fits.empty())
        throw NumericError("select_in_mean_transform: all candidates failed");
    bool first = true;
    double best_ic = 0;
    for (InMeanTransform t : order) { // order gives the deterministic tie-break
        auto it = sel.fits.find(t);
        if (it == sel.fits.end()) continue;
        double ic = use_bic ? it->second.bic : it->second.aic;
        if (first || ic < best_ic - 1e-9) {
            sel.chosen = t;
            best_ic = ic;
            first = false;
        }
    }
    return sel;
}

} // namespace sovrisk
