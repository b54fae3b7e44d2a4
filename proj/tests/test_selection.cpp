#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sovrisk/dist.hpp"
#include "sovrisk/error.hpp"
#include "sovrisk/linreg.hpp"
#include "sovrisk/rng.hpp"
#include "sovrisk/selection.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

using namespace sovrisk;

namespace {

void parallel_seeds(int n, const std::function<void(int)>& fn) {
    int workers = std::min<int>(8, std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

} // namespace

TEST_CASE("intercept-only probit with half ones gives a zero intercept") {
    const int n = 100;
    Eigen::MatrixXd X = Eigen::MatrixXd::Ones(n, 1);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = i % 2;
    ProbitFit fit = probit_fit(X, y);
    CHECK(std::fabs(fit.coef[0]) < 1e-10);
    CHECK(fit.loglik == doctest::Approx(n * std::log(0.5)).epsilon(1e-12));
    CHECK(fit.loglik >= fit.null_loglik - 1e-9);
}

TEST_CASE("probit recovers a known data-generating process") {
    const int n = 5000, reps = 50;
    const Eigen::Vector3d truth(-0.5, 0.8, 0.5);
    std::vector<std::atomic<int>> hits(3);
    parallel_seeds(reps, [&](int r) {
        Rng rng = make_rng(600, r);
        std::normal_distribution<double> nd(0.0, 1.0);
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        Eigen::MatrixXd X(n, 3);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            X(i, 0) = 1.0;
            X(i, 1) = nd(rng);
            X(i, 2) = ud(rng) < 0.3 ? 1.0 : 0.0;
            double star = X.row(i).dot(truth) + nd(rng);
            y[i] = star > 0 ? 1.0 : 0.0;
        }
        ProbitFit fit = probit_fit(X, y);
        CHECK(fit.loglik >= fit.null_loglik);
        for (int j = 0; j < 3; ++j)
            if (std::fabs(fit.coef[j] - truth[j]) <= 1.96 * fit.se[j]) ++hits[j];
    });
    for (int j = 0; j < 3; ++j) {
        INFO("probit coefficient ", j, " coverage ", hits[j].load(), "/", reps);
        CHECK(hits[j] >= 45);
    }
}

TEST_CASE("degenerate probit responses are rejected") {
    const int n = 50;
    Eigen::MatrixXd X = Eigen::MatrixXd::Ones(n, 1);
    CHECK_THROWS_AS(probit_fit(X, Eigen::VectorXd::Ones(n)), DataError);
    CHECK_THROWS_AS(probit_fit(X, Eigen::VectorXd::Zero(n)), DataError);
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(n);
    bad[0] = 0.5;
    CHECK_THROWS_AS(probit_fit(X, bad), DataError);
}

TEST_CASE("perfect separation is detected and named") {
    const int n = 200;
    Rng rng = make_rng(42);
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = nd(rng);
        y[i] = X(i, 1) > 0 ? 1.0 : 0.0; // cleanly separable
    }
    CHECK_THROWS_WITH_AS(probit_fit(X, y), doctest::Contains("separation"),
                         NumericError);
}

TEST_CASE("inverse mills ratio matches a high-precision oracle") {
    CHECK(inverse_mills(0.0) == doctest::Approx(0.79788).epsilon(0).scale(1).epsilon(2e-5));
    CHECK(std::fabs(inverse_mills(0.0) - 2.0 * norm_pdf(0.0)) < 1e-14);
    // z = -40 asymptote: -z + 1/(-z) + O(1/z^3)
    CHECK(inverse_mills(-40.0) == doctest::Approx(40.02496).epsilon(1e-6));

    using mp = boost::multiprecision::cpp_bin_float_50;
    boost::math::normal_distribution<mp> stdnorm(0, 1);
    const double grid[20] = {-40, -37, -35, -30, -25, -20, -15, -10, -8, -6,
                             -4,  -3,  -2,  -1,  -0.5, 0,   0.5, 1,   2,  5};
    double prev = std::numeric_limits<double>::infinity();
    for (double z : grid) {
        mp oracle = boost::math::pdf(stdnorm, mp(z)) / boost::math::cdf(stdnorm, mp(z));
        double got = inverse_mills(z);
        double want = static_cast<double>(oracle);
        INFO("z = ", z, " got ", got, " want ", want);
        CHECK(std::fabs(got - want) <= 1e-10 * std::max(1.0, std::fabs(want)));
        CHECK(got > 0.0);
        CHECK(got < prev); // strictly decreasing
        prev = got;
    }
}

namespace {

struct HeckmanDraw {
    Eigen::MatrixXd X; // selection design: 1, x1, x2
    Eigen::VectorXd s;
    Eigen::MatrixXd W; // outcome design: 1, x1
    Eigen::VectorXd y;
};

HeckmanDraw draw_heckman(int n, double rho, uint64_t seed) {
    Rng rng = make_rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    HeckmanDraw d;
    d.X.resize(n, 3);
    d.W.resize(n, 2);
    d.s.resize(n);
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
        double x1 = nd(rng), x2 = nd(rng);
        double e1 = nd(rng);
        double e2 = rho * e1 + std::sqrt(1.0 - rho * rho) * nd(rng);
        d.X.row(i) << 1.0, x1, x2;
        d.W.row(i) << 1.0, x1;
        d.s[i] = (0.2 + 0.8 * x1 + 1.0 * x2 + e1) > 0 ? 1.0 : 0.0;
        d.y[i] = d.s[i] > 0.5 ? 1.0 + 2.0 * x1 + e2 : 0.0;
    }
    return d;
}

} // namespace

TEST_CASE("heckman two-step and ml recover the outcome equation") {
    const int n = 5000, reps = 50;
    std::vector<std::atomic<int>> hit_ts(2), hit_ml(2);
    std::vector<double> est_ts0(reps), est_ts1(reps), est_ml0(reps), est_ml1(reps);
    std::atomic<int> rho_found{0};
    parallel_seeds(reps, [&](int r) {
        HeckmanDraw d = draw_heckman(n, 0.5, 7000 + r);
        HeckmanFit ts = heckman(d.X, d.s, d.W, d.y, HeckmanMethod::two_step);
        HeckmanFit ml = heckman(d.X, d.s, d.W, d.y, HeckmanMethod::ml);
        const double truth[2] = {1.0, 2.0};
        for (int j = 0; j < 2; ++j) {
            if (std::fabs(ts.outcome_coef[j] - truth[j]) <= 1.96 * ts.outcome_se[j])
                ++hit_ts[j];
            if (std::fabs(ml.outcome_coef[j] - truth[j]) <= 1.96 * ml.outcome_se[j])
                ++hit_ml[j];
        }
        est_ts0[r] = ts.outcome_coef[0];
        est_ts1[r] = ts.outcome_coef[1];
        est_ml0[r] = ml.outcome_coef[0];
        est_ml1[r] = ml.outcome_coef[1];
        if (std::fabs(ml.rho - 0.5) < 0.2) ++rho_found;
        CHECK(ts.n_selected <= ts.n_total);
        CHECK(std::fabs(ml.rho) < 1.0);
    });
    for (int j = 0; j < 2; ++j) {
        INFO("two-step coefficient ", j, " coverage ", hit_ts[j].load(), "/", reps);
        CHECK(hit_ts[j] >= 45);
        INFO("ml coefficient ", j, " coverage ", hit_ml[j].load(), "/", reps);
        CHECK(hit_ml[j] >= 45);
    }
    CHECK(rho_found >= 45);

    // efficiency: ml estimates vary no more than two-step on average
    auto var_of = [&](const std::vector<double>& v) {
        double m = 0;
        for (double x : v) m += x;
        m /= v.size();
        double s2 = 0;
        for (double x : v) s2 += (x - m) * (x - m);
        return s2 / (v.size() - 1);
    };
    double v_ts = var_of(est_ts0) + var_of(est_ts1);
    double v_ml = var_of(est_ml0) + var_of(est_ml1);
    INFO("two-step variance ", v_ts, " ml variance ", v_ml);
    CHECK(v_ml <= v_ts * 1.05);
}

TEST_CASE("with no selection correlation the mills coefficient is null") {
    const int n = 2000, reps = 200;
    std::atomic<int> nonreject{0};
    parallel_seeds(reps, [&](int r) {
        HeckmanDraw d = draw_heckman(n, 0.0, 9000 + r);
        HeckmanFit ts = heckman(d.X, d.s, d.W, d.y, HeckmanMethod::two_step);
        if (std::fabs(ts.mills_coef / ts.mills_se) < 1.96) ++nonreject;
    });
    INFO("mills-null kept in ", nonreject.load(), "/", reps);
    CHECK(nonreject >= 180); // about 95% expected
    CHECK(nonreject <= 200);
}

TEST_CASE("two-step approaches ols when rho is zero") {
    HeckmanDraw d = draw_heckman(20000, 0.0, 123);
    HeckmanFit ts = heckman(d.X, d.s, d.W, d.y, HeckmanMethod::two_step);
    // ols on the selected rows
    int n1 = ts.n_selected;
    Eigen::MatrixXd W1(n1, 2);
    Eigen::VectorXd y1(n1);
    for (int i = 0, r = 0; i < 20000; ++i)
        if (d.s[i] > 0.5) {
            W1.row(r) = d.W.row(i);
            y1[r] = d.y[i];
            ++r;
        }
    OlsFit plain = ols(W1, y1);
    CHECK(std::fabs(ts.outcome_coef[0] - plain.coef[0]) < 0.05);
    CHECK(std::fabs(ts.outcome_coef[1] - plain.coef[1]) < 0.05);
}

TEST_CASE("degenerate selection patterns are rejected") {
    HeckmanDraw d = draw_heckman(500, 0.5, 5);
    CHECK_THROWS_AS(heckman(d.X, Eigen::VectorXd::Ones(500), d.W, d.y,
                            HeckmanMethod::two_step),
                    DataError);
    Eigen::VectorXd few = Eigen::VectorXd::Zero(500);
    for (int i = 0; i < 10; ++i) few[i] = 1.0;
    CHECK_THROWS_AS(heckman(d.X, few, d.W, d.y, HeckmanMethod::two_step), DataError);
}

namespace {

struct IvDraw {
    Eigen::VectorXd y;
    Eigen::MatrixXd X_exog; // 1, c
    Eigen::VectorXd x_endog;
    Eigen::MatrixXd Z;
};

IvDraw draw_iv(int n, int n_inst, uint64_t seed, bool informative = true) {
    Rng rng = make_rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    IvDraw d;
    d.y.resize(n);
    d.X_exog.resize(n, 2);
    d.x_endog.resize(n);
    d.Z.resize(n, n_inst);
    const double pi[3] = {0.6, 0.5, 0.4};
    for (int i = 0; i < n; ++i) {
        double c = nd(rng), v = nd(rng);
        double u = 0.8 * v + 0.6 * nd(rng);
        double x = 0.5 + v;
        for (int j = 0; j < n_inst; ++j) {
            d.Z(i, j) = nd(rng);
            if (informative) x += pi[j % 3] * d.Z(i, j);
        }
        d.X_exog.row(i) << 1.0, c;
        d.x_endog[i] = x;
        d.y[i] = 1.0 + 0.5 * c + 1.0 * x + u;
    }
    return d;
}

} // namespace

TEST_CASE("gmm removes the endogeneity bias that ols keeps") {
    const int n = 2000, reps = 50;
    std::vector<double> gmm_est(reps), ols_est(reps);
    parallel_seeds(reps, [&](int r) {
        IvDraw d = draw_iv(n, 3, 20000 + r);
        IvGmmFit fit = iv_gmm(d.y, d.X_exog, d.x_endog, d.Z);
        gmm_est[r] = fit.coef[2];
        Eigen::MatrixXd W(n, 3);
        W << d.X_exog, d.x_endog;
        ols_est[r] = ols(W, d.y).coef[2];
        CHECK(fit.hansen_applicable);
        CHECK(fit.kp_p < 0.01); // instruments are clearly relevant
    });
    double gmm_bias = 0, ols_bias = 0;
    for (int r = 0; r < reps; ++r) {
        gmm_bias += gmm_est[r] - 1.0;
        ols_bias += ols_est[r] - 1.0;
    }
    gmm_bias /= reps;
    ols_bias /= reps;
    INFO("gmm bias ", gmm_bias, " ols bias ", ols_bias);
    CHECK(std::fabs(gmm_bias) < std::fabs(ols_bias) / 10.0);
}

TEST_CASE("hansen j holds its size under valid instruments") {
    const int n = 1000, reps = 500;
    std::atomic<int> rejections{0};
    parallel_seeds(reps, [&](int r) {
        IvDraw d = draw_iv(n, 3, 40000 + r);
        IvGmmFit fit = iv_gmm(d.y, d.X_exog, d.x_endog, d.Z);
        if (fit.hansen_p < 0.05) ++rejections;
    });
    double rate = rejections / static_cast<double>(reps);
    INFO("hansen j rejection rate ", rate);
    CHECK(rate > 0.02);
    CHECK(rate < 0.09);
}

TEST_CASE("exactly identified gmm reproduces closed-form 2sls") {
    IvDraw d = draw_iv(800, 1, 31);
    IvGmmFit fit = iv_gmm(d.y, d.X_exog, d.x_endog, d.Z);
    CHECK_FALSE(fit.hansen_applicable);

    const int n = 800;
    Eigen::MatrixXd W(n, 3), Zf(n, 3);
    W << d.X_exog, d.x_endog;
    Zf << d.X_exog, d.Z;
    Eigen::Vector3d b2sls = (Zf.transpose() * W)
                                .colPivHouseholderQr()
                                .solve(Zf.transpose() * d.y);
    for (int j = 0; j < 3; ++j)
        CHECK(std::fabs(fit.coef[j] - b2sls[j]) < 1e-8);
}

TEST_CASE("underidentification is flagged for irrelevant instruments") {
    IvDraw d = draw_iv(1500, 3, 77, /*informative=*/false);
    IvGmmFit fit = iv_gmm(d.y, d.X_exog, d.x_endog, d.Z);
    CHECK(fit.kp_p > 0.05);
    CHECK(fit.kp_df == 3);
}

TEST_CASE("defective instrument matrices are rejected") {
    IvDraw d = draw_iv(400, 2, 9);
    Eigen::MatrixXd Zdup(400, 2);
    Zdup.col(0) = d.Z.col(0);
    Zdup.col(1) = d.Z.col(0);
    CHECK_THROWS_AS(iv_gmm(d.y, d.X_exog, d.x_endog, Zdup), DataError);
    Eigen::MatrixXd none(400, 0);
    CHECK_THROWS_AS(iv_gmm(d.y, d.X_exog, d.x_endog, none), DataError);
}
