#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sovrisk/event_study.hpp"
#include "sovrisk/rng.hpp"

#include <cmath>
#include <numeric>

using namespace sovrisk;

namespace {

MonthlySeries gaussian_returns(size_t n, uint64_t seed, double mu = 0.0,
                               double sd = 0.01) {
    Rng rng = make_rng(seed);
    std::normal_distribution<double> z(mu, sd);
    std::vector<Cell> v(n);
    for (auto& c : v) c = z(rng);
    return MonthlySeries("ret", {1820, 1}, std::move(v));
}

// 30 disjoint event positions with room for 60-month estimation windows.
std::vector<MonthIndex> spaced_events(const MonthlySeries& r, int n_events,
                                      int spacing, int first_offset) {
    std::vector<MonthIndex> ev;
    for (int i = 0; i < n_events; ++i)
        ev.push_back(r.start().plus(first_offset + i * spacing));
    return ev;
}

struct SizeResult {
    double patell_rate;
    double grankt_rate;
};

SizeResult null_rejection_rates(int reps, int n_events, double alpha, uint64_t seed,
                                BaselineModel model) {
    EventStudySpec spec;
    spec.model = model;
    spec.pre = -1;
    spec.post = 1;
    spec.estimation_window_length = 60;
    int spacing = 66; // disjoint estimation + event windows
    size_t len = static_cast<size_t>(70 + n_events * spacing);
    int rej_p = 0, rej_g = 0;
    for (int rep = 0; rep < reps; ++rep) {
        auto r = gaussian_returns(len, split_seed(seed, static_cast<uint64_t>(rep)));
        auto res = run_event_study(r, spaced_events(r, n_events, spacing, 64), spec);
        if (res.patell->pvalue < alpha) ++rej_p;
        if (res.grankt->pvalue < alpha) ++rej_g;
    }
    return {static_cast<double>(rej_p) / reps, static_cast<double>(rej_g) / reps};
}

} // namespace

TEST_CASE("raw abnormal returns subtract the full-sample mean") {
    // constant returns -> AR identically zero
    std::vector<Cell> v(200, Cell{0.004});
    MonthlySeries cst("c", {1820, 1}, v);
    EventStudySpec spec;
    auto e = abnormal_returns_raw(cst, cst.start().plus(100), spec);
    for (double ar : e.ars) CHECK(ar == doctest::Approx(0.0));

    // randomized series vs an explicit subtract-the-mean oracle
    auto r = gaussian_returns(300, 7);
    double mean = 0;
    for (const auto& c : r.values()) mean += *c;
    mean /= static_cast<double>(r.size());
    auto e2 = abnormal_returns_raw(r, r.start().plus(150), spec);
    for (int j = spec.pre; j <= spec.post; ++j)
        CHECK(e2.ars[static_cast<size_t>(j - spec.pre)] ==
              doctest::Approx(*r.at(r.start().plus(150 + j)) - mean).epsilon(1e-12));
}

TEST_CASE("constant-mean abnormal returns use the pre-event estimation window") {
    EventStudySpec spec;
    spec.model = BaselineModel::constant_mean;
    // estimation-window mean equals the event return -> AR = 0
    std::vector<Cell> v(80, Cell{0.01});
    MonthlySeries cst("c", {1820, 1}, v);
    auto e = abnormal_returns_constant_mean(cst, cst.start().plus(70), spec);
    for (double ar : e.ars) CHECK(ar == doctest::Approx(0.0));

    // event at series start -> error
    CHECK_THROWS_AS(abnormal_returns_constant_mean(cst, cst.start().plus(5), spec),
                    DataError);

    // stationary nulls: mean AR shrinks toward 0 as estimation windows grow
    double mean_ar_short = 0, mean_ar_long = 0;
    int reps = 400;
    for (int rep = 0; rep < reps; ++rep) {
        auto r = gaussian_returns(400, split_seed(55, static_cast<uint64_t>(rep)));
        EventStudySpec s1 = spec, s2 = spec;
        s1.estimation_window_length = 12;
        s2.estimation_window_length = 240;
        auto a1 = abnormal_returns_constant_mean(r, r.start().plus(300), s1);
        auto a2 = abnormal_returns_constant_mean(r, r.start().plus(300), s2);
        mean_ar_short += a1.car();
        mean_ar_long += a2.car();
    }
    mean_ar_short /= reps;
    mean_ar_long /= reps;
    CHECK(std::fabs(mean_ar_long) < 0.002);
    CHECK(std::fabs(mean_ar_short) < 0.01);
}

TEST_CASE("raw and constant-mean ARs coincide on constant series") {
    std::vector<Cell> v(100, Cell{0.02});
    MonthlySeries cst("c", {1820, 1}, v);
    EventStudySpec spec;
    auto raw = abnormal_returns_raw(cst, cst.start().plus(80), spec);
    spec.model = BaselineModel::constant_mean;
    auto cm = abnormal_returns_constant_mean(cst, cst.start().plus(80), spec);
    for (size_t j = 0; j < raw.ars.size(); ++j)
        CHECK(raw.ars[j] == doctest::Approx(cm.ars[j]).epsilon(1e-14));
}

TEST_CASE("caar equals mean of CARs, CAR equals sum of ARs") {
    auto r = gaussian_returns(600, 13);
    EventStudySpec spec;
    auto res = run_event_study(r, spaced_events(r, 6, 80, 70), spec);
    double acc = 0;
    for (const auto& e : res.events) {
        double car = std::accumulate(e.ars.begin(), e.ars.end(), 0.0);
        CHECK(car == doctest::Approx(e.car()).epsilon(1e-14));
        acc += car;
    }
    CHECK(res.caar == doctest::Approx(acc / res.n()).epsilon(1e-14));
    CHECK_THROWS_AS(caar({}, spec), DataError);
}

TEST_CASE("patell: zero event ARs give statistic 0; r=0 equals classic Patell") {
    // Noisy estimation windows, zero event-window ARs.
    Rng rng = make_rng(3);
    std::normal_distribution<double> z(0.0, 0.01);
    std::vector<EventArs> events;
    for (int i = 0; i < 10; ++i) {
        EventArs e;
        e.event_month = MonthIndex{1850, 1}.plus(i * 100); // disjoint -> rbar 0
        e.est_start_serial = e.event_month.serial() - 61;
        e.est_resids.resize(60);
        double ss = 0;
        for (auto& x : e.est_resids) { x = z(rng); ss += x * x; }
        e.resid_sd = std::sqrt(ss / 59.0);
        e.ars = {0.0, 0.0, 0.0};
        events.push_back(e);
    }
    auto t = patell_adjusted_test(events);
    CHECK(t.statistic == doctest::Approx(0.0));
    CHECK(t.pvalue == doctest::Approx(1.0));

    // disjoint estimation windows -> rbar = 0 -> adjustment factor 1:
    // statistic equals the classic (unadjusted) Patell statistic
    for (auto& e : events)
        for (size_t j = 0; j < e.ars.size(); ++j) e.ars[j] = 0.003 * (j + 1);
    CHECK(average_cross_correlation(events) == doctest::Approx(0.0));
    auto adj = patell_adjusted_test(events);
    double classic = 0;
    for (const auto& e : events)
        classic += e.car() / (e.resid_sd * std::sqrt(3.0 + 9.0 / 60.0));
    classic /= std::sqrt(10.0 * 59.0 / 57.0);
    CHECK(adj.statistic == doctest::Approx(classic).epsilon(1e-12));
}

TEST_CASE("patell rejects zero residual SD") {
    EventArs e;
    e.event_month = {1850, 1};
    e.est_start_serial = e.event_month.serial() - 61;
    e.est_resids.assign(60, 0.0);
    e.resid_sd = 0.0;
    e.ars = {0.01};
    CHECK_THROWS_AS(patell_adjusted_test({e}), NumericError);
    CHECK_THROWS_AS(grankt_test({e}), NumericError);
}

TEST_CASE("grankt sign-flips with the returns and flags all-tied input") {
    auto r = gaussian_returns(400, 29);
    EventStudySpec spec;
    auto ev = spaced_events(r, 8, 40, 70);
    auto res = run_event_study(r, ev, spec);

    std::vector<Cell> neg(r.size());
    for (size_t t = 0; t < r.size(); ++t) neg[t] = -*r.at_index(t);
    auto res2 = run_event_study(MonthlySeries("neg", r.start(), neg), ev, spec);
    CHECK(res2.grankt->statistic == doctest::Approx(-res.grankt->statistic).epsilon(1e-9));

    EventArs tied;
    tied.event_month = {1850, 1};
    tied.est_start_serial = tied.event_month.serial() - 61;
    tied.est_resids.assign(60, 0.0);
    tied.resid_sd = 1.0; // forced non-zero so the tie check itself is hit
    tied.ars = {0.0};
    CHECK_THROWS_AS(grankt_test({tied}), NumericError);
}

TEST_CASE("tests are invariant to positive scaling of all returns") {
    auto r = gaussian_returns(500, 37);
    EventStudySpec spec;
    auto ev = spaced_events(r, 6, 70, 70);
    auto res = run_event_study(r, ev, spec);
    std::vector<Cell> scaled(r.size());
    for (size_t t = 0; t < r.size(); ++t) scaled[t] = 1234.5 * *r.at_index(t);
    auto res2 = run_event_study(MonthlySeries("sc", r.start(), scaled), ev, spec);
    CHECK(res2.patell->statistic == doctest::Approx(res.patell->statistic).epsilon(1e-9));
    CHECK(res2.grankt->statistic == doctest::Approx(res.grankt->statistic).epsilon(1e-9));
}

TEST_CASE("empirical size at alpha=0.05 within +-1.5pp on iid nulls" *
          doctest::timeout(300)) {
    auto s = null_rejection_rates(2000, 30, 0.05, 20240915, BaselineModel::constant_mean);
    CHECK(s.patell_rate > 0.035);
    CHECK(s.patell_rate < 0.065);
    CHECK(s.grankt_rate > 0.035);
    CHECK(s.grankt_rate < 0.065);
}

TEST_CASE("empirical size at alpha=0.01 and 0.10 within +-1.5pp") {
    EventStudySpec spec;
    spec.model = BaselineModel::constant_mean;
    int reps = 4000, n_events = 30, spacing = 66;
    size_t len = static_cast<size_t>(70 + n_events * spacing);
    int rej_p01 = 0, rej_g01 = 0, rej_p10 = 0, rej_g10 = 0;
    for (int rep = 0; rep < reps; ++rep) {
        auto r = gaussian_returns(len, split_seed(31337, static_cast<uint64_t>(rep)));
        auto res = run_event_study(r, spaced_events(r, n_events, spacing, 64), spec);
        if (res.patell->pvalue < 0.01) ++rej_p01;
        if (res.grankt->pvalue < 0.01) ++rej_g01;
        if (res.patell->pvalue < 0.10) ++rej_p10;
        if (res.grankt->pvalue < 0.10) ++rej_g10;
    }
    CHECK(rej_p01 / 4000.0 < 0.025);
    CHECK(rej_g01 / 4000.0 < 0.025);
    CHECK(std::fabs(rej_p10 / 4000.0 - 0.10) < 0.015);
    CHECK(std::fabs(rej_g10 / 4000.0 - 0.10) < 0.015);
}

TEST_CASE("power: injected common abnormal return is recovered and rejected") {
    // mu = 0.02 injected over a (-1,+1) window on sd=0.01 returns
    EventStudySpec spec;
    spec.model = BaselineModel::constant_mean;
    double mu = 0.02;
    int reps = 500, n_events = 30, spacing = 66;
    size_t len = static_cast<size_t>(70 + n_events * spacing);
    double caar_sum = 0;
    int rej_p = 0, rej_g = 0;
    for (int rep = 0; rep < reps; ++rep) {
        auto r = gaussian_returns(len, split_seed(4242, static_cast<uint64_t>(rep)));
        auto ev = spaced_events(r, n_events, spacing, 64);
        std::vector<Cell> v = r.values();
        for (MonthIndex m : ev)
            for (int j = -1; j <= 1; ++j)
                v[static_cast<size_t>(m.serial() - r.start().serial() + j)] =
                    *v[static_cast<size_t>(m.serial() - r.start().serial() + j)] + mu;
        auto res = run_event_study(MonthlySeries("inj", r.start(), v), ev, spec);
        caar_sum += res.caar;
        if (res.patell->pvalue < 0.01) ++rej_p;
        if (res.grankt->pvalue < 0.01) ++rej_g;
    }
    double mean_caar = caar_sum / reps;
    CHECK(mean_caar == doctest::Approx(3.0 * mu).epsilon(0.10));
    CHECK(rej_p == reps);
    CHECK(rej_g == reps);
}

TEST_CASE("daily study: flat prices give zero deltas and the right grid shape") {
    std::vector<DailyQuote> quotes;
    int y = 1860, m = 1, d = 1;
    for (int i = 0; i < 330; ++i) {
        quotes.push_back({{y, m, d}, 5.0, 5.0, 5.0});
        if (++d > 28) { d = 1; if (++m > 12) { m = 1; ++y; } }
    }
    DailyQuoteSeries daily(quotes);
    Date event = quotes[320].date;
    auto cells = daily_hmm_study(daily, event);
    CHECK(cells.size() == 18); // 3 metrics x 3 windows x 2 history closes
    for (const auto& c : cells) {
        CHECK(c.delta == doctest::Approx(0.0));
        CHECK(c.pvalue == doctest::Approx(1.0));
    }
}

TEST_CASE("daily study: +3 SD spike at the event is significant in (-1,1)") {
    Rng rng = make_rng(61);
    std::normal_distribution<double> z(0.0, 0.005);
    std::vector<DailyQuote> quotes;
    double level = 5.0;
    int y = 1860, m = 1, d = 1;
    std::vector<double> rets;
    for (int i = 0; i < 330; ++i) {
        if (i > 0) {
            double r = z(rng);
            rets.push_back(r);
            level *= std::exp(r);
        }
        double hi = level * std::exp(std::fabs(z(rng)));
        double lo = level / std::exp(std::fabs(z(rng)));
        quotes.push_back({{y, m, d}, hi, lo, level});
        if (++d > 28) { d = 1; if (++m > 12) { m = 1; ++y; } }
    }
    // inject a +3 historical-SD return at the event date
    size_t ev_idx = 320;
    double sd = 0.005;
    for (size_t i = ev_idx; i < quotes.size(); ++i) {
        double f = std::exp(3.5 * sd * 3);
        quotes[i].high *= f;
        quotes[i].low *= f;
        quotes[i].close *= f;
    }
    DailyQuoteSeries daily(quotes);
    auto cells = daily_hmm_study(daily, quotes[ev_idx].date);
    bool found = false;
    for (const auto& c : cells)
        if (c.metric == "return" && c.window.pre == -1 && c.history_close == -30) {
            found = true;
            CHECK(c.delta > 0);
            CHECK(c.pvalue < 0.01);
        }
    CHECK(found);
}

TEST_CASE("daily study error paths") {
    std::vector<DailyQuote> quotes;
    for (int i = 0; i < 50; ++i)
        quotes.push_back({{1860, 1 + i / 28, 1 + i % 28}, 5.0, 4.9, 4.95});
    DailyQuoteSeries daily(quotes);
    CHECK_THROWS_AS(daily_hmm_study(daily, quotes[45].date), DataError); // short history
    CHECK_THROWS_AS(daily_hmm_study(daily, Date{1870, 1, 1}), DataError); // no such date
}
