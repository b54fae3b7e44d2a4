#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sovrisk/daily.hpp"
#include "sovrisk/series.hpp"

namespace sovrisk {

enum class BaselineModel { raw_returns, constant_mean };

BaselineModel parse_baseline_model(const std::string& s);

struct EventStudySpec {
    BaselineModel model = BaselineModel::raw_returns;
    int pre = -1;  // window open, <= 0
    int post = 1;  // window close, >= 0
    int estimation_window_length = 60; // months, ends right before the window opens
    bool run_patell = true;
    bool run_grankt = true;

    int window_length() const { return post - pre + 1; }
    void validate() const;
};

// Per-event abnormal returns plus the estimation-window residuals that the
// tests standardize against.
struct EventArs {
    MonthIndex event_month{1900, 1};
    int est_start_serial = 0;           // calendar serial of the first estimation month
    std::vector<double> ars;            // one per event-window slot, pre..post
    std::vector<double> est_resids;     // estimation-window residuals
    double resid_sd = 0;                // SD of est_resids (df = m-1)

    double car() const;
};

struct TestResult {
    double statistic = 0;
    double pvalue = 1;
};

// AR_t = R_t - mean(R over the full sample). The estimation window is still
// carved out per event for standardization.
EventArs abnormal_returns_raw(const MonthlySeries& returns, MonthIndex event_month,
                              const EventStudySpec& spec);

// AR_t = R_t - mean(R over the event's pre-event estimation window).
EventArs abnormal_returns_constant_mean(const MonthlySeries& returns,
                                        MonthIndex event_month,
                                        const EventStudySpec& spec);

EventArs abnormal_returns(const MonthlySeries& returns, MonthIndex event_month,
                          const EventStudySpec& spec);

// Patell standardized-CAR z-test with the Kolari-Pynnonen (2010)
// cross-sectional-correlation adjustment sqrt((1-r)/(1+(n-1)r)).
TestResult patell_adjusted_test(const std::vector<EventArs>& events);

// Generalized rank t-test (Kolari-Pynnonen 2011): re-standardized SCARs as a
// single cumulative event observation, demeaned scaled mid-ranks,
// t-distributed with T-2 degrees of freedom.
TestResult grankt_test(const std::vector<EventArs>& events);

// Average pairwise correlation of estimation-window residuals over calendar
// overlap; disjoint windows contribute zero.
double average_cross_correlation(const std::vector<EventArs>& events);

struct EventStudyResult {
    EventStudySpec spec;
    std::vector<EventArs> events;
    double caar = 0;
    std::optional<TestResult> patell;
    std::optional<TestResult> grankt;
    int n() const { return static_cast<int>(events.size()); }
};

// CAR per event, CAAR across events, requested test statistics attached.
EventStudyResult caar(const std::vector<EventArs>& events, const EventStudySpec& spec);

EventStudyResult run_event_study(const MonthlySeries& returns,
                                 const std::vector<MonthIndex>& event_months,
                                 const EventStudySpec& spec);

// ---- daily single-event historical-mean study ----

struct DailyWindow {
    int pre = -1;
    int post = 1;
};

struct DailyStudySpec {
    std::vector<int> history_closes = {-30, -20}; // trading days before the event
    std::vector<DailyWindow> windows = {{-1, 1}, {-3, 3}, {-5, 5}};
    int history_days = 252; // about one year of trading days
    int min_history_days = 100;
};

struct DailyCell {
    std::string metric;   // "return", "realized_vol", "parkinson"
    int history_close = 0;
    DailyWindow window;
    double event_mean = 0;
    double history_mean = 0;
    double delta = 0;
    double tstat = 0;
    double pvalue = 1;
};

// Mean abnormal yield return, realized-volatility delta, and range-based
// intraday volatility delta per (history close, event window) pair, each with
// a two-sided t-test against the historical distribution.
std::vector<DailyCell> daily_hmm_study(const DailyQuoteSeries& daily, Date event_date,
                                       const DailyStudySpec& spec = {});

} // namespace sovrisk
