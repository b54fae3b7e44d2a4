#include "sovrisk/event_study.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sovrisk/dist.hpp"
#include "sovrisk/error.hpp"
#include "sovrisk/returns.hpp"

namespace sovrisk {

BaselineModel parse_baseline_model(const std::string& s) {
    if (s == "raw_returns") return BaselineModel::raw_returns;
    if (s == "constant_mean") return BaselineModel::constant_mean;
    throw DataError("unknown baseline model '" + s + "'");
}

void EventStudySpec::validate() const {
    if (pre > 0 || post < 0)
        throw DataError("event window must satisfy pre <= 0 <= post");
    if (estimation_window_length < 10)
        throw DataError("estimation window too short (need >= 10 months)");
}

double EventArs::car() const {
    return std::accumulate(ars.begin(), ars.end(), 0.0);
}

namespace {

double present_mean(const MonthlySeries& s) {
    double sum = 0;
    int n = 0;
    for (const Cell& c : s.values())
        if (c) { sum += *c; ++n; }
    if (n == 0) throw DataError("series '" + s.name() + "' has no present values");
    return sum / n;
}

double require_at(const MonthlySeries& r, int serial, const char* what) {
    Cell c = r.at(MonthIndex::from_serial(serial));
    if (!c)
        throw DataError(std::string(what) + " needs return at " +
                        MonthIndex::from_serial(serial).str() + " in '" + r.name() + "'");
    return *c;
}

EventArs build_event(const MonthlySeries& returns, MonthIndex event_month,
                     const EventStudySpec& spec, double baseline_from_full_sample,
                     bool use_full_sample_mean) {
    spec.validate();
    const int m = spec.estimation_window_length;
    const int win_open = event_month.serial() + spec.pre;
    const int win_close = event_month.serial() + spec.post;
    const int est_start = win_open - m;

    if (est_start < returns.start().serial())
        throw DataError("event " + event_month.str() +
                        ": insufficient pre-event history for a " + std::to_string(m) +
                        "-month estimation window");

    std::vector<double> est_values(static_cast<size_t>(m));
    for (int s = est_start; s < win_open; ++s)
        est_values[static_cast<size_t>(s - est_start)] =
            require_at(returns, s, "estimation window");

    double baseline = use_full_sample_mean
                          ? baseline_from_full_sample
                          : std::accumulate(est_values.begin(), est_values.end(), 0.0) / m;

    EventArs e;
    e.event_month = event_month;
    e.est_start_serial = est_start;
    e.est_resids.resize(static_cast<size_t>(m));
    double ss = 0;
    for (int j = 0; j < m; ++j) {
        double r = est_values[static_cast<size_t>(j)] - baseline;
        e.est_resids[static_cast<size_t>(j)] = r;
        ss += r * r;
    }
    e.resid_sd = std::sqrt(ss / (m - 1));

    for (int s = win_open; s <= win_close; ++s)
        e.ars.push_back(require_at(returns, s, "event window") - baseline);
    return e;
}

} // namespace

EventArs abnormal_returns_raw(const MonthlySeries& returns, MonthIndex event_month,
                              const EventStudySpec& spec) {
    return build_event(returns, event_month, spec, present_mean(returns), true);
}

EventArs abnormal_returns_constant_mean(const MonthlySeries& returns,
                                        MonthIndex event_month,
                                        const EventStudySpec& spec) {
    return build_event(returns, event_month, spec, 0.0, false);
}

EventArs abnormal_returns(const MonthlySeries& returns, MonthIndex event_month,
                          const EventStudySpec& spec) {
    return spec.model == BaselineModel::raw_returns
               ? abnormal_returns_raw(returns, event_month, spec)
               : abnormal_returns_constant_mean(returns, event_month, spec);
}

double average_cross_correlation(const std::vector<EventArs>& events) {
    const size_t n = events.size();
    if (n < 2) return 0.0;
    double sum = 0;
    size_t pairs = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            ++pairs;
            int ai = events[i].est_start_serial;
            int aj = events[j].est_start_serial;
            int mi = static_cast<int>(events[i].est_resids.size());
            int mj = static_cast<int>(events[j].est_resids.size());
            int lo = std::max(ai, aj);
            int hi = std::min(ai + mi, aj + mj); // exclusive
            int len = hi - lo;
            if (len < 3) continue; // disjoint or too short to correlate
            double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
            for (int s = lo; s < hi; ++s) {
                double x = events[i].est_resids[static_cast<size_t>(s - ai)];
                double y = events[j].est_resids[static_cast<size_t>(s - aj)];
                sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
            }
            double vx = sxx - sx * sx / len, vy = syy - sy * sy / len;
            if (vx <= 0 || vy <= 0) continue;
            sum += (sxy - sx * sy / len) / std::sqrt(vx * vy);
        }
    }
    return pairs ? sum / static_cast<double>(pairs) : 0.0;
}

TestResult patell_adjusted_test(const std::vector<EventArs>& events) {
    if (events.empty()) throw DataError("patell: no events");
    const int n = static_cast<int>(events.size());
    const int m = static_cast<int>(events[0].est_resids.size());
    const int W = static_cast<int>(events[0].ars.size());
    if (m <= 4) throw DataError("patell: estimation window too short");

    double sum_scar = 0;
    for (const EventArs& e : events) {
        if (e.resid_sd <= 0)
            throw NumericError("patell: zero estimation residual SD at event " +
                               e.event_month.str());
        // CAR forecast-error variance under the constant-mean baseline:
        // s^2 (W + W^2/m), the W^2/m term from the estimated mean.
        double denom = e.resid_sd * std::sqrt(W + static_cast<double>(W) * W / m);
        sum_scar += e.car() / denom;
    }
    // SCAR_i ~ t(m-1): variance (m-1)/(m-3)
    double z = sum_scar / std::sqrt(n * (m - 1.0) / (m - 3.0));

    double rbar = average_cross_correlation(events);
    rbar = std::clamp(rbar, -1.0 / std::max(1, n - 1) + 1e-9, 1.0 - 1e-9);
    z *= std::sqrt((1.0 - rbar) / (1.0 + (n - 1) * rbar));

    return {z, pvalue_normal(z)};
}

TestResult grankt_test(const std::vector<EventArs>& events) {
    if (events.empty()) throw DataError("grankt: no events");
    const int n = static_cast<int>(events.size());
    const int m = static_cast<int>(events[0].est_resids.size());
    const int W = static_cast<int>(events[0].ars.size());
    if (m + 1 < 10) throw DataError("grankt: combined window length below 10");

    // Standardized CARs, re-standardized by their cross-sectional SD so
    // event-induced variance does not distort the ranks.
    std::vector<double> scar(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const EventArs& e = events[static_cast<size_t>(i)];
        if (e.resid_sd <= 0)
            throw NumericError("grankt: zero estimation residual SD at event " +
                               e.event_month.str());
        scar[static_cast<size_t>(i)] =
            e.car() / (e.resid_sd * std::sqrt(W + static_cast<double>(W) * W / m));
    }
    double cross_sd = 1.0;
    if (n > 1) {
        double mean = std::accumulate(scar.begin(), scar.end(), 0.0) / n;
        double ss = 0;
        for (double v : scar) ss += (v - mean) * (v - mean);
        cross_sd = std::sqrt(ss / (n - 1));
        if (cross_sd <= 0) cross_sd = 1.0;
    }

    // Per event: m estimation-window SARs plus the cumulative event
    // observation, mid-ranked and scaled to (-1/2, 1/2).
    const int T = m + 1;
    std::vector<double> ubar(static_cast<size_t>(T), 0.0);
    for (int i = 0; i < n; ++i) {
        const EventArs& e = events[static_cast<size_t>(i)];
        std::vector<double> gsar(static_cast<size_t>(T));
        // demeaned residuals carry variance (m-1)/m of sigma^2; rescale so the
        // estimation-day entries are unit variance like the event observation
        const double est_scale = e.resid_sd * std::sqrt((m - 1.0) / m);
        for (int j = 0; j < m; ++j)
            gsar[static_cast<size_t>(j)] = e.est_resids[static_cast<size_t>(j)] / est_scale;
        gsar[static_cast<size_t>(m)] = scar[static_cast<size_t>(i)] / cross_sd;

        bool all_tied = std::all_of(gsar.begin(), gsar.end(),
                                    [&](double v) { return v == gsar[0]; });
        if (all_tied)
            throw NumericError("grankt: all-tied inputs at event " + e.event_month.str());

        // mid-ranks
        std::vector<int> idx(static_cast<size_t>(T));
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return gsar[static_cast<size_t>(a)] <
                                             gsar[static_cast<size_t>(b)]; });
        std::vector<double> rank(static_cast<size_t>(T));
        int a = 0;
        while (a < T) {
            int b = a;
            while (b + 1 < T && gsar[static_cast<size_t>(idx[static_cast<size_t>(b + 1)])] ==
                                    gsar[static_cast<size_t>(idx[static_cast<size_t>(a)])])
                ++b;
            double mid = (a + b) / 2.0 + 1.0;
            for (int k = a; k <= b; ++k)
                rank[static_cast<size_t>(idx[static_cast<size_t>(k)])] = mid;
            a = b + 1;
        }
        for (int t = 0; t < T; ++t)
            ubar[static_cast<size_t>(t)] += (rank[static_cast<size_t>(t)] / (T + 1.0) - 0.5) / n;
    }

    double s2 = 0;
    for (double u : ubar) s2 += u * u;
    s2 /= T;
    if (s2 <= 0) throw NumericError("grankt: degenerate rank variance");
    double z = ubar[static_cast<size_t>(m)] / std::sqrt(s2);

    double df = T - 2.0;
    double denom = T - 1.0 - z * z;
    if (denom <= 0) {
        double tstat = z > 0 ? 1e6 : -1e6;
        return {tstat, 0.0};
    }
    double tstat = z * std::sqrt(df / denom);
    return {tstat, pvalue_t(tstat, df)};
}

EventStudyResult caar(const std::vector<EventArs>& events, const EventStudySpec& spec) {
    if (events.empty()) throw DataError("caar: empty event set");
    EventStudyResult res;
    res.spec = spec;
    res.events = events;
    double sum = 0;
    for (const EventArs& e : events) sum += e.car();
    res.caar = sum / static_cast<double>(events.size());
    if (spec.run_patell) res.patell = patell_adjusted_test(events);
    if (spec.run_grankt) res.grankt = grankt_test(events);
    return res;
}

EventStudyResult run_event_study(const MonthlySeries& returns,
                                 const std::vector<MonthIndex>& event_months,
                                 const EventStudySpec& spec) {
    std::vector<EventArs> events;
    events.reserve(event_months.size());
    for (MonthIndex m : event_months)
        events.push_back(abnormal_returns(returns, m, spec));
    return caar(events, spec);
}

// ---- daily study ----

std::vector<DailyCell> daily_hmm_study(const DailyQuoteSeries& daily, Date event_date,
                                       const DailyStudySpec& spec) {
    const auto& q = daily.quotes();
    size_t ev = daily.lower_bound(event_date);
    if (ev >= q.size() || !(q[ev].date == event_date))
        throw DataError("daily study: no quote on event date " + event_date.str());
    const int iev = static_cast<int>(ev);

    // per-day metrics; returns need the previous close, so day 0 has none
    const int N = static_cast<int>(q.size());
    std::vector<double> ret(static_cast<size_t>(N), 0.0), rv(static_cast<size_t>(N), 0.0),
        pk(static_cast<size_t>(N), 0.0);
    std::vector<bool> has_ret(static_cast<size_t>(N), false);
    for (int d = 0; d < N; ++d) {
        pk[static_cast<size_t>(d)] = parkinson_intraday(q[static_cast<size_t>(d)]);
        if (d > 0) {
            double r = std::log(q[static_cast<size_t>(d)].close /
                                q[static_cast<size_t>(d - 1)].close);
            ret[static_cast<size_t>(d)] = r;
            rv[static_cast<size_t>(d)] = r * r;
            has_ret[static_cast<size_t>(d)] = true;
        }
    }

    struct Metric {
        const char* name;
        const std::vector<double>* values;
        bool needs_prev;
    };
    const Metric metrics[] = {{"return", &ret, true},
                              {"realized_vol", &rv, true},
                              {"parkinson", &pk, false}};

    std::vector<DailyCell> cells;
    for (int close : spec.history_closes) {
        int hist_end = iev + close;          // exclusive of the window close day itself
        int hist_begin = hist_end - spec.history_days;
        if (hist_begin < 1) hist_begin = 1;  // day 0 has no return
        int nh = hist_end - hist_begin;
        if (nh < spec.min_history_days)
            throw DataError("daily study: insufficient history before close " +
                            std::to_string(close) + " (" + std::to_string(nh) + " days)");
        for (const DailyWindow& w : spec.windows) {
            int a = iev + w.pre, b = iev + w.post;
            if (a < 1 || b >= N)
                throw DataError("daily study: event window (" + std::to_string(w.pre) +
                                "," + std::to_string(w.post) + ") outside the data");
            for (const Metric& m : metrics) {
                double hsum = 0, hss = 0;
                for (int d = hist_begin; d < hist_end; ++d)
                    hsum += (*m.values)[static_cast<size_t>(d)];
                double hmean = hsum / nh;
                for (int d = hist_begin; d < hist_end; ++d) {
                    double x = (*m.values)[static_cast<size_t>(d)] - hmean;
                    hss += x * x;
                }
                double hsd = std::sqrt(hss / (nh - 1));

                double esum = 0;
                int ne = 0;
                for (int d = a; d <= b; ++d) {
                    esum += (*m.values)[static_cast<size_t>(d)];
                    ++ne;
                }
                double emean = esum / ne;

                DailyCell cell;
                cell.metric = m.name;
                cell.history_close = close;
                cell.window = w;
                cell.event_mean = emean;
                cell.history_mean = hmean;
                cell.delta = emean - hmean;
                if (hsd > 0) {
                    cell.tstat = cell.delta / (hsd * std::sqrt(1.0 / ne + 1.0 / nh));
                    cell.pvalue = pvalue_t(cell.tstat, nh - 1);
                } else {
                    cell.tstat = 0;
                    cell.pvalue = cell.delta == 0 ? 1.0 : 0.0;
                }
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

} // namespace sovrisk
