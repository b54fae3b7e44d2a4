#include "sovrisk/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace sovrisk {

std::string to_string(ColumnRole r) {
    switch (r) {
        case ColumnRole::dependent: return "dependent";
        case ColumnRole::lagged_dependent: return "lagged_dependent";
        case ColumnRole::unrest: return "unrest";
        case ColumnRole::control: return "control";
        case ColumnRole::variance_exog_longrun: return "variance_exog_longrun";
        case ColumnRole::variance_exog_shortrun: return "variance_exog_shortrun";
        case ColumnRole::instrument: return "instrument";
    }
    return "?";
}

ColumnRole parse_column_role(const std::string& s) {
    if (s == "dependent") return ColumnRole::dependent;
    if (s == "lagged_dependent") return ColumnRole::lagged_dependent;
    if (s == "unrest") return ColumnRole::unrest;
    if (s == "control") return ColumnRole::control;
    if (s == "variance_exog_longrun") return ColumnRole::variance_exog_longrun;
    if (s == "variance_exog_shortrun") return ColumnRole::variance_exog_shortrun;
    if (s == "instrument") return ColumnRole::instrument;
    throw DataError("unknown column role '" + s + "'");
}

void DesignMatrix::add(const MonthlySeries& s, ColumnRole role) {
    if (has(s.name()))
        throw DataError("design matrix: column '" + s.name() + "' named twice");
    columns_.push_back(Column{s.name(), role, s.slice(range_)});
}

bool DesignMatrix::has(const std::string& name) const {
    return std::any_of(columns_.begin(), columns_.end(),
                       [&](const Column& c) { return c.name == name; });
}

const DesignMatrix::Column& DesignMatrix::column(const std::string& name) const {
    for (const Column& c : columns_)
        if (c.name == name) return c;
    throw DataError("design matrix: no column '" + name + "'");
}

std::vector<const DesignMatrix::Column*> DesignMatrix::with_role(ColumnRole role) const {
    std::vector<const Column*> out;
    for (const Column& c : columns_)
        if (c.role == role) out.push_back(&c);
    return out;
}

std::vector<bool> DesignMatrix::missing_rows() const {
    std::vector<bool> flag(n_rows(), false);
    for (const Column& c : columns_)
        for (size_t t = 0; t < n_rows(); ++t)
            if (!c.series.at_index(t)) flag[t] = true;
    return flag;
}

Cell DesignMatrix::value(const std::string& name, size_t t) const {
    return column(name).series.at_index(t);
}

double versts_to_km(double versts) {
    if (versts < 0) throw DataError("versts_to_km: negative input");
    return versts * kKmPerVerst;
}

double distance_feature(const EventRecord& record, DistanceMode mode) {
    double km;
    if (record.distance_km)
        km = *record.distance_km;
    else if (record.versts)
        km = versts_to_km(*record.versts);
    else
        throw DataError("event '" + record.id + "': no distance_km or versts");
    if (mode == DistanceMode::raw_km) return km;
    if (km <= 0)
        throw DataError("event '" + record.id + "': log distance undefined at 0 km");
    return std::log(km);
}

MonthlySeries cumulative_count(const MonthlySeries& dummy) {
    const auto& v = dummy.values();
    for (size_t t = 0; t < v.size(); ++t)
        if (v[t] && *v[t] != 0.0 && *v[t] != 1.0)
            throw DataError("cumulative_count: non-binary input in '" + dummy.name() +
                            "' at slot " + std::to_string(t));
    std::vector<Cell> out(v.size());
    for (size_t t = 0; t < v.size(); ++t) {
        if (!v[t]) continue;
        if (*v[t] == 0.0) { out[t] = 0.0; continue; }
        int count = 1;
        for (size_t j = (t >= 11 ? t - 11 : 0); j < t; ++j)
            if (v[j] && *v[j] == 1.0) ++count;
        out[t] = static_cast<double>(count);
    }
    return MonthlySeries(dummy.name() + "_count", dummy.start(), std::move(out));
}

MonthlySeries multiple_events_dummy(const EventCatalog& catalog, MonthSpan range) {
    std::vector<Cell> out(static_cast<size_t>(range.length()), Cell{0.0});
    for (int s = range.first.serial(); s <= range.last.serial(); ++s) {
        MonthIndex m = MonthIndex::from_serial(s);
        std::set<EventKind> kinds;
        for (const EventRecord& r : catalog.records())
            if (r.active_in(m)) kinds.insert(r.kind);
        if (kinds.size() >= 2)
            out[static_cast<size_t>(s - range.first.serial())] = 1.0;
    }
    return MonthlySeries("multiple_events", range.first, std::move(out));
}

MonthlySeries interaction_dummy(const EventFilter& focal, const EventCatalog& catalog,
                                MonthSpan range) {
    std::vector<Cell> out(static_cast<size_t>(range.length()), Cell{0.0});
    for (int s = range.first.serial(); s <= range.last.serial(); ++s) {
        MonthIndex m = MonthIndex::from_serial(s);
        bool focal_active = false;
        std::set<EventKind> focal_kinds, other_kinds;
        for (const EventRecord& r : catalog.records()) {
            if (!r.active_in(m)) continue;
            if (focal.matches(r)) {
                focal_active = true;
                focal_kinds.insert(r.kind);
            }
            other_kinds.insert(r.kind);
        }
        if (!focal_active) continue;
        for (EventKind k : other_kinds)
            if (!focal_kinds.count(k)) {
                out[static_cast<size_t>(s - range.first.serial())] = 1.0;
                break;
            }
    }
    return MonthlySeries("interaction", range.first, std::move(out));
}

std::vector<double> baxter_king_weights(int low_period, int high_period, int truncation) {
    if (!(low_period < high_period) || low_period < 2 || truncation < 1)
        throw DataError("baxter_king: need 2 <= low_period < high_period, K >= 1");
    const double pi = std::numbers::pi;
    double w_hi = 2.0 * pi / low_period;  // upper cutoff frequency
    double w_lo = 2.0 * pi / high_period; // lower cutoff frequency
    int K = truncation;
    std::vector<double> w(static_cast<size_t>(2 * K + 1));
    for (int j = -K; j <= K; ++j) {
        double b = (j == 0) ? (w_hi - w_lo) / pi
                            : (std::sin(w_hi * j) - std::sin(w_lo * j)) / (pi * j);
        w[static_cast<size_t>(j + K)] = b;
    }
    double mean = 0;
    for (double x : w) mean += x;
    mean /= static_cast<double>(w.size());
    for (double& x : w) x -= mean; // zero-gain at frequency 0
    return w;
}

MonthlySeries baxter_king(const MonthlySeries& s, int low_period, int high_period,
                          int truncation) {
    int K = truncation;
    if (static_cast<int>(s.size()) <= 2 * K)
        throw DataError("baxter_king: series '" + s.name() + "' too short for K=" +
                        std::to_string(K));
    auto w = baxter_king_weights(low_period, high_period, K);
    const auto& v = s.values();
    std::vector<Cell> out(v.size());
    for (int t = K; t + K < static_cast<int>(v.size()); ++t) {
        double acc = 0;
        bool ok = true;
        for (int j = -K; j <= K; ++j) {
            const Cell& c = v[static_cast<size_t>(t + j)];
            if (!c) { ok = false; break; }
            acc += w[static_cast<size_t>(j + K)] * (*c);
        }
        if (ok) out[static_cast<size_t>(t)] = acc;
    }
    return MonthlySeries(s.name() + "_bk", s.start(), std::move(out));
}

MonthlySeries lag(const MonthlySeries& s, int k) {
    if (k < 1) throw DataError("lag: k must be >= 1");
    std::vector<Cell> out(s.size());
    for (size_t t = static_cast<size_t>(k); t < s.size(); ++t)
        out[t] = s.values()[t - static_cast<size_t>(k)];
    return MonthlySeries(s.name() + "_lag" + std::to_string(k), s.start(), std::move(out));
}

} // namespace sovrisk
