#pragma once

#include <string>
#include <vector>

#include "sovrisk/events.hpp"
#include "sovrisk/series.hpp"

namespace sovrisk {

enum class ColumnRole {
    dependent,
    lagged_dependent,
    unrest,
    control,
    variance_exog_longrun,
    variance_exog_shortrun,
    instrument,
};

std::string to_string(ColumnRole r);
ColumnRole parse_column_role(const std::string& s);

// Named columns over one shared month range, each with a role label.
class DesignMatrix {
public:
    struct Column {
        std::string name;
        ColumnRole role;
        MonthlySeries series;
    };

    explicit DesignMatrix(MonthSpan range) : range_(range) {}

    MonthSpan range() const { return range_; }
    size_t n_rows() const { return static_cast<size_t>(range_.length()); }
    const std::vector<Column>& columns() const { return columns_; }

    void add(const MonthlySeries& s, ColumnRole role);
    bool has(const std::string& name) const;
    const Column& column(const std::string& name) const;
    std::vector<const Column*> with_role(ColumnRole role) const;

    // Row t has a missing entry in some column.
    std::vector<bool> missing_rows() const;
    // Value of column `name` at row t (0-based within the range).
    Cell value(const std::string& name, size_t t) const;

private:
    MonthSpan range_;
    std::vector<Column> columns_;
};

inline constexpr double kKmPerVerst = 1.0668;

// Historical verst to kilometer conversion.
double versts_to_km(double versts);

enum class DistanceMode { raw_km, log_km };

// Event distance regressor: raw kilometers or their natural log. Falls back
// to the versts field when distance_km is absent.
double distance_feature(const EventRecord& record, DistanceMode mode);

// Gated rolling count: 0 off event months; on an event month, 1 for the
// focal month plus the number of the prior 11 months with the dummy set.
MonthlySeries cumulative_count(const MonthlySeries& dummy);

// 1 in months where >= 2 distinct event kinds are active.
MonthlySeries multiple_events_dummy(const EventCatalog& catalog, MonthSpan range);

// 1 in months where a focal-matching event is active and an event of a
// different kind is active too.
MonthlySeries interaction_dummy(const EventFilter& focal, const EventCatalog& catalog,
                                MonthSpan range);

// Symmetric truncated approximation of the ideal band-pass on periods
// [low_period, high_period], lead/lag K, weights adjusted to sum to zero.
// First and last K slots come back missing.
MonthlySeries baxter_king(const MonthlySeries& s, int low_period, int high_period,
                          int truncation);
std::vector<double> baxter_king_weights(int low_period, int high_period, int truncation);

// Value at t equals the input at t-k; first k slots missing.
MonthlySeries lag(const MonthlySeries& s, int k);

} // namespace sovrisk
