#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sovrisk/calendar.hpp"
#include "sovrisk/series.hpp"

namespace sovrisk {

enum class EventKind {
    attempted_assassination,
    successful_assassination,
    collective,
    external,
};

enum class LocationClass {
    homeland,
    imperial,
    external_border,
};

enum class RegionTag {
    ukraine,
    muscovy,
    other_imperial,
    caucasus_rebellion,
    caucasus_war,
};

std::string to_string(EventKind k);
std::string to_string(LocationClass c);
std::string to_string(RegionTag t);
EventKind parse_event_kind(const std::string& s);
LocationClass parse_location_class(const std::string& s);
RegionTag parse_region_tag(const std::string& s);

// One dated, typed, located unrest event. duration_months >= 1; the event is
// "active" from start through start + duration_months - 1 inclusive.
struct EventRecord {
    std::string id;
    EventKind kind = EventKind::collective;
    LocationClass location_class = LocationClass::homeland;
    std::set<RegionTag> region_tags;
    MonthIndex start{1900, 1};
    int duration_months = 1;
    std::optional<double> versts;
    std::optional<double> distance_km;
    std::optional<double> oblast_size_km2;
    std::optional<double> density_per_km2;

    MonthIndex last_month() const { return start.plus(duration_months - 1); }
    bool active_in(MonthIndex m) const { return start <= m && m <= last_month(); }

    void validate() const;
};

struct EventFilter {
    std::optional<EventKind> kind;
    std::optional<LocationClass> location;
    std::optional<RegionTag> tag;

    bool matches(const EventRecord& r) const {
        if (kind && r.kind != *kind) return false;
        if (location && r.location_class != *location) return false;
        if (tag && !r.region_tags.count(*tag)) return false;
        return true;
    }
};

class EventCatalog {
public:
    EventCatalog() = default;
    explicit EventCatalog(std::vector<EventRecord> records);

    const std::vector<EventRecord>& records() const { return records_; }
    size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    EventCatalog filtered(const EventFilter& f) const;

private:
    std::vector<EventRecord> records_;
};

// 0/1 dummy: one in every month where any filter-matching event is active.
// Overlapping matches still yield 1.
MonthlySeries event_dummies(const EventCatalog& catalog, MonthSpan range,
                            const EventFilter& filter = {},
                            const std::string& name = "dummy");

} // namespace sovrisk
