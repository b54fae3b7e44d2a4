#include "sovrisk/events.hpp"

#include <algorithm>
#include <unordered_set>

namespace sovrisk {

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::attempted_assassination: return "attempted_assassination";
        case EventKind::successful_assassination: return "successful_assassination";
        case EventKind::collective: return "collective";
        case EventKind::external: return "external";
    }
    return "?";
}

std::string to_string(LocationClass c) {
    switch (c) {
        case LocationClass::homeland: return "homeland";
        case LocationClass::imperial: return "imperial";
        case LocationClass::external_border: return "external_border";
    }
    return "?";
}

std::string to_string(RegionTag t) {
    switch (t) {
        case RegionTag::ukraine: return "ukraine";
        case RegionTag::muscovy: return "muscovy";
        case RegionTag::other_imperial: return "other_imperial";
        case RegionTag::caucasus_rebellion: return "caucasus_rebellion";
        case RegionTag::caucasus_war: return "caucasus_war";
    }
    return "?";
}

EventKind parse_event_kind(const std::string& s) {
    if (s == "attempted_assassination") return EventKind::attempted_assassination;
    if (s == "successful_assassination") return EventKind::successful_assassination;
    if (s == "collective") return EventKind::collective;
    if (s == "external") return EventKind::external;
    throw DataError("unknown event kind '" + s + "'");
}

LocationClass parse_location_class(const std::string& s) {
    if (s == "homeland") return LocationClass::homeland;
    if (s == "imperial") return LocationClass::imperial;
    if (s == "external_border") return LocationClass::external_border;
    throw DataError("unknown location class '" + s + "'");
}

RegionTag parse_region_tag(const std::string& s) {
    if (s == "ukraine") return RegionTag::ukraine;
    if (s == "muscovy") return RegionTag::muscovy;
    if (s == "other_imperial") return RegionTag::other_imperial;
    if (s == "caucasus_rebellion") return RegionTag::caucasus_rebellion;
    if (s == "caucasus_war") return RegionTag::caucasus_war;
    throw DataError("unknown region tag '" + s + "'");
}

void EventRecord::validate() const {
    if (id.empty()) throw DataError("event with empty id");
    if (duration_months < 1)
        throw DataError("event '" + id + "': duration_months must be >= 1");
    if (location_class == LocationClass::external_border) {
        for (RegionTag t : region_tags)
            if (t == RegionTag::ukraine || t == RegionTag::muscovy ||
                t == RegionTag::other_imperial)
                throw DataError("event '" + id +
                                "': external_border record carries homeland/imperial tag " +
                                to_string(t));
    }
    auto check_nonneg = [&](const std::optional<double>& v, const char* field) {
        if (v && *v < 0)
            throw DataError("event '" + id + "': negative " + std::string(field));
    };
    check_nonneg(versts, "versts");
    check_nonneg(distance_km, "distance_km");
    check_nonneg(oblast_size_km2, "oblast_size_km2");
    check_nonneg(density_per_km2, "density_per_km2");
}

EventCatalog::EventCatalog(std::vector<EventRecord> records)
    : records_(std::move(records)) {
    std::unordered_set<std::string> ids;
    for (const EventRecord& r : records_) {
        r.validate();
        if (!ids.insert(r.id).second)
            throw DataError("duplicate event id '" + r.id + "'");
    }
}

EventCatalog EventCatalog::filtered(const EventFilter& f) const {
    std::vector<EventRecord> out;
    std::copy_if(records_.begin(), records_.end(), std::back_inserter(out),
                 [&](const EventRecord& r) { return f.matches(r); });
    return EventCatalog(std::move(out));
}

MonthlySeries event_dummies(const EventCatalog& catalog, MonthSpan range,
                            const EventFilter& filter, const std::string& name) {
    if (range.length() < 1) throw DataError("event_dummies: empty range");
    std::vector<Cell> vals(static_cast<size_t>(range.length()), Cell{0.0});
    for (const EventRecord& r : catalog.records()) {
        if (!filter.matches(r)) continue;
        int lo = std::max(r.start.serial(), range.first.serial());
        int hi = std::min(r.last_month().serial(), range.last.serial());
        for (int s = lo; s <= hi; ++s)
            vals[static_cast<size_t>(s - range.first.serial())] = 1.0;
    }
    return MonthlySeries(name, range.first, std::move(vals));
}

} // namespace sovrisk
