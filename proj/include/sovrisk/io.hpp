#pragma once

#include <map>
#include <string>
#include <vector>

#include "sovrisk/daily.hpp"
#include "sovrisk/events.hpp"
#include "sovrisk/series.hpp"

namespace sovrisk {

// Minimal CSV: comma-separated, no quoting (none of the artifact's formats
// need embedded commas). Empty cells allowed.
std::vector<std::vector<std::string>> read_csv(const std::string& path);
void write_csv(const std::string& path,
               const std::vector<std::vector<std::string>>& rows);

// monthly.csv: header `date,<name>,...`; date column YYYY-MM; numeric cells
// or empty. Gaps between months are filled with missing slots. An optional
// schema restricts/validates which columns must be present.
std::map<std::string, MonthlySeries> parse_monthly_csv(
    const std::string& path, const std::vector<std::string>& required_columns = {});

// events.csv: id,kind,location_class,region_tags,start,duration_months,
// versts,distance_km,oblast_size_km2,density_per_km2 (region_tags
// ';'-delimited; trailing numeric columns optional/empty).
EventCatalog parse_event_csv(const std::string& path);
void write_event_csv(const std::string& path, const EventCatalog& catalog);

// daily.csv: date,high,low,close with ISO dates, ascending.
DailyQuoteSeries parse_daily_csv(const std::string& path);

void write_monthly_csv(const std::string& path,
                       const std::vector<MonthlySeries>& columns);
void write_daily_csv(const std::string& path, const DailyQuoteSeries& daily);

} // namespace sovrisk
