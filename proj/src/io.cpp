#include "sovrisk/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace sovrisk {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (true) {
        size_t next = line.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& cell, size_t row, const std::string& col) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw DataError("row " + std::to_string(row) + ", column '" + col +
                        "': unparseable numeric cell '" + cell + "'");
    return v;
}

} // namespace

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file '" + path + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line, ',');
        for (auto& c : cells) c = trim(c);
        rows.push_back(std::move(cells));
    }
    return rows;
}

void write_csv(const std::string& path,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file '" + path + "'");
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
}

std::map<std::string, MonthlySeries> parse_monthly_csv(
    const std::string& path, const std::vector<std::string>& required_columns) {
    auto rows = read_csv(path);
    if (rows.empty()) throw DataError("empty monthly file '" + path + "'");
    const auto& header = rows[0];
    if (header.empty() || header[0] != "date")
        throw DataError("monthly file '" + path + "': first column must be 'date'");
    for (const auto& req : required_columns)
        if (std::find(header.begin(), header.end(), req) == header.end())
            throw DataError("monthly file '" + path + "': missing column '" + req + "'");
    if (rows.size() < 2) throw DataError("monthly file '" + path + "': no data rows");

    struct Row { MonthIndex m; std::vector<Cell> cells; };
    std::vector<Row> data;
    std::set<int> seen;
    for (size_t r = 1; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        if (cells.size() != header.size())
            throw DataError("row " + std::to_string(r + 1) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
        MonthIndex m = MonthIndex::parse(cells[0]);
        if (!seen.insert(m.serial()).second)
            throw DataError("duplicate month " + m.str());
        Row row{m, {}};
        for (size_t c = 1; c < cells.size(); ++c) {
            if (cells[c].empty())
                row.cells.emplace_back();
            else
                row.cells.emplace_back(parse_number(cells[c], r + 1, header[c]));
        }
        data.push_back(std::move(row));
    }
    std::sort(data.begin(), data.end(),
              [](const Row& a, const Row& b) { return a.m < b.m; });

    MonthIndex start = data.front().m;
    int length = data.back().m.serial() - start.serial() + 1;
    std::map<std::string, MonthlySeries> out;
    for (size_t c = 1; c < header.size(); ++c) {
        std::vector<Cell> vals(static_cast<size_t>(length));
        for (const Row& row : data)
            vals[static_cast<size_t>(row.m.serial() - start.serial())] = row.cells[c - 1];
        out.emplace(header[c], MonthlySeries(header[c], start, std::move(vals)));
    }
    return out;
}

EventCatalog parse_event_csv(const std::string& path) {
    auto rows = read_csv(path);
    if (rows.empty()) throw DataError("empty events file '" + path + "'");
    const std::vector<std::string> expected = {
        "id", "kind", "location_class", "region_tags", "start", "duration_months",
        "versts", "distance_km", "oblast_size_km2", "density_per_km2"};
    const auto& header = rows[0];
    for (size_t i = 0; i < expected.size() && i < 6; ++i)
        if (i >= header.size() || header[i] != expected[i])
            throw DataError("events file '" + path + "': column " + std::to_string(i) +
                            " must be '" + expected[i] + "'");

    std::vector<EventRecord> records;
    for (size_t r = 1; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        if (cells.size() < 6)
            throw DataError("events row " + std::to_string(r + 1) + ": too few cells");
        EventRecord rec;
        rec.id = cells[0];
        rec.kind = parse_event_kind(cells[1]);
        rec.location_class = parse_location_class(cells[2]);
        if (!cells[3].empty())
            for (const auto& tag : split(cells[3], ';'))
                if (!trim(tag).empty()) rec.region_tags.insert(parse_region_tag(trim(tag)));
        rec.start = MonthIndex::parse(cells[4]);
        rec.duration_months = static_cast<int>(parse_number(cells[5], r + 1, "duration_months"));
        auto opt = [&](size_t i, const char* col) -> std::optional<double> {
            if (i >= cells.size() || cells[i].empty()) return std::nullopt;
            return parse_number(cells[i], r + 1, col);
        };
        rec.versts = opt(6, "versts");
        rec.distance_km = opt(7, "distance_km");
        rec.oblast_size_km2 = opt(8, "oblast_size_km2");
        rec.density_per_km2 = opt(9, "density_per_km2");
        records.push_back(std::move(rec));
    }
    return EventCatalog(std::move(records)); // validates ids + invariants
}

void write_event_csv(const std::string& path, const EventCatalog& catalog) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"id", "kind", "location_class", "region_tags", "start",
                    "duration_months", "versts", "distance_km", "oblast_size_km2",
                    "density_per_km2"});
    auto num = [](const std::optional<double>& v) -> std::string {
        if (!v) return "";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.10g", *v);
        return buf;
    };
    for (const EventRecord& r : catalog.records()) {
        std::string tags;
        for (RegionTag t : r.region_tags) {
            if (!tags.empty()) tags += ';';
            tags += to_string(t);
        }
        rows.push_back({r.id, to_string(r.kind), to_string(r.location_class), tags,
                        r.start.str(), std::to_string(r.duration_months), num(r.versts),
                        num(r.distance_km), num(r.oblast_size_km2),
                        num(r.density_per_km2)});
    }
    write_csv(path, rows);
}

DailyQuoteSeries parse_daily_csv(const std::string& path) {
    auto rows = read_csv(path);
    if (rows.empty()) throw DataError("empty daily file '" + path + "'");
    const auto& header = rows[0];
    if (header.size() != 4 || header[0] != "date" || header[1] != "high" ||
        header[2] != "low" || header[3] != "close")
        throw DataError("daily file '" + path + "': header must be date,high,low,close");
    std::vector<DailyQuote> quotes;
    for (size_t r = 1; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        if (cells.size() != 4)
            throw DataError("daily row " + std::to_string(r + 1) + ": expected 4 cells");
        DailyQuote q;
        q.date = Date::parse(cells[0]);
        q.high = parse_number(cells[1], r + 1, "high");
        q.low = parse_number(cells[2], r + 1, "low");
        q.close = parse_number(cells[3], r + 1, "close");
        quotes.push_back(q);
    }
    return DailyQuoteSeries(std::move(quotes));
}

void write_monthly_csv(const std::string& path,
                       const std::vector<MonthlySeries>& columns) {
    if (columns.empty()) throw DataError("write_monthly_csv: no columns");
    int lo = columns[0].start().serial(), hi = columns[0].last().serial();
    for (const auto& c : columns) {
        lo = std::min(lo, c.start().serial());
        hi = std::max(hi, c.last().serial());
    }
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header = {"date"};
    for (const auto& c : columns) header.push_back(c.name());
    rows.push_back(header);
    for (int s = lo; s <= hi; ++s) {
        MonthIndex m = MonthIndex::from_serial(s);
        std::vector<std::string> row = {m.str()};
        for (const auto& c : columns) {
            Cell v = c.at(m);
            if (v) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.12g", *v);
                row.push_back(buf);
            } else {
                row.push_back("");
            }
        }
        rows.push_back(std::move(row));
    }
    write_csv(path, rows);
}

void write_daily_csv(const std::string& path, const DailyQuoteSeries& daily) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"date", "high", "low", "close"});
    for (const DailyQuote& q : daily.quotes()) {
        char h[32], l[32], c[32];
        std::snprintf(h, sizeof(h), "%.12g", q.high);
        std::snprintf(l, sizeof(l), "%.12g", q.low);
        std::snprintf(c, sizeof(c), "%.12g", q.close);
        rows.push_back({q.date.str(), h, l, c});
    }
    write_csv(path, rows);
}

} // namespace sovrisk
