#pragma once

#include <compare>
#include <cstdio>
#include <string>

#include "sovrisk/error.hpp"

namespace sovrisk {

// A Gregorian calendar month, totally ordered, with well-defined
// successor/predecessor via the serial month count.
struct MonthIndex {
    int year = 1900;
    int month = 1; // 1..12

    constexpr int serial() const { return year * 12 + (month - 1); }

    static constexpr MonthIndex from_serial(int s) {
        int y = s / 12, m = s % 12;
        if (m < 0) { m += 12; --y; }
        return MonthIndex{y, m + 1};
    }

    MonthIndex next() const { return from_serial(serial() + 1); }
    MonthIndex prev() const { return from_serial(serial() - 1); }
    MonthIndex plus(int k) const { return from_serial(serial() + k); }

    friend auto operator<=>(const MonthIndex& a, const MonthIndex& b) {
        return a.serial() <=> b.serial();
    }
    friend bool operator==(const MonthIndex& a, const MonthIndex& b) {
        return a.serial() == b.serial();
    }

    std::string str() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
        return buf;
    }

    // Parses "YYYY-MM".
    static MonthIndex parse(const std::string& s) {
        int y = 0, m = 0;
        char trailing = 0;
        if (std::sscanf(s.c_str(), "%d-%d%c", &y, &m, &trailing) != 2 || m < 1 || m > 12)
            throw DataError("bad month '" + s + "' (expected YYYY-MM)");
        return MonthIndex{y, m};
    }
};

// Inclusive month range.
struct MonthSpan {
    MonthIndex first;
    MonthIndex last;

    int length() const { return last.serial() - first.serial() + 1; }
    bool contains(MonthIndex m) const { return first <= m && m <= last; }
};

// ISO calendar date for daily quote data. Only ordering and parsing are
// needed; no day arithmetic happens on dates (trading days are positional).
struct Date {
    int year = 1900;
    int month = 1;
    int day = 1;

    friend auto operator<=>(const Date&, const Date&) = default;

    std::string str() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
        return buf;
    }

    static Date parse(const std::string& s) {
        int y = 0, m = 0, d = 0;
        char trailing = 0;
        if (std::sscanf(s.c_str(), "%d-%d-%d%c", &y, &m, &d, &trailing) != 3 ||
            m < 1 || m > 12 || d < 1 || d > 31)
            throw DataError("bad date '" + s + "' (expected YYYY-MM-DD)");
        return Date{y, m, d};
    }
};

} // namespace sovrisk
