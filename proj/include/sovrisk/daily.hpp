#pragma once

#include <vector>

#include "sovrisk/calendar.hpp"
#include "sovrisk/error.hpp"

namespace sovrisk {

// One trading day's quote: price/yield high, low, close.
struct DailyQuote {
    Date date;
    double high = 0;
    double low = 0;
    double close = 0;

    void validate() const {
        if (!(low > 0) || !(high > 0) || !(close > 0))
            throw DataError("quote " + date.str() + ": prices must be strictly positive");
        if (low > high)
            throw DataError("quote " + date.str() + ": low > high");
        if (close < low || close > high)
            throw DataError("quote " + date.str() + ": close outside [low, high]");
    }
};

// Dated quote records sorted ascending by date; dates unique.
class DailyQuoteSeries {
public:
    DailyQuoteSeries() = default;
    explicit DailyQuoteSeries(std::vector<DailyQuote> quotes)
        : quotes_(std::move(quotes)) {
        for (size_t i = 0; i < quotes_.size(); ++i) {
            quotes_[i].validate();
            if (i > 0 && !(quotes_[i - 1].date < quotes_[i].date))
                throw DataError("daily quotes not strictly increasing at " +
                                quotes_[i].date.str());
        }
    }

    const std::vector<DailyQuote>& quotes() const { return quotes_; }
    size_t size() const { return quotes_.size(); }

    // Index of the first quote with date >= d, or size() if none.
    size_t lower_bound(Date d) const {
        size_t lo = 0, hi = quotes_.size();
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (quotes_[mid].date < d) lo = mid + 1; else hi = mid;
        }
        return lo;
    }

private:
    std::vector<DailyQuote> quotes_;
};

} // namespace sovrisk
