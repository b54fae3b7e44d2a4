#include "sovrisk/returns.hpp"

#include <algorithm>
#include <cmath>

namespace sovrisk {

std::vector<Cell> log_return(const std::vector<Cell>& values, const std::string& name) {
    std::vector<Cell> out(values.size());
    for (size_t t = 0; t < values.size(); ++t) {
        if (values[t] && *values[t] <= 0.0)
            throw DataError("log_return" + (name.empty() ? "" : " '" + name + "'") +
                            ": non-positive value at slot " + std::to_string(t));
        if (t == 0 || !values[t] || !values[t - 1]) continue;
        out[t] = std::log(*values[t] / *values[t - 1]);
    }
    return out;
}

MonthlySeries log_return(const MonthlySeries& s) {
    return MonthlySeries(s.name() + "_ret", s.start(), log_return(s.values(), s.name()));
}

MonthlySeries realized_vol(const MonthlySeries& returns) {
    std::vector<Cell> out(returns.size());
    for (size_t t = 0; t < returns.size(); ++t)
        if (returns.values()[t]) out[t] = (*returns.values()[t]) * (*returns.values()[t]);
    return MonthlySeries(returns.name() + "_rv", returns.start(), std::move(out));
}

double parkinson_intraday(const DailyQuote& q) {
    q.validate();
    double r = std::log(q.high / q.low);
    return kParkinsonConstant * r * r;
}

double liquidity(const std::vector<Cell>& monthly_returns_of_year) {
    if (monthly_returns_of_year.size() != 12)
        throw DataError("liquidity: expected exactly 12 monthly slots, got " +
                        std::to_string(monthly_returns_of_year.size()));
    int zeros = 0;
    for (const Cell& c : monthly_returns_of_year)
        if (!c || *c == 0.0) ++zeros;
    return 1.0 - zeros / 12.0;
}

MonthlySeries spread(const MonthlySeries& domestic, const MonthlySeries& benchmark) {
    int lo = std::max(domestic.start().serial(), benchmark.start().serial());
    int hi = std::min(domestic.last().serial(), benchmark.last().serial());
    if (lo > hi) throw DataError("spread: series '" + domestic.name() + "' and '" +
                                 benchmark.name() + "' do not overlap");
    std::vector<Cell> out(static_cast<size_t>(hi - lo + 1));
    for (int s = lo; s <= hi; ++s) {
        Cell a = domestic.at(MonthIndex::from_serial(s));
        Cell b = benchmark.at(MonthIndex::from_serial(s));
        if (a && b) out[static_cast<size_t>(s - lo)] = *a - *b;
    }
    return MonthlySeries(domestic.name() + "_spread", MonthIndex::from_serial(lo),
                         std::move(out));
}

} // namespace sovrisk
