#pragma once

#include <vector>

#include "sovrisk/daily.hpp"
#include "sovrisk/series.hpp"

namespace sovrisk {

// R_t = ln(v_t / v_{t-1}). First slot missing; a slot is missing whenever
// either operand is. Throws on non-positive values.
MonthlySeries log_return(const MonthlySeries& s);
std::vector<Cell> log_return(const std::vector<Cell>& values,
                             const std::string& name = "");

// Squared returns, slot by slot.
MonthlySeries realized_vol(const MonthlySeries& returns);

// Range-based intraday variance: 0.361 * ln(high/low)^2. The conventional
// rounded constant 0.361 is used literally (exact: 1/(4 ln 2) = 0.36067...).
inline constexpr double kParkinsonConstant = 0.361;
double parkinson_intraday(const DailyQuote& q);

// Campbell-style bond liquidity for one year of monthly returns:
// 1 - (#zero-return months)/12. Missing slots count as zero returns.
double liquidity(const std::vector<Cell>& monthly_returns_of_year);

// Elementwise yield difference over the overlapping span, percentage points.
MonthlySeries spread(const MonthlySeries& domestic, const MonthlySeries& benchmark);

} // namespace sovrisk
