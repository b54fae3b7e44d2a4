#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sovrisk/calendar.hpp"
#include "sovrisk/error.hpp"

namespace sovrisk {

using Cell = std::optional<double>;

// Named, contiguous monthly series. One slot per month starting at start();
// missing slots are allowed and propagate through transforms.
class MonthlySeries {
public:
    MonthlySeries() = default;
    MonthlySeries(std::string name, MonthIndex start, std::vector<Cell> values)
        : name_(std::move(name)), start_(start), values_(std::move(values)) {
        for (const Cell& c : values_)
            if (c && !std::isfinite(*c))
                throw DataError("series '" + name_ + "': non-finite value");
    }

    const std::string& name() const { return name_; }
    MonthIndex start() const { return start_; }
    MonthIndex last() const { return start_.plus(static_cast<int>(values_.size()) - 1); }
    MonthSpan span() const { return {start_, last()}; }
    size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    const std::vector<Cell>& values() const { return values_; }

    Cell at(MonthIndex m) const {
        int i = m.serial() - start_.serial();
        if (i < 0 || i >= static_cast<int>(values_.size())) return std::nullopt;
        return values_[static_cast<size_t>(i)];
    }

    Cell at_index(size_t i) const { return i < values_.size() ? values_[i] : Cell{}; }

    MonthlySeries renamed(std::string name) const {
        MonthlySeries s = *this;
        s.name_ = std::move(name);
        return s;
    }

    // Restriction to a sub-span (clipped to the available range).
    MonthlySeries slice(MonthSpan sp) const {
        std::vector<Cell> out;
        out.reserve(static_cast<size_t>(sp.length()));
        for (int s = sp.first.serial(); s <= sp.last.serial(); ++s)
            out.push_back(at(MonthIndex::from_serial(s)));
        return MonthlySeries(name_, sp.first, std::move(out));
    }

private:
    std::string name_;
    MonthIndex start_{1900, 1};
    std::vector<Cell> values_;
};

} // namespace sovrisk
