#include "sovrisk/table.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sovrisk/dist.hpp"
#include "sovrisk/error.hpp"

namespace sovrisk {

void Table::add_row(std::vector<std::string> cells) {
    if (!header.empty() && cells.size() != header.size())
        throw DataError("table '" + title + "': row width does not match header");
    rows.push_back(std::move(cells));
}

std::string Table::to_csv() const {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out.str();
}

std::string Table::to_text() const {
    std::vector<size_t> width(header.size(), 0);
    auto widen = [&](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i)
            width[i] = std::max(width[i], cells[i].size());
    };
    widen(header);
    for (const auto& r : rows) widen(r);

    std::ostringstream out;
    if (!title.empty()) out << title << '\n';
    auto line = [&](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out << "  ";
            out << cells[i];
            if (i + 1 < cells.size())
                out << std::string(width[i] - cells[i].size(), ' ');
        }
        out << '\n';
    };
    line(header);
    size_t total = 0;
    for (size_t w : width) total += w + 2;
    out << std::string(total > 2 ? total - 2 : total, '-') << '\n';
    for (const auto& r : rows) line(r);
    return out.str();
}

std::string format_num(double v, int significant) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, v);
    return buf;
}

std::string format_coef(double estimate, double tstat, double pvalue) {
    std::string s = format_num(estimate);
    s += stars(pvalue);
    s += " (" + format_num(std::fabs(tstat), 3) + ")";
    return s;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace sovrisk
