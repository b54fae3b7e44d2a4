#pragma once

#include <string>
#include <vector>

namespace sovrisk {

// Row/column report with a fixed header; serializes to machine CSV and to
// aligned human-readable text.
struct Table {
    std::string title;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells);
    std::string to_csv() const;  // header + rows, no title
    std::string to_text() const; // title + aligned columns
};

// "0.030* (1.88)" — estimate with significance stars and |t| in parentheses.
std::string format_coef(double estimate, double tstat, double pvalue);
// fixed significant-digit numeric formatting used across all reports
std::string format_num(double v, int significant = 4);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace sovrisk
