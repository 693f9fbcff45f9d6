#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace hmclab {

/// One table of results. Comments carry the resolved configuration and
/// seed so a report is reproducible from its own header.
struct Table {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    using Cell = std::variant<std::string, double, long long>;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> cells) { rows.push_back(std::move(cells)); }
};

/// Round-trip-exact decimal formatting.
std::string format_double(double x);

/// Comma-separated, '.' decimal, header row, '#' comment lines.
void write_csv(const Table& t, std::ostream& os);
/// The same records as a JSON object {"meta": [...], "rows": [{...}]}.
void write_json(const Table& t, std::ostream& os);

void write_table_file(const Table& t, const std::string& path, const std::string& format);

}  // namespace hmclab
