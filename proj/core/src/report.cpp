#include "hmclab/report.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace hmclab {

std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {
std::string cell_to_string(const Table::Cell& c) {
    if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
    if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
    return std::to_string(std::get<long long>(c));
}
}  // namespace

void write_csv(const Table& t, std::ostream& os) {
    for (const auto& c : t.comments) os << "# " << c << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        os << t.columns[i] << (i + 1 < t.columns.size() ? "," : "");
    }
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << cell_to_string(row[i]) << (i + 1 < row.size() ? "," : "");
        }
        os << "\n";
    }
}

void write_json(const Table& t, std::ostream& os) {
    nlohmann::ordered_json j;
    j["meta"] = t.comments;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r;
        for (std::size_t i = 0; i < row.size(); ++i) {
            const auto& c = row[i];
            if (std::holds_alternative<std::string>(c)) {
                r[t.columns[i]] = std::get<std::string>(c);
            } else if (std::holds_alternative<double>(c)) {
                r[t.columns[i]] = std::get<double>(c);
            } else {
                r[t.columns[i]] = std::get<long long>(c);
            }
        }
        j["rows"].push_back(std::move(r));
    }
    os << j.dump(2) << "\n";
}

void write_table_file(const Table& t, const std::string& path, const std::string& format) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("report: cannot open " + path);
    if (format == "json") {
        write_json(t, os);
    } else {
        write_csv(t, os);
    }
}

}  // namespace hmclab
