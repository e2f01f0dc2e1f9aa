#include "fbl/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fbl::csv {

std::string format_sig12(double value) {
    if (!std::isfinite(value)) return "";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

void CsvTable::validate() const {
    for (const auto& row : rows)
        if (row.size() != header.size())
            throw std::invalid_argument("CsvTable: ragged row (expected " +
                                        std::to_string(header.size()) + " cells, got " +
                                        std::to_string(row.size()) + ")");
}

void CsvTable::write(std::ostream& os) const {
    validate();
    for (std::size_t i = 0; i < header.size(); ++i)
        os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << row[i];
        os << '\n';
    }
    for (const auto& [key, value] : footer) os << "# " << key << '=' << value << '\n';
}

std::string CsvTable::to_string() const {
    std::ostringstream oss;
    write(oss);
    return oss.str();
}

namespace {

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

}  // namespace

CsvTable CsvTable::parse(std::istream& is) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            if (!body.empty() && body.front() == ' ') body.erase(0, 1);
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                table.footer.emplace_back(body, "");
            else
                table.footer.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        if (!have_header) {
            table.header = split_cells(line);
            have_header = true;
        } else {
            table.rows.push_back(split_cells(line));
        }
    }
    table.validate();
    return table;
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace fbl::csv
