#pragma once

// Rectangular CSV tables with a provenance footer.  Numeric cells carry 12
// significant digits, '.' decimal separator, no locale dependence; failed
// evaluations appear as empty cells.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace fbl::csv {

// Locale-independent "%.12g"-style formatting via std::to_chars.
std::string format_sig12(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::string>> footer;  // emitted as "# k=v"

    void validate() const;  // rectangular shape
    std::string to_string() const;
    void write(std::ostream& os) const;

    // Parses a table produced by write(); footer comments are recovered.
    static CsvTable parse(std::istream& is);
};

// FNV-1a over a string, used for config provenance hashes.
std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace fbl::csv
