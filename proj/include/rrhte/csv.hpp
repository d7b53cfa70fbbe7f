#pragma once

#include <string>
#include <vector>

namespace rrhte::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws ValidationError naming the column.
    std::size_t column(const std::string& name) const;
};

/// Reads a comma-delimited UTF-8 file with a mandatory header row. Cells are
/// trimmed of surrounding whitespace; quoting is not interpreted.
Table read_file(const std::string& path);

/// Shortest decimal string that round-trips the double (to_chars); "inf",
/// "-inf" and "nan" for non-finite values.
std::string format(double value);

/// Parses a double; throws ValidationError with the given context on failure.
double parse_double(const std::string& cell, const std::string& context);

std::string join_row(const std::vector<std::string>& cells);

}  // namespace rrhte::csv
