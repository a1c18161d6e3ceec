#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sibsurv::csv {

// Minimal strict CSV support for the flat survey schemas: comma separated,
// no embedded commas or quoting, first line is the header. Tolerates CRLF
// and a trailing newline.

struct file {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  // Column position or nullopt.
  std::optional<std::size_t> column(const std::string& name) const;
};

file read_file(const std::string& path);

void write_file(const std::string& path,
                const std::vector<std::string>& columns,
                const std::vector<std::vector<std::string>>& rows);

// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double v);
std::string format_int(long long v);

}  // namespace sibsurv::csv
