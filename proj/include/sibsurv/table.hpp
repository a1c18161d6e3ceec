#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sibsurv {

// Column-named result table rendered to CSV or JSON. Cells are typed so the
// JSON mirror can keep numbers as numbers; an empty cell renders as a blank
// CSV field / JSON null.
class table {
 public:
  using value = std::variant<std::monostate, double, long long, std::string>;

  explicit table(std::vector<std::string> columns)
      : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t n_rows() const { return rows_.size(); }

  void add_row(std::vector<value> row);
  const value& at(std::size_t row, std::size_t col) const;

  std::string cell_text(std::size_t row, std::size_t col) const;

  // path empty -> stdout.
  void write_csv(const std::string& path) const;
  void write_json(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<value>> rows_;
};

}  // namespace sibsurv
