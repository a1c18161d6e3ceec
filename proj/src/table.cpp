#include "sibsurv/table.hpp"

#include <fstream>
#include <iostream>

#include <json.hpp>

#include "sibsurv/csv.hpp"
#include "sibsurv/error.hpp"

namespace sibsurv {

void table::add_row(std::vector<value> row) {
  if (row.size() != columns_.size())
    throw error(errc::bad_argument, "row width does not match columns");
  rows_.push_back(std::move(row));
}

const table::value& table::at(std::size_t row, std::size_t col) const {
  if (row >= rows_.size() || col >= columns_.size())
    throw error(errc::bad_argument, "table index out of range");
  return rows_[row][col];
}

std::string table::cell_text(std::size_t row, std::size_t col) const {
  const value& v = at(row, col);
  if (std::holds_alternative<std::monostate>(v)) return "";
  if (const double* d = std::get_if<double>(&v)) return csv::format_double(*d);
  if (const long long* i = std::get_if<long long>(&v))
    return csv::format_int(*i);
  return std::get<std::string>(v);
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw error(errc::io_error, "cannot write " + path);
  out << text;
  if (!out) throw error(errc::io_error, "write failed: " + path);
}

}  // namespace

void table::write_csv(const std::string& path) const {
  std::string text;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (c) text += ',';
    text += columns_[c];
  }
  text += '\n';
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (c) text += ',';
      text += cell_text(r, c);
    }
    text += '\n';
  }
  write_text(path, text);
}

void table::write_json(const std::string& path) const {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    nlohmann::json obj;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      const value& v = rows_[r][c];
      if (std::holds_alternative<std::monostate>(v))
        obj[columns_[c]] = nullptr;
      else if (const double* d = std::get_if<double>(&v))
        obj[columns_[c]] = *d;
      else if (const long long* i = std::get_if<long long>(&v))
        obj[columns_[c]] = *i;
      else
        obj[columns_[c]] = std::get<std::string>(v);
    }
    arr.push_back(std::move(obj));
  }
  write_text(path, arr.dump(2) + "\n");
}

}  // namespace sibsurv
