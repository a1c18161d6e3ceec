#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sibsurv {

// Stable error codes shared by the C++ core and the C API.
enum class errc {
  ok = 0,
  io_error,
  parse_error,
  missing_column,
  bad_date,
  orphan_sibling,
  duplicate_sibling,
  nonpositive_weight,
  frame_violation,
  overlapping_cells,
  zero_exposure,
  undefined_term,
  singleton_stratum,
  zero_truth,
  empty_seed,
  zero_visibility_seed,
  division_by_zero,
  bad_argument,
};

const char* errc_name(errc c);

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

// One row-level problem found while ingesting an input file.
struct validation_issue {
  errc code;
  std::string file;
  long row;  // 1-based data row (header excluded); 0 when not row-specific
  std::string message;
};

// Aggregate of every issue found in a load; loading is all-or-nothing.
class validation_error : public error {
 public:
  explicit validation_error(std::vector<validation_issue> issues);
  const std::vector<validation_issue>& issues() const { return issues_; }

 private:
  std::vector<validation_issue> issues_;
};

}  // namespace sibsurv
