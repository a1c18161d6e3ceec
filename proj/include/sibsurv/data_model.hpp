#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sibsurv/error.hpp"

namespace sibsurv {

// Dates are century-month codes: integer months counted from January 1900,
// matching the DHS convention. Only differences matter internally.
using cmc = int;

enum class sex : std::uint8_t { female, male };

inline char sex_code(sex s) { return s == sex::female ? 'f' : 'm'; }

// Completed age in years at month `at` for someone born in month `dob`.
inline int completed_age(cmc dob, cmc at) { return (at - dob) / 12; }

// Who is eligible to respond to the survey. Membership is evaluated at the
// owning respondent's interview month.
struct frame_definition {
  bool female_eligible = true;
  bool male_eligible = false;
  int age_min = 15;
  int age_max = 49;

  bool sex_eligible(sex s) const {
    return s == sex::female ? female_eligible : male_eligible;
  }
  void validate() const;
};

// "f15-49" = females 15-49; "m15-59" = males; "fm15-49" = both sexes.
frame_definition parse_frame_spec(const std::string& spec);
std::string frame_spec_string(const frame_definition& frame);

// A group whose death rate is estimated: sex x age band x calendar window.
// `sex_filter` empty means any sex. Window endpoints are CMC months; whether
// they are absolute or offsets from the interview is decided by the caller
// (see window_mode in tally.hpp).
struct cell {
  std::optional<sex> sex_filter;
  int age_lo = 0;
  int age_hi = 130;
  cmc window_start = 0;
  cmc window_end = 0;

  bool matches_sex(sex s) const { return !sex_filter || *sex_filter == s; }
  bool contains_age(int age) const { return age >= age_lo && age <= age_hi; }
  std::string label() const;  // e.g. "f15-19"
};

// "5y" = 5-year bands x sex spanning [lo, hi] (default: the frame ages);
// "10y:15-54" overrides the span. The window of every cell is set to
// [window_start, window_end].
std::vector<cell> make_age_sex_cells(const std::string& spec,
                                     const frame_definition& frame,
                                     cmc window_start, cmc window_end);

struct respondent {
  std::string resp_id;
  std::string stratum_id;
  std::string psu_id;
  double weight = 1.0;
  sex resp_sex = sex::female;
  cmc dob = 0;
  cmc interview = 0;
};

struct sibling_report {
  std::string resp_id;
  int sib_index = 0;
  sex sib_sex = sex::female;
  cmc dob = 0;
  bool alive = true;
  std::optional<cmc> dod;
};

// True iff the sibling is alive, of an eligible sex, and of eligible
// completed age at the interview month.
bool is_frame_member(const sibling_report& sib, const frame_definition& frame,
                     cmc interview);

class survey_dataset {
 public:
  survey_dataset(frame_definition frame, std::vector<respondent> respondents,
                 std::vector<sibling_report> siblings);

  const frame_definition& frame() const { return frame_; }
  const std::vector<respondent>& respondents() const { return respondents_; }
  std::size_t n_respondents() const { return respondents_.size(); }

  // Roster of respondent `i`, ordered by sib_index.
  const std::vector<sibling_report>& roster(std::size_t i) const {
    return rosters_[i];
  }

  // Index of a respondent by id; throws if unknown.
  std::size_t respondent_index(const std::string& resp_id) const;

  // Count of living frame-member siblings, y(i,F), respondent excluded.
  int frame_sibling_count(std::size_t i) const;

  // Design weights aligned with respondents().
  std::vector<double> design_weights() const;

 private:
  frame_definition frame_;
  std::vector<respondent> respondents_;
  std::vector<std::vector<sibling_report>> rosters_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

// Reads and validates the two CSV inputs. All invariant violations are
// collected and reported together as a validation_error with row numbers.
survey_dataset load_dataset(const std::string& respondents_path,
                            const std::string& siblings_path,
                            const frame_definition& frame);

// Writes the canonical CSV schema (column order fixed). Loading the output
// reproduces the dataset's logical content exactly.
void save_dataset(const survey_dataset& ds, const std::string& respondents_path,
                  const std::string& siblings_path);

// Per-respondent, per-cell counts feeding both estimators.
struct tally_row {
  std::uint32_t resp = 0;   // index into survey_dataset::respondents()
  std::uint32_t cell = 0;   // index into the cell list passed to tally()
  double y_d = 0.0;         // reported sibling deaths in the cell
  double y_n_in_frame = 0.0;   // exposure by frame-member siblings
  double y_n_not_frame = 0.0;  // exposure by non-frame siblings
  int y_f = 0;                 // living frame-member siblings (roster-level)

  double y_n() const { return y_n_in_frame + y_n_not_frame; }
};

enum class estimator_family : std::uint8_t { aggregate, individual };

struct estimator_id {
  estimator_family family = estimator_family::aggregate;
  bool include_respondent = false;

  std::string name() const;  // "agg_excl", "agg_incl", "ind_excl", "ind_incl"
};

// Parses a comma-separated list of estimator names.
std::vector<estimator_id> parse_estimator_list(const std::string& names);

struct estimate_record {
  std::string cell_label;
  estimator_id estimator;
  double point = 0.0;
  std::optional<double> se;
  std::optional<double> ci_lo;
  std::optional<double> ci_hi;
  long n_reports = 0;
};

}  // namespace sibsurv
