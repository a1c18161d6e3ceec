#pragma once

#include <vector>

#include "sibsurv/data_model.hpp"

namespace sibsurv {

enum class exposure_mode : std::uint8_t {
  // Months alive inside the window / 12; a death month counts half a month.
  person_years,
  // One unit per sibling, placed at the age reached at the window end (or at
  // death). Matches the estimand algebra in which exposure is approximated
  // by the number of people, living or dead.
  headcount,
};

enum class window_mode : std::uint8_t {
  absolute,               // cell windows are CMC months
  relative_to_interview,  // cell windows are offsets added to the interview
};

// Expands every sibling report into per-cell death counts and exposure.
// Returns one row per (respondent, cell), ordered by (resp_id, cell index).
// include_respondent additionally counts the respondent's own exposure and
// adds 1 to y_f. Throws errc::overlapping_cells if cells are not disjoint.
std::vector<tally_row> tally(const survey_dataset& ds,
                             const std::vector<cell>& cells,
                             bool include_respondent, exposure_mode exposure,
                             window_mode windows = window_mode::absolute);

// Debug dump with resp_id and cell labels (tallies.csv schema).
void write_tallies_csv(const std::string& path, const survey_dataset& ds,
                       const std::vector<cell>& cells,
                       const std::vector<tally_row>& tallies);

}  // namespace sibsurv
