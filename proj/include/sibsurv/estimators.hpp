#pragma once

#include <span>
#include <vector>

#include "sibsurv/data_model.hpp"

namespace sibsurv {

// Both estimators consume tallies produced with the matching
// include_respondent flag and weights aligned with ds.respondents().

// Ratio of weighted report totals: sum w*y_D / sum w*y_N.
// Throws errc::zero_exposure when the weighted exposure is zero.
double estimate_aggregate(std::span<const tally_row> tallies,
                          std::span<const double> weights,
                          std::uint32_t cell_index);

// Visibility-adjusted per-report sums. Excluding the respondent:
//   sum w*y_D/(y_F+1) / sum w*[y_N_inF/y_F + y_N_notF/(y_F+1)]
// (a 0/0 term contributes 0). Including the respondent, the primed single
// term form y'_D/y'_F over y'_N/y'_F is used, where the tallies are primed.
double estimate_individual(std::span<const tally_row> tallies,
                           std::span<const double> weights,
                           std::uint32_t cell_index, bool include_respondent);

double estimate(std::span<const tally_row> tallies,
                std::span<const double> weights, std::uint32_t cell_index,
                estimator_id which);

// Weighted report totals (numerator, denominator) behind the aggregate
// estimator; useful for variance work.
struct report_totals {
  double deaths = 0.0;
  double exposure = 0.0;
};
report_totals aggregate_totals(std::span<const tally_row> tallies,
                               std::span<const double> weights,
                               std::uint32_t cell_index);

enum class adjustment_mode : std::uint8_t { all_ages, age_specific };

// Post-hoc visibility correction for aggregate exclude-respondent estimates
// of cells that overlap the frame population: multiplies by
// ybar/(ybar+1), where ybar is the weighted mean number of frame siblings
// among all respondents (all_ages) or among respondents in the cell's age
// band (age_specific). Cells disjoint from the frame pass through unchanged.
double heuristic_agg_adjustment(double estimate, const survey_dataset& ds,
                                const cell& target, adjustment_mode mode);

// Number of respondents with any nonzero tally field in the cell.
long count_contributing_reports(std::span<const tally_row> tallies,
                                std::uint32_t cell_index);

}  // namespace sibsurv
