#include "sibsurv/estimators.hpp"

#include "sibsurv/error.hpp"

namespace sibsurv {

report_totals aggregate_totals(std::span<const tally_row> tallies,
                               std::span<const double> weights,
                               std::uint32_t cell_index) {
  report_totals t;
  for (const auto& row : tallies) {
    if (row.cell != cell_index) continue;
    double w = weights[row.resp];
    t.deaths += w * row.y_d;
    t.exposure += w * row.y_n();
  }
  return t;
}

double estimate_aggregate(std::span<const tally_row> tallies,
                          std::span<const double> weights,
                          std::uint32_t cell_index) {
  report_totals t = aggregate_totals(tallies, weights, cell_index);
  if (t.exposure <= 0.0)
    throw error(errc::zero_exposure, "aggregate estimator: zero exposure");
  return t.deaths / t.exposure;
}

double estimate_individual(std::span<const tally_row> tallies,
                           std::span<const double> weights,
                           std::uint32_t cell_index, bool include_respondent) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& row : tallies) {
    if (row.cell != cell_index) continue;
    double w = weights[row.resp];
    if (include_respondent) {
      // Primed tallies count the respondent, so y_f >= 1 always.
      if (row.y_f < 1)
        throw error(errc::undefined_term,
                    "include-respondent estimator fed exclude-respondent "
                    "tallies");
      num += w * row.y_d / row.y_f;
      den += w * row.y_n() / row.y_f;
      continue;
    }
    num += w * row.y_d / (row.y_f + 1);
    if (row.y_n_in_frame > 0.0) {
      if (row.y_f == 0)
        throw error(errc::undefined_term,
                    "in-frame exposure reported by a respondent with no "
                    "frame siblings (corrupt tallies)");
      den += w * row.y_n_in_frame / row.y_f;
    }
    den += w * row.y_n_not_frame / (row.y_f + 1);
  }
  if (den <= 0.0)
    throw error(errc::zero_exposure, "individual estimator: zero exposure");
  return num / den;
}

double estimate(std::span<const tally_row> tallies,
                std::span<const double> weights, std::uint32_t cell_index,
                estimator_id which) {
  if (which.family == estimator_family::aggregate)
    return estimate_aggregate(tallies, weights, cell_index);
  return estimate_individual(tallies, weights, cell_index,
                             which.include_respondent);
}

double heuristic_agg_adjustment(double estimate, const survey_dataset& ds,
                                const cell& target, adjustment_mode mode) {
  const frame_definition& frame = ds.frame();
  bool sex_ok = target.sex_filter ? frame.sex_eligible(*target.sex_filter)
                                  : true;
  bool overlaps = sex_ok && target.age_lo <= frame.age_max &&
                  frame.age_min <= target.age_hi;
  if (!overlaps) return estimate;  // Case 1: nothing to adjust

  double wsum = 0.0;
  double ysum = 0.0;
  for (std::size_t i = 0; i < ds.n_respondents(); ++i) {
    const respondent& r = ds.respondents()[i];
    if (mode == adjustment_mode::age_specific) {
      int age = completed_age(r.dob, r.interview);
      if (!target.contains_age(age)) continue;
    }
    wsum += r.weight;
    ysum += r.weight * ds.frame_sibling_count(i);
  }
  if (wsum <= 0.0) return estimate;  // no respondents to approximate with
  double ybar = ysum / wsum;
  return estimate * (ybar / (ybar + 1.0));
}

long count_contributing_reports(std::span<const tally_row> tallies,
                                std::uint32_t cell_index) {
  long n = 0;
  for (const auto& row : tallies) {
    if (row.cell != cell_index) continue;
    if (row.y_d > 0.0 || row.y_n_in_frame > 0.0 || row.y_n_not_frame > 0.0)
      ++n;
  }
  return n;
}

}  // namespace sibsurv
