#pragma once

#include <span>
#include <vector>

#include "sibsurv/data_model.hpp"
#include "sibsurv/variance.hpp"

namespace sibsurv {

// Internal-consistency statistic for an exact single-year age:
//   delta = yhat(F_a, F_-a) - yhat(F_-a, F_a)
// First term: weighted count, over respondents aged exactly `age`, of their
// living frame siblings NOT aged `age`. Second term: weighted count, over
// respondents of other ages, of living frame siblings aged exactly `age`.
// All ages are completed ages at the respondent's interview month. Sibling
// symmetry makes this zero on a perfectly reported census.
double ic_delta(const survey_dataset& ds, int age,
                std::span<const double> weights);

// Banded variant for sparse data: both sides compare respondents with ages
// inside [age_lo, age_hi] against frame siblings outside it.
double ic_delta_banded(const survey_dataset& ds, int age_lo, int age_hi,
                       std::span<const double> weights);

struct ic_check_row {
  int age = 0;
  double delta = 0.0;
  std::optional<double> ci_lo;
  std::optional<double> ci_hi;
};

// One row per age in [age_lo, age_hi]; CIs from replicate weights when
// provided (pass an empty span to skip them).
std::vector<ic_check_row> ic_checks(const survey_dataset& ds, int age_lo,
                                    int age_hi,
                                    std::span<const replicate_weights> reps);

struct age_band {
  int lo = 0;
  int hi = 0;
};

// Per band: weighted share of respondents with no living frame siblings
// (the respondent never counts toward her own y_F). These respondents would
// be invisible to the sibling histories.
std::vector<double> invisible_fraction_by_age(const survey_dataset& ds,
                                              std::span<const age_band> bands);

}  // namespace sibsurv
