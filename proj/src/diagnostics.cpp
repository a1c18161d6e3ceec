#include "sibsurv/diagnostics.hpp"

namespace sibsurv {

double ic_delta_banded(const survey_dataset& ds, int age_lo, int age_hi,
                       std::span<const double> weights) {
  double reported_by_band = 0.0;    // yhat(F_a, F_-a)
  double reported_about_band = 0.0; // yhat(F_-a, F_a)
  for (std::size_t i = 0; i < ds.n_respondents(); ++i) {
    const respondent& r = ds.respondents()[i];
    int resp_age = completed_age(r.dob, r.interview);
    bool resp_in = resp_age >= age_lo && resp_age <= age_hi;
    double w = weights[i];
    for (const auto& sib : ds.roster(i)) {
      if (!is_frame_member(sib, ds.frame(), r.interview)) continue;
      int sib_age = completed_age(sib.dob, r.interview);
      bool sib_in = sib_age >= age_lo && sib_age <= age_hi;
      if (resp_in && !sib_in) reported_by_band += w;
      if (!resp_in && sib_in) reported_about_band += w;
    }
  }
  return reported_by_band - reported_about_band;
}

double ic_delta(const survey_dataset& ds, int age,
                std::span<const double> weights) {
  return ic_delta_banded(ds, age, age, weights);
}

std::vector<ic_check_row> ic_checks(const survey_dataset& ds, int age_lo,
                                    int age_hi,
                                    std::span<const replicate_weights> reps) {
  std::vector<double> design = ds.design_weights();
  std::vector<ic_check_row> out;
  for (int age = age_lo; age <= age_hi; ++age) {
    ic_check_row row;
    row.age = age;
    row.delta = ic_delta(ds, age, design);
    if (!reps.empty()) {
      auto res = bootstrap_summary(
          [&](std::span<const double> w) { return ic_delta(ds, age, w); }, ds,
          reps);
      row.ci_lo = res.ci_lo;
      row.ci_hi = res.ci_hi;
    }
    out.push_back(row);
  }
  return out;
}

std::vector<double> invisible_fraction_by_age(
    const survey_dataset& ds, std::span<const age_band> bands) {
  std::vector<double> invisible(bands.size(), 0.0);
  std::vector<double> total(bands.size(), 0.0);
  for (std::size_t i = 0; i < ds.n_respondents(); ++i) {
    const respondent& r = ds.respondents()[i];
    int age = completed_age(r.dob, r.interview);
    for (std::size_t b = 0; b < bands.size(); ++b) {
      if (age < bands[b].lo || age > bands[b].hi) continue;
      total[b] += r.weight;
      if (ds.frame_sibling_count(i) == 0) invisible[b] += r.weight;
      break;
    }
  }
  std::vector<double> out(bands.size(), 0.0);
  for (std::size_t b = 0; b < bands.size(); ++b)
    out[b] = total[b] > 0.0 ? invisible[b] / total[b] : 0.0;
  return out;
}

}  // namespace sibsurv
