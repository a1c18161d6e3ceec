#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sibsurv/data_model.hpp"

namespace sibsurv {

// One rescaled-bootstrap replicate: a weight multiplier per respondent,
// constant within each PSU. In a stratum with n_h PSUs the multiplier is
// (n_h/(n_h-1)) * r_p, where r_p counts how often PSU p was drawn among
// n_h-1 with-replacement draws.
struct replicate_weights {
  int rep_index = 0;
  std::vector<double> multipliers;  // aligned with ds.respondents()
};

// Deterministic given seed; per-(replicate, stratum) substreams make the
// result independent of evaluation order. Throws errc::singleton_stratum
// when any stratum has a single PSU.
std::vector<replicate_weights> make_replicates(const survey_dataset& ds,
                                               int n_reps,
                                               std::uint64_t seed);

struct bootstrap_result {
  std::optional<double> se;
  std::optional<double> ci_lo;
  std::optional<double> ci_hi;
  int n_used = 0;     // replicates that produced an estimate
  int n_dropped = 0;  // replicates dropped (zero exposure)
};

// Evaluates `point_fn` once per replicate with weights w_i * multiplier and
// summarizes: se is the replicate standard deviation (n-1 divisor), the CI
// the 2.5/97.5 empirical percentiles. Callers should pass >= 50 replicates
// for a usable se and >= 200 for the percentile CI. Replicates where
// point_fn throws errc::zero_exposure are dropped and counted.
bootstrap_result bootstrap_summary(
    const std::function<double(std::span<const double>)>& point_fn,
    const survey_dataset& ds, std::span<const replicate_weights> replicates);

// Taylor-linearization variance of a ratio D/N:
//   (1/N^2) [var_D + M^2 var_N - 2 M cov_DN],  M = D/N.
double taylor_variance(double d_hat, double n_hat, double var_d, double var_n,
                       double cov_dn);

// Optional replicates.csv dump: rep_index,resp_id,multiplier.
void write_replicates_csv(const std::string& path, const survey_dataset& ds,
                          std::span<const replicate_weights> replicates);

}  // namespace sibsurv
