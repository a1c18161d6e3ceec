#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sibsurv/data_model.hpp"
#include "sibsurv/population.hpp"
#include "sibsurv/tally.hpp"

namespace sibsurv {

// Per-cell ground truth enumerated from the universe. Headcount semantics:
// a dead person belongs to the cell of their age at death, a living person
// to the cell of their age at the window end; person-years mode instead
// accumulates in-band months alive over the window.
struct cell_truth {
  std::string cell_label;
  double d_total = 0.0;
  double n_total = 0.0;
  double d_vis = 0.0;
  double n_vis = 0.0;
  std::optional<double> m;        // d_total / n_total
  std::optional<double> m_vis;    // visible death rate
  std::optional<double> m_invis;  // invisible death rate
  std::optional<double> p_inv_d;  // invisible share of deaths
  std::optional<double> p_inv_n;  // invisible share of exposure
};

// Scenario configuration (flat key = value file; see load_scenario_config).
struct scenario_config {
  std::string seed_sibships_path;
  long m_sibships = 1000;
  std::vector<double> tau_d{1.0};
  std::vector<double> tau_n{1.0};
  std::vector<double> sampling_fraction{0.1};
  int n_surveys = 1;
  std::uint64_t seed = 1;
  frame_definition frame;
  std::string cells_spec = "5y";
  cmc census_month = 1200;  // interview month shared by every respondent
  exposure_mode exposure = exposure_mode::headcount;
  int window_years = 0;  // 0 = cells span the whole history up to the census
};

scenario_config load_scenario_config(const std::string& path);

// Reads seed sibship rosters (siblings.csv schema where each resp_id group
// is one sibship, respondent row included) and resamples m_sibships of them
// with replacement, with probability proportional to the number of
// frame-eligible members. Each drawn sibship's sexes are flipped with
// probability 1/2. Seed sibships with no frame-eligible member are excluded
// with a warning counter.
struct universe_build {
  pseudo_population population;
  long n_zero_visibility_seeds = 0;
};

universe_build build_universe(const std::string& seed_sibships_path,
                              long m_sibships,
                              const frame_definition& frame, cmc census_month,
                              std::uint64_t rng_seed);

// Enumerates perfect-reporting visibilities and classifies every death and
// exposure unit as visible or invisible.
std::vector<cell_truth> census_truth(
    const pseudo_population& pop, const std::vector<cell>& cells,
    const frame_definition& frame, cmc census_month, bool include_respondent,
    exposure_mode exposure = exposure_mode::headcount);

// Independent Bernoulli thinning of each (reporter, sibling) ordered pair:
// an edge to a dead sibling is retained with probability tau_d, to a living
// sibling with tau_n. An omitted sibling is absent from the reporter's
// entire roster.
reporting_network apply_reporting(const pseudo_population& pop,
                                  const frame_definition& frame,
                                  cmc census_month, double tau_d, double tau_n,
                                  std::uint64_t rng_seed);

// Simple random sample without replacement of floor(f * |F|) frame-eligible
// persons; every sampled person becomes a respondent with weight 1/f in a
// single stratum, one PSU per respondent. Rosters come from the retained
// edges.
survey_dataset draw_survey(const pseudo_population& pop,
                           const reporting_network& net,
                           const frame_definition& frame, cmc census_month,
                           double f, std::uint64_t rng_seed);

// Relative MSE of a set of estimates against a known truth, with the exact
// decomposition rel_mse = rel_bias_sq + rel_var (divide-by-K convention).
struct mse_parts {
  double rel_mse = 0.0;
  double rel_bias_sq = 0.0;
  double rel_var = 0.0;
};
mse_parts mse_decomposition(std::span<const double> estimates, double truth);

struct scenario_estimate {
  double tau_d = 1.0;
  double tau_n = 1.0;
  double f = 1.0;
  int rep = 0;
  estimator_id estimator;
  std::string cell_label;
  std::optional<double> estimate;  // absent when the cell had zero exposure
  std::optional<double> truth;     // visible death rate for the variant
};

struct scenario_summary_row {
  double tau_d = 1.0;
  double tau_n = 1.0;
  double f = 1.0;
  estimator_id estimator;
  std::string cell_label;
  double truth = 0.0;
  mse_parts mse;
};

struct scenario_results {
  std::vector<scenario_estimate> estimates;
  std::vector<scenario_summary_row> summary;
};

// Full cross product of tau_d x tau_n x sampling fractions, n_surveys
// replicate surveys each; all four estimators per survey and cell.
// Deterministic given config.seed, independently of evaluation order.
scenario_results run_scenario(const scenario_config& config);

}  // namespace sibsurv
