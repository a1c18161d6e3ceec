#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sibsurv/population.hpp"

namespace sibsurv {

// ---------------------------------------------------------------------------
// Closed-form sensitivity algebra for the invisible population. K is the
// ratio of the invisible to the visible death rate; p the invisible share.
// ---------------------------------------------------------------------------

// Relative error of the visible rate as an estimate of the total rate, when
// p is the invisible share of deaths: p*(1-K)/K.
double rel_error_by_deaths(double k, double p_inv_deaths);

// Same, parameterized by the invisible share of exposure:
// p*(1-K) / (1 - p*(1-K)).
double rel_error_by_exposure(double k, double p_inv_exposure);

enum class invisibility_param : std::uint8_t { deaths, exposure };

// Recovers the total rate from the visible rate:
//   deaths:   M_vis * K / (p + K*(1-p))
//   exposure: M_vis * (1 + p*(K-1))
double total_from_visible(double m_vis, double k, double p_inv,
                          invisibility_param param);

struct surface_point {
  double k = 0.0;
  double p = 0.0;
  double rel_error = 0.0;
};

// Cartesian evaluation of the matching relative-error expression.
std::vector<surface_point> sensitivity_surface(std::span<const double> k_grid,
                                               std::span<const double> p_grid,
                                               invisibility_param param);

// ---------------------------------------------------------------------------
// Realized adjustment factors computed from simulation ground truth. All
// factors are counted from the realized reporting network, so the
// decomposition identities hold exactly rather than in expectation. Factors
// are reported absent when a cell has no visible deaths.
// ---------------------------------------------------------------------------

// Factors of the aggregate decomposition (exclude-respondent form):
//   M = estimand * visibility_ratio * (gamma_N / gamma_D) * [1 + p(K-1)]
struct agg_adjustment {
  double visibility_ratio = 1.0;  // dbar(N,F) / dbar(D,F), true degrees
  double gamma_n = 1.0;           // realized tau for exposure (precision = 1)
  double gamma_d = 1.0;           // realized tau for deaths
  double p_invisible_n = 0.0;
  double k = 1.0;                 // M_invis / M_vis
  double estimand = 0.0;          // y(F,D)/y(F,N) on the realized census
};

std::optional<agg_adjustment> realized_agg_factors(
    const pseudo_population& pop, const reporting_network& net,
    const frame_definition& frame, cmc census_month, const cell& target);

// Factors of the individual decomposition (exclude-respondent form):
//   M = estimand * (gamma*_N / gamma_D) * (1+K_N)/(1+K_D) * [1 + p(K-1)]
// Sibship-level reporting factors are averaged across the sibships that
// contribute visible deaths (for gamma_D, K_D) or visible exposure (for
// gamma*_N, K_N); moments use the population (divide-by-n) convention.
struct ind_adjustment {
  double gamma_star_n = 1.0;
  double gamma_d = 1.0;
  double k_n = 0.0;
  double k_d = 0.0;
  double p_invisible_n = 0.0;
  double k = 1.0;
  double estimand = 0.0;
};

std::optional<ind_adjustment> realized_ind_factors(
    const pseudo_population& pop, const reporting_network& net,
    const frame_definition& frame, cmc census_month, const cell& target);

// Number of frame members in the cell whose include-respondent visibility is
// exactly 1; the wedge between the include- and exclude-respondent exposure
// denominators: M_vis = D'_vis / (N'_vis - C) in headcount terms.
long c_factor(const pseudo_population& pop, const frame_definition& frame,
              cmc census_month, const cell& target);

// ---------------------------------------------------------------------------
// Homogeneous death-probability model: every person dies with probability q
// independently; s_i is person i's sibling count (self excluded). Everyone
// alive is on the frame and reporting is perfect.
// ---------------------------------------------------------------------------
struct homogeneous_expectations {
  double e_d_vis = 0.0;
  double e_n_vis = 0.0;
  double e_d_invis = 0.0;
  double e_n_invis = 0.0;
  double m_vis = 0.0;
  double m_invis = 0.0;
};

homogeneous_expectations homogeneous_model(double q,
                                           std::span<const int> sibship_sizes,
                                           bool include_respondent);

// ---------------------------------------------------------------------------
// Aggregation means (values > 0; weights > 0).
// ---------------------------------------------------------------------------
double weighted_harmonic_mean(std::span<const double> values,
                              std::span<const double> weights);
double weighted_arithmetic_mean(std::span<const double> values,
                                std::span<const double> weights);

}  // namespace sibsurv
