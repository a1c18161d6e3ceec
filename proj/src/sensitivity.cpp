#include "sibsurv/sensitivity.hpp"

#include <cmath>

#include "census_detail.hpp"
#include "sibsurv/error.hpp"

namespace sibsurv {

namespace {

void check_k_p(double k, double p) {
  if (!(k > 0.0))
    throw error(errc::bad_argument, "K must be positive");
  if (!(p >= 0.0 && p <= 1.0))
    throw error(errc::bad_argument, "invisible share must be in [0,1]");
}

}  // namespace

double rel_error_by_deaths(double k, double p_inv_deaths) {
  check_k_p(k, p_inv_deaths);
  return p_inv_deaths * (1.0 - k) / k;
}

double rel_error_by_exposure(double k, double p_inv_exposure) {
  check_k_p(k, p_inv_exposure);
  double t = p_inv_exposure * (1.0 - k);
  return t / (1.0 - t);
}

double total_from_visible(double m_vis, double k, double p_inv,
                          invisibility_param param) {
  check_k_p(k, p_inv);
  if (param == invisibility_param::deaths)
    return m_vis * k / (p_inv + k * (1.0 - p_inv));
  return m_vis * (1.0 + p_inv * (k - 1.0));
}

std::vector<surface_point> sensitivity_surface(std::span<const double> k_grid,
                                               std::span<const double> p_grid,
                                               invisibility_param param) {
  std::vector<surface_point> out;
  out.reserve(k_grid.size() * p_grid.size());
  for (double k : k_grid) {
    for (double p : p_grid) {
      double e = param == invisibility_param::deaths
                     ? rel_error_by_deaths(k, p)
                     : rel_error_by_exposure(k, p);
      out.push_back({k, p, e});
    }
  }
  return out;
}

namespace {

// Census counts common to both decompositions.
struct vis_census {
  double d_vis = 0, d_invis = 0, n_vis = 0, n_invis = 0;

  double n_total() const { return n_vis + n_invis; }
  double p_inv_n() const { return n_total() > 0 ? n_invis / n_total() : 0.0; }

  // K = M_invis / M_vis; equals 1 by convention when nothing is invisible
  // (the [1 + p(K-1)] factor is then 1 regardless).
  std::optional<double> k_factor() const {
    if (d_vis <= 0 || n_vis <= 0) return std::nullopt;
    double m_vis = d_vis / n_vis;
    if (n_invis <= 0) return 1.0;
    double m_invis = d_invis / n_invis;
    return m_invis / m_vis;
  }
};

vis_census count_visibility(const pseudo_population& pop,
                            const detail::census_class& c) {
  vis_census v;
  for (const auto& p : pop.persons) {
    bool visible = detail::visibility(c, p.id) > 0;
    if (c.death_in_cell[p.id]) (visible ? v.d_vis : v.d_invis) += 1.0;
    (visible ? v.n_vis : v.n_invis) += c.exposure_in_cell[p.id];
  }
  return v;
}

// Population-convention moments of paired vectors, plus the coupling term
// K = cov(a,b) / (mean(a) mean(b)) = cor * cv(a) * cv(b).
struct coupling {
  double mean_b = 0.0;
  double k = 0.0;
  bool defined = false;
};

coupling couple(const std::vector<double>& a, const std::vector<double>& b) {
  coupling out;
  if (a.empty()) return out;
  double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    cov += (a[i] - ma) * (b[i] - mb);
  cov /= n;
  if (ma == 0.0 || mb == 0.0) return out;
  out.mean_b = mb;
  out.k = cov / (ma * mb);
  out.defined = true;
  return out;
}

}  // namespace

std::optional<agg_adjustment> realized_agg_factors(
    const pseudo_population& pop, const reporting_network& net,
    const frame_definition& frame, cmc census_month, const cell& target) {
  detail::census_class c = detail::classify(pop, frame, census_month, target);
  vis_census vc = count_visibility(pop, c);
  auto k = vc.k_factor();
  if (!k || vc.d_vis <= 0) return std::nullopt;

  // True degrees to F among visible members and realized in-reports.
  double deg_d = 0, deg_n = 0, reports_d = 0, reports_n = 0;
  for (const auto& p : pop.persons) {
    if (detail::visibility(c, p.id) == 0) continue;
    if (c.death_in_cell[p.id]) deg_d += detail::visibility(c, p.id);
    deg_n += c.exposure_in_cell[p.id] * detail::visibility(c, p.id);
  }
  for (const auto& subjects : net.reports) {
    for (std::uint32_t j : subjects) {
      if (c.death_in_cell[j]) reports_d += 1.0;
      reports_n += c.exposure_in_cell[j];
    }
  }
  if (deg_d <= 0 || deg_n <= 0 || reports_d <= 0 || reports_n <= 0)
    return std::nullopt;

  agg_adjustment adj;
  adj.estimand = reports_d / reports_n;
  adj.visibility_ratio = (deg_n / vc.n_vis) / (deg_d / vc.d_vis);
  adj.gamma_d = reports_d / deg_d;
  adj.gamma_n = reports_n / deg_n;
  adj.p_invisible_n = vc.p_inv_n();
  adj.k = *k;
  return adj;
}

std::optional<ind_adjustment> realized_ind_factors(
    const pseudo_population& pop, const reporting_network& net,
    const frame_definition& frame, cmc census_month, const cell& target) {
  detail::census_class c = detail::classify(pop, frame, census_month, target);
  vis_census vc = count_visibility(pop, c);
  auto k = vc.k_factor();
  if (!k || vc.d_vis <= 0) return std::nullopt;

  // Per-sibship visible counts and visibility-adjusted report sums. The
  // sibship-level reporting factor is the ratio of the two; coupling terms
  // K_D and K_N use the sibships that contribute visible deaths (exposure).
  std::vector<double> d_count, d_gamma, n_count, n_gamma;
  for (std::size_t s = 0; s < pop.n_sibships(); ++s) {
    auto [begin, end] = pop.sibships[s];
    double deaths = 0, exposure_vis = 0;
    double adj_deaths = 0, adj_exposure = 0;
    for (std::uint32_t idx = begin; idx < end; ++idx) {
      const person& p = pop.persons[idx];
      if (detail::visibility(c, p.id) == 0) continue;
      if (c.death_in_cell[p.id]) deaths += 1.0;
      exposure_vis += c.exposure_in_cell[p.id];
    }
    for (std::uint32_t idx = begin; idx < end; ++idx) {
      const person& reporter = pop.persons[idx];
      if (reporter.id >= net.reports.size()) continue;
      const auto& subjects = net.reports[reporter.id];
      if (subjects.empty()) continue;
      double y_f = 0, y_d = 0, y_nf = 0, y_nnf = 0;
      for (std::uint32_t j : subjects) {
        if (c.in_frame[j]) y_f += 1.0;
        if (c.death_in_cell[j]) y_d += 1.0;
        (c.in_frame[j] ? y_nf : y_nnf) += c.exposure_in_cell[j];
      }
      adj_deaths += y_d / (y_f + 1.0);
      if (y_nf > 0) adj_exposure += y_nf / y_f;
      adj_exposure += y_nnf / (y_f + 1.0);
    }
    if (deaths > 0) {
      d_count.push_back(deaths);
      d_gamma.push_back(adj_deaths / deaths);
    }
    if (exposure_vis > 0) {
      n_count.push_back(exposure_vis);
      n_gamma.push_back(adj_exposure / exposure_vis);
    }
  }

  coupling cd = couple(d_count, d_gamma);
  coupling cn = couple(n_count, n_gamma);
  if (!cd.defined || !cn.defined) return std::nullopt;

  double numerator = vc.d_vis * cd.mean_b * (1.0 + cd.k);
  double denominator = vc.n_vis * cn.mean_b * (1.0 + cn.k);
  if (denominator <= 0) return std::nullopt;

  ind_adjustment adj;
  adj.estimand = numerator / denominator;
  adj.gamma_d = cd.mean_b;
  adj.gamma_star_n = cn.mean_b;
  adj.k_d = cd.k;
  adj.k_n = cn.k;
  adj.p_invisible_n = vc.p_inv_n();
  adj.k = *k;
  return adj;
}

long c_factor(const pseudo_population& pop, const frame_definition& frame,
              cmc census_month, const cell& target) {
  detail::census_class c = detail::classify(pop, frame, census_month, target);
  long count = 0;
  for (const auto& p : pop.persons) {
    if (c.exposure_in_cell[p.id] <= 0.0 || !c.in_frame[p.id]) continue;
    if (c.frame_in_sibship[p.id] == 1) ++count;  // v'(i,F) == 1
  }
  return count;
}

homogeneous_expectations homogeneous_model(double q,
                                           std::span<const int> sibship_sizes,
                                           bool include_respondent) {
  if (!(q > 0.0 && q < 1.0))
    throw error(errc::bad_argument, "q must be in (0,1)");
  double n = static_cast<double>(sibship_sizes.size());
  double sum_qs = 0.0;  // sum of q^{s_i}
  for (int s : sibship_sizes) {
    if (s < 0) throw error(errc::bad_argument, "sibling counts must be >= 0");
    sum_qs += std::pow(q, s);
  }

  homogeneous_expectations e;
  e.e_d_vis = q * (n - sum_qs);
  e.e_d_invis = q * sum_qs;
  if (!include_respondent) {
    e.e_n_vis = n - sum_qs;
    e.e_n_invis = sum_qs;
    e.m_vis = q;
    e.m_invis = q;
  } else {
    e.e_n_vis = n - q * sum_qs;
    e.e_n_invis = q * sum_qs;
    e.m_vis = (q * n - q * sum_qs) / (n - q * sum_qs);
    e.m_invis = 1.0;
  }
  return e;
}

double weighted_harmonic_mean(std::span<const double> values,
                              std::span<const double> weights) {
  if (values.empty() || values.size() != weights.size())
    throw error(errc::bad_argument, "values/weights size mismatch");
  double wsum = 0.0, inv = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !(weights[i] > 0.0))
      throw error(errc::bad_argument,
                  "harmonic mean requires positive values and weights");
    wsum += weights[i];
    inv += weights[i] / values[i];
  }
  return wsum / inv;
}

double weighted_arithmetic_mean(std::span<const double> values,
                                std::span<const double> weights) {
  if (values.empty() || values.size() != weights.size())
    throw error(errc::bad_argument, "values/weights size mismatch");
  double wsum = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] > 0.0))
      throw error(errc::bad_argument, "weights must be positive");
    wsum += weights[i];
    acc += weights[i] * values[i];
  }
  return acc / wsum;
}

}  // namespace sibsurv
