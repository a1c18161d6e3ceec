#include "sibsurv/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "census_detail.hpp"
#include "sibsurv/csv.hpp"
#include "sibsurv/estimators.hpp"
#include "sibsurv/rng.hpp"

namespace sibsurv {

bool frame_eligible(const person& p, const frame_definition& frame,
                    cmc census_month) {
  if (!p.alive_at(census_month)) return false;
  if (!frame.sex_eligible(p.p_sex)) return false;
  int age = completed_age(p.dob, census_month);
  return age >= frame.age_min && age <= frame.age_max;
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t pos = s.find(',', start);
    std::string tok = s.substr(
        start, pos == std::string::npos ? std::string::npos : pos - start);
    // trim
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t'))
      tok.erase(tok.begin());
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t'))
      tok.pop_back();
    if (!tok.empty()) out.push_back(tok);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(const std::string& s, const std::string& key) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw error(errc::parse_error,
                "scenario config: bad number for '" + key + "': " + s);
  return v;
}

std::vector<double> parse_number_list(const std::string& s,
                                      const std::string& key) {
  std::vector<double> out;
  for (const auto& tok : split_list(s)) out.push_back(parse_number(tok, key));
  if (out.empty())
    throw error(errc::parse_error, "scenario config: empty list for " + key);
  return out;
}

}  // namespace

scenario_config load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io_error, "cannot open " + path);

  scenario_config cfg;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = line.find_first_not_of(" \t") == std::string::npos;
      if (blank) continue;
      throw error(errc::parse_error, path + ":" + std::to_string(lineno) +
                                         ": expected key = value");
    }
    auto trim = [](std::string s) {
      std::size_t b = s.find_first_not_of(" \t");
      std::size_t e = s.find_last_not_of(" \t");
      if (b == std::string::npos) return std::string();
      return s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);

    if (key == "seed_sibships") cfg.seed_sibships_path = value;
    else if (key == "m_sibships")
      cfg.m_sibships = static_cast<long>(parse_number(value, key));
    else if (key == "tau_d") cfg.tau_d = parse_number_list(value, key);
    else if (key == "tau_n") cfg.tau_n = parse_number_list(value, key);
    else if (key == "sampling_fraction" || key == "f")
      cfg.sampling_fraction = parse_number_list(value, key);
    else if (key == "n_surveys")
      cfg.n_surveys = static_cast<int>(parse_number(value, key));
    else if (key == "seed")
      cfg.seed = static_cast<std::uint64_t>(parse_number(value, key));
    else if (key == "frame") cfg.frame = parse_frame_spec(value);
    else if (key == "cells") cfg.cells_spec = value;
    else if (key == "census_cmc")
      cfg.census_month = static_cast<cmc>(parse_number(value, key));
    else if (key == "window_years")
      cfg.window_years = static_cast<int>(parse_number(value, key));
    else if (key == "exposure") {
      if (value == "person-years") cfg.exposure = exposure_mode::person_years;
      else if (value == "headcount") cfg.exposure = exposure_mode::headcount;
      else
        throw error(errc::parse_error, "scenario config: bad exposure mode");
    } else {
      throw error(errc::parse_error,
                  "scenario config: unknown key '" + key + "'");
    }
  }
  if (cfg.seed_sibships_path.empty())
    throw error(errc::parse_error, "scenario config: seed_sibships missing");
  for (double t : cfg.tau_d)
    if (!(t > 0.0 && t <= 1.0))
      throw error(errc::bad_argument, "tau_d must be in (0,1]");
  for (double t : cfg.tau_n)
    if (!(t > 0.0 && t <= 1.0))
      throw error(errc::bad_argument, "tau_n must be in (0,1]");
  for (double f : cfg.sampling_fraction)
    if (!(f > 0.0 && f <= 1.0))
      throw error(errc::bad_argument, "sampling_fraction must be in (0,1]");
  if (cfg.n_surveys < 1)
    throw error(errc::bad_argument, "n_surveys must be >= 1");
  return cfg;
}

namespace {

struct seed_member {
  sex m_sex;
  cmc dob;
  std::optional<cmc> dod;
};

std::vector<std::vector<seed_member>> read_seed_sibships(
    const std::string& path, cmc census_month) {
  csv::file f = csv::read_file(path);
  for (const char* c : {"resp_id", "sib_index", "sex", "dob_cmc", "alive",
                        "dod_cmc"})
    if (!f.column(c))
      throw error(errc::missing_column,
                  path + ": missing column '" + std::string(c) + "'");
  auto col = [&](const char* c) { return *f.column(c); };

  std::map<std::string, std::vector<seed_member>> by_key;
  std::vector<std::string> order;
  for (std::size_t r = 0; r < f.rows.size(); ++r) {
    const auto& row = f.rows[r];
    seed_member m;
    const std::string& sx = row[col("sex")];
    if (sx == "f") m.m_sex = sex::female;
    else if (sx == "m") m.m_sex = sex::male;
    else
      throw error(errc::parse_error,
                  path + " row " + std::to_string(r + 1) + ": bad sex");
    long long dob = 0;
    auto& dob_s = row[col("dob_cmc")];
    auto res = std::from_chars(dob_s.data(), dob_s.data() + dob_s.size(), dob);
    if (res.ec != std::errc() || res.ptr != dob_s.data() + dob_s.size())
      throw error(errc::parse_error,
                  path + " row " + std::to_string(r + 1) + ": bad dob_cmc");
    m.dob = static_cast<cmc>(dob);
    if (m.dob > census_month)
      throw error(errc::bad_date, path + " row " + std::to_string(r + 1) +
                                      ": dob_cmc after the census month");
    const std::string& alive = row[col("alive")];
    const std::string& dod_s = row[col("dod_cmc")];
    if (alive == "0") {
      long long dod = 0;
      auto res2 =
          std::from_chars(dod_s.data(), dod_s.data() + dod_s.size(), dod);
      if (dod_s.empty() || res2.ec != std::errc() ||
          res2.ptr != dod_s.data() + dod_s.size() || dod < dob)
        throw error(errc::bad_date, path + " row " + std::to_string(r + 1) +
                                        ": bad dod_cmc");
      m.dod = static_cast<cmc>(dod);
    } else if (alive != "1" || !dod_s.empty()) {
      throw error(errc::parse_error, path + " row " + std::to_string(r + 1) +
                                         ": bad alive/dod_cmc combination");
    }
    const std::string& key = row[col("resp_id")];
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      order.push_back(key);
      it = by_key.emplace(key, std::vector<seed_member>{}).first;
    }
    it->second.push_back(m);
  }

  std::vector<std::vector<seed_member>> sibships;
  sibships.reserve(order.size());
  for (const auto& key : order) sibships.push_back(std::move(by_key[key]));
  return sibships;
}

}  // namespace

universe_build build_universe(const std::string& seed_sibships_path,
                              long m_sibships,
                              const frame_definition& frame, cmc census_month,
                              std::uint64_t rng_seed) {
  if (m_sibships <= 0)
    throw error(errc::bad_argument, "m_sibships must be positive");
  auto seeds = read_seed_sibships(seed_sibships_path, census_month);
  if (seeds.empty())
    throw error(errc::empty_seed, seed_sibships_path + ": no sibships");

  universe_build out;
  std::vector<double> cumulative;
  std::vector<std::size_t> usable;
  double total = 0.0;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    double vis = 0.0;
    for (const auto& m : seeds[s]) {
      person probe{0, 0, m.m_sex, m.dob, m.dod};
      if (frame_eligible(probe, frame, census_month)) vis += 1.0;
    }
    if (vis == 0.0) {
      ++out.n_zero_visibility_seeds;
      continue;
    }
    total += vis;
    cumulative.push_back(total);
    usable.push_back(s);
  }
  if (usable.empty())
    throw error(errc::zero_visibility_seed,
                seed_sibships_path +
                    ": every seed sibship has zero frame visibility");

  rng stream(derive_seed(rng_seed, {hash_str("universe")}));
  pseudo_population& pop = out.population;
  pop.persons.reserve(static_cast<std::size_t>(m_sibships) * 4);
  for (long draw = 0; draw < m_sibships; ++draw) {
    double u = stream.u01() * total;
    std::size_t pick = static_cast<std::size_t>(
        std::lower_bound(cumulative.begin(), cumulative.end(), u) -
        cumulative.begin());
    if (pick >= usable.size()) pick = usable.size() - 1;
    const auto& members = seeds[usable[pick]];
    bool flip = stream.bernoulli(0.5);

    std::uint32_t begin = static_cast<std::uint32_t>(pop.persons.size());
    std::uint32_t sibship_id = static_cast<std::uint32_t>(pop.sibships.size());
    for (const auto& m : members) {
      person p;
      p.id = static_cast<std::uint32_t>(pop.persons.size());
      p.sibship = sibship_id;
      p.p_sex = flip ? (m.m_sex == sex::female ? sex::male : sex::female)
                     : m.m_sex;
      p.dob = m.dob;
      p.death = m.dod;
      pop.persons.push_back(p);
    }
    pop.sibships.emplace_back(begin,
                              static_cast<std::uint32_t>(pop.persons.size()));
  }
  return out;
}

std::vector<cell_truth> census_truth(
    const pseudo_population& pop, const std::vector<cell>& cells,
    const frame_definition& frame, cmc census_month, bool include_respondent,
    exposure_mode exposure) {
  std::vector<cell_truth> out;
  out.reserve(cells.size());
  for (const auto& target : cells) {
    detail::census_class c =
        detail::classify(pop, frame, census_month, target, exposure);
    cell_truth t;
    t.cell_label = target.label();
    double d_invis = 0, n_invis = 0;
    for (const auto& p : pop.persons) {
      std::uint32_t v = include_respondent ? c.frame_in_sibship[p.id]
                                           : detail::visibility(c, p.id);
      bool visible = v > 0;
      if (c.death_in_cell[p.id]) {
        t.d_total += 1.0;
        (visible ? t.d_vis : d_invis) += 1.0;
      }
      t.n_total += c.exposure_in_cell[p.id];
      (visible ? t.n_vis : n_invis) += c.exposure_in_cell[p.id];
    }
    if (t.n_total > 0) {
      t.m = t.d_total / t.n_total;
      t.p_inv_d = t.d_total > 0 ? d_invis / t.d_total
                                : std::optional<double>{};
      t.p_inv_n = n_invis / t.n_total;
    }
    if (t.n_vis > 0) t.m_vis = t.d_vis / t.n_vis;
    if (n_invis > 0) t.m_invis = d_invis / n_invis;
    out.push_back(std::move(t));
  }
  return out;
}

reporting_network apply_reporting(const pseudo_population& pop,
                                  const frame_definition& frame,
                                  cmc census_month, double tau_d, double tau_n,
                                  std::uint64_t rng_seed) {
  if (!(tau_d > 0.0 && tau_d <= 1.0) || !(tau_n > 0.0 && tau_n <= 1.0))
    throw error(errc::bad_argument, "tau parameters must be in (0,1]");

  reporting_network net;
  net.nominal_tau_d = tau_d;
  net.nominal_tau_n = tau_n;
  net.reports.assign(pop.n_persons(), {});
  rng stream(derive_seed(rng_seed, {hash_str("reporting")}));

  for (const auto& [begin, end] : pop.sibships) {
    for (std::uint32_t r = begin; r < end; ++r) {
      const person& reporter = pop.persons[r];
      if (!frame_eligible(reporter, frame, census_month)) continue;
      for (std::uint32_t j = begin; j < end; ++j) {
        if (j == r) continue;
        const person& subject = pop.persons[j];
        double tau = subject.alive_at(census_month) ? tau_n : tau_d;
        if (stream.bernoulli(tau))
          net.reports[reporter.id].push_back(subject.id);
      }
    }
  }
  return net;
}

survey_dataset draw_survey(const pseudo_population& pop,
                           const reporting_network& net,
                           const frame_definition& frame, cmc census_month,
                           double f, std::uint64_t rng_seed) {
  if (!(f > 0.0 && f <= 1.0))
    throw error(errc::bad_argument, "sampling fraction must be in (0,1]");

  std::vector<std::uint32_t> frame_ids;
  for (const auto& p : pop.persons)
    if (frame_eligible(p, frame, census_month)) frame_ids.push_back(p.id);
  std::size_t k = static_cast<std::size_t>(
      std::floor(f * static_cast<double>(frame_ids.size())));
  if (k == 0)
    throw error(errc::bad_argument, "sample size is zero");

  rng stream(derive_seed(rng_seed, {hash_str("survey")}));
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(
                            stream.bounded(frame_ids.size() - i));
    std::swap(frame_ids[i], frame_ids[j]);
  }
  frame_ids.resize(k);
  std::sort(frame_ids.begin(), frame_ids.end());

  std::vector<respondent> respondents;
  std::vector<sibling_report> siblings;
  respondents.reserve(k);
  for (std::uint32_t id : frame_ids) {
    const person& p = pop.persons[id];
    respondent r;
    r.resp_id = "p" + std::to_string(id);
    r.stratum_id = "s1";
    r.psu_id = r.resp_id;  // one PSU per respondent
    r.weight = 1.0 / f;
    r.resp_sex = p.p_sex;
    r.dob = p.dob;
    r.interview = census_month;
    respondents.push_back(std::move(r));

    int index = 1;
    for (std::uint32_t sid : net.reports[id]) {
      const person& s = pop.persons[sid];
      sibling_report rep;
      rep.resp_id = "p" + std::to_string(id);
      rep.sib_index = index++;
      rep.sib_sex = s.p_sex;
      rep.dob = s.dob;
      rep.alive = s.alive_at(census_month);
      if (!rep.alive) rep.dod = *s.death;
      siblings.push_back(std::move(rep));
    }
  }
  return survey_dataset(frame, std::move(respondents), std::move(siblings));
}

mse_parts mse_decomposition(std::span<const double> estimates, double truth) {
  if (estimates.empty())
    throw error(errc::bad_argument, "no estimates to decompose");
  if (!(truth > 0.0))
    throw error(errc::zero_truth, "truth must be positive");
  double k = static_cast<double>(estimates.size());
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= k;

  mse_parts out;
  double bias = 0.0;
  for (double e : estimates) {
    out.rel_mse += (e - truth) * (e - truth);
    out.rel_var += (e - mean) * (e - mean);
    bias += e - truth;
  }
  out.rel_mse /= k * truth * truth;
  out.rel_var /= k * truth * truth;
  out.rel_bias_sq = (bias / (k * truth)) * (bias / (k * truth));
  return out;
}

scenario_results run_scenario(const scenario_config& config) {
  config.frame.validate();
  universe_build built =
      build_universe(config.seed_sibships_path, config.m_sibships,
                     config.frame, config.census_month,
                     derive_seed(config.seed, {hash_str("universe-stage")}));
  const pseudo_population& pop = built.population;

  cmc window_start = config.window_years > 0
                         ? config.census_month - 12 * config.window_years
                         : 0;
  cmc window_end = config.window_years > 0 ? config.census_month - 1
                                           : config.census_month;
  std::vector<cell> cells = make_age_sex_cells(config.cells_spec, config.frame,
                                               window_start, window_end);
  auto truth_excl = census_truth(pop, cells, config.frame,
                                 config.census_month, false, config.exposure);
  auto truth_incl = census_truth(pop, cells, config.frame,
                                 config.census_month, true, config.exposure);

  const estimator_id all_estimators[] = {
      {estimator_family::aggregate, false},
      {estimator_family::aggregate, true},
      {estimator_family::individual, false},
      {estimator_family::individual, true},
  };

  scenario_results out;
  for (std::size_t ti = 0; ti < config.tau_d.size(); ++ti) {
    for (std::size_t tj = 0; tj < config.tau_n.size(); ++tj) {
      double tau_d = config.tau_d[ti];
      double tau_n = config.tau_n[tj];
      reporting_network net = apply_reporting(
          pop, config.frame, config.census_month, tau_d, tau_n,
          derive_seed(config.seed, {hash_str("network"), ti, tj}));

      for (std::size_t fi = 0; fi < config.sampling_fraction.size(); ++fi) {
        double f = config.sampling_fraction[fi];
        // estimator x cell -> replicate estimates
        std::vector<std::vector<std::vector<double>>> collected(
            4, std::vector<std::vector<double>>(cells.size()));

        for (int rep = 0; rep < config.n_surveys; ++rep) {
          survey_dataset survey = draw_survey(
              pop, net, config.frame, config.census_month, f,
              derive_seed(config.seed,
                          {hash_str("draw"), ti, tj, fi,
                           static_cast<std::uint64_t>(rep)}));
          std::vector<double> weights = survey.design_weights();
          auto tallies_excl =
              tally(survey, cells, false, config.exposure);
          auto tallies_incl = tally(survey, cells, true, config.exposure);

          for (std::size_t e = 0; e < 4; ++e) {
            const estimator_id& id = all_estimators[e];
            const auto& tallies =
                id.include_respondent ? tallies_incl : tallies_excl;
            const auto& truths = id.include_respondent ? truth_incl
                                                       : truth_excl;
            for (std::uint32_t c = 0; c < cells.size(); ++c) {
              scenario_estimate row;
              row.tau_d = tau_d;
              row.tau_n = tau_n;
              row.f = f;
              row.rep = rep;
              row.estimator = id;
              row.cell_label = cells[c].label();
              row.truth = truths[c].m_vis;
              try {
                double est = estimate(tallies, weights, c, id);
                row.estimate = est;
                collected[e][c].push_back(est);
              } catch (const error& err) {
                if (err.code() != errc::zero_exposure) throw;
              }
              out.estimates.push_back(std::move(row));
            }
          }
        }

        for (std::size_t e = 0; e < 4; ++e) {
          const estimator_id& id = all_estimators[e];
          const auto& truths = id.include_respondent ? truth_incl : truth_excl;
          for (std::uint32_t c = 0; c < cells.size(); ++c) {
            if (collected[e][c].empty()) continue;
            if (!truths[c].m_vis || !(*truths[c].m_vis > 0.0)) continue;
            scenario_summary_row row;
            row.tau_d = tau_d;
            row.tau_n = tau_n;
            row.f = f;
            row.estimator = id;
            row.cell_label = cells[c].label();
            row.truth = *truths[c].m_vis;
            row.mse = mse_decomposition(collected[e][c], row.truth);
            out.summary.push_back(std::move(row));
          }
        }
      }
    }
  }
  return out;
}

}  // namespace sibsurv
