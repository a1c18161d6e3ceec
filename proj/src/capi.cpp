#include "sibsurv.h"

#include <charconv>
#include <cstring>
#include <string>

#include "sibsurv/data_model.hpp"
#include "sibsurv/diagnostics.hpp"
#include "sibsurv/error.hpp"
#include "sibsurv/estimators.hpp"
#include "sibsurv/sensitivity.hpp"
#include "sibsurv/simulator.hpp"
#include "sibsurv/table.hpp"
#include "sibsurv/tally.hpp"
#include "sibsurv/variance.hpp"

using namespace sibsurv;

struct sibsurv_dataset {
  survey_dataset ds;
};

struct sibsurv_table {
  table t;
};

namespace {

thread_local std::string g_last_error;

sibsurv_status status_for(errc code) {
  switch (code) {
    case errc::ok: return SIBSURV_OK;
    case errc::io_error: return SIBSURV_ERR_IO;
    case errc::parse_error: return SIBSURV_ERR_PARSE;
    case errc::missing_column:
    case errc::bad_date:
    case errc::orphan_sibling:
    case errc::duplicate_sibling:
    case errc::nonpositive_weight:
    case errc::frame_violation:
    case errc::empty_seed:
    case errc::zero_visibility_seed:
      return SIBSURV_ERR_VALIDATION;
    case errc::overlapping_cells: return SIBSURV_ERR_OVERLAPPING_CELLS;
    case errc::zero_exposure: return SIBSURV_ERR_ZERO_EXPOSURE;
    case errc::singleton_stratum: return SIBSURV_ERR_SINGLETON_STRATUM;
    case errc::zero_truth:
    case errc::division_by_zero:
    case errc::bad_argument:
      return SIBSURV_ERR_BAD_ARGUMENT;
    case errc::undefined_term: return SIBSURV_ERR_INTERNAL;
  }
  return SIBSURV_ERR_INTERNAL;
}

template <typename Fn>
sibsurv_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SIBSURV_OK;
  } catch (const error& e) {
    g_last_error = e.what();
    return status_for(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SIBSURV_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SIBSURV_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw error(errc::bad_argument, what);
}

table::value opt_value(const std::optional<double>& v) {
  if (!v) return std::monostate{};
  return *v;
}

// "lo:hi:step" or a single number.
std::vector<double> parse_grid(const char* spec, const char* what) {
  require(spec != nullptr, "missing grid spec");
  std::string s(spec);
  double lo = 0, hi = 0, step = 0;
  std::size_t c1 = s.find(':');
  auto num = [&](const std::string& part) {
    double v = 0;
    auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (res.ec != std::errc() || res.ptr != part.data() + part.size())
      throw error(errc::bad_argument,
                  std::string("bad ") + what + " grid '" + s + "'");
    return v;
  };
  if (c1 == std::string::npos) return {num(s)};
  std::size_t c2 = s.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw error(errc::bad_argument,
                std::string("bad ") + what + " grid '" + s +
                    "' (expected lo:hi:step)");
  lo = num(s.substr(0, c1));
  hi = num(s.substr(c1 + 1, c2 - c1 - 1));
  step = num(s.substr(c2 + 1));
  if (step <= 0 || hi < lo)
    throw error(errc::bad_argument,
                std::string("bad ") + what + " grid '" + s + "'");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    double v = lo + step * i;
    if (v > hi + step * 1e-9) break;
    out.push_back(v);
  }
  return out;
}

}  // namespace

extern "C" {

const char* sibsurv_version(void) { return "1.0.0"; }

const char* sibsurv_last_error(void) { return g_last_error.c_str(); }

sibsurv_status sibsurv_dataset_load(const char* respondents_csv,
                                    const char* siblings_csv,
                                    const char* frame_spec,
                                    sibsurv_dataset** out) {
  return guarded([&] {
    require(respondents_csv && siblings_csv && frame_spec && out,
            "null argument");
    frame_definition frame = parse_frame_spec(frame_spec);
    *out = new sibsurv_dataset{
        load_dataset(respondents_csv, siblings_csv, frame)};
  });
}

void sibsurv_dataset_free(sibsurv_dataset* ds) { delete ds; }

long sibsurv_dataset_n_respondents(const sibsurv_dataset* ds) {
  return ds ? static_cast<long>(ds->ds.n_respondents()) : 0;
}

long sibsurv_dataset_n_siblings(const sibsurv_dataset* ds) {
  if (!ds) return 0;
  long n = 0;
  for (std::size_t i = 0; i < ds->ds.n_respondents(); ++i)
    n += static_cast<long>(ds->ds.roster(i).size());
  return n;
}

void sibsurv_estimate_opts_init(sibsurv_estimate_opts* opts) {
  if (!opts) return;
  std::memset(opts, 0, sizeof(*opts));
  opts->window_years = 7;
  opts->seed = 12345;
}

sibsurv_status sibsurv_estimate(const sibsurv_dataset* handle,
                                const sibsurv_estimate_opts* opts,
                                sibsurv_table** out) {
  return guarded([&] {
    require(handle && opts && out, "null argument");
    const survey_dataset& ds = handle->ds;

    std::vector<estimator_id> ids = parse_estimator_list(
        opts->estimators ? opts->estimators : "agg_excl,ind_excl");

    window_mode wmode = window_mode::absolute;
    cmc win_start = opts->window_start_cmc;
    cmc win_end = opts->window_end_cmc;
    if (opts->window_years > 0) {
      wmode = window_mode::relative_to_interview;
      win_start = -12 * opts->window_years;
      win_end = -1;
    } else {
      require(win_start <= win_end, "window start after window end");
    }

    exposure_mode exposure = exposure_mode::person_years;
    if (opts->exposure) {
      std::string e = opts->exposure;
      if (e == "headcount") exposure = exposure_mode::headcount;
      else
        require(e == "person-years", "exposure must be person-years or "
                                     "headcount");
    }

    std::vector<cell> cells = make_age_sex_cells(
        opts->cells ? opts->cells : "5y", ds.frame(), win_start, win_end);

    bool need_excl = false, need_incl = false;
    for (const auto& id : ids)
      (id.include_respondent ? need_incl : need_excl) = true;
    std::vector<tally_row> tallies_excl, tallies_incl;
    if (need_excl)
      tallies_excl = tally(ds, cells, false, exposure, wmode);
    if (need_incl)
      tallies_incl = tally(ds, cells, true, exposure, wmode);
    if (opts->tallies_out)
      write_tallies_csv(opts->tallies_out, ds, cells,
                        need_excl ? tallies_excl : tallies_incl);

    std::vector<replicate_weights> reps;
    if (opts->bootstrap_reps > 0) {
      reps = make_replicates(ds, opts->bootstrap_reps, opts->seed);
      if (opts->replicates_out)
        write_replicates_csv(opts->replicates_out, ds, reps);
    }

    std::vector<double> weights = ds.design_weights();
    table t({"cell", "estimator", "point", "se", "ci_lo", "ci_hi",
             "n_reports"});
    for (std::uint32_t c = 0; c < cells.size(); ++c) {
      for (const auto& id : ids) {
        const auto& tallies =
            id.include_respondent ? tallies_incl : tallies_excl;
        std::vector<table::value> row{cells[c].label(), id.name(),
                                      std::monostate{}, std::monostate{},
                                      std::monostate{}, std::monostate{},
                                      count_contributing_reports(tallies, c)};
        try {
          row[2] = estimate(tallies, weights, c, id);
        } catch (const error& e) {
          if (e.code() != errc::zero_exposure || !opts->allow_empty) throw;
          t.add_row(std::move(row));
          continue;
        }
        if (!reps.empty()) {
          bootstrap_result b = bootstrap_summary(
              [&](std::span<const double> w) {
                return estimate(tallies, w, c, id);
              },
              ds, reps);
          row[3] = opt_value(b.se);
          row[4] = opt_value(b.ci_lo);
          row[5] = opt_value(b.ci_hi);
        }
        t.add_row(std::move(row));
      }
    }
    *out = new sibsurv_table{std::move(t)};
  });
}

sibsurv_status sibsurv_ic_checks(const sibsurv_dataset* handle, int age_lo,
                                 int age_hi, int bootstrap_reps,
                                 unsigned long long seed,
                                 sibsurv_table** out) {
  return guarded([&] {
    require(handle && out, "null argument");
    require(age_lo <= age_hi, "age_lo must be <= age_hi");
    std::vector<replicate_weights> reps;
    if (bootstrap_reps > 0)
      reps = make_replicates(handle->ds, bootstrap_reps, seed);
    auto rows = ic_checks(handle->ds, age_lo, age_hi, reps);
    table t({"age", "delta", "ci_lo", "ci_hi"});
    for (const auto& r : rows)
      t.add_row({static_cast<long long>(r.age), r.delta, opt_value(r.ci_lo),
                 opt_value(r.ci_hi)});
    *out = new sibsurv_table{std::move(t)};
  });
}

sibsurv_status sibsurv_invisibility(const sibsurv_dataset* handle,
                                    const char* bands, sibsurv_table** out) {
  return guarded([&] {
    require(handle && out, "null argument");
    const survey_dataset& ds = handle->ds;
    std::vector<cell> cells = make_age_sex_cells(bands ? bands : "5y",
                                                 ds.frame(), 0, 0);
    std::vector<age_band> age_bands;
    for (const auto& c : cells) {
      if (c.sex_filter && *c.sex_filter != sex::female) continue;
      age_bands.push_back({c.age_lo, c.age_hi});
    }
    auto fractions = invisible_fraction_by_age(ds, age_bands);
    table t({"band", "fraction"});
    for (std::size_t b = 0; b < age_bands.size(); ++b) {
      t.add_row({std::to_string(age_bands[b].lo) + "-" +
                     std::to_string(age_bands[b].hi),
                 fractions[b]});
    }
    *out = new sibsurv_table{std::move(t)};
  });
}

sibsurv_status sibsurv_sensitivity_surface(const char* k_grid,
                                           const char* p_grid,
                                           const char* param,
                                           sibsurv_table** out) {
  return guarded([&] {
    require(out, "null argument");
    std::vector<double> ks = parse_grid(k_grid, "K");
    std::vector<double> ps = parse_grid(p_grid, "p");
    invisibility_param ip = invisibility_param::exposure;
    if (param) {
      std::string s = param;
      if (s == "deaths") ip = invisibility_param::deaths;
      else
        require(s == "exposure", "param must be deaths or exposure");
    }
    auto points = sensitivity_surface(ks, ps, ip);
    table t({"K", "p", "rel_error"});
    for (const auto& pt : points) t.add_row({pt.k, pt.p, pt.rel_error});
    *out = new sibsurv_table{std::move(t)};
  });
}

sibsurv_status sibsurv_simulate(const char* config_path,
                                sibsurv_table** results,
                                sibsurv_table** summary) {
  return guarded([&] {
    require(config_path, "null argument");
    scenario_config cfg = load_scenario_config(config_path);
    scenario_results res = run_scenario(cfg);

    if (results) {
      table t({"tau_d", "tau_n", "f", "rep", "estimator", "cell", "estimate",
               "truth"});
      for (const auto& r : res.estimates) {
        t.add_row({r.tau_d, r.tau_n, r.f, static_cast<long long>(r.rep),
                   r.estimator.name(), r.cell_label, opt_value(r.estimate),
                   opt_value(r.truth)});
      }
      *results = new sibsurv_table{std::move(t)};
    }
    if (summary) {
      table t({"tau_d", "tau_n", "f", "estimator", "cell", "truth", "rel_mse",
               "rel_bias_sq", "rel_var"});
      for (const auto& r : res.summary) {
        t.add_row({r.tau_d, r.tau_n, r.f, r.estimator.name(), r.cell_label,
                   r.truth, r.mse.rel_mse, r.mse.rel_bias_sq, r.mse.rel_var});
      }
      *summary = new sibsurv_table{std::move(t)};
    }
  });
}

long sibsurv_table_n_rows(const sibsurv_table* t) {
  return t ? static_cast<long>(t->t.n_rows()) : 0;
}

long sibsurv_table_n_cols(const sibsurv_table* t) {
  return t ? static_cast<long>(t->t.columns().size()) : 0;
}

const char* sibsurv_table_column_name(const sibsurv_table* t, long col) {
  if (!t || col < 0 || col >= sibsurv_table_n_cols(t)) return nullptr;
  return t->t.columns()[static_cast<std::size_t>(col)].c_str();
}

long sibsurv_table_cell(const sibsurv_table* t, long row, long col, char* buf,
                        size_t buflen) {
  if (!t || row < 0 || col < 0 || row >= sibsurv_table_n_rows(t) ||
      col >= sibsurv_table_n_cols(t))
    return -1;
  std::string text = t->t.cell_text(static_cast<std::size_t>(row),
                                    static_cast<std::size_t>(col));
  if (buf && buflen > 0) {
    std::size_t n = std::min(buflen - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
  }
  return static_cast<long>(text.size());
}

sibsurv_status sibsurv_table_write_csv(const sibsurv_table* t,
                                       const char* path) {
  return guarded([&] {
    require(t, "null table");
    t->t.write_csv(path ? path : "");
  });
}

sibsurv_status sibsurv_table_write_json(const sibsurv_table* t,
                                        const char* path) {
  return guarded([&] {
    require(t, "null table");
    t->t.write_json(path ? path : "");
  });
}

void sibsurv_table_free(sibsurv_table* t) { delete t; }

}  // extern "C"
