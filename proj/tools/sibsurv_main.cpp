// Command-line front end for batch sibling-survival analysis. Talks to the
// estimation engine exclusively through the C API in sibsurv.h.

#include <cstdio>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "sibsurv.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitZeroExposure = 2;
constexpr int kExitUsage = 64;

int fail(sibsurv_status status) {
  std::fprintf(stderr, "error: %s\n", sibsurv_last_error());
  return status == SIBSURV_ERR_ZERO_EXPOSURE ? kExitZeroExposure
                                             : kExitRuntime;
}

int write_table(sibsurv_table* t, const std::string& format,
                const std::string& out) {
  sibsurv_status s = format == "json"
                         ? sibsurv_table_write_json(t, out.empty() ? nullptr
                                                                   : out.c_str())
                         : sibsurv_table_write_csv(t, out.empty() ? nullptr
                                                                  : out.c_str());
  if (s != SIBSURV_OK) return fail(s);
  return kExitOk;
}

struct dataset_args {
  std::string respondents;
  std::string siblings;
  std::string frame;
};

void add_dataset_flags(CLI::App* cmd, dataset_args& args) {
  cmd->add_option("--respondents", args.respondents,
                  "Respondents CSV (resp_id,stratum_id,psu_id,weight,sex,"
                  "dob_cmc,interview_cmc)")
      ->required();
  cmd->add_option("--siblings", args.siblings,
                  "Sibling rosters CSV (resp_id,sib_index,sex,dob_cmc,alive,"
                  "dod_cmc)")
      ->required();
  cmd->add_option("--frame", args.frame,
                  "Frame population, e.g. f15-49 = females aged 15-49")
      ->required();
}

int load(const dataset_args& args, sibsurv_dataset** out) {
  sibsurv_status s = sibsurv_dataset_load(args.respondents.c_str(),
                                          args.siblings.c_str(),
                                          args.frame.c_str(), out);
  if (s != SIBSURV_OK) return fail(s);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adult death rate estimation from sibling-history surveys"};
  app.require_subcommand(1);

  // ---- estimate ----
  dataset_args est_data;
  int window_years = 0;
  std::string window_abs;
  std::string cells = "5y";
  std::string estimators;
  bool include_respondent = false;
  std::string exposure = "person-years";
  int bootstrap = 0;
  unsigned long long seed = 12345;
  bool allow_empty = false;
  std::string format = "csv";
  std::string out_path;
  std::string dump_tallies, dump_replicates;

  CLI::App* est = app.add_subcommand(
      "estimate", "Death-rate estimates per cell and estimator");
  add_dataset_flags(est, est_data);
  est->add_option("--window-years", window_years,
                  "Window: N years before each interview (default 7)");
  est->add_option("--window", window_abs,
                  "Absolute window CMC1:CMC2 (overrides --window-years)");
  est->add_option("--cells", cells,
                  "Age-sex cells, e.g. 5y or 10y:15-54 (default 5y over the "
                  "frame ages)");
  est->add_option("--estimators", estimators,
                  "Comma list of agg_excl,agg_incl,ind_excl,ind_incl "
                  "(default agg_excl,ind_excl)");
  est->add_flag("--include-respondent", include_respondent,
                "Default to the include-respondent estimators "
                "(agg_incl,ind_incl) when --estimators is not given");
  est->add_option("--exposure", exposure, "person-years (default) or "
                                          "headcount")
      ->check(CLI::IsMember({"person-years", "headcount"}));
  est->add_option("--bootstrap", bootstrap,
                  "Rescaled-bootstrap replicates for se/ci columns (0 = off)");
  est->add_option("--seed", seed, "RNG seed (default 12345)");
  est->add_flag("--allow-empty", allow_empty,
                "Leave zero-exposure cells blank instead of failing");
  est->add_option("--format", format, "csv (default) or json")
      ->check(CLI::IsMember({"csv", "json"}));
  est->add_option("--out", out_path, "Output path (default stdout)");
  est->add_option("--dump-tallies", dump_tallies,
                  "Also write per-respondent tallies to this CSV");
  est->add_option("--dump-replicates", dump_replicates,
                  "Also write replicate multipliers to this CSV");

  // ---- check ----
  dataset_args chk_data;
  std::string ages;
  int chk_bootstrap = 1000;
  unsigned long long chk_seed = 12345;
  std::string chk_format = "csv";
  std::string chk_out;
  CLI::App* chk = app.add_subcommand(
      "check", "Internal-consistency checks (one delta per age)");
  add_dataset_flags(chk, chk_data);
  chk->add_option("--ages", ages,
                  "Single-year age range lo:hi (default: the frame ages)");
  chk->add_option("--bootstrap", chk_bootstrap,
                  "Replicates for the CI columns (0 = no CI, default 1000)");
  chk->add_option("--seed", chk_seed, "RNG seed (default 12345)");
  chk->add_option("--format", chk_format, "csv (default) or json")
      ->check(CLI::IsMember({"csv", "json"}));
  chk->add_option("--out", chk_out, "Output path (default stdout)");

  // ---- report ----
  dataset_args rep_data;
  std::string bands = "5y";
  std::string rep_format = "csv";
  std::string rep_out;
  CLI::App* rep = app.add_subcommand(
      "report", "Share of respondents invisible to sibling histories, by "
                "age band");
  add_dataset_flags(rep, rep_data);
  rep->add_option("--bands", bands, "Age bands, e.g. 5y (default)");
  rep->add_option("--format", rep_format, "csv (default) or json")
      ->check(CLI::IsMember({"csv", "json"}));
  rep->add_option("--out", rep_out, "Output path (default stdout)");

  // ---- sensitivity ----
  std::string k_grid = "0.8:1.2:0.05";
  std::string p_grid = "0:0.4:0.05";
  std::string param = "exposure";
  std::string sen_format = "csv";
  std::string sen_out;
  CLI::App* sen = app.add_subcommand(
      "sensitivity", "Relative-error surface over (K, invisible share)");
  sen->add_option("--k", k_grid, "K grid lo:hi:step (default 0.8:1.2:0.05)");
  sen->add_option("--p", p_grid,
                  "Invisible-share grid lo:hi:step (default 0:0.4:0.05)");
  sen->add_option("--param", param, "deaths or exposure (default)")
      ->check(CLI::IsMember({"deaths", "exposure"}));
  sen->add_option("--format", sen_format, "csv (default) or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sen->add_option("--out", sen_out, "Output path (default stdout)");

  // ---- simulate ----
  std::string config_path;
  std::string out_dir = ".";
  std::string sim_format = "csv";
  CLI::App* sim = app.add_subcommand(
      "simulate", "Run a scenario config against the microsimulator");
  sim->add_option("--config", config_path, "Scenario config (key = value)")
      ->required();
  sim->add_option("--out-dir", out_dir,
                  "Directory for scenario_results/scenario_summary "
                  "(default .)");
  sim->add_option("--format", sim_format, "csv (default) or json")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (est->parsed()) {
    sibsurv_dataset* ds = nullptr;
    if (int rc = load(est_data, &ds)) return rc;

    sibsurv_estimate_opts opts;
    sibsurv_estimate_opts_init(&opts);
    if (estimators.empty() && include_respondent)
      estimators = "agg_incl,ind_incl";
    if (!estimators.empty()) opts.estimators = estimators.c_str();
    opts.cells = cells.c_str();
    if (!window_abs.empty()) {
      std::size_t colon = window_abs.find(':');
      try {
        if (colon == std::string::npos) throw std::invalid_argument("");
        opts.window_years = 0;
        opts.window_start_cmc = std::stoi(window_abs.substr(0, colon));
        opts.window_end_cmc = std::stoi(window_abs.substr(colon + 1));
      } catch (const std::exception&) {
        std::fprintf(stderr, "error: --window expects CMC1:CMC2\n");
        sibsurv_dataset_free(ds);
        return kExitUsage;
      }
    } else if (window_years > 0) {
      opts.window_years = window_years;
    }
    opts.exposure = exposure.c_str();
    opts.bootstrap_reps = bootstrap;
    opts.seed = seed;
    opts.allow_empty = allow_empty ? 1 : 0;
    if (!dump_tallies.empty()) opts.tallies_out = dump_tallies.c_str();
    if (!dump_replicates.empty())
      opts.replicates_out = dump_replicates.c_str();

    sibsurv_table* t = nullptr;
    sibsurv_status s = sibsurv_estimate(ds, &opts, &t);
    sibsurv_dataset_free(ds);
    if (s != SIBSURV_OK) return fail(s);
    int rc = write_table(t, format, out_path);
    sibsurv_table_free(t);
    return rc;
  }

  if (chk->parsed()) {
    sibsurv_dataset* ds = nullptr;
    if (int rc = load(chk_data, &ds)) return rc;
    int lo = -1, hi = -1;
    try {
      if (!ages.empty()) {
        std::size_t colon = ages.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("");
        lo = std::stoi(ages.substr(0, colon));
        hi = std::stoi(ages.substr(colon + 1));
      } else {
        // Default to the frame's age range.
        std::string digits;
        for (char c : chk_data.frame)
          if (c != 'f' && c != 'm') digits += c;
        std::size_t dash = digits.find('-');
        if (dash == std::string::npos) throw std::invalid_argument("");
        lo = std::stoi(digits.substr(0, dash));
        hi = std::stoi(digits.substr(dash + 1));
      }
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: --ages expects lo:hi\n");
      sibsurv_dataset_free(ds);
      return kExitUsage;
    }
    sibsurv_table* t = nullptr;
    sibsurv_status s =
        sibsurv_ic_checks(ds, lo, hi, chk_bootstrap, chk_seed, &t);
    sibsurv_dataset_free(ds);
    if (s != SIBSURV_OK) return fail(s);
    int rc = write_table(t, chk_format, chk_out);
    sibsurv_table_free(t);
    return rc;
  }

  if (rep->parsed()) {
    sibsurv_dataset* ds = nullptr;
    if (int rc = load(rep_data, &ds)) return rc;
    sibsurv_table* t = nullptr;
    sibsurv_status s = sibsurv_invisibility(ds, bands.c_str(), &t);
    sibsurv_dataset_free(ds);
    if (s != SIBSURV_OK) return fail(s);
    int rc = write_table(t, rep_format, rep_out);
    sibsurv_table_free(t);
    return rc;
  }

  if (sen->parsed()) {
    sibsurv_table* t = nullptr;
    sibsurv_status s = sibsurv_sensitivity_surface(k_grid.c_str(),
                                                   p_grid.c_str(),
                                                   param.c_str(), &t);
    if (s != SIBSURV_OK) return fail(s);
    int rc = write_table(t, sen_format, sen_out);
    sibsurv_table_free(t);
    return rc;
  }

  if (sim->parsed()) {
    sibsurv_table* results = nullptr;
    sibsurv_table* summary = nullptr;
    sibsurv_status s =
        sibsurv_simulate(config_path.c_str(), &results, &summary);
    if (s != SIBSURV_OK) return fail(s);
    std::string ext = sim_format == "json" ? ".json" : ".csv";
    int rc = write_table(results, sim_format,
                         out_dir + "/scenario_results" + ext);
    if (rc == kExitOk)
      rc = write_table(summary, sim_format,
                       out_dir + "/scenario_summary" + ext);
    sibsurv_table_free(results);
    sibsurv_table_free(summary);
    return rc;
  }

  return kExitUsage;
}
