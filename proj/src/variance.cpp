#include "sibsurv/variance.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sibsurv/csv.hpp"
#include "sibsurv/rng.hpp"

namespace sibsurv {

namespace {

struct design_index {
  // stratum -> ordered list of PSU keys; respondents mapped to (stratum, psu)
  // slots so multipliers can be assigned per PSU.
  std::vector<std::string> strata;
  std::vector<std::vector<std::string>> psus;             // per stratum
  std::vector<std::pair<std::size_t, std::size_t>> slot;  // per respondent
};

design_index index_design(const survey_dataset& ds) {
  std::map<std::string, std::map<std::string, std::size_t>> seen;
  for (const auto& r : ds.respondents()) seen[r.stratum_id][r.psu_id] = 0;

  design_index idx;
  std::map<std::string, std::size_t> stratum_pos;
  for (auto& [stratum, psu_map] : seen) {
    stratum_pos[stratum] = idx.strata.size();
    idx.strata.push_back(stratum);
    std::vector<std::string> psu_list;
    std::size_t p = 0;
    for (auto& [psu, pos] : psu_map) {
      pos = p++;
      psu_list.push_back(psu);
    }
    idx.psus.push_back(std::move(psu_list));
  }
  idx.slot.reserve(ds.n_respondents());
  for (const auto& r : ds.respondents()) {
    std::size_t h = stratum_pos[r.stratum_id];
    idx.slot.emplace_back(h, seen[r.stratum_id][r.psu_id]);
  }
  return idx;
}

}  // namespace

std::vector<replicate_weights> make_replicates(const survey_dataset& ds,
                                               int n_reps,
                                               std::uint64_t seed) {
  if (n_reps <= 0)
    throw error(errc::bad_argument, "replicate count must be positive");
  design_index idx = index_design(ds);
  for (std::size_t h = 0; h < idx.strata.size(); ++h) {
    if (idx.psus[h].size() < 2)
      throw error(errc::singleton_stratum,
                  "stratum '" + idx.strata[h] +
                      "' has a single PSU; collapse strata before "
                      "bootstrapping");
  }

  std::vector<replicate_weights> reps;
  reps.reserve(static_cast<std::size_t>(n_reps));
  for (int r = 0; r < n_reps; ++r) {
    replicate_weights rw;
    rw.rep_index = r;
    rw.multipliers.assign(ds.n_respondents(), 0.0);

    // One multiplier per PSU: (n_h / (n_h - 1)) * r_p over n_h - 1 draws.
    std::vector<std::vector<double>> psu_mult(idx.strata.size());
    for (std::size_t h = 0; h < idx.strata.size(); ++h) {
      std::size_t n_h = idx.psus[h].size();
      rng stream(derive_seed(seed, {static_cast<std::uint64_t>(r),
                                    hash_str(idx.strata[h].c_str())}));
      std::vector<int> draws(n_h, 0);
      for (std::size_t d = 0; d + 1 < n_h; ++d)
        ++draws[stream.bounded(n_h)];
      double scale = static_cast<double>(n_h) / (static_cast<double>(n_h) - 1);
      psu_mult[h].resize(n_h);
      for (std::size_t p = 0; p < n_h; ++p) psu_mult[h][p] = scale * draws[p];
    }
    for (std::size_t i = 0; i < ds.n_respondents(); ++i) {
      auto [h, p] = idx.slot[i];
      rw.multipliers[i] = psu_mult[h][p];
    }
    reps.push_back(std::move(rw));
  }
  return reps;
}

bootstrap_result bootstrap_summary(
    const std::function<double(std::span<const double>)>& point_fn,
    const survey_dataset& ds, std::span<const replicate_weights> replicates) {
  std::vector<double> base = ds.design_weights();
  std::vector<double> w(base.size());
  std::vector<double> estimates;
  estimates.reserve(replicates.size());

  bootstrap_result out;
  for (const auto& rep : replicates) {
    for (std::size_t i = 0; i < base.size(); ++i)
      w[i] = base[i] * rep.multipliers[i];
    try {
      estimates.push_back(point_fn(w));
    } catch (const error& e) {
      if (e.code() == errc::zero_exposure) {
        ++out.n_dropped;
        continue;
      }
      throw;
    }
  }
  out.n_used = static_cast<int>(estimates.size());
  if (estimates.size() < 2) return out;

  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= static_cast<double>(estimates.size());
  double ss = 0.0;
  for (double e : estimates) ss += (e - mean) * (e - mean);
  out.se = std::sqrt(ss / (static_cast<double>(estimates.size()) - 1.0));

  std::sort(estimates.begin(), estimates.end());
  auto percentile = [&](double p) {
    double pos = p * (static_cast<double>(estimates.size()) - 1.0);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, estimates.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return estimates[lo] * (1.0 - frac) + estimates[hi] * frac;
  };
  out.ci_lo = percentile(0.025);
  out.ci_hi = percentile(0.975);
  return out;
}

double taylor_variance(double d_hat, double n_hat, double var_d, double var_n,
                       double cov_dn) {
  if (n_hat <= 0.0)
    throw error(errc::bad_argument, "taylor_variance requires N > 0");
  double m = d_hat / n_hat;
  return (var_d + m * m * var_n - 2.0 * m * cov_dn) / (n_hat * n_hat);
}

void write_replicates_csv(const std::string& path, const survey_dataset& ds,
                          std::span<const replicate_weights> replicates) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& rep : replicates) {
    for (std::size_t i = 0; i < ds.n_respondents(); ++i) {
      rows.push_back({csv::format_int(rep.rep_index),
                      ds.respondents()[i].resp_id,
                      csv::format_double(rep.multipliers[i])});
    }
  }
  csv::write_file(path, {"rep_index", "resp_id", "multiplier"}, rows);
}

}  // namespace sibsurv
