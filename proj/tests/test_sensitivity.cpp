#include <doctest.h>

#include <cmath>

#include "census_oracle.hpp"
#include "sibsurv/rng.hpp"
#include "sibsurv/sensitivity.hpp"
#include "sibsurv/simulator.hpp"
#include "support.hpp"

using namespace sibsurv;
using testsupport::kCensus;

TEST_SUITE("sensitivity") {

TEST_CASE("closed-form relative errors") {
  CHECK(rel_error_by_deaths(1.2, 0.1) ==
        doctest::Approx(-1.0 / 60.0).epsilon(1e-12));
  CHECK(rel_error_by_deaths(1.0, 0.37) == 0.0);
  CHECK(rel_error_by_deaths(1.3, 0.0) == 0.0);

  CHECK(rel_error_by_exposure(1.2, 0.1) ==
        doctest::Approx(-0.02 / 1.02).epsilon(1e-12));
  CHECK(rel_error_by_exposure(1.1, 0.2) ==
        doctest::Approx(-0.0196078431).epsilon(1e-6));
  CHECK(rel_error_by_exposure(1.0, 0.4) == 0.0);

  CHECK_THROWS_AS(rel_error_by_deaths(-1.0, 0.1), error);
  CHECK_THROWS_AS(rel_error_by_exposure(1.1, 1.5), error);
}

TEST_CASE("total_from_visible in both parameterizations") {
  CHECK(total_from_visible(0.03, 1.0, 0.2, invisibility_param::deaths) ==
        doctest::Approx(0.03).epsilon(1e-12));
  CHECK(total_from_visible(0.01, 1.2, 0.1, invisibility_param::exposure) ==
        doctest::Approx(0.0102).epsilon(1e-12));

  // Fed consistent shares from one truth, both routes agree.
  double d_vis = 180, d_inv = 40, n_vis = 9000, n_inv = 800;
  double m_vis = d_vis / n_vis;
  double k = (d_inv / n_inv) / m_vis;
  double p_d = d_inv / (d_vis + d_inv);
  double p_n = n_inv / (n_vis + n_inv);
  double truth = (d_vis + d_inv) / (n_vis + n_inv);
  CHECK(total_from_visible(m_vis, k, p_d, invisibility_param::deaths) ==
        doctest::Approx(truth).epsilon(1e-9));
  CHECK(total_from_visible(m_vis, k, p_n, invisibility_param::exposure) ==
        doctest::Approx(truth).epsilon(1e-9));
}

TEST_CASE("sensitivity surface grid") {
  std::vector<double> k1{1.1};
  std::vector<double> p1{0.2};
  auto single = sensitivity_surface(k1, p1, invisibility_param::exposure);
  REQUIRE(single.size() == 1);
  CHECK(single[0].rel_error ==
        doctest::Approx(rel_error_by_exposure(1.1, 0.2)).epsilon(1e-12));

  std::vector<double> ks{0.9, 1.0, 1.1};
  std::vector<double> ps{0.0, 0.1, 0.2, 0.3};
  auto grid = sensitivity_surface(ks, ps, invisibility_param::deaths);
  REQUIRE(grid.size() == 12);
  for (const auto& pt : grid)
    if (pt.k == 1.0) CHECK(pt.rel_error == 0.0);
}

TEST_CASE("aggregation means and the pooled-rate identities") {
  std::vector<double> rates{0.01, 0.02};
  std::vector<double> deaths{10, 20};
  CHECK(weighted_harmonic_mean(rates, deaths) ==
        doctest::Approx(0.015).epsilon(1e-12));
  std::vector<double> exposures{1000, 1000};
  CHECK(weighted_arithmetic_mean(rates, exposures) ==
        doctest::Approx(0.015).epsilon(1e-12));

  // Harmonic mean is invariant to rescaling the weights.
  std::vector<double> scaled{10 * 7.3, 20 * 7.3};
  CHECK(weighted_harmonic_mean(rates, scaled) ==
        doctest::Approx(0.015).epsilon(1e-12));

  // Random two-group splits: H(deaths) = A(exposures) = pooled rate.
  rng r(404);
  for (int trial = 0; trial < 50; ++trial) {
    double d1 = 1 + r.bounded(500), d2 = 1 + r.bounded(500);
    double n1 = 1000 + r.bounded(50000), n2 = 1000 + r.bounded(50000);
    std::vector<double> ms{d1 / n1, d2 / n2};
    std::vector<double> ds{d1, d2};
    std::vector<double> ns{n1, n2};
    double pooled = (d1 + d2) / (n1 + n2);
    CHECK(weighted_harmonic_mean(ms, ds) ==
          doctest::Approx(pooled).epsilon(1e-12));
    CHECK(weighted_arithmetic_mean(ms, ns) ==
          doctest::Approx(pooled).epsilon(1e-12));
  }
}

TEST_CASE("homogeneous model: closed forms") {
  std::vector<int> sizes{1, 1, 1, 1};
  auto e = homogeneous_model(0.5, sizes, false);
  CHECK(e.e_d_vis == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.e_n_vis == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e.m_vis == 0.5);
  CHECK(e.m_invis == 0.5);

  auto ei = homogeneous_model(0.3, sizes, true);
  CHECK(ei.m_invis == 1.0);
  // E[N'] = |N| - q sum q^{s_i} = 4 - 0.3*4*0.3 = 3.64
  CHECK(ei.e_n_vis == doctest::Approx(4.0 - 0.3 * 4 * 0.3).epsilon(1e-12));

  std::vector<int> mixed{0, 2, 5, 1, 3};
  auto em = homogeneous_model(0.2, mixed, false);
  CHECK(em.m_vis == 0.2);
  CHECK(em.m_invis == 0.2);
  CHECK(em.e_d_vis / em.e_n_vis == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(em.e_d_invis / em.e_n_invis == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("homogeneous model matches Monte Carlo realizations") {
  // Sibships of sizes 1..4 (s_i = size - 1 per member).
  std::vector<int> sibship_sizes{1, 2, 3, 4, 2, 3};
  std::vector<int> s_i;
  for (int size : sibship_sizes)
    for (int m = 0; m < size; ++m) s_i.push_back(size - 1);
  const double q = 0.35;
  auto expected = homogeneous_model(q, s_i, false);

  const int trials = 100000;
  rng r(8181);
  double sum_dv = 0, sum_nv = 0, sum_di = 0, sum_ni = 0;
  double ss_dv = 0, ss_nv = 0, ss_di = 0, ss_ni = 0;
  std::vector<int> dead;
  for (int t = 0; t < trials; ++t) {
    double dv = 0, nv = 0, di = 0, ni = 0;
    for (int size : sibship_sizes) {
      dead.assign(size, 0);
      int n_dead = 0;
      for (int m = 0; m < size; ++m) {
        dead[m] = r.bernoulli(q) ? 1 : 0;
        n_dead += dead[m];
      }
      for (int m = 0; m < size; ++m) {
        bool sib_survives = (n_dead - dead[m]) < size - 1;
        if (sib_survives) {
          nv += 1;
          dv += dead[m];
        } else {
          ni += 1;
          di += dead[m];
        }
      }
    }
    sum_dv += dv;
    ss_dv += dv * dv;
    sum_nv += nv;
    ss_nv += nv * nv;
    sum_di += di;
    ss_di += di * di;
    sum_ni += ni;
    ss_ni += ni * ni;
  }
  auto check_within_3se = [&](double sum, double ss, double expect) {
    double mean = sum / trials;
    double var = ss / trials - mean * mean;
    double se = std::sqrt(var / trials);
    CHECK(std::abs(mean - expect) <= 3.0 * se + 1e-9);
  };
  check_within_3se(sum_dv, ss_dv, expected.e_d_vis);
  check_within_3se(sum_nv, ss_nv, expected.e_n_vis);
  check_within_3se(sum_di, ss_di, expected.e_d_invis);
  check_within_3se(sum_ni, ss_ni, expected.e_n_invis);
}

TEST_CASE("c-factor: trivial populations") {
  // Three singleton sibships of frame women aged 30: C = population size.
  pseudo_population pop;
  for (std::uint32_t i = 0; i < 3; ++i) {
    person p;
    p.id = i;
    p.sibship = i;
    p.p_sex = sex::female;
    p.dob = kCensus - 12 * 30;
    pop.persons.push_back(p);
    pop.sibships.emplace_back(i, i + 1);
  }
  frame_definition frame = parse_frame_spec("f15-49");
  cell whole{sex::female, 15, 49, 0, kCensus};
  CHECK(c_factor(pop, frame, kCensus, whole) == 3);

  cell male_cell{sex::male, 15, 49, 0, kCensus};
  CHECK(c_factor(pop, frame, kCensus, male_cell) == 0);
}

TEST_CASE("c-factor identity on a simulated census") {
  auto seed_path = testsupport::write_seed_sibships("sen_seed.csv");
  frame_definition frame = parse_frame_spec("f15-49");
  auto built = build_universe(seed_path, 700, frame, kCensus, 55);
  const pseudo_population& pop = built.population;

  for (auto band : {std::pair{15, 29}, std::pair{30, 49}}) {
    cell target{sex::female, band.first, band.second, 0, kCensus};
    auto excl = census_truth(pop, {target}, frame, kCensus, false)[0];
    auto incl = census_truth(pop, {target}, frame, kCensus, true)[0];
    long c = c_factor(pop, frame, kCensus, target);
    REQUIRE(excl.m_vis.has_value());
    // M_vis = D'_vis / (N'_vis - C), and deaths' visibility is unchanged.
    CHECK(incl.d_vis == excl.d_vis);
    CHECK(*excl.m_vis == doctest::Approx(incl.d_vis /
                                         (incl.n_vis - static_cast<double>(c)))
                             .epsilon(1e-12));
  }
}

TEST_CASE("realized aggregate factors: perfect reporting baseline") {
  auto seed_path = testsupport::write_seed_sibships("sen_seed2.csv");
  frame_definition frame = parse_frame_spec("f15-49");
  auto built = build_universe(seed_path, 400, frame, kCensus, 66);
  auto net = apply_reporting(built.population, frame, kCensus, 1.0, 1.0, 67);

  cell target{sex::female, 15, 49, 0, kCensus};
  auto adj = realized_agg_factors(built.population, net, frame, kCensus,
                                  target);
  REQUIRE(adj.has_value());
  CHECK(adj->gamma_d == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(adj->gamma_n == doctest::Approx(1.0).epsilon(1e-12));

  auto ind = realized_ind_factors(built.population, net, frame, kCensus,
                                  target);
  REQUIRE(ind.has_value());
  CHECK(ind->gamma_d == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ind->gamma_star_n == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ind->k_d == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ind->k_n == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("realized gamma_d tracks the retained fraction of death edges") {
  auto seed_path = testsupport::write_seed_sibships(
      "sen_seed3.csv", {.n_sibships = 2000, .seed = 31});
  frame_definition frame = parse_frame_spec("f15-49");
  auto built = build_universe(seed_path, 4000, frame, kCensus, 68);
  auto net = apply_reporting(built.population, frame, kCensus, 0.8, 1.0, 69);

  cell target{std::nullopt, 0, 130, 0, kCensus};
  auto adj = realized_agg_factors(built.population, net, frame, kCensus,
                                  target);
  REQUIRE(adj.has_value());
  CHECK(std::abs(adj->gamma_d - 0.8) < 0.02);
  // Exposure counts the dead too, so thinning death edges also drags
  // gamma_n below 1, though far less than gamma_d.
  CHECK(adj->gamma_n > adj->gamma_d);
  CHECK(adj->gamma_n < 1.0);
}

TEST_CASE("decomposition identities hold exactly on realized networks") {
  auto seed_path = testsupport::write_seed_sibships("sen_seed4.csv");
  frame_definition frame = parse_frame_spec("f15-49");
  auto built = build_universe(seed_path, 800, frame, kCensus, 70);
  const pseudo_population& pop = built.population;

  std::vector<cell> cells = make_age_sex_cells("10y:15-54", frame, 0, kCensus);
  for (auto [tau_d, tau_n] : {std::pair{0.8, 0.8}, std::pair{0.8, 1.0},
                              std::pair{1.0, 0.8}, std::pair{1.0, 1.0}}) {
    auto net = apply_reporting(pop, frame, kCensus, tau_d, tau_n,
                               static_cast<std::uint64_t>(tau_d * 100 +
                                                          tau_n * 10));
    for (const auto& target : cells) {
      auto truth = census_truth(pop, {target}, frame, kCensus, false)[0];
      if (!truth.m.has_value() || truth.d_vis == 0) continue;
      CAPTURE(target.label());

      auto agg = realized_agg_factors(pop, net, frame, kCensus, target);
      if (agg) {
        double recovered = agg->estimand * agg->visibility_ratio *
                           (agg->gamma_n / agg->gamma_d) *
                           (1.0 + agg->p_invisible_n * (agg->k - 1.0));
        CHECK(recovered == doctest::Approx(*truth.m).epsilon(1e-9));
      }

      auto ind = realized_ind_factors(pop, net, frame, kCensus, target);
      if (ind) {
        CHECK(1.0 + ind->k_d > 0.0);
        CHECK(1.0 + ind->k_n > 0.0);
        double recovered = ind->estimand *
                           (ind->gamma_star_n / ind->gamma_d) *
                           ((1.0 + ind->k_n) / (1.0 + ind->k_d)) *
                           (1.0 + ind->p_invisible_n * (ind->k - 1.0));
        CHECK(recovered == doctest::Approx(*truth.m).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("p-share consistency: (1-p_d)/(1-p_n) = m_vis/m") {
  auto seed_path = testsupport::write_seed_sibships("sen_seed5.csv");
  frame_definition frame = parse_frame_spec("f15-49");
  auto built = build_universe(seed_path, 500, frame, kCensus, 71);
  std::vector<cell> cells = make_age_sex_cells("10y:15-54", frame, 0, kCensus);
  auto truths = census_truth(built.population, cells, frame, kCensus, false);
  int checked = 0;
  for (const auto& t : truths) {
    if (!t.m || !t.m_vis || !t.p_inv_d || *t.m == 0.0) continue;
    CHECK((1.0 - *t.p_inv_d) / (1.0 - *t.p_inv_n) ==
          doctest::Approx(*t.m_vis / *t.m).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked > 0);
}

}  // TEST_SUITE
