#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sibsurv/data_model.hpp"

namespace sibsurv {

// One member of the simulated universe.
struct person {
  std::uint32_t id = 0;
  std::uint32_t sibship = 0;
  sex p_sex = sex::female;
  cmc dob = 0;
  std::optional<cmc> death;  // death month, when dead

  bool alive_at(cmc month) const { return !death || *death > month; }
};

// Full universe of persons partitioned into sibships; simulation ground
// truth. Persons are stored grouped by sibship.
struct pseudo_population {
  std::vector<person> persons;
  // Half-open [begin, end) index ranges into `persons`, one per sibship.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> sibships;

  std::size_t n_persons() const { return persons.size(); }
  std::size_t n_sibships() const { return sibships.size(); }
};

// Frame eligibility of a person at the census month: alive, eligible sex,
// completed age within the frame band.
bool frame_eligible(const person& p, const frame_definition& frame,
                    cmc census_month);

// Realized respondent -> sibling report edges after error injection.
// Reporters are frame-eligible living persons; subjects share the sibship.
struct reporting_network {
  // reports[person_id] lists the ids the person reports about. Empty for
  // non-reporters.
  std::vector<std::vector<std::uint32_t>> reports;
  double nominal_tau_d = 1.0;
  double nominal_tau_n = 1.0;
  // Precision is fixed at 1: the injection model never fabricates edges.
};

}  // namespace sibsurv
