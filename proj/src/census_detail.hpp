#pragma once

#include <algorithm>
#include <vector>

#include "sibsurv/population.hpp"
#include "sibsurv/tally.hpp"

namespace sibsurv::detail {

// Classification of every person against one cell. Headcount: a dead
// person belongs at the age reached at death, a living person at the age
// reached at the cell's window end; the reference month must fall in the
// window, and exposure is one unit. Person-years: exposure is the months
// alive in the window at in-band ages over 12, half a month at death.
struct census_class {
  std::vector<double> exposure_in_cell;
  std::vector<bool> death_in_cell;
  std::vector<bool> in_frame;           // frame-eligible at the census month
  std::vector<std::uint32_t> frame_in_sibship;  // |sigma ∩ F| per person
};

inline census_class classify(const pseudo_population& pop,
                             const frame_definition& frame, cmc census_month,
                             const cell& target,
                             exposure_mode mode = exposure_mode::headcount) {
  std::size_t n = pop.n_persons();
  census_class c;
  c.exposure_in_cell.assign(n, 0.0);
  c.death_in_cell.assign(n, false);
  c.in_frame.assign(n, false);
  c.frame_in_sibship.assign(n, 0);

  std::vector<std::uint32_t> sibship_frame(pop.n_sibships(), 0);
  for (const auto& p : pop.persons)
    if (frame_eligible(p, frame, census_month)) {
      c.in_frame[p.id] = true;
      ++sibship_frame[p.sibship];
    }
  for (const auto& p : pop.persons)
    c.frame_in_sibship[p.id] = sibship_frame[p.sibship];

  for (const auto& p : pop.persons) {
    bool dead = p.death.has_value();
    if (!target.matches_sex(p.p_sex)) continue;
    if (dead && *p.death >= target.window_start &&
        *p.death <= target.window_end &&
        target.contains_age(completed_age(p.dob, *p.death)))
      c.death_in_cell[p.id] = true;

    if (mode == exposure_mode::headcount) {
      if (p.dob > target.window_end) continue;
      if (dead && *p.death < target.window_start) continue;
      cmc ref = (dead && *p.death <= target.window_end) ? *p.death
                                                        : target.window_end;
      if (target.contains_age(completed_age(p.dob, ref)))
        c.exposure_in_cell[p.id] = 1.0;
      continue;
    }
    cmc first = std::max(target.window_start, p.dob);
    double amount = 0.0;
    for (cmc month = first; month <= target.window_end; ++month) {
      double share = 1.0 / 12.0;
      if (dead) {
        if (month > *p.death) break;
        if (month == *p.death) share = 0.5 / 12.0;
      }
      if (target.contains_age(completed_age(p.dob, month))) amount += share;
    }
    c.exposure_in_cell[p.id] = amount;
  }
  return c;
}

// Exclude-respondent visibility under perfect reporting.
inline std::uint32_t visibility(const census_class& c, std::uint32_t id) {
  std::uint32_t v = c.frame_in_sibship[id];
  if (c.in_frame[id]) --v;
  return v;
}

}  // namespace sibsurv::detail
