#include "sibsurv/tally.hpp"

#include <algorithm>
#include <numeric>

#include "sibsurv/csv.hpp"
#include "sibsurv/error.hpp"

namespace sibsurv {

namespace {

bool bands_intersect(int lo1, int hi1, int lo2, int hi2) {
  return lo1 <= hi2 && lo2 <= hi1;
}

bool cells_overlap(const cell& a, const cell& b) {
  bool sexes = !a.sex_filter || !b.sex_filter || *a.sex_filter == *b.sex_filter;
  return sexes && bands_intersect(a.age_lo, a.age_hi, b.age_lo, b.age_hi) &&
         bands_intersect(a.window_start, a.window_end, b.window_start,
                         b.window_end);
}

bool cell_overlaps_frame(const cell& c, const frame_definition& frame) {
  bool sexes = c.sex_filter ? frame.sex_eligible(*c.sex_filter)
                            : (frame.female_eligible || frame.male_eligible);
  return sexes && bands_intersect(c.age_lo, c.age_hi, frame.age_min,
                                  frame.age_max);
}

struct member_view {
  sex m_sex;
  cmc dob;
  bool dead;
  cmc dod;        // valid when dead
  bool in_frame;  // static, evaluated at the interview month
};

// Exposure and death contribution of one person to one cell over an
// absolute window. Months before dob contribute nothing; the death month
// contributes half a month.
void accumulate(const member_view& m, const cell& c, cmc win_start,
                cmc win_end, exposure_mode mode, bool frame_overlap,
                tally_row& row) {
  if (!c.matches_sex(m.m_sex)) return;
  bool route_in_frame = m.in_frame && frame_overlap;

  if (m.dead && m.dod >= win_start && m.dod <= win_end &&
      c.contains_age(completed_age(m.dob, m.dod))) {
    row.y_d += 1.0;
  }

  if (mode == exposure_mode::headcount) {
    if (m.dob > win_end) return;
    if (m.dead && m.dod < win_start) return;
    cmc ref = (m.dead && m.dod <= win_end) ? m.dod : win_end;
    if (!c.contains_age(completed_age(m.dob, ref))) return;
    (route_in_frame ? row.y_n_in_frame : row.y_n_not_frame) += 1.0;
    return;
  }

  cmc first = std::max(win_start, m.dob);
  for (cmc month = first; month <= win_end; ++month) {
    double amount = 1.0 / 12.0;
    if (m.dead) {
      if (month > m.dod) break;
      if (month == m.dod) amount = 0.5 / 12.0;
    }
    if (!c.contains_age(completed_age(m.dob, month))) continue;
    (route_in_frame ? row.y_n_in_frame : row.y_n_not_frame) += amount;
  }
}

}  // namespace

std::vector<tally_row> tally(const survey_dataset& ds,
                             const std::vector<cell>& cells,
                             bool include_respondent, exposure_mode exposure,
                             window_mode windows) {
  for (std::size_t a = 0; a < cells.size(); ++a)
    for (std::size_t b = a + 1; b < cells.size(); ++b)
      if (cells_overlap(cells[a], cells[b]))
        throw error(errc::overlapping_cells,
                    "cells " + cells[a].label() + " and " + cells[b].label() +
                        " overlap");

  std::vector<bool> frame_overlap(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c)
    frame_overlap[c] = cell_overlaps_frame(cells[c], ds.frame());

  std::vector<std::uint32_t> order(ds.n_respondents());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return ds.respondents()[a].resp_id < ds.respondents()[b].resp_id;
  });

  std::vector<tally_row> out;
  out.reserve(ds.n_respondents() * cells.size());
  for (std::uint32_t i : order) {
    const respondent& resp = ds.respondents()[i];
    int y_f = ds.frame_sibling_count(i) + (include_respondent ? 1 : 0);

    std::vector<member_view> members;
    members.reserve(ds.roster(i).size() + 1);
    for (const auto& sib : ds.roster(i)) {
      members.push_back({sib.sib_sex, sib.dob, !sib.alive,
                         sib.dod.value_or(0),
                         is_frame_member(sib, ds.frame(), resp.interview)});
    }
    if (include_respondent) {
      // Respondents are alive and on the frame by definition.
      members.push_back({resp.resp_sex, resp.dob, false, 0, true});
    }

    for (std::uint32_t c = 0; c < cells.size(); ++c) {
      tally_row row;
      row.resp = i;
      row.cell = c;
      row.y_f = y_f;
      cmc win_start = cells[c].window_start;
      cmc win_end = cells[c].window_end;
      if (windows == window_mode::relative_to_interview) {
        win_start += resp.interview;
        win_end += resp.interview;
      }
      for (const auto& m : members)
        accumulate(m, cells[c], win_start, win_end, exposure,
                   frame_overlap[c], row);
      out.push_back(row);
    }
  }
  return out;
}

void write_tallies_csv(const std::string& path, const survey_dataset& ds,
                       const std::vector<cell>& cells,
                       const std::vector<tally_row>& tallies) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(tallies.size());
  for (const auto& t : tallies) {
    rows.push_back({ds.respondents()[t.resp].resp_id, cells[t.cell].label(),
                    csv::format_double(t.y_d),
                    csv::format_double(t.y_n_in_frame),
                    csv::format_double(t.y_n_not_frame),
                    csv::format_int(t.y_f)});
  }
  csv::write_file(
      path, {"resp_id", "cell", "y_d", "y_n_in_frame", "y_n_not_frame", "y_f"},
      rows);
}

}  // namespace sibsurv
