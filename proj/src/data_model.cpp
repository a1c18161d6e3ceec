#include "sibsurv/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "sibsurv/csv.hpp"

namespace sibsurv {

const char* errc_name(errc c) {
  switch (c) {
    case errc::ok: return "OK";
    case errc::io_error: return "IO_ERROR";
    case errc::parse_error: return "PARSE_ERROR";
    case errc::missing_column: return "MISSING_COLUMN";
    case errc::bad_date: return "BAD_DATE";
    case errc::orphan_sibling: return "ORPHAN_SIBLING";
    case errc::duplicate_sibling: return "DUPLICATE_SIBLING";
    case errc::nonpositive_weight: return "NONPOSITIVE_WEIGHT";
    case errc::frame_violation: return "FRAME_VIOLATION";
    case errc::overlapping_cells: return "OVERLAPPING_CELLS";
    case errc::zero_exposure: return "ZERO_EXPOSURE";
    case errc::undefined_term: return "UNDEFINED_TERM";
    case errc::singleton_stratum: return "SINGLETON_STRATUM";
    case errc::zero_truth: return "ZERO_TRUTH";
    case errc::empty_seed: return "EMPTY_SEED";
    case errc::zero_visibility_seed: return "ZERO_VISIBILITY_SEED";
    case errc::division_by_zero: return "DIVISION_BY_ZERO";
    case errc::bad_argument: return "BAD_ARGUMENT";
  }
  return "UNKNOWN";
}

namespace {

std::string summarize(const std::vector<validation_issue>& issues) {
  std::ostringstream os;
  os << issues.size() << " validation issue(s):";
  std::size_t shown = std::min<std::size_t>(issues.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& is = issues[i];
    os << "\n  [" << errc_name(is.code) << "] " << is.file;
    if (is.row > 0) os << " row " << is.row;
    os << ": " << is.message;
  }
  if (shown < issues.size())
    os << "\n  ... and " << (issues.size() - shown) << " more";
  return os.str();
}

}  // namespace

validation_error::validation_error(std::vector<validation_issue> issues)
    : error(issues.empty() ? errc::parse_error : issues.front().code,
            summarize(issues)),
      issues_(std::move(issues)) {}

void frame_definition::validate() const {
  if (!female_eligible && !male_eligible)
    throw error(errc::bad_argument, "frame has no eligible sex");
  if (age_min > age_max || age_min < 0 || age_max > 130)
    throw error(errc::bad_argument, "frame age band invalid");
}

frame_definition parse_frame_spec(const std::string& spec) {
  frame_definition f;
  f.female_eligible = false;
  f.male_eligible = false;
  std::size_t i = 0;
  while (i < spec.size() && (spec[i] == 'f' || spec[i] == 'm')) {
    if (spec[i] == 'f') f.female_eligible = true;
    else f.male_eligible = true;
    ++i;
  }
  std::size_t dash = spec.find('-', i);
  if (i == 0 || dash == std::string::npos)
    throw error(errc::bad_argument, "bad frame spec '" + spec +
                                        "' (expected e.g. f15-49)");
  auto lo = spec.substr(i, dash - i);
  auto hi = spec.substr(dash + 1);
  auto parse = [&](const std::string& s) {
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw error(errc::bad_argument, "bad frame spec '" + spec + "'");
    return v;
  };
  f.age_min = parse(lo);
  f.age_max = parse(hi);
  f.validate();
  return f;
}

std::string frame_spec_string(const frame_definition& frame) {
  std::string s;
  if (frame.female_eligible) s += 'f';
  if (frame.male_eligible) s += 'm';
  s += std::to_string(frame.age_min) + "-" + std::to_string(frame.age_max);
  return s;
}

std::string cell::label() const {
  std::string s;
  if (sex_filter) s += sex_code(*sex_filter);
  else s += "a";
  s += std::to_string(age_lo) + "-" + std::to_string(age_hi);
  return s;
}

std::vector<cell> make_age_sex_cells(const std::string& spec,
                                     const frame_definition& frame,
                                     cmc window_start, cmc window_end) {
  int width = 5;
  int lo = frame.age_min;
  int hi = frame.age_max;

  std::string band = spec.empty() ? "5y" : spec;
  std::size_t colon = band.find(':');
  std::string width_part = band.substr(0, colon);
  if (width_part.empty() || width_part.back() != 'y')
    throw error(errc::bad_argument, "bad cells spec '" + spec + "'");
  width_part.pop_back();
  {
    auto res = std::from_chars(width_part.data(),
                               width_part.data() + width_part.size(), width);
    if (res.ec != std::errc() || width <= 0)
      throw error(errc::bad_argument, "bad cells spec '" + spec + "'");
  }
  if (colon != std::string::npos) {
    std::string range = band.substr(colon + 1);
    std::size_t dash = range.find('-');
    if (dash == std::string::npos)
      throw error(errc::bad_argument, "bad cells spec '" + spec + "'");
    auto parse_age = [&](const std::string& part) {
      int v = 0;
      auto res = std::from_chars(part.data(), part.data() + part.size(), v);
      if (res.ec != std::errc() || res.ptr != part.data() + part.size())
        throw error(errc::bad_argument, "bad cells spec '" + spec + "'");
      return v;
    };
    lo = parse_age(range.substr(0, dash));
    hi = parse_age(range.substr(dash + 1));
    if (lo < 0 || hi < lo)
      throw error(errc::bad_argument, "bad cells spec '" + spec + "'");
  }

  std::vector<cell> cells;
  for (sex s : {sex::female, sex::male}) {
    for (int a = lo; a <= hi; a += width) {
      cell c;
      c.sex_filter = s;
      c.age_lo = a;
      c.age_hi = std::min(hi, a + width - 1);
      c.window_start = window_start;
      c.window_end = window_end;
      cells.push_back(c);
    }
  }
  return cells;
}

bool is_frame_member(const sibling_report& sib, const frame_definition& frame,
                     cmc interview) {
  if (!sib.alive) return false;
  if (!frame.sex_eligible(sib.sib_sex)) return false;
  int age = completed_age(sib.dob, interview);
  return age >= frame.age_min && age <= frame.age_max;
}

survey_dataset::survey_dataset(frame_definition frame,
                               std::vector<respondent> respondents,
                               std::vector<sibling_report> siblings)
    : frame_(frame), respondents_(std::move(respondents)) {
  frame_.validate();
  rosters_.resize(respondents_.size());
  by_id_.reserve(respondents_.size());
  for (std::size_t i = 0; i < respondents_.size(); ++i) {
    auto [it, inserted] = by_id_.emplace(respondents_[i].resp_id, i);
    if (!inserted)
      throw error(errc::bad_argument,
                  "duplicate resp_id '" + respondents_[i].resp_id + "'");
  }
  for (auto& sib : siblings) {
    auto it = by_id_.find(sib.resp_id);
    if (it == by_id_.end())
      throw error(errc::orphan_sibling,
                  "sibling references unknown resp_id '" + sib.resp_id + "'");
    rosters_[it->second].push_back(std::move(sib));
  }
  for (auto& roster : rosters_) {
    std::stable_sort(roster.begin(), roster.end(),
                     [](const sibling_report& a, const sibling_report& b) {
                       return a.sib_index < b.sib_index;
                     });
  }
}

std::size_t survey_dataset::respondent_index(const std::string& resp_id) const {
  auto it = by_id_.find(resp_id);
  if (it == by_id_.end())
    throw error(errc::bad_argument, "unknown resp_id '" + resp_id + "'");
  return it->second;
}

int survey_dataset::frame_sibling_count(std::size_t i) const {
  int n = 0;
  for (const auto& sib : rosters_[i])
    if (is_frame_member(sib, frame_, respondents_[i].interview)) ++n;
  return n;
}

std::vector<double> survey_dataset::design_weights() const {
  std::vector<double> w;
  w.reserve(respondents_.size());
  for (const auto& r : respondents_) w.push_back(r.weight);
  return w;
}

namespace {

struct loader {
  std::vector<validation_issue> issues;

  void flag(errc code, const std::string& file, long row, std::string msg) {
    issues.push_back({code, file, row, std::move(msg)});
  }

  bool parse_int(const std::string& s, long long& out) {
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
  }

  bool parse_double(const std::string& s, double& out) {
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
  }

  std::optional<sex> parse_sex(const std::string& s) {
    if (s == "f") return sex::female;
    if (s == "m") return sex::male;
    return std::nullopt;
  }
};

}  // namespace

survey_dataset load_dataset(const std::string& respondents_path,
                            const std::string& siblings_path,
                            const frame_definition& frame) {
  frame.validate();
  loader ld;

  csv::file rf = csv::read_file(respondents_path);
  csv::file sf = csv::read_file(siblings_path);

  static const char* kRespCols[] = {"resp_id",  "stratum_id", "psu_id",
                                    "weight",   "sex",        "dob_cmc",
                                    "interview_cmc"};
  static const char* kSibCols[] = {"resp_id", "sib_index", "sex",
                                   "dob_cmc", "alive",     "dod_cmc"};
  for (const char* c : kRespCols)
    if (!rf.column(c))
      ld.flag(errc::missing_column, respondents_path, 0,
              std::string("missing column '") + c + "'");
  for (const char* c : kSibCols)
    if (!sf.column(c))
      ld.flag(errc::missing_column, siblings_path, 0,
              std::string("missing column '") + c + "'");
  if (!ld.issues.empty()) throw validation_error(std::move(ld.issues));

  auto rcol = [&](const char* c) { return *rf.column(c); };
  auto scol = [&](const char* c) { return *sf.column(c); };

  std::vector<respondent> respondents;
  std::unordered_map<std::string, cmc> interview_by_id;
  respondents.reserve(rf.rows.size());
  for (std::size_t r = 0; r < rf.rows.size(); ++r) {
    const auto& row = rf.rows[r];
    long rowno = static_cast<long>(r) + 1;
    respondent resp;
    resp.resp_id = row[rcol("resp_id")];
    resp.stratum_id = row[rcol("stratum_id")];
    resp.psu_id = row[rcol("psu_id")];
    if (resp.resp_id.empty()) {
      ld.flag(errc::parse_error, respondents_path, rowno, "empty resp_id");
      continue;
    }
    if (!ld.parse_double(row[rcol("weight")], resp.weight)) {
      ld.flag(errc::parse_error, respondents_path, rowno,
              "bad weight '" + row[rcol("weight")] + "'");
      continue;
    }
    auto sx = ld.parse_sex(row[rcol("sex")]);
    long long dob = 0, interview = 0;
    bool dates_ok = ld.parse_int(row[rcol("dob_cmc")], dob) &&
                    ld.parse_int(row[rcol("interview_cmc")], interview);
    if (!sx || !dates_ok) {
      ld.flag(errc::parse_error, respondents_path, rowno,
              "bad sex or date field");
      continue;
    }
    resp.resp_sex = *sx;
    resp.dob = static_cast<cmc>(dob);
    resp.interview = static_cast<cmc>(interview);

    if (resp.weight <= 0.0)
      ld.flag(errc::nonpositive_weight, respondents_path, rowno,
              "weight must be > 0, got " + row[rcol("weight")]);
    if (resp.dob >= resp.interview)
      ld.flag(errc::bad_date, respondents_path, rowno,
              "dob_cmc must precede interview_cmc");
    else {
      int age = completed_age(resp.dob, resp.interview);
      if (!frame.sex_eligible(resp.resp_sex) || age < frame.age_min ||
          age > frame.age_max)
        ld.flag(errc::frame_violation, respondents_path, rowno,
                "respondent (sex " + std::string(1, sex_code(resp.resp_sex)) +
                    ", age " + std::to_string(age) +
                    ") is outside the frame " + frame_spec_string(frame));
    }
    auto [it, inserted] = interview_by_id.emplace(resp.resp_id, resp.interview);
    if (!inserted) {
      ld.flag(errc::parse_error, respondents_path, rowno,
              "duplicate resp_id '" + resp.resp_id + "'");
      continue;
    }
    respondents.push_back(std::move(resp));
  }

  std::vector<sibling_report> siblings;
  siblings.reserve(sf.rows.size());
  std::unordered_map<std::string, std::vector<int>> seen_indices;
  for (std::size_t r = 0; r < sf.rows.size(); ++r) {
    const auto& row = sf.rows[r];
    long rowno = static_cast<long>(r) + 1;
    sibling_report sib;
    sib.resp_id = row[scol("resp_id")];
    long long idx = 0, dob = 0;
    if (!ld.parse_int(row[scol("sib_index")], idx) ||
        !ld.parse_int(row[scol("dob_cmc")], dob)) {
      ld.flag(errc::parse_error, siblings_path, rowno,
              "bad sib_index or dob_cmc");
      continue;
    }
    sib.sib_index = static_cast<int>(idx);
    sib.dob = static_cast<cmc>(dob);
    auto& seen = seen_indices[sib.resp_id];
    if (std::find(seen.begin(), seen.end(), sib.sib_index) != seen.end()) {
      ld.flag(errc::duplicate_sibling, siblings_path, rowno,
              "duplicate (resp_id, sib_index) = (" + sib.resp_id + ", " +
                  std::to_string(sib.sib_index) + ")");
      continue;
    }
    seen.push_back(sib.sib_index);
    auto sx = ld.parse_sex(row[scol("sex")]);
    if (!sx) {
      ld.flag(errc::parse_error, siblings_path, rowno,
              "bad sex '" + row[scol("sex")] + "'");
      continue;
    }
    sib.sib_sex = *sx;
    const std::string& alive_s = row[scol("alive")];
    if (alive_s != "0" && alive_s != "1") {
      ld.flag(errc::parse_error, siblings_path, rowno,
              "alive must be 0 or 1, got '" + alive_s + "'");
      continue;
    }
    sib.alive = alive_s == "1";
    const std::string& dod_s = row[scol("dod_cmc")];
    if (sib.alive) {
      if (!dod_s.empty()) {
        ld.flag(errc::bad_date, siblings_path, rowno,
                "living sibling must have blank dod_cmc");
        continue;
      }
    } else {
      long long dod = 0;
      if (dod_s.empty() || !ld.parse_int(dod_s, dod)) {
        ld.flag(errc::bad_date, siblings_path, rowno,
                "dead sibling requires a dod_cmc month");
        continue;
      }
      sib.dod = static_cast<cmc>(dod);
      if (*sib.dod < sib.dob) {
        ld.flag(errc::bad_date, siblings_path, rowno, "dod_cmc before dob_cmc");
        continue;
      }
    }

    auto owner = interview_by_id.find(sib.resp_id);
    if (owner == interview_by_id.end()) {
      ld.flag(errc::orphan_sibling, siblings_path, rowno,
              "resp_id '" + sib.resp_id + "' does not match any respondent");
      continue;
    }
    if (sib.dod && *sib.dod > owner->second) {
      ld.flag(errc::bad_date, siblings_path, rowno,
              "dod_cmc after the owner's interview month");
      continue;
    }
    if (sib.dob > owner->second) {
      ld.flag(errc::bad_date, siblings_path, rowno,
              "dob_cmc after the owner's interview month");
      continue;
    }
    siblings.push_back(std::move(sib));
  }

  if (!ld.issues.empty()) throw validation_error(std::move(ld.issues));
  return survey_dataset(frame, std::move(respondents), std::move(siblings));
}

void save_dataset(const survey_dataset& ds,
                  const std::string& respondents_path,
                  const std::string& siblings_path) {
  std::vector<std::vector<std::string>> rrows;
  for (const auto& r : ds.respondents()) {
    rrows.push_back({r.resp_id, r.stratum_id, r.psu_id,
                     csv::format_double(r.weight),
                     std::string(1, sex_code(r.resp_sex)),
                     csv::format_int(r.dob), csv::format_int(r.interview)});
  }
  csv::write_file(respondents_path,
                  {"resp_id", "stratum_id", "psu_id", "weight", "sex",
                   "dob_cmc", "interview_cmc"},
                  rrows);

  std::vector<std::vector<std::string>> srows;
  for (std::size_t i = 0; i < ds.n_respondents(); ++i) {
    for (const auto& sib : ds.roster(i)) {
      srows.push_back({sib.resp_id, csv::format_int(sib.sib_index),
                       std::string(1, sex_code(sib.sib_sex)),
                       csv::format_int(sib.dob), sib.alive ? "1" : "0",
                       sib.dod ? csv::format_int(*sib.dod) : ""});
    }
  }
  csv::write_file(siblings_path,
                  {"resp_id", "sib_index", "sex", "dob_cmc", "alive",
                   "dod_cmc"},
                  srows);
}

std::string estimator_id::name() const {
  std::string s = family == estimator_family::aggregate ? "agg" : "ind";
  s += include_respondent ? "_incl" : "_excl";
  return s;
}

std::vector<estimator_id> parse_estimator_list(const std::string& names) {
  std::vector<estimator_id> out;
  std::size_t start = 0;
  while (start <= names.size()) {
    std::size_t pos = names.find(',', start);
    std::string tok = names.substr(
        start, pos == std::string::npos ? std::string::npos : pos - start);
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t'))
      tok.erase(tok.begin());
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t'))
      tok.pop_back();
    if (!tok.empty()) {
      estimator_id id;
      if (tok == "agg_excl") id = {estimator_family::aggregate, false};
      else if (tok == "agg_incl") id = {estimator_family::aggregate, true};
      else if (tok == "ind_excl") id = {estimator_family::individual, false};
      else if (tok == "ind_incl") id = {estimator_family::individual, true};
      else
        throw error(errc::bad_argument, "unknown estimator '" + tok + "'");
      out.push_back(id);
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (out.empty())
    throw error(errc::bad_argument, "no estimators requested");
  return out;
}

}  // namespace sibsurv
