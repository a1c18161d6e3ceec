#include <doctest.h>

#include <fstream>
#include <sstream>

#include "sibsurv/data_model.hpp"
#include "support.hpp"

using namespace sibsurv;
using testsupport::write_file;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_issue(const validation_error& e, errc code, long row) {
  for (const auto& i : e.issues())
    if (i.code == code && i.row == row) return true;
  return false;
}

}  // namespace

TEST_SUITE("data_model") {

TEST_CASE("well-formed fixture loads with expected counts") {
  auto rp = write_file("dm_r.csv", testsupport::basic_respondents_csv());
  auto sp = write_file("dm_s.csv", testsupport::basic_siblings_csv());
  survey_dataset ds = load_dataset(rp, sp, parse_frame_spec("f15-49"));
  CHECK(ds.n_respondents() == 2);
  CHECK(ds.roster(ds.respondent_index("r1")).size() == 3);
  CHECK(ds.roster(ds.respondent_index("r2")).size() == 2);
  CHECK(ds.frame_sibling_count(ds.respondent_index("r1")) == 1);
  CHECK(ds.frame_sibling_count(ds.respondent_index("r2")) == 2);
}

TEST_CASE("dead sibling with blank dod is a BAD_DATE naming the row") {
  auto rp = write_file("dm_r2.csv", testsupport::basic_respondents_csv());
  auto sp = write_file("dm_s2.csv",
                       "resp_id,sib_index,sex,dob_cmc,alive,dod_cmc\n"
                       "r1,1,f,816,1,\n"
                       "r1,2,f,820,0,\n");
  try {
    load_dataset(rp, sp, parse_frame_spec("f15-49"));
    FAIL("expected validation_error");
  } catch (const validation_error& e) {
    CHECK(has_issue(e, errc::bad_date, 2));
  }
}

TEST_CASE("respondent outside the frame is rejected") {
  auto rp = write_file("dm_r3.csv",
                       "resp_id,stratum_id,psu_id,weight,sex,dob_cmc,"
                       "interview_cmc\n"
                       "r1,s1,p1,1,f,576,1200\n");  // age 52
  auto sp = write_file("dm_s3.csv",
                       "resp_id,sib_index,sex,dob_cmc,alive,dod_cmc\n");
  try {
    load_dataset(rp, sp, parse_frame_spec("f15-49"));
    FAIL("expected validation_error");
  } catch (const validation_error& e) {
    CHECK(has_issue(e, errc::frame_violation, 1));
  }
}

TEST_CASE("remaining load errors: columns, orphans, weights, dates") {
  auto rp = write_file("dm_r4.csv",
                       "resp_id,stratum_id,psu_id,weight,sex,dob_cmc,"
                       "interview_cmc\n"
                       "r1,s1,p1,0,f,840,1200\n"    // nonpositive weight
                       "r2,s1,p1,1,f,1300,1200\n"); // dob after interview
  auto sp = write_file("dm_s4.csv",
                       "resp_id,sib_index,sex,dob_cmc,alive,dod_cmc\n"
                       "rX,1,f,900,1,\n"        // orphan
                       "r1,1,f,900,0,1250\n"    // dod after interview
                       "r1,1,f,902,1,\n");      // duplicate (r1,1)
  try {
    load_dataset(rp, sp, parse_frame_spec("f15-49"));
    FAIL("expected validation_error");
  } catch (const validation_error& e) {
    CHECK(has_issue(e, errc::nonpositive_weight, 1));
    CHECK(has_issue(e, errc::bad_date, 2));
    CHECK(has_issue(e, errc::orphan_sibling, 1));
    CHECK(has_issue(e, errc::bad_date, 2));
    CHECK(has_issue(e, errc::duplicate_sibling, 3));
  }

  auto bad_cols = write_file("dm_r5.csv", "resp_id,weight\nr1,1\n");
  try {
    load_dataset(bad_cols, sp, parse_frame_spec("f15-49"));
    FAIL("expected validation_error");
  } catch (const validation_error& e) {
    CHECK(has_issue(e, errc::missing_column, 0));
  }
}

TEST_CASE("is_frame_member basics") {
  frame_definition frame = parse_frame_spec("f15-49");
  sibling_report sib;
  sib.sib_sex = sex::female;
  sib.dob = 840;  // age 30 at CMC 1200
  sib.alive = true;
  CHECK(is_frame_member(sib, frame, 1200));

  sib.alive = false;
  sib.dod = 1100;
  CHECK_FALSE(is_frame_member(sib, frame, 1200));  // deaths are never on F

  sib.alive = true;
  sib.dod.reset();
  sib.sib_sex = sex::male;
  CHECK_FALSE(is_frame_member(sib, frame, 1200));

  sib.sib_sex = sex::female;
  sib.dob = 1200 - 12 * 14;  // age 14: below the frame band
  CHECK_FALSE(is_frame_member(sib, frame, 1200));
}

TEST_CASE("save/load round-trip is byte-stable") {
  auto rp = write_file("dm_rt_r.csv", testsupport::basic_respondents_csv());
  auto sp = write_file("dm_rt_s.csv", testsupport::basic_siblings_csv());
  frame_definition frame = parse_frame_spec("f15-49");

  survey_dataset ds = load_dataset(rp, sp, frame);
  auto rp1 = testsupport::temp_dir() + "/dm_rt_r1.csv";
  auto sp1 = testsupport::temp_dir() + "/dm_rt_s1.csv";
  save_dataset(ds, rp1, sp1);

  survey_dataset ds2 = load_dataset(rp1, sp1, frame);
  auto rp2 = testsupport::temp_dir() + "/dm_rt_r2.csv";
  auto sp2 = testsupport::temp_dir() + "/dm_rt_s2.csv";
  save_dataset(ds2, rp2, sp2);

  CHECK(slurp(rp1) == slurp(rp2));
  CHECK(slurp(sp1) == slurp(sp2));
}

TEST_CASE("frame and cell spec parsing") {
  frame_definition f = parse_frame_spec("f15-49");
  CHECK(f.female_eligible);
  CHECK_FALSE(f.male_eligible);
  CHECK(f.age_min == 15);
  CHECK(f.age_max == 49);
  CHECK(frame_spec_string(f) == "f15-49");

  frame_definition fm = parse_frame_spec("fm20-60");
  CHECK(fm.female_eligible);
  CHECK(fm.male_eligible);

  CHECK_THROWS_AS(parse_frame_spec("15-49"), error);
  CHECK_THROWS_AS(parse_frame_spec("f49-15"), error);

  auto cells = make_age_sex_cells("5y", f, 0, 1200);
  CHECK(cells.size() == 14);  // 7 bands x 2 sexes
  CHECK(cells.front().label() == "f15-19");
  auto wide = make_age_sex_cells("10y:15-54", f, 0, 1200);
  CHECK(wide.size() == 8);
}

TEST_CASE("estimator id parsing") {
  auto ids = parse_estimator_list("agg_excl,ind_incl");
  REQUIRE(ids.size() == 2);
  CHECK(ids[0].family == estimator_family::aggregate);
  CHECK_FALSE(ids[0].include_respondent);
  CHECK(ids[1].family == estimator_family::individual);
  CHECK(ids[1].include_respondent);
  CHECK(ids[1].name() == "ind_incl");
  CHECK_THROWS_AS(parse_estimator_list("bogus"), error);
}

}  // TEST_SUITE
