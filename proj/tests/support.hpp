#pragma once

// Shared fixtures for the test suites: temp files, small CSV datasets, and a
// deterministic seed-sibship generator for simulator-driven tests.

#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "sibsurv/data_model.hpp"
#include "sibsurv/rng.hpp"

namespace testsupport {

inline std::string temp_dir() {
  static std::string dir = [] {
    char tmpl[] = "/tmp/sibsurv_tests_XXXXXX";
    char* d = mkdtemp(tmpl);
    return std::string(d ? d : "/tmp");
  }();
  return dir;
}

inline std::string write_file(const std::string& name,
                              const std::string& content) {
  std::string path = temp_dir() + "/" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

// Census month used by the simulator fixtures (January 2000 in CMC terms).
constexpr sibsurv::cmc kCensus = 1200;

// Two respondents, five siblings; frame f15-49. Respondent r1: three
// siblings (one dead in-window); r2: two siblings.
inline std::string basic_respondents_csv() {
  return
      "resp_id,stratum_id,psu_id,weight,sex,dob_cmc,interview_cmc\n"
      "r1,s1,p1,2,f,840,1200\n"   // age 30 at interview
      "r2,s1,p2,1.5,f,960,1200\n";  // age 20
}

inline std::string basic_siblings_csv() {
  return
      "resp_id,sib_index,sex,dob_cmc,alive,dod_cmc\n"
      "r1,1,f,816,1,\n"      // sister, age 32, alive (frame member)
      "r1,2,m,852,1,\n"      // brother, age 29, alive (not frame: male)
      "r1,3,f,828,0,1180\n"  // sister died age 29, 20 months before interview
      "r2,1,f,984,1,\n"      // sister, age 18, alive (frame member)
      "r2,2,f,720,1,\n";     // sister, age 40, alive (frame member)
}

// Writes a deterministic synthetic seed-sibship file (siblings.csv schema,
// one resp_id group per sibship, respondent row included). Adult mortality
// is deliberately high so simulated cells carry plenty of deaths.
struct seed_options {
  int n_sibships = 400;
  int min_extra_members = 0;  // sibship size spans min_extra+1 ..
  int max_extra_members = 5;  // .. max_extra+1
  double death_scale = 1.0;   // multiplies the age-linked death probability
  std::uint64_t seed = 99;
};

inline std::string write_seed_sibships(const std::string& name,
                                       const seed_options& opt = {}) {
  using namespace sibsurv;
  rng r(opt.seed);
  std::string body = "resp_id,sib_index,sex,dob_cmc,alive,dod_cmc\n";
  for (int s = 0; s < opt.n_sibships; ++s) {
    int span = opt.max_extra_members - opt.min_extra_members + 1;
    int size = 1 + opt.min_extra_members +
               static_cast<int>(r.bounded(static_cast<std::uint64_t>(span)));
    // Sibling ages cluster around a sibship anchor so respondents near the
    // frame edges tend to have siblings outside the frame.
    int anchor_age = 12 + static_cast<int>(r.bounded(48));  // 12..59
    for (int m = 0; m < size; ++m) {
      int age = anchor_age + static_cast<int>(r.bounded(17)) - 8;  // +-8
      if (age < 1) age = 1;
      cmc dob = kCensus - 12 * age - static_cast<int>(r.bounded(12));
      bool female = r.bernoulli(0.5);
      double p_death =
          opt.death_scale * (0.04 + 0.005 * static_cast<double>(age));
      if (p_death > 0.9) p_death = 0.9;
      bool dead = r.bernoulli(p_death);
      cmc dod = 0;
      if (dead) {
        int life = kCensus - dob;
        dod = dob + 6 + static_cast<int>(r.bounded(
                            static_cast<std::uint64_t>(life > 6 ? life - 6
                                                                : 1)));
        if (dod > kCensus) dod = kCensus;
      }
      body += "sib" + std::to_string(s) + "," + std::to_string(m + 1) + "," +
              (female ? "f" : "m") + "," + std::to_string(dob) + "," +
              (dead ? "0" : "1") + "," +
              (dead ? std::to_string(dod) : "") + "\n";
    }
  }
  return write_file(name, body);
}

}  // namespace testsupport
