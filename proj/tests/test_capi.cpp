#include <cstring>
#include <string>

#include "doctest.h"
#include "gamkit.h"

namespace {

const char* kMp = R"(test "mp"
init { [a]=0 [b]=0 }
thread P1 {
  St [a] 1
  St [b] 1
}
thread P2 {
  r1 = Ld [b]
  r2 = Ld [a]
}
exists (P2:r1=1 /\ P2:r2=0)
expect sc=forbidden gam0=allowed gam=allowed gam_arm=allowed
)";

std::string grab(char* s) {
  std::string out = s ? s : "";
  gk_free_string(s);
  return out;
}

struct Parsed {
  gk_program* p = nullptr;
  Parsed(const char* src) {
    char* err = nullptr;
    REQUIRE(gk_parse(src, &p, &err) == GK_OK);
    REQUIRE(err == nullptr);
  }
  ~Parsed() { gk_program_free(p); }
};

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::strlen(gk_version()) > 0);
  CHECK(std::string(gk_status_str(GK_OK)) == "ok");
  CHECK(std::strlen(gk_status_str(GK_ERR_PARSE)) > 0);
  CHECK(std::strlen(gk_status_str(GK_ERR_BUDGET)) > 0);
  CHECK(std::strlen(gk_status_str(static_cast<gk_status>(999))) > 0);
}

TEST_CASE("free functions tolerate null") {
  gk_program_free(nullptr);
  gk_options_free(nullptr);
  gk_verdict_free(nullptr);
  gk_free_string(nullptr);
}

TEST_CASE("parsing and program queries") {
  Parsed prog(kMp);
  CHECK(std::string(gk_program_name(prog.p)) == "mp");
  CHECK(gk_program_thread_count(prog.p) == 2);
  CHECK(gk_program_expectation(prog.p, GK_MODEL_SC) == 0);
  CHECK(gk_program_expectation(prog.p, GK_MODEL_GAM) == 1);
  char* src = nullptr;
  REQUIRE(gk_program_source(prog.p, &src) == GK_OK);
  CHECK(grab(src).find("St [a] 1") != std::string::npos);
}

TEST_CASE("missing expectations answer unknown") {
  Parsed prog("test \"t\"\nthread P1 { r1 = Ld [a] }\nexists (P1:r1=0)\n");
  CHECK(gk_program_expectation(prog.p, GK_MODEL_SC) == -1);
}

TEST_CASE("parse errors are reported with position") {
  gk_program* p = nullptr;
  char* err = nullptr;
  CHECK(gk_parse("not a program", &p, &err) == GK_ERR_PARSE);
  CHECK(p == nullptr);
  std::string msg = grab(err);
  CHECK(msg.find("parse error at ") != std::string::npos);
}

TEST_CASE("file loading distinguishes io from parse errors") {
  gk_program* p = nullptr;
  char* err = nullptr;
  CHECK(gk_parse_file("/nonexistent/path.litmus", &p, &err) == GK_ERR_IO);
  CHECK(grab(err).find("cannot open") != std::string::npos);
}

TEST_CASE("invalid arguments are rejected") {
  char* err = nullptr;
  CHECK(gk_parse(nullptr, nullptr, &err) == GK_ERR_INVALID_ARG);
  gk_free_string(err);
  err = nullptr;
  Parsed prog(kMp);
  CHECK(gk_check(nullptr, GK_MODEL_GAM, GK_ENGINE_AXIOMATIC, nullptr, nullptr, &err) ==
        GK_ERR_INVALID_ARG);
  gk_free_string(err);
}

TEST_CASE("checking a program under both engines") {
  Parsed prog(kMp);
  for (gk_engine engine : {GK_ENGINE_AXIOMATIC, GK_ENGINE_OPERATIONAL}) {
    gk_verdict* v = nullptr;
    char* err = nullptr;
    REQUIRE(gk_check(prog.p, GK_MODEL_GAM, engine, nullptr, &v, &err) == GK_OK);
    CHECK(gk_verdict_allowed(v) == 1);
    CHECK(gk_verdict_outcome_count(v) == 4);
    bool sawTarget = false;
    for (size_t i = 0; i < gk_verdict_outcome_count(v); ++i)
      if (std::string(gk_verdict_outcome(v, i)) == "P2:r1=1 P2:r2=0") sawTarget = true;
    CHECK(sawTarget);
    CHECK(gk_verdict_outcome(v, 99) == nullptr);
    std::string report = gk_verdict_report_json(v);
    CHECK(report.find("\"verdict\": \"allowed\"") != std::string::npos);
    CHECK(report.find("\"pass\": true") != std::string::npos);
    if (engine == GK_ENGINE_AXIOMATIC) {
      CHECK(gk_verdict_witness_json(v) != nullptr);
      CHECK(gk_verdict_stats_json(v) == nullptr);
    } else {
      CHECK(gk_verdict_witness_json(v) == nullptr);
      REQUIRE(gk_verdict_stats_json(v) != nullptr);
      CHECK(std::string(gk_verdict_stats_json(v)).find("\"states\"") !=
            std::string::npos);
    }
    gk_verdict_free(v);
  }
}

TEST_CASE("sc forbids the stale read under both engines") {
  Parsed prog(kMp);
  for (gk_engine engine : {GK_ENGINE_AXIOMATIC, GK_ENGINE_OPERATIONAL}) {
    gk_verdict* v = nullptr;
    char* err = nullptr;
    REQUIRE(gk_check(prog.p, GK_MODEL_SC, engine, nullptr, &v, &err) == GK_OK);
    CHECK(gk_verdict_allowed(v) == 0);
    gk_verdict_free(v);
  }
}

TEST_CASE("options steer budgets, traces and dumps") {
  Parsed prog(kMp);
  gk_options* o = gk_options_new();
  gk_options_set_state_budget(o, 2);
  gk_verdict* v = nullptr;
  char* err = nullptr;
  CHECK(gk_check(prog.p, GK_MODEL_GAM, GK_ENGINE_OPERATIONAL, o, &v, &err) ==
        GK_ERR_BUDGET);
  CHECK(grab(err).find("budget") != std::string::npos);

  gk_options_set_state_budget(o, 1'000'000);
  gk_options_set_trace(o, 1);
  gk_options_set_ppo_dump(o, 1);
  REQUIRE(gk_check(prog.p, GK_MODEL_GAM, GK_ENGINE_OPERATIONAL, o, &v, nullptr) == GK_OK);
  REQUIRE(gk_verdict_trace(v) != nullptr);
  CHECK(std::string(gk_verdict_trace(v)).find("Fetch") != std::string::npos);
  gk_verdict_free(v);
  v = nullptr;

  REQUIRE(gk_check(prog.p, GK_MODEL_GAM, GK_ENGINE_AXIOMATIC, o, &v, nullptr) == GK_OK);
  REQUIRE(gk_verdict_ppo_dump(v) != nullptr);
  CHECK(std::string(gk_verdict_ppo_dump(v)).find("# execution 0") != std::string::npos);
  gk_verdict_free(v);
  gk_options_free(o);
}

TEST_CASE("the machine rejects the model it cannot run") {
  Parsed prog(kMp);
  gk_verdict* v = nullptr;
  char* err = nullptr;
  CHECK(gk_check(prog.p, GK_MODEL_GAM_ARM, GK_ENGINE_OPERATIONAL, nullptr, &v, &err) ==
        GK_ERR_UNSUPPORTED);
  CHECK(!grab(err).empty());
  CHECK(v == nullptr);
}

TEST_CASE("cross-checking through the C interface") {
  Parsed prog(kMp);
  int pass = -1;
  char* json = nullptr;
  char* err = nullptr;
  REQUIRE(gk_crosscheck(prog.p, GK_MODEL_GAM, nullptr, &pass, &json, &err) == GK_OK);
  CHECK(pass == 1);
  std::string j = grab(json);
  CHECK(j.find("\"pass\": true") != std::string::npos);
  CHECK(j.find("\"axiomatic\"") != std::string::npos);

  // The unsupported model is an inconclusive report, not an error.
  REQUIRE(gk_crosscheck(prog.p, GK_MODEL_GAM_ARM, nullptr, &pass, &json, &err) == GK_OK);
  CHECK(pass == 0);
  CHECK(grab(json).find("\"inconclusive\": true") != std::string::npos);
}

TEST_CASE("the embedded corpus is reachable and green") {
  REQUIRE(gk_corpus_count() == 12);
  bool sawDekker = false;
  for (size_t i = 0; i < gk_corpus_count(); ++i) {
    REQUIRE(gk_corpus_name(i) != nullptr);
    REQUIRE(gk_corpus_source(i) != nullptr);
    if (std::string(gk_corpus_name(i)) == "dekker") sawDekker = true;
  }
  CHECK(sawDekker);
  CHECK(gk_corpus_name(99) == nullptr);

  int pass = 0;
  char* json = nullptr;
  REQUIRE(gk_run_corpus(nullptr, &pass, &json, nullptr) == GK_OK);
  CHECK(pass == 1);
  CHECK(grab(json).find("\"test\": \"corr\"") != std::string::npos);
}

TEST_CASE("generation and the generated suite") {
  gk_fuzz_bounds b;
  gk_fuzz_bounds_default(&b);
  CHECK(b.seed == 1);
  CHECK(b.max_threads == 3);
  CHECK(b.mem_instance_bound == 10);

  b.seed = 42;
  char* t1 = nullptr;
  char* t2 = nullptr;
  REQUIRE(gk_fuzz_program(&b, &t1, nullptr) == GK_OK);
  REQUIRE(gk_fuzz_program(&b, &t2, nullptr) == GK_OK);
  std::string s1 = grab(t1), s2 = grab(t2);
  CHECK(s1 == s2);
  CHECK(s1.find("test ") == 0);

  gk_options* o = gk_options_new();
  gk_options_set_state_budget(o, 300'000);
  int pass = 0;
  char* json = nullptr;
  REQUIRE(gk_run_fuzz_suite(&b, 5, o, &pass, &json, nullptr) == GK_OK);
  CHECK(pass == 1);
  std::string j = grab(json);
  CHECK(j.find("\"conclusive_cases\": 5") != std::string::npos);
  gk_options_free(o);
}
