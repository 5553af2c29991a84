#include <set>
#include <string>
#include <vector>

#include "axiomatic.hpp"
#include "doctest.h"
#include "harness.hpp"
#include "litmus.hpp"
#include "operational.hpp"
#include "oracle.hpp"

using namespace gam;
using gam::test::parse_resolved;
using gam::test::sc_interleavings;
using gam::test::sequential_outcome;

namespace {

const ModelConfig kGam = ModelConfig::for_model(Model::Gam);
const ModelConfig kGam0 = ModelConfig::for_model(Model::Gam0);
const ModelConfig kSc = ModelConfig::for_model(Model::Sc);

// The unique transition of the given shape, or fails the test.
Transition pick(const std::vector<Transition>& ts, int proc, Rule rule,
                int robIndex = -1) {
  const Transition* found = nullptr;
  int hits = 0;
  for (const auto& t : ts)
    if (t.proc == proc && t.rule == rule &&
        (robIndex < 0 || t.robIndex == robIndex)) {
      found = &t;
      ++hits;
    }
  REQUIRE_MESSAGE(hits == 1, "expected exactly one matching transition, got " << hits);
  return *found;
}

bool has_rule(const std::vector<Transition>& ts, Rule r) {
  for (const auto& t : ts)
    if (t.rule == r) return true;
  return false;
}

}  // namespace

TEST_CASE("store forwarding in the reorder buffer, step by step") {
  Program p = parse_resolved(R"(test "fwd"
thread P1 {
  St [a] 1
  r1 = Ld [a]
}
exists (P1:r1=1)
)");
  MachineState s = initial_state(p);
  REQUIRE(s.procs.size() == 1);
  CHECK(s.procs[0].pc == 0);
  CHECK(s.procs[0].rob.empty());

  auto step = [&](Rule r, int rob) {
    Transition t = pick(enabled_transitions(s, p, kGam), 0, r, rob);
    return apply_transition(s, p, kGam, t, true);
  };

  step(Rule::Fetch, -1);
  step(Rule::Fetch, -1);
  REQUIRE(s.procs[0].rob.size() == 2);
  CHECK(s.procs[0].pc == 2);

  step(Rule::ComputeMemAddr, 0);
  CHECK(s.procs[0].rob[0].addrAvail);
  CHECK(s.procs[0].rob[0].addr == 0x100);

  step(Rule::ComputeMemAddr, 1);

  // The load sits behind a same-address store with no data yet: the
  // transition exists but changes nothing.
  ApplyResult stalled = step(Rule::ExecLoad, 1);
  CHECK_FALSE(stalled.changed);
  CHECK(stalled.desc.find("stall on rob[0]") != std::string::npos);

  step(Rule::ComputeStoreData, 0);
  ApplyResult fwd = step(Rule::ExecLoad, 1);
  CHECK(fwd.changed);
  CHECK(fwd.desc.find("forward rob[0] value 1") != std::string::npos);
  CHECK(s.procs[0].rob[1].done);
  CHECK(s.procs[0].rob[1].result == 1);
  CHECK(s.memDelta.empty());  // nothing performed in memory yet

  ApplyResult st = step(Rule::ExecStore, 0);
  CHECK(st.desc.find("m[0x100]=1") != std::string::npos);
  CHECK(s.memDelta.at(0x100) == 1);
  CHECK(enabled_transitions(s, p, kGam).empty());
}

TEST_CASE("loads may bypass unresolved older loads, then get squashed") {
  Program p = parse_resolved(R"(test "bypass"
thread P1 {
  r1 = Ld [a]
  r2 = Ld [b + r1 - r1]
  r3 = Ld [b]
}
exists (P1:r3=0)
)");
  // Address of the middle load needs r1; the youngest load has a ready
  // address and may execute first. When the middle one resolves to the
  // same location, the refined model discards the early result.
  ExploreResult gam = explore(p, kGam);
  CHECK(gam.stats.memaddrKills > 0);
  ExploreResult gam0 = explore(p, kGam0);
  CHECK(gam0.stats.memaddrKills == 0);
  CHECK(gam.outcomes == gam0.outcomes);  // single thread, same final values
}

TEST_CASE("mispredicted branches squash younger work") {
  Program p = parse_resolved(R"(test "mispredict"
thread P1 {
  St [b] 1
}
thread P2 {
  r1 = Ld [b]
  bnez r1, end
  St [c] 1
end:
}
exists (P2:r1=1)
)");
  ExploreResult r = explore(p, kGam);
  CHECK(r.stats.branchKills > 0);
}

TEST_CASE("a branch to the next instruction fetches only one way") {
  Program p = parse_resolved(R"(test "nextbr"
thread P1 {
  bnez r1, next
next:
  St [a] 1
}
exists ([a]=1)
)");
  MachineState s = initial_state(p);
  auto ts = enabled_transitions(s, p, kGam);
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].rule == Rule::Fetch);
  CHECK(ts[0].predictedTarget == 1);
}

TEST_CASE("a real branch fetches both predictions") {
  Program p = parse_resolved(R"(test "twoway"
thread P1 {
  bnez r1, end
  St [a] 1
end:
}
exists ([a]=1)
)");
  MachineState s = initial_state(p);
  auto ts = enabled_transitions(s, p, kGam);
  REQUIRE(ts.size() == 2);
  std::set<int> targets = {ts[0].predictedTarget, ts[1].predictedTarget};
  CHECK(targets == std::set<int>{1, 2});
}

TEST_CASE("interleaving mode commits whole instructions in order") {
  Program p = parse_resolved(R"(test "mp"
init { [a]=0 [b]=0 }
thread P1 { St [a] 1 ; St [b] 1 }
thread P2 { r1 = Ld [b] ; r2 = Ld [a] }
exists (P2:r1=1 /\ P2:r2=0)
)");
  MachineState s = initial_state(p);
  auto ts = enabled_transitions(s, p, kSc);
  REQUIRE(ts.size() == 2);
  CHECK(ts[0].rule == Rule::ScCommit);
  CHECK(ts[1].rule == Rule::ScCommit);
  ApplyResult r = apply_transition(s, p, kSc, ts[0], true);
  CHECK(r.changed);
  CHECK(r.desc.find("P1 ScCommit instr 0 (St)") != std::string::npos);
  CHECK(s.procs[0].pc == 1);
  CHECK(s.memDelta.at(0x100) == 1);
}

TEST_CASE("single-thread programs land on the sequential outcome") {
  const char* sources[] = {
      R"(test "seq1"
init { [a]=3 }
thread P1 {
  r1 = Ld [a]
  St [a] r1 + 1
  r2 = Ld [a]
  St [b] r2
  r3 = Ld [b]
}
exists (P1:r1=3 /\ P1:r2=4 /\ P1:r3=4)
)",
      R"(test "seq2"
thread P1 {
  r1 = 2
  beqz r1, skip
  St [a] r1
skip:
  r2 = Ld [a]
  bnez r2, end
  St [a] 9
end:
}
exists (P1:r2=2)
)",
  };
  for (const char* src : sources) {
    Program p = parse_resolved(src);
    Outcome want = sequential_outcome(p);
    for (const ModelConfig* cfg : {&kSc, &kGam0, &kGam}) {
      ExploreResult r = explore(p, *cfg);
      CHECK(r.outcomes == std::set<Outcome>{want});
    }
  }
}

TEST_CASE("interleaving mode matches a direct interleaving interpreter") {
  for (const auto& entry : corpus()) {
    ExploreResult r = explore(entry.program, kSc);
    CHECK(r.outcomes == sc_interleavings(entry.program));
  }
  // Branches interleaved with another thread's stores.
  Program p = parse_resolved(R"(test "br-race"
init { [a]=0 }
thread P1 { St [a] 1 }
thread P2 {
  r1 = Ld [a]
  bnez r1, end
  St [b] 5
end:
  r2 = Ld [b]
}
exists (P2:r1=0 /\ P2:r2=5)
)");
  CHECK(explore(p, kSc).outcomes == sc_interleavings(p));
}

TEST_CASE("exploration statistics ignore transition order") {
  Program p = parse_resolved(R"(test "race"
init { [a]=0 [b]=0 }
thread P1 { St [a] 1 ; r1 = Ld [b] }
thread P2 { St [b] 1 ; r2 = Ld [a] }
exists (P1:r1=0 /\ P2:r2=0)
)");
  EngineOptions a, b, c;
  a.orderSeed = 0;
  b.orderSeed = 1;
  c.orderSeed = 99;
  ExploreResult ra = explore(p, kGam, a);
  ExploreResult rb = explore(p, kGam, b);
  ExploreResult rc = explore(p, kGam, c);
  CHECK(ra.outcomes == rb.outcomes);
  CHECK(ra.outcomes == rc.outcomes);
  CHECK(ra.stats.states == rb.stats.states);
  CHECK(ra.stats.transitions == rb.stats.transitions);
  CHECK(ra.stats.branchKills == rb.stats.branchKills);
  CHECK(ra.stats.memaddrKills == rb.stats.memaddrKills);
  CHECK(ra.stats.states == rc.stats.states);
  CHECK(ra.stats.transitions == rc.stats.transitions);
}

TEST_CASE("the state budget stops runaway exploration") {
  Program p = corpus()[0].program;
  EngineOptions opt;
  opt.stateBudget = 3;
  try {
    explore(p, kGam, opt);
    FAIL_CHECK("expected a budget error");
  } catch (const BudgetError& e) {
    CHECK(e.kind == BudgetError::Kind::States);
    CHECK(e.limit == 3);
  }
}

TEST_CASE("the machine refuses the model it cannot run") {
  Program p = corpus()[0].program;
  CHECK_THROWS_AS(explore(p, ModelConfig::for_model(Model::GamArm)),
                  UnsupportedError);
}

TEST_CASE("machine invariants hold across the corpus") {
  EngineOptions opt;
  opt.validate = true;
  for (const auto& entry : corpus())
    for (Model m : {Model::Sc, Model::Gam0, Model::Gam})
      CHECK_NOTHROW(explore(entry.program, ModelConfig::for_model(m), opt));
}

TEST_CASE("writing the initial value back collapses states") {
  Program p = parse_resolved(R"(test "silent"
init { [a]=7 }
thread P1 { St [a] 7 }
exists ([a]=7)
)");
  MachineState s = initial_state(p);
  std::string before = s.encode();
  s.mem_write(p, 0x100, 7);
  CHECK(s.memDelta.empty());
  CHECK(s.encode() == before);
  s.mem_write(p, 0x100, 8);
  CHECK(s.memDelta.at(0x100) == 8);
  CHECK(s.mem_read(p, 0x100) == 8);
  s.mem_write(p, 0x100, 7);
  CHECK(s.memDelta.empty());
}

TEST_CASE("a trace is produced for reachable targets") {
  Program p = parse_resolved(R"(test "mp"
init { [a]=0 [b]=0 }
thread P1 { St [a] 1 ; St [b] 1 }
thread P2 { r1 = Ld [b] ; r2 = Ld [a] }
exists (P2:r1=1 /\ P2:r2=0)
)");
  EngineOptions opt;
  opt.wantTrace = true;
  ExploreResult r = explore(p, kGam, opt);
  CHECK(r.allowed);
  CHECK(!r.trace.empty());
  CHECK(r.trace.find("Fetch") != std::string::npos);
  ExploreResult sc = explore(p, kSc, opt);
  CHECK_FALSE(sc.allowed);
  CHECK(sc.trace.empty());
}

TEST_CASE("machine verdicts agree with the frozen corpus expectations") {
  for (const auto& entry : corpus()) {
    for (Model m : {Model::Sc, Model::Gam0, Model::Gam}) {
      Verdict v = explore_verdict(entry.program, ModelConfig::for_model(m));
      CHECK_MESSAGE(v.allowed == entry.expect.at(m),
                    entry.name << " under " << to_string(m));
      REQUIRE(v.stats.has_value());
      CHECK(v.stats->states > 0);
    }
  }
}
