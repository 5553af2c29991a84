#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "litmus.hpp"

namespace gam {

// One step of a thread's committed control path.
struct PathStep {
  int progIndex = 0;
  bool branchTaken = false;  // meaningful when the instruction is a branch
  bool operator==(const PathStep&) const = default;
};

using ThreadPath = std::vector<PathStep>;

// Where a load reads from: the implicit initialization store of its own
// address, or a store instance identified by (thread, path position).
struct RfSource {
  bool fromInit = true;
  int thread = -1;
  int pathPos = -1;
  auto operator<=>(const RfSource&) const = default;
};

// Resolved facts about one committed instruction instance.
struct InstInfo {
  bool hasValue = false;
  std::int64_t value = 0;  // load result / register-op result
  bool hasAddr = false;
  std::int64_t addr = 0;   // memory instructions
  bool hasData = false;
  std::int64_t data = 0;   // store data
};

struct CandidateExecution {
  const Program* prog = nullptr;
  std::vector<ThreadPath> paths;               // per thread
  std::vector<std::vector<InstInfo>> info;     // [thread][path position]
  std::map<std::pair<int, int>, RfSource> rf;  // load (thread, pos) -> source

  const Instruction& instr(int t, int pos) const {
    return prog->threads[t].instrs[paths[t][pos].progIndex];
  }
  int prog_index(int t, int pos) const { return paths[t][pos].progIndex; }
  bool is_memory(int t, int pos) const { return instr(t, pos).is_memory(); }
  // "P2:1" style instance name using the program-order index.
  std::string inst_name(int t, int pos) const;
  // Value of `reg` as seen after the whole path ran: result of the
  // youngest writer on the path, or 0 if never written.
  std::int64_t final_reg(int t, const std::string& reg) const;
};

// Entry of a memory order: an initialization store for one address, or a
// committed load/store instance.
struct MoEntry {
  bool isInit = false;
  std::int64_t addr = 0;  // used by init entries
  int thread = -1;
  int pathPos = -1;
  bool operator==(const MoEntry&) const = default;
};

using MemoryOrder = std::vector<MoEntry>;

// Projection of a finished execution onto the program condition: the
// final values of every condition-referenced register, plus final memory
// for every condition-referenced address label.
struct Outcome {
  std::vector<std::pair<std::pair<int, std::string>, std::int64_t>> regs;
  std::vector<std::pair<std::string, std::int64_t>> mem;
  auto operator<=>(const Outcome&) const = default;
  std::string str(const Program& p) const;  // "P1:r1=0 P2:r2=1 [a]=2"
};

// Which registers / labels an outcome must report, derived once per program.
struct OutcomeSpec {
  std::vector<std::pair<int, std::string>> regs;  // (thread index, register)
  std::vector<std::string> memLabels;
  static OutcomeSpec from(const Program& p);
  bool mentions_memory() const { return !memLabels.empty(); }
};

// True when `o` matches the program's target: the exists-condition holds,
// or (for forall) the condition is violated.
bool satisfies_target(const Program& p, const Outcome& o);

// Serialized witness of one allowed execution.
struct Witness {
  std::vector<std::pair<std::string, std::string>> rfPairs;  // load, source
  std::vector<std::string> mo;                               // entry names
};

struct ExploreStats {
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  std::uint64_t branchKills = 0;
  std::uint64_t memaddrKills = 0;
};

struct Verdict {
  Model model = Model::Gam;
  bool allowed = false;
  std::set<Outcome> outcomes;
  std::optional<Witness> witness;      // axiomatic, when allowed
  std::optional<ExploreStats> stats;   // operational
  std::string trace;                   // operational witness trace
  std::string ppoDump;                 // axiomatic debug dump
};

struct EngineOptions {
  int memBound = 10;                       // axiomatic enumeration bound
  std::uint64_t stateBudget = 5'000'000;   // operational state budget
  bool wantTrace = false;
  bool wantPpoDump = false;
  unsigned orderSeed = 0;   // shuffles transition enumeration (tests)
  bool validate = false;    // machine invariant checks (tests)
};

}  // namespace gam
