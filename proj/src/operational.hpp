#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "exec.hpp"
#include "model.hpp"

namespace gam {

struct RobEntry {
  int progIndex = 0;  // doubles as the fetch PC
  bool done = false;
  std::int64_t result = 0;
  bool addrAvail = false;
  std::int64_t addr = 0;
  bool dataAvail = false;
  std::int64_t data = 0;
  int predictedTarget = -1;  // branches only
};

struct ProcState {
  int pc = 0;
  std::vector<RobEntry> rob;
};

struct MachineState {
  std::vector<ProcState> procs;
  // Deviations from initial memory only, so states that rewrote the
  // initial value collapse with states that never wrote.
  std::map<std::int64_t, std::int64_t> memDelta;

  std::int64_t mem_read(const Program& p, std::int64_t addr) const;
  void mem_write(const Program& p, std::int64_t addr, std::int64_t v);
  std::string encode() const;  // canonical key for the visited set
};

enum class Rule {
  Fetch,
  ExecRegToReg,
  ExecBranch,
  ExecFence,
  ExecLoad,
  ComputeStoreData,
  ExecStore,
  ComputeMemAddr,
  ScCommit,  // sc only: fetch + execute the next instruction atomically
};

const char* to_string(Rule r);

struct Transition {
  int proc = 0;
  Rule rule = Rule::Fetch;
  int robIndex = -1;
  int predictedTarget = -1;  // Fetch of a branch
};

MachineState initial_state(const Program& p);

// Guard evaluation. Transitions that would be no-ops (a load stalled on
// an older same-address access) are still listed; applying them leaves
// the state unchanged.
std::vector<Transition> enabled_transitions(const MachineState& s, const Program& p,
                                            const ModelConfig& cfg);

struct ApplyResult {
  bool changed = false;
  int branchKills = 0;    // mispredicted branch squashes
  int memaddrKills = 0;   // address-resolution squashes
  std::string desc;       // one-line trace text (filled when requested)
};

ApplyResult apply_transition(MachineState& s, const Program& p, const ModelConfig& cfg,
                             const Transition& t, bool wantDesc = false);

struct ExploreResult {
  bool allowed = false;
  std::set<Outcome> outcomes;
  ExploreStats stats;
  std::string trace;  // transition lines reaching a target final state
};

// Exhaustive state-space exploration with deduplication. Throws
// BudgetError past the state budget and UnsupportedError for models
// without a machine (gam_arm).
ExploreResult explore(const Program& p, const ModelConfig& cfg,
                      const EngineOptions& opt = {});

Verdict explore_verdict(const Program& p, const ModelConfig& cfg,
                        const EngineOptions& opt = {});

}  // namespace gam
