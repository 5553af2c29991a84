#pragma once

#include <vector>

#include "deps.hpp"
#include "exec.hpp"

namespace gam {

// Enumerates every value-consistent candidate execution: all committed
// control paths, all assignments of each load to a same-address store or
// to initial memory, with register values propagated to a fixpoint.
// Assignments whose propagated values contradict an address, a read
// value, or a committed branch decision are dropped. Throws BudgetError
// when the program can commit more memory instances than `memBound`.
std::vector<CandidateExecution> enumerate_executions(const Program& p, int memBound);

// Re-derives every resolved fact of `e` from scratch (register flow,
// addresses, store data, branch decisions, read values, path shape) and
// reports whether the recorded facts are self-consistent.
bool verify_execution(const CandidateExecution& e);

// Order axiom: every ppo pair whose two endpoints are memory
// instructions appears in the same order in mo. Pairs induced through
// fences or register ops arrive via the transitive closure inside `ppo`.
bool check_inst_order(const CandidateExecution& e, const MemoryOrder& mo, const Ppo& ppo);

// Value axiom: each load reads the mo-latest same-address store among
// those mo-before it or (unless scRule) program-order-before it; with no
// such store it reads the initialization store.
bool check_load_value(const CandidateExecution& e, const MemoryOrder& mo, bool scRule);

// Full decision procedure: enumerate executions, search memory orders
// with ppo/value pruning, collect the outcome set, and report whether
// the program's target outcome is reachable (with a witness when it is).
Verdict allowed_axiomatic(const Program& p, const ModelConfig& cfg,
                          const EngineOptions& opt = {});

// All memory instances of an execution in (thread, path position) order.
std::vector<MoEntry> memory_instances(const CandidateExecution& e);
// Initialization entries (one per touched address, ascending).
std::vector<MoEntry> init_entries(const CandidateExecution& e);

Outcome register_outcome(const CandidateExecution& e, const OutcomeSpec& spec);
Outcome full_outcome(const CandidateExecution& e, const OutcomeSpec& spec,
                     const MemoryOrder& mo);

Witness make_witness(const CandidateExecution& e, const MemoryOrder& mo);

}  // namespace gam
