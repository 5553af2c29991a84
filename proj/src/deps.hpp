#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "exec.hpp"
#include "model.hpp"

namespace gam {

// Register footprints. The program counter is not modeled as a register,
// so branches contribute only their condition register.
std::set<std::string> read_set(const Instruction& i);       // sources
std::set<std::string> write_set(const Instruction& i);      // destinations
std::set<std::string> addr_read_set(const Instruction& i);  // address sources

// Single-step dependencies between committed instances of one thread
// (path positions i < j). A register carries the dependency only when no
// instance between the two also writes it.
bool ddep(const CandidateExecution& e, int t, int i, int j);
bool adep(const CandidateExecution& e, int t, int i, int j);

// Preserved program order of one execution. Per thread a dense matrix
// over path positions; the stored byte is the first rule case that
// established the pair (9 = closure only, 10 = total order over memory
// instructions under sc).
struct Ppo {
  std::vector<int> n;                        // path length per thread
  std::vector<std::vector<std::uint8_t>> m;  // [t][i*n+j]
  bool has(int t, int i, int j) const { return m[t][i * n[t] + j] != 0; }
  std::uint8_t rule_case(int t, int i, int j) const { return m[t][i * n[t] + j]; }
};

Ppo build_ppo(const CandidateExecution& e, const ModelConfig& cfg);

// Debug listing, one line per pair: "P2:1 < P2:2 (case 3)".
std::string dump_ppo(const CandidateExecution& e, const Ppo& ppo);

}  // namespace gam
