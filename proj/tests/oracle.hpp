#pragma once
// Slow reference implementations used only by tests. Each one answers a
// question the engines also answer, by a deliberately different and
// simpler method, so agreement is meaningful.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "axiomatic.hpp"
#include "deps.hpp"
#include "exec.hpp"
#include "litmus.hpp"
#include "model.hpp"

namespace gam::test {

// Direct interpretation of a single-thread program: registers start at
// zero, memory at its initial image, instructions run in order, branches
// follow their real decision. The unique final outcome.
inline Outcome sequential_outcome(const Program& p) {
  const OutcomeSpec spec = OutcomeSpec::from(p);
  std::map<std::string, std::int64_t> regs;
  std::map<std::int64_t, std::int64_t> mem;
  auto regValue = [&](const std::string& r) {
    auto it = regs.find(r);
    return it == regs.end() ? 0 : it->second;
  };
  auto memValue = [&](std::int64_t a) {
    auto it = mem.find(a);
    return it == mem.end() ? p.initial_memory(a) : it->second;
  };
  const Thread& th = p.threads.at(0);
  int pc = 0;
  while (pc < static_cast<int>(th.instrs.size())) {
    const Instruction& ins = th.instrs[pc];
    switch (ins.op) {
      case Op::Load:
        regs[ins.dest] = memValue(eval_expr(ins.addr, p, regValue));
        break;
      case Op::Store:
        mem[eval_expr(ins.addr, p, regValue)] = eval_expr(ins.data, p, regValue);
        break;
      case Op::RegOp:
        regs[ins.dest] = eval_expr(ins.data, p, regValue);
        break;
      case Op::Branch: {
        const bool nz = regValue(ins.branchReg) != 0;
        const bool taken = ins.branchKind == BranchKind::Bnez ? nz : !nz;
        pc = taken ? ins.branchTarget : pc + 1;
        continue;
      }
      case Op::Fence:
        break;
    }
    ++pc;
  }
  Outcome o;
  for (const auto& [tr, reg] : spec.regs)
    o.regs.push_back({{tr, reg}, tr == 0 ? regValue(reg) : 0});
  for (const auto& label : spec.memLabels)
    o.mem.push_back({label, memValue(p.addrOf.at(label))});
  return o;
}

// Every final outcome reachable by interleaving whole instructions, one
// thread stepping at a time against a single shared memory. Independent
// of both engines' sc handling.
inline std::set<Outcome> sc_interleavings(const Program& p) {
  const OutcomeSpec spec = OutcomeSpec::from(p);
  struct State {
    std::vector<int> pcs;
    std::vector<std::map<std::string, std::int64_t>> regs;
    std::map<std::int64_t, std::int64_t> mem;
  };
  auto encode = [&](const State& s) {
    std::string k;
    for (size_t t = 0; t < s.pcs.size(); ++t) {
      k += std::to_string(s.pcs[t]) + ":";
      for (const auto& [r, v] : s.regs[t]) k += r + "=" + std::to_string(v) + ",";
      k += ";";
    }
    for (const auto& [a, v] : s.mem) k += std::to_string(a) + "=" + std::to_string(v) + "|";
    return k;
  };
  std::set<Outcome> out;
  std::set<std::string> seen;
  std::vector<State> stack;
  State init;
  init.pcs.assign(p.threads.size(), 0);
  init.regs.resize(p.threads.size());
  stack.push_back(init);
  seen.insert(encode(init));
  while (!stack.empty()) {
    State s = std::move(stack.back());
    stack.pop_back();
    bool quiescent = true;
    for (size_t t = 0; t < p.threads.size(); ++t) {
      const Thread& th = p.threads[t];
      if (s.pcs[t] >= static_cast<int>(th.instrs.size())) continue;
      quiescent = false;
      State n = s;
      const Instruction& ins = th.instrs[s.pcs[t]];
      auto regValue = [&](const std::string& r) {
        auto it = n.regs[t].find(r);
        return it == n.regs[t].end() ? 0 : it->second;
      };
      switch (ins.op) {
        case Op::Load: {
          std::int64_t a = eval_expr(ins.addr, p, regValue);
          auto it = n.mem.find(a);
          n.regs[t][ins.dest] = it == n.mem.end() ? p.initial_memory(a) : it->second;
          n.pcs[t]++;
          break;
        }
        case Op::Store:
          n.mem[eval_expr(ins.addr, p, regValue)] = eval_expr(ins.data, p, regValue);
          n.pcs[t]++;
          break;
        case Op::RegOp:
          n.regs[t][ins.dest] = eval_expr(ins.data, p, regValue);
          n.pcs[t]++;
          break;
        case Op::Branch: {
          const bool nz = regValue(ins.branchReg) != 0;
          const bool taken = ins.branchKind == BranchKind::Bnez ? nz : !nz;
          n.pcs[t] = taken ? ins.branchTarget : n.pcs[t] + 1;
          break;
        }
        case Op::Fence:
          n.pcs[t]++;
          break;
      }
      if (seen.insert(encode(n)).second) stack.push_back(std::move(n));
    }
    if (quiescent) {
      Outcome o;
      for (const auto& [tr, reg] : spec.regs) {
        auto it = s.regs[tr].find(reg);
        o.regs.push_back({{tr, reg}, it == s.regs[tr].end() ? 0 : it->second});
      }
      for (const auto& label : spec.memLabels) {
        std::int64_t a = p.addrOf.at(label);
        auto it = s.mem.find(a);
        o.mem.push_back({label, it == s.mem.end() ? p.initial_memory(a) : it->second});
      }
      out.insert(o);
    }
  }
  return out;
}

// Blind generate-and-test decision: every candidate execution, then
// every permutation of its memory instances appended to the fixed
// initialization prefix, each checked directly against the two axioms.
// Exponential, so callers keep memory instance counts small.
inline std::set<Outcome> blind_outcomes(const Program& p, Model m, int memBound = 8) {
  const ModelConfig cfg = ModelConfig::for_model(m);
  const OutcomeSpec spec = OutcomeSpec::from(p);
  std::set<Outcome> out;
  for (const CandidateExecution& e : enumerate_executions(p, memBound)) {
    const Ppo ppo = build_ppo(e, cfg);
    const MemoryOrder inits = init_entries(e);
    const std::vector<MoEntry> mems = memory_instances(e);
    std::vector<int> idx(mems.size());
    std::iota(idx.begin(), idx.end(), 0);
    do {
      MemoryOrder mo = inits;
      for (int k : idx) mo.push_back(mems[k]);
      if (!check_inst_order(e, mo, ppo)) continue;
      if (!check_load_value(e, mo, cfg.scTotalOrder)) continue;
      out.insert(spec.mentions_memory() ? full_outcome(e, spec, mo)
                                        : register_outcome(e, spec));
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
  return out;
}

// Total memory instances the axiomatic enumeration has to place (the
// worst committed path per thread).
inline int memory_instance_bound(const Program& p, int memBound = 64) {
  int worst = 0;
  for (const CandidateExecution& e : enumerate_executions(p, memBound)) {
    int n = 0;
    for (size_t t = 0; t < e.paths.size(); ++t)
      for (size_t i = 0; i < e.paths[t].size(); ++i)
        if (e.is_memory(static_cast<int>(t), static_cast<int>(i))) ++n;
    worst = std::max(worst, n);
  }
  return worst;
}

inline Program parse_resolved(const std::string& src) {
  return resolve_addresses(parse_litmus(src));
}

}  // namespace gam::test
