#include "operational.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <random>
#include <sstream>

namespace gam {

const char* to_string(Rule r) {
  switch (r) {
    case Rule::Fetch: return "Fetch";
    case Rule::ExecRegToReg: return "ExecRegToReg";
    case Rule::ExecBranch: return "ExecBranch";
    case Rule::ExecFence: return "ExecFence";
    case Rule::ExecLoad: return "ExecLoad";
    case Rule::ComputeStoreData: return "ComputeStoreData";
    case Rule::ExecStore: return "ExecStore";
    case Rule::ComputeMemAddr: return "ComputeMemAddr";
    case Rule::ScCommit: return "ScCommit";
  }
  return "?";
}

std::int64_t MachineState::mem_read(const Program& p, std::int64_t addr) const {
  auto it = memDelta.find(addr);
  if (it != memDelta.end()) return it->second;
  return p.initial_memory(addr);
}

void MachineState::mem_write(const Program& p, std::int64_t addr, std::int64_t v) {
  if (p.initial_memory(addr) == v)
    memDelta.erase(addr);
  else
    memDelta[addr] = v;
}

std::string MachineState::encode() const {
  std::ostringstream os;
  for (const auto& pr : procs) {
    os << "P" << pr.pc << ";";
    for (const auto& e : pr.rob)
      os << e.progIndex << "," << e.done << "," << e.result << "," << e.addrAvail
         << "," << e.addr << "," << e.dataAvail << "," << e.data << ","
         << e.predictedTarget << "|";
    os << "/";
  }
  os << "M";
  for (const auto& [a, v] : memDelta) os << a << "=" << v << ";";
  return os.str();
}

MachineState initial_state(const Program& p) {
  MachineState s;
  s.procs.resize(p.threads.size());
  return s;
}

namespace {

const Instruction& instr_of(const Program& p, int proc, const RobEntry& e) {
  return p.threads[proc].instrs[e.progIndex];
}

bool writes_reg(const Instruction& i, const std::string& r) {
  return (i.op == Op::Load || i.op == Op::RegOp) && i.dest == r;
}

// Register value visible to rob[idx]: the youngest older writer's result
// once that writer is done; 0 when no writer exists in flight.
std::optional<std::int64_t> reg_read(const Program& p, int proc,
                                     const std::vector<RobEntry>& rob, int idx,
                                     const std::string& r) {
  for (int k = idx - 1; k >= 0; --k) {
    const Instruction& ins = instr_of(p, proc, rob[k]);
    if (!writes_reg(ins, r)) continue;
    if (!rob[k].done) return std::nullopt;
    return rob[k].result;
  }
  return 0;
}

std::optional<std::int64_t> eval_at(const Program& p, int proc,
                                    const std::vector<RobEntry>& rob, int idx,
                                    const Expr& ex) {
  bool known = true;
  std::int64_t v = eval_expr(ex, p, [&](const std::string& r) -> std::int64_t {
    auto rv = reg_read(p, proc, rob, idx, r);
    if (!rv) {
      known = false;
      return 0;
    }
    return *rv;
  });
  if (!known) return std::nullopt;
  return v;
}

bool older_fences_done(const Program& p, int proc, const std::vector<RobEntry>& rob,
                       int idx, FenceClass target) {
  for (int k = 0; k < idx; ++k) {
    const Instruction& ins = instr_of(p, proc, rob[k]);
    if (ins.op == Op::Fence && ins.fenceTo == target && !rob[k].done) return false;
  }
  return true;
}

// What an executing load would do right now.
struct LoadCase {
  enum class Kind { Stall, Forward, Memory } kind = Kind::Memory;
  int fromRob = -1;
  std::int64_t value = 0;
};

LoadCase load_case(const Program& p, const ModelConfig& cfg, int proc,
                   const std::vector<RobEntry>& rob, int idx) {
  const std::int64_t a = rob[idx].addr;
  for (int k = idx - 1; k >= 0; --k) {
    const RobEntry& e = rob[k];
    const Instruction& ins = instr_of(p, proc, e);
    if (!ins.is_memory() || !e.addrAvail || e.addr != a) continue;
    if (ins.op == Op::Store) {
      if (e.done) break;  // value already in memory
      if (e.dataAvail) return {LoadCase::Kind::Forward, k, e.data};
      return {LoadCase::Kind::Stall, k, 0};
    }
    // Older same-address load. Ordered flavors wait for pending ones; a
    // done load never ends the search, because an older pending store it
    // forwarded from must still be found.
    if (!e.done && cfg.ldld != LdLdRule::None)
      return {LoadCase::Kind::Stall, k, 0};
  }
  return {LoadCase::Kind::Memory, -1, 0};
}

bool load_ready(const Program& p, int proc, const std::vector<RobEntry>& rob,
                int idx) {
  return !rob[idx].done && rob[idx].addrAvail &&
         older_fences_done(p, proc, rob, idx, FenceClass::L);
}

bool store_ready(const Program& p, int proc, const std::vector<RobEntry>& rob,
                 int idx) {
  const RobEntry& st = rob[idx];
  if (st.done || !st.addrAvail || !st.dataAvail) return false;
  if (!older_fences_done(p, proc, rob, idx, FenceClass::S)) return false;
  for (int k = 0; k < idx; ++k) {
    const RobEntry& e = rob[k];
    const Instruction& ins = instr_of(p, proc, e);
    if (ins.op == Op::Branch && !e.done) return false;
    if (ins.is_memory()) {
      if (!e.addrAvail) return false;
      if (e.addr == st.addr && !e.done) return false;
    }
  }
  return true;
}

std::string pname(const Program& p, int proc) { return p.threads[proc].name; }

std::string hex_addr(std::int64_t a) {
  std::ostringstream os;
  os << "0x" << std::hex << a;
  return os.str();
}

const char* op_mnemonic(const Instruction& i) {
  switch (i.op) {
    case Op::Load: return "Ld";
    case Op::Store: return "St";
    case Op::RegOp: return "RegOp";
    case Op::Branch: return "Branch";
    case Op::Fence: return "Fence";
  }
  return "?";
}

}  // namespace

std::vector<Transition> enabled_transitions(const MachineState& s, const Program& p,
                                            const ModelConfig& cfg) {
  std::vector<Transition> out;
  for (int proc = 0; proc < static_cast<int>(s.procs.size()); ++proc) {
    const ProcState& pr = s.procs[proc];
    const auto& instrs = p.threads[proc].instrs;

    if (cfg.scTotalOrder) {
      if (pr.pc < static_cast<int>(instrs.size()))
        out.push_back({proc, Rule::ScCommit, -1, -1});
      continue;
    }

    if (pr.pc < static_cast<int>(instrs.size())) {
      const Instruction& ins = instrs[pr.pc];
      if (ins.op == Op::Branch) {
        out.push_back({proc, Rule::Fetch, -1, pr.pc + 1});
        if (ins.branchTarget != pr.pc + 1)
          out.push_back({proc, Rule::Fetch, -1, ins.branchTarget});
      } else {
        out.push_back({proc, Rule::Fetch, -1, -1});
      }
    }
    for (int i = 0; i < static_cast<int>(pr.rob.size()); ++i) {
      const RobEntry& e = pr.rob[i];
      const Instruction& ins = instr_of(p, proc, e);
      switch (ins.op) {
        case Op::RegOp:
          if (!e.done && eval_at(p, proc, pr.rob, i, ins.data))
            out.push_back({proc, Rule::ExecRegToReg, i, -1});
          break;
        case Op::Branch:
          if (!e.done && reg_read(p, proc, pr.rob, i, ins.branchReg))
            out.push_back({proc, Rule::ExecBranch, i, -1});
          break;
        case Op::Fence: {
          if (e.done) break;
          bool ok = true;
          for (int k = 0; k < i && ok; ++k) {
            const Instruction& o = instr_of(p, proc, pr.rob[k]);
            if (!o.is_memory() || pr.rob[k].done) continue;
            if ((o.op == Op::Load ? FenceClass::L : FenceClass::S) == ins.fenceFrom)
              ok = false;
          }
          if (ok) out.push_back({proc, Rule::ExecFence, i, -1});
          break;
        }
        case Op::Load:
          if (!e.addrAvail && eval_at(p, proc, pr.rob, i, ins.addr))
            out.push_back({proc, Rule::ComputeMemAddr, i, -1});
          if (load_ready(p, proc, pr.rob, i))
            out.push_back({proc, Rule::ExecLoad, i, -1});
          break;
        case Op::Store:
          if (!e.addrAvail && eval_at(p, proc, pr.rob, i, ins.addr))
            out.push_back({proc, Rule::ComputeMemAddr, i, -1});
          if (!e.dataAvail && eval_at(p, proc, pr.rob, i, ins.data))
            out.push_back({proc, Rule::ComputeStoreData, i, -1});
          if (store_ready(p, proc, pr.rob, i))
            out.push_back({proc, Rule::ExecStore, i, -1});
          break;
      }
    }
  }
  return out;
}

ApplyResult apply_transition(MachineState& s, const Program& p, const ModelConfig& cfg,
                             const Transition& t, bool wantDesc) {
  ApplyResult res;
  ProcState& pr = s.procs[t.proc];
  std::ostringstream d;
  if (wantDesc && t.rule != Rule::Fetch && t.rule != Rule::ScCommit)
    d << pname(p, t.proc) << " " << to_string(t.rule) << " rob[" << t.robIndex << "]";

  switch (t.rule) {
    case Rule::Fetch: {
      const Instruction& ins = p.threads[t.proc].instrs[pr.pc];
      RobEntry e;
      e.progIndex = pr.pc;
      if (wantDesc)
        d << pname(p, t.proc) << " Fetch rob[" << pr.rob.size() << "] <- instr "
          << pr.pc << " (" << op_mnemonic(ins) << ")";
      if (ins.op == Op::Branch) {
        e.predictedTarget = t.predictedTarget;
        pr.pc = t.predictedTarget;
        if (wantDesc) d << ", predict pc=" << t.predictedTarget;
      } else {
        pr.pc += 1;
      }
      pr.rob.push_back(e);
      res.changed = true;
      break;
    }
    case Rule::ExecRegToReg: {
      RobEntry& e = pr.rob[t.robIndex];
      e.result = *eval_at(p, t.proc, pr.rob, t.robIndex, instr_of(p, t.proc, e).data);
      e.done = true;
      res.changed = true;
      if (wantDesc)
        d << " -> " << instr_of(p, t.proc, e).dest << " = " << e.result;
      break;
    }
    case Rule::ExecBranch: {
      RobEntry& e = pr.rob[t.robIndex];
      const Instruction& ins = instr_of(p, t.proc, e);
      std::int64_t c = *reg_read(p, t.proc, pr.rob, t.robIndex, ins.branchReg);
      bool taken = ins.branchKind == BranchKind::Bnez ? c != 0 : c == 0;
      int actual = taken ? ins.branchTarget : e.progIndex + 1;
      e.done = true;
      e.result = actual;
      res.changed = true;
      if (wantDesc) d << " -> " << (taken ? "taken" : "not taken") << ", pc " << actual;
      if (actual != e.predictedTarget) {
        int killed = static_cast<int>(pr.rob.size()) - t.robIndex - 1;
        pr.rob.resize(t.robIndex + 1);
        pr.pc = actual;
        res.branchKills = 1;
        if (wantDesc) d << ", mispredict kills " << killed;
      }
      break;
    }
    case Rule::ExecFence: {
      pr.rob[t.robIndex].done = true;
      res.changed = true;
      break;
    }
    case Rule::ExecLoad: {
      RobEntry& e = pr.rob[t.robIndex];
      LoadCase lc = load_case(p, cfg, t.proc, pr.rob, t.robIndex);
      if (lc.kind == LoadCase::Kind::Stall) {
        if (wantDesc) d << " -> stall on rob[" << lc.fromRob << "]";
        res.changed = false;
        break;
      }
      if (lc.kind == LoadCase::Kind::Forward) {
        e.result = lc.value;
        if (wantDesc) d << " -> forward rob[" << lc.fromRob << "] value " << lc.value;
      } else {
        e.result = s.mem_read(p, e.addr);
        if (wantDesc) d << " -> read m[" << hex_addr(e.addr) << "]=" << e.result;
      }
      e.done = true;
      res.changed = true;
      break;
    }
    case Rule::ComputeStoreData: {
      RobEntry& e = pr.rob[t.robIndex];
      e.data = *eval_at(p, t.proc, pr.rob, t.robIndex, instr_of(p, t.proc, e).data);
      e.dataAvail = true;
      res.changed = true;
      if (wantDesc) d << " -> data " << e.data;
      break;
    }
    case Rule::ExecStore: {
      RobEntry& e = pr.rob[t.robIndex];
      s.mem_write(p, e.addr, e.data);
      e.result = e.data;
      e.done = true;
      res.changed = true;
      if (wantDesc) d << " -> m[" << hex_addr(e.addr) << "]=" << e.data;
      break;
    }
    case Rule::ComputeMemAddr: {
      RobEntry& e = pr.rob[t.robIndex];
      const Instruction& ins = instr_of(p, t.proc, e);
      e.addr = *eval_at(p, t.proc, pr.rob, t.robIndex, ins.addr);
      e.addrAvail = true;
      res.changed = true;
      if (wantDesc) d << " -> addr " << hex_addr(e.addr);
      // A resolved address may expose a younger load that already read a
      // value this access is about to overtake. Ordered load flavors also
      // repair younger same-address loads when a load resolves.
      const bool mayKill =
          ins.op == Op::Store || (ins.op == Op::Load && cfg.ldld != LdLdRule::None);
      if (mayKill) {
        for (size_t j = t.robIndex + 1; j < pr.rob.size(); ++j) {
          const RobEntry& y = pr.rob[j];
          const Instruction& yi = instr_of(p, t.proc, y);
          if (!yi.is_memory() || !y.addrAvail || y.addr != e.addr) continue;
          if (yi.op == Op::Store) break;  // shields younger accesses
          if (!y.done) {
            // A pending load shields only when the model orders
            // same-address loads; otherwise keep scanning.
            if (cfg.ldld != LdLdRule::None) break;
            continue;
          }
          pr.pc = y.progIndex;
          pr.rob.resize(j);
          res.memaddrKills = 1;
          if (wantDesc) d << ", kills rob[" << j << "..], refetch pc=" << pr.pc;
          break;
        }
      }
      break;
    }
    case Rule::ScCommit: {
      const Instruction& ins = p.threads[t.proc].instrs[pr.pc];
      RobEntry e;
      e.progIndex = pr.pc;
      e.done = true;
      if (wantDesc)
        d << pname(p, t.proc) << " ScCommit instr " << pr.pc << " ("
          << op_mnemonic(ins) << ")";
      switch (ins.op) {
        case Op::Load:
          e.addr = *eval_at(p, t.proc, pr.rob, static_cast<int>(pr.rob.size()), ins.addr);
          e.addrAvail = true;
          e.result = s.mem_read(p, e.addr);
          if (wantDesc) d << " -> read m[" << hex_addr(e.addr) << "]=" << e.result;
          pr.pc += 1;
          break;
        case Op::Store:
          e.addr = *eval_at(p, t.proc, pr.rob, static_cast<int>(pr.rob.size()), ins.addr);
          e.data = *eval_at(p, t.proc, pr.rob, static_cast<int>(pr.rob.size()), ins.data);
          e.addrAvail = e.dataAvail = true;
          e.result = e.data;
          s.mem_write(p, e.addr, e.data);
          if (wantDesc) d << " -> m[" << hex_addr(e.addr) << "]=" << e.data;
          pr.pc += 1;
          break;
        case Op::RegOp:
          e.result = *eval_at(p, t.proc, pr.rob, static_cast<int>(pr.rob.size()), ins.data);
          pr.pc += 1;
          break;
        case Op::Branch: {
          std::int64_t c = *reg_read(p, t.proc, pr.rob,
                                     static_cast<int>(pr.rob.size()), ins.branchReg);
          bool taken = ins.branchKind == BranchKind::Bnez ? c != 0 : c == 0;
          int actual = taken ? ins.branchTarget : e.progIndex + 1;
          e.predictedTarget = actual;
          e.result = actual;
          pr.pc = actual;
          if (wantDesc) d << " -> " << (taken ? "taken" : "not taken") << ", pc " << actual;
          break;
        }
        case Op::Fence:
          pr.pc += 1;
          break;
      }
      pr.rob.push_back(e);
      res.changed = true;
      break;
    }
  }
  if (wantDesc) res.desc = d.str();
  return res;
}

namespace {

bool quiescent_outcome(const MachineState& s, const Program& p,
                       const OutcomeSpec& spec, Outcome& out) {
  for (size_t proc = 0; proc < s.procs.size(); ++proc) {
    const ProcState& pr = s.procs[proc];
    if (pr.pc < static_cast<int>(p.threads[proc].instrs.size())) return false;
    for (const auto& e : pr.rob)
      if (!e.done) return false;
  }
  out.regs.clear();
  out.mem.clear();
  for (const auto& [t, reg] : spec.regs) {
    std::int64_t v = 0;
    const auto& rob = s.procs[t].rob;
    for (int k = static_cast<int>(rob.size()) - 1; k >= 0; --k)
      if (writes_reg(instr_of(p, t, rob[k]), reg)) {
        v = rob[k].result;
        break;
      }
    out.regs.push_back({{t, reg}, v});
  }
  for (const auto& label : spec.memLabels)
    out.mem.push_back({label, s.mem_read(p, p.addrOf.at(label))});
  return true;
}

// Machine sanity checks used by the tests: done entries carry resolved
// facts, done stores kept their ordering guards, done fences saw their
// source class drained.
void validate_state(const MachineState& s, const Program& p) {
  for (size_t proc = 0; proc < s.procs.size(); ++proc) {
    const auto& rob = s.procs[proc].rob;
    for (size_t i = 0; i < rob.size(); ++i) {
      const RobEntry& e = rob[i];
      const Instruction& ins = instr_of(p, static_cast<int>(proc), e);
      if (e.done && ins.is_memory() && !e.addrAvail)
        throw std::logic_error("done memory access without address");
      if (e.done && ins.op == Op::Store) {
        if (!e.dataAvail) throw std::logic_error("done store without data");
        for (size_t k = 0; k < i; ++k) {
          const RobEntry& o = rob[k];
          const Instruction& oi = instr_of(p, static_cast<int>(proc), o);
          if (oi.op == Op::Branch && !o.done)
            throw std::logic_error("done store past unresolved branch");
          if (oi.is_memory() && !o.addrAvail)
            throw std::logic_error("done store past unresolved address");
          if (oi.is_memory() && o.addrAvail && o.addr == e.addr && !o.done)
            throw std::logic_error("done store past pending same-address access");
        }
      }
    }
  }
}

}  // namespace

ExploreResult explore(const Program& prog, const ModelConfig& cfg,
                      const EngineOptions& opt) {
  if (!cfg.operational_supported())
    throw UnsupportedError("no machine for model " + std::string(to_string(cfg.model)));

  const Program* pp = &prog;
  Program resolvedCopy;
  if (prog.addrOf.empty() && !prog.init.empty()) {
    resolvedCopy = resolve_addresses(prog);
    pp = &resolvedCopy;
  }
  const Program& p = *pp;
  OutcomeSpec spec = OutcomeSpec::from(p);

  ExploreResult res;
  MachineState start = initial_state(p);
  std::string startKey = start.encode();

  std::map<std::string, std::pair<std::string, std::string>> parents;
  std::set<std::string> visited{startKey};
  std::deque<std::pair<MachineState, std::string>> queue;
  queue.push_back({start, startKey});
  res.stats.states = 1;

  std::string targetKey;

  while (!queue.empty()) {
    auto [s, key] = queue.front();
    queue.pop_front();

    std::vector<Transition> trs = enabled_transitions(s, p, cfg);
    if (trs.empty()) {
      Outcome o;
      if (quiescent_outcome(s, p, spec, o)) {
        res.outcomes.insert(o);
        if (satisfies_target(p, o)) {
          res.allowed = true;
          if (opt.wantTrace && targetKey.empty()) targetKey = key;
        }
      }
      continue;
    }
    if (opt.orderSeed != 0) {
      std::mt19937_64 rng(opt.orderSeed * 0x9e3779b97f4a7c15ull +
                          std::hash<std::string>{}(key));
      std::shuffle(trs.begin(), trs.end(), rng);
    }
    for (const auto& tr : trs) {
      MachineState ns = s;
      ApplyResult ar = apply_transition(ns, p, cfg, tr, opt.wantTrace);
      if (!ar.changed) continue;
      res.stats.transitions += 1;
      res.stats.branchKills += ar.branchKills;
      res.stats.memaddrKills += ar.memaddrKills;
      if (opt.validate) validate_state(ns, p);
      std::string nk = ns.encode();
      if (!visited.insert(nk).second) continue;
      res.stats.states += 1;
      if (res.stats.states > opt.stateBudget)
        throw BudgetError(BudgetError::Kind::States, opt.stateBudget,
                          "state budget of " + std::to_string(opt.stateBudget) +
                              " states exceeded");
      if (opt.wantTrace) parents[nk] = {key, ar.desc};
      queue.push_back({std::move(ns), std::move(nk)});
    }
  }

  if (opt.wantTrace && !targetKey.empty()) {
    std::vector<std::string> lines;
    std::string k = targetKey;
    while (k != startKey) {
      auto& [pk, desc] = parents.at(k);
      lines.push_back(desc);
      k = pk;
    }
    std::reverse(lines.begin(), lines.end());
    std::ostringstream os;
    for (const auto& l : lines) os << l << "\n";
    res.trace = os.str();
  }
  return res;
}

Verdict explore_verdict(const Program& p, const ModelConfig& cfg,
                        const EngineOptions& opt) {
  ExploreResult r = explore(p, cfg, opt);
  Verdict v;
  v.model = cfg.model;
  v.allowed = r.allowed;
  v.outcomes = std::move(r.outcomes);
  v.stats = r.stats;
  v.trace = std::move(r.trace);
  return v;
}

}  // namespace gam
