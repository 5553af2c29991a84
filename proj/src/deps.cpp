#include "deps.hpp"

#include <sstream>

namespace gam {

namespace {

void collect_expr_regs(const Expr& e, std::set<std::string>& out) {
  e.collect_registers(out);
}

}  // namespace

std::set<std::string> read_set(const Instruction& i) {
  std::set<std::string> out;
  switch (i.op) {
    case Op::Load:
      collect_expr_regs(i.addr, out);
      break;
    case Op::Store:
      collect_expr_regs(i.addr, out);
      collect_expr_regs(i.data, out);
      break;
    case Op::RegOp:
      collect_expr_regs(i.data, out);
      break;
    case Op::Branch:
      out.insert(i.branchReg);
      break;
    case Op::Fence:
      break;
  }
  return out;
}

std::set<std::string> write_set(const Instruction& i) {
  std::set<std::string> out;
  if (i.op == Op::Load || i.op == Op::RegOp) out.insert(i.dest);
  return out;
}

std::set<std::string> addr_read_set(const Instruction& i) {
  std::set<std::string> out;
  if (i.is_memory()) collect_expr_regs(i.addr, out);
  return out;
}

namespace {

// Shared dependency test: does instance j read (through `reads`) a register
// written by instance i, with no intervening rewrite of that register?
bool dep_step(const CandidateExecution& e, int t, int i, int j,
              std::set<std::string> (*reads)(const Instruction&)) {
  auto ws = write_set(e.instr(t, i));
  if (ws.empty()) return false;
  auto rs = reads(e.instr(t, j));
  for (const auto& r : ws) {
    if (!rs.count(r)) continue;
    bool masked = false;
    for (int k = i + 1; k < j && !masked; ++k)
      if (write_set(e.instr(t, k)).count(r)) masked = true;
    if (!masked) return true;
  }
  return false;
}

}  // namespace

bool ddep(const CandidateExecution& e, int t, int i, int j) {
  return dep_step(e, t, i, j, read_set);
}

bool adep(const CandidateExecution& e, int t, int i, int j) {
  return dep_step(e, t, i, j, addr_read_set);
}

namespace {

FenceClass mem_class(const Instruction& i) {
  return i.op == Op::Load ? FenceClass::L : FenceClass::S;
}

}  // namespace

Ppo build_ppo(const CandidateExecution& e, const ModelConfig& cfg) {
  Ppo ppo;
  const int T = static_cast<int>(e.paths.size());
  ppo.n.resize(T);
  ppo.m.resize(T);
  for (int t = 0; t < T; ++t) {
    const int n = static_cast<int>(e.paths[t].size());
    ppo.n[t] = n;
    auto& m = ppo.m[t];
    m.assign(static_cast<size_t>(n) * n, 0);
    auto set = [&](int i, int j, std::uint8_t c) {
      if (!m[static_cast<size_t>(i) * n + j]) m[static_cast<size_t>(i) * n + j] = c;
    };

    if (cfg.scTotalOrder) {
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (e.is_memory(t, i) && e.is_memory(t, j)) set(i, j, 10);
      continue;
    }

    auto maddr = [&](int pos) { return e.info[t][pos].addr; };
    // Nearest same-address store before each position, -1 if none.
    auto nearest_store_before = [&](int j) {
      for (int k = j - 1; k >= 0; --k)
        if (e.instr(t, k).op == Op::Store && maddr(k) == maddr(j)) return k;
      return -1;
    };

    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const Instruction& a = e.instr(t, i);
        const Instruction& b = e.instr(t, j);
        // 1: memory access before a same-address store.
        if (a.is_memory() && b.op == Op::Store && maddr(i) == maddr(j))
          set(i, j, 1);
        // 2: feeding the nearest same-address store ahead of a load orders
        // the feeder before the load (the store itself stays unordered,
        // matching store-to-load forwarding).
        if (b.op == Op::Load) {
          int s = nearest_store_before(j);
          if (s >= 0 && i != s && ddep(e, t, i, s)) set(i, j, 2);
        }
        // 3: same-address load pairs, per model flavor.
        if (a.op == Op::Load && b.op == Op::Load && maddr(i) == maddr(j) &&
            cfg.ldld != LdLdRule::None) {
          bool intervening = false;
          for (int k = i + 1; k < j && !intervening; ++k)
            if (e.instr(t, k).op == Op::Store && maddr(k) == maddr(i))
              intervening = true;
          if (!intervening) {
            if (cfg.ldld == LdLdRule::PoPair)
              set(i, j, 3);
            else if (e.rf.at({t, i}) != e.rf.at({t, j}))
              set(i, j, 3);
          }
        }
        // 4: register read-after-write.
        if (ddep(e, t, i, j)) set(i, j, 4);
        // 5: branches order later stores.
        if (a.op == Op::Branch && b.op == Op::Store) set(i, j, 5);
        // 6: feeding the address of a memory access orders the feeder
        // before every later store.
        if (b.op == Op::Store) {
          for (int k = i + 1; k < j; ++k)
            if (e.is_memory(t, k) && adep(e, t, i, k)) {
              set(i, j, 6);
              break;
            }
        }
        // 7: fence before a memory access of its target class.
        if (a.op == Op::Fence && b.is_memory() && a.fenceTo == mem_class(b))
          set(i, j, 7);
        // 8: memory access of the source class before a fence.
        if (a.is_memory() && b.op == Op::Fence && b.fenceFrom == mem_class(a))
          set(i, j, 8);
      }
    }
    // 9: transitive closure. All edges point forward in the path, so
    // sweeping until fixpoint terminates quickly on these sizes.
    bool changed = true;
    while (changed) {
      changed = false;
      for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k) {
          if (!m[static_cast<size_t>(i) * n + k]) continue;
          for (int j = k + 1; j < n; ++j)
            if (m[static_cast<size_t>(k) * n + j] &&
                !m[static_cast<size_t>(i) * n + j]) {
              m[static_cast<size_t>(i) * n + j] = 9;
              changed = true;
            }
        }
    }
  }
  return ppo;
}

std::string dump_ppo(const CandidateExecution& e, const Ppo& ppo) {
  std::ostringstream os;
  for (size_t t = 0; t < e.paths.size(); ++t)
    for (int i = 0; i < ppo.n[t]; ++i)
      for (int j = i + 1; j < ppo.n[t]; ++j)
        if (ppo.has(static_cast<int>(t), i, j))
          os << e.inst_name(static_cast<int>(t), i) << " < "
             << e.inst_name(static_cast<int>(t), j) << " (case "
             << static_cast<int>(ppo.rule_case(static_cast<int>(t), i, j)) << ")\n";
  return os.str();
}

}  // namespace gam
