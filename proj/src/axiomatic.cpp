#include "axiomatic.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>

namespace gam {

namespace {

// ------------------------------------------------------- control paths

void paths_dfs(const Thread& th, int idx, ThreadPath& cur,
               std::vector<ThreadPath>& out) {
  if (idx >= static_cast<int>(th.instrs.size())) {
    out.push_back(cur);
    return;
  }
  const Instruction& ins = th.instrs[idx];
  if (ins.op == Op::Branch) {
    cur.push_back({idx, false});
    paths_dfs(th, idx + 1, cur, out);
    cur.pop_back();
    cur.push_back({idx, true});
    paths_dfs(th, ins.branchTarget, cur, out);
    cur.pop_back();
  } else {
    cur.push_back({idx, false});
    paths_dfs(th, idx + 1, cur, out);
    cur.pop_back();
  }
}

std::vector<ThreadPath> thread_paths(const Thread& th) {
  std::vector<ThreadPath> out;
  ThreadPath cur;
  paths_dfs(th, 0, cur, out);
  return out;
}

// Youngest writer of `reg` strictly before `pos` on the path, or -1.
int writer_before(const CandidateExecution& e, int t, int pos,
                  const std::string& reg) {
  for (int k = pos - 1; k >= 0; --k) {
    const Instruction& ins = e.instr(t, k);
    if ((ins.op == Op::Load || ins.op == Op::RegOp) && ins.dest == reg) return k;
  }
  return -1;
}

// ---------------------------------------------------- value propagation

struct Propagator {
  CandidateExecution& e;

  std::optional<std::int64_t> reg_at(int t, int pos, const std::string& r) {
    int k = writer_before(e, t, pos, r);
    if (k < 0) return 0;  // unwritten registers read 0
    if (!e.info[t][k].hasValue) return std::nullopt;
    return e.info[t][k].value;
  }

  std::optional<std::int64_t> eval_at(const Expr& ex, int t, int pos) {
    bool known = true;
    std::int64_t v = eval_expr(ex, *e.prog, [&](const std::string& r) -> std::int64_t {
      auto rv = reg_at(t, pos, r);
      if (!rv) {
        known = false;
        return 0;
      }
      return *rv;
    });
    if (!known) return std::nullopt;
    return v;
  }

  bool sweep() {
    bool changed = false;
    for (size_t t = 0; t < e.paths.size(); ++t) {
      for (size_t pos = 0; pos < e.paths[t].size(); ++pos) {
        const Instruction& ins = e.instr(static_cast<int>(t), static_cast<int>(pos));
        InstInfo& fi = e.info[t][pos];
        const int ti = static_cast<int>(t);
        const int pi = static_cast<int>(pos);
        if (ins.is_memory() && !fi.hasAddr) {
          if (auto a = eval_at(ins.addr, ti, pi)) {
            fi.hasAddr = true;
            fi.addr = *a;
            changed = true;
          }
        }
        if (ins.op == Op::Store && !fi.hasData) {
          if (auto d = eval_at(ins.data, ti, pi)) {
            fi.hasData = true;
            fi.data = *d;
            changed = true;
          }
        }
        if (ins.op == Op::RegOp && !fi.hasValue) {
          if (auto v = eval_at(ins.data, ti, pi)) {
            fi.hasValue = true;
            fi.value = *v;
            changed = true;
          }
        }
        if (ins.op == Op::Load && !fi.hasValue) {
          const RfSource& src = e.rf.at({ti, pi});
          if (src.fromInit) {
            if (fi.hasAddr) {
              fi.hasValue = true;
              fi.value = e.prog->initial_memory(fi.addr);
              changed = true;
            }
          } else {
            const InstInfo& si = e.info[src.thread][src.pathPos];
            if (si.hasData) {
              fi.hasValue = true;
              fi.value = si.data;
              changed = true;
            }
          }
        }
      }
    }
    return changed;
  }

  // Runs value propagation to a fixpoint. Load values that stay unknown
  // sit on read-from cycles; they are seeded with an arbitrary value
  // (oldest first) and re-propagated, so the later verification pass can
  // judge whether the cyclic valuation is actually self-consistent.
  bool run() {
    while (sweep()) {
    }
    while (true) {
      bool seeded = false;
      for (size_t t = 0; t < e.paths.size() && !seeded; ++t)
        for (size_t pos = 0; pos < e.paths[t].size() && !seeded; ++pos) {
          const Instruction& ins = e.instr(static_cast<int>(t), static_cast<int>(pos));
          if (ins.op == Op::Load && !e.info[t][pos].hasValue) {
            e.info[t][pos].hasValue = true;
            e.info[t][pos].value = 42;
            seeded = true;
          }
        }
      if (!seeded) break;
      while (sweep()) {
      }
    }
    for (size_t t = 0; t < e.paths.size(); ++t)
      for (size_t pos = 0; pos < e.paths[t].size(); ++pos) {
        const Instruction& ins = e.instr(static_cast<int>(t), static_cast<int>(pos));
        const InstInfo& fi = e.info[t][pos];
        if (ins.is_memory() && !fi.hasAddr) return false;
        if (ins.op == Op::Store && !fi.hasData) return false;
        if ((ins.op == Op::Load || ins.op == Op::RegOp) && !fi.hasValue) return false;
      }
    return true;
  }
};

}  // namespace

bool verify_execution(const CandidateExecution& e) {
  for (size_t t = 0; t < e.paths.size(); ++t) {
    const Thread& th = e.prog->threads[t];
    const ThreadPath& path = e.paths[t];
    if (th.instrs.empty() || path.empty()) return false;
    if (path[0].progIndex != 0) return false;
    // Path shape: each step follows fall-through or the taken target, and
    // the path exits exactly at the thread end.
    int expectNext = -1;
    for (size_t pos = 0; pos < path.size(); ++pos) {
      if (expectNext >= 0 && path[pos].progIndex != expectNext) return false;
      const Instruction& ins = th.instrs[path[pos].progIndex];
      expectNext = (ins.op == Op::Branch && path[pos].branchTaken)
                       ? ins.branchTarget
                       : path[pos].progIndex + 1;
    }
    if (expectNext != static_cast<int>(th.instrs.size())) return false;
  }

  const CandidateExecution& ce = e;
  auto reg_at = [&](int t, int pos, const std::string& r) -> std::int64_t {
    int k = writer_before(ce, t, pos, r);
    if (k < 0) return 0;
    if (!ce.info[t][k].hasValue) throw std::logic_error("unresolved register value");
    return ce.info[t][k].value;
  };
  auto eval_at = [&](const Expr& ex, int t, int pos) {
    return eval_expr(ex, *ce.prog,
                     [&](const std::string& r) { return reg_at(t, pos, r); });
  };

  try {
    for (size_t tu = 0; tu < e.paths.size(); ++tu) {
      const int t = static_cast<int>(tu);
      for (size_t pu = 0; pu < e.paths[tu].size(); ++pu) {
        const int pos = static_cast<int>(pu);
        const Instruction& ins = e.instr(t, pos);
        const InstInfo& fi = e.info[tu][pu];
        switch (ins.op) {
          case Op::RegOp:
            if (!fi.hasValue || fi.value != eval_at(ins.data, t, pos)) return false;
            break;
          case Op::Store:
            if (!fi.hasAddr || fi.addr != eval_at(ins.addr, t, pos)) return false;
            if (!fi.hasData || fi.data != eval_at(ins.data, t, pos)) return false;
            break;
          case Op::Load: {
            if (!fi.hasAddr || fi.addr != eval_at(ins.addr, t, pos)) return false;
            if (!fi.hasValue) return false;
            auto it = e.rf.find({t, pos});
            if (it == e.rf.end()) return false;
            const RfSource& src = it->second;
            if (src.fromInit) {
              if (fi.value != e.prog->initial_memory(fi.addr)) return false;
            } else {
              if (src.thread < 0 || src.thread >= static_cast<int>(e.paths.size()))
                return false;
              if (src.pathPos < 0 ||
                  src.pathPos >= static_cast<int>(e.paths[src.thread].size()))
                return false;
              if (e.instr(src.thread, src.pathPos).op != Op::Store) return false;
              const InstInfo& si = e.info[src.thread][src.pathPos];
              if (!si.hasAddr || si.addr != fi.addr) return false;
              if (!si.hasData || si.data != fi.value) return false;
            }
            break;
          }
          case Op::Branch: {
            std::int64_t c = reg_at(t, pos, ins.branchReg);
            bool taken = ins.branchKind == BranchKind::Bnez ? c != 0 : c == 0;
            if (taken != e.paths[tu][pu].branchTaken) return false;
            break;
          }
          case Op::Fence:
            break;
        }
      }
    }
  } catch (const std::logic_error&) {
    return false;
  }
  return true;
}

std::vector<CandidateExecution> enumerate_executions(const Program& p,
                                                     int memBound) {
  // Executions keep a pointer into `p`; the caller owns its lifetime and
  // must have bound the address labels already.
  if (p.addrOf.empty() && !p.init.empty())
    throw std::logic_error("enumerate_executions needs resolved addresses");

  std::vector<std::vector<ThreadPath>> allPaths;
  int maxMem = 0;
  for (const auto& th : p.threads) {
    allPaths.push_back(thread_paths(th));
    int threadMax = 0;
    for (const auto& path : allPaths.back()) {
      int c = 0;
      for (const auto& step : path)
        if (th.instrs[step.progIndex].is_memory()) ++c;
      threadMax = std::max(threadMax, c);
    }
    maxMem += threadMax;
  }
  if (maxMem > memBound)
    throw BudgetError(BudgetError::Kind::MemInstances,
                      static_cast<std::uint64_t>(memBound),
                      "program commits up to " + std::to_string(maxMem) +
                          " memory instances, enumeration bound is " +
                          std::to_string(memBound));

  std::vector<CandidateExecution> out;
  const int T = static_cast<int>(p.threads.size());
  std::vector<size_t> combo(T, 0);

  while (true) {
    std::vector<ThreadPath> paths(T);
    for (int t = 0; t < T; ++t) paths[t] = allPaths[t][combo[t]];

    // Loads and stores of this path combination.
    std::vector<std::pair<int, int>> loads, stores;
    for (int t = 0; t < T; ++t)
      for (size_t pos = 0; pos < paths[t].size(); ++pos) {
        const Instruction& ins = p.threads[t].instrs[paths[t][pos].progIndex];
        if (ins.op == Op::Load) loads.push_back({t, static_cast<int>(pos)});
        if (ins.op == Op::Store) stores.push_back({t, static_cast<int>(pos)});
      }

    // Static addresses (no registers in the address expression) let us
    // drop read-from candidates that can never match.
    auto static_addr = [&](int t, int pos) -> std::optional<std::int64_t> {
      const Instruction& ins = p.threads[t].instrs[paths[t][pos].progIndex];
      if (ins.addr.has_registers()) return std::nullopt;
      return eval_expr(ins.addr, p, [](const std::string&) { return std::int64_t{0}; });
    };

    std::vector<std::vector<RfSource>> cands(loads.size());
    for (size_t li = 0; li < loads.size(); ++li) {
      auto la = static_addr(loads[li].first, loads[li].second);
      cands[li].push_back({true, -1, -1});
      for (const auto& [st, spos] : stores) {
        auto sa = static_addr(st, spos);
        if (la && sa && *la != *sa) continue;
        cands[li].push_back({false, st, spos});
      }
    }

    std::vector<size_t> pick(loads.size(), 0);
    while (true) {
      CandidateExecution e;
      e.prog = &p;
      e.paths = paths;
      e.info.clear();
      for (int t = 0; t < T; ++t)
        e.info.emplace_back(paths[t].size());
      for (size_t li = 0; li < loads.size(); ++li)
        e.rf[{loads[li].first, loads[li].second}] = cands[li][pick[li]];

      Propagator prop{e};
      if (prop.run() && verify_execution(e)) out.push_back(std::move(e));

      size_t d = 0;
      for (; d < pick.size(); ++d) {
        if (++pick[d] < cands[d].size()) break;
        pick[d] = 0;
      }
      if (d == pick.size()) break;
    }

    int d = 0;
    for (; d < T; ++d) {
      if (++combo[d] < allPaths[d].size()) break;
      combo[d] = 0;
    }
    if (d == T) break;
  }
  return out;
}

// ------------------------------------------------------------ mo axioms

namespace {

// Dense instance ranks inside one memory order. Init entries rank by
// position as well.
struct MoRanks {
  std::map<std::pair<int, int>, int> inst;   // (thread, pos) -> index
  std::map<std::int64_t, int> init;          // addr -> index
  explicit MoRanks(const MemoryOrder& mo) {
    for (size_t i = 0; i < mo.size(); ++i) {
      if (mo[i].isInit)
        init[mo[i].addr] = static_cast<int>(i);
      else
        inst[{mo[i].thread, mo[i].pathPos}] = static_cast<int>(i);
    }
  }
};

}  // namespace

bool check_inst_order(const CandidateExecution& e, const MemoryOrder& mo,
                      const Ppo& ppo) {
  MoRanks ranks(mo);
  for (size_t t = 0; t < e.paths.size(); ++t) {
    const int ti = static_cast<int>(t);
    for (int i = 0; i < ppo.n[t]; ++i)
      for (int j = i + 1; j < ppo.n[t]; ++j) {
        if (!ppo.has(ti, i, j)) continue;
        if (!e.is_memory(ti, i) || !e.is_memory(ti, j)) continue;
        auto ri = ranks.inst.find({ti, i});
        auto rj = ranks.inst.find({ti, j});
        if (ri == ranks.inst.end() || rj == ranks.inst.end()) return false;
        if (ri->second >= rj->second) return false;
      }
  }
  return true;
}

bool check_load_value(const CandidateExecution& e, const MemoryOrder& mo,
                      bool scRule) {
  MoRanks ranks(mo);
  for (const auto& [key, src] : e.rf) {
    const auto [t, pos] = key;
    const std::int64_t a = e.info[t][pos].addr;
    auto lr = ranks.inst.find({t, pos});
    if (lr == ranks.inst.end()) return false;
    const int loadRank = lr->second;

    int best = -1;
    for (size_t i = 0; i < mo.size(); ++i) {
      const MoEntry& en = mo[i];
      bool sameAddr;
      if (en.isInit) {
        sameAddr = en.addr == a;
        if (sameAddr) best = std::max(best, static_cast<int>(i));
        continue;
      }
      if (e.instr(en.thread, en.pathPos).op != Op::Store) continue;
      sameAddr = e.info[en.thread][en.pathPos].addr == a;
      if (!sameAddr) continue;
      bool moBefore = static_cast<int>(i) < loadRank;
      bool poBefore = en.thread == t && en.pathPos < pos;
      if (moBefore || (!scRule && poBefore)) best = std::max(best, static_cast<int>(i));
    }
    if (best < 0) return false;
    const MoEntry& winner = mo[best];
    if (src.fromInit) {
      if (!winner.isInit) return false;
    } else {
      if (winner.isInit || winner.thread != src.thread ||
          winner.pathPos != src.pathPos)
        return false;
    }
  }
  return true;
}

std::vector<MoEntry> memory_instances(const CandidateExecution& e) {
  std::vector<MoEntry> out;
  for (size_t t = 0; t < e.paths.size(); ++t)
    for (size_t pos = 0; pos < e.paths[t].size(); ++pos)
      if (e.is_memory(static_cast<int>(t), static_cast<int>(pos)))
        out.push_back({false, e.info[t][pos].addr, static_cast<int>(t),
                       static_cast<int>(pos)});
  return out;
}

std::vector<MoEntry> init_entries(const CandidateExecution& e) {
  std::set<std::int64_t> addrs;
  for (size_t t = 0; t < e.paths.size(); ++t)
    for (size_t pos = 0; pos < e.paths[t].size(); ++pos)
      if (e.is_memory(static_cast<int>(t), static_cast<int>(pos)))
        addrs.insert(e.info[t][pos].addr);
  std::vector<MoEntry> out;
  for (auto a : addrs) out.push_back({true, a, -1, -1});
  return out;
}

// ------------------------------------------------------------ mo search

namespace {

struct MoSearch {
  const CandidateExecution& e;
  const Ppo& ppo;
  bool scRule;

  std::vector<MoEntry> items;
  std::vector<bool> isStore;
  std::vector<std::vector<int>> preds;        // ppo-forced predecessors
  std::map<std::pair<int, int>, int> itemOf;  // (thread, pos) -> item
  std::vector<int> rfItem;                    // per item: source item, -1 init, -2 n/a
  std::vector<bool> rfPoBefore;               // per item: source is po-before

  std::vector<bool> placed;
  MemoryOrder mo;
  std::map<std::int64_t, MoEntry> lastStore;

  MoSearch(const CandidateExecution& e_, const Ppo& ppo_, bool scRule_)
      : e(e_), ppo(ppo_), scRule(scRule_) {
    items = memory_instances(e);
    for (size_t i = 0; i < items.size(); ++i)
      itemOf[{items[i].thread, items[i].pathPos}] = static_cast<int>(i);
    isStore.resize(items.size());
    rfItem.assign(items.size(), -2);
    rfPoBefore.assign(items.size(), false);
    preds.resize(items.size());
    for (size_t i = 0; i < items.size(); ++i) {
      const MoEntry& it = items[i];
      isStore[i] = e.instr(it.thread, it.pathPos).op == Op::Store;
      if (!isStore[i]) {
        const RfSource& src = e.rf.at({it.thread, it.pathPos});
        if (src.fromInit) {
          rfItem[i] = -1;
        } else {
          rfItem[i] = itemOf.at({src.thread, src.pathPos});
          rfPoBefore[i] = src.thread == it.thread && src.pathPos < it.pathPos;
        }
      }
    }
    for (size_t i = 0; i < items.size(); ++i)
      for (size_t j = 0; j < items.size(); ++j) {
        if (i == j) continue;
        const MoEntry& a = items[i];
        const MoEntry& b = items[j];
        if (a.thread == b.thread && a.pathPos < b.pathPos &&
            ppo.has(a.thread, a.pathPos, b.pathPos))
          preds[j].push_back(static_cast<int>(i));
      }
    placed.assign(items.size(), false);
    for (const auto& en : init_entries(e)) {
      mo.push_back(en);
      lastStore[en.addr] = en;
    }
  }

  bool feasible(int idx) const {
    const MoEntry& it = items[idx];
    const std::int64_t a = it.addr;
    if (!isStore[idx]) {
      const int src = rfItem[idx];
      if (src == -1) return lastStore.at(a).isInit;
      if (placed[src])
        return lastStore.at(a) == items[src];
      // Source not placed yet: only fine when it sits later in the same
      // thread's program order (its store placement re-checks the pair).
      if (scRule) return false;
      return rfPoBefore[idx];
    }
    if (scRule) return true;
    for (size_t j = 0; j < items.size(); ++j) {
      if (isStore[j] || !placed[j]) continue;
      const MoEntry& ld = items[j];
      if (ld.addr != a) continue;
      if (ld.thread != it.thread || it.pathPos >= ld.pathPos) continue;
      const int src = rfItem[j];
      if (src == static_cast<int>(idx)) continue;
      if (src == -1 || placed[src]) return false;
    }
    return true;
  }

  bool ready(int idx) const {
    if (placed[idx]) return false;
    for (int p : preds[idx])
      if (!placed[p]) return false;
    return true;
  }

  // Visits memory orders depth first. The callback returns true to stop.
  bool rec(const std::function<bool(const MemoryOrder&)>& cb) {
    bool anyLeft = false;
    for (size_t idx = 0; idx < items.size(); ++idx) {
      if (placed[idx]) continue;
      anyLeft = true;
      if (!ready(static_cast<int>(idx)) || !feasible(static_cast<int>(idx)))
        continue;
      const MoEntry it = items[idx];
      placed[idx] = true;
      mo.push_back(it);
      MoEntry saved{};
      bool hadSaved = false;
      if (isStore[idx]) {
        saved = lastStore.at(it.addr);
        hadSaved = true;
        lastStore[it.addr] = it;
      }
      bool stop = rec(cb);
      if (hadSaved) lastStore[it.addr] = saved;
      mo.pop_back();
      placed[idx] = false;
      if (stop) return true;
    }
    if (!anyLeft) {
      if (check_inst_order(e, mo, ppo) && check_load_value(e, mo, scRule))
        return cb(mo);
    }
    return false;
  }

  std::optional<MemoryOrder> first() {
    std::optional<MemoryOrder> out;
    rec([&](const MemoryOrder& m) {
      out = m;
      return true;
    });
    return out;
  }

  void all(const std::function<void(const MemoryOrder&)>& cb) {
    rec([&](const MemoryOrder& m) {
      cb(m);
      return false;
    });
  }
};

}  // namespace

Outcome register_outcome(const CandidateExecution& e, const OutcomeSpec& spec) {
  Outcome o;
  for (const auto& [t, reg] : spec.regs)
    o.regs.push_back({{t, reg}, e.final_reg(t, reg)});
  return o;
}

Outcome full_outcome(const CandidateExecution& e, const OutcomeSpec& spec,
                     const MemoryOrder& mo) {
  Outcome o = register_outcome(e, spec);
  for (const auto& label : spec.memLabels) {
    const std::int64_t a = e.prog->addrOf.at(label);
    std::int64_t v = e.prog->initial_memory(a);
    for (auto it = mo.rbegin(); it != mo.rend(); ++it) {
      if (it->isInit) continue;
      if (e.instr(it->thread, it->pathPos).op != Op::Store) continue;
      if (e.info[it->thread][it->pathPos].addr != a) continue;
      v = e.info[it->thread][it->pathPos].data;
      break;
    }
    o.mem.push_back({label, v});
  }
  return o;
}

namespace {

std::string entry_name(const CandidateExecution& e, const MoEntry& en) {
  if (!en.isInit) return e.inst_name(en.thread, en.pathPos);
  std::string label = e.prog->label_of_addr(en.addr);
  if (!label.empty()) return "init:" + label;
  std::ostringstream os;
  os << "init:0x" << std::hex << en.addr;
  return os.str();
}

}  // namespace

Witness make_witness(const CandidateExecution& e, const MemoryOrder& mo) {
  Witness w;
  for (const auto& [key, src] : e.rf) {
    MoEntry en{src.fromInit, e.info[key.first][key.second].addr, src.thread,
               src.pathPos};
    w.rfPairs.push_back({e.inst_name(key.first, key.second), entry_name(e, en)});
  }
  for (const auto& en : mo) w.mo.push_back(entry_name(e, en));
  return w;
}

Verdict allowed_axiomatic(const Program& prog, const ModelConfig& cfg,
                          const EngineOptions& opt) {
  const Program* pp = &prog;
  Program resolvedCopy;
  if (prog.addrOf.empty() && !prog.init.empty()) {
    resolvedCopy = resolve_addresses(prog);
    pp = &resolvedCopy;
  }

  Verdict v;
  v.model = cfg.model;
  OutcomeSpec spec = OutcomeSpec::from(*pp);

  std::vector<CandidateExecution> execs = enumerate_executions(*pp, opt.memBound);
  std::ostringstream dump;

  for (size_t ei = 0; ei < execs.size(); ++ei) {
    const CandidateExecution& e = execs[ei];
    Ppo ppo = build_ppo(e, cfg);
    if (opt.wantPpoDump) {
      dump << "# execution " << ei << "\n" << dump_ppo(e, ppo);
    }

    if (!spec.mentions_memory()) {
      Outcome o = register_outcome(e, spec);
      const bool fresh = !v.outcomes.count(o);
      const bool needWitness = !v.witness && satisfies_target(*pp, o);
      if (!fresh && !needWitness) continue;
      MoSearch search(e, ppo, cfg.scTotalOrder);
      auto mo = search.first();
      if (!mo) continue;
      v.outcomes.insert(o);
      if (needWitness) v.witness = make_witness(e, *mo);
    } else {
      MoSearch search(e, ppo, cfg.scTotalOrder);
      search.all([&](const MemoryOrder& mo) {
        Outcome o = full_outcome(e, spec, mo);
        v.outcomes.insert(o);
        if (!v.witness && satisfies_target(*pp, o)) v.witness = make_witness(e, mo);
      });
    }
  }

  for (const auto& o : v.outcomes)
    if (satisfies_target(*pp, o)) {
      v.allowed = true;
      break;
    }
  if (!v.allowed) v.witness.reset();
  v.ppoDump = dump.str();
  return v;
}

}  // namespace gam
