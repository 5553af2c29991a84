#include "harness.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>

#include "axiomatic.hpp"
#include "operational.hpp"

namespace gam {

namespace {

struct RawCorpus {
  const char* name;
  const char* text;
};

const RawCorpus kRawCorpus[] = {
#include "corpus_data.inc"
};

// Provenance of every frozen verdict: "stated" when it is the documented
// behavior the pattern is known for, "derived" when it was worked out by
// hand for this corpus and frozen.
const std::map<std::string, std::map<Model, std::string>>& provenance_table() {
  static const std::map<std::string, std::map<Model, std::string>> table = {
      {"dekker",
       {{Model::Sc, "stated"}, {Model::Gam0, "derived"}, {Model::Gam, "stated"},
        {Model::GamArm, "derived"}}},
      {"mp",
       {{Model::Sc, "stated"}, {Model::Gam0, "derived"}, {Model::Gam, "stated"},
        {Model::GamArm, "derived"}}},
      {"mp-fence",
       {{Model::Sc, "stated"}, {Model::Gam0, "derived"}, {Model::Gam, "stated"},
        {Model::GamArm, "derived"}}},
      {"corr",
       {{Model::Sc, "stated"}, {Model::Gam0, "stated"}, {Model::Gam, "stated"},
        {Model::GamArm, "stated"}}},
      {"oota",
       {{Model::Sc, "stated"}, {Model::Gam0, "stated"}, {Model::Gam, "stated"},
        {Model::GamArm, "stated"}}},
      {"mp-addr",
       {{Model::Sc, "stated"}, {Model::Gam0, "stated"}, {Model::Gam, "stated"},
        {Model::GamArm, "derived"}}},
      {"mp-artificial-addr",
       {{Model::Sc, "stated"}, {Model::Gam0, "stated"}, {Model::Gam, "stated"},
        {Model::GamArm, "derived"}}},
      {"dep-via-memory",
       {{Model::Sc, "derived"}, {Model::Gam0, "derived"}, {Model::Gam, "stated"},
        {Model::GamArm, "derived"}}},
      {"mp-prefetch",
       {{Model::Sc, "stated"}, {Model::Gam0, "derived"}, {Model::Gam, "stated"},
        {Model::GamArm, "derived"}}},
      {"ld-st-ld",
       {{Model::Sc, "derived"}, {Model::Gam0, "derived"}, {Model::Gam, "derived"},
        {Model::GamArm, "derived"}}},
      {"rsw",
       {{Model::Sc, "derived"}, {Model::Gam0, "derived"}, {Model::Gam, "stated"},
        {Model::GamArm, "stated"}}},
      {"rnsw",
       {{Model::Sc, "derived"}, {Model::Gam0, "derived"}, {Model::Gam, "stated"},
        {Model::GamArm, "stated"}}},
  };
  return table;
}

}  // namespace

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = [] {
    std::vector<CorpusEntry> out;
    for (const auto& raw : kRawCorpus) {
      CorpusEntry e;
      e.name = raw.name;
      e.source = raw.text;
      e.program = resolve_addresses(parse_litmus(e.source));
      e.expect = e.program.expect;
      auto it = provenance_table().find(e.name);
      if (it != provenance_table().end()) e.provenance = it->second;
      out.push_back(std::move(e));
    }
    return out;
  }();
  return entries;
}

CrossReport cross_check(const Program& prog, Model m, const EngineOptions& opt) {
  CrossReport r;
  r.model = m;
  const ModelConfig cfg = ModelConfig::for_model(m);
  const Program p = prog.addrOf.empty() && !prog.init.empty()
                        ? resolve_addresses(prog)
                        : prog;
  using clock = std::chrono::steady_clock;
  try {
    auto t0 = clock::now();
    Verdict ax = allowed_axiomatic(p, cfg, opt);
    r.axiomaticMs =
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    r.axiomatic = std::move(ax.outcomes);
  } catch (const BudgetError& e) {
    r.inconclusive = true;
    r.error = std::string("axiomatic: ") + e.what();
    return r;
  }
  if (!cfg.operational_supported()) {
    r.inconclusive = true;
    r.error = "no abstract machine for model " + std::string(to_string(m));
    return r;
  }
  try {
    auto t0 = clock::now();
    ExploreResult op = explore(p, cfg, opt);
    r.operationalMs =
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    r.operational = std::move(op.outcomes);
  } catch (const BudgetError& e) {
    r.inconclusive = true;
    r.error = std::string("operational: ") + e.what();
    return r;
  }
  r.pass = r.axiomatic == r.operational;
  return r;
}

// ------------------------------------------------------------- fuzzing

namespace {

struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t seed) : g(seed) {}
  // Modulo keeps draws portable across standard library implementations.
  std::uint64_t below(std::uint64_t n) { return n ? g() % n : 0; }
  bool chance(double p) {
    return static_cast<double>(below(1000)) < p * 1000.0;
  }
};

Program build_fuzz_program(const FuzzBounds& b, bool allowBranches) {
  Rng rng(b.seed);

  const int maxThreads = std::max(1, b.maxThreads);
  const int maxInstr = std::max(1, b.maxInstrPerThread);
  const int maxAddrs = std::max(1, b.maxAddrs);
  std::vector<std::int64_t> values = b.values;
  if (values.empty()) values = {0, 1};
  const double fenceProb = std::clamp(b.fenceProb, 0.0, 0.9);
  const double branchProb = allowBranches ? std::clamp(b.branchProb, 0.0, 0.9) : 0.0;
  const int memBound = std::max(1, b.memInstanceBound);

  std::vector<std::string> labels;
  for (int i = 0; i < maxAddrs; ++i) labels.push_back(std::string(1, 'a' + i % 26) +
                                                     (i >= 26 ? std::to_string(i / 26) : ""));

  Program p;
  p.name = "fuzz-" + std::to_string(b.seed);
  const int T = 1 + static_cast<int>(rng.below(maxThreads));
  int memLeft = memBound;

  for (int t = 0; t < T; ++t) {
    Thread th;
    th.name = "P" + std::to_string(t + 1);
    const int n = 1 + static_cast<int>(rng.below(maxInstr));
    int regCounter = 0;
    std::vector<std::string> written;
    auto fresh = [&] {
      return "r" + std::to_string(++regCounter);
    };
    auto someLabel = [&] { return labels[rng.below(labels.size())]; };
    auto someValue = [&] { return values[rng.below(values.size())]; };
    auto addrExpr = [&] {
      Expr e = Expr::label(someLabel());
      // Sometimes thread an artificial dependency through a register.
      if (!written.empty() && rng.below(4) == 0) {
        const std::string& r = written[rng.below(written.size())];
        e.plus(Expr::reg(r)).minus(Expr::reg(r));
      }
      return e;
    };

    struct PendingBranch {
      size_t instrIndex;
      int targetIndex;
    };
    std::vector<PendingBranch> branches;

    for (int i = 0; i < n; ++i) {
      if (rng.chance(fenceProb)) {
        Instruction f;
        f.op = Op::Fence;
        f.fenceFrom = rng.below(2) ? FenceClass::L : FenceClass::S;
        f.fenceTo = rng.below(2) ? FenceClass::L : FenceClass::S;
        th.instrs.push_back(f);
        continue;
      }
      if (!written.empty() && i < n - 1 && rng.chance(branchProb)) {
        Instruction br;
        br.op = Op::Branch;
        br.branchKind = rng.below(2) ? BranchKind::Bnez : BranchKind::Beqz;
        br.branchReg = written[rng.below(written.size())];
        const int target = i + 1 + static_cast<int>(rng.below(n - i));
        branches.push_back({th.instrs.size(), target});
        th.instrs.push_back(br);
        continue;
      }
      const std::uint64_t kind = rng.below(3);
      if (kind == 0 && memLeft > 0) {
        Instruction ld;
        ld.op = Op::Load;
        ld.dest = fresh();
        ld.addr = addrExpr();
        written.push_back(ld.dest);
        th.instrs.push_back(ld);
        --memLeft;
      } else if (kind == 1 && memLeft > 0) {
        Instruction st;
        st.op = Op::Store;
        st.addr = addrExpr();
        if (!written.empty() && rng.below(3) == 0)
          st.data = Expr::reg(written[rng.below(written.size())]);
        else
          st.data = Expr::lit(someValue());
        th.instrs.push_back(st);
        --memLeft;
      } else {
        Instruction ro;
        ro.op = Op::RegOp;
        ro.dest = fresh();
        if (!written.empty() && rng.below(2) == 0) {
          ro.data = Expr::reg(written[rng.below(written.size())]);
          if (rng.below(2) == 0) ro.data.plus(Expr::lit(someValue()));
        } else {
          ro.data = Expr::lit(someValue());
        }
        written.push_back(ro.dest);
        th.instrs.push_back(ro);
      }
    }

    // Branch targets index real positions now that the count is final.
    for (size_t bi = 0; bi < branches.size(); ++bi) {
      const auto& pb = branches[bi];
      const int target = std::min<int>(pb.targetIndex,
                                       static_cast<int>(th.instrs.size()));
      std::string lbl = "L" + std::to_string(t) + "_" + std::to_string(bi);
      th.instrs[pb.instrIndex].branchLabel = lbl;
      th.instrs[pb.instrIndex].branchTarget = target;
      th.labels[lbl] = target;
    }
    p.threads.push_back(std::move(th));
  }

  // The condition lists every load destination, so the outcome projection
  // is the whole load-value vector.
  bool anyLoad = false;
  for (const auto& th : p.threads)
    for (const auto& ins : th.instrs)
      if (ins.op == Op::Load) anyLoad = true;
  if (!anyLoad) {
    Instruction ld;
    ld.op = Op::Load;
    ld.dest = "r99";
    ld.addr = Expr::label(labels[0]);
    p.threads[0].instrs.push_back(ld);
  }
  for (size_t t = 0; t < p.threads.size(); ++t)
    for (const auto& ins : p.threads[t].instrs) {
      if (ins.op != Op::Load) continue;
      CondAtom a;
      a.isMem = false;
      a.thread = p.threads[t].name;
      a.reg = ins.dest;
      a.rhs = Expr::lit(values[rng.below(values.size())]);
      p.cond.atoms.push_back(a);
    }
  return p;
}

}  // namespace

Program fuzz_program(const FuzzBounds& bounds) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    Program built = build_fuzz_program(bounds, attempt == 0);
    try {
      return parse_litmus(to_litmus(built));
    } catch (const ParseError&) {
      // Clamp harder (drop branches) and retry once.
      continue;
    }
  }
  throw std::logic_error("fuzz generation failed twice for seed " +
                         std::to_string(bounds.seed));
}

bool check_inclusion(const Program& prog, Model relaxed, Model strict,
                     const EngineOptions& opt) {
  const Program p = prog.addrOf.empty() && !prog.init.empty()
                        ? resolve_addresses(prog)
                        : prog;
  Verdict r = allowed_axiomatic(p, ModelConfig::for_model(relaxed), opt);
  Verdict s = allowed_axiomatic(p, ModelConfig::for_model(strict), opt);
  return std::includes(r.outcomes.begin(), r.outcomes.end(), s.outcomes.begin(),
                       s.outcomes.end());
}

// ------------------------------------------- per-location consistency

namespace {

// All final store values one address can settle on, over every total
// order of that address's accesses that respects program order and lets
// each load read its nearest preceding store.
struct PerAddrSearch {
  const CandidateExecution& e;
  std::vector<MoEntry> items;          // same-address instances, po order per thread
  std::vector<bool> placed;
  MoEntry lastStore;
  std::int64_t initValue = 0;
  bool anyOrder = false;
  std::set<std::int64_t> finals;

  PerAddrSearch(const CandidateExecution& e_, std::int64_t addr) : e(e_) {
    for (size_t t = 0; t < e.paths.size(); ++t)
      for (size_t pos = 0; pos < e.paths[t].size(); ++pos)
        if (e.is_memory(static_cast<int>(t), static_cast<int>(pos)) &&
            e.info[t][pos].addr == addr)
          items.push_back({false, addr, static_cast<int>(t), static_cast<int>(pos)});
    placed.assign(items.size(), false);
    lastStore = {true, addr, -1, -1};
    initValue = e.prog->initial_memory(addr);
  }

  bool thread_ready(size_t idx) const {
    for (size_t j = 0; j < items.size(); ++j)
      if (!placed[j] && items[j].thread == items[idx].thread &&
          items[j].pathPos < items[idx].pathPos)
        return false;
    return true;
  }

  void rec(size_t left) {
    if (left == 0) {
      anyOrder = true;
      finals.insert(lastStore.isInit
                        ? initValue
                        : e.info[lastStore.thread][lastStore.pathPos].data);
      return;
    }
    for (size_t idx = 0; idx < items.size(); ++idx) {
      if (placed[idx] || !thread_ready(idx)) continue;
      const MoEntry it = items[idx];
      const bool isStore = e.instr(it.thread, it.pathPos).op == Op::Store;
      if (!isStore) {
        const RfSource& src = e.rf.at({it.thread, it.pathPos});
        const bool ok = src.fromInit
                            ? lastStore.isInit
                            : (!lastStore.isInit && lastStore.thread == src.thread &&
                               lastStore.pathPos == src.pathPos);
        if (!ok) continue;
        placed[idx] = true;
        rec(left - 1);
        placed[idx] = false;
      } else {
        const MoEntry saved = lastStore;
        placed[idx] = true;
        lastStore = it;
        rec(left - 1);
        lastStore = saved;
        placed[idx] = false;
      }
    }
  }
};

}  // namespace

std::set<Outcome> per_location_sc_outcomes(const Program& prog, int memBound) {
  const Program p = prog.addrOf.empty() && !prog.init.empty()
                        ? resolve_addresses(prog)
                        : prog;
  const OutcomeSpec spec = OutcomeSpec::from(p);
  std::set<Outcome> out;

  for (const CandidateExecution& e : enumerate_executions(p, memBound)) {
    std::set<std::int64_t> addrs;
    for (size_t t = 0; t < e.paths.size(); ++t)
      for (size_t pos = 0; pos < e.paths[t].size(); ++pos)
        if (e.is_memory(static_cast<int>(t), static_cast<int>(pos)))
          addrs.insert(e.info[t][pos].addr);

    bool valid = true;
    std::map<std::int64_t, std::set<std::int64_t>> finalsByAddr;
    for (auto a : addrs) {
      PerAddrSearch search(e, a);
      search.rec(search.items.size());
      if (!search.anyOrder) {
        valid = false;
        break;
      }
      finalsByAddr[a] = std::move(search.finals);
    }
    if (!valid) continue;

    Outcome base = register_outcome(e, spec);
    if (!spec.mentions_memory()) {
      out.insert(base);
      continue;
    }
    // Cross product of per-address finals over the condition's labels.
    std::vector<std::vector<std::pair<std::string, std::int64_t>>> choices;
    for (const auto& label : spec.memLabels) {
      const std::int64_t a = p.addrOf.at(label);
      std::vector<std::pair<std::string, std::int64_t>> c;
      auto it = finalsByAddr.find(a);
      if (it == finalsByAddr.end() || it->second.empty()) {
        c.push_back({label, p.initial_memory(a)});
      } else {
        for (auto v : it->second) c.push_back({label, v});
      }
      choices.push_back(std::move(c));
    }
    std::vector<size_t> pick(choices.size(), 0);
    while (true) {
      Outcome o = base;
      for (size_t i = 0; i < choices.size(); ++i) o.mem.push_back(choices[i][pick[i]]);
      out.insert(o);
      size_t d = 0;
      for (; d < pick.size(); ++d) {
        if (++pick[d] < choices[d].size()) break;
        pick[d] = 0;
      }
      if (d == pick.size()) break;
    }
  }
  return out;
}

// --------------------------------------------------------- suite runs

std::vector<ReportRow> run_corpus(const EngineOptions& opt) {
  std::vector<ReportRow> rows;
  static const Model kModels[] = {Model::Sc, Model::Gam0, Model::Gam, Model::GamArm};
  for (const auto& entry : corpus()) {
    for (Model m : kModels) {
      ReportRow row;
      row.test = entry.name;
      row.model = m;
      row.engine = "axiomatic";
      row.allowed = allowed_axiomatic(entry.program, ModelConfig::for_model(m), opt).allowed;
      row.expected = entry.expect.at(m);
      row.pass = row.allowed == *row.expected;
      rows.push_back(row);
    }
    for (Model m : {Model::Sc, Model::Gam0, Model::Gam}) {
      ReportRow row;
      row.test = entry.name;
      row.model = m;
      row.engine = "operational";
      row.allowed = explore(entry.program, ModelConfig::for_model(m), opt).allowed;
      row.expected = entry.expect.at(m);
      row.pass = row.allowed == *row.expected;
      rows.push_back(row);
    }
  }
  return rows;
}

FuzzSuiteResult run_fuzz_suite(const FuzzBounds& bounds, int count,
                               const EngineOptions& opt) {
  FuzzSuiteResult res;
  std::uint64_t seed = bounds.seed;
  const int maxAttempts = count * 50 + 100;
  int attempts = 0;

  while (static_cast<int>(res.cases.size()) < count && attempts < maxAttempts) {
    ++attempts;
    FuzzBounds b = bounds;
    b.seed = seed++;
    Program p = fuzz_program(b);
    Program rp = resolve_addresses(p);

    std::map<Model, std::set<Outcome>> ax;
    std::map<Model, std::set<Outcome>> op;
    std::set<Outcome> perloc;
    try {
      for (Model m : {Model::Sc, Model::Gam0, Model::Gam, Model::GamArm})
        ax[m] = allowed_axiomatic(rp, ModelConfig::for_model(m), opt).outcomes;
      for (Model m : {Model::Sc, Model::Gam0, Model::Gam})
        op[m] = explore(rp, ModelConfig::for_model(m), opt).outcomes;
      perloc = per_location_sc_outcomes(rp, opt.memBound);
    } catch (const BudgetError&) {
      ++res.skippedBudget;
      continue;
    }

    auto incl = [](const std::set<Outcome>& big, const std::set<Outcome>& small) {
      return std::includes(big.begin(), big.end(), small.begin(), small.end());
    };

    FuzzCase c;
    c.seed = b.seed;
    c.name = rp.name;
    c.equivalence = ax[Model::Sc] == op[Model::Sc] &&
                    ax[Model::Gam0] == op[Model::Gam0] &&
                    ax[Model::Gam] == op[Model::Gam];
    c.monotonicity = incl(ax[Model::Gam], ax[Model::Sc]) &&
                     incl(ax[Model::GamArm], ax[Model::Gam]) &&
                     incl(ax[Model::Gam0], ax[Model::GamArm]);
    c.perLocation = incl(perloc, ax[Model::Gam]);
    c.pass = c.equivalence && c.monotonicity && c.perLocation;
    res.cases.push_back(c);
  }
  res.pass = static_cast<int>(res.cases.size()) == count;
  for (const auto& c : res.cases) res.pass = res.pass && c.pass;
  return res;
}

}  // namespace gam
