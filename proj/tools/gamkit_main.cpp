// Command line front end. Talks to the core library exclusively through
// the C interface in gamkit.h.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gamkit.h"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

std::string take(char* s) {
  std::string out = s ? s : "";
  gk_free_string(s);
  return out;
}

struct ProgramHandle {
  gk_program* p = nullptr;
  ~ProgramHandle() { gk_program_free(p); }
};

struct OptionsHandle {
  gk_options* o = nullptr;
  OptionsHandle() : o(gk_options_new()) {}
  ~OptionsHandle() { gk_options_free(o); }
};

struct VerdictHandle {
  gk_verdict* v = nullptr;
  ~VerdictHandle() { gk_verdict_free(v); }
};

std::optional<gk_model> parse_model(const std::string& s) {
  if (s == "sc") return GK_MODEL_SC;
  if (s == "gam0") return GK_MODEL_GAM0;
  if (s == "gam") return GK_MODEL_GAM;
  if (s == "gam_arm") return GK_MODEL_GAM_ARM;
  return std::nullopt;
}

const char* model_name(gk_model m) {
  switch (m) {
    case GK_MODEL_SC: return "sc";
    case GK_MODEL_GAM0: return "gam0";
    case GK_MODEL_GAM: return "gam";
    case GK_MODEL_GAM_ARM: return "gam_arm";
  }
  return "?";
}

std::uint64_t state_budget_or_env(std::uint64_t flagValue, bool flagSet) {
  if (flagSet) return flagValue;
  if (const char* env = std::getenv("GAMKIT_STATE_BUDGET")) {
    char* end = nullptr;
    std::uint64_t v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
    std::cerr << "warning: ignoring malformed GAMKIT_STATE_BUDGET\n";
  }
  return flagValue;
}

int load_program(const std::string& file, ProgramHandle& ph) {
  char* err = nullptr;
  gk_status st = gk_parse_file(file.c_str(), &ph.p, &err);
  if (st != GK_OK) {
    std::cerr << "error: " << take(err) << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

std::vector<std::string> verdict_outcomes(const gk_verdict* v) {
  std::vector<std::string> out;
  for (size_t i = 0; i < gk_verdict_outcome_count(v); ++i)
    out.push_back(gk_verdict_outcome(v, i));
  return out;
}

// ------------------------------------------------------------- check

struct CheckArgs {
  std::string file;
  std::string model = "all";
  std::string engine = "axiomatic";
  std::string format = "text";
  int memBound = 10;
  std::uint64_t stateBudget = 5'000'000;
  bool stateBudgetSet = false;
  bool dumpPpo = false;
  bool trace = false;
};

int run_check(const CheckArgs& a) {
  ProgramHandle ph;
  if (int rc = load_program(a.file, ph)) return rc;

  std::vector<gk_model> models;
  if (a.model == "all") {
    models = {GK_MODEL_SC, GK_MODEL_GAM0, GK_MODEL_GAM, GK_MODEL_GAM_ARM};
  } else if (auto m = parse_model(a.model)) {
    models = {*m};
  } else {
    std::cerr << "error: unknown model '" << a.model << "'\n";
    return kExitUsage;
  }
  std::vector<gk_engine> engines;
  if (a.engine == "both")
    engines = {GK_ENGINE_AXIOMATIC, GK_ENGINE_OPERATIONAL};
  else if (a.engine == "axiomatic")
    engines = {GK_ENGINE_AXIOMATIC};
  else if (a.engine == "operational")
    engines = {GK_ENGINE_OPERATIONAL};
  else {
    std::cerr << "error: unknown engine '" << a.engine << "'\n";
    return kExitUsage;
  }
  const bool fanned = a.model == "all" || a.engine == "both";

  OptionsHandle oh;
  gk_options_set_mem_bound(oh.o, a.memBound);
  gk_options_set_state_budget(oh.o, state_budget_or_env(a.stateBudget, a.stateBudgetSet));
  gk_options_set_trace(oh.o, a.trace ? 1 : 0);
  gk_options_set_ppo_dump(oh.o, a.dumpPpo ? 1 : 0);

  ordered_json rows = ordered_json::array();
  bool mismatch = false;

  for (gk_model m : models) {
    std::vector<std::string> engineOutcomes[2];
    bool ranBoth = engines.size() == 2;
    for (gk_engine e : engines) {
      if (m == GK_MODEL_GAM_ARM && e == GK_ENGINE_OPERATIONAL) {
        if (!fanned) {
          std::cerr << "error: model gam_arm has no abstract machine\n";
          return kExitUsage;
        }
        if (a.format == "text")
          std::cout << "note: skipping gam_arm under the operational engine "
                       "(no abstract machine)\n";
        ranBoth = false;
        continue;
      }
      VerdictHandle vh;
      char* err = nullptr;
      gk_status st = gk_check(ph.p, m, e, oh.o, &vh.v, &err);
      if (st == GK_ERR_BUDGET) {
        std::cerr << "error: " << take(err) << "\n";
        return kExitBudget;
      }
      if (st != GK_OK) {
        std::cerr << "error: " << take(err) << "\n";
        return st == GK_ERR_UNSUPPORTED ? kExitUsage : kExitMismatch;
      }

      const bool allowed = gk_verdict_allowed(vh.v) != 0;
      const int expected = gk_program_expectation(ph.p, m);
      if (expected >= 0 && (expected == 1) != allowed) mismatch = true;
      engineOutcomes[e == GK_ENGINE_AXIOMATIC ? 0 : 1] = verdict_outcomes(vh.v);

      ordered_json row = ordered_json::parse(gk_verdict_report_json(vh.v));
      if (a.dumpPpo && gk_verdict_ppo_dump(vh.v))
        row["ppo"] = gk_verdict_ppo_dump(vh.v);
      if (a.trace && gk_verdict_trace(vh.v)) row["trace"] = gk_verdict_trace(vh.v);
      rows.push_back(row);

      if (a.format == "text") {
        std::cout << gk_program_name(ph.p) << "  " << model_name(m) << "  "
                  << (e == GK_ENGINE_AXIOMATIC ? "axiomatic" : "operational")
                  << "  " << (allowed ? "allowed" : "forbidden");
        if (expected >= 0)
          std::cout << "  (expected " << (expected ? "allowed" : "forbidden")
                    << ") " << ((expected == 1) == allowed ? "ok" : "MISMATCH");
        std::cout << "\n";
        for (const auto& o :
             engineOutcomes[e == GK_ENGINE_AXIOMATIC ? 0 : 1])
          std::cout << "  outcome: " << o << "\n";
        if (const char* w = gk_verdict_witness_json(vh.v)) {
          ordered_json wj = ordered_json::parse(w);
          std::cout << "  witness: " << wj.dump() << "\n";
        }
        if (const char* s = gk_verdict_stats_json(vh.v)) {
          ordered_json sj = ordered_json::parse(s);
          std::cout << "  stats: " << sj.dump() << "\n";
        }
        if (a.dumpPpo && gk_verdict_ppo_dump(vh.v))
          std::cout << gk_verdict_ppo_dump(vh.v);
        if (a.trace && gk_verdict_trace(vh.v))
          std::cout << "  trace:\n" << gk_verdict_trace(vh.v);
      }
    }
    if (ranBoth && engineOutcomes[0] != engineOutcomes[1]) {
      mismatch = true;
      if (a.format == "text")
        std::cout << "engine disagreement under " << model_name(m) << "\n";
    }
  }

  if (a.format == "json") std::cout << rows.dump(2) << "\n";
  return mismatch ? kExitMismatch : kExitOk;
}

// ------------------------------------------------------------ explore

struct ExploreArgs {
  std::string file;
  std::string model = "gam";
  std::string format = "text";
  std::uint64_t stateBudget = 5'000'000;
  bool stateBudgetSet = false;
  bool trace = false;
};

int run_explore(const ExploreArgs& a) {
  ProgramHandle ph;
  if (int rc = load_program(a.file, ph)) return rc;
  auto m = parse_model(a.model);
  if (!m) {
    std::cerr << "error: unknown model '" << a.model << "'\n";
    return kExitUsage;
  }
  OptionsHandle oh;
  gk_options_set_state_budget(oh.o, state_budget_or_env(a.stateBudget, a.stateBudgetSet));
  gk_options_set_trace(oh.o, a.trace ? 1 : 0);

  VerdictHandle vh;
  char* err = nullptr;
  gk_status st = gk_check(ph.p, *m, GK_ENGINE_OPERATIONAL, oh.o, &vh.v, &err);
  if (st == GK_ERR_BUDGET) {
    std::cerr << "error: " << take(err) << "\n";
    return kExitBudget;
  }
  if (st == GK_ERR_UNSUPPORTED) {
    std::cerr << "error: " << take(err) << "\n";
    return kExitUsage;
  }
  if (st != GK_OK) {
    std::cerr << "error: " << take(err) << "\n";
    return kExitMismatch;
  }

  const bool allowed = gk_verdict_allowed(vh.v) != 0;
  const int expected = gk_program_expectation(ph.p, *m);

  if (a.format == "json") {
    ordered_json row = ordered_json::parse(gk_verdict_report_json(vh.v));
    if (a.trace && gk_verdict_trace(vh.v)) row["trace"] = gk_verdict_trace(vh.v);
    std::cout << row.dump(2) << "\n";
  } else {
    std::cout << gk_program_name(ph.p) << "  " << model_name(*m)
              << "  operational  " << (allowed ? "allowed" : "forbidden");
    if (expected >= 0)
      std::cout << "  (expected " << (expected ? "allowed" : "forbidden") << ") "
                << ((expected == 1) == allowed ? "ok" : "MISMATCH");
    std::cout << "\n";
    for (const auto& o : verdict_outcomes(vh.v))
      std::cout << "  outcome: " << o << "\n";
    if (const char* s = gk_verdict_stats_json(vh.v)) {
      ordered_json sj = ordered_json::parse(s);
      std::cout << "  stats: " << sj.dump() << "\n";
    }
    if (a.trace && gk_verdict_trace(vh.v))
      std::cout << "  trace:\n" << gk_verdict_trace(vh.v);
  }
  if (expected >= 0 && (expected == 1) != allowed) return kExitMismatch;
  return kExitOk;
}

// --------------------------------------------------------- crosscheck

struct CrossArgs {
  std::string file;
  std::string model = "all";
  std::string format = "text";
  int memBound = 10;
  std::uint64_t stateBudget = 5'000'000;
  bool stateBudgetSet = false;
};

int run_crosscheck(const CrossArgs& a) {
  ProgramHandle ph;
  if (int rc = load_program(a.file, ph)) return rc;

  std::vector<gk_model> models;
  if (a.model == "all") {
    models = {GK_MODEL_SC, GK_MODEL_GAM0, GK_MODEL_GAM};
  } else if (auto m = parse_model(a.model)) {
    if (*m == GK_MODEL_GAM_ARM) {
      std::cerr << "error: model gam_arm has no abstract machine to cross-check\n";
      return kExitUsage;
    }
    models = {*m};
  } else {
    std::cerr << "error: unknown model '" << a.model << "'\n";
    return kExitUsage;
  }

  OptionsHandle oh;
  gk_options_set_mem_bound(oh.o, a.memBound);
  gk_options_set_state_budget(oh.o, state_budget_or_env(a.stateBudget, a.stateBudgetSet));

  ordered_json reports = ordered_json::array();
  bool disagree = false, inconclusive = false;

  for (gk_model m : models) {
    int pass = 0;
    char* json = nullptr;
    char* err = nullptr;
    gk_status st = gk_crosscheck(ph.p, m, oh.o, &pass, &json, &err);
    if (st != GK_OK) {
      std::cerr << "error: " << take(err) << "\n";
      return kExitMismatch;
    }
    ordered_json r = ordered_json::parse(take(json));
    reports.push_back(r);
    const bool inc = r.value("inconclusive", false);
    if (inc) inconclusive = true;
    if (!inc && !pass) disagree = true;
    if (a.format == "text") {
      std::cout << gk_program_name(ph.p) << "  " << model_name(m) << "  ";
      if (inc)
        std::cout << "inconclusive: " << r.value("error", "") << "\n";
      else if (pass)
        std::cout << "engines agree on " << r["axiomatic"].size()
                  << " outcomes\n";
      else
        std::cout << "ENGINES DISAGREE (axiomatic " << r["axiomatic"].size()
                  << " outcomes, operational " << r["operational"].size()
                  << ")\n";
    }
  }
  if (a.format == "json") std::cout << reports.dump(2) << "\n";
  if (disagree) return kExitMismatch;
  if (inconclusive) return kExitBudget;
  return kExitOk;
}

// ------------------------------------------------------------- corpus

int run_corpus_cmd(const std::string& format) {
  OptionsHandle oh;
  int pass = 0;
  char* json = nullptr;
  char* err = nullptr;
  gk_status st = gk_run_corpus(oh.o, &pass, &json, &err);
  if (st != GK_OK) {
    std::cerr << "error: " << take(err) << "\n";
    return kExitMismatch;
  }
  ordered_json rows = ordered_json::parse(take(json));
  if (format == "json") {
    std::cout << rows.dump(2) << "\n";
  } else {
    int failures = 0;
    for (const auto& r : rows) {
      const bool ok = r.value("pass", false);
      if (!ok) ++failures;
      std::cout << r["test"].get<std::string>() << "  "
                << r["model"].get<std::string>() << "  "
                << r["engine"].get<std::string>() << "  "
                << r["verdict"].get<std::string>() << "  (expected "
                << r["expected"].get<std::string>() << ") "
                << (ok ? "ok" : "FAIL") << "\n";
    }
    std::cout << rows.size() << " rows, " << failures << " failures\n";
  }
  return pass ? kExitOk : kExitMismatch;
}

// --------------------------------------------------------------- fuzz

struct FuzzArgs {
  int count = 100;
  std::uint64_t seed = 1;
  int maxThreads = 3;
  int maxInstrs = 5;
  int maxAddrs = 2;
  double fenceProb = 0.15;
  double branchProb = 0.10;
  int memInstanceBound = 10;
  std::uint64_t stateBudget = 250'000;
  bool stateBudgetSet = false;
  bool emitOnly = false;
  std::string format = "text";
};

int run_fuzz(const FuzzArgs& a) {
  gk_fuzz_bounds b;
  gk_fuzz_bounds_default(&b);
  b.seed = a.seed;
  b.max_threads = a.maxThreads;
  b.max_instrs_per_thread = a.maxInstrs;
  b.max_addrs = a.maxAddrs;
  b.fence_prob = a.fenceProb;
  b.branch_prob = a.branchProb;
  b.mem_instance_bound = a.memInstanceBound;

  if (a.emitOnly) {
    for (int i = 0; i < a.count; ++i) {
      b.seed = a.seed + static_cast<std::uint64_t>(i);
      char* text = nullptr;
      char* err = nullptr;
      if (gk_fuzz_program(&b, &text, &err) != GK_OK) {
        std::cerr << "error: " << take(err) << "\n";
        return kExitMismatch;
      }
      std::cout << take(text) << "\n";
    }
    return kExitOk;
  }

  OptionsHandle oh;
  gk_options_set_state_budget(oh.o, state_budget_or_env(a.stateBudget, a.stateBudgetSet));

  int pass = 0;
  char* json = nullptr;
  char* err = nullptr;
  gk_status st = gk_run_fuzz_suite(&b, a.count, oh.o, &pass, &json, &err);
  if (st != GK_OK) {
    std::cerr << "error: " << take(err) << "\n";
    return kExitMismatch;
  }
  ordered_json r = ordered_json::parse(take(json));
  if (a.format == "json") {
    std::cout << r.dump(2) << "\n";
  } else {
    std::cout << r["conclusive_cases"].get<std::uint64_t>()
              << " conclusive cases, " << r["skipped_budget"].get<int>()
              << " skipped on budget, " << (pass ? "all pass" : "FAILURES")
              << "\n";
    for (const auto& c : r["cases"])
      if (!c.value("pass", false))
        std::cout << "  seed " << c["seed"].get<std::uint64_t>()
                  << ": equivalence=" << c["equivalence"].get<bool>()
                  << " monotonicity=" << c["monotonicity"].get<bool>()
                  << " per_location=" << c["per_location"].get<bool>() << "\n";
  }
  return pass ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"litmus-test toolkit for a family of weak memory models"};
  app.set_version_flag("--version", std::string(gk_version()));
  app.require_subcommand(1);

  CheckArgs check;
  auto* sub_check =
      app.add_subcommand("check", "decide a program's final condition");
  sub_check->add_option("file", check.file, "litmus file")->required();
  sub_check->add_option("--model", check.model, "sc|gam0|gam|gam_arm|all");
  sub_check->add_option("--engine", check.engine, "axiomatic|operational|both");
  sub_check->add_option("--format", check.format, "text|json");
  sub_check->add_option("--mem-bound", check.memBound,
                        "memory instance bound for enumeration");
  auto* cb = sub_check->add_option("--state-budget", check.stateBudget,
                                   "operational state budget");
  sub_check->add_flag("--dump-ppo", check.dumpPpo,
                      "list preserved-program-order pairs per execution");
  sub_check->add_flag("--trace", check.trace,
                      "print a machine trace reaching the condition");

  ExploreArgs explore;
  auto* sub_explore =
      app.add_subcommand("explore", "run only the abstract machine");
  sub_explore->add_option("file", explore.file, "litmus file")->required();
  sub_explore->add_option("--model", explore.model, "sc|gam0|gam");
  sub_explore->add_option("--format", explore.format, "text|json");
  auto* eb = sub_explore->add_option("--state-budget", explore.stateBudget,
                                     "operational state budget");
  sub_explore->add_flag("--trace", explore.trace,
                        "print a machine trace reaching the condition");

  CrossArgs cross;
  auto* sub_cross = app.add_subcommand(
      "crosscheck", "compare axiomatic and operational outcome sets");
  sub_cross->add_option("file", cross.file, "litmus file")->required();
  sub_cross->add_option("--model", cross.model, "sc|gam0|gam|all");
  sub_cross->add_option("--format", cross.format, "text|json");
  sub_cross->add_option("--mem-bound", cross.memBound,
                        "memory instance bound for enumeration");
  auto* xb = sub_cross->add_option("--state-budget", cross.stateBudget,
                                   "operational state budget");

  std::string corpusFormat = "text";
  auto* sub_corpus =
      app.add_subcommand("corpus", "run the built-in regression corpus");
  sub_corpus->add_option("--format", corpusFormat, "text|json");

  FuzzArgs fuzz;
  auto* sub_fuzz = app.add_subcommand(
      "fuzz", "generate random programs and cross-validate the engines");
  sub_fuzz->add_option("--count", fuzz.count, "conclusive cases to run");
  sub_fuzz->add_option("--seed", fuzz.seed, "first seed");
  sub_fuzz->add_option("--max-threads", fuzz.maxThreads, "thread bound");
  sub_fuzz->add_option("--max-instrs", fuzz.maxInstrs,
                       "instructions per thread bound");
  sub_fuzz->add_option("--max-addrs", fuzz.maxAddrs, "address bound");
  sub_fuzz->add_option("--fence-prob", fuzz.fenceProb, "fence probability");
  sub_fuzz->add_option("--branch-prob", fuzz.branchProb, "branch probability");
  sub_fuzz->add_option("--mem-instance-bound", fuzz.memInstanceBound,
                       "memory instances per program");
  auto* fb = sub_fuzz->add_option("--state-budget", fuzz.stateBudget,
                                  "operational state budget");
  sub_fuzz->add_flag("--emit", fuzz.emitOnly,
                     "print generated programs instead of checking them");
  sub_fuzz->add_option("--format", fuzz.format, "text|json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  check.stateBudgetSet = cb->count() > 0;
  explore.stateBudgetSet = eb->count() > 0;
  cross.stateBudgetSet = xb->count() > 0;
  fuzz.stateBudgetSet = fb->count() > 0;

  if (sub_check->parsed()) return run_check(check);
  if (sub_explore->parsed()) return run_explore(explore);
  if (sub_cross->parsed()) return run_crosscheck(cross);
  if (sub_corpus->parsed()) return run_corpus_cmd(corpusFormat);
  if (sub_fuzz->parsed()) return run_fuzz(fuzz);
  return kExitUsage;
}
