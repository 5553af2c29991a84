#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "exec.hpp"

namespace gam {

struct CorpusEntry {
  std::string name;
  std::string source;  // litmus text, embedded at build time
  Program program;     // parsed and address-resolved
  std::map<Model, bool> expect;
  std::map<Model, std::string> provenance;  // "stated" or "derived"
};

// The built-in regression corpus.
const std::vector<CorpusEntry>& corpus();

struct CrossReport {
  Model model = Model::Gam;
  bool pass = false;
  bool inconclusive = false;  // an engine hit a resource budget
  std::string error;
  std::set<Outcome> axiomatic, operational;
  double axiomaticMs = 0, operationalMs = 0;
};

// Runs both engines and compares outcome sets.
CrossReport cross_check(const Program& p, Model m, const EngineOptions& opt = {});

struct FuzzBounds {
  std::uint64_t seed = 1;
  int maxThreads = 3;
  int maxInstrPerThread = 5;
  int maxAddrs = 2;
  std::vector<std::int64_t> values = {0, 1, 2};
  double fenceProb = 0.15;
  double branchProb = 0.10;
  int memInstanceBound = 10;
};

// Deterministic in the seed. The generated condition enumerates every
// load destination register, so outcome sets cover the full load-value
// vector. Degenerate bounds are clamped after a failed attempt rather
// than reported as errors.
Program fuzz_program(const FuzzBounds& bounds);

// True when every outcome allowed under the stricter model is also
// allowed under the more relaxed one (axiomatic engine).
bool check_inclusion(const Program& p, Model relaxed, Model strict,
                     const EngineOptions& opt = {});

// Outcomes reachable under per-location sequential consistency: for the
// execution's values there must exist, for every address, a total order
// of that address's accesses that respects each thread's program order
// and has every load reading its nearest preceding store (or the
// initialization store).
std::set<Outcome> per_location_sc_outcomes(const Program& p, int memBound = 10);

struct ReportRow {
  std::string test;
  Model model = Model::Gam;
  std::string engine;  // "axiomatic" / "operational"
  bool allowed = false;
  std::optional<bool> expected;
  bool pass = false;
};

// Runs the whole corpus under every model; the operational engine is
// restricted to the models it supports.
std::vector<ReportRow> run_corpus(const EngineOptions& opt = {});

struct FuzzCase {
  std::uint64_t seed = 0;
  std::string name;
  bool equivalence = false;   // axiomatic == operational (sc, gam0, gam)
  bool monotonicity = false;  // sc ⋐ gam ⋐ gam_arm ⋐ gam0 outcome inclusion
  bool perLocation = false;   // gam outcomes within per-location sc
  bool pass = false;
};

struct FuzzSuiteResult {
  std::vector<FuzzCase> cases;
  int skippedBudget = 0;  // attempts dropped on a resource budget
  bool pass = false;
};

// Generates programs seed, seed+1, ... until `count` conclusive cases
// ran, checking engine equivalence, model monotonicity and the
// per-location bound on each.
FuzzSuiteResult run_fuzz_suite(const FuzzBounds& bounds, int count,
                               const EngineOptions& opt = {});

}  // namespace gam
