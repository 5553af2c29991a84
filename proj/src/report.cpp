#include "report.hpp"

#include <json.hpp>

namespace gam {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json witness_json(const Witness& w) {
  ordered_json j;
  j["rf"] = ordered_json::array();
  for (const auto& [load, from] : w.rfPairs)
    j["rf"].push_back(ordered_json{{"load", load}, {"from", from}});
  j["mo"] = w.mo;
  return j;
}

ordered_json stats_json(const ExploreStats& s) {
  ordered_json j;
  j["states"] = s.states;
  j["transitions"] = s.transitions;
  j["kills"] = ordered_json{{"branch", s.branchKills}, {"memaddr", s.memaddrKills}};
  return j;
}

}  // namespace

std::vector<std::string> outcome_strings(const Program& p,
                                         const std::set<Outcome>& set) {
  std::vector<std::string> out;
  for (const auto& o : set) out.push_back(o.str(p));
  return out;
}

std::string witness_to_json(const Witness& w) { return witness_json(w).dump(2); }

std::string stats_to_json(const ExploreStats& s) { return stats_json(s).dump(2); }

std::string verdict_to_json(const Program& p, const std::string& test,
                            const std::string& engine, const Verdict& v,
                            std::optional<bool> expected) {
  ordered_json j;
  j["test"] = test;
  j["model"] = to_string(v.model);
  j["engine"] = engine;
  j["verdict"] = v.allowed ? "allowed" : "forbidden";
  if (expected) {
    j["expected"] = *expected ? "allowed" : "forbidden";
    j["pass"] = v.allowed == *expected;
  }
  j["outcomes"] = outcome_strings(p, v.outcomes);
  if (v.witness) j["witness"] = witness_json(*v.witness);
  if (v.stats) j["stats"] = stats_json(*v.stats);
  return j.dump(2);
}

std::string rows_to_json(const std::vector<ReportRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j;
    j["test"] = r.test;
    j["model"] = to_string(r.model);
    j["engine"] = r.engine;
    j["verdict"] = r.allowed ? "allowed" : "forbidden";
    if (r.expected) j["expected"] = *r.expected ? "allowed" : "forbidden";
    j["pass"] = r.pass;
    arr.push_back(j);
  }
  return arr.dump(2);
}

std::string cross_report_to_json(const Program& p, const CrossReport& r) {
  ordered_json j;
  j["model"] = to_string(r.model);
  j["pass"] = r.pass;
  j["inconclusive"] = r.inconclusive;
  if (!r.error.empty()) j["error"] = r.error;
  j["axiomatic"] = outcome_strings(p, r.axiomatic);
  j["operational"] = outcome_strings(p, r.operational);
  std::vector<std::string> onlyAx, onlyOp;
  for (const auto& o : r.axiomatic)
    if (!r.operational.count(o)) onlyAx.push_back(o.str(p));
  for (const auto& o : r.operational)
    if (!r.axiomatic.count(o)) onlyOp.push_back(o.str(p));
  j["only_axiomatic"] = onlyAx;
  j["only_operational"] = onlyOp;
  j["runtime_ms"] = ordered_json{{"axiomatic", r.axiomaticMs},
                                 {"operational", r.operationalMs}};
  return j.dump(2);
}

std::string fuzz_suite_to_json(const FuzzSuiteResult& r) {
  ordered_json j;
  j["pass"] = r.pass;
  j["conclusive_cases"] = r.cases.size();
  j["skipped_budget"] = r.skippedBudget;
  ordered_json arr = ordered_json::array();
  for (const auto& c : r.cases) {
    ordered_json cj;
    cj["seed"] = c.seed;
    cj["name"] = c.name;
    cj["equivalence"] = c.equivalence;
    cj["monotonicity"] = c.monotonicity;
    cj["per_location"] = c.perLocation;
    cj["pass"] = c.pass;
    arr.push_back(cj);
  }
  j["cases"] = arr;
  return j.dump(2);
}

}  // namespace gam
