#pragma once

#include <string>
#include <vector>

#include "exec.hpp"
#include "harness.hpp"

namespace gam {

// JSON serialization for CLI and C API consumers. Output is byte-stable
// for fixed inputs: ordered keys, sorted outcome sets, no timing fields
// except where noted.

std::string witness_to_json(const Witness& w);
std::string stats_to_json(const ExploreStats& s);
// {"test":..,"model":..,"engine":..,"verdict":..,"expected":..,"pass":..,
//  "outcomes":[..], "witness":{..}?, "stats":{..}?}
std::string verdict_to_json(const Program& p, const std::string& test,
                            const std::string& engine, const Verdict& v,
                            std::optional<bool> expected);
std::string rows_to_json(const std::vector<ReportRow>& rows);
// Includes both engines' outcome sets, their symmetric difference and
// runtimes (the one deliberately unstable field).
std::string cross_report_to_json(const Program& p, const CrossReport& r);
std::string fuzz_suite_to_json(const FuzzSuiteResult& r);

std::vector<std::string> outcome_strings(const Program& p, const std::set<Outcome>& set);

}  // namespace gam
