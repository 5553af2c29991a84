#include "gamkit.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "axiomatic.hpp"
#include "harness.hpp"
#include "litmus.hpp"
#include "operational.hpp"
#include "report.hpp"

struct gk_program {
  gam::Program prog;  // address-resolved
};

struct gk_options {
  gam::EngineOptions opt;
};

struct gk_verdict {
  gam::Verdict v;
  std::vector<std::string> outcomes;
  std::string witnessJson, statsJson, reportJson, canonicalSource;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_err(char** err_out, const std::string& msg) {
  if (err_out) *err_out = dup_string(msg);
}

gam::Model to_model(gk_model m) {
  switch (m) {
    case GK_MODEL_SC: return gam::Model::Sc;
    case GK_MODEL_GAM0: return gam::Model::Gam0;
    case GK_MODEL_GAM: return gam::Model::Gam;
    case GK_MODEL_GAM_ARM: return gam::Model::GamArm;
  }
  return gam::Model::Gam;
}

const gam::EngineOptions& opts_of(const gk_options* o) {
  static const gam::EngineOptions defaults;
  return o ? o->opt : defaults;
}

gam::FuzzBounds from_c(const gk_fuzz_bounds* b) {
  gam::FuzzBounds out;
  if (!b) return out;
  out.seed = b->seed;
  out.maxThreads = b->max_threads;
  out.maxInstrPerThread = b->max_instrs_per_thread;
  out.maxAddrs = b->max_addrs;
  if (b->values && b->value_count > 0)
    out.values.assign(b->values, b->values + b->value_count);
  out.fenceProb = b->fence_prob;
  out.branchProb = b->branch_prob;
  out.memInstanceBound = b->mem_instance_bound;
  return out;
}

// Runs `fn`, mapping exceptions onto status codes.
template <typename Fn>
gk_status guarded(char** err_out, Fn&& fn) {
  try {
    return fn();
  } catch (const gam::ParseError& e) {
    set_err(err_out, e.what());
    return GK_ERR_PARSE;
  } catch (const gam::BudgetError& e) {
    set_err(err_out, e.what());
    return GK_ERR_BUDGET;
  } catch (const gam::UnsupportedError& e) {
    set_err(err_out, e.what());
    return GK_ERR_UNSUPPORTED;
  } catch (const std::exception& e) {
    set_err(err_out, e.what());
    return GK_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* gk_version(void) { return "0.1.0"; }

const char* gk_status_str(gk_status s) {
  switch (s) {
    case GK_OK: return "ok";
    case GK_ERR_INVALID_ARG: return "invalid argument";
    case GK_ERR_PARSE: return "parse error";
    case GK_ERR_UNSUPPORTED: return "unsupported";
    case GK_ERR_BUDGET: return "budget exceeded";
    case GK_ERR_IO: return "io error";
    case GK_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

void gk_free_string(char* s) { std::free(s); }

gk_status gk_parse(const char* source, gk_program** out, char** err_out) {
  if (!source || !out) {
    set_err(err_out, "null argument");
    return GK_ERR_INVALID_ARG;
  }
  return guarded(err_out, [&] {
    auto* p = new gk_program{gam::resolve_addresses(gam::parse_litmus(source))};
    *out = p;
    return GK_OK;
  });
}

gk_status gk_parse_file(const char* path, gk_program** out, char** err_out) {
  if (!path || !out) {
    set_err(err_out, "null argument");
    return GK_ERR_INVALID_ARG;
  }
  std::ifstream in(path);
  if (!in) {
    set_err(err_out, std::string("cannot open ") + path);
    return GK_ERR_IO;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return gk_parse(buf.str().c_str(), out, err_out);
}

void gk_program_free(gk_program* p) { delete p; }

const char* gk_program_name(const gk_program* p) {
  return p ? p->prog.name.c_str() : "";
}

int gk_program_thread_count(const gk_program* p) {
  return p ? static_cast<int>(p->prog.threads.size()) : 0;
}

int gk_program_expectation(const gk_program* p, gk_model m) {
  if (!p) return -1;
  auto it = p->prog.expect.find(to_model(m));
  if (it == p->prog.expect.end()) return -1;
  return it->second ? 1 : 0;
}

gk_status gk_program_source(const gk_program* p, char** out) {
  if (!p || !out) return GK_ERR_INVALID_ARG;
  *out = dup_string(gam::to_litmus(p->prog));
  return GK_OK;
}

gk_options* gk_options_new(void) { return new gk_options{}; }
void gk_options_free(gk_options* o) { delete o; }

void gk_options_set_mem_bound(gk_options* o, int bound) {
  if (o) o->opt.memBound = bound;
}
void gk_options_set_state_budget(gk_options* o, uint64_t budget) {
  if (o) o->opt.stateBudget = budget;
}
void gk_options_set_trace(gk_options* o, int enable) {
  if (o) o->opt.wantTrace = enable != 0;
}
void gk_options_set_ppo_dump(gk_options* o, int enable) {
  if (o) o->opt.wantPpoDump = enable != 0;
}

gk_status gk_check(const gk_program* p, gk_model m, gk_engine e,
                   const gk_options* o, gk_verdict** out, char** err_out) {
  if (!p || !out) {
    set_err(err_out, "null argument");
    return GK_ERR_INVALID_ARG;
  }
  return guarded(err_out, [&] {
    const gam::ModelConfig cfg = gam::ModelConfig::for_model(to_model(m));
    const gam::EngineOptions& opt = opts_of(o);
    auto* v = new gk_verdict{};
    try {
      v->v = e == GK_ENGINE_AXIOMATIC
                 ? gam::allowed_axiomatic(p->prog, cfg, opt)
                 : gam::explore_verdict(p->prog, cfg, opt);
    } catch (...) {
      delete v;
      throw;
    }
    v->outcomes = gam::outcome_strings(p->prog, v->v.outcomes);
    if (v->v.witness) v->witnessJson = gam::witness_to_json(*v->v.witness);
    if (v->v.stats) v->statsJson = gam::stats_to_json(*v->v.stats);
    std::optional<bool> expected;
    auto it = p->prog.expect.find(to_model(m));
    if (it != p->prog.expect.end()) expected = it->second;
    v->reportJson = gam::verdict_to_json(
        p->prog, p->prog.name,
        e == GK_ENGINE_AXIOMATIC ? "axiomatic" : "operational", v->v, expected);
    *out = v;
    return GK_OK;
  });
}

void gk_verdict_free(gk_verdict* v) { delete v; }

int gk_verdict_allowed(const gk_verdict* v) {
  return v && v->v.allowed ? 1 : 0;
}

size_t gk_verdict_outcome_count(const gk_verdict* v) {
  return v ? v->outcomes.size() : 0;
}

const char* gk_verdict_outcome(const gk_verdict* v, size_t i) {
  if (!v || i >= v->outcomes.size()) return nullptr;
  return v->outcomes[i].c_str();
}

const char* gk_verdict_witness_json(const gk_verdict* v) {
  return v && !v->witnessJson.empty() ? v->witnessJson.c_str() : nullptr;
}

const char* gk_verdict_stats_json(const gk_verdict* v) {
  return v && !v->statsJson.empty() ? v->statsJson.c_str() : nullptr;
}

const char* gk_verdict_trace(const gk_verdict* v) {
  return v && !v->v.trace.empty() ? v->v.trace.c_str() : nullptr;
}

const char* gk_verdict_ppo_dump(const gk_verdict* v) {
  return v && !v->v.ppoDump.empty() ? v->v.ppoDump.c_str() : nullptr;
}

const char* gk_verdict_report_json(const gk_verdict* v) {
  return v ? v->reportJson.c_str() : "";
}

gk_status gk_crosscheck(const gk_program* p, gk_model m, const gk_options* o,
                        int* pass_out, char** report_json_out, char** err_out) {
  if (!p) {
    set_err(err_out, "null argument");
    return GK_ERR_INVALID_ARG;
  }
  return guarded(err_out, [&] {
    gam::CrossReport r = gam::cross_check(p->prog, to_model(m), opts_of(o));
    if (pass_out) *pass_out = r.pass ? 1 : 0;
    if (report_json_out)
      *report_json_out = dup_string(gam::cross_report_to_json(p->prog, r));
    return GK_OK;
  });
}

size_t gk_corpus_count(void) { return gam::corpus().size(); }

const char* gk_corpus_name(size_t i) {
  const auto& c = gam::corpus();
  return i < c.size() ? c[i].name.c_str() : nullptr;
}

const char* gk_corpus_source(size_t i) {
  const auto& c = gam::corpus();
  return i < c.size() ? c[i].source.c_str() : nullptr;
}

gk_status gk_run_corpus(const gk_options* o, int* pass_out,
                        char** report_json_out, char** err_out) {
  return guarded(err_out, [&] {
    auto rows = gam::run_corpus(opts_of(o));
    bool pass = true;
    for (const auto& r : rows) pass = pass && r.pass;
    if (pass_out) *pass_out = pass ? 1 : 0;
    if (report_json_out) *report_json_out = dup_string(gam::rows_to_json(rows));
    return GK_OK;
  });
}

void gk_fuzz_bounds_default(gk_fuzz_bounds* b) {
  if (!b) return;
  gam::FuzzBounds d;
  b->seed = d.seed;
  b->max_threads = d.maxThreads;
  b->max_instrs_per_thread = d.maxInstrPerThread;
  b->max_addrs = d.maxAddrs;
  b->values = nullptr;
  b->value_count = 0;
  b->fence_prob = d.fenceProb;
  b->branch_prob = d.branchProb;
  b->mem_instance_bound = d.memInstanceBound;
}

gk_status gk_fuzz_program(const gk_fuzz_bounds* b, char** litmus_out,
                          char** err_out) {
  if (!litmus_out) return GK_ERR_INVALID_ARG;
  return guarded(err_out, [&] {
    gam::Program p = gam::fuzz_program(from_c(b));
    *litmus_out = dup_string(gam::to_litmus(p));
    return GK_OK;
  });
}

gk_status gk_run_fuzz_suite(const gk_fuzz_bounds* b, int count,
                            const gk_options* o, int* pass_out,
                            char** report_json_out, char** err_out) {
  if (count < 0) return GK_ERR_INVALID_ARG;
  return guarded(err_out, [&] {
    gam::FuzzSuiteResult r = gam::run_fuzz_suite(from_c(b), count, opts_of(o));
    if (pass_out) *pass_out = r.pass ? 1 : 0;
    if (report_json_out)
      *report_json_out = dup_string(gam::fuzz_suite_to_json(r));
    return GK_OK;
  });
}

}  // extern "C"
