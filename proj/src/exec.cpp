#include "exec.hpp"

#include <algorithm>
#include <sstream>

namespace gam {

std::string CandidateExecution::inst_name(int t, int pos) const {
  std::ostringstream os;
  os << prog->threads[t].name << ":" << prog_index(t, pos);
  return os.str();
}

std::int64_t CandidateExecution::final_reg(int t, const std::string& reg) const {
  for (int pos = static_cast<int>(paths[t].size()) - 1; pos >= 0; --pos) {
    const Instruction& ins = instr(t, pos);
    if ((ins.op == Op::Load || ins.op == Op::RegOp) && ins.dest == reg)
      return info[t][pos].value;
  }
  return 0;
}

std::string Outcome::str(const Program& p) const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, v] : regs) {
    if (!first) os << " ";
    first = false;
    os << p.threads[key.first].name << ":" << key.second << "=" << v;
  }
  for (const auto& [label, v] : mem) {
    if (!first) os << " ";
    first = false;
    os << "[" << label << "]=" << v;
  }
  return os.str();
}

OutcomeSpec OutcomeSpec::from(const Program& p) {
  OutcomeSpec s;
  std::set<std::pair<int, std::string>> regs;
  std::set<std::string> labels;
  for (const auto& a : p.cond.atoms) {
    if (a.isMem)
      labels.insert(a.label);
    else
      regs.insert({p.thread_index(a.thread), a.reg});
  }
  s.regs.assign(regs.begin(), regs.end());
  s.memLabels.assign(labels.begin(), labels.end());
  return s;
}

bool satisfies_target(const Program& p, const Outcome& o) {
  auto regVal = [&](int t, const std::string& r) {
    for (const auto& [key, v] : o.regs)
      if (key.first == t && key.second == r) return v;
    throw std::logic_error("outcome missing register " + r);
  };
  auto memVal = [&](const std::string& label) {
    for (const auto& [l, v] : o.mem)
      if (l == label) return v;
    throw std::logic_error("outcome missing label " + label);
  };
  bool holds = true;
  for (const auto& a : p.cond.atoms) {
    std::int64_t rhs = eval_expr(a.rhs, p, [](const std::string&) -> std::int64_t {
      throw std::logic_error("condition value reads a register");
    });
    std::int64_t lhs = a.isMem ? memVal(a.label) : regVal(p.thread_index(a.thread), a.reg);
    if (lhs != rhs) {
      holds = false;
      break;
    }
  }
  return p.cond.isForall ? !holds : holds;
}

}  // namespace gam
