#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"

namespace gam {

// Expressions are sums and differences of atoms: integer literals,
// registers (r0, r1, ...) and address labels (any other identifier).
struct ExprAtom {
  enum class Kind { Lit, Reg, Label };
  Kind kind = Kind::Lit;
  std::int64_t lit = 0;
  std::string name;  // Reg / Label
  bool operator==(const ExprAtom&) const = default;
};

struct ExprTerm {
  bool negate = false;
  ExprAtom atom;
  bool operator==(const ExprTerm&) const = default;
};

struct Expr {
  std::vector<ExprTerm> terms;
  bool operator==(const Expr&) const = default;

  static Expr lit(std::int64_t v);
  static Expr reg(const std::string& name);
  static Expr label(const std::string& name);
  Expr& plus(const Expr& other);   // append other's terms
  Expr& minus(const Expr& other);  // append negated

  void collect_registers(std::set<std::string>& out) const;
  void collect_labels(std::set<std::string>& out) const;
  bool has_registers() const;
};

enum class Op { Load, Store, RegOp, Branch, Fence };
enum class BranchKind { Bnez, Beqz };
enum class FenceClass { L, S };

struct Instruction {
  Op op = Op::RegOp;
  std::string dest;          // Load / RegOp destination register
  Expr addr;                 // Load / Store address expression
  Expr data;                 // Store data / RegOp right-hand side
  BranchKind branchKind = BranchKind::Bnez;
  std::string branchReg;
  std::string branchLabel;
  int branchTarget = -1;     // resolved index; may equal thread size (end)
  FenceClass fenceFrom = FenceClass::L;
  FenceClass fenceTo = FenceClass::L;
  bool operator==(const Instruction&) const = default;

  bool is_memory() const { return op == Op::Load || op == Op::Store; }
};

struct Thread {
  std::string name;
  std::vector<Instruction> instrs;
  std::map<std::string, int> labels;  // label -> instruction index (may be size())
  bool operator==(const Thread&) const = default;
};

// One conjunct of the final condition: either Pn:rk = expr or [label] = expr.
// The right-hand side is register-free.
struct CondAtom {
  bool isMem = false;
  std::string thread;  // register atom
  std::string reg;
  std::string label;   // memory atom
  Expr rhs;
  bool operator==(const CondAtom&) const = default;
};

struct Condition {
  bool isForall = false;  // exists by default
  std::vector<CondAtom> atoms;
  bool operator==(const Condition&) const = default;
};

struct Program {
  std::string name;
  std::vector<std::pair<std::string, std::int64_t>> init;  // label -> value
  std::vector<Thread> threads;
  Condition cond;
  std::map<Model, bool> expect;               // model -> allowed
  std::map<std::string, std::int64_t> addrOf; // filled by resolve_addresses
  bool operator==(const Program&) const = default;

  int thread_index(const std::string& name) const;  // -1 if absent
  std::int64_t init_of_label(const std::string& label) const;
  // Initial memory at an arbitrary address: the label's init value if the
  // address is bound to a label, otherwise 0.
  std::int64_t initial_memory(std::int64_t addr) const;
  // Reverse lookup of a resolved address; empty if not a label address.
  std::string label_of_addr(std::int64_t addr) const;
};

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line, int col);
};

bool is_register_name(const std::string& s);

Program parse_litmus(const std::string& source);

// Binds every address label to a concrete address: labels sorted
// lexicographically get 0x100, 0x108, 0x110, ...
Program resolve_addresses(Program p);

std::string to_litmus(const Program& p);

// Evaluates an expression. Register values come from the callback
// (unwritten registers read 0 by convention at the call sites); labels
// resolve through p.addrOf. Arithmetic wraps, never traps.
std::int64_t eval_expr(const Expr& e, const Program& p,
                       const std::function<std::int64_t(const std::string&)>& regValue);

}  // namespace gam
