#include "litmus.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace gam {

// ---------------------------------------------------------------- Expr

Expr Expr::lit(std::int64_t v) {
  Expr e;
  e.terms.push_back({false, {ExprAtom::Kind::Lit, v, {}}});
  return e;
}

Expr Expr::reg(const std::string& name) {
  Expr e;
  e.terms.push_back({false, {ExprAtom::Kind::Reg, 0, name}});
  return e;
}

Expr Expr::label(const std::string& name) {
  Expr e;
  e.terms.push_back({false, {ExprAtom::Kind::Label, 0, name}});
  return e;
}

Expr& Expr::plus(const Expr& other) {
  for (const auto& t : other.terms) terms.push_back(t);
  return *this;
}

Expr& Expr::minus(const Expr& other) {
  for (auto t : other.terms) {
    t.negate = !t.negate;
    terms.push_back(t);
  }
  return *this;
}

void Expr::collect_registers(std::set<std::string>& out) const {
  for (const auto& t : terms)
    if (t.atom.kind == ExprAtom::Kind::Reg) out.insert(t.atom.name);
}

void Expr::collect_labels(std::set<std::string>& out) const {
  for (const auto& t : terms)
    if (t.atom.kind == ExprAtom::Kind::Label) out.insert(t.atom.name);
}

bool Expr::has_registers() const {
  for (const auto& t : terms)
    if (t.atom.kind == ExprAtom::Kind::Reg) return true;
  return false;
}

std::int64_t eval_expr(const Expr& e, const Program& p,
                       const std::function<std::int64_t(const std::string&)>& regValue) {
  std::uint64_t acc = 0;
  for (const auto& t : e.terms) {
    std::int64_t v = 0;
    switch (t.atom.kind) {
      case ExprAtom::Kind::Lit: v = t.atom.lit; break;
      case ExprAtom::Kind::Reg: v = regValue(t.atom.name); break;
      case ExprAtom::Kind::Label: {
        auto it = p.addrOf.find(t.atom.name);
        if (it == p.addrOf.end())
          throw std::logic_error("address label not resolved: " + t.atom.name);
        v = it->second;
        break;
      }
    }
    if (t.negate)
      acc -= static_cast<std::uint64_t>(v);
    else
      acc += static_cast<std::uint64_t>(v);
  }
  return static_cast<std::int64_t>(acc);
}

// ---------------------------------------------------------------- Program

int Program::thread_index(const std::string& n) const {
  for (size_t i = 0; i < threads.size(); ++i)
    if (threads[i].name == n) return static_cast<int>(i);
  return -1;
}

std::int64_t Program::init_of_label(const std::string& label) const {
  for (const auto& [l, v] : init)
    if (l == label) return v;
  return 0;
}

std::int64_t Program::initial_memory(std::int64_t addr) const {
  for (const auto& [label, a] : addrOf)
    if (a == addr) return init_of_label(label);
  return 0;
}

std::string Program::label_of_addr(std::int64_t addr) const {
  for (const auto& [label, a] : addrOf)
    if (a == addr) return label;
  return {};
}

ParseError::ParseError(const std::string& msg, int line_, int col_)
    : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                         std::to_string(col_) + ": " + msg),
      line(line_), col(col_) {}

bool is_register_name(const std::string& s) {
  if (s.size() < 2 || s[0] != 'r') return false;
  for (size_t i = 1; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

// ---------------------------------------------------------------- Lexer

namespace {

struct Tok {
  enum class K { Ident, Int, Str, Punct, Newline, End };
  K k = K::End;
  std::string s;
  std::int64_t i = 0;
  int line = 1, col = 1;
};

std::vector<Tok> lex(const std::string& src) {
  std::vector<Tok> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](Tok t) {
    if (t.k == Tok::K::Newline && !out.empty() && out.back().k == Tok::K::Newline) return;
    out.push_back(std::move(t));
  };
  while (i < src.size()) {
    char c = src[i];
    int tl = line, tc = col;
    auto advance = [&](size_t n) {
      for (size_t k = 0; k < n; ++k) {
        if (src[i + k] == '\n') { ++line; col = 1; } else ++col;
      }
      i += n;
    };
    if (c == '\n') { push({Tok::K::Newline, "\n", 0, tl, tc}); advance(1); continue; }
    if (c == ' ' || c == '\t' || c == '\r') { advance(1); continue; }
    if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '\\') {
      push({Tok::K::Punct, "/\\", 0, tl, tc});
      advance(2);
      continue;
    }
    if (c == '"') {
      advance(1);
      std::string s;
      while (i < src.size() && src[i] != '"' && src[i] != '\n') { s += src[i]; advance(1); }
      if (i >= src.size() || src[i] != '"')
        throw ParseError("unterminated string", tl, tc);
      advance(1);
      push({Tok::K::Str, s, 0, tl, tc});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string s;
      int base = 10;
      if (c == '0' && i + 1 < src.size() && (src[i + 1] == 'x' || src[i + 1] == 'X')) {
        base = 16;
        advance(2);
        while (i < src.size() && std::isxdigit(static_cast<unsigned char>(src[i]))) {
          s += src[i];
          advance(1);
        }
        if (s.empty()) throw ParseError("malformed hex literal", tl, tc);
      } else {
        while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
          s += src[i];
          advance(1);
        }
      }
      Tok t{Tok::K::Int, s, 0, tl, tc};
      t.i = std::stoll(s, nullptr, base);
      push(std::move(t));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string s;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
        s += src[i];
        advance(1);
      }
      push({Tok::K::Ident, s, 0, tl, tc});
      continue;
    }
    static const std::string puncts = "{}[]()=;:,+-";
    if (puncts.find(c) != std::string::npos) {
      push({Tok::K::Punct, std::string(1, c), 0, tl, tc});
      advance(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
  }
  out.push_back({Tok::K::End, "", 0, line, col});
  return out;
}

// -------------------------------------------------------------- Parser

struct Parser {
  std::vector<Tok> toks;
  size_t pos = 0;

  const Tok& peek(size_t ahead = 0) const {
    size_t p = pos + ahead;
    return p < toks.size() ? toks[p] : toks.back();
  }
  const Tok& next() {
    const Tok& t = peek();
    if (t.k != Tok::K::End) ++pos;
    return t;
  }
  [[noreturn]] void fail(const std::string& msg, const Tok& t) const {
    throw ParseError(msg, t.line, t.col);
  }
  void skip_newlines() {
    while (peek().k == Tok::K::Newline) ++pos;
  }
  void skip_seps() {
    while (peek().k == Tok::K::Newline ||
           (peek().k == Tok::K::Punct && peek().s == ";"))
      ++pos;
  }
  bool at_punct(const std::string& s, size_t ahead = 0) const {
    return peek(ahead).k == Tok::K::Punct && peek(ahead).s == s;
  }
  bool at_ident(const std::string& s) const {
    return peek().k == Tok::K::Ident && peek().s == s;
  }
  void expect_punct(const std::string& s) {
    if (!at_punct(s)) fail("expected '" + s + "'", peek());
    ++pos;
  }
  std::string expect_ident(const std::string& what) {
    if (peek().k != Tok::K::Ident) fail("expected " + what, peek());
    return next().s;
  }

  Expr parse_atom_expr() {
    const Tok& t = peek();
    if (t.k == Tok::K::Int) {
      ++pos;
      return Expr::lit(t.i);
    }
    if (t.k == Tok::K::Ident) {
      ++pos;
      if (is_register_name(t.s)) return Expr::reg(t.s);
      return Expr::label(t.s);
    }
    fail("expected expression", t);
  }

  Expr parse_expr() {
    Expr e;
    if (at_punct("-")) {
      ++pos;
      e.minus(parse_atom_expr());
    } else {
      e = parse_atom_expr();
    }
    while (at_punct("+") || at_punct("-")) {
      bool minus = peek().s == "-";
      ++pos;
      Expr rhs = parse_atom_expr();
      if (minus)
        e.minus(rhs);
      else
        e.plus(rhs);
    }
    return e;
  }

  Expr parse_value_expr() { return parse_expr(); }

  Instruction parse_instruction(const Tok& at) {
    Instruction ins;
    if (at_ident("St")) {
      ++pos;
      ins.op = Op::Store;
      expect_punct("[");
      ins.addr = parse_expr();
      expect_punct("]");
      ins.data = parse_expr();
      return ins;
    }
    if (at_ident("bnez") || at_ident("beqz")) {
      ins.op = Op::Branch;
      ins.branchKind = peek().s == "bnez" ? BranchKind::Bnez : BranchKind::Beqz;
      ++pos;
      std::string r = expect_ident("branch register");
      if (!is_register_name(r)) fail("branch condition must be a register", at);
      ins.branchReg = r;
      expect_punct(",");
      ins.branchLabel = expect_ident("branch target label");
      return ins;
    }
    if (peek().k == Tok::K::Ident && peek().s.rfind("Fence", 0) == 0) {
      std::string f = next().s;
      auto cls = [&](char c) { return c == 'L' ? FenceClass::L : FenceClass::S; };
      if (f == "FenceLL" || f == "FenceLS" || f == "FenceSL" || f == "FenceSS") {
        ins.op = Op::Fence;
        ins.fenceFrom = cls(f[5]);
        ins.fenceTo = cls(f[6]);
        return ins;
      }
      fail("unknown fence class '" + f + "'", at);
    }
    if (peek().k == Tok::K::Ident) {
      std::string dest = next().s;
      if (!is_register_name(dest))
        fail("destination '" + dest + "' is not a register", at);
      expect_punct("=");
      if (at_ident("Ld")) {
        ++pos;
        ins.op = Op::Load;
        ins.dest = dest;
        expect_punct("[");
        ins.addr = parse_expr();
        expect_punct("]");
        return ins;
      }
      ins.op = Op::RegOp;
      ins.dest = dest;
      ins.data = parse_expr();
      return ins;
    }
    fail("expected instruction", at);
  }

  // Fence macros expand to their basic fence sequence.
  bool parse_fence_macro(std::vector<Instruction>& out) {
    auto fence = [](FenceClass x, FenceClass y) {
      Instruction i;
      i.op = Op::Fence;
      i.fenceFrom = x;
      i.fenceTo = y;
      return i;
    };
    if (at_ident("FenceAcq")) {
      ++pos;
      out.push_back(fence(FenceClass::L, FenceClass::L));
      out.push_back(fence(FenceClass::L, FenceClass::S));
      return true;
    }
    if (at_ident("FenceRel")) {
      ++pos;
      out.push_back(fence(FenceClass::L, FenceClass::S));
      out.push_back(fence(FenceClass::S, FenceClass::S));
      return true;
    }
    if (at_ident("FenceFull")) {
      ++pos;
      out.push_back(fence(FenceClass::L, FenceClass::L));
      out.push_back(fence(FenceClass::L, FenceClass::S));
      out.push_back(fence(FenceClass::S, FenceClass::L));
      out.push_back(fence(FenceClass::S, FenceClass::S));
      return true;
    }
    return false;
  }

  Thread parse_thread() {
    Thread th;
    th.name = expect_ident("thread name");
    skip_newlines();
    expect_punct("{");
    while (true) {
      skip_seps();
      if (at_punct("}")) {
        ++pos;
        break;
      }
      const Tok& at = peek();
      // Label definitions: one or more "name:" prefixes.
      while (peek().k == Tok::K::Ident && at_punct(":", 1) &&
             !at_ident("St") && !at_ident("Ld")) {
        std::string lbl = peek().s;
        if (is_register_name(lbl))
          fail("label '" + lbl + "' looks like a register", peek());
        if (th.labels.count(lbl)) fail("duplicate label '" + lbl + "'", peek());
        pos += 2;
        th.labels[lbl] = static_cast<int>(th.instrs.size());
        skip_seps();
        if (at_punct("}")) break;  // trailing label binds to thread end
      }
      if (at_punct("}")) {
        ++pos;
        break;
      }
      if (parse_fence_macro(th.instrs)) continue;
      th.instrs.push_back(parse_instruction(at));
      if (!at_punct("}") && peek().k != Tok::K::Newline &&
          !(peek().k == Tok::K::Punct && peek().s == ";") &&
          peek().k != Tok::K::End)
        fail("expected end of instruction", peek());
    }
    if (th.instrs.empty())
      throw ParseError("empty thread '" + th.name + "'", peek().line, peek().col);
    for (size_t i = 0; i < th.instrs.size(); ++i) {
      Instruction& ins = th.instrs[i];
      if (ins.op != Op::Branch) continue;
      auto it = th.labels.find(ins.branchLabel);
      if (it == th.labels.end())
        throw ParseError("undefined branch target '" + ins.branchLabel + "'",
                         peek().line, peek().col);
      ins.branchTarget = it->second;
      if (ins.branchTarget <= static_cast<int>(i))
        throw ParseError("backward branch target '" + ins.branchLabel + "'",
                         peek().line, peek().col);
    }
    return th;
  }

  CondAtom parse_cond_atom() {
    CondAtom a;
    if (at_punct("[")) {
      ++pos;
      a.isMem = true;
      a.label = expect_ident("address label");
      expect_punct("]");
      expect_punct("=");
      a.rhs = parse_value_expr();
      return a;
    }
    a.thread = expect_ident("thread name");
    expect_punct(":");
    std::string r = expect_ident("register");
    if (!is_register_name(r)) fail("'" + r + "' is not a register", peek());
    a.reg = r;
    expect_punct("=");
    a.rhs = parse_value_expr();
    return a;
  }

  Program parse_program() {
    Program p;
    skip_seps();
    if (!at_ident("test")) fail("expected 'test'", peek());
    ++pos;
    if (peek().k != Tok::K::Str) fail("expected test name string", peek());
    p.name = next().s;
    skip_seps();
    if (at_ident("init")) {
      ++pos;
      skip_newlines();
      expect_punct("{");
      while (true) {
        skip_seps();
        if (at_punct("}")) {
          ++pos;
          break;
        }
        if (at_punct(",")) {
          ++pos;
          continue;
        }
        const Tok& at = peek();
        expect_punct("[");
        std::string lbl = expect_ident("address label");
        if (is_register_name(lbl)) fail("'" + lbl + "' is not an address label", at);
        expect_punct("]");
        expect_punct("=");
        bool neg = false;
        if (at_punct("-")) {
          neg = true;
          ++pos;
        }
        if (peek().k != Tok::K::Int) fail("expected integer init value", peek());
        std::int64_t v = next().i;
        for (const auto& [l, unused] : p.init)
          if (l == lbl) fail("duplicate init entry for '" + lbl + "'", at);
        p.init.emplace_back(lbl, neg ? -v : v);
      }
      skip_seps();
    }
    while (at_ident("thread")) {
      ++pos;
      p.threads.push_back(parse_thread());
      skip_seps();
    }
    if (p.threads.empty())
      throw ParseError("no threads", peek().line, peek().col);
    {
      std::set<std::string> names;
      for (const auto& th : p.threads)
        if (!names.insert(th.name).second)
          throw ParseError("duplicate thread '" + th.name + "'", peek().line,
                           peek().col);
    }
    if (!at_ident("exists") && !at_ident("forall"))
      fail("expected 'exists' or 'forall'", peek());
    p.cond.isForall = peek().s == "forall";
    ++pos;
    skip_newlines();
    expect_punct("(");
    skip_newlines();
    p.cond.atoms.push_back(parse_cond_atom());
    skip_newlines();
    while (at_punct("/\\")) {
      ++pos;
      skip_newlines();
      p.cond.atoms.push_back(parse_cond_atom());
      skip_newlines();
    }
    expect_punct(")");
    skip_seps();
    if (at_ident("expect")) {
      ++pos;
      while (peek().k == Tok::K::Ident) {
        const Tok& at = peek();
        std::string m = next().s;
        auto model = model_from_string(m);
        if (!model) fail("unknown model '" + m + "'", at);
        expect_punct("=");
        std::string v = expect_ident("verdict");
        if (v != "allowed" && v != "forbidden")
          fail("verdict must be 'allowed' or 'forbidden'", at);
        if (p.expect.count(*model))
          fail("duplicate expectation for '" + m + "'", at);
        p.expect[*model] = v == "allowed";
      }
      skip_seps();
    }
    if (peek().k != Tok::K::End) fail("unexpected trailing input", peek());
    validate(p);
    return p;
  }

  static void validate(Program& p) {
    std::set<std::string> used;
    for (const auto& [l, unused] : p.init) used.insert(l);
    for (const auto& th : p.threads)
      for (const auto& ins : th.instrs) {
        ins.addr.collect_labels(used);
        ins.data.collect_labels(used);
      }
    for (const auto& a : p.cond.atoms) {
      if (a.isMem) used.insert(a.label);
      a.rhs.collect_labels(used);
    }
    std::set<std::string> inInit;
    for (const auto& [l, unused] : p.init) inInit.insert(l);
    for (const auto& l : used)
      if (!inInit.count(l)) p.init.emplace_back(l, 0);

    for (const auto& a : p.cond.atoms) {
      if (a.rhs.has_registers())
        throw ParseError("condition value must not read registers", 0, 0);
      if (a.isMem) continue;
      int ti = p.thread_index(a.thread);
      if (ti < 0) throw ParseError("condition names unknown thread '" + a.thread + "'", 0, 0);
      bool written = false;
      for (const auto& ins : p.threads[ti].instrs)
        if ((ins.op == Op::Load || ins.op == Op::RegOp) && ins.dest == a.reg)
          written = true;
      if (!written)
        throw ParseError("condition reads register '" + a.reg +
                             "' never written in thread '" + a.thread + "'",
                         0, 0);
    }
  }
};

}  // namespace

Program parse_litmus(const std::string& source) {
  Parser p{lex(source)};
  return p.parse_program();
}

Program resolve_addresses(Program p) {
  std::vector<std::string> labels;
  for (const auto& [l, unused] : p.init) labels.push_back(l);
  std::sort(labels.begin(), labels.end());
  p.addrOf.clear();
  std::int64_t addr = 0x100;
  for (const auto& l : labels) {
    p.addrOf[l] = addr;
    addr += 8;
  }
  return p;
}

// --------------------------------------------------------------- Print

namespace {

std::string expr_str(const Expr& e) {
  std::ostringstream os;
  for (size_t i = 0; i < e.terms.size(); ++i) {
    const auto& t = e.terms[i];
    if (i == 0) {
      if (t.negate) os << "-";
    } else {
      os << (t.negate ? " - " : " + ");
    }
    switch (t.atom.kind) {
      case ExprAtom::Kind::Lit: os << t.atom.lit; break;
      default: os << t.atom.name; break;
    }
  }
  return os.str();
}

std::string instr_str(const Instruction& ins) {
  std::ostringstream os;
  switch (ins.op) {
    case Op::Load:
      os << ins.dest << " = Ld [" << expr_str(ins.addr) << "]";
      break;
    case Op::Store:
      os << "St [" << expr_str(ins.addr) << "] " << expr_str(ins.data);
      break;
    case Op::RegOp:
      os << ins.dest << " = " << expr_str(ins.data);
      break;
    case Op::Branch:
      os << (ins.branchKind == BranchKind::Bnez ? "bnez " : "beqz ")
         << ins.branchReg << ", " << ins.branchLabel;
      break;
    case Op::Fence:
      os << "Fence" << (ins.fenceFrom == FenceClass::L ? "L" : "S")
         << (ins.fenceTo == FenceClass::L ? "L" : "S");
      break;
  }
  return os.str();
}

}  // namespace

std::string to_litmus(const Program& p) {
  std::ostringstream os;
  os << "test \"" << p.name << "\"\n";
  if (!p.init.empty()) {
    os << "init {";
    for (const auto& [l, v] : p.init) os << " [" << l << "]=" << v;
    os << " }\n";
  }
  for (const auto& th : p.threads) {
    os << "thread " << th.name << " {\n";
    std::map<int, std::vector<std::string>> labelsAt;
    for (const auto& [l, idx] : th.labels) labelsAt[idx].push_back(l);
    for (auto& [idx, ls] : labelsAt) std::sort(ls.begin(), ls.end());
    for (size_t i = 0; i < th.instrs.size(); ++i) {
      os << "  ";
      auto it = labelsAt.find(static_cast<int>(i));
      if (it != labelsAt.end())
        for (const auto& l : it->second) os << l << ": ";
      os << instr_str(th.instrs[i]) << "\n";
    }
    auto it = labelsAt.find(static_cast<int>(th.instrs.size()));
    if (it != labelsAt.end())
      for (const auto& l : it->second) os << "  " << l << ":\n";
    os << "}\n";
  }
  os << (p.cond.isForall ? "forall (" : "exists (");
  for (size_t i = 0; i < p.cond.atoms.size(); ++i) {
    const auto& a = p.cond.atoms[i];
    if (i) os << " /\\ ";
    if (a.isMem)
      os << "[" << a.label << "]=" << expr_str(a.rhs);
    else
      os << a.thread << ":" << a.reg << "=" << expr_str(a.rhs);
  }
  os << ")\n";
  if (!p.expect.empty()) {
    os << "expect";
    for (const auto& [m, allowed] : p.expect)
      os << " " << to_string(m) << "=" << (allowed ? "allowed" : "forbidden");
    os << "\n";
  }
  return os.str();
}

}  // namespace gam
