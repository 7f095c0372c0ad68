#include "pagai/frontend/ast.hpp"

#include <algorithm>
#include <sstream>

namespace pagai {

namespace {

bool has_call(const Expr& e) {
  if (e.kind == Expr::Call) return true;
  return std::any_of(e.args.begin(), e.args.end(), has_call);
}

bool has_short_circuit(const Expr& e) {
  if (e.kind == Expr::Bin && (e.op == BinOp::And || e.op == BinOp::Or)) return true;
  return std::any_of(e.args.begin(), e.args.end(), has_short_circuit);
}

class Inliner {
 public:
  Inliner(const Program& src, int depth) : src_(src), depth_(depth) {}

  Function run(const Function& f) {
    Function g = f;
    g.body.clear();
    g_ = &g;
    std::vector<int> vmap(f.vars.size());
    for (std::size_t k = 0; k < vmap.size(); ++k) vmap[k] = static_cast<int>(k);
    std::vector<std::string> stack{f.name};
    Ctx c{&vmap, 0, &stack, -1};
    stmts(f.body, g.body, c);
    g_ = nullptr;
    return g;
  }

 private:
  struct Ctx {
    const std::vector<int>* vmap;
    int level;
    std::vector<std::string>* stack;
    int ret_target;
  };

  const Program& src_;
  int depth_;
  Function* g_ = nullptr;
  int next_id_ = 0;

  // Maps variables; calls become nondeterministic values.
  Expr rename(const Expr& e, const Ctx& c) {
    if (e.kind == Expr::Call) return Expr::nondet(e.type, e.pos);
    Expr r = e;
    if (r.kind == Expr::Var) r.var = (*c.vmap)[e.var];
    for (auto& a : r.args) a = rename(a, c);
    return r;
  }

  int temp(const std::string& name, Type t, Pos p, std::vector<Stmt>& out, Expr init) {
    int v = g_->add_var(name, t, p);
    Stmt d;
    d.kind = Stmt::Decl;
    d.pos = p;
    d.var = v;
    d.has_expr = true;
    d.expr = std::move(init);
    out.push_back(std::move(d));
    return v;
  }

  // Evaluation-order hoisting of calls and nondet reads into statements.
  Expr hoist(const Expr& e, const Ctx& c, std::vector<Stmt>& out) {
    switch (e.kind) {
      case Expr::Lit: return e;
      case Expr::Var: {
        Expr r = e;
        r.var = (*c.vmap)[e.var];
        return r;
      }
      case Expr::Nondet: {
        int v = temp("_nd", e.type, e.pos, out, e);
        return Expr::variable(v, e.type, e.pos);
      }
      case Expr::Call: {
        std::vector<Expr> args;
        for (const auto& a : e.args) args.push_back(hoist(a, c, out));
        bool recursive = std::find(c.stack->begin(), c.stack->end(), e.callee) != c.stack->end();
        if (recursive || c.level >= depth_) {
          if (e.type == Type::Void) return Expr::lit(0, Type::Int, e.pos);
          int v = temp("_nd", e.type, e.pos, out, Expr::nondet(e.type, e.pos));
          return Expr::variable(v, e.type, e.pos);
        }
        return inline_call(e, std::move(args), c, out);
      }
      default: {
        Expr r = e;
        for (std::size_t k = 0; k < e.args.size(); ++k) r.args[k] = hoist(e.args[k], c, out);
        return r;
      }
    }
  }

  Expr inline_call(const Expr& call, std::vector<Expr> args, const Ctx& c, std::vector<Stmt>& out) {
    const Function& callee = *src_.find(call.callee);
    Stmt inl;
    inl.kind = Stmt::Inlined;
    inl.pos = call.pos;
    inl.inline_id = next_id_++;
    std::vector<int> vmap(callee.vars.size());
    for (std::size_t k = 0; k < callee.vars.size(); ++k)
      vmap[k] = g_->add_var(callee.name + "_" + callee.vars[k].name, callee.vars[k].type, callee.vars[k].pos);
    if (callee.ret != Type::Void) {
      inl.ret_var = g_->add_var(callee.name + "_ret", callee.ret, call.pos);
      inl.ret_havoc_on_fallthrough = true;
    }
    for (std::size_t k = 0; k < callee.params.size(); ++k) {
      Stmt d;
      d.kind = Stmt::Decl;
      d.pos = call.pos;
      d.var = vmap[callee.params[k]];
      d.has_expr = true;
      d.expr = std::move(args[k]);
      inl.body.push_back(std::move(d));
    }
    c.stack->push_back(callee.name);
    Ctx inner{&vmap, c.level + 1, c.stack, inl.inline_id};
    stmts(callee.body, inl.body, inner);
    c.stack->pop_back();
    int ret = inl.ret_var;
    out.push_back(std::move(inl));
    if (ret < 0) return Expr::lit(0, Type::Int, call.pos);
    return Expr::variable(ret, callee.ret, call.pos);
  }

  // Condition of if/assert/assume: hoisted unless a call sits under && or ||.
  Expr condition(const Expr& e, const Ctx& c, std::vector<Stmt>& out) {
    if (has_call(e) && !has_short_circuit(e)) return hoist(e, c, out);
    return rename(e, c);
  }

  void stmts(const std::vector<Stmt>& in, std::vector<Stmt>& out, const Ctx& c) {
    for (const auto& s : in) stmt(s, out, c);
  }

  void stmt(const Stmt& s, std::vector<Stmt>& out, const Ctx& c) {
    Stmt r = s;
    r.body.clear();
    r.orelse.clear();
    r.step.clear();
    if (s.var >= 0) r.var = (*c.vmap)[s.var];
    switch (s.kind) {
      case Stmt::Decl:
      case Stmt::Assign:
      case Stmt::Return:
        if (s.kind == Stmt::Return && s.target < 0) r.target = c.ret_target;
        if (s.kind == Stmt::Assign || s.has_expr)
          r.expr = has_call(s.expr) ? hoist(s.expr, c, out) : rename(s.expr, c);
        break;
      case Stmt::CallStmt:
        hoist(s.expr, c, out);
        return;
      case Stmt::If:
        r.expr = condition(s.expr, c, out);
        stmts(s.body, r.body, c);
        stmts(s.orelse, r.orelse, c);
        break;
      case Stmt::Assert:
      case Stmt::Assume:
        r.expr = condition(s.expr, c, out);
        break;
      case Stmt::While:
        r.expr = rename(s.expr, c);
        stmts(s.body, r.body, c);
        stmts(s.step, r.step, c);
        break;
      case Stmt::Block:
      case Stmt::Inlined:
        stmts(s.body, r.body, c);
        break;
      case Stmt::Break:
      case Stmt::Continue:
        break;
    }
    out.push_back(std::move(r));
  }
};

void print_expr(std::ostream& os, const Function& f, const Expr& e) {
  switch (e.kind) {
    case Expr::Lit:
      if (e.type == Type::Bool)
        os << (e.value != 0 ? "true" : "false");
      else
        os << to_string(e.value);
      return;
    case Expr::Var: os << f.vars[e.var].name; return;
    case Expr::Neg:
      os << "-(";
      print_expr(os, f, e.args[0]);
      os << ")";
      return;
    case Expr::Not:
      os << "!(";
      print_expr(os, f, e.args[0]);
      os << ")";
      return;
    case Expr::Bin:
      os << "(";
      print_expr(os, f, e.args[0]);
      os << " " << to_string(e.op) << " ";
      print_expr(os, f, e.args[1]);
      os << ")";
      return;
    case Expr::Call:
      os << e.callee << "(";
      for (std::size_t k = 0; k < e.args.size(); ++k) {
        if (k) os << ", ";
        print_expr(os, f, e.args[k]);
      }
      os << ")";
      return;
    case Expr::Nondet: os << (e.type == Type::Real ? "nondet_real()" : "nondet_int()"); return;
  }
}

void print_stmts(std::ostream& os, const Function& f, const std::vector<Stmt>& ss, int ind);

void print_stmt(std::ostream& os, const Function& f, const Stmt& s, int ind) {
  std::string pad(static_cast<std::size_t>(ind) * 2, ' ');
  switch (s.kind) {
    case Stmt::Decl:
      os << pad << to_string(f.vars[s.var].type) << " " << f.vars[s.var].name;
      if (s.has_expr) {
        os << " = ";
        print_expr(os, f, s.expr);
      }
      os << ";\n";
      break;
    case Stmt::Assign:
      os << pad << f.vars[s.var].name << " = ";
      print_expr(os, f, s.expr);
      os << ";\n";
      break;
    case Stmt::If:
      os << pad << "if ";
      print_expr(os, f, s.expr);
      os << " {\n";
      print_stmts(os, f, s.body, ind + 1);
      if (!s.orelse.empty()) {
        os << pad << "} else {\n";
        print_stmts(os, f, s.orelse, ind + 1);
      }
      os << pad << "}\n";
      break;
    case Stmt::While:
      os << pad << "while ";
      print_expr(os, f, s.expr);
      os << " {\n";
      print_stmts(os, f, s.body, ind + 1);
      if (!s.step.empty()) {
        os << pad << "  /* step */\n";
        print_stmts(os, f, s.step, ind + 1);
      }
      os << pad << "}\n";
      break;
    case Stmt::Break: os << pad << "break;\n"; break;
    case Stmt::Continue: os << pad << "continue;\n"; break;
    case Stmt::Return:
      os << pad << "return";
      if (s.target >= 0) os << "@" << s.target;
      if (s.has_expr) {
        os << " ";
        print_expr(os, f, s.expr);
      }
      os << ";\n";
      break;
    case Stmt::Assert:
    case Stmt::Assume:
      os << pad << (s.kind == Stmt::Assert ? "assert" : "assume") << "(";
      print_expr(os, f, s.expr);
      os << ");\n";
      break;
    case Stmt::CallStmt:
      os << pad;
      print_expr(os, f, s.expr);
      os << ";\n";
      break;
    case Stmt::Block:
      os << pad << "{\n";
      print_stmts(os, f, s.body, ind + 1);
      os << pad << "}\n";
      break;
    case Stmt::Inlined:
      os << pad << "inline#" << s.inline_id;
      if (s.ret_var >= 0) os << " -> " << f.vars[s.ret_var].name;
      os << " {\n";
      print_stmts(os, f, s.body, ind + 1);
      os << pad << "}\n";
      break;
  }
}

void print_stmts(std::ostream& os, const Function& f, const std::vector<Stmt>& ss, int ind) {
  for (const auto& s : ss) print_stmt(os, f, s, ind);
}

}  // namespace

Program inline_calls(const Program& p, int depth) {
  Program out;
  for (const auto& f : p.functions) {
    Inliner in(p, std::max(depth, 0));
    out.functions.push_back(in.run(f));
  }
  return out;
}

std::string to_source(const Program& p) {
  std::ostringstream os;
  for (const auto& f : p.functions) {
    os << to_string(f.ret) << " " << f.name << "(";
    for (std::size_t k = 0; k < f.params.size(); ++k) {
      if (k) os << ", ";
      os << to_string(f.vars[f.params[k]].type) << " " << f.vars[f.params[k]].name;
    }
    os << ") {\n";
    print_stmts(os, f, f.body, 1);
    os << "}\n";
  }
  return os.str();
}

}  // namespace pagai
