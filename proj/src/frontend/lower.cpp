#include "pagai/frontend/passes.hpp"

#include <map>

namespace pagai {

std::vector<int> top_level_vars(const Function& f) {
  std::vector<int> out = f.params;
  for (const auto& s : f.body) {
    if (s.kind == Stmt::Decl) out.push_back(s.var);
    if (s.kind == Stmt::Block) {
      bool decls = !s.body.empty();
      for (const auto& d : s.body) decls = decls && d.kind == Stmt::Decl;
      if (decls)
        for (const auto& d : s.body) out.push_back(d.var);
    }
  }
  return out;
}

namespace {

class Lowerer {
 public:
  Lowerer(const Function& f, const LowerOptions& opt) : f_(f), opt_(opt) {}

  Cfg run() {
    cfg_.function = f_.name;
    for (const auto& v : f_.vars) cfg_.add_var(v.name, v.name, v.type == Type::Int, v.pos.line);
    if (f_.ret != Type::Void) ret_var_ = static_cast<int>(cfg_.add_var(kReturnVar, kReturnVar, f_.ret == Type::Int));
    cfg_.entry = cfg_.add_block(f_.pos.line);
    cfg_.exit = cfg_.add_block();
    cfg_.fail = cfg_.add_block();
    cfg_.assume_exit = cfg_.add_block();
    cur_ = cfg_.entry;
    for (int p : f_.params) def(static_cast<VarId>(p), Rhs::havoc(f_.vars[p].type == Type::Int));
    stmts(f_.body);
    if (ret_var_ >= 0)
      def(static_cast<VarId>(ret_var_), f_.name == "main" ? Rhs::linear(LinearExpr(0)) : Rhs::havoc(f_.ret == Type::Int));
    jump(cfg_.exit);
    if (opt_.observe_exit) {
      for (int v : top_level_vars(f_)) cfg_.observed.emplace_back(f_.vars[v].name, static_cast<VarId>(v));
      if (ret_var_ >= 0) cfg_.observed.emplace_back(kReturnVar, static_cast<VarId>(ret_var_));
    }
    cfg_.prune();
    return std::move(cfg_);
  }

 private:
  struct Loop {
    BlockId cont, brk;
  };

  const Function& f_;
  const LowerOptions& opt_;
  Cfg cfg_;
  BlockId cur_ = kNoBlock;
  int ret_var_ = -1;
  int temps_ = 0;
  std::vector<Loop> loops_;
  std::map<int, std::pair<int, BlockId>> inlines_;

  void def(VarId v, Rhs r) {
    if (r.kind == Rhs::Mul || r.kind == Rhs::Div) cfg_.nonlinear = true;
    cfg_.blocks[cur_].defs.push_back({v, std::move(r)});
  }
  void jump(BlockId to) { cfg_.add_edge(cur_, to); }
  // After break/continue/return: following code lands in an unreachable block.
  void dead() { cur_ = cfg_.add_block(); }

  VarId temp(const char* prefix, bool integer, int line) {
    std::string n = std::string(prefix) + std::to_string(++temps_);
    return cfg_.add_var(n, n, integer, line);
  }

  // Rhs of the top-level node; nested nonlinear subterms become temps.
  Rhs rhs(const Expr& e) {
    switch (e.kind) {
      case Expr::Nondet: return Rhs::havoc(e.type == Type::Int);
      case Expr::Call: return Rhs::havoc(e.type == Type::Int);
      case Expr::Bin:
        if (e.op == BinOp::Mul) {
          LinearExpr a = lin(e.args[0]), b = lin(e.args[1]);
          if (a.is_constant()) return Rhs::linear(b * a.constant());
          if (b.is_constant()) return Rhs::linear(a * b.constant());
          return Rhs::mul(std::move(a), std::move(b));
        }
        if (e.op == BinOp::Div) {
          bool integer = e.type == Type::Int;
          LinearExpr a = lin(e.args[0]), b = lin(e.args[1]);
          if (b.is_constant()) {
            const Rational& d = b.constant();
            if (d == 0) return Rhs::linear(LinearExpr(0));  // x / 0 is 0 by convention
            if (!integer) return Rhs::linear(a * (1 / d));
            if (a.is_constant()) return Rhs::linear(LinearExpr(Rational(trunc_div(a.constant(), d))));
            if (abs(d) == 1) return Rhs::linear(a * d);
          }
          return Rhs::div(std::move(a), std::move(b), integer);
        }
        break;
      default: break;
    }
    return Rhs::linear(lin(e));
  }

  static Integer trunc_div(const Rational& a, const Rational& b) {
    Integer n = a.get_num(), d = b.get_num();
    Integer q;
    mpz_tdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    return q;
  }

  LinearExpr lin(const Expr& e) {
    switch (e.kind) {
      case Expr::Lit: return LinearExpr(e.value);
      case Expr::Var: return LinearExpr::var(static_cast<VarId>(e.var));
      case Expr::Neg: return -lin(e.args[0]);
      case Expr::Bin:
        if (e.op == BinOp::Add) {
          LinearExpr a = lin(e.args[0]);
          return a + lin(e.args[1]);
        }
        if (e.op == BinOp::Sub) {
          LinearExpr a = lin(e.args[0]);
          return a - lin(e.args[1]);
        }
        break;
      default: break;
    }
    Rhs r = rhs(e);
    if (r.is_linear()) return r.a;
    const char* prefix = r.kind == Rhs::Havoc ? "_nd" : "_t";
    VarId t = temp(prefix, e.type == Type::Int, e.pos.line);
    def(t, std::move(r));
    return LinearExpr::var(t);
  }

  // Branches from the current block to t when c holds, to f otherwise.
  void branch(const Expr& c, BlockId t, BlockId f) {
    if (c.kind == Expr::Lit) {
      jump(c.value != 0 ? t : f);
      return;
    }
    if (c.kind == Expr::Not) {
      branch(c.args[0], f, t);
      return;
    }
    if (c.kind != Expr::Bin) throw SourceError(c.pos, "condition is not boolean");
    if (c.op == BinOp::And || c.op == BinOp::Or) {
      BlockId mid = cfg_.add_block(c.args[1].pos.line);
      if (c.op == BinOp::And)
        branch(c.args[0], mid, f);
      else
        branch(c.args[0], t, mid);
      cur_ = mid;
      branch(c.args[1], t, f);
      return;
    }
    LinearExpr l = lin(c.args[0]);
    LinearExpr d = l - lin(c.args[1]);
    if (d.is_constant()) {
      const Rational& k = d.constant();
      bool holds = false;
      switch (c.op) {
        case BinOp::Lt: holds = k < 0; break;
        case BinOp::Le: holds = k <= 0; break;
        case BinOp::Gt: holds = k > 0; break;
        case BinOp::Ge: holds = k >= 0; break;
        case BinOp::Eq: holds = k == 0; break;
        case BinOp::Ne: holds = k != 0; break;
        default: break;
      }
      jump(holds ? t : f);
      return;
    }
    LinearExpr nd = -d;
    auto edge = [&](BlockId to, const LinearExpr& e, Rel r) {
      // over integers e < 0 is e + 1 <= 0
      if (r == Rel::LT && integral(e)) return void(cfg_.add_edge(cur_, to, Constraint{e + LinearExpr(1), Rel::LE}));
      cfg_.add_edge(cur_, to, Constraint{e, r});
    };
    switch (c.op) {
      case BinOp::Lt:
        edge(t, d, Rel::LT);
        edge(f, nd, Rel::LE);
        break;
      case BinOp::Le:
        edge(t, d, Rel::LE);
        edge(f, nd, Rel::LT);
        break;
      case BinOp::Gt:
        edge(t, nd, Rel::LT);
        edge(f, d, Rel::LE);
        break;
      case BinOp::Ge:
        edge(t, nd, Rel::LE);
        edge(f, d, Rel::LT);
        break;
      case BinOp::Eq:
        edge(f, d, Rel::LT);
        edge(f, nd, Rel::LT);
        edge(t, d, Rel::EQ);
        break;
      case BinOp::Ne:
        edge(t, d, Rel::LT);
        edge(t, nd, Rel::LT);
        edge(f, d, Rel::EQ);
        break;
      default: throw SourceError(c.pos, "condition is not a comparison");
    }
  }

  bool integral(const LinearExpr& e) const {
    if (e.constant().get_den() != 1) return false;
    for (const auto& [v, k] : e.terms())
      if (!cfg_.vars[v].integer || k.get_den() != 1) return false;
    return true;
  }

  void stmts(const std::vector<Stmt>& ss) {
    for (const auto& s : ss) stmt(s);
  }

  void stmt(const Stmt& s) {
    int line = s.pos.line;
    if (cfg_.blocks[cur_].line == 0) cfg_.blocks[cur_].line = line;
    switch (s.kind) {
      case Stmt::Decl:
        if (s.has_expr)
          def(static_cast<VarId>(s.var), rhs(s.expr));
        else
          def(static_cast<VarId>(s.var), Rhs::havoc(f_.vars[s.var].type == Type::Int));
        break;
      case Stmt::Assign: def(static_cast<VarId>(s.var), rhs(s.expr)); break;
      case Stmt::If: {
        BlockId t = cfg_.add_block(), j = cfg_.add_block();
        BlockId e = s.orelse.empty() ? j : cfg_.add_block();
        branch(s.expr, t, e);
        cur_ = t;
        stmts(s.body);
        jump(j);
        if (!s.orelse.empty()) {
          cur_ = e;
          stmts(s.orelse);
          jump(j);
        }
        cur_ = j;
        break;
      }
      case Stmt::While: {
        BlockId h = cfg_.add_block(line), body = cfg_.add_block(), out = cfg_.add_block();
        jump(h);
        cur_ = h;
        branch(s.expr, body, out);
        BlockId step = s.step.empty() ? h : cfg_.add_block(line);
        loops_.push_back({step, out});
        cur_ = body;
        stmts(s.body);
        jump(step);
        if (!s.step.empty()) {
          cur_ = step;
          stmts(s.step);
          jump(h);
        }
        loops_.pop_back();
        cur_ = out;
        break;
      }
      case Stmt::Break:
        jump(loops_.back().brk);
        dead();
        break;
      case Stmt::Continue:
        jump(loops_.back().cont);
        dead();
        break;
      case Stmt::Return: {
        int rv = ret_var_;
        BlockId to = cfg_.exit;
        if (s.target >= 0) {
          rv = inlines_.at(s.target).first;
          to = inlines_.at(s.target).second;
        }
        if (s.has_expr && rv >= 0) def(static_cast<VarId>(rv), rhs(s.expr));
        if (!s.has_expr && rv >= 0 && s.target < 0 && f_.name == "main") def(static_cast<VarId>(rv), Rhs::linear(LinearExpr(0)));
        jump(to);
        dead();
        break;
      }
      case Stmt::Assert:
      case Stmt::Assume: {
        BlockId next = cfg_.add_block();
        BlockId bad = s.kind == Stmt::Assert ? cfg_.fail : cfg_.assume_exit;
        if (s.kind == Stmt::Assert) cfg_.assert_lines.push_back(line);
        branch(s.expr, next, bad);
        for (EdgeId e : cfg_.blocks[bad].in)
          if (cfg_.edges[e].line == 0) cfg_.edges[e].line = line;
        cur_ = next;
        break;
      }
      case Stmt::CallStmt: break;  // not inlined: no effect on scalars
      case Stmt::Block: stmts(s.body); break;
      case Stmt::Inlined: {
        BlockId done = cfg_.add_block();
        inlines_[s.inline_id] = {s.ret_var, done};
        stmts(s.body);
        if (s.ret_var >= 0 && s.ret_havoc_on_fallthrough)
          def(static_cast<VarId>(s.ret_var), Rhs::havoc(f_.vars[s.ret_var].type == Type::Int));
        jump(done);
        cur_ = done;
        break;
      }
    }
  }
};

}  // namespace

Cfg lower_function(const Function& f, const LowerOptions& opt) {
  Lowerer l(f, opt);
  return l.run();
}

std::map<std::string, Cfg> lower_to_cfg(const Program& p, const LowerOptions& opt) {
  std::map<std::string, Cfg> out;
  for (const auto& f : p.functions) {
    LowerOptions o = opt;
    o.observe_exit = opt.observe_exit && f.name == "main";
    out.emplace(f.name, lower_function(f, o));
  }
  return out;
}

}  // namespace pagai
