#include "pagai/frontend/interp.hpp"

#include "pagai/frontend/passes.hpp"

#include <stdexcept>

namespace pagai {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Exit: return "exit";
    case Outcome::AssertFail: return "assert-fail";
    case Outcome::AssumeFail: return "assume-fail";
    case Outcome::StepLimit: return "step-limit";
  }
  return "?";
}

Rational int_div(const Rational& a, const Rational& b) {
  if (b == 0) return 0;
  Integer q;
  Integer n = a.get_num(), d = b.get_num();  // both integral here
  mpz_tdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return Rational(q);
}

namespace {

struct Stop {
  Outcome outcome;
};

class Interp {
 public:
  Interp(const Program& p, const NondetSource& nd, std::size_t max) : p_(p), nd_(nd), max_(max) {}

  RunResult run(const std::string& name) {
    RunResult r;
    const Function* f = p_.find(name);
    if (!f) throw std::runtime_error("no function named " + name);
    Frame fr{f, std::vector<std::optional<Rational>>(f->vars.size()), Rational(0), 0};
    try {
      for (int prm : f->params) fr.vals[prm] = fresh(f->vars[prm].type);
      Signal s = exec_list(f->body, fr);
      std::optional<Rational> ret;
      if (s.flow == Flow::Return)
        ret = fr.ret;
      else if (f->ret != Type::Void)
        ret = f->name == "main" ? Rational(0) : fresh(f->ret);
      for (int v : top_level_vars(*f))
        if (fr.vals[v]) r.finals[f->vars[v].name] = *fr.vals[v];
      if (f->ret != Type::Void && ret) r.finals[kReturnVar] = *ret;
      r.outcome = Outcome::Exit;
    } catch (const Stop& s) {
      r.outcome = s.outcome;
    }
    r.steps = steps_;
    return r;
  }

 private:
  enum class Flow { Normal, Break, Continue, Return };
  struct Signal {
    Flow flow = Flow::Normal;
    int target = -1;
  };
  struct Frame {
    const Function* f;
    std::vector<std::optional<Rational>> vals;
    Rational ret;
    int depth = 0;
  };

  const Program& p_;
  const NondetSource& nd_;
  std::size_t max_;
  std::size_t steps_ = 0;

  void tick() {
    if (++steps_ > max_) throw Stop{Outcome::StepLimit};
  }

  Rational fresh(Type t) {
    Rational v = nd_(t == Type::Int);
    if (t == Type::Int && v.get_den() != 1) v = Rational(floor_of(v));
    return v;
  }

  Rational eval(const Expr& e, Frame& fr) {
    switch (e.kind) {
      case Expr::Lit: return e.value;
      case Expr::Var: return fr.vals[e.var] ? *fr.vals[e.var] : Rational(0);
      case Expr::Neg: return -eval(e.args[0], fr);
      case Expr::Not: return truth(e.args[0], fr) ? 0 : 1;
      case Expr::Nondet: return fresh(e.type);
      case Expr::Call: {
        std::vector<Rational> args;
        for (const auto& a : e.args) args.push_back(eval(a, fr));
        return call(*p_.find(e.callee), args, fr.depth + 1);
      }
      case Expr::Bin: break;
    }
    if (e.op == BinOp::And) return truth(e.args[0], fr) && truth(e.args[1], fr) ? 1 : 0;
    if (e.op == BinOp::Or) return truth(e.args[0], fr) || truth(e.args[1], fr) ? 1 : 0;
    Rational a = eval(e.args[0], fr);
    Rational b = eval(e.args[1], fr);
    switch (e.op) {
      case BinOp::Add: return a + b;
      case BinOp::Sub: return a - b;
      case BinOp::Mul: return a * b;
      case BinOp::Div:
        if (e.type == Type::Int) return int_div(a, b);
        return b == 0 ? Rational(0) : Rational(a / b);
      case BinOp::Lt: return a < b ? 1 : 0;
      case BinOp::Le: return a <= b ? 1 : 0;
      case BinOp::Gt: return a > b ? 1 : 0;
      case BinOp::Ge: return a >= b ? 1 : 0;
      case BinOp::Eq: return a == b ? 1 : 0;
      case BinOp::Ne: return a != b ? 1 : 0;
      default: break;
    }
    throw std::logic_error("bad operator");
  }

  bool truth(const Expr& e, Frame& fr) { return eval(e, fr) != 0; }

  Rational call(const Function& f, const std::vector<Rational>& args, int depth) {
    if (depth > 200) throw Stop{Outcome::StepLimit};
    Frame fr{&f, std::vector<std::optional<Rational>>(f.vars.size()), 0, depth};
    for (std::size_t k = 0; k < args.size(); ++k) {
      Rational v = args[k];
      fr.vals[f.params[k]] = v;
    }
    Signal s = exec_list(f.body, fr);
    if (s.flow == Flow::Return) return fr.ret;
    if (f.ret == Type::Void) return 0;
    return fresh(f.ret);
  }

  Signal exec_list(const std::vector<Stmt>& ss, Frame& fr) {
    for (const auto& s : ss) {
      Signal r = exec(s, fr);
      if (r.flow != Flow::Normal) return r;
    }
    return {};
  }

  Signal exec(const Stmt& s, Frame& fr) {
    tick();
    switch (s.kind) {
      case Stmt::Decl:
        fr.vals[s.var] = s.has_expr ? eval(s.expr, fr) : fresh(fr.f->vars[s.var].type);
        return {};
      case Stmt::Assign: fr.vals[s.var] = eval(s.expr, fr); return {};
      case Stmt::If: return truth(s.expr, fr) ? exec_list(s.body, fr) : exec_list(s.orelse, fr);
      case Stmt::While:
        while (truth(s.expr, fr)) {
          tick();
          Signal r = exec_list(s.body, fr);
          if (r.flow == Flow::Break) break;
          if (r.flow == Flow::Return) return r;
          Signal st = exec_list(s.step, fr);
          (void)st;
        }
        return {};
      case Stmt::Break: return {Flow::Break, -1};
      case Stmt::Continue: return {Flow::Continue, -1};
      case Stmt::Return:
        if (s.has_expr)
          fr.ret = eval(s.expr, fr);
        else
          fr.ret = 0;
        return {Flow::Return, s.target};
      case Stmt::Assert:
        if (!truth(s.expr, fr)) throw Stop{Outcome::AssertFail};
        return {};
      case Stmt::Assume:
        if (!truth(s.expr, fr)) throw Stop{Outcome::AssumeFail};
        return {};
      case Stmt::CallStmt: eval(s.expr, fr); return {};
      case Stmt::Block: return exec_list(s.body, fr);
      case Stmt::Inlined: {
        Signal r = exec_list(s.body, fr);
        if (r.flow == Flow::Return && r.target == s.inline_id) {
          if (s.ret_var >= 0) fr.vals[s.ret_var] = fr.ret;
          return {};
        }
        if (r.flow != Flow::Normal) return r;
        if (s.ret_var >= 0 && s.ret_havoc_on_fallthrough) fr.vals[s.ret_var] = fresh(fr.f->vars[s.ret_var].type);
        return {};
      }
    }
    return {};
  }
};

}  // namespace

RunResult interpret(const Program& p, const std::string& function, const NondetSource& nondet, std::size_t max_steps) {
  Interp in(p, nondet, max_steps);
  return in.run(function);
}

RunResult simulate(const Cfg& cfg, const NondetSource& nondet, std::size_t max_steps, const BlockHook& hook) {
  RunResult r;
  Env env(cfg.vars.size());
  auto value = [&](VarId v) -> Rational { return v < env.size() && env[v] ? *env[v] : Rational(0); };
  auto eval = [&](const LinearExpr& e) { return e.evaluate(value); };
  BlockId b = cfg.entry;
  std::optional<EdgeId> via;
  while (true) {
    if (++r.steps > max_steps) {
      r.outcome = Outcome::StepLimit;
      return r;
    }
    if (b == cfg.fail) {
      r.outcome = Outcome::AssertFail;
      return r;
    }
    if (b == cfg.assume_exit) {
      r.outcome = Outcome::AssumeFail;
      return r;
    }
    const Block& bl = cfg.blocks[b];
    if (!bl.phis.empty()) {
      std::vector<std::optional<Rational>> vals;
      for (const auto& phi : bl.phis) {
        const LinearExpr* arg = via ? phi.arg_for(*via) : nullptr;
        if (!arg) throw std::logic_error("phi without argument for incoming edge");
        // an argument that is a single undefined variable stays undefined
        if (arg->terms().size() == 1 && arg->constant() == 0 && arg->terms().begin()->second == 1 &&
            !env[arg->terms().begin()->first])
          vals.emplace_back();
        else
          vals.emplace_back(eval(*arg));
      }
      for (std::size_t k = 0; k < bl.phis.size(); ++k) env[bl.phis[k].var] = vals[k];
    }
    if (hook) hook(b, env);
    if (b == cfg.exit) {
      for (const auto& [n, v] : cfg.observed)
        if (env[v]) r.finals[n] = *env[v];
      r.outcome = Outcome::Exit;
      return r;
    }
    for (const auto& d : bl.defs) {
      const Rhs& rhs = d.rhs;
      switch (rhs.kind) {
        case Rhs::Linear: env[d.var] = eval(rhs.a); break;
        case Rhs::Havoc: {
          Rational v = nondet(rhs.integer);
          if (rhs.integer && v.get_den() != 1) v = Rational(floor_of(v));
          env[d.var] = v;
          break;
        }
        case Rhs::Undef: env[d.var].reset(); break;
        case Rhs::Mul: env[d.var] = Rational(eval(rhs.a) * eval(rhs.b)); break;
        case Rhs::Div: {
          Rational a = eval(rhs.a), c = eval(rhs.b);
          env[d.var] = rhs.integer ? int_div(a, c) : (c == 0 ? Rational(0) : Rational(a / c));
          break;
        }
      }
    }
    std::optional<EdgeId> next;
    for (EdgeId e : bl.out) {
      const Edge& ed = cfg.edges[e];
      if (ed.guard && !ed.guard->holds(value)) continue;
      if (next) throw std::logic_error("guards of " + cfg.block_name(b) + " overlap");
      next = e;
    }
    if (!next) throw std::logic_error("no enabled edge out of " + cfg.block_name(b));
    via = next;
    b = cfg.edges[*next].dst;
  }
}

}  // namespace pagai
