#include "pagai/smt.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace pagai::smt {

namespace {

bool simple_symbol(const std::string& s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  // SSA names carry a version dot or a leading underscore; anything else
  // could clash with a theory symbol
  if (s.find('.') == std::string::npos && s[0] != '_' && s.find('!') == std::string::npos) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && std::string("~!@$%^&*_-+=<>.?/").find(c) == std::string::npos)
      return false;
  return true;
}

std::string quote(const std::string& s) { return simple_symbol(s) ? s : "|" + s + "|"; }

std::string num(const Rational& r, bool real) {
  Rational a = abs(r);
  std::string body;
  if (a.get_den() == 1) {
    body = a.get_num().get_str() + (real ? ".0" : "");
  } else {
    body = "(/ " + a.get_num().get_str() + ".0 " + a.get_den().get_str() + ".0)";
  }
  return r < 0 ? "(- " + body + ")" : body;
}

std::string or_of(const std::vector<std::string>& xs) {
  if (xs.empty()) return "false";
  if (xs.size() == 1) return xs[0];
  std::string s = "(or";
  for (const auto& x : xs) s += " " + x;
  return s + ")";
}

std::string and_of(const std::vector<std::string>& xs) {
  if (xs.empty()) return "true";
  if (xs.size() == 1) return xs[0];
  std::string s = "(and";
  for (const auto& x : xs) s += " " + x;
  return s + ")";
}

void exclusive(std::vector<std::string>& out, const std::vector<std::string>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) out.push_back("(not (and " + xs[i] + " " + xs[j] + "))");
}

}  // namespace

bool SectionFormula::is_pr(BlockId b) const { return info->is_pr(b); }

std::string SectionFormula::edge_bool(EdgeId e) const { return "e!" + std::to_string(e); }

std::string SectionFormula::source_bool(BlockId p) const {
  return "b!" + cfg->block_name(p) + (is_pr(p) ? "!src" : "");
}

std::string SectionFormula::sink_bool(BlockId b) const {
  return "b!" + cfg->block_name(b) + (is_pr(b) ? "!snk" : "");
}

std::string SectionFormula::value(VarId v, BlockId sink) const {
  if (v >= cfg->vars.size()) return quote(aux.at(v));
  const std::string& n = cfg->vars[v].name;
  if (sink != kNoBlock && sink < sink_phis.size()) {
    const auto& ph = sink_phis[sink];
    if (std::find(ph.begin(), ph.end(), v) != ph.end()) return quote(n + "!snk");
  }
  return quote(n);
}

Rational SectionFormula::model_value(const Model& m, VarId v, BlockId sink) const {
  std::string s = value(v, sink);
  if (s.size() >= 2 && s.front() == '|') s = s.substr(1, s.size() - 2);
  return m.number(s);
}

namespace {

// expr rel 0 rendered with `sym` naming each variable; integer-only sums
// get their denominators cleared
std::string render(const LinearExpr& expr, Rel rel, const std::function<std::string(VarId)>& sym,
                   const std::function<bool(VarId)>& integer) {
  bool real = false;
  for (const auto& [v, k] : expr.terms())
    if (!integer(v)) real = true;
  LinearExpr e = expr;
  if (!real) {
    Integer l = 1;
    for (const auto& [v, k] : e.terms()) l = lcm(l, Integer(k.get_den()));
    l = lcm(l, Integer(e.constant().get_den()));
    e *= Rational(l);
  }
  std::vector<std::string> parts;
  for (const auto& [v, k] : e.terms()) {
    std::string x = sym(v);
    if (real && integer(v)) x = "(to_real " + x + ")";
    parts.push_back(k == 1 ? x : "(* " + num(k, real) + " " + x + ")");
  }
  std::string lhs;
  if (parts.empty())
    lhs = num(0, real);
  else if (parts.size() == 1)
    lhs = parts[0];
  else {
    lhs = "(+";
    for (const auto& p : parts) lhs += " " + p;
    lhs += ")";
  }
  const char* op = rel == Rel::LE ? "<=" : rel == Rel::LT ? "<" : "=";
  return std::string("(") + op + " " + lhs + " " + num(-e.constant(), real) + ")";
}

constexpr VarId kPhiTarget = kFreshBase - 1;

}  // namespace

std::string render_constraint(const Constraint& c, const std::function<std::string(VarId)>& sym,
                              const std::function<bool(VarId)>& integer) {
  return render(c.expr, c.rel, sym, integer);
}

std::string SectionFormula::term(const Constraint& c, BlockId sink) const {
  return render(
      c.expr, c.rel, [&](VarId v) { return value(v, sink); },
      [&](VarId v) { return v >= cfg->vars.size() || cfg->vars[v].integer; });
}

std::string SectionFormula::conjunction(const Conjunction& cs, BlockId sink) const {
  std::vector<std::string> xs;
  for (const auto& c : cs) xs.push_back(term(c, sink));
  return and_of(xs);
}

std::string SectionFormula::not_any(const std::vector<Conjunction>& disjuncts, BlockId sink) const {
  std::vector<std::string> xs;
  for (const auto& d : disjuncts) xs.push_back(conjunction(d, sink));
  return "(not " + or_of(xs) + ")";
}

std::string SectionFormula::script() const {
  std::ostringstream os;
  for (const auto& d : declarations) os << d << "\n";
  for (const auto& a : assertions) os << "(assert " << a << ")\n";
  return os.str();
}

SectionFormula encode_section(const Cfg& cfg, const CfgAnalysisInfo& info, const std::vector<char>* enabled) {
  SectionFormula f;
  f.cfg = &cfg;
  f.info = &info;
  const std::size_t nb = cfg.blocks.size();
  f.sink_phis.assign(nb, {});
  for (BlockId b = 0; b < nb; ++b) {
    if (info.is_pr(b)) {
      f.sources.push_back(b);
      f.sinks.push_back(b);
      for (const auto& ph : cfg.blocks[b].phis) f.sink_phis[b].push_back(ph.var);
    } else if (cfg.blocks[b].out.empty()) {
      f.sinks.push_back(b);
    }
  }
  auto sort = [](bool integer) { return integer ? "Int" : "Real"; };
  for (VarId v = 0; v < cfg.vars.size(); ++v)
    f.declarations.push_back("(declare-const " + quote(cfg.vars[v].name) + " " + sort(cfg.vars[v].integer) + ")");
  for (BlockId b = 0; b < nb; ++b)
    for (VarId v : f.sink_phis[b])
      f.declarations.push_back("(declare-const " + f.value(v, b) + " " + sort(cfg.vars[v].integer) + ")");
  for (EdgeId e = 0; e < cfg.edges.size(); ++e) f.declarations.push_back("(declare-const " + f.edge_bool(e) + " Bool)");
  for (BlockId b = 0; b < nb; ++b) {
    f.declarations.push_back("(declare-const " + f.source_bool(b) + " Bool)");
    if (info.is_pr(b)) f.declarations.push_back("(declare-const " + f.sink_bool(b) + " Bool)");
  }

  auto& A = f.assertions;
  // at most one source
  std::vector<std::string> srcs;
  for (BlockId p : f.sources) srcs.push_back(f.source_bool(p));
  exclusive(A, srcs);

  for (BlockId b = 0; b < nb; ++b) {
    const Block& bl = cfg.blocks[b];
    const bool pr = info.is_pr(b);
    // in side: the sink copy for P_R, the block itself otherwise
    std::vector<std::string> ins;
    for (EdgeId e : bl.in) ins.push_back(f.edge_bool(e));
    if (pr) {
      A.push_back("(= " + f.sink_bool(b) + " " + or_of(ins) + ")");
    } else {
      A.push_back("(= " + f.source_bool(b) + " " + or_of(ins) + ")");
    }
    exclusive(A, ins);
    BlockId at = pr ? b : kNoBlock;
    for (const auto& ph : bl.phis)
      for (const auto& [e, arg] : ph.args) {
        // the target is read at the sink copy, the argument is not
        auto sym = [&](VarId v) { return v == kPhiTarget ? f.value(ph.var, at) : f.value(v); };
        auto integer = [&](VarId v) { return cfg.vars[v == kPhiTarget ? ph.var : v].integer; };
        A.push_back("(=> " + f.edge_bool(e) + " " + render(LinearExpr::var(kPhiTarget) - arg, Rel::EQ, sym, integer) + ")");
      }
    // out side: the source copy
    std::string act = f.source_bool(b);
    for (const auto& d : bl.defs) {
      const Rhs& r = d.rhs;
      if (r.kind == Rhs::Linear) {
        // single assignment: the equation holds wherever the value is read
        A.push_back(f.term(Constraint{LinearExpr::var(d.var) - r.a, Rel::EQ}));
      } else if (r.kind == Rhs::Div && r.integer && r.b.is_constant() && r.b.constant() != 0 &&
                 r.b.constant().get_den() == 1) {
        // truncating division by a constant through an auxiliary quotient
        VarId m = static_cast<VarId>(cfg.vars.size() + f.aux.size());
        f.aux[m] = "q!" + cfg.vars[d.var].name;
        f.declarations.push_back("(declare-const " + f.value(m) + " Int)");
        Rational dv = r.b.constant(), ad = abs(dv);
        LinearExpr rem = r.a - LinearExpr::var(m, ad);
        std::string nonneg = f.term(Constraint::ge(r.a, LinearExpr(Rational(0))));
        std::string lo0 = f.term(Constraint::le(LinearExpr(Rational(0)), rem));
        std::string hi0 = f.term(Constraint::le(rem, LinearExpr(ad - 1)));
        std::string lo1 = f.term(Constraint::le(LinearExpr(1 - ad), rem));
        std::string hi1 = f.term(Constraint::le(rem, LinearExpr(Rational(0))));
        A.push_back("(=> " + nonneg + " (and " + lo0 + " " + hi0 + "))");
        A.push_back("(=> (not " + nonneg + ") (and " + lo1 + " " + hi1 + "))");
        A.push_back(f.term(Constraint::eq(LinearExpr::var(d.var), LinearExpr::var(m, dv > 0 ? 1 : -1))));
      }
      // havoc, undef, products and other divisions stay unconstrained
    }
    std::vector<std::string> outs;
    for (EdgeId e : bl.out) {
      const Edge& ed = cfg.edges[e];
      std::string eb = f.edge_bool(e);
      outs.push_back(eb);
      A.push_back("(=> " + eb + " " + act + ")");
      if (ed.guard) A.push_back("(=> " + eb + " " + f.term(*ed.guard) + ")");
      if (enabled && !(*enabled)[e]) A.push_back("(not " + eb + ")");
    }
    if (!outs.empty()) {
      A.push_back("(=> " + act + " " + or_of(outs) + ")");
      exclusive(A, outs);
    }
  }
  return f;
}

void load(SolverSession& s, const SectionFormula& rho) {
  s.reset();
  for (const auto& d : rho.declarations) s.command(d);
  for (const auto& a : rho.assertions) s.assert_formula(a);
}

PathModel model_to_path(const SectionFormula& rho, const Model& m, BlockId source) {
  const Cfg& cfg = *rho.cfg;
  PathModel pm;
  pm.source = source;
  pm.model = m;
  BlockId b = source;
  for (std::size_t steps = 0; steps <= cfg.edges.size(); ++steps) {
    EdgeId chosen = ~EdgeId{0};
    for (EdgeId e : cfg.blocks[b].out)
      if (m.boolean(rho.edge_bool(e))) {
        if (chosen != ~EdgeId{0}) throw std::logic_error("model activates two edges out of " + cfg.block_name(b));
        chosen = e;
      }
    if (chosen == ~EdgeId{0}) throw std::logic_error("model leaves " + cfg.block_name(b) + " by no edge");
    pm.edges.push_back(chosen);
    b = cfg.edges[chosen].dst;
    if (rho.is_pr(b) || cfg.blocks[b].out.empty()) {
      pm.sink = b;
      return pm;
    }
  }
  throw std::logic_error("activated edges form a cycle");
}

std::optional<PathModel> check_growth(SolverSession& s, const SectionFormula& rho, BlockId src,
                                      const Conjunction& x_src, const TargetMap& targets,
                                      const std::vector<std::string>& extra) {
  if (targets.empty()) return std::nullopt;
  std::vector<std::string> q;
  for (BlockId p : rho.sources) q.push_back(p == src ? rho.source_bool(p) : "(not " + rho.source_bool(p) + ")");
  q.push_back(rho.conjunction(x_src));
  std::vector<std::string> grow;
  for (const auto& [t, xs] : targets) grow.push_back("(and " + rho.sink_bool(t) + " " + rho.not_any(xs, t) + ")");
  q.push_back(or_of(grow));
  q.insert(q.end(), extra.begin(), extra.end());
  SolveResult r = s.solve(q);
  if (r.status == Status::Unknown) throw SolverInconclusive("solver returned unknown on a growth query");
  if (r.status == Status::Unsat) return std::nullopt;
  return model_to_path(rho, r.model, src);
}

std::optional<PathModel> check_reach(SolverSession& s, const SectionFormula& rho,
                                     const std::map<BlockId, std::vector<Conjunction>>& sources, BlockId sink,
                                     const std::vector<std::string>& extra) {
  std::vector<std::string> alts;
  for (const auto& [p, xs] : sources) {
    if (xs.empty()) continue;
    std::vector<std::string> ds;
    for (const auto& d : xs) ds.push_back(rho.conjunction(d));
    alts.push_back("(and " + rho.source_bool(p) + " " + or_of(ds) + ")");
  }
  if (alts.empty()) return std::nullopt;
  std::vector<std::string> q = {or_of(alts), rho.sink_bool(sink)};
  q.insert(q.end(), extra.begin(), extra.end());
  SolveResult r = s.solve(q);
  if (r.status == Status::Unknown) throw SolverInconclusive("solver returned unknown on a reachability query");
  if (r.status == Status::Unsat) return std::nullopt;
  for (const auto& [p, xs] : sources)
    if (r.model.boolean(rho.source_bool(p))) return model_to_path(rho, r.model, p);
  throw std::logic_error("reachability model activates no source");
}

}  // namespace pagai::smt
