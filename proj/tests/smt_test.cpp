#include "pagai/frontend/interp.hpp"
#include "pagai/frontend/passes.hpp"
#include "pagai/smt.hpp"
#include "program_gen.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

using namespace pagai;
using namespace pagai::smt;

namespace {

const char* kFig1 = R"(
int main() {
  int x = 0;
  int t = 0;
  int phase = 0;
  while (t < 100) {
    if (phase == 0)
      x = x + 2;
    if (phase == 1)
      x = x - 1;
    phase = 1 - phase;
    t++;
  }
  assert(x <= 100);
  return 0;
}
)";

Cfg build(const std::string& src, bool unroll = false) {
  FrontendOptions o;
  o.unroll = unroll;
  return build_ssa_cfg(parse(src), "main", o);
}

// Shell stand-in for a solver: answers success to everything and `reply`
// to check-sat.
std::string fake_solver(const std::string& tag, const std::string& reply) {
  auto dir = std::filesystem::temp_directory_path();
  auto path = dir / ("pagai_fake_" + tag + ".sh");
  std::ofstream os(path);
  os << "#!/bin/sh\nwhile read line; do\n  case \"$line\" in\n"
     << "    \"(check-sat)\") " << reply << " ;;\n"
     << "    \"(exit)\") exit 0 ;;\n"
     << "    *) echo success ;;\n  esac\ndone\n";
  os.close();
  std::filesystem::permissions(path, std::filesystem::perms::owner_all);
  return path.string();
}

// Re-executes the decoded path from the model's values; every computed value
// must agree with the model and the sink values must match exactly.
::testing::AssertionResult replay(const SectionFormula& rho, const PathModel& pm) {
  const Cfg& cfg = *rho.cfg;
  const Model& m = pm.model;
  std::map<VarId, Rational> val;
  auto get = [&](VarId v) {
    auto it = val.find(v);
    return it != val.end() ? it->second : rho.model_value(m, v);
  };
  BlockId b = pm.source;
  std::map<VarId, Rational> at_sink;
  for (EdgeId e : pm.edges) {
    for (const auto& d : cfg.blocks[b].defs) {
      const Rhs& r = d.rhs;
      if (r.kind == Rhs::Linear)
        val[d.var] = r.a.evaluate(get);
      else if (r.kind == Rhs::Div && r.integer && r.b.is_constant())
        val[d.var] = int_div(r.a.evaluate(get), r.b.constant());
      else
        continue;
      if (val[d.var] != rho.model_value(m, d.var))
        return ::testing::AssertionFailure() << cfg.vars[d.var].name << " disagrees with the model";
    }
    const Edge& ed = cfg.edges[e];
    if (ed.src != b) return ::testing::AssertionFailure() << "path is not connected";
    if (ed.guard && !ed.guard->holds(get))
      return ::testing::AssertionFailure() << "guard fails on edge " << e;
    BlockId s = ed.dst;
    std::map<VarId, Rational> phis;
    for (const auto& ph : cfg.blocks[s].phis) phis[ph.var] = ph.arg_for(e)->evaluate(get);
    if (s == pm.sink && rho.is_pr(s))
      at_sink = phis;
    else
      for (auto& [v, x] : phis) val[v] = x;
    b = s;
  }
  if (b != pm.sink) return ::testing::AssertionFailure() << "path does not end at the sink";
  for (VarId v : rho.info->dims(b)) {
    Rational expect = at_sink.count(v) ? at_sink[v] : get(v);
    if (expect != rho.model_value(m, v, b))
      return ::testing::AssertionFailure() << "sink value of " << cfg.vars[v].name << " differs";
  }
  return ::testing::AssertionSuccess();
}

void all_paths(const Cfg& cfg, const SectionFormula& rho, BlockId b, bool started, std::vector<EdgeId>& path,
               std::vector<std::vector<EdgeId>>& out) {
  if (started && (rho.is_pr(b) || cfg.blocks[b].out.empty())) {
    out.push_back(path);
    return;
  }
  for (EdgeId e : cfg.blocks[b].out) {
    path.push_back(e);
    all_paths(cfg, rho, cfg.edges[e].dst, true, path, out);
    path.pop_back();
  }
}

std::string path_formula(const SectionFormula& rho, const std::vector<EdgeId>& p) {
  std::string s = "(and";
  for (EdgeId e : p) s += " " + rho.edge_bool(e);
  return s + ")";
}

}  // namespace

TEST(SExpr, ParsesModelsAndNumbers) {
  auto xs = parse_sexprs("success ; note\n(\n (define-fun r () Real\n  (/ 1.0 3.0))\n (define-fun |a b| () Int (- 3)))\n");
  ASSERT_EQ(xs.size(), 2u);
  EXPECT_TRUE(xs[0].is("success"));
  ASSERT_EQ(xs[1].list.size(), 2u);
  EXPECT_EQ(*sexpr_number(xs[1].list[0].list[4]), Rational(1, 3));
  EXPECT_EQ(xs[1].list[1].list[1].atom, "a b");
  EXPECT_EQ(*sexpr_number(xs[1].list[1].list[4]), -3);
  EXPECT_FALSE(sexpr_number(parse_sexprs("(root-obj x 1)")[0]).has_value());
}

TEST(Solver, SatUnsatAndModels) {
  SolverSession s;
  EXPECT_FALSE(s.logic().empty());
  s.declare("x", "Int");
  s.declare("r", "Real");
  auto a = s.solve({"(= x 1)", "(= r (/ 1.0 3.0))"});
  ASSERT_EQ(a.status, Status::Sat);
  EXPECT_EQ(a.model.number("x"), 1);
  EXPECT_EQ(a.model.number("r"), Rational(1, 3));
  auto b = s.solve({"(and (> x 0) (< x 0))"});
  EXPECT_EQ(b.status, Status::Unsat);
  auto c = s.solve({"(= x (- 7))"});
  EXPECT_EQ(c.model.number("x"), -7);
  EXPECT_EQ(s.depth(), 0);
  EXPECT_EQ(s.queries(), 3u);
}

TEST(Solver, FrameHygiene) {
  SolverSession s;
  s.declare("x", "Int");
  s.push();
  s.assert_formula("(> x 5)");
  s.push();
  s.assert_formula("(< x 3)");
  EXPECT_EQ(s.check(), Status::Unsat);
  s.pop();
  EXPECT_EQ(s.check(), Status::Sat);
  s.pop();
  EXPECT_THROW(s.pop(), std::logic_error);
  s.reset();
  s.declare("y", "Int");
  EXPECT_EQ(s.solve({"(= y 2)"}).status, Status::Sat);
}

TEST(Solver, UnknownIsInconclusive) {
  SolverConfig c;
  c.command = fake_solver("unknown", "echo unknown");
  SolverSession s(c);
  Cfg cfg = build(kFig1);
  auto info = analyze_cfg(cfg);
  auto rho = encode_section(cfg, info);
  load(s, rho);
  EXPECT_EQ(s.solve({"(= x 1)"}).status, Status::Unknown);
  EXPECT_THROW(check_growth(s, rho, cfg.entry, {}, {{cfg.exit, {}}}), SolverInconclusive);
}

TEST(Solver, CrashAndTimeout) {
  SolverConfig dead;
  dead.command = "false";
  EXPECT_THROW(SolverSession{dead}, SolverCrashed);
  dead.command = "/nonexistent/solver";
  EXPECT_THROW(SolverSession{dead}, SolverCrashed);
  SolverConfig slow;
  slow.command = fake_solver("slow", "sleep 10");
  slow.timeout_ms = 200;
  SolverSession s(slow);
  EXPECT_THROW(s.check(), SolverInconclusive);
  // the session was restarted and is usable again
  EXPECT_NO_THROW(s.command("(declare-const z Int)"));
}

TEST(Solver, ProtocolError) {
  SolverSession s;
  EXPECT_THROW(s.command("(assert (= undeclared 1))"), ProtocolError);
}

TEST(Section, StraightLineForcesEverything) {
  Cfg cfg = build("int main(int a){ int b = a + 1; int c = 2 * b; return c; }");
  auto info = analyze_cfg(cfg);
  auto rho = encode_section(cfg, info);
  SolverSession s;
  load(s, rho);
  auto g = check_growth(s, rho, cfg.entry, {}, {{cfg.exit, {}}});
  ASSERT_TRUE(g.has_value());
  EXPECT_EQ(g->sink, cfg.exit);
  EXPECT_TRUE(replay(rho, *g));
  // every edge on the only path is forced
  for (EdgeId e : g->edges) {
    auto r = s.solve({rho.source_bool(cfg.entry), "(not " + rho.edge_bool(e) + ")", rho.sink_bool(cfg.exit)}, false);
    EXPECT_EQ(r.status, Status::Unsat);
  }
}

TEST(Section, PhaseLoopFirstQueryAndTop) {
  Cfg cfg = build(kFig1);
  auto info = analyze_cfg(cfg);
  ASSERT_EQ(info.widening_points.size(), 1u);
  BlockId h = *info.widening_points.begin();
  auto rho = encode_section(cfg, info);
  SolverSession s;
  load(s, rho);
  const Dims& d = info.dims(h);
  Conjunction init;
  for (VarId v : d) init.push_back(Constraint::eq(LinearExpr::var(v), LinearExpr(Rational(0))));
  auto g = check_growth(s, rho, h, init, {{h, {}}});
  ASSERT_TRUE(g.has_value());
  EXPECT_EQ(g->sink, h);
  EXPECT_TRUE(replay(rho, *g));
  // phase = 0 path: x goes up by 2
  for (VarId v : d)
    if (cfg.vars[v].base == "x") EXPECT_EQ(rho.model_value(g->model, v, h), 2);
  // top target: nothing can grow
  EXPECT_FALSE(check_growth(s, rho, h, {}, {{h, {Conjunction{}}}}).has_value());
  EXPECT_EQ(s.depth(), 0);
}

TEST(Section, PathCompletenessByEnumeration) {
  std::vector<std::string> programs = {
      kFig1,
      "int main(int a, int b){ int c = 0; if (a < 0) c = c + 1; if (b < a) c = c + 2; if (c == 2) c = 0; "
      "return c; }",
      "int main(int n){ int i = 0; int s = 0; while (i < n) { if (i < 5) s = s + i; else s = s - 1; i++; } "
      "assert(s >= -100); return s; }",
      "int main(int a){ int q = a / 3; if (q * 3 == a) a = 0; assert(q <= a + 10); return q; }",
  };
  SolverSession s;
  for (const auto& src : programs) {
    Cfg cfg = build(src);
    auto info = analyze_cfg(cfg);
    auto rho = encode_section(cfg, info);
    load(s, rho);
    for (BlockId p : rho.sources) {
      std::vector<EdgeId> path;
      std::vector<std::vector<EdgeId>> paths;
      all_paths(cfg, rho, p, false, path, paths);
      ASSERT_LE(paths.size(), 16u);
      std::set<std::vector<EdgeId>> feasible, found;
      for (const auto& q : paths) {
        auto r = s.solve({rho.source_bool(p), path_formula(rho, q)}, false);
        if (r.status == Status::Sat) feasible.insert(q);
      }
      TargetMap targets;
      for (BlockId t : rho.sinks) targets[t] = {};
      std::vector<std::string> blocked;
      for (;;) {
        std::vector<std::string> qs = {rho.source_bool(p)};
        for (const auto& b : blocked) qs.push_back("(not " + b + ")");
        auto r = s.solve(qs);
        if (r.status != Status::Sat) break;
        PathModel pm = model_to_path(rho, r.model, p);
        EXPECT_TRUE(replay(rho, pm));
        ASSERT_TRUE(found.insert(pm.edges).second);
        blocked.push_back(path_formula(rho, pm.edges));
      }
      EXPECT_EQ(found, feasible) << src;
    }
  }
}

TEST(Section, NonlinearIsUnconstrained) {
  Cfg cfg = build("int main(int u, int v){ int w = u * v; assert(w != 7 || u != 0); return w; }");
  auto info = analyze_cfg(cfg);
  auto rho = encode_section(cfg, info);
  SolverSession s;
  load(s, rho);
  // u = 0 and w = 7 is not excluded: the product is unknown
  auto r = check_reach(s, rho, {{cfg.entry, {Conjunction{}}}}, cfg.fail);
  EXPECT_TRUE(r.has_value());
}

TEST(Section, ModelsReplayOnRandomPrograms) {
  SolverSession s;
  int replayed = 0;
  for (unsigned seed = 1; seed <= 40; ++seed) {
    pagai::testing::ProgramGen gen(seed);
    Program p = parse(gen.generate());
    Cfg cfg = build_ssa_cfg(p, "main");
    auto info = analyze_cfg(cfg);
    auto rho = encode_section(cfg, info);
    load(s, rho);
    for (BlockId src : rho.sources) {
      TargetMap targets;
      for (BlockId t : rho.sinks) targets[t] = {};
      for (int k = 0; k < 4; ++k) {
        auto g = check_growth(s, rho, src, {}, targets);
        if (!g) break;
        EXPECT_TRUE(replay(rho, *g)) << seed;
        ++replayed;
        targets.erase(g->sink);
      }
    }
  }
  EXPECT_GT(replayed, 100);
}
