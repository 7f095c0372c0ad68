#include "pagai/dominators.hpp"
#include "pagai/frontend/interp.hpp"
#include "pagai/frontend/passes.hpp"
#include "program_gen.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pagai;

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

std::size_t count_defs(const Cfg& cfg, Rhs::Kind k) {
  std::size_t n = 0;
  for (const auto& b : cfg.blocks)
    for (const auto& d : b.defs) n += d.rhs.kind == k;
  return n;
}

bool reachable(const Cfg& cfg, BlockId target) {
  return compute_dominators(cfg).reachable(target);
}

NondetSource seeded(unsigned seed) {
  auto rng = std::make_shared<std::mt19937>(seed);
  return [rng](bool) { return Rational(std::uniform_int_distribution<int>(-6, 6)(*rng)); };
}

}  // namespace

TEST(Parse, PhaseLoop) {
  Program p = parse(kFig1);
  ASSERT_EQ(p.functions.size(), 1u);
  EXPECT_EQ(p.functions[0].vars.size(), 3u);
  EXPECT_EQ(p.functions[0].name, "main");
}

TEST(Parse, Minimal) {
  Program p = parse("int main(){ return 0; }");
  ASSERT_EQ(p.functions.size(), 1u);
  EXPECT_TRUE(p.functions[0].vars.empty());
}

TEST(Parse, Errors) {
  try {
    parse("int main(){ int x = y; }");
    FAIL() << "expected an error";
  } catch (const SourceError& e) {
    EXPECT_NE(std::string(e.what()).find("undeclared variable y"), std::string::npos) << e.what();
    EXPECT_EQ(e.pos.line, 1);
    EXPECT_EQ(e.pos.col, 21);
  }
  EXPECT_THROW(parse("int main(){ real r = 1.5; int x = r; return 0; }"), SourceError);
  EXPECT_NO_THROW(parse("int main(){ real r = 1.5; int x = 2; real s = x; if (x < r) x = 1; return 0; }"));
  EXPECT_THROW(parse("int main(){ int x = 3 & 1; }"), SourceError);
  EXPECT_THROW(parse("int main(){ int x = 1; x = x << 2; }"), SourceError);
  EXPECT_THROW(parse("int f(){ return 1; }"), SourceError);
  EXPECT_THROW(parse("int main(){ break; }"), SourceError);
  EXPECT_THROW(parse("int main(){ int x = 1; int x = 2; }"), SourceError);
  EXPECT_THROW(parse("int main(){ int x = g(1); }"), SourceError);
  EXPECT_THROW(parse("int main(){ int x = 1 }"), SourceError);
}

TEST(Parse, Scopes) {
  Program p = parse("int main(){ int x = 1; { int x = 2; x = 3; } return x; }");
  const Function& f = p.main();
  ASSERT_EQ(f.vars.size(), 2u);
  EXPECT_NE(f.vars[0].name, f.vars[1].name);
  RunResult r = interpret(p, "main", seeded(1));
  EXPECT_EQ(r.finals.at("_ret"), 1);
}

TEST(Lower, PhaseLoopShape) {
  Program p = parse(kFig1);
  Cfg cfg = lower_function(p.main());
  EXPECT_TRUE(cfg.check().empty());
  // one loop: exactly one block with a retreating in-edge
  Dominators dom = compute_dominators(cfg);
  std::size_t headers = 0;
  for (BlockId b = 0; b < cfg.blocks.size(); ++b) {
    bool head = false;
    for (EdgeId e : cfg.blocks[b].in) head = head || dom.dominates(b, cfg.edges[e].src);
    headers += head;
  }
  EXPECT_EQ(headers, 1u);
  // each phase test branches three ways (<, >, =)
  std::size_t three_way = 0;
  for (const auto& b : cfg.blocks) three_way += b.out.size() == 3;
  EXPECT_EQ(three_way, 2u);
  EXPECT_TRUE(reachable(cfg, cfg.fail));
}

TEST(Lower, StraightLine) {
  Program p = parse("int main(){ int x = 1; int y = x + 2; return y; }");
  Cfg cfg = lower_function(p.main());
  EXPECT_TRUE(cfg.check().empty());
  EXPECT_EQ(cfg.successors(cfg.entry), std::vector<BlockId>{cfg.exit});
  EXPECT_TRUE(cfg.blocks[cfg.fail].in.empty());
}

TEST(Lower, AssumeFalseDominates) {
  Program p = parse("int main(){ assume(false); assert(false); return 0; }");
  Cfg cfg = lower_function(p.main());
  EXPECT_TRUE(cfg.check().empty());
  EXPECT_FALSE(reachable(cfg, cfg.fail));
  EXPECT_TRUE(reachable(cfg, cfg.assume_exit));
}

TEST(Lower, ShortCircuitAndBreak) {
  Program p = parse(R"(int main(){
    int s = 0;
    for (int i = 0; i < 10; i++) {
      if (i > 2 && s < 5 || i == 7) continue;
      if (i >= 8) break;
      s = s + i;
    }
    return s;
  })");
  Cfg cfg = lower_function(p.main(), {true});
  EXPECT_TRUE(cfg.check().empty());
  RunResult a = interpret(p, "main", seeded(0));
  RunResult b = simulate(cfg, seeded(0));
  EXPECT_EQ(a.outcome, Outcome::Exit);
  EXPECT_EQ(a.finals, b.finals);
  EXPECT_EQ(a.finals.at("_ret"), 3);
}

TEST(Ssa, IfElsePhi) {
  Program p = parse("int main(int c){ int x = nondet_int(); if (c > 0) { x = 2*x + 1; } else { x = 0; } return x; }");
  Cfg ssa = to_ssa(lower_function(p.main()));
  EXPECT_TRUE(ssa.check().empty()) << ssa.dump();
  const Phi* phi = nullptr;
  BlockId at = kNoBlock;
  for (BlockId b = 0; b < ssa.blocks.size(); ++b)
    for (const auto& ph : ssa.blocks[b].phis)
      if (ssa.vars[ph.var].base == "x") {
        phi = &ph;
        at = b;
      }
  ASSERT_NE(phi, nullptr) << ssa.dump();
  ASSERT_EQ(phi->args.size(), 2u);
  // resolve each argument through its linear definition
  auto def_of = [&](VarId v) -> const Rhs* {
    for (const auto& b : ssa.blocks)
      for (const auto& d : b.defs)
        if (d.var == v) return &d.rhs;
    return nullptr;
  };
  std::vector<std::string> resolved;
  for (const auto& [e, arg] : phi->args) {
    const Rhs* r = def_of(arg.terms().begin()->first);
    ASSERT_NE(r, nullptr);
    resolved.push_back(r->str(ssa.namer()));
  }
  std::sort(resolved.begin(), resolved.end());
  EXPECT_EQ(resolved[0], "0");
  EXPECT_EQ(resolved[1], "2*x.0 + 1");
  EXPECT_EQ(ssa.vars[phi->var].name.substr(0, 2), "x.");
  EXPECT_GE(ssa.blocks[at].in.size(), 2u);
}

TEST(Ssa, SinglePredecessorHasNoPhis) {
  Program p = parse(kFig1);
  Cfg ssa = to_ssa(lower_function(p.main()));
  EXPECT_TRUE(ssa.check().empty());
  for (const auto& b : ssa.blocks)
    if (b.in.size() < 2) EXPECT_TRUE(b.phis.empty());
}

TEST(Ssa, SinglePathRoundTrip) {
  Program p = parse("int main(){ int x = 3; x = x + 1; int y = 2 * x; x = y - x; return x; }");
  Cfg pre = lower_function(p.main(), {true});
  Cfg ssa = to_ssa(pre);
  ASSERT_EQ(pre.blocks.size(), ssa.blocks.size());
  ASSERT_EQ(pre.edges.size(), ssa.edges.size());
  for (BlockId b = 0; b < pre.blocks.size(); ++b) {
    EXPECT_TRUE(ssa.blocks[b].phis.empty());
    ASSERT_EQ(pre.blocks[b].defs.size(), ssa.blocks[b].defs.size());
    for (std::size_t k = 0; k < pre.blocks[b].defs.size(); ++k) {
      const auto& d0 = pre.blocks[b].defs[k];
      const auto& d1 = ssa.blocks[b].defs[k];
      EXPECT_EQ(ssa.vars[d1.var].base, pre.vars[d0.var].name);
      // erase the renaming and compare
      Rhs r = d1.rhs;
      r.substitute([&](VarId v) {
        for (VarId o = 0; o < pre.vars.size(); ++o)
          if (pre.vars[o].name == ssa.vars[v].base) return LinearExpr::var(o);
        return LinearExpr::var(v);
      });
      EXPECT_EQ(r.str(pre.namer()), d0.rhs.str(pre.namer()));
    }
  }
  EXPECT_EQ(simulate(pre, seeded(3)).finals, simulate(ssa, seeded(3)).finals);
}

TEST(Unroll, ForLoopPeeled) {
  Program p = parse("int main(int n){ int s = 0; for (int i = 0; i < n; i++) { s = s + 1; } return s; }");
  Cfg cfg = lower_function(p.main());
  Cfg u = unroll_loops_once(cfg);
  EXPECT_TRUE(u.check().empty());
  EXPECT_GT(u.blocks.size(), cfg.blocks.size());
  // the peeled copy tests i < n (as i - n + 1 <= 0) before the loop is entered
  std::size_t tests = 0;
  for (const auto& e : u.edges)
    if (e.guard && e.guard->rel == Rel::LE && e.guard->expr.constant() == 1) ++tests;
  EXPECT_EQ(tests, 2u);
}

TEST(Unroll, LoopFreeUnchanged) {
  Program p = parse("int main(int a){ int x = 0; if (a > 0) x = 1; else x = 2; return x; }");
  Cfg cfg = lower_function(p.main());
  Cfg u = unroll_loops_once(cfg);
  EXPECT_EQ(u.dump(), cfg.dump());
}

TEST(Unroll, NestedGrowsByBothBodies) {
  Program p = parse(R"(int main(int n){
    int s = 0;
    int i = 0;
    while (i < n) {
      int j = 0;
      while (j < i) { s = s + j; j = j + 1; }
      i = i + 1;
    }
    return s;
  })");
  Cfg cfg = lower_function(p.main());
  Dominators dom = compute_dominators(cfg);
  // natural loop bodies, counted by an independent backward walk
  std::vector<std::size_t> sizes;
  for (const auto& e : cfg.edges) {
    if (!dom.dominates(e.dst, e.src)) continue;
    std::set<BlockId> body{e.dst, e.src};
    std::vector<BlockId> work{e.src};
    while (!work.empty()) {
      BlockId b = work.back();
      work.pop_back();
      if (b == e.dst) continue;
      for (BlockId q : cfg.predecessors(b))
        if (body.insert(q).second) work.push_back(q);
    }
    sizes.push_back(body.size());
  }
  ASSERT_EQ(sizes.size(), 2u);
  Cfg u = unroll_loops_once(cfg);
  EXPECT_TRUE(u.check().empty());
  EXPECT_EQ(u.blocks.size(), cfg.blocks.size() + sizes[0] + sizes[1]);
  for (int n = -1; n < 5; ++n) {
    auto in = [n](bool) { return Rational(n); };
    Cfg a = cfg, b = u;
    a.observed = b.observed = {};
    EXPECT_EQ(simulate(cfg, in).outcome, simulate(u, in).outcome);
  }
}

TEST(Unroll, IrreducibleRegionSkipped) {
  Cfg cfg;
  cfg.function = "irr";
  cfg.entry = cfg.add_block();
  BlockId a = cfg.add_block(), b = cfg.add_block();
  cfg.exit = cfg.add_block();
  VarId x = cfg.add_var("x", "x", true);
  cfg.blocks[cfg.entry].defs.push_back({x, Rhs::havoc(true)});
  cfg.add_edge(cfg.entry, a, Constraint::le(LinearExpr::var(x), LinearExpr(0)));
  cfg.add_edge(cfg.entry, b, Constraint::gt(LinearExpr::var(x), LinearExpr(0)));
  cfg.add_edge(a, b);
  cfg.add_edge(b, a, Constraint::le(LinearExpr::var(x), LinearExpr(5)));
  cfg.add_edge(b, cfg.exit, Constraint::gt(LinearExpr::var(x), LinearExpr(5)));
  Cfg u = unroll_loops_once(cfg);
  EXPECT_EQ(u.blocks.size(), cfg.blocks.size());
  ASSERT_FALSE(u.diagnostics.empty());
  EXPECT_NE(u.diagnostics[0].find("irreducible"), std::string::npos);
}

TEST(Inline, IdentityDepthOne) {
  const char* src = "int id(int a){ return a; } int main(){ int x = id(5); return x; }";
  Program p = parse(src);
  FrontendOptions o;
  o.inline_depth = 1;
  o.observe_exit = true;
  Cfg cfg = build_ssa_cfg(p, "main", o);
  EXPECT_EQ(count_defs(cfg, Rhs::Havoc), 0u);
  EXPECT_EQ(simulate(cfg, seeded(1)).finals.at("x"), 5);
}

TEST(Inline, DepthZeroIsHavoc) {
  Program p = parse("int id(int a){ return a; } int main(){ int x = id(5); return x; }");
  FrontendOptions o;
  o.inline_depth = 0;
  Cfg cfg = build_ssa_cfg(p, "main", o);
  EXPECT_EQ(count_defs(cfg, Rhs::Havoc), 1u);
}

TEST(Inline, RecursionBecomesHavoc) {
  Program p = parse("int f(int n){ if (n <= 0) return 0; return f(n - 1) + 1; } int main(){ int x = f(3); return x; }");
  for (int depth : {1, 3, 8}) {
    Program q = inline_calls(p, depth);
    std::string text = to_source(q);
    EXPECT_EQ(text.find("f(n"), text.rfind("f(n"));  // only the original definition keeps the call
    const Function& m = *q.find("main");
    std::size_t inlined = 0;
    std::function<void(const std::vector<Stmt>&)> walk = [&](const std::vector<Stmt>& ss) {
      for (const auto& s : ss) {
        inlined += s.kind == Stmt::Inlined;
        walk(s.body);
        walk(s.orelse);
      }
    };
    walk(m.body);
    EXPECT_EQ(inlined, 1u) << text;
  }
}

TEST(Semantics, RandomProgramsPreserved) {
  int compared = 0;
  for (unsigned seed = 1; seed <= 120; ++seed) {
    pagai::testing::ProgramGen gen(seed);
    std::string src = gen.generate();
    Program p;
    ASSERT_NO_THROW(p = parse(src)) << src;
    FrontendOptions o;
    o.inline_depth = 8;
    o.observe_exit = true;
    Cfg ssa = build_ssa_cfg(p, "main", o);
    ASSERT_TRUE(ssa.check().empty()) << src << ssa.dump();
    Program inl = inline_calls(p, 8);
    Cfg pre = lower_function(*inl.find("main"), {true});
    for (unsigned run = 0; run < 8; ++run) {
      RunResult a = interpret(p, "main", seeded(seed * 100 + run));
      RunResult b = simulate(ssa, seeded(seed * 100 + run));
      RunResult c = simulate(pre, seeded(seed * 100 + run));
      ASSERT_EQ(to_string(a.outcome), to_string(b.outcome)) << src;
      ASSERT_EQ(to_string(a.outcome), to_string(c.outcome)) << src;
      if (a.outcome == Outcome::Exit) {
        ASSERT_EQ(a.finals, b.finals) << src << ssa.dump();
        ASSERT_EQ(a.finals, c.finals) << src;
        ++compared;
      }
    }
  }
  EXPECT_GT(compared, 200);
}

TEST(Semantics, SsaSingleDefinition) {
  for (unsigned seed = 200; seed < 240; ++seed) {
    pagai::testing::ProgramGen gen(seed);
    Program p = parse(gen.generate());
    Cfg ssa = build_ssa_cfg(p, "main");
    std::vector<int> defs(ssa.vars.size());
    for (const auto& b : ssa.blocks) {
      for (const auto& ph : b.phis) ++defs[ph.var];
      for (const auto& d : b.defs) ++defs[d.var];
    }
    for (std::size_t v = 0; v < defs.size(); ++v) EXPECT_LE(defs[v], 1) << ssa.vars[v].name;
  }
}
