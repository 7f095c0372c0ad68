#include "pagai/engines.hpp"
#include "pagai/frontend/interp.hpp"
#include "pagai/frontend/passes.hpp"
#include "program_gen.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace pagai;
using smt::SolverSession;

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

const Technique kAll[] = {Technique::S, Technique::G, Technique::PF, Technique::GPF, Technique::DIS};
const DomainKind kDomains[] = {DomainKind::Box, DomainKind::Octagon, DomainKind::Polyhedron};

struct Built {
  Cfg cfg;
  CfgAnalysisInfo info;
};

Built build(const std::string& src, bool observe = true) {
  FrontendOptions o;
  o.observe_exit = observe;
  Built b{build_ssa_cfg(parse(src), "main", o), {}};
  b.info = analyze_cfg(b.cfg);
  return b;
}

InvariantMap run(const Built& b, Technique t, DomainKind d, SolverSession& s, EngineConfig c = {}) {
  c.domain = d;
  return analyze(b.cfg, b.info, t, c, &s);
}

bool proved_all(const Built& b, const InvariantMap& inv, SolverSession& s) {
  auto st = check_assertions(b.cfg, b.info, inv, s);
  EXPECT_FALSE(st.empty());
  for (const auto& a : st)
    if (!a.proved) return false;
  return true;
}

NondetSource seeded(unsigned seed) {
  auto rng = std::make_shared<std::mt19937>(seed);
  return [rng](bool) { return Rational(std::uniform_int_distribution<int>(-6, 6)(*rng)); };
}

// Simulated states at reported points must lie in the invariant.
int violations(const Built& b, const InvariantMap& inv, unsigned seed, int trials) {
  auto pts = reported_points(b.cfg, b.info);
  int bad = 0;
  for (int k = 0; k < trials; ++k) {
    simulate(b.cfg, seeded(seed * 1000 + k), 100000, [&](BlockId p, const Env& env) {
      if (!std::binary_search(pts.begin(), pts.end(), p)) return;
      auto val = [&](VarId v) { return v < env.size() && env[v] ? *env[v] : Rational(0); };
      if (!inv.contains(p, val)) ++bad;
    });
  }
  return bad;
}

}  // namespace

TEST(PhaseLoop, PolyhedraDiscrimination) {
  SolverSession s;
  Built b = build(kFig1);
  auto S = run(b, Technique::S, DomainKind::Polyhedron, s);
  EXPECT_FALSE(proved_all(b, S, s));
  for (Technique t : {Technique::PF, Technique::GPF, Technique::DIS}) {
    auto inv = run(b, t, DomainKind::Polyhedron, s);
    EXPECT_FALSE(inv.downgraded);
    EXPECT_TRUE(proved_all(b, inv, s)) << display_name(t);
    EXPECT_LT(inv.seconds, 5.0);
  }
}

TEST(Classic, CountingLoopBox) {
  SolverSession s;
  Built b = build("int main(){ int i = 0; while (i < 10) i++; return i; }");
  auto inv = run(b, Technique::S, DomainKind::Box, s);
  std::string r = render_invariant(b.cfg, b.info, inv, b.cfg.exit, b.cfg.namer());
  auto val = [&](Rational x) {
    return [&b, x](VarId v) { return b.cfg.vars[v].base == "i" ? x : Rational(0); };
  };
  auto ex = b.cfg.exit;
  EXPECT_TRUE(inv.collapsed(ex, b.info.dims(ex)).to_constraints().size() >= 1) << r;
  bool in10 = inv.contains(ex, val(10)), in9 = inv.contains(ex, val(9)), in11 = inv.contains(ex, val(11));
  if (!b.info.dims(ex).empty()) {
    EXPECT_TRUE(in10) << r;
    EXPECT_FALSE(in9) << r;
    EXPECT_FALSE(in11) << r;
  }
}

TEST(Classic, BudgetExceeded) {
  Built b = build(kFig1);
  EngineConfig c;
  c.budget_factor = 1;
  EXPECT_THROW(analyze_classic(b.cfg, b.info, c), BudgetExceeded);
}

TEST(EnBloc, DerivedZeroUnderEveryCell) {
  SolverSession s;
  Built b = build("int main(){ int x = nondet_int(); assume(x >= 0 && x <= 1); int y = x; int z = x - y; return z; }");
  for (Technique t : kAll)
    for (DomainKind d : kDomains) {
      auto inv = run(b, t, d, s);
      std::string r = render_invariant(b.cfg, b.info, inv, b.cfg.exit, b.cfg.namer());
      EXPECT_NE(r.find("= 0"), std::string::npos) << display_name(t) << "/" << to_string(d) << ": " << r;
    }
}

TEST(PathFocusing, RefinesClassicWithoutLoops) {
  SolverSession s;
  for (unsigned seed = 1; seed <= 30; ++seed) {
    std::mt19937 rng(seed);
    auto c = [&] { return std::to_string(std::uniform_int_distribution<int>(-3, 3)(rng)); };
    std::string src = "int main(int a, int b){ int x = 0; int y = 0;"
                      " if (a < " + c() + ") { x = a + " + c() + "; y = 1; } else { x = " + c() + " - a; y = 2; }"
                      " if (b > x) { y = y + b; } else { y = y - " + c() + "; }"
                      " return x + y; }";
    Built b = build(src);
    auto S = run(b, Technique::S, DomainKind::Polyhedron, s);
    auto P = run(b, Technique::PF, DomainKind::Polyhedron, s);
    for (BlockId p : reported_points(b.cfg, b.info)) {
      auto& d = b.info.dims(p);
      EXPECT_TRUE(P.collapsed(p, d).leq(S.collapsed(p, d))) << src;
    }
  }
}

TEST(Disjunctive, SingleDisjunctMatchesPathFocusing) {
  SolverSession s;
  Built b = build(kFig1);
  EngineConfig c;
  c.max_disjuncts = 1;
  auto D = run(b, Technique::DIS, DomainKind::Polyhedron, s, c);
  auto P = run(b, Technique::PF, DomainKind::Polyhedron, s, c);
  for (BlockId p : reported_points(b.cfg, b.info)) {
    auto& d = b.info.dims(p);
    EXPECT_TRUE(D.collapsed(p, d).equals(P.collapsed(p, d)));
  }
}

TEST(Disjunctive, KeepsModesApart) {
  SolverSession s;
  Built b = build(R"(
int main() {
  int x = 0; int m = 0; int k = 0;
  while (k < 20) {
    if (m == 0) { x = x + 1; if (x >= 5) m = 1; }
    else { x = x - 1; if (x <= 0) m = 0; }
    k++;
  }
  assert(x >= 0 && x <= 5);
  return x;
}
)");
  auto inv = run(b, Technique::DIS, DomainKind::Polyhedron, s);
  EXPECT_EQ(verify_inductive(b.cfg, b.info, inv, s), std::nullopt);
  std::size_t most = 0;
  for (const auto& [p, l] : inv.values) most = std::max(most, l.size());
  EXPECT_GE(most, 1u);
  EXPECT_LE(most, 5u);
}

TEST(Engines, InductiveAndSoundOnRandomPrograms) {
  SolverSession s;
  int cells = 0;
  for (unsigned seed = 1; seed <= 12; ++seed) {
    pagai::testing::ProgramGen gen(seed);
    std::string src = gen.generate();
    Built b = build(src);
    for (Technique t : kAll)
      for (DomainKind d : kDomains) {
        auto inv = run(b, t, d, s);
        auto why = verify_inductive(b.cfg, b.info, inv, s);
        EXPECT_EQ(why, std::nullopt) << seed << " " << display_name(t) << "/" << to_string(d);
        EXPECT_EQ(violations(b, inv, seed, 30), 0) << seed << " " << display_name(t) << "/" << to_string(d);
        ++cells;
      }
  }
  EXPECT_EQ(cells, 12 * 15);
}

TEST(Engines, UnknownDowngradesToClassic) {
  auto path = std::filesystem::temp_directory_path() / "pagai_fake_engines_unknown.sh";
  {
    std::ofstream os(path);
    os << "#!/bin/sh\nwhile read line; do\n  case \"$line\" in\n"
       << "    \"(check-sat)\") echo unknown ;;\n"
       << "    \"(exit)\") exit 0 ;;\n"
       << "    *) echo success ;;\n  esac\ndone\n";
  }
  std::filesystem::permissions(path, std::filesystem::perms::owner_all);
  smt::SolverConfig cfg;
  cfg.command = path.string();
  SolverSession s(cfg);
  Built b = build(kFig1);
  auto inv = run(b, Technique::PF, DomainKind::Polyhedron, s);
  EXPECT_TRUE(inv.downgraded);
  EXPECT_FALSE(inv.events.empty());
  EXPECT_EQ(inv.technique, Technique::PF);
}
