#include "pagai/domains/abstract_value.hpp"
#include "laws.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <array>
#include <limits>

using namespace pagai;
using pagai::testing::K;
using pagai::testing::X;

namespace {

const DomainKind kAll[] = {DomainKind::Box, DomainKind::Octagon, DomainKind::Polyhedron};

AbstractValue interval(DomainKind d, Rational lo, Rational hi) {
  return AbstractValue::from_constraints(d, {0}, {Constraint::ge(X(0), K(lo)), Constraint::le(X(0), K(hi))});
}

AbstractValue point(DomainKind d, const std::vector<Rational>& coords) {
  Dims dims;
  Conjunction cs;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    dims.push_back(static_cast<VarId>(i));
    cs.push_back(Constraint::eq(X(static_cast<VarId>(i)), K(coords[i])));
  }
  return AbstractValue::from_constraints(d, dims, cs);
}

}  // namespace

TEST(Make, TopAndBottom) {
  auto b = AbstractValue::top(DomainKind::Box, {0});
  EXPECT_TRUE(b.is_top());
  EXPECT_TRUE(b.box()->hi(0).infinite);
  EXPECT_TRUE(b.box()->neg_lo(0).infinite);

  auto p = AbstractValue::bottom(DomainKind::Polyhedron, {0, 1});
  EXPECT_TRUE(p.is_bottom());
  EXPECT_TRUE(p.polyhedron()->rays().empty());
  EXPECT_TRUE(p.polyhedron()->lines().empty());

  auto o = AbstractValue::top(DomainKind::Octagon, {});
  EXPECT_FALSE(o.is_bottom());
  EXPECT_TRUE(o.is_top());
  EXPECT_TRUE(AbstractValue::bottom(DomainKind::Octagon, {}).is_bottom());
  EXPECT_FALSE(AbstractValue::top(DomainKind::Polyhedron, {}).is_bottom());
}

TEST(Join, BoxHull) {
  auto j = interval(DomainKind::Box, 0, 1).join(interval(DomainKind::Box, 3, 5));
  EXPECT_TRUE(j.equals(interval(DomainKind::Box, 0, 5)));
}

TEST(Join, PolyhedronHullOfTwoPoints) {
  auto j = point(DomainKind::Polyhedron, {0}).join(point(DomainKind::Polyhedron, {1}));
  EXPECT_TRUE(j.equals(interval(DomainKind::Polyhedron, 0, 1)));
}

TEST(Join, OctagonMatchesPerFormMaximum) {
  // Oracle: the join's bound on each octagonal form is the max over the two
  // points of the form's value.
  std::vector<std::array<int, 2>> pts = {{0, 0}, {1, 1}};
  auto j = point(DomainKind::Octagon, {0, 0}).join(point(DomainKind::Octagon, {1, 1}));
  const Octagon closed = j.octagon()->closed();
  const Dbm& m = closed.matrix();
  for (std::size_t f = 0; f < 4; ++f)
    for (std::size_t g = 0; g < 4; ++g) {
      auto form = [](std::size_t k, const std::array<int, 2>& p) { return k % 2 ? -p[k / 2] : p[k / 2]; };
      int best = std::numeric_limits<int>::min();
      for (const auto& p : pts) best = std::max(best, form(g, p) - form(f, p));
      ASSERT_FALSE(m.at(f, g).infinite);
      EXPECT_EQ(m.at(f, g).value, Rational(best)) << f << "," << g;
    }
  auto expected = AbstractValue::from_constraints(
      DomainKind::Octagon, {0, 1},
      {Constraint::ge(X(0), K(0)), Constraint::le(X(0), K(1)), Constraint::ge(X(1), K(0)),
       Constraint::le(X(1), K(1)), Constraint::eq(X(0) - X(1), K(0))});
  EXPECT_TRUE(j.equals(expected));
}

TEST(MeetConstraints, Examples) {
  auto half = AbstractValue::top(DomainKind::Polyhedron, {0, 1}).meet_constraints({Constraint::ge(X(1), K(100))});
  auto cs = half.to_constraints();
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].str(pagai::testing::name_xyz), "-y <= -100");

  auto b = interval(DomainKind::Box, 0, 10).meet_constraints({Constraint::le(X(0), K(3))});
  EXPECT_TRUE(b.equals(interval(DomainKind::Box, 0, 3)));

  auto dropped = AbstractValue::top(DomainKind::Box, {0, 1}).meet_constraints({Constraint::le(X(0) + X(1), K(1))});
  EXPECT_TRUE(dropped.is_top());
}

TEST(Transfer, PhaseLoopPhaseZeroPath) {
  // (x, t, phase) = dims 0, 1, 2
  auto start = point(DomainKind::Polyhedron, {0, 0, 0});
  ParallelAssign pa;
  pa.sources = {0, 1, 2};
  pa.targets = {0, 1, 2};
  pa.guards = {Constraint::lt(X(1), K(100)), Constraint::eq(X(2), K(0))};
  pa.exprs = {X(0) + K(2), X(1) + K(1), K(1) - X(2)};
  auto out = start.transfer(pa);
  EXPECT_TRUE(out.equals(point(DomainKind::Polyhedron, {2, 1, 1})));
}

TEST(Transfer, IdentityAndHavoc) {
  for (auto d : kAll) {
    auto v = AbstractValue::from_constraints(
        d, {0, 1},
        {Constraint::ge(X(0), K(0)), Constraint::le(X(0), K(1)), Constraint::ge(X(1), K(2)),
         Constraint::le(X(1), K(3))});
    EXPECT_TRUE(v.transfer(ParallelAssign::identity({0, 1})).equals(v)) << to_string(d);
    auto h = v.transfer(ParallelAssign::havoc({0, 1}, 0));
    auto expected = AbstractValue::from_constraints(d, {0, 1}, {Constraint::ge(X(1), K(2)), Constraint::le(X(1), K(3))});
    EXPECT_TRUE(h.equals(expected)) << to_string(d) << ": " << h.str(pagai::testing::name_xyz);
  }
}

TEST(Widen, Examples) {
  auto w = interval(DomainKind::Box, 0, 1).widen(interval(DomainKind::Box, 0, 2));
  auto expected = AbstractValue::from_constraints(DomainKind::Box, {0}, {Constraint::ge(X(0), K(0))});
  EXPECT_TRUE(w.equals(expected));

  auto pw = interval(DomainKind::Polyhedron, 0, 1).widen(interval(DomainKind::Polyhedron, 0, 2));
  EXPECT_TRUE(pw.equals(AbstractValue::from_constraints(DomainKind::Polyhedron, {0}, {Constraint::ge(X(0), K(0))})));

  for (auto d : kAll) {
    auto a = interval(d, -3, 7);
    EXPECT_TRUE(a.widen(a).equals(a));
  }
}

TEST(IsLeq, Examples) {
  for (auto d : kAll) {
    EXPECT_TRUE(AbstractValue::bottom(d, {0}).leq(interval(d, 5, 6)));
    EXPECT_TRUE(interval(d, 0, 1).leq(interval(d, 0, 2)));
    EXPECT_FALSE(interval(d, 0, 2).leq(interval(d, 0, 1)));
  }
  auto a = AbstractValue::from_constraints(DomainKind::Octagon, {0, 1}, {Constraint::le(X(0) - X(1), K(0))});
  auto b = AbstractValue::from_constraints(DomainKind::Octagon, {0, 1}, {Constraint::le(X(0) - X(1), K(1))});
  EXPECT_TRUE(a.leq(b));
  EXPECT_FALSE(b.leq(a));
}

TEST(ToConstraints, Examples) {
  auto b = interval(DomainKind::Box, 0, 5).to_constraints();
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].str(pagai::testing::name_xyz), "-x <= 0");
  EXPECT_EQ(b[1].str(pagai::testing::name_xyz), "x <= 5");

  // Segment from (0,0) to (2,1).
  auto seg = point(DomainKind::Polyhedron, {0, 0}).join(point(DomainKind::Polyhedron, {2, 1}));
  auto cs = seg.to_constraints();
  auto expected = AbstractValue::from_constraints(
      DomainKind::Polyhedron, {0, 1},
      {Constraint::eq(X(0) - X(1, 2), K(0)), Constraint::ge(X(0), K(0)), Constraint::le(X(0), K(2))});
  EXPECT_TRUE(seg.equals(expected));
  bool has_eq = false;
  for (const auto& c : cs)
    if (c.rel == Rel::EQ) {
      has_eq = true;
      EXPECT_EQ(c.str(pagai::testing::name_xyz), "x - 2*y = 0");
    }
  EXPECT_TRUE(has_eq);
  EXPECT_EQ(cs.size(), 3u);

  for (auto d : kAll) {
    EXPECT_TRUE(AbstractValue::top(d, {0, 1}).to_constraints().empty());
    auto bot = AbstractValue::bottom(d, {0}).to_constraints();
    ASSERT_EQ(bot.size(), 1u);
    EXPECT_TRUE(bot[0].is_trivially_false());
  }
}

TEST(AdaptDims, Examples) {
  auto p = AbstractValue::from_constraints(
      DomainKind::Polyhedron, {0, 1},
      {Constraint::eq(X(0), X(1)), Constraint::ge(X(1), K(0)), Constraint::le(X(1), K(1))});
  EXPECT_TRUE(p.adapt_dims({0}).equals(interval(DomainKind::Polyhedron, 0, 1)));

  auto b = interval(DomainKind::Box, 0, 1).adapt_dims({0, 2});
  EXPECT_TRUE(b.box()->hi(1).infinite);
  EXPECT_TRUE(b.box()->neg_lo(1).infinite);
  EXPECT_EQ(b.box()->hi(0).value, 1);

  // Octagon: project the middle variable y out of {x - y <= 1, y - z <= 2, y <= 4, -y <= 0}
  Conjunction cs = {Constraint::le(X(0) - X(1), K(1)), Constraint::le(X(1) - X(2), K(2)), Constraint::le(X(1), K(4)),
                    Constraint::ge(X(1), K(0))};
  auto o = AbstractValue::from_constraints(DomainKind::Octagon, {0, 1, 2}, cs);
  auto projected = o.adapt_dims({0, 2});
  auto fm = pagai::testing::fourier_motzkin(o.to_constraints(), 1);
  auto oracle = AbstractValue::from_constraints(DomainKind::Polyhedron, {0, 2}, fm);
  auto mine = AbstractValue::from_constraints(DomainKind::Polyhedron, {0, 2}, projected.to_constraints());
  EXPECT_TRUE(mine.equals(oracle)) << mine.str(pagai::testing::name_xyz) << " vs " << oracle.str(pagai::testing::name_xyz);
}

TEST(OctClose, AddsImpliedBound) {
  // x <= 1, y - x <= 1 over (x, y).
  Dbm m(2);
  m.tighten(1, 0, Bound::finite(2));  // 2x <= 2
  m.tighten(0, 2, Bound::finite(1));  // y - x <= 1
  Dbm closed = m;
  ASSERT_TRUE(oct_close(closed));
  // Oracle: plain Floyd-Warshall on doubles over the same constraint graph,
  // followed by the strengthening step.
  const double inf = std::numeric_limits<double>::infinity();
  double g[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g[i][j] = m.at(i, j).infinite ? inf : m.at(i, j).value.get_d();
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g[i][j] = std::min(g[i][j], g[i][k] + g[k][j]);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g[i][j] = std::min(g[i][j], (g[i][i ^ 1] + g[j ^ 1][j]) / 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (g[i][j] == inf)
        EXPECT_TRUE(closed.at(i, j).infinite);
      else
        EXPECT_DOUBLE_EQ(closed.at(i, j).value.get_d(), g[i][j]);
    }
  EXPECT_EQ(closed.at(3, 2).value, 4);  // 2y <= 4
  Dbm again = closed;
  ASSERT_TRUE(oct_close(again));
  EXPECT_TRUE(again == closed);
}

TEST(OctClose, DetectsEmptiness) {
  Dbm m(1);
  m.tighten(1, 0, Bound::finite(0));   // x <= 0
  m.tighten(0, 1, Bound::finite(-2));  // -x <= -1
  EXPECT_FALSE(oct_close(m));
}

TEST(Polyhedron, DoubleDescriptionConsistency) {
  auto p = Polyhedron::from_constraints(
      3, {Constraint::le(X(0) + X(1) + X(2), K(3)), Constraint::ge(X(0), K(0)), Constraint::ge(X(1), K(0)),
          Constraint::ge(X(2), K(0)), Constraint::le(X(0) - X(1), K(1))});
  EXPECT_TRUE(p.consistent());
  EXPECT_EQ(p.inequalities().size(), 5u);
  auto unbounded = Polyhedron::from_constraints(2, {Constraint::ge(X(0), X(1))});
  EXPECT_TRUE(unbounded.consistent());
  EXPECT_EQ(unbounded.lines().size(), 1u);
  auto empty = Polyhedron::from_constraints(1, {Constraint::ge(X(0), K(1)), Constraint::le(X(0), K(0))});
  EXPECT_TRUE(empty.is_bottom());
}

TEST(Polyhedron, RedundantConstraintsAreDropped) {
  auto p = Polyhedron::from_constraints(1, {Constraint::le(X(0), K(3)), Constraint::le(X(0), K(5)),
                                             Constraint::ge(X(0), K(0)), Constraint::ge(X(0), K(-2))});
  EXPECT_EQ(p.inequalities().size(), 2u);
}

TEST(Polyhedron, DimensionGuard) {
  EXPECT_THROW(Polyhedron::top(kMaxPolyDims + 1), DimensionLimit);
  EXPECT_NO_THROW(Polyhedron::top(kMaxPolyDims));
}

TEST(Laws, RandomizedPerDomain) {
  smt::SolverSession s;
  for (DomainKind k : {DomainKind::Box, DomainKind::Octagon, DomainKind::Polyhedron}) {
    auto st = laws::run(k, 5000, 17, &s, 4);
    EXPECT_EQ(st.failures, 0u) << st.first;
    EXPECT_GE(st.checks, 5000u);
    if (k != DomainKind::Box) EXPECT_GT(st.smt_checks, 10u);
  }
}
