#include "pagai/harness.hpp"

#include <cmath>
#include <set>

namespace pagai::harness {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::LeftStronger: return "left-stronger";
    case Verdict::RightStronger: return "right-stronger";
    case Verdict::Equal: return "equal";
    case Verdict::Uncomparable: return "uncomparable";
  }
  return "?";
}

Verdict flip(Verdict v) {
  if (v == Verdict::LeftStronger) return Verdict::RightStronger;
  if (v == Verdict::RightStronger) return Verdict::LeftStronger;
  return v;
}

PointVerdict compare_point(smt::SolverSession& s, const Cfg& cfg, const std::vector<Conjunction>& a,
                           const std::vector<Conjunction>& b) {
  std::set<VarId> vars;
  for (const auto* l : {&a, &b})
    for (const auto& conj : *l)
      for (const auto& c : conj)
        for (const auto& [v, k] : c.expr.terms()) vars.insert(v);
  auto sym = [](VarId v) { return "h!" + std::to_string(v); };
  auto integer = [&](VarId v) { return v >= cfg.vars.size() || cfg.vars[v].integer; };
  auto formula = [&](const std::vector<Conjunction>& l) {
    std::string out = "(or false";
    for (const auto& conj : l) {
      out += " (and true";
      for (const auto& c : conj) out += " " + smt::render_constraint(c, sym, integer);
      out += ")";
    }
    return out + ")";
  };
  std::string fa = formula(a), fb = formula(b);
  PointVerdict r;
  try {
    s.reset();
    for (VarId v : vars) s.declare(sym(v), integer(v) ? "Int" : "Real");
    auto ab = s.solve({fa, "(not " + fb + ")"}, false).status;
    auto ba = s.solve({fb, "(not " + fa + ")"}, false).status;
    if (ab == smt::Status::Unknown || ba == smt::Status::Unknown) {
      r.inconclusive = true;
      return r;
    }
    bool le = ab == smt::Status::Unsat, ge = ba == smt::Status::Unsat;
    r.verdict = le && ge ? Verdict::Equal : le ? Verdict::LeftStronger : ge ? Verdict::RightStronger : Verdict::Uncomparable;
  } catch (const smt::SolverInconclusive&) {
    r.inconclusive = true;
  }
  return r;
}

namespace {

double pct(std::size_t k, std::size_t n) { return n == 0 ? 0.0 : std::round(10000.0 * k / n) / 100.0; }

void finish(ComparisonReport& r) {
  r.points = r.left_stronger + r.right_stronger + r.equal + r.uncomparable;
  r.degenerate = r.points == 0;
  r.pct_left = pct(r.left_stronger, r.points);
  r.pct_right = pct(r.right_stronger, r.points);
  r.pct_equal = pct(r.equal, r.points);
  r.pct_uncomparable = pct(r.uncomparable, r.points);
}

}  // namespace

ComparisonReport aggregate_report(const std::vector<PointVerdict>& verdicts, double left_seconds,
                                  double right_seconds) {
  ComparisonReport r;
  for (const auto& v : verdicts) {
    switch (v.verdict) {
      case Verdict::LeftStronger: ++r.left_stronger; break;
      case Verdict::RightStronger: ++r.right_stronger; break;
      case Verdict::Equal: ++r.equal; break;
      case Verdict::Uncomparable: ++r.uncomparable; break;
    }
    if (v.inconclusive) ++r.inconclusive;
  }
  r.left_seconds = left_seconds;
  r.right_seconds = right_seconds;
  finish(r);
  return r;
}

ComparisonReport merge(const std::vector<ComparisonReport>& parts) {
  ComparisonReport r;
  for (const auto& p : parts) {
    if (r.left.empty()) {
      r.left = p.left;
      r.right = p.right;
    }
    r.left_stronger += p.left_stronger;
    r.right_stronger += p.right_stronger;
    r.equal += p.equal;
    r.uncomparable += p.uncomparable;
    r.inconclusive += p.inconclusive;
    r.left_seconds += p.left_seconds;
    r.right_seconds += p.right_seconds;
  }
  finish(r);
  return r;
}

std::vector<BlockId> compared_points(const Cfg& cfg, const CfgAnalysisInfo& info) {
  std::vector<BlockId> out;
  for (BlockId p : info.analysis_points)
    if (p != cfg.entry) out.push_back(p);
  return out;
}

}  // namespace pagai::harness
