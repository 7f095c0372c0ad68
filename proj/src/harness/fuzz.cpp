#include "pagai/frontend/interp.hpp"
#include "pagai/harness.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace pagai::harness {

namespace {

constexpr long kSmall = 1L << 40;  // keeps every row sum inside __int128

bool small(const Integer& z) { return z.fits_slong_p() && std::abs(z.get_si()) < kSmall; }

// A disjunct as integer rows over the positions of dims(p); exact while the
// point's coordinates are small integers.
struct Compiled {
  struct Row {
    std::vector<std::pair<std::size_t, long>> terms;
    long c = 0;
    Rel rel = Rel::LE;
  };
  bool ok = true;
  std::vector<Row> rows;
  const AbstractValue* value = nullptr;

  bool holds(const std::vector<long>& x) const {
    for (const auto& r : rows) {
      __int128 s = r.c;
      for (const auto& [i, a] : r.terms) s += static_cast<__int128>(a) * x[i];
      if (r.rel == Rel::EQ ? s != 0 : r.rel == Rel::LT ? s >= 0 : s > 0) return false;
    }
    return true;
  }
};

Compiled compile(const AbstractValue& v, const Dims& dims) {
  Compiled out;
  out.value = &v;
  if (v.is_bottom()) {
    out.rows.push_back({{}, 1, Rel::LE});  // 1 <= 0
    return out;
  }
  if (v.dims() != dims) return out.ok = false, out;
  for (const auto& c : v.to_constraints()) {
    Integer l = c.expr.constant().get_den();
    for (const auto& [x, a] : c.expr.terms()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a.get_den_mpz_t());
    Compiled::Row r;
    r.rel = c.rel;
    Integer k = c.expr.constant().get_num() * (l / c.expr.constant().get_den());
    if (!small(k)) return out.ok = false, out;
    r.c = k.get_si();
    for (const auto& [x, a] : c.expr.terms()) {
      auto it = std::lower_bound(dims.begin(), dims.end(), x);
      if (it == dims.end() || *it != x) return out.ok = false, out;
      Integer z = a.get_num() * (l / a.get_den());
      if (!small(z)) return out.ok = false, out;
      r.terms.emplace_back(it - dims.begin(), z.get_si());
    }
    out.rows.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<FuzzResult> soundness_fuzz(const Cfg& cfg, const CfgAnalysisInfo& info,
                                       const std::vector<const InvariantMap*>& invs, int trials, unsigned seed,
                                       std::size_t step_cap) {
  auto pts = reported_points(cfg, info);
  // compiled[i][p]: disjuncts of invs[i] at p
  std::vector<std::map<BlockId, std::vector<Compiled>>> compiled(invs.size());
  for (std::size_t i = 0; i < invs.size(); ++i)
    for (BlockId p : pts) {
      auto& slot = compiled[i][p];
      if (auto it = invs[i]->values.find(p); it != invs[i]->values.end())
        for (const auto& d : it->second) slot.push_back(compile(d, info.dims(p)));
    }

  std::vector<FuzzResult> rs(invs.size());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> ints(-1000, 1000);
  std::uniform_int_distribution<int> halves(-2000, 2000);
  std::size_t crossings = 0, truncated = 0;
  std::vector<Rational> pt;
  std::vector<long> xs;
  for (int k = 0; k < trials; ++k) {
    NondetSource nondet = [&](bool integer) {
      return integer ? Rational(ints(rng)) : Rational(halves(rng)) / 2;
    };
    auto hook = [&](BlockId p, const Env& env) {
      if (!std::binary_search(pts.begin(), pts.end(), p)) return;
      ++crossings;
      auto val = [&](VarId v) { return v < env.size() && env[v] ? *env[v] : Rational(0); };
      const Dims& dims = info.dims(p);
      pt.clear();
      xs.clear();
      bool fast = true;
      for (VarId v : dims) {
        pt.push_back(val(v));
        const Rational& q = pt.back();
        fast = fast && q.get_den() == 1 && small(q.get_num());
        xs.push_back(fast ? q.get_num().get_si() : 0);
      }
      for (std::size_t i = 0; i < invs.size(); ++i) {
        bool in = false;
        for (const auto& c : compiled[i][p]) {
          in = fast && c.ok ? c.holds(xs) : c.value->dims() == dims ? c.value->contains_point(pt) : c.value->contains(val);
          if (in) break;
        }
        if (in) continue;
        FuzzResult& r = rs[i];
        if (r.violations++ == 0) {
          r.first = "trial " + std::to_string(k) + " at " + cfg.block_name(p) + ":";
          for (VarId v : dims) r.first += " " + cfg.vars[v].name + "=" + pagai::to_string(Rational(val(v)));
        }
      }
    };
    RunResult run = simulate(cfg, nondet, step_cap, hook);
    if (run.outcome == Outcome::StepLimit) ++truncated;
  }
  for (auto& r : rs) {
    r.crossings = crossings;
    r.truncated = truncated;
  }
  return rs;
}

FuzzResult soundness_fuzz(const Cfg& cfg, const CfgAnalysisInfo& info, const InvariantMap& inv, int trials,
                          unsigned seed, std::size_t step_cap) {
  return soundness_fuzz(cfg, info, std::vector<const InvariantMap*>{&inv}, trials, seed, step_cap).front();
}

}  // namespace pagai::harness
