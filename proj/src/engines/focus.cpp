#include "pagai/engines.hpp"

#include <set>
#include <tuple>

namespace pagai {

namespace {

using smt::PathModel;
using smt::SolverSession;

struct Bound {
  std::optional<Rational> lo, hi;
};

// Interval of each dimension (in order of `dims`).
std::vector<Bound> bounds_of(const AbstractValue& a) {
  std::vector<Bound> out;
  for (VarId v : a.dims()) {
    Bound b;
    for (const auto& c : a.adapt_dims({v}).to_constraints()) {
      Rational k = c.expr.coeff(v);
      if (k == 0) continue;
      Rational x = -c.expr.constant() / k;
      if (c.rel == Rel::EQ || k > 0)
        if (!b.hi || x < *b.hi) b.hi = x;
      if (c.rel == Rel::EQ || k < 0)
        if (!b.lo || x > *b.lo) b.lo = x;
    }
    out.push_back(b);
  }
  return out;
}

// (sides that become unbounded, total finite growth)
std::pair<int, Rational> growth(const AbstractValue& d, const AbstractValue& img) {
  auto before = bounds_of(d), after = bounds_of(d.join(img));
  std::pair<int, Rational> m{0, Rational(0)};
  for (std::size_t k = 0; k < before.size(); ++k) {
    const Bound &b = before[k], &a = after[k];
    if (b.lo && !a.lo) ++m.first;
    else if (b.lo) m.second += *b.lo - *a.lo;
    if (b.hi && !a.hi) ++m.first;
    else if (b.hi) m.second += *a.hi - *b.hi;
  }
  return m;
}

struct Disjuncts {
  std::vector<AbstractValue> d;
};

using State = std::map<BlockId, Disjuncts>;

struct Record {
  BlockId src;
  std::size_t sd;
  std::vector<EdgeId> edges;
  BlockId dst;
  std::size_t dd;
  auto key() const { return std::tie(src, sd, edges, dst, dd); }
  bool operator<(const Record& o) const { return key() < o.key(); }
};

class Focus {
 public:
  Focus(const Cfg& cfg, const CfgAnalysisInfo& info, const EngineConfig& c, SolverSession& s, int max_dis)
      : cfg_(cfg), info_(info), c_(c), s_(s), pt_(cfg, info.lbl), max_dis_(std::max(1, max_dis)) {
    for (BlockId p : reported_points(cfg, info)) {
      check_dimension_guard(c.domain, info.dims(p).size());
      X_[p];
    }
    X_[cfg.entry].d.push_back(AbstractValue::top(c.domain, info.dims(cfg.entry)));
    rho_ = smt::encode_section(cfg, info);
    smt::load(s, rho_);
    enabled_.assign(cfg.edges.size(), 1);
    budget_ = c.budget_factor * std::max<std::size_t>(cfg.num_blocks(), 1);
    q0_ = s.queries();
  }

  void run() {
    ascend();
    descend();
  }

  void run_combined() {
    enabled_.assign(cfg_.edges.size(), 0);
    for (;;) {
      ascend();
      descend();
      auto g = any_growth(X_, {});
      if (!g) break;
      for (EdgeId e : g->second.edges) enabled_[e] = 1;
      ++phases_;
    }
  }

  InvariantMap result(Technique t) const {
    InvariantMap m;
    m.function = cfg_.function;
    m.technique = t;
    m.domain = c_.domain;
    m.iterations = iterations_;
    m.queries = s_.queries() - q0_;
    for (const auto& [p, l] : X_) {
      auto& out = m.values[p];
      for (const auto& v : l.d)
        if (!v.is_bottom()) out.push_back(v);
    }
    if (phases_ > 0) m.events.push_back("phases: " + std::to_string(phases_ + 1));
    return m;
  }

 private:
  bool is_source(BlockId p) const { return info_.is_pr(p); }

  std::vector<std::string> restriction() const {
    std::vector<std::string> out;
    for (EdgeId e = 0; e < cfg_.edges.size(); ++e)
      if (!enabled_[e]) out.push_back("(not " + rho_.edge_bool(e) + ")");
    return out;
  }

  static smt::TargetMap targets(const State& X) {
    smt::TargetMap t;
    for (const auto& [p, l] : X) {
      auto& v = t[p];
      for (const auto& d : l.d)
        if (!d.is_bottom()) v.push_back(d.to_constraints());
    }
    return t;
  }

  const ParallelAssign& pa(BlockId src, const std::vector<EdgeId>& path) {
    auto key = std::make_pair(src, path);
    auto it = pa_.find(key);
    if (it == pa_.end()) it = pa_.emplace(key, pt_.along(src, path)).first;
    return it->second;
  }

  // First path from any source disjunct of X leaving the targets of X.
  std::optional<std::pair<std::pair<BlockId, std::size_t>, PathModel>> any_growth(
      const State& X, const std::vector<std::string>& extra) {
    auto t = targets(X);
    for (const auto& [p, l] : X) {
      if (!is_source(p)) continue;
      for (std::size_t i = 0; i < l.d.size(); ++i) {
        if (l.d[i].is_bottom()) continue;
        if (auto g = smt::check_growth(s_, rho_, p, l.d[i].to_constraints(), t, extra))
          return std::make_pair(std::make_pair(p, i), std::move(*g));
      }
    }
    return std::nullopt;
  }

  std::size_t route(BlockId t, const AbstractValue& img) const {
    const auto& L = X_.at(t).d;
    if (L.empty()) return 0;
    for (std::size_t k = 0; k < L.size(); ++k)
      if (img.leq(L[k])) return k;
    if (max_dis_ == 1) return 0;
    std::size_t best = 0;
    std::pair<int, Rational> bm;
    for (std::size_t k = 0; k < L.size(); ++k) {
      auto m = growth(L[k], img);
      if (k == 0 || m < bm) {
        best = k;
        bm = m;
      }
    }
    if (bm.first == 0 && bm.second == 0) return best;
    if (L.size() < static_cast<std::size_t>(max_dis_)) return L.size();
    return best;
  }

  // The delay is counted per (target disjunct, path): a path that keeps
  // pushing the same disjunct gets widened; there are finitely many paths.
  bool apply(BlockId t, std::size_t j, const AbstractValue& img, BlockId p, const std::vector<EdgeId>& path) {
    auto& P = X_[t];
    if (j == P.d.size()) {
      P.d.push_back(img);
      return true;
    }
    AbstractValue joined = P.d[j].join(img);
    if (info_.is_pw(t) && ++pushes_[{t, j, p, path}] > c_.widening_delay) joined = P.d[j].widen(joined);
    if (joined.leq(P.d[j])) return false;
    P.d[j] = std::move(joined);
    return true;
  }

  void ascend() {
    using Item = std::tuple<int, BlockId, std::size_t>;
    std::set<Item> work;
    for (const auto& [p, l] : X_)
      if (is_source(p))
        for (std::size_t i = 0; i < l.d.size(); ++i) work.insert({info_.scc_of[p], p, i});
    auto extra = restriction();
    while (!work.empty()) {
      auto [scc, p, i] = *work.begin();
      work.erase(work.begin());
      for (;;) {
        if (++iterations_ > budget_) throw BudgetExceeded("iteration budget exceeded");
        const AbstractValue src = X_[p].d[i];
        if (src.is_bottom()) break;
        auto g = smt::check_growth(s_, rho_, p, src.to_constraints(), targets(X_), extra);
        if (!g) break;
        BlockId t = g->sink;
        AbstractValue img = src.transfer(pa(p, g->edges));
        if (img.is_bottom()) throw std::logic_error("focus: feasible path with an empty image");
        std::size_t j = route(t, img);
        if (!apply(t, j, img, p, g->edges)) throw std::logic_error("focus: growth query made no progress");
        records_.insert({p, i, g->edges, t, j});
        if (is_source(t)) work.insert({info_.scc_of[t], t, j});
      }
    }
  }

  // Decreasing passes recomputed from the recorded paths; a pass is kept only
  // when the result is still a post-fixpoint.
  void descend() {
    auto extra = restriction();
    for (int pass = 0; pass < c_.narrowing_passes; ++pass) {
      State Y = X_;
      for (auto& [t, l] : Y) {
        if (t == cfg_.entry) continue;
        for (std::size_t j = 0; j < l.d.size(); ++j) {
          AbstractValue acc = AbstractValue::bottom(c_.domain, info_.dims(t));
          for (const auto& r : records_) {
            if (r.dst != t || r.dd != j) continue;
            const AbstractValue& s = X_.at(r.src).d[r.sd];
            if (!s.is_bottom()) acc = acc.join(s.transfer(pa(r.src, r.edges)));
          }
          l.d[j] = l.d[j].meet(acc);
        }
      }
      auto g = any_growth(Y, extra);
      if (!g) {
        X_ = std::move(Y);
        continue;
      }
      // the missed path goes into the records if X already covers it
      auto [p, i] = g->first;
      BlockId t = g->second.sink;
      AbstractValue img = X_.at(p).d[i].transfer(pa(p, g->second.edges));
      bool kept = false;
      const auto& L = X_.at(t).d;
      for (std::size_t k = 0; k < L.size() && !kept; ++k)
        if (img.leq(L[k])) {
          kept = records_.insert({p, i, g->second.edges, t, k}).second;
        }
      if (!kept) break;
    }
  }

  const Cfg& cfg_;
  const CfgAnalysisInfo& info_;
  const EngineConfig& c_;
  SolverSession& s_;
  PathTransfer pt_;
  int max_dis_;
  State X_;
  smt::SectionFormula rho_;
  std::vector<char> enabled_;
  std::map<std::pair<BlockId, std::vector<EdgeId>>, ParallelAssign> pa_;
  std::set<Record> records_;
  std::map<std::tuple<BlockId, std::size_t, BlockId, std::vector<EdgeId>>, int> pushes_;
  std::size_t budget_ = 0, iterations_ = 0, q0_ = 0;
  int phases_ = 0;
};

template <class F>
InvariantMap with_fallback(const Cfg& cfg, const CfgAnalysisInfo& info, const EngineConfig& c, Technique t, F run) {
  try {
    return run();
  } catch (const smt::SolverInconclusive& e) {
    InvariantMap m = analyze_classic(cfg, info, c);
    m.technique = t;
    m.downgraded = true;
    m.events.push_back(std::string("solver inconclusive, fell back to S: ") + e.what());
    return m;
  }
}

}  // namespace

InvariantMap analyze_path_focusing(const Cfg& cfg, const CfgAnalysisInfo& info, const EngineConfig& c,
                                   SolverSession& s) {
  return with_fallback(cfg, info, c, Technique::PF, [&] {
    Focus f(cfg, info, c, s, 1);
    f.run();
    return f.result(Technique::PF);
  });
}

InvariantMap analyze_combined(const Cfg& cfg, const CfgAnalysisInfo& info, const EngineConfig& c,
                              SolverSession& s) {
  return with_fallback(cfg, info, c, Technique::GPF, [&] {
    Focus f(cfg, info, c, s, 1);
    f.run_combined();
    return f.result(Technique::GPF);
  });
}

InvariantMap analyze_disjunctive(const Cfg& cfg, const CfgAnalysisInfo& info, const EngineConfig& c,
                                 SolverSession& s) {
  return with_fallback(cfg, info, c, Technique::DIS, [&] {
    Focus f(cfg, info, c, s, c.max_disjuncts);
    f.run();
    return f.result(Technique::DIS);
  });
}

}  // namespace pagai
