#include "pagai/engines.hpp"

#include <set>

namespace pagai {

namespace {

// Kleene iteration over the whole graph (S) or over a growing subgraph (G).
class Classic {
 public:
  Classic(const Cfg& cfg, const CfgAnalysisInfo& info, const EngineConfig& c)
      : cfg_(cfg), info_(info), c_(c), pt_(cfg, info.lbl) {
    for (BlockId b = 0; b < cfg.num_blocks(); ++b) {
      check_dimension_guard(c.domain, info.dims(b).size());
      val_.push_back(AbstractValue::bottom(c.domain, info.dims(b)));
    }
    val_[cfg.entry] = AbstractValue::top(c.domain, info.dims(cfg.entry));
    pa_.resize(cfg.edges.size());
    enabled_.assign(cfg.edges.size(), 0);
    trivial_.assign(cfg.num_blocks(), 0);
    for (const auto& comp : info.scc_order) {
      if (comp.size() != 1) continue;
      BlockId b = comp[0];
      bool self = false;
      for (EdgeId e : cfg.blocks[b].out) self |= cfg.edges[e].dst == b;
      trivial_[b] = !self;
    }
    budget_ = c.budget_factor * std::max<std::size_t>(cfg.num_blocks(), 1);
  }

  void enable_all() { enabled_.assign(cfg_.edges.size(), 1); }

  void run_guided() {
    for (;;) {
      ascend();
      descend();
      std::vector<EdgeId> fresh;
      for (EdgeId e = 0; e < cfg_.edges.size(); ++e)
        if (!usable(e) && !image(e).is_bottom()) fresh.push_back(e);
      if (fresh.empty()) break;
      for (EdgeId e : fresh) enabled_[e] = 1;
      ++phases_;
    }
  }

  void ascend() {
    std::vector<int> visits(cfg_.num_blocks(), 0);
    for (const auto& comp : info_.scc_order) {
      std::set<BlockId> work(comp.begin(), comp.end());
      while (!work.empty()) {
        BlockId b = *work.begin();
        work.erase(work.begin());
        if (++iterations_ > budget_) throw BudgetExceeded("iteration budget exceeded");
        if (b == cfg_.entry) continue;
        AbstractValue next = val_[b].join(inflow(b));
        if (info_.is_pw(b) && ++visits[b] > c_.widening_delay) next = val_[b].widen(next);
        if (next.leq(val_[b])) continue;
        val_[b] = std::move(next);
        for (EdgeId e : cfg_.blocks[b].out) {
          BlockId d = cfg_.edges[e].dst;
          if (usable(e) && info_.scc_of[d] == info_.scc_of[b]) work.insert(d);
        }
      }
    }
  }

  void descend() {
    for (int pass = 0; pass < c_.narrowing_passes; ++pass)
      for (const auto& comp : info_.scc_order)
        for (BlockId b : comp) {
          if (b == cfg_.entry) continue;
          val_[b] = val_[b].meet(inflow(b));
        }
  }

  InvariantMap result(Technique t) const {
    InvariantMap m;
    m.function = cfg_.function;
    m.technique = t;
    m.domain = c_.domain;
    m.iterations = iterations_;
    for (BlockId p : reported_points(cfg_, info_)) {
      auto& l = m.values[p];
      if (!val_[p].is_bottom()) l.push_back(val_[p]);
    }
    if (phases_ > 0) m.events.push_back("phases: " + std::to_string(phases_ + 1));
    return m;
  }

 private:
  bool usable(EdgeId e) const { return enabled_[e] || trivial_[cfg_.edges[e].src]; }

  AbstractValue image(EdgeId e) {
    const Edge& ed = cfg_.edges[e];
    if (val_[ed.src].is_bottom()) return AbstractValue::bottom(c_.domain, info_.dims(ed.dst));
    if (!pa_[e]) pa_[e] = pt_.along(ed.src, {e});
    return val_[ed.src].transfer(*pa_[e]);
  }

  AbstractValue inflow(BlockId b) {
    AbstractValue acc = AbstractValue::bottom(c_.domain, info_.dims(b));
    for (EdgeId e : cfg_.blocks[b].in)
      if (usable(e)) acc = acc.join(image(e));
    return acc;
  }

  const Cfg& cfg_;
  const CfgAnalysisInfo& info_;
  const EngineConfig& c_;
  PathTransfer pt_;
  std::vector<AbstractValue> val_;
  std::vector<std::optional<ParallelAssign>> pa_;
  std::vector<char> enabled_, trivial_;
  std::size_t budget_ = 0, iterations_ = 0;
  int phases_ = 0;
};

}  // namespace

InvariantMap analyze_classic(const Cfg& cfg, const CfgAnalysisInfo& info, const EngineConfig& c) {
  Classic k(cfg, info, c);
  k.enable_all();
  k.ascend();
  k.descend();
  return k.result(Technique::S);
}

InvariantMap analyze_guided(const Cfg& cfg, const CfgAnalysisInfo& info, const EngineConfig& c) {
  Classic k(cfg, info, c);
  k.run_guided();
  return k.result(Technique::G);
}

}  // namespace pagai
