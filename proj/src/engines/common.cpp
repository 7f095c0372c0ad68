#include "pagai/engines.hpp"

#include <algorithm>
#include <chrono>
#include <set>

namespace pagai {

std::string to_string(Technique t) {
  switch (t) {
    case Technique::S: return "s";
    case Technique::G: return "g";
    case Technique::PF: return "pf";
    case Technique::GPF: return "gpf";
    case Technique::DIS: return "dis";
  }
  return "?";
}

std::optional<Technique> parse_technique(const std::string& s) {
  for (Technique t : {Technique::S, Technique::G, Technique::PF, Technique::GPF, Technique::DIS})
    if (s == to_string(t)) return t;
  return std::nullopt;
}

std::string display_name(Technique t) {
  switch (t) {
    case Technique::S: return "S";
    case Technique::G: return "G";
    case Technique::PF: return "PF";
    case Technique::GPF: return "G+PF";
    case Technique::DIS: return "DIS";
  }
  return "?";
}

bool uses_solver(Technique t) { return t == Technique::PF || t == Technique::GPF || t == Technique::DIS; }

AbstractValue InvariantMap::collapsed(BlockId p, const Dims& dims) const {
  AbstractValue acc = AbstractValue::bottom(domain, dims);
  auto it = values.find(p);
  if (it == values.end()) return acc;
  for (const auto& v : it->second) acc = acc.join(v);
  return acc;
}

std::vector<Conjunction> InvariantMap::disjuncts(BlockId p) const {
  std::vector<Conjunction> out;
  auto it = values.find(p);
  if (it == values.end()) return out;
  for (const auto& v : it->second)
    if (!v.is_bottom()) out.push_back(v.to_constraints());
  return out;
}

bool InvariantMap::contains(BlockId p, const std::function<Rational(VarId)>& value) const {
  auto it = values.find(p);
  if (it == values.end()) return false;
  for (const auto& v : it->second)
    if (v.contains(value)) return true;
  return false;
}

std::vector<BlockId> reported_points(const Cfg& cfg, const CfgAnalysisInfo& info) {
  std::vector<BlockId> out = info.analysis_points;
  if (cfg.exit != kNoBlock && !info.is_pr(cfg.exit)) out.push_back(cfg.exit);
  std::sort(out.begin(), out.end());
  return out;
}

InvariantMap analyze(const Cfg& cfg, const CfgAnalysisInfo& info, Technique t, const EngineConfig& c,
                     smt::SolverSession* s) {
  auto t0 = std::chrono::steady_clock::now();
  if (uses_solver(t) && !s) throw std::invalid_argument(display_name(t) + " needs a solver session");
  InvariantMap m;
  switch (t) {
    case Technique::S: m = analyze_classic(cfg, info, c); break;
    case Technique::G: m = analyze_guided(cfg, info, c); break;
    case Technique::PF: m = analyze_path_focusing(cfg, info, c, *s); break;
    case Technique::GPF: m = analyze_combined(cfg, info, c, *s); break;
    case Technique::DIS: m = analyze_disjunctive(cfg, info, c, *s); break;
  }
  m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return m;
}

std::vector<AssertStatus> check_assertions(const Cfg& cfg, const CfgAnalysisInfo& info, const InvariantMap& inv,
                                           smt::SolverSession& s) {
  std::vector<int> lines = cfg.assert_lines;
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  std::vector<AssertStatus> out;
  if (lines.empty()) return out;
  smt::SectionFormula rho = smt::encode_section(cfg, info);
  std::map<BlockId, std::vector<Conjunction>> sources;
  for (BlockId p : rho.sources) sources[p] = inv.disjuncts(p);
  bool loaded = false;
  for (int line : lines) {
    AssertStatus st;
    st.line = line;
    std::string any;
    if (cfg.fail != kNoBlock)
      for (EdgeId e : cfg.blocks[cfg.fail].in)
        if (cfg.edges[e].line == line) any += " " + rho.edge_bool(e);
    if (any.empty()) {
      st.proved = true;  // no path reaches the failure branch
    } else {
      try {
        if (!loaded) smt::load(s, rho);
        loaded = true;
        st.proved = !smt::check_reach(s, rho, sources, cfg.fail, {"(or false" + any + ")"});
      } catch (const smt::SolverInconclusive& e) {
        st.reason = e.what();
        loaded = false;
      }
    }
    out.push_back(st);
  }
  return out;
}

std::optional<std::string> verify_inductive(const Cfg& cfg, const CfgAnalysisInfo& info, const InvariantMap& inv,
                                            smt::SolverSession& s) {
  smt::SectionFormula rho = smt::encode_section(cfg, info);
  smt::load(s, rho);
  smt::TargetMap targets;
  for (BlockId p : reported_points(cfg, info)) targets[p] = inv.disjuncts(p);
  for (BlockId p : rho.sources) {
    auto ds = inv.disjuncts(p);
    if (p == cfg.entry && ds.empty()) return "entry has an empty invariant";
    for (const auto& d : ds)
      if (auto g = smt::check_growth(s, rho, p, d, targets))
        return "path from " + cfg.block_name(p) + " to " + cfg.block_name(g->sink) + " leaves the invariant";
  }
  return std::nullopt;
}

NameFn source_names(const Cfg& cfg, const CfgAnalysisInfo& info, BlockId p) {
  std::map<VarId, std::string> names;
  if (p == cfg.exit)
    for (const auto& [n, v] : cfg.observed) names[v] = n;
  std::set<VarId> seen(info.lbl.lbl[p].begin(), info.lbl.lbl[p].end());
  seen.insert(info.dims(p).begin(), info.dims(p).end());
  std::map<std::string, int> uses;
  for (VarId v : seen)
    if (!names.count(v)) ++uses[cfg.vars[v].base];
  for (const auto& [v, n] : names) uses[n] += 100;  // an observed name wins its base
  std::set<std::string> taken;
  for (const auto& [v, n] : names) taken.insert(n);
  for (VarId v : seen) {
    if (names.count(v)) continue;
    const VarInfo& vi = cfg.vars[v];
    std::string n = vi.base;
    if (uses[n] > 1) n += "@" + std::to_string(vi.line);
    if (taken.count(n)) n = vi.name;  // two versions from one line
    if (taken.count(n)) n += "#" + std::to_string(v);
    taken.insert(n);
    names[v] = n;
  }
  return [names, &cfg](VarId v) {
    auto it = names.find(v);
    if (it != names.end()) return it->second;
    return v < cfg.vars.size() ? cfg.vars[v].name : default_name(v);
  };
}

std::string render_invariant(const Cfg& cfg, const CfgAnalysisInfo& info, const InvariantMap& inv, BlockId p,
                             const NameFn& name) {
  auto it = inv.values.find(p);
  if (it == inv.values.end() || it->second.empty()) return "false";
  std::string out;
  if (it->second.size() == 1) {
    out = it->second[0].str(name);
  } else {
    for (const auto& v : it->second) out += (out.empty() ? "(" : " or (") + v.str(name) + ")";
  }
  PathTransfer pt(cfg, info.lbl);
  std::string eqs;
  for (const auto& [v, e] : derived_equations(pt, p)) eqs += "; " + name(v) + " = " + e.str(name);
  if (!eqs.empty()) out = (out == "true" ? std::string() : out) + (out == "true" ? eqs.substr(2) : eqs);
  return out;
}

}  // namespace pagai
