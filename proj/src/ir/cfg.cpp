#include "pagai/cfg.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace pagai {

Rhs Rhs::linear(LinearExpr e) {
  Rhs r;
  r.kind = Linear;
  r.a = std::move(e);
  return r;
}

Rhs Rhs::havoc(bool integer) {
  Rhs r;
  r.kind = Havoc;
  r.integer = integer;
  return r;
}

Rhs Rhs::undef() {
  Rhs r;
  r.kind = Undef;
  return r;
}

Rhs Rhs::mul(LinearExpr a, LinearExpr b) {
  Rhs r;
  r.kind = Mul;
  r.a = std::move(a);
  r.b = std::move(b);
  return r;
}

Rhs Rhs::div(LinearExpr a, LinearExpr b, bool integer) {
  Rhs r;
  r.kind = Div;
  r.a = std::move(a);
  r.b = std::move(b);
  r.integer = integer;
  return r;
}

std::vector<VarId> Rhs::uses() const {
  std::vector<VarId> out;
  if (kind == Havoc || kind == Undef) return out;
  for (const auto& [v, c] : a.terms()) out.push_back(v);
  if (kind == Mul || kind == Div)
    for (const auto& [v, c] : b.terms()) out.push_back(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void Rhs::substitute(const std::function<LinearExpr(VarId)>& f) {
  if (kind == Havoc || kind == Undef) return;
  a = a.substitute(f);
  if (kind != Linear) b = b.substitute(f);
}

std::string Rhs::str(const NameFn& name) const {
  switch (kind) {
    case Linear: return a.str(name);
    case Havoc: return integer ? "havoc int" : "havoc real";
    case Undef: return "undef";
    case Mul: return "(" + a.str(name) + ") * (" + b.str(name) + ")";
    case Div: return "(" + a.str(name) + ") " + (integer ? "div" : "/") + " (" + b.str(name) + ")";
  }
  return "?";
}

const LinearExpr* Phi::arg_for(EdgeId e) const {
  for (const auto& [edge, val] : args)
    if (edge == e) return &val;
  return nullptr;
}

BlockId Cfg::add_block(int line) {
  blocks.emplace_back();
  blocks.back().line = line;
  return static_cast<BlockId>(blocks.size() - 1);
}

EdgeId Cfg::add_edge(BlockId src, BlockId dst, std::optional<Constraint> guard) {
  EdgeId e = static_cast<EdgeId>(edges.size());
  edges.push_back({src, dst, std::move(guard), 0});
  blocks[src].out.push_back(e);
  blocks[dst].in.push_back(e);
  return e;
}

VarId Cfg::add_var(std::string name, std::string base, bool integer, int line) {
  vars.push_back({std::move(name), std::move(base), integer, line});
  return static_cast<VarId>(vars.size() - 1);
}

void Cfg::redirect(EdgeId e, BlockId new_dst) {
  auto& old_in = blocks[edges[e].dst].in;
  old_in.erase(std::remove(old_in.begin(), old_in.end(), e), old_in.end());
  edges[e].dst = new_dst;
  blocks[new_dst].in.push_back(e);
}

std::vector<BlockId> Cfg::successors(BlockId b) const {
  std::vector<BlockId> out;
  for (EdgeId e : blocks[b].out)
    if (std::find(out.begin(), out.end(), edges[e].dst) == out.end()) out.push_back(edges[e].dst);
  return out;
}

std::vector<BlockId> Cfg::predecessors(BlockId b) const {
  std::vector<BlockId> out;
  for (EdgeId e : blocks[b].in)
    if (std::find(out.begin(), out.end(), edges[e].src) == out.end()) out.push_back(edges[e].src);
  return out;
}

NameFn Cfg::namer() const {
  return [this](VarId v) { return v < vars.size() ? vars[v].name : default_name(v); };
}

std::string Cfg::block_name(BlockId b) const {
  if (b == entry) return "entry";
  if (b == exit) return "exit";
  if (b == fail) return "fail";
  if (b == assume_exit) return "assume_exit";
  return "bb" + std::to_string(b);
}

void Cfg::prune() {
  std::vector<bool> reach(blocks.size(), false);
  std::deque<BlockId> work{entry};
  reach[entry] = true;
  while (!work.empty()) {
    BlockId b = work.front();
    work.pop_front();
    for (EdgeId e : blocks[b].out)
      if (!reach[edges[e].dst]) {
        reach[edges[e].dst] = true;
        work.push_back(edges[e].dst);
      }
  }
  std::vector<BlockId> order{entry};
  for (BlockId b = 0; b < blocks.size(); ++b)
    if (reach[b] && b != entry && !is_special(b)) order.push_back(b);
  for (BlockId s : {exit, fail, assume_exit})
    if (s != kNoBlock) order.push_back(s);

  std::vector<BlockId> nid(blocks.size(), kNoBlock);
  for (std::size_t k = 0; k < order.size(); ++k) nid[order[k]] = static_cast<BlockId>(k);
  std::vector<EdgeId> eid(edges.size(), ~EdgeId{0});
  std::vector<Edge> new_edges;
  for (EdgeId e = 0; e < edges.size(); ++e) {
    const Edge& ed = edges[e];
    if (!reach[ed.src] || nid[ed.dst] == kNoBlock) continue;
    eid[e] = static_cast<EdgeId>(new_edges.size());
    new_edges.push_back({nid[ed.src], nid[ed.dst], ed.guard, ed.line});
  }
  std::vector<Block> new_blocks(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    Block& nb = new_blocks[k];
    Block& ob = blocks[order[k]];
    nb.defs = std::move(ob.defs);
    nb.line = ob.line;
    for (auto& phi : ob.phis) {
      Phi np{phi.var, {}};
      for (auto& [e, v] : phi.args)
        if (eid[e] != ~EdgeId{0}) np.args.emplace_back(eid[e], std::move(v));
      nb.phis.push_back(std::move(np));
    }
  }
  for (EdgeId e = 0; e < new_edges.size(); ++e) {
    new_blocks[new_edges[e].src].out.push_back(e);
    new_blocks[new_edges[e].dst].in.push_back(e);
  }
  auto map_b = [&](BlockId b) { return b == kNoBlock ? kNoBlock : nid[b]; };
  entry = map_b(entry);
  exit = map_b(exit);
  fail = map_b(fail);
  assume_exit = map_b(assume_exit);
  blocks = std::move(new_blocks);
  edges = std::move(new_edges);
}

std::vector<std::string> Cfg::check() const {
  std::vector<std::string> errs;
  auto err = [&](const std::string& s) { errs.push_back(function + ": " + s); };
  if (entry >= blocks.size()) {
    err("no entry block");
    return errs;
  }
  if (!blocks[entry].in.empty()) err("entry has predecessors");
  for (BlockId s : {fail, assume_exit})
    if (s != kNoBlock && !blocks[s].out.empty()) err(block_name(s) + " has successors");
  std::vector<bool> reach(blocks.size(), false);
  std::deque<BlockId> work{entry};
  reach[entry] = true;
  while (!work.empty()) {
    BlockId b = work.front();
    work.pop_front();
    for (BlockId s : successors(b))
      if (!reach[s]) {
        reach[s] = true;
        work.push_back(s);
      }
  }
  for (BlockId b = 0; b < blocks.size(); ++b) {
    if (!reach[b] && !is_special(b)) err(block_name(b) + " unreachable");
    const Block& bl = blocks[b];
    if (bl.out.size() > 1)
      for (EdgeId e : bl.out)
        if (!edges[e].guard) err(block_name(b) + " branches without a guard");
    if (!bl.phis.empty() && bl.in.size() < 2) err(block_name(b) + " has phis but fewer than 2 incoming edges");
    for (const auto& phi : bl.phis) {
      if (phi.args.size() != bl.in.size()) err(block_name(b) + " phi arity mismatch for " + namer()(phi.var));
      for (const auto& [e, v] : phi.args)
        if (e >= edges.size() || edges[e].dst != b) err(block_name(b) + " phi argument on a foreign edge");
    }
    for (EdgeId e : bl.out)
      if (edges[e].src != b) err("edge list corrupted at " + block_name(b));
  }
  if (ssa) {
    std::vector<int> defs(vars.size(), 0);
    for (const auto& bl : blocks) {
      for (const auto& p : bl.phis) ++defs[p.var];
      for (const auto& d : bl.defs) ++defs[d.var];
    }
    for (VarId v = 0; v < vars.size(); ++v)
      if (defs[v] > 1) err("variable " + vars[v].name + " defined " + std::to_string(defs[v]) + " times");
  }
  return errs;
}

std::string Cfg::dump(const std::function<std::string(BlockId)>& annotate) const {
  std::ostringstream os;
  NameFn name = namer();
  os << "function " << function << (ssa ? " ssa" : "") << "\n";
  for (BlockId b = 0; b < blocks.size(); ++b) {
    const Block& bl = blocks[b];
    os << "block " << block_name(b);
    if (block_name(b) != "bb" + std::to_string(b)) os << " (bb" << b << ")";
    if (bl.line) os << " line " << bl.line;
    if (annotate) os << annotate(b);
    os << "\n";
    for (const auto& phi : bl.phis) {
      os << "  " << name(phi.var) << " = phi(";
      for (std::size_t k = 0; k < phi.args.size(); ++k) {
        if (k) os << ", ";
        os << block_name(edges[phi.args[k].first].src) << "/e" << phi.args[k].first << ": "
           << phi.args[k].second.str(name);
      }
      os << ")\n";
    }
    for (const auto& d : bl.defs) os << "  " << name(d.var) << " = " << d.rhs.str(name) << "\n";
    for (EdgeId e : bl.out) {
      os << "  -> " << block_name(edges[e].dst) << " e" << e;
      if (edges[e].guard) os << " if " << edges[e].guard->str(name);
      os << "\n";
    }
  }
  if (!observed.empty()) {
    os << "observe";
    for (const auto& [n, v] : observed) os << " " << n << "=" << name(v);
    os << "\n";
  }
  return os.str();
}

}  // namespace pagai
