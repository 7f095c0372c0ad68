#include "pagai/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <sstream>

namespace pagai::harness {

namespace {

using json = nlohmann::ordered_json;

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string fixed2(double x) { return fmt::format("{:.2f}", x); }

json point_json(const Benchmark::Function& f, const InvariantMap& inv, BlockId p) {
  json j;
  j["point"] = f.cfg.block_name(p);
  j["line"] = f.cfg.blocks[p].line;
  NameFn name = source_names(f.cfg, f.info, p);
  json ds = json::array();
  auto it = inv.values.find(p);
  if (it != inv.values.end())
    for (const auto& v : it->second) {
      json cs = json::array();
      for (const auto& c : v.to_constraints()) cs.push_back(c.str(name));
      ds.push_back(cs);
    }
  j["disjuncts"] = ds;
  json eqs = json::array();
  if (!ds.empty()) {
    PathTransfer pt(f.cfg, f.info.lbl);
    for (const auto& [v, e] : derived_equations(pt, p)) eqs.push_back(name(v) + " = " + e.str(name));
  }
  j["derived"] = eqs;
  return j;
}

json report_json(const ComparisonReport& r, bool with_timing) {
  json j;
  j["points"] = r.points;
  j["left_stronger"] = r.left_stronger;
  j["right_stronger"] = r.right_stronger;
  j["equal"] = r.equal;
  j["uncomparable"] = r.uncomparable;
  j["inconclusive"] = r.inconclusive;
  j["pct_left_stronger"] = fixed2(r.pct_left);
  j["pct_right_stronger"] = fixed2(r.pct_right);
  j["pct_equal"] = fixed2(r.pct_equal);
  j["pct_uncomparable"] = fixed2(r.pct_uncomparable);
  j["degenerate"] = r.degenerate;
  if (with_timing) {
    j["left_seconds"] = r.left_seconds;
    j["right_seconds"] = r.right_seconds;
  }
  return j;
}

json pair_json(const PairTable& t, bool with_timing, const char* fixed_key) {
  json j;
  j["left"] = t.left;
  j["right"] = t.right;
  j[fixed_key] = t.fixed;
  json rows = json::array();
  for (const auto& [name, r] : t.rows) {
    json row = report_json(r, with_timing);
    row["benchmark"] = name;
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["total"] = report_json(t.total, with_timing);
  return j;
}

std::size_t proved(const Cell& c) {
  std::size_t n = 0;
  for (const auto& f : c.functions)
    for (const auto& a : f.asserts) n += a.proved;
  return n;
}

std::size_t asserts(const Cell& c) {
  std::size_t n = 0;
  for (const auto& f : c.functions) n += f.asserts.size();
  return n;
}

}  // namespace

json to_json(const MatrixReport& r, bool with_timing) {
  const MatrixConfig& c = r.config;
  json j;
  j["tool"] = "pagai";
  j["version"] = PAGAI_VERSION;
  json cfg;
  json ts = json::array(), ds = json::array();
  for (Technique t : c.techniques) ts.push_back(to_string(t));
  for (DomainKind d : c.domains) ds.push_back(to_string(d));
  cfg["techniques"] = ts;
  cfg["domains"] = ds;
  cfg["widening_delay"] = c.engine.widening_delay;
  cfg["narrowing_passes"] = c.engine.narrowing_passes;
  cfg["max_disjuncts"] = c.engine.max_disjuncts;
  cfg["inline_depth"] = c.frontend.inline_depth;
  cfg["unroll"] = c.frontend.unroll;
  cfg["solver"] = c.solver.command.empty() ? smt::default_solver_command() : c.solver.command;
  cfg["solver_timeout_ms"] = c.solver.timeout_ms;
  cfg["seed"] = c.seed;
  j["config"] = cfg;

  json bs = json::array();
  for (const auto& b : r.benchmarks) {
    json x;
    x["name"] = b.name;
    x["loc"] = b.loc;
    x["pr_points"] = b.pr_points();
    json fs = json::array();
    for (const auto& f : b.functions) fs.push_back(f.name);
    x["functions"] = fs;
    bs.push_back(x);
  }
  j["benchmarks"] = bs;

  json cells = json::array();
  for (const auto& cell : r.cells) {
    const Benchmark& b = r.benchmarks[cell.benchmark];
    json x;
    x["benchmark"] = b.name;
    x["technique"] = to_string(cell.technique);
    x["domain"] = to_string(cell.domain);
    x["quarantined"] = cell.quarantined;
    if (!cell.error.empty()) x["error"] = cell.error;
    if (with_timing) x["seconds"] = cell.seconds;
    json downgraded = json::array();
    json fs = json::array();
    for (std::size_t k = 0; k < cell.functions.size(); ++k) {
      const auto& fr = cell.functions[k];
      const auto& f = b.functions[k];
      json fj;
      fj["name"] = fr.name;
      if (!fr.error.empty()) {
        fj["error"] = fr.error;
        fs.push_back(fj);
        continue;
      }
      if (fr.inv.downgraded) downgraded.push_back(fr.name);
      fj["downgraded"] = fr.inv.downgraded;
      fj["nonlinear"] = f.cfg.nonlinear;
      fj["events"] = fr.inv.events;
      fj["iterations"] = fr.inv.iterations;
      fj["queries"] = fr.inv.queries;
      if (with_timing) fj["seconds"] = fr.inv.seconds;
      json inv = json::array();
      for (BlockId p : reported_points(f.cfg, f.info)) inv.push_back(point_json(f, fr.inv, p));
      fj["invariants"] = inv;
      json as = json::array();
      for (const auto& a : fr.asserts) {
        json aj;
        aj["line"] = a.line;
        aj["proved"] = a.proved;
        if (!a.reason.empty()) aj["reason"] = a.reason;
        as.push_back(aj);
      }
      fj["asserts"] = as;
      fs.push_back(fj);
    }
    x["downgraded_functions"] = downgraded;
    x["functions"] = fs;
    cells.push_back(x);
  }
  j["cells"] = cells;

  json tp = json::array(), dp = json::array();
  for (const auto& t : r.technique_pairs) tp.push_back(pair_json(t, with_timing, "domain"));
  for (const auto& t : r.domain_pairs) dp.push_back(pair_json(t, with_timing, "technique"));
  j["technique_pairs"] = tp;
  j["domain_pairs"] = dp;

  if (with_timing) {
    json timing = json::array();
    for (DomainKind d : c.domains) {
      json t;
      t["domain"] = to_string(d);
      json rows = json::array();
      for (std::size_t b = 0; b < r.benchmarks.size(); ++b) {
        json row;
        row["benchmark"] = r.benchmarks[b].name;
        for (Technique tq : c.techniques) row[display_name(tq)] = r.find(b, tq, d)->seconds;
        rows.push_back(row);
      }
      t["rows"] = rows;
      timing.push_back(t);
    }
    j["timing"] = timing;
  }
  return j;
}

std::string to_text(const MatrixReport& r) {
  const MatrixConfig& c = r.config;
  std::ostringstream os;
  std::size_t w = 9;
  for (const auto& b : r.benchmarks) w = std::max(w, b.name.size());

  os << "Benchmarks\n";
  os << fmt::format("  {:<{}} {:>6} {:>6}\n", "name", w, "LOC", "|P_R|");
  for (const auto& b : r.benchmarks) os << fmt::format("  {:<{}} {:>6} {:>6}\n", b.name, w, b.loc, b.pr_points());

  auto pairs = [&](const std::vector<PairTable>& ts, const std::string& title) {
    if (ts.empty()) return;
    os << "\n" << title << "\n";
    os << fmt::format("  {:<12} {:<{}} {:>8} {:>8} {:>8} {:>8} {:>7}\n", "pair", "benchmark", w, "⊊", "⊋", "=",
                      "unc.", "points");
    for (const auto& t : ts) {
      std::string label = t.left + "/" + t.right;
      auto line = [&](const std::string& name, const ComparisonReport& x) {
        os << fmt::format("  {:<12} {:<{}} {:>8} {:>8} {:>8} {:>8} {:>7}{}\n", label, name, w, fixed2(x.pct_left),
                          fixed2(x.pct_right), fixed2(x.pct_equal), fixed2(x.pct_uncomparable), x.points,
                          x.degenerate ? "  (degenerate)" : "");
      };
      for (const auto& [name, x] : t.rows) line(name, x);
      line("total", t.total);
    }
  };
  for (DomainKind d : c.domains) {
    std::vector<PairTable> ts;
    for (const auto& t : r.technique_pairs)
      if (t.fixed == to_string(d)) ts.push_back(t);
    pairs(ts, "Techniques compared, domain " + upper(to_string(d)) + " (% of points)");
  }
  {
    std::vector<PairTable> ts = r.domain_pairs;
    for (auto& t : ts) {
      t.left = upper(t.left);
      t.right = upper(t.right);
    }
    pairs(ts, "Domains compared, technique G+PF (% of points)");
  }

  for (DomainKind d : c.domains) {
    os << "\nTime in seconds, domain " << upper(to_string(d)) << "\n";
    os << fmt::format("  {:<{}}", "benchmark", w);
    for (Technique t : c.techniques) os << fmt::format(" {:>9}", display_name(t));
    os << "\n";
    std::vector<double> sum(c.techniques.size(), 0);
    for (std::size_t b = 0; b < r.benchmarks.size(); ++b) {
      os << fmt::format("  {:<{}}", r.benchmarks[b].name, w);
      for (std::size_t k = 0; k < c.techniques.size(); ++k) {
        const Cell* cell = r.find(b, c.techniques[k], d);
        sum[k] += cell->seconds;
        os << fmt::format(" {:>9.3f}", cell->seconds);
      }
      os << "\n";
    }
    os << fmt::format("  {:<{}}", "total", w);
    for (double s : sum) os << fmt::format(" {:>9.3f}", s);
    os << "\n";
  }

  os << "\nAsserts proved\n";
  os << fmt::format("  {:<{}} {:<6}", "benchmark", w, "domain");
  for (Technique t : c.techniques) os << fmt::format(" {:>7}", display_name(t));
  os << "\n";
  for (std::size_t b = 0; b < r.benchmarks.size(); ++b)
    for (DomainKind d : c.domains) {
      os << fmt::format("  {:<{}} {:<6}", r.benchmarks[b].name, w, upper(to_string(d)));
      for (Technique t : c.techniques) {
        const Cell* cell = r.find(b, t, d);
        os << fmt::format(" {:>7}", cell->quarantined ? std::string("-")
                                                      : fmt::format("{}/{}", proved(*cell), asserts(*cell)));
      }
      os << "\n";
    }

  bool any = false;
  for (const auto& cell : r.cells) {
    std::vector<std::string> down;
    for (const auto& f : cell.functions)
      if (f.inv.downgraded) down.push_back(f.name);
    if (!cell.quarantined && down.empty()) continue;
    if (!any) os << "\nEvents\n";
    any = true;
    std::string where = r.benchmarks[cell.benchmark].name + " " + display_name(cell.technique) + "/" +
                        upper(to_string(cell.domain));
    if (cell.quarantined) os << "  " << where << ": quarantined: " << cell.error << "\n";
    for (const auto& f : down) os << "  " << where << ": " << f << " downgraded to S\n";
  }
  return os.str();
}

std::string to_csv(const MatrixReport& r) {
  std::ostringstream os;
  os << "table,fixed,left,right,benchmark,points,pct_left_stronger,pct_right_stronger,pct_equal,pct_uncomparable\n";
  auto rows = [&](const std::vector<PairTable>& ts, const char* kind) {
    for (const auto& t : ts) {
      auto line = [&](const std::string& name, const ComparisonReport& x) {
        os << kind << "," << t.fixed << "," << t.left << "," << t.right << "," << name << "," << x.points << ","
           << fixed2(x.pct_left) << "," << fixed2(x.pct_right) << "," << fixed2(x.pct_equal) << ","
           << fixed2(x.pct_uncomparable) << "\n";
      };
      for (const auto& [name, x] : t.rows) line(name, x);
      line("total", t.total);
    }
  };
  rows(r.technique_pairs, "techniques");
  rows(r.domain_pairs, "domains");
  os << "\ntable,domain,benchmark";
  for (Technique t : r.config.techniques) os << "," << display_name(t);
  os << "\n";
  for (DomainKind d : r.config.domains)
    for (std::size_t b = 0; b < r.benchmarks.size(); ++b) {
      os << "timing," << to_string(d) << "," << r.benchmarks[b].name;
      for (Technique t : r.config.techniques) os << "," << fmt::format("{:.3f}", r.find(b, t, d)->seconds);
      os << "\n";
    }
  return os.str();
}

}  // namespace pagai::harness
