#include "pagai/domains/polyhedron.hpp"
#include "pagai/harness.hpp"

#include <atomic>
#include <chrono>
#include <memory>
#include <sstream>
#include <thread>

namespace pagai::harness {

std::size_t Benchmark::pr_points() const {
  std::size_t n = 0;
  for (const auto& f : functions) n += f.info.analysis_points.size();
  return n;
}

Benchmark load_benchmark(const std::string& name, const std::string& source, const FrontendOptions& fo) {
  Benchmark b;
  b.name = name;
  b.source = source;
  std::istringstream is(source);
  for (std::string line; std::getline(is, line);) {
    auto k = line.find_first_not_of(" \t\r");
    if (k != std::string::npos && line.compare(k, 2, "//") != 0) ++b.loc;
  }
  Program p = parse(source);
  for (const auto& f : p.functions) {
    Benchmark::Function fn{f.name, build_ssa_cfg(p, f.name, fo), {}};
    fn.info = analyze_cfg(fn.cfg);
    b.functions.push_back(std::move(fn));
  }
  return b;
}

const Cell* MatrixReport::find(std::size_t b, Technique t, DomainKind d) const {
  for (const auto& c : cells)
    if (c.benchmark == b && c.technique == t && c.domain == d) return &c;
  return nullptr;
}

std::vector<std::pair<Technique, Technique>> technique_pairs() {
  using T = Technique;
  return {{T::G, T::S}, {T::PF, T::S}, {T::PF, T::G}, {T::GPF, T::PF}, {T::GPF, T::G}, {T::DIS, T::GPF}};
}

std::vector<std::pair<DomainKind, DomainKind>> domain_pairs() {
  using D = DomainKind;
  return {{D::Polyhedron, D::Octagon}, {D::Polyhedron, D::Box}, {D::Octagon, D::Box}};
}

namespace {

void run_cell(const Benchmark& b, Cell& cell, const MatrixConfig& c, std::unique_ptr<smt::SolverSession>& s) {
  EngineConfig ec = c.engine;
  ec.domain = cell.domain;
  auto t0 = std::chrono::steady_clock::now();
  for (const auto& f : b.functions) {
    FunctionResult fr;
    fr.name = f.name;
    try {
      if (!s) s = std::make_unique<smt::SolverSession>(c.solver);
      fr.inv = analyze(f.cfg, f.info, cell.technique, ec, s.get());
      fr.asserts = check_assertions(f.cfg, f.info, fr.inv, *s);
    } catch (const smt::SolverError& e) {
      fr.error = std::string("solver: ") + e.what();
      s.reset();  // a fresh process for the next cell
    } catch (const DimensionLimit& e) {
      fr.error = std::string("dimension limit: ") + e.what();
    } catch (const BudgetExceeded& e) {
      fr.error = std::string("budget: ") + e.what();
    } catch (const std::exception& e) {
      fr.error = std::string("error: ") + e.what();
    }
    if (!fr.error.empty()) {
      cell.quarantined = true;
      if (cell.error.empty()) cell.error = f.name + ": " + fr.error;
    }
    cell.functions.push_back(std::move(fr));
  }
  cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ComparisonReport compare_cells(smt::SolverSession& s, const Benchmark& b, const Cell& l, const Cell& r) {
  std::vector<PointVerdict> vs;
  for (std::size_t k = 0; k < b.functions.size(); ++k) {
    const auto& f = b.functions[k];
    for (BlockId p : compared_points(f.cfg, f.info))
      vs.push_back(compare_point(s, f.cfg, l.functions[k].inv.disjuncts(p), r.functions[k].inv.disjuncts(p)));
  }
  return aggregate_report(vs, l.seconds, r.seconds);
}

bool has(const std::vector<Technique>& v, Technique t) { return std::find(v.begin(), v.end(), t) != v.end(); }
bool has(const std::vector<DomainKind>& v, DomainKind d) { return std::find(v.begin(), v.end(), d) != v.end(); }

}  // namespace

MatrixReport run_matrix(std::vector<Benchmark> corpus, const MatrixConfig& c) {
  MatrixReport rep;
  rep.config = c;
  rep.benchmarks = std::move(corpus);
  for (std::size_t b = 0; b < rep.benchmarks.size(); ++b)
    for (Technique t : c.techniques)
      for (DomainKind d : c.domains) {
        Cell cell;
        cell.benchmark = b;
        cell.technique = t;
        cell.domain = d;
        rep.cells.push_back(std::move(cell));
      }

  // cells are independent; each worker owns a solver process
  std::atomic<std::size_t> next{0};
  unsigned jobs = c.jobs > 0 ? static_cast<unsigned>(c.jobs) : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(rep.cells.size(), 1)));
  auto worker = [&] {
    std::unique_ptr<smt::SolverSession> s;
    for (std::size_t i; (i = next++) < rep.cells.size();) {
      try {
        run_cell(rep.benchmarks[rep.cells[i].benchmark], rep.cells[i], c, s);
      } catch (const std::exception& e) {
        rep.cells[i].quarantined = true;
        rep.cells[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::unique_ptr<smt::SolverSession> s;  // started on the first comparison
  auto pair = [&](std::string left, std::string right, std::string fixed, auto cell_of) {
    PairTable pt{left, right, fixed, {}, {}};
    std::vector<ComparisonReport> parts;
    for (std::size_t b = 0; b < rep.benchmarks.size(); ++b) {
      auto [l, r] = cell_of(b);
      if (l->quarantined || r->quarantined) continue;
      if (!s) s = std::make_unique<smt::SolverSession>(c.solver);
      auto cr = compare_cells(*s, rep.benchmarks[b], *l, *r);
      cr.left = left;
      cr.right = right;
      parts.push_back(cr);
      pt.rows.emplace_back(rep.benchmarks[b].name, cr);
    }
    pt.total = merge(parts);
    pt.total.left = left;
    pt.total.right = right;
    return pt;
  };
  for (DomainKind d : c.domains)
    for (auto [lt, rt] : technique_pairs())
      if (has(c.techniques, lt) && has(c.techniques, rt))
        rep.technique_pairs.push_back(pair(display_name(lt), display_name(rt), to_string(d), [&](std::size_t b) {
          return std::make_pair(rep.find(b, lt, d), rep.find(b, rt, d));
        }));
  if (has(c.techniques, Technique::GPF))
    for (auto [ld, rd] : domain_pairs())
      if (has(c.domains, ld) && has(c.domains, rd))
        rep.domain_pairs.push_back(pair(to_string(ld), to_string(rd), display_name(Technique::GPF), [&](std::size_t b) {
          return std::make_pair(rep.find(b, Technique::GPF, ld), rep.find(b, Technique::GPF, rd));
        }));
  return rep;
}

}  // namespace pagai::harness
