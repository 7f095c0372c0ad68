#include "pagai/harness.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace pagai;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::vector<std::string> inputs;
  std::string technique = "gpf";
  std::vector<std::string> techniques, domains;
  std::string domain = "pk";
  std::string solver;
  int solver_timeout = 10000;
  int widening_delay = 2;
  int narrowing_passes = 2;
  int max_disjuncts = 5;
  int inline_depth = 1;
  bool no_unroll = false;
  std::string format = "text";
  bool dump_cfg = false;
  std::string dump_smt;
  unsigned seed = 1;
  int jobs = 0;
  bool all = false;
  std::string out;
  std::string left = "s:pk", right = "gpf:pk";
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> expand(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> files;
      for (const auto& e : fs::directory_iterator(in))
        if (e.path().extension() == ".mimp") files.push_back(e.path().string());
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else {
      out.push_back(in);
    }
  }
  return out;
}

Technique technique_or_throw(const std::string& s) {
  if (auto t = parse_technique(s)) return *t;
  throw std::invalid_argument("unknown technique '" + s + "' (s, g, pf, gpf, dis)");
}

DomainKind domain_or_throw(const std::string& s) {
  if (auto d = parse_domain(s)) return *d;
  throw std::invalid_argument("unknown domain '" + s + "' (box, oct, pk)");
}

harness::MatrixConfig matrix_config(const Options& o, std::ostream* dump) {
  harness::MatrixConfig c;
  c.engine.widening_delay = o.widening_delay;
  c.engine.narrowing_passes = o.narrowing_passes;
  c.engine.max_disjuncts = o.max_disjuncts;
  c.frontend.inline_depth = o.inline_depth;
  c.frontend.unroll = !o.no_unroll;
  c.frontend.observe_exit = true;
  c.solver.command = o.solver;
  c.solver.timeout_ms = o.solver_timeout;
  c.solver.dump = dump;
  c.seed = o.seed;
  c.jobs = o.jobs;
  c.techniques = {technique_or_throw(o.technique)};
  c.domains = {domain_or_throw(o.domain)};
  return c;
}

std::string fmt_pct(double x) { return fmt::format("{:.2f}", x); }

std::string benchmark_name(const std::string& path) { return fs::path(path).stem().string(); }

// Loads every input; parse errors are printed and counted.
std::vector<harness::Benchmark> load_all(const std::vector<std::string>& files, const FrontendOptions& fo,
                                         int& errors) {
  std::vector<harness::Benchmark> out;
  for (const auto& f : files) {
    try {
      out.push_back(harness::load_benchmark(benchmark_name(f), slurp(f), fo));
    } catch (const std::exception& e) {
      std::cerr << f << ":" << e.what() << "\n";
      ++errors;
    }
  }
  return out;
}

std::string invariant_text(const harness::Benchmark::Function& f, const InvariantMap& inv, BlockId p) {
  return render_invariant(f.cfg, f.info, inv, p, source_names(f.cfg, f.info, p));
}

std::string point_label(const Cfg& cfg, BlockId p) {
  if (p == cfg.exit) return "at exit";
  if (p == cfg.entry) return "at entry";
  return "at line " + std::to_string(cfg.blocks[p].line) + " (" + cfg.block_name(p) + ")";
}

void print_solver_error(const Options& o, const std::string& what) {
  std::string cmd = o.solver.empty() ? smt::default_solver_command() : o.solver;
  std::cerr << "pagai: solver failure: " << what << " (command: " << cmd << ")\n";
}

int cmd_analyze(const Options& o) {
  std::ofstream dump_file;
  std::ostream* dump = nullptr;
  if (o.dump_smt == "-") dump = &std::cerr;
  else if (!o.dump_smt.empty()) {
    dump_file.open(o.dump_smt);
    dump = &dump_file;
  }
  harness::MatrixConfig c = matrix_config(o, dump);
  c.jobs = 1;
  int errors = 0;
  auto files = expand(o.inputs);
  auto corpus = load_all(files, c.frontend, errors);
  if (o.dump_cfg)
    for (const auto& b : corpus)
      for (const auto& f : b.functions) std::cout << dump_cfg(f.cfg, f.info) << "\n";
  auto rep = harness::run_matrix(std::move(corpus), c);
  bool unproved = false;
  for (const auto& cell : rep.cells) {
    const auto& b = rep.benchmarks[cell.benchmark];
    for (std::size_t k = 0; k < cell.functions.size(); ++k) {
      const auto& fr = cell.functions[k];
      if (!fr.error.empty()) {
        ++errors;
        if (fr.error.rfind("solver", 0) == 0) print_solver_error(o, fr.error);
        else std::cerr << b.name << ": " << fr.name << ": " << fr.error << "\n";
        continue;
      }
      for (const auto& a : fr.asserts) unproved |= !a.proved;
    }
  }
  if (o.format == "json") {
    std::cout << harness::to_json(rep).dump(2) << "\n";
  } else if (o.format == "csv") {
    std::cout << "benchmark,function,line,proved\n";
    for (const auto& cell : rep.cells)
      for (const auto& fr : cell.functions)
        for (const auto& a : fr.asserts)
          std::cout << rep.benchmarks[cell.benchmark].name << "," << fr.name << "," << a.line << ","
                    << (a.proved ? 1 : 0) << "\n";
  } else {
    for (const auto& cell : rep.cells) {
      const auto& b = rep.benchmarks[cell.benchmark];
      std::cout << b.name << " [" << display_name(cell.technique) << ", " << to_string(cell.domain) << "]\n";
      for (std::size_t k = 0; k < cell.functions.size(); ++k) {
        const auto& fr = cell.functions[k];
        const auto& f = b.functions[k];
        if (!fr.error.empty()) continue;
        std::cout << "function " << fr.name << (fr.inv.downgraded ? " (solver gave up, classic result)" : "")
                  << "\n";
        for (BlockId p : reported_points(f.cfg, f.info))
          std::cout << "  " << point_label(f.cfg, p) << ": " << invariant_text(f, fr.inv, p) << "\n";
        for (const auto& a : fr.asserts) {
          if (a.proved) std::cout << "assert at line " << a.line << ": proved\n";
          else std::cout << "possible assertion failure at line " << a.line << "\n";
        }
      }
    }
  }
  if (errors) return 2;
  return unproved ? 1 : 0;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

int cmd_matrix(const Options& o) {
  harness::MatrixConfig c = matrix_config(o, nullptr);
  if (o.all) {
    c.techniques = {Technique::S, Technique::G, Technique::PF, Technique::GPF, Technique::DIS};
    c.domains = {DomainKind::Box, DomainKind::Octagon, DomainKind::Polyhedron};
  }
  if (!o.techniques.empty()) {
    c.techniques.clear();
    for (const auto& t : o.techniques) c.techniques.push_back(technique_or_throw(t));
  }
  if (!o.domains.empty()) {
    c.domains.clear();
    for (const auto& d : o.domains) c.domains.push_back(domain_or_throw(d));
  }
  int errors = 0;
  auto corpus = load_all(expand(o.inputs), c.frontend, errors);
  auto rep = harness::run_matrix(std::move(corpus), c);
  for (const auto& cell : rep.cells)
    if (cell.quarantined) ++errors;
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_file(fs::path(o.out) / "report.json", harness::to_json(rep).dump(2) + "\n");
    write_file(fs::path(o.out) / "report.txt", harness::to_text(rep));
    write_file(fs::path(o.out) / "report.csv", harness::to_csv(rep));
    std::cout << "report written to " << o.out << "\n";
  } else if (o.format == "json") {
    std::cout << harness::to_json(rep).dump(2) << "\n";
  } else if (o.format == "csv") {
    std::cout << harness::to_csv(rep);
  } else {
    std::cout << harness::to_text(rep);
  }
  return errors ? 2 : 0;
}

std::pair<Technique, DomainKind> cell_spec(const std::string& s) {
  auto k = s.find(':');
  if (k == std::string::npos) throw std::invalid_argument("expected TECHNIQUE:DOMAIN, got '" + s + "'");
  return {technique_or_throw(s.substr(0, k)), domain_or_throw(s.substr(k + 1))};
}

int cmd_compare(const Options& o) {
  auto [lt, ld] = cell_spec(o.left);
  auto [rt, rd] = cell_spec(o.right);
  harness::MatrixConfig c = matrix_config(o, nullptr);
  int errors = 0;
  auto corpus = load_all(expand(o.inputs), c.frontend, errors);
  smt::SolverSession s(c.solver);
  std::vector<harness::ComparisonReport> parts;
  for (const auto& b : corpus) {
    std::vector<harness::PointVerdict> vs;
    double lsec = 0, rsec = 0;
    for (const auto& f : b.functions) {
      EngineConfig le = c.engine, re = c.engine;
      le.domain = ld;
      re.domain = rd;
      InvariantMap li, ri;
      try {
        li = analyze(f.cfg, f.info, lt, le, &s);
        ri = analyze(f.cfg, f.info, rt, re, &s);
      } catch (const std::exception& e) {
        std::cerr << b.name << ": " << f.name << ": " << e.what() << "\n";
        ++errors;
        continue;
      }
      lsec += li.seconds;
      rsec += ri.seconds;
      for (BlockId p : harness::compared_points(f.cfg, f.info)) {
        auto v = harness::compare_point(s, f.cfg, li.disjuncts(p), ri.disjuncts(p));
        std::cout << b.name << " " << f.name << " " << point_label(f.cfg, p) << ": " << harness::to_string(v.verdict)
                  << (v.inconclusive ? " (solver unknown)" : "") << "\n";
        vs.push_back(v);
      }
    }
    parts.push_back(harness::aggregate_report(vs, lsec, rsec));
  }
  auto t = harness::merge(parts);
  std::cout << o.left << " vs " << o.right << ": " << t.points << " points, left stronger "
            << fmt_pct(t.pct_left) << "%, right stronger " << fmt_pct(t.pct_right) << "%, equal " << fmt_pct(t.pct_equal)
            << "%, uncomparable " << fmt_pct(t.pct_uncomparable) << "%" << (t.degenerate ? " (degenerate)" : "")
            << "\n";
  return errors ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical invariant generator for a small imperative language"};
  app.set_version_flag("--version", std::string("pagai ") + PAGAI_VERSION);
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("inputs", o.inputs, "Source files or directories of .mimp files")->required();
    sub->add_option("--solver", o.solver, "SMT solver command line (default: $PAGAI_SOLVER or 'z3 -in')");
    sub->add_option("--solver-timeout", o.solver_timeout, "Per-query timeout in milliseconds")->capture_default_str();
    sub->add_option("--widening-delay", o.widening_delay, "Ascending steps before widening")->capture_default_str();
    sub->add_option("--narrowing-passes", o.narrowing_passes, "Descending passes")->capture_default_str();
    sub->add_option("--max-disjuncts", o.max_disjuncts, "Disjuncts per point for dis")->capture_default_str();
    sub->add_option("--inline-depth", o.inline_depth, "Nested inlining levels")->capture_default_str();
    sub->add_flag("--no-unroll", o.no_unroll, "Do not peel loops");
    sub->add_option("--format", o.format, "text, json or csv")
        ->check(CLI::IsMember({"text", "json", "csv"}))
        ->capture_default_str();
    sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  };

  auto* analyze = app.add_subcommand("analyze", "Print invariants and assertion verdicts");
  common(analyze);
  analyze->add_option("--technique", o.technique, "s, g, pf, gpf or dis")->capture_default_str();
  analyze->add_option("--domain", o.domain, "box, oct or pk")->capture_default_str();
  analyze->add_flag("--dump-cfg", o.dump_cfg, "Print each function's SSA graph first");
  analyze->add_option("--dump-smt", o.dump_smt, "Write the solver transcript to a file ('-' for stderr)");

  auto* matrix = app.add_subcommand("matrix", "Run every technique/domain cell and compare them");
  common(matrix);
  matrix->add_flag("--all", o.all, "All five techniques and all three domains");
  matrix->add_option("--technique", o.techniques, "Techniques to run (repeatable)");
  matrix->add_option("--domain", o.domains, "Domains to run (repeatable)");
  matrix->add_option("--out", o.out, "Directory for report.json, report.txt and report.csv");
  matrix->add_option("--jobs", o.jobs, "Worker threads (0: one per core)")->capture_default_str();

  auto* compare = app.add_subcommand("compare", "Compare two cells point by point");
  common(compare);
  compare->add_option("--left", o.left, "TECHNIQUE:DOMAIN")->capture_default_str();
  compare->add_option("--right", o.right, "TECHNIQUE:DOMAIN")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (*analyze) return cmd_analyze(o);
    if (*matrix) return cmd_matrix(o);
    if (*compare) return cmd_compare(o);
  } catch (const smt::SolverError& e) {
    print_solver_error(o, e.what());
  } catch (const std::exception& e) {
    std::cerr << "pagai: " << e.what() << "\n";
  }
  return 2;
}
