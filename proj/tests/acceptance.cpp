// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 when any fails.

#include "laws.hpp"
#include "pagai/frontend/interp.hpp"
#include "pagai/harness.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

using namespace pagai;
using namespace pagai::harness;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FrontendOptions frontend() {
  FrontendOptions fo;
  fo.inline_depth = 1;
  fo.observe_exit = true;
  return fo;
}

std::vector<Benchmark> load_corpus() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(PAGAI_CORPUS_DIR))
    if (e.path().extension() == ".mimp") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Benchmark> out;
  for (const auto& f : files) out.push_back(load_benchmark(f.stem().string(), slurp(f), frontend()));
  return out;
}

MatrixReport full_matrix() {
  MatrixConfig mc;
  mc.frontend = frontend();
  mc.domains = {DomainKind::Box, DomainKind::Octagon, DomainKind::Polyhedron};
  return run_matrix(load_corpus(), mc);
}

int failed = 0;

void report(int n, bool ok, const std::string& what, const std::string& detail) {
  if (!ok) ++failed;
  std::printf("criterion %d: %s  %s (%s)\n", n, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string cell_name(const MatrixReport& rep, const Cell& c) {
  return rep.benchmarks[c.benchmark].name + "/" + display_name(c.technique) + "/" + to_string(c.domain);
}

// 1
void phase_loop() {
  smt::SolverSession s;
  Benchmark b = load_benchmark("fig1", slurp(std::string(PAGAI_CORPUS_DIR) + "/fig1.mimp"), frontend());
  const auto& f = b.functions.back();
  const std::map<Technique, bool> expect{
      {Technique::S, false}, {Technique::PF, true}, {Technique::GPF, true}, {Technique::DIS, true}};
  bool ok = true;
  double worst = 0;
  std::string detail;
  for (auto [t, want] : expect) {
    auto t0 = Clock::now();
    EngineConfig c;
    auto inv = analyze(f.cfg, f.info, t, c, &s);
    auto as = check_assertions(f.cfg, f.info, inv, s);
    double secs = since(t0);
    worst = std::max(worst, secs);
    bool proved = !as.empty() && std::all_of(as.begin(), as.end(), [](const auto& a) { return a.proved; });
    ok &= proved == want && secs < 5.0;
    detail += display_name(t) + (proved ? " proved, " : " unproved, ");
  }
  detail += "slowest cell " + std::to_string(worst) + " s";
  report(1, ok, "fig1 discrimination under pk", detail);
}

// 2
void soundness(const MatrixReport& rep) {
  auto t0 = Clock::now();
  std::size_t runs = 0, crossings = 0, violations = 0, broken = 0;
  std::string first;
  for (std::size_t b = 0; b < rep.benchmarks.size(); ++b) {
    const auto& bench = rep.benchmarks[b];
    for (std::size_t k = 0; k < bench.functions.size(); ++k) {
      std::vector<const InvariantMap*> invs;
      std::vector<const Cell*> owners;
      for (const auto& c : rep.cells) {
        if (c.benchmark != b) continue;
        if (c.quarantined || !c.functions[k].error.empty()) {
          if (!broken++) first = cell_name(rep, c) + " has no result";
          continue;
        }
        invs.push_back(&c.functions[k].inv);
        owners.push_back(&c);
      }
      const auto& f = bench.functions[k];
      auto rs = soundness_fuzz(f.cfg, f.info, invs, 10000, 1);
      for (std::size_t i = 0; i < rs.size(); ++i) {
        ++runs;
        crossings += rs[i].crossings;
        if (rs[i].violations && !violations) first = cell_name(rep, *owners[i]) + " " + f.name + ": " + rs[i].first;
        violations += rs[i].violations;
      }
    }
  }
  double secs = since(t0);
  std::string detail = std::to_string(runs) + " function cells x 10^4 trials, " + std::to_string(crossings) +
                       " checked crossings, " + std::to_string(violations) + " violations, " + std::to_string(secs) + " s";
  if (!first.empty()) detail += "; " + first;
  report(2, violations == 0 && broken == 0 && secs < 600, "soundness fuzz", detail);
}

// 3
void inductive(const MatrixReport& rep) {
  smt::SolverSession s;
  std::size_t cells = 0, good = 0;
  std::string first;
  for (const auto& c : rep.cells) {
    ++cells;
    bool ok = !c.quarantined;
    const auto& bench = rep.benchmarks[c.benchmark];
    for (std::size_t k = 0; ok && k < bench.functions.size(); ++k) {
      const auto& f = bench.functions[k];
      if (!c.functions[k].error.empty()) {
        ok = false;
        break;
      }
      if (auto why = verify_inductive(f.cfg, f.info, c.functions[k].inv, s)) {
        ok = false;
        if (first.empty()) first = cell_name(rep, c) + " " + f.name + ": " + *why;
      }
    }
    good += ok;
  }
  std::string detail = std::to_string(good) + "/" + std::to_string(cells) + " cells certified";
  if (!first.empty()) detail += "; " + first;
  report(3, good == cells, "inductiveness certificate", detail);
}

// 4
void domain_laws() {
  smt::SolverSession s;
  bool ok = true;
  std::string detail;
  for (DomainKind k : {DomainKind::Box, DomainKind::Octagon, DomainKind::Polyhedron}) {
    auto st = laws::run(k, 100000, 2024, &s, 2);
    ok &= st.failures == 0 && st.checks >= 100000;
    detail += to_string(k) + " " + std::to_string(st.checks) + " checks (" + std::to_string(st.smt_checks) +
              " via SMT) " + std::to_string(st.failures) + " failures; ";
    if (!st.first.empty()) detail += st.first + "; ";
  }
  report(4, ok, "domain laws", detail.substr(0, detail.size() - 2));
}

struct Interval {
  Bound lo_neg, hi;  // lo stored negated
};

// Interval of `e` over the box `v` (dims are positions in v.dims()).
Interval eval_box(const AbstractValue& v, const LinearExpr& e) {
  const Box& b = *v.box();
  Interval r{Bound::finite(-e.constant()), Bound::finite(e.constant())};
  for (const auto& [x, a] : e.terms()) {
    auto it = std::lower_bound(v.dims().begin(), v.dims().end(), x);
    std::size_t i = it - v.dims().begin();
    const Bound& up = a > 0 ? b.hi(i) : b.neg_lo(i);
    const Bound& dn = a > 0 ? b.neg_lo(i) : b.hi(i);
    Rational m = a > 0 ? a : Rational(-a);
    r.hi = r.hi + (up.infinite ? Bound::inf() : Bound::finite(up.value * m));
    r.lo_neg = r.lo_neg + (dn.infinite ? Bound::inf() : Bound::finite(dn.value * m));
  }
  return r;
}

// Box interval of every observed name at exit.
std::map<std::string, Interval> exit_intervals(const Benchmark::Function& f, const InvariantMap& inv) {
  std::map<std::string, Interval> out;
  BlockId x = f.cfg.exit;
  const Dims& dims = f.info.dims(x);
  AbstractValue v = inv.collapsed(x, dims);
  if (v.is_bottom()) return out;
  PathTransfer pt(f.cfg, f.info.lbl);
  for (const auto& [name, var] : f.cfg.observed) {
    std::optional<LinearExpr> e;
    if (std::binary_search(dims.begin(), dims.end(), var))
      e = LinearExpr::var(var);
    else
      e = pt.resolve_at(x, var);
    out[name] = e ? eval_box(v, *e) : Interval{};
  }
  return out;
}

bool inside(const Interval& i, const Rational& q) {
  return (i.hi.infinite || q <= i.hi.value) && (i.lo_neg.infinite || -q <= i.lo_neg.value);
}

// 5
void box_oracle(const std::vector<Benchmark>& corpus) {
  std::size_t exact = 0, exact_total = 0, sound_runs = 0, sound_bad = 0;
  std::string first;
  for (const auto& b : corpus) {
    Program prog = parse(b.source);
    const auto& f = b.functions.back();
    EngineConfig c;
    c.domain = DomainKind::Box;
    auto inv = analyze(f.cfg, f.info, Technique::S, c, nullptr);
    auto box = exit_intervals(f, inv);
    if (b.name.rfind("lf", 0) == 0) {
      // exhaustive: every nondet read ranges over [-3, 3]
      ++exact_total;
      std::map<std::string, std::pair<Rational, Rational>> hull;
      std::vector<int> pick;
      do {
        std::size_t pos = 0;
        auto run = interpret(prog, "main", [&](bool) {
          if (pos == pick.size()) pick.push_back(-3);
          return Rational(pick[pos++]);
        });
        pick.resize(pos);
        if (run.outcome == Outcome::Exit)
          for (const auto& [n, q] : run.finals) {
            auto [it, fresh] = hull.emplace(n, std::make_pair(q, q));
            if (!fresh) {
              it->second.first = std::min(it->second.first, q);
              it->second.second = std::max(it->second.second, q);
            }
          }
        while (!pick.empty() && pick.back() == 3) pick.pop_back();
        if (!pick.empty()) ++pick.back();
      } while (!pick.empty());
      bool same = !hull.empty();
      for (const auto& [n, mm] : hull) {
        auto it = box.find(n);
        bool eq = it != box.end() && !it->second.hi.infinite && !it->second.lo_neg.infinite &&
                  it->second.hi.value == mm.second && -it->second.lo_neg.value == mm.first;
        if (!eq && first.empty()) first = b.name + ": " + n + " differs from [" + to_string(mm.first) + ", " + to_string(mm.second) + "]";
        same &= eq;
      }
      exact += same;
    } else {
      std::mt19937 rng(5);
      std::uniform_int_distribution<int> d(-3, 3);
      for (int k = 0; k < 300; ++k) {
        auto run = interpret(prog, "main", [&](bool) { return Rational(d(rng)); }, 200000);
        if (run.outcome != Outcome::Exit) continue;
        ++sound_runs;
        for (const auto& [n, q] : run.finals) {
          auto it = box.find(n);
          if (it == box.end() || inside(it->second, q)) continue;
          if (!sound_bad++) first = b.name + ": " + n + " = " + to_string(q) + " escapes the box";
        }
      }
    }
  }
  std::string detail = std::to_string(exact) + "/" + std::to_string(exact_total) +
                       " loop-free programs match the hull exactly, " + std::to_string(sound_runs) +
                       " runs of the others inside the box, " + std::to_string(sound_bad) + " escapes";
  if (!first.empty()) detail += "; " + first;
  report(5, exact == exact_total && exact_total == 10 && sound_bad == 0 && sound_runs > 0, "box oracle", detail);
}

// 6
void pf_refines(const std::vector<Benchmark>& corpus) {
  smt::SolverSession s;
  std::size_t points = 0, good = 0, programs = 0;
  std::string first;
  for (const auto& b : corpus) {
    bool loop_free = std::all_of(b.functions.begin(), b.functions.end(),
                                 [](const auto& f) { return f.info.widening_points.empty(); });
    if (!loop_free) continue;
    ++programs;
    for (const auto& f : b.functions) {
      EngineConfig c;
      auto S = analyze(f.cfg, f.info, Technique::S, c, &s);
      auto P = analyze(f.cfg, f.info, Technique::PF, c, &s);
      for (BlockId p : reported_points(f.cfg, f.info)) {
        ++points;
        bool ok = P.collapsed(p, f.info.dims(p)).leq(S.collapsed(p, f.info.dims(p)));
        good += ok;
        if (!ok && first.empty()) first = b.name + " " + f.name + " at " + f.cfg.block_name(p);
      }
    }
  }
  std::string detail = std::to_string(good) + "/" + std::to_string(points) + " points in " +
                       std::to_string(programs) + " loop-free programs";
  if (!first.empty()) detail += "; " + first;
  report(6, points > 0 && good == points, "PF refines S without loops", detail);
}

// 7
void en_bloc(const MatrixReport& rep) {
  std::size_t cells = 0, good = 0;
  std::string first;
  for (const auto& c : rep.cells) {
    const auto& b = rep.benchmarks[c.benchmark];
    if (b.name != "enbloc") continue;
    ++cells;
    if (c.quarantined) continue;
    const auto& f = b.functions.back();
    BlockId x = f.cfg.exit;
    std::string text = render_invariant(f.cfg, f.info, c.functions.back().inv, x, source_names(f.cfg, f.info, x));
    bool ok = text.find("z = 0") != std::string::npos;
    good += ok;
    if (!ok && first.empty()) first = cell_name(rep, c) + ": " + text;
  }
  std::string detail = std::to_string(good) + "/" + std::to_string(cells) + " cells print z = 0 at exit";
  if (!first.empty()) detail += "; " + first;
  report(7, cells == 15 && good == cells, "en-bloc precision", detail);
}

// 8
void determinism(const MatrixReport& rep) {
  std::string a = to_json(rep, false).dump();
  std::string b = to_json(full_matrix(), false).dump();
  report(8, a == b, "determinism", std::to_string(a.size()) + " bytes of structured report, " +
                                       (a == b ? "identical" : "different") + " across two runs");
}

// 9
void table_shape(const MatrixReport& rep) {
  std::set<std::pair<std::string, std::string>> tp, dp;
  std::size_t rows = 0, bad = 0;
  auto sums = [&](const ComparisonReport& r) {
    ++rows;
    double t = r.pct_left + r.pct_right + r.pct_equal + r.pct_uncomparable;
    if (!r.degenerate && std::abs(t - 100.0) > 0.02) ++bad;
  };
  for (const auto& t : rep.technique_pairs) {
    tp.insert({t.left, t.right});
    sums(t.total);
    for (const auto& [n, r] : t.rows) sums(r);
  }
  for (const auto& t : rep.domain_pairs) {
    dp.insert({t.left, t.right});
    sums(t.total);
    for (const auto& [n, r] : t.rows) sums(r);
  }
  std::string text = to_text(rep);
  bool timing = text.find("Time in seconds") != std::string::npos && to_json(rep)["timing"].size() == 3;
  bool ok = tp.size() == 6 && rep.technique_pairs.size() == 18 && dp.size() == 3 && bad == 0 && timing;
  report(9, ok, "table shape",
         std::to_string(tp.size()) + " technique pairs, " + std::to_string(dp.size()) + " domain pairs, " +
             std::to_string(rows - bad) + "/" + std::to_string(rows) + " rows sum to 100.00, timing table " +
             (timing ? "present" : "missing"));
}

}  // namespace

int main() {
  auto t0 = Clock::now();
  phase_loop();
  std::vector<Benchmark> corpus = load_corpus();
  auto tm = Clock::now();
  MatrixReport rep = full_matrix();
  std::printf("matrix: %zu benchmarks, %zu cells, %.1f s\n", rep.benchmarks.size(), rep.cells.size(), since(tm));
  soundness(rep);
  inductive(rep);
  domain_laws();
  box_oracle(corpus);
  pf_refines(corpus);
  en_bloc(rep);
  determinism(rep);
  table_shape(rep);
  std::printf("%d of 9 criteria failed, %.1f s\n", failed, since(t0));
  return failed ? 1 : 0;
}
