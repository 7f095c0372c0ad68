#include "pagai/smt.hpp"

#include <cerrno>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <poll.h>
#include <spawn.h>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace pagai::smt {

namespace {

bool is_space(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; }

// End of the first complete s-expression at or after `pos`, or npos.
// `start` receives where it begins.
std::size_t scan(std::string_view t, std::size_t pos, std::size_t& start) {
  std::size_t i = pos;
  for (;;) {
    while (i < t.size() && is_space(t[i])) ++i;
    if (i < t.size() && t[i] == ';') {
      while (i < t.size() && t[i] != '\n') ++i;
      if (i == t.size()) return std::string_view::npos;
      continue;
    }
    break;
  }
  if (i >= t.size()) return std::string_view::npos;
  start = i;
  int level = 0;
  while (i < t.size()) {
    char c = t[i];
    if (c == '"') {
      ++i;
      while (i < t.size()) {
        if (t[i] == '"') {
          if (i + 1 < t.size() && t[i + 1] == '"') {
            i += 2;
            continue;
          }
          break;
        }
        ++i;
      }
      if (i >= t.size()) return std::string_view::npos;
      ++i;
    } else if (c == '|') {
      auto j = t.find('|', i + 1);
      if (j == std::string_view::npos) return j;
      i = j + 1;
    } else if (c == '(') {
      ++level;
      ++i;
    } else if (c == ')') {
      --level;
      ++i;
    } else if (c == ';' && level > 0) {
      while (i < t.size() && t[i] != '\n') ++i;
    } else if (is_space(c)) {
      ++i;
    } else {
      while (i < t.size() && !is_space(t[i]) && t[i] != '(' && t[i] != ')' && t[i] != ';') ++i;
      // a bare atom is only complete once a delimiter follows
      if (level == 0 && i == t.size()) return std::string_view::npos;
    }
    if (level == 0) return i;
    if (level < 0) return i;
  }
  return std::string_view::npos;
}

SExpr build(std::string_view t, std::size_t& i) {
  while (i < t.size() && (is_space(t[i]) || t[i] == ';')) {
    if (t[i] == ';')
      while (i < t.size() && t[i] != '\n') ++i;
    else
      ++i;
  }
  SExpr e;
  if (i >= t.size()) return e;
  if (t[i] == '(') {
    e.is_list = true;
    ++i;
    for (;;) {
      while (i < t.size() && (is_space(t[i]) || t[i] == ';')) {
        if (t[i] == ';')
          while (i < t.size() && t[i] != '\n') ++i;
        else
          ++i;
      }
      if (i >= t.size() || t[i] == ')') {
        ++i;
        break;
      }
      e.list.push_back(build(t, i));
    }
    return e;
  }
  std::size_t b = i;
  if (t[i] == '"') {
    ++i;
    while (i < t.size()) {
      if (t[i] == '"') {
        if (i + 1 < t.size() && t[i + 1] == '"') {
          i += 2;
          continue;
        }
        break;
      }
      ++i;
    }
    ++i;
  } else if (t[i] == '|') {
    i = t.find('|', i + 1) + 1;
  } else {
    while (i < t.size() && !is_space(t[i]) && t[i] != '(' && t[i] != ')' && t[i] != ';') ++i;
  }
  e.atom = std::string(t.substr(b, i - b));
  if (e.atom.size() >= 2 && e.atom.front() == '|') e.atom = e.atom.substr(1, e.atom.size() - 2);
  return e;
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

}  // namespace

std::string SExpr::str() const {
  if (!is_list) return atom;
  std::string s = "(";
  for (std::size_t k = 0; k < list.size(); ++k) s += (k ? " " : "") + list[k].str();
  return s + ")";
}

std::vector<SExpr> parse_sexprs(std::string_view text) {
  std::vector<SExpr> out;
  std::size_t pos = 0, start = 0;
  for (;;) {
    std::size_t end = scan(text, pos, start);
    if (end == std::string_view::npos) {
      // trailing bare atom
      std::size_t i = pos;
      while (i < text.size() && is_space(text[i])) ++i;
      if (i < text.size() && text[i] != ';' && text[i] != '(') out.push_back(build(text, i));
      break;
    }
    std::size_t i = start;
    out.push_back(build(text.substr(0, end), i));
    pos = end;
  }
  return out;
}

std::optional<Rational> sexpr_number(const SExpr& e) {
  if (!e.is_list) return parse_rational(e.atom);
  if (e.list.size() == 2 && e.list[0].is("-")) {
    auto v = sexpr_number(e.list[1]);
    if (v) return -*v;
    return std::nullopt;
  }
  if (e.list.size() == 3 && e.list[0].is("/")) {
    auto a = sexpr_number(e.list[1]), b = sexpr_number(e.list[2]);
    if (a && b && *b != 0) return Rational(*a / *b);
  }
  return std::nullopt;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Sat: return "sat";
    case Status::Unsat: return "unsat";
    default: return "unknown";
  }
}

Rational Model::number(const std::string& name) const {
  auto it = numbers.find(name);
  return it == numbers.end() ? Rational(0) : it->second;
}

bool Model::boolean(const std::string& name) const {
  auto it = bools.find(name);
  return it != bools.end() && it->second;
}

std::string default_solver_command() {
  if (const char* env = std::getenv("PAGAI_SOLVER"); env && *env) return env;
  return "z3 -in";
}

SolverSession::SolverSession(SolverConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.command.empty()) cfg_.command = default_solver_command();
  start();
  init();
}

SolverSession::~SolverSession() { stop(); }

void SolverSession::start() {
  std::signal(SIGPIPE, SIG_IGN);
  int in[2], out[2];
  if (pipe(in) != 0 || pipe(out) != 0) throw SolverCrashed("pipe: " + std::string(std::strerror(errno)));
  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_adddup2(&fa, in[0], 0);
  posix_spawn_file_actions_adddup2(&fa, out[1], 1);
  posix_spawn_file_actions_addclose(&fa, in[1]);
  posix_spawn_file_actions_addclose(&fa, out[0]);
  auto words = split_words(cfg_.command);
  if (words.empty()) throw SolverCrashed("empty solver command");
  std::vector<char*> argv;
  for (auto& w : words) argv.push_back(w.data());
  argv.push_back(nullptr);
  pid_t pid;
  int rc = posix_spawnp(&pid, argv[0], &fa, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&fa);
  close(in[0]);
  close(out[1]);
  if (rc != 0) {
    close(in[1]);
    close(out[0]);
    throw SolverCrashed("cannot start solver '" + cfg_.command + "': " + std::strerror(rc));
  }
  pid_ = pid;
  to_ = in[1];
  from_ = out[0];
  buffer_.clear();
  depth_ = 0;
}

void SolverSession::stop() {
  if (pid_ < 0) return;
  if (to_ >= 0) {
    std::string bye = "(exit)\n";
    [[maybe_unused]] auto n = write(to_, bye.data(), bye.size());
    close(to_);
  }
  if (from_ >= 0) close(from_);
  // give it a moment, then insist
  int status = 0;
  for (int k = 0; k < 50; ++k) {
    if (waitpid(pid_, &status, WNOHANG) == pid_) {
      pid_ = -1;
      break;
    }
    usleep(2000);
  }
  if (pid_ >= 0) {
    kill(pid_, SIGKILL);
    waitpid(pid_, &status, 0);
  }
  pid_ = -1;
  to_ = from_ = -1;
}

void SolverSession::send(const std::string& text) {
  if (cfg_.dump) *cfg_.dump << text << "\n";
  std::string line = text + "\n";
  std::size_t off = 0;
  while (off < line.size()) {
    ssize_t n = write(to_, line.data() + off, line.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw SolverCrashed("solver pipe closed");
    }
    off += static_cast<std::size_t>(n);
  }
}

SExpr SolverSession::read_response(int timeout_ms) {
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  for (;;) {
    std::size_t from = 0;
    std::size_t end = scan(buffer_, 0, from);
    if (end != std::string::npos) {
      std::size_t i = from;
      SExpr e = build(std::string_view(buffer_).substr(0, end), i);
      buffer_.erase(0, end);
      return e;
    }
    int wait = -1;
    if (timeout_ms > 0) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) {
        stop();
        start();
        init();
        throw SolverInconclusive("solver timed out");
      }
      wait = static_cast<int>(left.count());
    }
    pollfd p{from_, POLLIN, 0};
    int r = poll(&p, 1, wait);
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) continue;
    char chunk[4096];
    ssize_t n = read(from_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw SolverCrashed("solver exited");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::string SolverSession::expect_atom(const std::string& text) {
  send(text);
  SExpr e = read_response(cfg_.timeout_ms > 0 ? cfg_.timeout_ms + 1000 : 0);
  if (e.is_list) {
    if (!e.list.empty() && e.list[0].is("error")) throw ProtocolError("solver error on " + text, e.str());
    throw ProtocolError("unexpected reply to " + text, e.str());
  }
  return e.atom;
}

void SolverSession::command(const std::string& text) {
  std::string a = expect_atom(text);
  if (a != "success") throw ProtocolError("unexpected reply to " + text, a);
}

void SolverSession::init() {
  command("(set-option :print-success true)");
  command("(set-option :produce-models true)");
  if (cfg_.timeout_ms > 0) {
    // not standard; tolerate solvers that refuse it
    try {
      command("(set-option :timeout " + std::to_string(cfg_.timeout_ms) + ")");
    } catch (const ProtocolError&) {
    }
  }
  try {
    command("(set-logic " + cfg_.logic + ")");
    logic_ = cfg_.logic;
  } catch (const ProtocolError&) {
    command("(set-logic ALL)");
    logic_ = "ALL";
  }
}

void SolverSession::declare(const std::string& name, const std::string& sort) {
  command("(declare-const " + name + " " + sort + ")");
}

void SolverSession::assert_formula(const std::string& formula) { command("(assert " + formula + ")"); }

void SolverSession::push() {
  command("(push 1)");
  ++depth_;
}

void SolverSession::pop() {
  if (depth_ == 0) throw std::logic_error("pop on an empty frame stack");
  command("(pop 1)");
  --depth_;
}

Status SolverSession::check() {
  auto t0 = std::chrono::steady_clock::now();
  std::string a = expect_atom("(check-sat)");
  seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ++queries_;
  if (a == "sat") return Status::Sat;
  if (a == "unsat") return Status::Unsat;
  if (a == "unknown") return Status::Unknown;
  throw ProtocolError("unexpected check-sat reply", a);
}

Model SolverSession::get_model() {
  send("(get-model)");
  SExpr e = read_response(cfg_.timeout_ms > 0 ? cfg_.timeout_ms + 1000 : 0);
  if (!e.is_list) throw ProtocolError("bad model", e.str());
  const std::vector<SExpr>* defs = &e.list;
  if (!e.list.empty() && e.list[0].is("error")) throw ProtocolError("solver error on get-model", e.str());
  if (!e.list.empty() && e.list[0].is("model")) defs = &e.list;
  Model m;
  for (const auto& d : *defs) {
    if (!d.is_list) continue;  // the "model" keyword
    if (d.list.size() != 5 || !d.list[0].is("define-fun")) throw ProtocolError("bad model entry", d.str());
    const std::string& name = d.list[1].atom;
    if (!d.list[2].is_list || !d.list[2].list.empty()) continue;  // functions: not ours
    const SExpr& sort = d.list[3];
    const SExpr& val = d.list[4];
    if (sort.is("Bool")) {
      if (val.is("true"))
        m.bools[name] = true;
      else if (val.is("false"))
        m.bools[name] = false;
      else
        throw ProtocolError("bad Bool value", d.str());
    } else {
      auto r = sexpr_number(val);
      if (!r) throw ProtocolError("bad numeric value", d.str());
      m.numbers[name] = *r;
    }
  }
  return m;
}

SolveResult SolverSession::solve(const std::vector<std::string>& assertions, bool want_model) {
  push();
  SolveResult r;
  try {
    for (const auto& a : assertions) assert_formula(a);
    r.status = check();
    if (r.status == Status::Sat && want_model) r.model = get_model();
  } catch (const SolverInconclusive&) {
    // process was restarted: frames are gone
    depth_ = 0;
    throw;
  } catch (...) {
    if (pid_ >= 0) pop();
    throw;
  }
  pop();
  return r;
}

void SolverSession::reset() {
  command("(reset)");
  depth_ = 0;
  init();
}

}  // namespace pagai::smt
