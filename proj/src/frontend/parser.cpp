#include "pagai/frontend/ast.hpp"

#include <cctype>
#include <map>
#include <optional>

namespace pagai {

std::string to_string(Type t) {
  switch (t) {
    case Type::Int: return "int";
    case Type::Real: return "real";
    case Type::Bool: return "bool";
    case Type::Void: return "void";
  }
  return "?";
}

std::string to_string(BinOp op) {
  static const char* s[] = {"+", "-", "*", "/", "<", "<=", ">", ">=", "==", "!=", "&&", "||"};
  return s[static_cast<int>(op)];
}

bool is_comparison(BinOp op) { return op >= BinOp::Lt && op <= BinOp::Ne; }

Expr Expr::lit(Rational v, Type t, Pos p) {
  Expr e;
  e.kind = Lit;
  e.value = std::move(v);
  e.type = t;
  e.pos = p;
  return e;
}

Expr Expr::variable(int v, Type t, Pos p) {
  Expr e;
  e.kind = Var;
  e.var = v;
  e.type = t;
  e.pos = p;
  return e;
}

Expr Expr::binary(BinOp op, Expr a, Expr b, Type t, Pos p) {
  Expr e;
  e.kind = Bin;
  e.op = op;
  e.type = t;
  e.pos = p;
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

Expr Expr::nondet(Type t, Pos p) {
  Expr e;
  e.kind = Nondet;
  e.type = t;
  e.pos = p;
  return e;
}

int Function::add_var(std::string n, Type t, Pos p, bool param) {
  // keep names unique inside the function; shadowed declarations get a suffix
  std::string base = n;
  for (int k = 2;; ++k) {
    bool clash = false;
    for (const auto& v : vars)
      if (v.name == n) clash = true;
    if (!clash) break;
    n = base + "_" + std::to_string(k);
  }
  vars.push_back({std::move(n), t, p, param});
  return static_cast<int>(vars.size()) - 1;
}

const Function* Program::find(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

Function* Program::find(const std::string& name) {
  for (auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

namespace {

enum class Tok { Ident, Int, Real, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  Pos pos;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  static const char* puncts[] = {"&&", "||", "==", "!=", "<=", ">=", "++", "--", "+=", "-=", "*=", "/=", "<<", ">>",
                                 "+",  "-",  "*",  "/",  "<",  ">",  "=",  "!",  "(",  ")",  "{",  "}",  ";",  ",",
                                 "&",  "|",  "^",  "~",  "%"};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.compare(i, 2, "//") == 0) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.compare(i, 2, "/*") == 0) {
      Pos start{line, col};
      std::size_t end = src.find("*/", i + 2);
      if (end == std::string::npos) throw SourceError(start, "unterminated comment");
      advance(end + 2 - i);
      continue;
    }
    Pos p{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, src.substr(i, j - i), p});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      Tok k = Tok::Int;
      if (j < src.size() && src[j] == '.') {
        k = Tok::Real;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      out.push_back({k, src.substr(i, j - i), p});
      advance(j - i);
      continue;
    }
    bool found = false;
    for (const char* s : puncts) {
      std::size_t n = std::char_traits<char>::length(s);
      if (src.compare(i, n, s) == 0) {
        out.push_back({Tok::Punct, s, p});
        advance(n);
        found = true;
        break;
      }
    }
    if (!found) throw SourceError(p, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

bool is_type_kw(const std::string& s) { return s == "int" || s == "real" || s == "void"; }

Type type_of_kw(const std::string& s) {
  if (s == "int") return Type::Int;
  if (s == "real") return Type::Real;
  return Type::Void;
}

bool is_reserved(const std::string& s) {
  static const char* kws[] = {"int",    "real",   "void",   "if",         "else",       "while", "for",
                              "break",  "return", "assert", "assume",     "continue",   "true",  "false",
                              "nondet_int", "nondet_real"};
  for (const char* k : kws)
    if (s == k) return true;
  return false;
}

struct Signature {
  Type ret;
  std::vector<Type> params;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  Program run() {
    collect_signatures();
    Program prog;
    while (peek().kind != Tok::End) prog.functions.push_back(function());
    if (!prog.find("main")) throw SourceError(peek().pos, "no function named main");
    return prog;
  }

 private:
  std::vector<Token> t_;
  std::size_t i_ = 0;
  std::map<std::string, Signature> sigs_;
  Function* fn_ = nullptr;
  std::vector<std::map<std::string, int>> scopes_;
  int loop_depth_ = 0;

  const Token& peek(std::size_t k = 0) const { return t_[std::min(i_ + k, t_.size() - 1)]; }
  bool at(const std::string& s, std::size_t k = 0) const {
    const Token& tk = peek(k);
    return (tk.kind == Tok::Punct || tk.kind == Tok::Ident) && tk.text == s;
  }
  Token take() { return t_[i_ < t_.size() - 1 ? i_++ : i_]; }
  bool accept(const std::string& s) {
    if (!at(s)) return false;
    ++i_;
    return true;
  }
  Token expect(const std::string& s) {
    if (!at(s)) fail(peek(), "expected '" + s + "'");
    return take();
  }
  [[noreturn]] void fail(const Token& tk, const std::string& msg) const {
    std::string near = tk.kind == Tok::End ? "end of input" : "'" + tk.text + "'";
    throw SourceError(tk.pos, msg + " near " + near);
  }
  std::string ident() {
    const Token& tk = peek();
    if (tk.kind != Tok::Ident || is_reserved(tk.text)) fail(tk, "expected identifier");
    return take().text;
  }

  void collect_signatures() {
    std::size_t save = i_;
    while (peek().kind != Tok::End) {
      Token tt = take();
      if (tt.kind != Tok::Ident || !is_type_kw(tt.text)) fail(tt, "expected function definition");
      Pos p = peek().pos;
      std::string name = ident();
      if (sigs_.count(name)) throw SourceError(p, "function '" + name + "' redefined");
      Signature sig{type_of_kw(tt.text), {}};
      expect("(");
      if (!at(")")) {
        do {
          Token pt = take();
          if (pt.kind != Tok::Ident || (pt.text != "int" && pt.text != "real")) fail(pt, "expected parameter type");
          sig.params.push_back(type_of_kw(pt.text));
          ident();
        } while (accept(","));
      }
      expect(")");
      if (!at("{")) fail(peek(), "expected '{'");
      int depth = 0;
      do {
        Token b = take();
        if (b.kind == Tok::End) throw SourceError(b.pos, "unbalanced braces");
        if (b.text == "{") ++depth;
        if (b.text == "}") --depth;
      } while (depth > 0);
      sigs_[name] = std::move(sig);
    }
    i_ = save;
    auto m = sigs_.find("main");
    if (m != sigs_.end() && m->second.ret == Type::Real)
      throw SourceError(peek().pos, "main must return int or void");
  }

  int lookup(const std::string& name, Pos p) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    throw SourceError(p, "undeclared variable " + name);
  }

  int declare(const std::string& name, Type t, Pos p, bool param = false) {
    if (scopes_.back().count(name)) throw SourceError(p, "variable " + name + " redeclared in the same scope");
    if (sigs_.count(name)) throw SourceError(p, "variable " + name + " shadows a function");
    int v = fn_->add_var(name, t, p, param);
    scopes_.back()[name] = v;
    return v;
  }

  Function function() {
    Function f;
    Token tt = take();
    f.ret = type_of_kw(tt.text);
    f.pos = tt.pos;
    f.name = ident();
    fn_ = &f;
    scopes_.assign(1, {});
    expect("(");
    if (!at(")")) {
      do {
        Type t = type_of_kw(take().text);
        Pos p = peek().pos;
        f.params.push_back(declare(ident(), t, p, true));
      } while (accept(","));
    }
    expect(")");
    expect("{");
    while (!at("}")) f.body.push_back(statement());
    expect("}");
    scopes_.clear();
    fn_ = nullptr;
    return f;
  }

  std::vector<Stmt> block_body() {
    std::vector<Stmt> out;
    if (accept("{")) {
      scopes_.emplace_back();
      while (!at("}")) {
        if (peek().kind == Tok::End) fail(peek(), "expected '}'");
        out.push_back(statement());
      }
      expect("}");
      scopes_.pop_back();
    } else {
      scopes_.emplace_back();
      out.push_back(statement());
      scopes_.pop_back();
    }
    return out;
  }

  static Stmt make(Stmt::Kind k, Pos p) {
    Stmt s;
    s.kind = k;
    s.pos = p;
    return s;
  }

  Stmt assign_checked(int var, Expr rhs, Pos p) {
    const VarDecl& d = fn_->vars[var];
    rhs = numeric(std::move(rhs), "assigned value");
    if (d.type == Type::Int && rhs.type == Type::Real)
      throw SourceError(p, "type mismatch: cannot assign real to int variable " + d.name);
    Stmt s = make(Stmt::Assign, p);
    s.var = var;
    s.expr = std::move(rhs);
    return s;
  }

  Stmt declaration() {
    Token tt = take();
    Type t = type_of_kw(tt.text);
    if (t == Type::Void) fail(tt, "variables cannot be void");
    Stmt group = make(Stmt::Block, tt.pos);
    do {
      Pos p = peek().pos;
      std::string name = ident();
      Stmt d = make(Stmt::Decl, p);
      if (accept("=")) {
        Expr init = numeric(expression(), "initializer");
        if (t == Type::Int && init.type == Type::Real)
          throw SourceError(p, "type mismatch: cannot initialize int variable " + name + " with real");
        d.has_expr = true;
        d.expr = std::move(init);
      }
      d.var = declare(name, t, p);  // declared after the initializer is parsed
      group.body.push_back(std::move(d));
    } while (accept(","));
    expect(";");
    if (group.body.size() == 1) return std::move(group.body[0]);
    return group;
  }

  // assignment-like statement without the trailing ';'
  Stmt simple() {
    Pos p = peek().pos;
    if (at("++") || at("--")) {
      bool inc = take().text == "++";
      Pos vp = peek().pos;
      int v = lookup(ident(), vp);
      return bump(v, inc, p);
    }
    if (peek().kind == Tok::Ident && at("(", 1)) {
      Stmt s = make(Stmt::CallStmt, p);
      s.expr = call();
      return s;
    }
    std::string name = ident();
    int v = lookup(name, p);
    if (accept("++")) return bump(v, true, p);
    if (accept("--")) return bump(v, false, p);
    const Token& optk = peek();
    static const std::map<std::string, BinOp> compound = {
        {"+=", BinOp::Add}, {"-=", BinOp::Sub}, {"*=", BinOp::Mul}, {"/=", BinOp::Div}};
    if (accept("=")) return assign_checked(v, expression(), p);
    auto it = compound.find(optk.text);
    if (optk.kind == Tok::Punct && it != compound.end()) {
      take();
      Expr rhs = numeric(expression(), "operand");
      const VarDecl& d = fn_->vars[v];
      Expr lhs = Expr::variable(v, d.type, p);
      return assign_checked(v, arith(it->second, std::move(lhs), std::move(rhs), p), p);
    }
    fail(optk, "expected assignment");
  }

  Stmt bump(int v, bool inc, Pos p) {
    const VarDecl& d = fn_->vars[v];
    Expr e = Expr::binary(inc ? BinOp::Add : BinOp::Sub, Expr::variable(v, d.type, p), Expr::lit(1, Type::Int, p),
                          d.type, p);
    return assign_checked(v, std::move(e), p);
  }

  Expr condition() {
    expect("(");
    Expr c = boolean(expression());
    expect(")");
    return c;
  }

  Stmt statement() {
    const Token& tk = peek();
    Pos p = tk.pos;
    if (tk.kind == Tok::Ident && is_type_kw(tk.text)) return declaration();
    if (accept(";")) return make(Stmt::Block, p);
    if (at("{")) {
      Stmt s = make(Stmt::Block, p);
      s.body = block_body();
      return s;
    }
    if (accept("if")) {
      Stmt s = make(Stmt::If, p);
      s.expr = condition();
      s.body = block_body();
      if (accept("else")) s.orelse = block_body();
      return s;
    }
    if (accept("while")) {
      Stmt s = make(Stmt::While, p);
      s.expr = condition();
      ++loop_depth_;
      s.body = block_body();
      --loop_depth_;
      return s;
    }
    if (accept("for")) {
      expect("(");
      scopes_.emplace_back();
      Stmt outer = make(Stmt::Block, p);
      if (peek().kind == Tok::Ident && (peek().text == "int" || peek().text == "real")) {
        outer.body.push_back(declaration());
      } else if (!accept(";")) {
        outer.body.push_back(simple());
        expect(";");
      }
      Stmt loop = make(Stmt::While, p);
      if (at(";"))
        loop.expr = Expr::lit(1, Type::Bool, peek().pos);
      else
        loop.expr = boolean(expression());
      expect(";");
      if (!at(")")) loop.step.push_back(simple());
      expect(")");
      ++loop_depth_;
      loop.body = block_body();
      --loop_depth_;
      scopes_.pop_back();
      outer.body.push_back(std::move(loop));
      return outer;
    }
    if (accept("break") || accept("continue")) {
      bool brk = t_[i_ - 1].text == "break";
      if (loop_depth_ == 0) throw SourceError(p, std::string(brk ? "break" : "continue") + " outside of a loop");
      expect(";");
      return make(brk ? Stmt::Break : Stmt::Continue, p);
    }
    if (accept("return")) {
      Stmt s = make(Stmt::Return, p);
      if (!at(";")) {
        if (fn_->ret == Type::Void) throw SourceError(p, "void function returns a value");
        Expr e = numeric(expression(), "return value");
        if (fn_->ret == Type::Int && e.type == Type::Real)
          throw SourceError(p, "type mismatch: returning real from int function");
        s.has_expr = true;
        s.expr = std::move(e);
      } else if (fn_->ret != Type::Void && fn_->name != "main") {
        throw SourceError(p, "missing return value");
      }
      expect(";");
      return s;
    }
    if (at("assert") || at("assume")) {
      bool as = take().text == "assert";
      Stmt s = make(as ? Stmt::Assert : Stmt::Assume, p);
      s.expr = condition();
      expect(";");
      return s;
    }
    Stmt s = simple();
    expect(";");
    return s;
  }

  // --- expressions ---------------------------------------------------------

  Expr numeric(Expr e, const char* what) {
    if (e.type == Type::Bool) throw SourceError(e.pos, std::string("type mismatch: boolean used as ") + what);
    if (e.type == Type::Void) throw SourceError(e.pos, std::string("void call used as ") + what);
    return e;
  }

  // int expressions used as conditions mean `e != 0`
  Expr boolean(Expr e) {
    if (e.type == Type::Bool) return e;
    Pos p = e.pos;
    e = numeric(std::move(e), "condition");
    return Expr::binary(BinOp::Ne, std::move(e), Expr::lit(0, Type::Int, p), Type::Bool, p);
  }

  Expr arith(BinOp op, Expr a, Expr b, Pos p) {
    a = numeric(std::move(a), "arithmetic operand");
    b = numeric(std::move(b), "arithmetic operand");
    Type t = (a.type == Type::Real || b.type == Type::Real) ? Type::Real : Type::Int;
    return Expr::binary(op, std::move(a), std::move(b), t, p);
  }

  Expr expression() { return disjunction(); }

  void reject_bitwise() {
    const Token& tk = peek();
    if (tk.kind == Tok::Punct &&
        (tk.text == "&" || tk.text == "|" || tk.text == "^" || tk.text == "~" || tk.text == "<<" || tk.text == ">>"))
      throw SourceError(tk.pos, "bitwise operator '" + tk.text + "' is not supported");
    if (tk.kind == Tok::Punct && tk.text == "%") throw SourceError(tk.pos, "operator '%' is not supported");
  }

  Expr disjunction() {
    Expr e = conjunction();
    while (at("||")) {
      Pos p = take().pos;
      e = Expr::binary(BinOp::Or, boolean(std::move(e)), boolean(conjunction()), Type::Bool, p);
    }
    return e;
  }

  Expr conjunction() {
    Expr e = comparison();
    while (at("&&")) {
      Pos p = take().pos;
      e = Expr::binary(BinOp::And, boolean(std::move(e)), boolean(comparison()), Type::Bool, p);
    }
    return e;
  }

  Expr comparison() {
    Expr e = additive();
    static const std::map<std::string, BinOp> ops = {{"<", BinOp::Lt},  {"<=", BinOp::Le}, {">", BinOp::Gt},
                                                     {">=", BinOp::Ge}, {"==", BinOp::Eq}, {"!=", BinOp::Ne}};
    reject_bitwise();
    auto it = peek().kind == Tok::Punct ? ops.find(peek().text) : ops.end();
    if (it == ops.end()) return e;
    Pos p = take().pos;
    Expr r = additive();
    reject_bitwise();
    if (peek().kind == Tok::Punct && ops.count(peek().text)) fail(peek(), "chained comparison");
    e = numeric(std::move(e), "comparison operand");
    r = numeric(std::move(r), "comparison operand");
    return Expr::binary(it->second, std::move(e), std::move(r), Type::Bool, p);
  }

  Expr additive() {
    Expr e = multiplicative();
    while (at("+") || at("-")) {
      Token o = take();
      e = arith(o.text == "+" ? BinOp::Add : BinOp::Sub, std::move(e), multiplicative(), o.pos);
    }
    reject_bitwise();
    return e;
  }

  Expr multiplicative() {
    Expr e = unary();
    while (true) {
      reject_bitwise();
      if (!(at("*") || at("/"))) break;
      Token o = take();
      e = arith(o.text == "*" ? BinOp::Mul : BinOp::Div, std::move(e), unary(), o.pos);
    }
    return e;
  }

  Expr unary() {
    Pos p = peek().pos;
    reject_bitwise();
    if (accept("-")) {
      Expr a = numeric(unary(), "operand of '-'");
      Expr e;
      e.kind = Expr::Neg;
      e.type = a.type;
      e.pos = p;
      e.args.push_back(std::move(a));
      return e;
    }
    if (accept("+")) return numeric(unary(), "operand of '+'");
    if (accept("!")) {
      Expr e;
      e.kind = Expr::Not;
      e.type = Type::Bool;
      e.pos = p;
      e.args.push_back(boolean(unary()));
      return e;
    }
    return primary();
  }

  Expr call() {
    Token name = take();
    expect("(");
    std::vector<Expr> args;
    if (!at(")")) {
      do args.push_back(numeric(expression(), "argument"));
      while (accept(","));
    }
    expect(")");
    if (name.text == "nondet_int" || name.text == "nondet_real") {
      if (!args.empty()) throw SourceError(name.pos, name.text + " takes no arguments");
      return Expr::nondet(name.text == "nondet_int" ? Type::Int : Type::Real, name.pos);
    }
    if (name.text == "assert" || name.text == "assume") fail(name, "assert/assume are statements");
    auto it = sigs_.find(name.text);
    if (it == sigs_.end()) throw SourceError(name.pos, "undeclared function " + name.text);
    const Signature& sig = it->second;
    if (sig.params.size() != args.size())
      throw SourceError(name.pos, "function " + name.text + " expects " + std::to_string(sig.params.size()) +
                                      " arguments, got " + std::to_string(args.size()));
    for (std::size_t k = 0; k < args.size(); ++k)
      if (sig.params[k] == Type::Int && args[k].type == Type::Real)
        throw SourceError(args[k].pos, "type mismatch: real argument for int parameter");
    Expr e;
    e.kind = Expr::Call;
    e.callee = name.text;
    e.type = sig.ret;
    e.pos = name.pos;
    e.args = std::move(args);
    return e;
  }

  Expr primary() {
    const Token& tk = peek();
    Pos p = tk.pos;
    if (tk.kind == Tok::Int) return Expr::lit(Rational(take().text), Type::Int, p);
    if (tk.kind == Tok::Real) return Expr::lit(*parse_rational(take().text), Type::Real, p);
    if (accept("true")) return Expr::lit(1, Type::Bool, p);
    if (accept("false")) return Expr::lit(0, Type::Bool, p);
    if (accept("(")) {
      Expr e = expression();
      expect(")");
      return e;
    }
    if (tk.kind == Tok::Ident && !is_reserved(tk.text) && at("(", 1)) return call();
    if (tk.kind == Tok::Ident && (tk.text == "nondet_int" || tk.text == "nondet_real")) return call();
    if (tk.kind == Tok::Ident && !is_reserved(tk.text)) {
      std::string name = take().text;
      int v = lookup(name, p);
      return Expr::variable(v, fn_->vars[v].type, p);
    }
    fail(tk, "expected expression");
  }
};

}  // namespace

Program parse(const std::string& source) {
  Parser p(lex(source));
  return p.run();
}

}  // namespace pagai
