#pragma once

#include "pagai/rational.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace pagai {

struct Pos {
  int line = 0;
  int col = 0;
};

class SourceError : public std::runtime_error {
 public:
  SourceError(Pos p, const std::string& msg)
      : std::runtime_error(std::to_string(p.line) + ":" + std::to_string(p.col) + ": error: " + msg), pos(p) {}
  Pos pos;
};

enum class Type { Int, Real, Bool, Void };
std::string to_string(Type t);

enum class BinOp { Add, Sub, Mul, Div, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
std::string to_string(BinOp op);
bool is_comparison(BinOp op);

struct Expr {
  enum Kind { Lit, Var, Neg, Not, Bin, Call, Nondet };
  Kind kind = Lit;
  Type type = Type::Int;
  Pos pos;
  Rational value;        // Lit (bools are 0/1)
  int var = -1;          // Var: index into Function::vars
  BinOp op = BinOp::Add;
  std::string callee;    // Call
  std::vector<Expr> args;  // operands / call arguments

  static Expr lit(Rational v, Type t, Pos p = {});
  static Expr variable(int v, Type t, Pos p = {});
  static Expr binary(BinOp op, Expr a, Expr b, Type t, Pos p = {});
  static Expr nondet(Type t, Pos p = {});
};

struct Stmt {
  enum Kind { Decl, Assign, If, While, Break, Continue, Return, Assert, Assume, CallStmt, Block, Inlined };
  Kind kind = Block;
  Pos pos;
  int var = -1;                 // Decl / Assign target
  bool has_expr = false;        // Decl initializer, Return value
  Expr expr;                    // rhs, condition, return value, call
  std::vector<Stmt> body;       // If-then, While body, Block, Inlined
  std::vector<Stmt> orelse;     // If-else
  std::vector<Stmt> step;       // While: executed after body and on continue
  int target = -1;              // Return: enclosing Inlined id, -1 for the function itself
  int inline_id = -1;           // Inlined
  int ret_var = -1;             // Inlined: receives the callee's result (-1 for void)
  bool ret_havoc_on_fallthrough = false;  // Inlined: non-void callee falling off its end
};

struct VarDecl {
  std::string name;  // unique within the function
  Type type = Type::Int;
  Pos pos;
  bool param = false;
};

struct Function {
  std::string name;
  Type ret = Type::Int;
  Pos pos;
  std::vector<int> params;
  std::vector<VarDecl> vars;
  std::vector<Stmt> body;

  int add_var(std::string name, Type t, Pos p, bool param = false);
};

struct Program {
  std::vector<Function> functions;
  const Function* find(const std::string& name) const;
  Function* find(const std::string& name);
  const Function& main() const { return *find("main"); }
};

/// Parses and type-checks. Throws SourceError.
Program parse(const std::string& source);

/// Inlines non-recursive calls up to `depth` nested levels; the remaining
/// calls become nondeterministic values of the return type.
Program inline_calls(const Program& p, int depth);

/// Source-like rendering, mostly for diagnostics and tests.
std::string to_source(const Program& p);

}  // namespace pagai
