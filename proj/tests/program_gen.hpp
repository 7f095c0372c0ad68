#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace pagai::testing {

/// Random terminating programs in the mini language: bounded for-loops,
/// nested conditionals with short-circuit conditions, helper calls outside
/// conditions, nonlinear products and divisions, asserts and assumes.
class ProgramGen {
 public:
  explicit ProgramGen(unsigned seed) : rng_(seed) {}

  std::string generate() {
    std::ostringstream os;
    os << "int helper(int a, int b) {\n  if (a < b) return a + 1;\n  int c = a - b;\n  return 2 * c - b;\n}\n";
    os << "int twice(int a) {\n  return helper(a, a) + a;\n}\n";
    os << "int main(int p) {\n";
    vars_ = {"p"};
    os << "  assume(p >= -4 && p <= 4);\n";
    int n = 2 + pick(3);
    for (int k = 0; k < n; ++k) {
      std::string v = "v" + std::to_string(k);
      os << "  int " << v << " = " << (pick(3) == 0 ? "nondet_int()" : linear()) << ";\n";
      vars_.push_back(v);
    }
    block(os, 1, 3 + pick(4), 0);
    os << "  return " << linear() << ";\n}\n";
    return os.str();
  }

 private:
  std::mt19937 rng_;
  std::vector<std::string> vars_;
  int loop_id_ = 0;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::string var() { return vars_[static_cast<std::size_t>(pick(static_cast<int>(vars_.size())))]; }
  std::string num() { return std::to_string(pick(7) - 3); }

  std::string linear() {
    std::string e = var();
    int terms = pick(3);
    for (int k = 0; k < terms; ++k) {
      int c = pick(4);
      std::string t = c == 0 ? num() : (c == 1 ? var() : num() + " * " + var());
      e += (pick(2) ? " + " : " - ") + t;
    }
    return e;
  }

  std::string expr() {
    switch (pick(8)) {
      case 0: return var() + " * " + var();
      case 1: return "(" + linear() + ") / " + std::to_string(pick(3) + 2);
      case 2: return var() + " / " + var();
      case 3: return "helper(" + var() + ", " + linear() + ")";
      case 4: return "twice(" + var() + ") - " + var();
      default: return linear();
    }
  }

  std::string atom() {
    static const char* ops[] = {"<", "<=", ">", ">=", "==", "!="};
    return var() + " " + ops[pick(6)] + " " + (pick(2) ? num() : linear());
  }

  std::string cond(int depth = 0) {
    int c = depth > 1 ? 0 : pick(5);
    if (c == 1) return "(" + cond(depth + 1) + " && " + cond(depth + 1) + ")";
    if (c == 2) return "(" + cond(depth + 1) + " || " + cond(depth + 1) + ")";
    if (c == 3) return "!(" + atom() + ")";
    return atom();
  }

  void block(std::ostringstream& os, int ind, int n, int loops) {
    std::string pad(static_cast<std::size_t>(ind) * 2, ' ');
    for (int k = 0; k < n; ++k) {
      int kind = pick(10);
      if (kind <= 3) {
        os << pad << var() << " = " << expr() << ";\n";
      } else if (kind <= 5 && ind < 4) {
        os << pad << "if (" << cond() << ") {\n";
        block(os, ind + 1, 1 + pick(3), loops);
        if (pick(2)) {
          os << pad << "} else {\n";
          block(os, ind + 1, 1 + pick(2), loops);
        }
        os << pad << "}\n";
      } else if (kind == 6 && ind < 3) {
        std::string i = "i" + std::to_string(loop_id_++);
        os << pad << "for (int " << i << " = 0; " << i << " < " << (1 + pick(4)) << "; " << i << "++) {\n";
        block(os, ind + 1, 1 + pick(3), loops + 1);
        os << pad << "}\n";
      } else if (kind == 7 && loops > 0) {
        os << pad << "if (" << atom() << ") " << (pick(2) ? "break;" : "continue;") << "\n";
      } else if (kind == 8) {
        os << pad << (pick(3) == 0 ? "assume(" : "assert(") << cond() << ");\n";
      } else {
        os << pad << var() << " = " << var() << " + " << num() << ";\n";
      }
    }
  }
};

}  // namespace pagai::testing
