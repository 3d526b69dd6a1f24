#pragma once

#include <map>
#include <string>
#include <vector>

#include "effcon/polynomial.hpp"

namespace effcon {

// Rational function num/den over Gaussian rationals. The denominator is monic
// under the monomial order and shares no monomial content with the numerator.
// Symbols that ever appeared in a denominator are kept as nonzero assumptions.
class ScalarExpr {
 public:
  ScalarExpr() : den_(1) {}
  ScalarExpr(const GaussianRational& c) : num_(c), den_(1) {}
  ScalarExpr(long c) : ScalarExpr(GaussianRational(c)) {}
  ScalarExpr(Polynomial p) : num_(std::move(p)), den_(1) {}
  static ScalarExpr var(Symbol s, std::uint32_t e = 1) { return ScalarExpr(Polynomial::var(s, e)); }
  static ScalarExpr fraction(Polynomial num, Polynomial den);
  static ScalarExpr frac(long n, long d) { return ScalarExpr(GaussianRational::frac(n, d)); }
  static ScalarExpr imag_unit() { return ScalarExpr(GaussianRational::i()); }

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  const std::vector<Symbol>& assumptions() const { return assume_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  GaussianRational constant_value() const;
  std::vector<Symbol> symbols() const;
  bool contains(Symbol s) const { return num_.contains(s) || den_.contains(s); }

  ScalarExpr& operator+=(const ScalarExpr& o);
  ScalarExpr& operator-=(const ScalarExpr& o);
  ScalarExpr& operator*=(const ScalarExpr& o);
  ScalarExpr& operator/=(const ScalarExpr& o);
  friend ScalarExpr operator+(ScalarExpr a, const ScalarExpr& b) { return a += b; }
  friend ScalarExpr operator-(ScalarExpr a, const ScalarExpr& b) { return a -= b; }
  friend ScalarExpr operator*(ScalarExpr a, const ScalarExpr& b) { return a *= b; }
  friend ScalarExpr operator/(ScalarExpr a, const ScalarExpr& b) { return a /= b; }
  ScalarExpr operator-() const;
  ScalarExpr pow(unsigned e) const;

  // Mathematical equality by cross-multiplication.
  friend bool operator==(const ScalarExpr& a, const ScalarExpr& b);
  friend bool operator!=(const ScalarExpr& a, const ScalarExpr& b) { return !(a == b); }

  void add_assumptions(const std::vector<Symbol>& syms);

 private:
  void normalize();

  Polynomial num_;
  Polynomial den_;
  std::vector<Symbol> assume_;
};

using Bindings = std::map<Symbol, ScalarExpr>;

ScalarExpr substitute(const ScalarExpr& e, const Bindings& b);
ScalarExpr partial_derivative(const ScalarExpr& e, Symbol s);

int grade(const Monomial& m, const SymbolTable& table);
// Drops terms of grade > n. Throws if a graded symbol sits in the denominator.
ScalarExpr truncate_by_grade(const ScalarExpr& e, int n, const SymbolTable& table);
Polynomial truncate_by_grade(const Polynomial& p, int n, const SymbolTable& table);
// Lowest grade among the numerator's terms; -1 for zero.
int min_grade(const ScalarExpr& e, const SymbolTable& table);

// Canonical text form and its parser.
std::string to_string(const ScalarExpr& e, const SymbolTable& table);
std::string to_string(const Polynomial& p, const SymbolTable& table);
ScalarExpr parse_expr(const std::string& text, const SymbolTable& table);

}  // namespace effcon
