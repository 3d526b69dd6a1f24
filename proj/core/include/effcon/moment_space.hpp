#pragma once

#include <map>
#include <shared_mutex>
#include <vector>

#include "effcon/weyl_algebra.hpp"

namespace effcon {

// Pruning applied while taking expectation values.
struct ExpectationLimit {
  // Drop centered monomials of degree above this (exact for grade truncation,
  // since such terms only produce grade > limit). Negative: no limit.
  int max_grade = -1;
  // Replace moments of order above this by 0. Negative: no limit.
  int max_moment_order = -1;
};

// Quantum phase space of expectation values and central Weyl moments over the
// pairs of a WeylAlgebra. Moment symbol G[a,b;...] stores, per pair, the momentum
// exponent a then the position exponent b.
class PhaseSpace {
 public:
  explicit PhaseSpace(const WeylAlgebra& alg) : alg_(&alg) {}

  const WeylAlgebra& algebra() const { return *alg_; }
  const SymbolTable& table() const { return alg_->table(); }
  int pairs() const { return alg_->pairs(); }

  // Moment of the Weyl-ordered centered product with the given (position, momentum)
  // exponents; 1 for order 0 and 0 for order 1.
  ScalarExpr moment(const NormalMonomial& weyl_exps) const;
  Symbol moment_symbol(const NormalMonomial& weyl_exps) const;
  NormalMonomial moment_exponents(Symbol moment) const;
  // Moment from display indices: per pair (momentum exponent, position exponent).
  ScalarExpr G(std::initializer_list<int> display) const;
  Symbol fsymbol(const NormalMonomial& m) const { return sym::fvar(m.e); }

  ScalarExpr expectation(const OperatorPoly& a, ExpectationLimit lim = {}) const;
  // Expectation of a single normal-ordered monomial as a polynomial in expectation
  // values, hbar and moments.
  const Polynomial& monomial_expectation(const NormalMonomial& m, ExpectationLimit lim = {}) const;

  ScalarExpr g_to_f(const ScalarExpr& e) const;
  ScalarExpr f_to_g(const ScalarExpr& e) const;

  // Generators with nonzero brackets: expectation values, moments and F-symbols.
  bool is_generator(Symbol s) const;
  std::vector<Symbol> generators(const ScalarExpr& e) const;

  ScalarExpr poisson_bracket(const ScalarExpr& a, const ScalarExpr& b) const;
  const ScalarExpr& generator_bracket(Symbol x, Symbol y) const;

  // Single-pair closed form for {G[a,b],G[c,d]} in display indices (pair 0).
  // Each (j,k) term of the hbar^2 series carries the weight j!*k!.
  ScalarExpr gbracket_closed_form(int a, int b, int c, int d) const;
  // The same sum without the j!*k! weights; differs from the bracket once j+k >= 3.
  ScalarExpr gbracket_closed_form_unweighted(int a, int b, int c, int d) const;

  ScalarExpr quantum_hamiltonian(const OperatorPoly& weyl_ordered_h, int n) const;
  std::map<Symbol, ScalarExpr> equations_of_motion(const ScalarExpr& hq, const std::vector<Symbol>& gens) const;

 private:
  ScalarExpr closed_form_impl(int a, int b, int c, int d, bool factorials) const;
  const ScalarExpr& centered_g_to_f(Symbol moment) const;
  const ScalarExpr& fbracket(Symbol fk, Symbol fl) const;
  const Polynomial& centered_expectation(const NormalMonomial& d) const;

  const WeylAlgebra* alg_;
  mutable std::shared_mutex mu_;
  mutable std::map<std::tuple<NormalMonomial, int, int>, Polynomial> mono_exp_;
  mutable std::map<NormalMonomial, Polynomial> centered_;
  mutable std::map<Symbol, ScalarExpr> g2f_;
  mutable std::map<std::pair<Symbol, Symbol>, ScalarExpr> fbr_;
  mutable std::map<std::pair<Symbol, Symbol>, ScalarExpr> gbr_;
};

}  // namespace effcon
