#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "effcon/scalar_expr.hpp"

namespace effcon {

// Ordered product prod_i qhat_i^{a_i} phat_i^{b_i}; slot 2i holds a_i, slot 2i+1 holds b_i.
struct NormalMonomial {
  Exponents e{};

  static NormalMonomial q(int pair, int a = 1);
  static NormalMonomial p(int pair, int b = 1);
  static NormalMonomial pq(int pair, int a, int b);

  int qexp(int pair) const { return e[2 * pair]; }
  int pexp(int pair) const { return e[2 * pair + 1]; }
  int degree() const { return sym::total(e); }
  bool is_one() const { return degree() == 0; }

  friend NormalMonomial operator*(const NormalMonomial& x, const NormalMonomial& y);
  friend bool operator==(const NormalMonomial& x, const NormalMonomial& y) { return x.e == y.e; }
  // Degree first, then exponents; only used for deterministic storage order.
  friend bool operator<(const NormalMonomial& x, const NormalMonomial& y);
};

class OperatorPoly {
 public:
  using Map = std::map<NormalMonomial, ScalarExpr>;

  OperatorPoly() = default;
  explicit OperatorPoly(int pairs) : pairs_(pairs) {}
  static OperatorPoly scalar(int pairs, const ScalarExpr& c);
  static OperatorPoly monomial(int pairs, const NormalMonomial& m, const ScalarExpr& c = ScalarExpr(1));

  int pairs() const { return pairs_; }
  const Map& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  int degree() const;
  ScalarExpr coefficient(const NormalMonomial& m) const;

  void add(const NormalMonomial& m, const ScalarExpr& c);
  OperatorPoly& operator+=(const OperatorPoly& o);
  OperatorPoly& operator-=(const OperatorPoly& o);
  friend OperatorPoly operator+(OperatorPoly a, const OperatorPoly& b) { return a += b; }
  friend OperatorPoly operator-(OperatorPoly a, const OperatorPoly& b) { return a -= b; }
  OperatorPoly operator-() const;
  OperatorPoly scaled(const ScalarExpr& c) const;
  OperatorPoly map_coefficients(const std::function<ScalarExpr(const ScalarExpr&)>& f) const;

  friend bool operator==(const OperatorPoly& a, const OperatorPoly& b);

 private:
  int pairs_ = 0;
  Map t_;
};

struct CanonicalPair {
  std::string position;
  std::string momentum;
  Symbol q;
  Symbol p;
};

// Canonical pairs with [qhat_i, phat_j] = i*hbar*delta_ij. Declares the expectation
// symbols and hbar in the given table. Memo tables are guarded for concurrent lookup.
class WeylAlgebra {
 public:
  WeylAlgebra(SymbolTable& table, const std::vector<std::pair<std::string, std::string>>& labels,
              const std::string& hbar = "hbar");

  int pairs() const { return static_cast<int>(pairs_.size()); }
  const CanonicalPair& pair(int i) const { return pairs_.at(i); }
  int pair_index(const std::string& label) const;
  Symbol hbar() const { return hbar_; }
  const SymbolTable& table() const { return *table_; }
  SymbolTable& table() { return *table_; }

  OperatorPoly one() const { return OperatorPoly::scalar(pairs(), ScalarExpr(1)); }
  OperatorPoly qhat(int i) const { return OperatorPoly::monomial(pairs(), NormalMonomial::q(i)); }
  OperatorPoly phat(int i) const { return OperatorPoly::monomial(pairs(), NormalMonomial::p(i)); }

  OperatorPoly mul(const OperatorPoly& a, const OperatorPoly& b) const;
  OperatorPoly pow(const OperatorPoly& a, unsigned n) const;

  // Coefficient of N(a-k,b-k) in the normal form of the single-pair Weyl product W(a,b),
  // as a multiple of hbar^k.
  const std::vector<GaussianRational>& weyl_to_normal(int a, int b) const;
  // Coefficient of W(a-k,b-k) in N(a,b), as a multiple of hbar^k.
  const std::vector<GaussianRational>& normal_to_weyl(int a, int b) const;

 private:
  struct Product {
    NormalMonomial mono;
    Polynomial coeff;  // polynomial in hbar
  };
  const std::vector<Product>& monomial_product(const NormalMonomial& x, const NormalMonomial& y) const;
  void check(const OperatorPoly& a) const;

  SymbolTable* table_;
  std::vector<CanonicalPair> pairs_;
  Symbol hbar_;

  mutable std::shared_mutex mu_;
  mutable std::map<std::pair<NormalMonomial, NormalMonomial>, std::vector<Product>> products_;
  mutable std::map<std::pair<int, int>, std::vector<GaussianRational>> w2n_, n2w_;
};

OperatorPoly op_mul(const WeylAlgebra& alg, const OperatorPoly& a, const OperatorPoly& b);
OperatorPoly commutator(const WeylAlgebra& alg, const OperatorPoly& a, const OperatorPoly& b);

// Totally symmetrized product of the given exponents (slot layout as NormalMonomial),
// built by the anticommutator recursion, peeling pair by pair, positions then momenta.
OperatorPoly weyl_monomial(const WeylAlgebra& alg, const NormalMonomial& exps);
// Same recursion with an explicit peel order: each entry is (pair, is_momentum).
OperatorPoly weyl_by_peel_order(const WeylAlgebra& alg, const std::vector<std::pair<int, bool>>& order);
// Weyl quantization of a polynomial in expectation symbols.
OperatorPoly weyl_quantize(const WeylAlgebra& alg, const ScalarExpr& classical);

// A in centered operators: the result's monomials stand for products of
// (qhat_i - q_i) and (phat_i - p_i), coefficients carry the expectation symbols.
OperatorPoly shift_by_expectations(const WeylAlgebra& alg, const OperatorPoly& a);
// Inverse of shift_by_expectations.
OperatorPoly unshift(const WeylAlgebra& alg, const OperatorPoly& centered);

// hbar -> 0 image as a commutative polynomial in the expectation symbols.
ScalarExpr classical_symbol(const WeylAlgebra& alg, const OperatorPoly& a);

// Operator text: sums of products of scalars, qhat(i), phat(i) (index or label);
// products are normal ordered on the fly.
OperatorPoly parse_operator(const WeylAlgebra& alg, const std::string& text);
std::string to_string(const WeylAlgebra& alg, const OperatorPoly& a);
std::string word_text(const WeylAlgebra& alg, const NormalMonomial& m);

}  // namespace effcon
