#pragma once

#include <boost/container/small_vector.hpp>

#include <cstdint>
#include <optional>
#include <vector>

#include "effcon/gaussian_rational.hpp"
#include "effcon/symbol.hpp"

namespace effcon {

struct VarPow {
  Symbol var;
  std::uint32_t exp;
  friend bool operator==(const VarPow&, const VarPow&) = default;
};

// Sparse commutative monomial, factors sorted by symbol code.
class Monomial {
 public:
  using Storage = boost::container::small_vector<VarPow, 4>;

  Monomial() = default;
  static Monomial var(Symbol s, std::uint32_t e = 1);

  const Storage& factors() const { return f_; }
  bool is_one() const { return f_.empty(); }
  std::uint32_t degree() const;
  std::uint32_t degree_in(Symbol s) const;
  bool divides(const Monomial& other) const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  // Requires divides(b, a).
  friend Monomial operator/(const Monomial& a, const Monomial& b);
  static Monomial gcd(const Monomial& a, const Monomial& b);
  Monomial without(Symbol s) const;

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.f_ == b.f_; }
  std::size_t hash() const;

  Storage& mutable_factors() { return f_; }

 private:
  Storage f_;
};

// Graded lexicographic order: returns <0, 0, >0. Larger monomials print first.
int compare(const Monomial& a, const Monomial& b);

struct Term {
  Monomial mono;
  GaussianRational coeff;
};

// Sparse polynomial with terms sorted in decreasing monomial order.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(const GaussianRational& c);
  Polynomial(long c) : Polynomial(GaussianRational(c)) {}
  static Polynomial var(Symbol s, std::uint32_t e = 1);
  static Polynomial term(Monomial m, GaussianRational c);
  // Terms in any order, duplicates allowed.
  static Polynomial from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].mono.is_one()); }
  bool is_monomial() const { return t_.size() == 1; }
  GaussianRational constant_term() const;
  const Term& leading() const { return t_.front(); }
  std::uint32_t degree_in(Symbol s) const;
  std::vector<Symbol> symbols() const;
  bool contains(Symbol s) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial operator-() const;
  Polynomial scaled(const GaussianRational& c) const;
  Polynomial times(const Monomial& m) const;
  // Requires that m divides every term.
  Polynomial divided(const Monomial& m) const;
  Polynomial pow(unsigned e) const;

  Monomial content_monomial() const;
  std::optional<Polynomial> exact_divide(const Polynomial& d) const;
  Polynomial derivative(Symbol s) const;
  // Coefficient of s^k, as a polynomial free of s.
  Polynomial coefficient(Symbol s, std::uint32_t k) const;

  friend bool operator==(const Polynomial& a, const Polynomial& b);
  std::size_t hash() const;

 private:
  std::vector<Term> t_;
};

}  // namespace effcon
