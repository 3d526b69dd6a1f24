#include "effcon/scalar_expr.hpp"

#include <algorithm>
#include <unordered_map>

#include "effcon/error.hpp"

namespace effcon {

namespace {

void merge_syms(std::vector<Symbol>& into, const std::vector<Symbol>& from) {
  if (from.empty()) return;
  std::vector<Symbol> out;
  std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(out));
  into.swap(out);
}

}  // namespace

ScalarExpr ScalarExpr::fraction(Polynomial num, Polynomial den) {
  ScalarExpr e;
  e.num_ = std::move(num);
  e.den_ = std::move(den);
  e.normalize();
  return e;
}

void ScalarExpr::normalize() {
  if (den_.is_zero()) throw Error("zero divisor");
  if (num_.is_zero()) {
    den_ = Polynomial(1);
    return;
  }
  if (den_.is_constant()) {
    GaussianRational c = den_.constant_term();
    if (!c.is_one()) {
      num_ = num_.scaled(c.inverse());
      den_ = Polynomial(1);
    }
    return;
  }
  merge_syms(assume_, den_.symbols());
  Monomial g = Monomial::gcd(num_.content_monomial(), den_.content_monomial());
  if (!g.is_one()) {
    num_ = num_.divided(g);
    den_ = den_.divided(g);
  }
  GaussianRational lc = den_.leading().coeff;
  if (!lc.is_one()) {
    GaussianRational inv = lc.inverse();
    num_ = num_.scaled(inv);
    den_ = den_.scaled(inv);
  }
  if (den_.is_monomial()) return;
  if (auto q = num_.exact_divide(den_)) {
    num_ = std::move(*q);
    den_ = Polynomial(1);
    return;
  }
  if (!num_.is_monomial()) {
    if (auto q = den_.exact_divide(num_)) {
      GaussianRational c = q->leading().coeff;
      num_ = Polynomial(c.inverse());
      den_ = q->scaled(c.inverse());
    }
  }
}

GaussianRational ScalarExpr::constant_value() const {
  if (!is_constant()) throw Error("expression is not constant");
  return num_.constant_term();
}

std::vector<Symbol> ScalarExpr::symbols() const {
  auto a = num_.symbols();
  merge_syms(a, den_.symbols());
  return a;
}

void ScalarExpr::add_assumptions(const std::vector<Symbol>& syms) { merge_syms(assume_, syms); }

ScalarExpr& ScalarExpr::operator+=(const ScalarExpr& o) {
  merge_syms(assume_, o.assume_);
  if (o.num_.is_zero()) return *this;
  if (num_.is_zero()) {
    num_ = o.num_;
    den_ = o.den_;
    return *this;
  }
  if (den_ == o.den_) {
    num_ += o.num_;
    if (!den_.is_constant()) normalize();
    return *this;
  }
  if (den_.is_monomial() && o.den_.is_monomial()) {
    const Monomial& a = den_.leading().mono;
    const Monomial& b = o.den_.leading().mono;
    Monomial g = Monomial::gcd(a, b);
    Monomial fa = b / g, fb = a / g;
    num_ = num_.times(fa) + o.num_.times(fb);
    den_ = Polynomial::term(a * fa, 1);
    normalize();
    return *this;
  }
  num_ = num_ * o.den_ + o.num_ * den_;
  den_ = den_ * o.den_;
  normalize();
  return *this;
}

ScalarExpr& ScalarExpr::operator-=(const ScalarExpr& o) { return *this += -o; }

ScalarExpr& ScalarExpr::operator*=(const ScalarExpr& o) {
  merge_syms(assume_, o.assume_);
  if (num_.is_zero() || o.num_.is_zero()) {
    num_ = Polynomial();
    den_ = Polynomial(1);
    return *this;
  }
  if (den_.is_constant() && o.den_.is_constant()) {
    num_ = num_ * o.num_;
    return *this;
  }
  Polynomial n1 = num_, d1 = den_, n2 = o.num_, d2 = o.den_;
  if (!d2.is_monomial())
    if (auto q = n1.exact_divide(d2)) {
      n1 = std::move(*q);
      d2 = Polynomial(1);
    }
  if (!d1.is_monomial())
    if (auto q = n2.exact_divide(d1)) {
      n2 = std::move(*q);
      d1 = Polynomial(1);
    }
  num_ = n1 * n2;
  den_ = d1 * d2;
  normalize();
  return *this;
}

ScalarExpr& ScalarExpr::operator/=(const ScalarExpr& o) {
  if (o.is_zero()) throw Error("zero divisor");
  ScalarExpr inv;
  inv.num_ = o.den_;
  inv.den_ = o.num_;
  inv.assume_ = o.assume_;
  inv.normalize();
  return *this *= inv;
}

ScalarExpr ScalarExpr::operator-() const {
  ScalarExpr r = *this;
  r.num_ = -r.num_;
  return r;
}

ScalarExpr ScalarExpr::pow(unsigned e) const {
  ScalarExpr r(1), b = *this;
  while (e) {
    if (e & 1) r *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return r;
}

bool operator==(const ScalarExpr& a, const ScalarExpr& b) {
  if (a.den_ == b.den_) return a.num_ == b.num_;
  return a.num_ * b.den_ == b.num_ * a.den_;
}

namespace {

// p(bindings) as num/den, clearing binding denominators by the maximal degree.
std::pair<Polynomial, Polynomial> subst_poly(const Polynomial& p, const Bindings& b,
                                             std::vector<Symbol>& assume) {
  std::vector<Symbol> bound;
  for (Symbol s : p.symbols())
    if (b.count(s)) bound.push_back(s);
  if (bound.empty()) return {p, Polynomial(1)};

  struct Powers {
    const ScalarExpr* val;
    std::uint32_t max_deg;
    std::vector<Polynomial> num_pow, den_pow;
  };
  std::unordered_map<Symbol, Powers> pw;
  Polynomial den(1);
  for (Symbol s : bound) {
    const ScalarExpr& v = b.at(s);
    merge_syms(assume, v.assumptions());
    Powers P{&v, p.degree_in(s), {Polynomial(1)}, {Polynomial(1)}};
    for (std::uint32_t k = 1; k <= P.max_deg; ++k) {
      P.num_pow.push_back(P.num_pow.back() * v.num());
      if (!v.den().is_constant()) P.den_pow.push_back(P.den_pow.back() * v.den());
    }
    if (!v.den().is_constant()) den = den * P.den_pow.back();
    pw.emplace(s, std::move(P));
  }

  std::vector<Term> plain;
  Polynomial acc;
  for (auto& t : p.terms()) {
    Monomial rest;
    Polynomial prod(t.coeff);
    bool any = false;
    for (auto& f : t.mono.factors()) {
      auto it = pw.find(f.var);
      if (it == pw.end()) {
        rest = rest * Monomial::var(f.var, f.exp);
        continue;
      }
      any = true;
      auto& P = it->second;
      prod = prod * P.num_pow[f.exp];
    }
    for (auto& [s, P] : pw) {
      if (P.den_pow.size() <= 1) continue;
      std::uint32_t k = P.max_deg - t.mono.degree_in(s);
      if (k) prod = prod * P.den_pow[k];
    }
    if (!any && den.is_constant()) {
      plain.push_back(t);
      continue;
    }
    acc += prod.times(rest);
  }
  if (!plain.empty()) acc += Polynomial::from_terms(std::move(plain));
  return {acc, den};
}

}  // namespace

ScalarExpr substitute(const ScalarExpr& e, const Bindings& b) {
  if (b.empty()) return e;
  std::vector<Symbol> assume = e.assumptions();
  auto [nn, nd] = subst_poly(e.num(), b, assume);
  ScalarExpr r;
  if (e.den().is_constant()) {
    r = ScalarExpr::fraction(std::move(nn), std::move(nd));
  } else {
    auto [dn, dd] = subst_poly(e.den(), b, assume);
    if (dn.is_zero()) throw Error("zero divisor");
    r = ScalarExpr::fraction(nn * dd, nd * dn);
  }
  r.add_assumptions(assume);
  return r;
}

ScalarExpr partial_derivative(const ScalarExpr& e, Symbol s) {
  ScalarExpr r;
  if (e.den().is_constant() || !e.den().contains(s)) {
    r = ScalarExpr::fraction(e.num().derivative(s), e.den());
  } else {
    r = ScalarExpr::fraction(e.num().derivative(s) * e.den() - e.num() * e.den().derivative(s),
                             e.den() * e.den());
  }
  r.add_assumptions(e.assumptions());
  return r;
}

int grade(const Monomial& m, const SymbolTable& table) {
  int g = 0;
  for (auto& f : m.factors()) g += table.grade(f.var) * static_cast<int>(f.exp);
  return g;
}

Polynomial truncate_by_grade(const Polynomial& p, int n, const SymbolTable& table) {
  std::vector<Term> keep;
  bool dropped = false;
  for (auto& t : p.terms()) {
    if (grade(t.mono, table) <= n) keep.push_back(t);
    else dropped = true;
  }
  if (!dropped) return p;
  return Polynomial::from_terms(std::move(keep));
}

ScalarExpr truncate_by_grade(const ScalarExpr& e, int n, const SymbolTable& table) {
  for (auto& t : e.den().terms())
    if (grade(t.mono, table) != 0) throw Error("non-polynomial in graded symbols");
  ScalarExpr r = ScalarExpr::fraction(truncate_by_grade(e.num(), n, table), e.den());
  r.add_assumptions(e.assumptions());
  return r;
}

int min_grade(const ScalarExpr& e, const SymbolTable& table) {
  int g = -1;
  for (auto& t : e.num().terms()) {
    int x = grade(t.mono, table);
    if (g < 0 || x < g) g = x;
  }
  return g;
}

}  // namespace effcon
