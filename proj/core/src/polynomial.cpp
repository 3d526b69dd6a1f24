#include "effcon/polynomial.hpp"

#include <algorithm>

#include "effcon/error.hpp"

namespace effcon {

Monomial Monomial::var(Symbol s, std::uint32_t e) {
  Monomial m;
  if (e) m.f_.push_back({s, e});
  return m;
}

std::uint32_t Monomial::degree() const {
  std::uint32_t d = 0;
  for (auto& f : f_) d += f.exp;
  return d;
}

std::uint32_t Monomial::degree_in(Symbol s) const {
  for (auto& f : f_)
    if (f.var == s) return f.exp;
  return 0;
}

bool Monomial::divides(const Monomial& o) const {
  std::size_t j = 0;
  for (auto& f : f_) {
    while (j < o.f_.size() && o.f_[j].var < f.var) ++j;
    if (j == o.f_.size() || o.f_[j].var != f.var || o.f_[j].exp < f.exp) return false;
  }
  return true;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.f_.reserve(a.f_.size() + b.f_.size());
  std::size_t i = 0, j = 0;
  while (i < a.f_.size() || j < b.f_.size()) {
    if (j == b.f_.size() || (i < a.f_.size() && a.f_[i].var < b.f_[j].var)) {
      r.f_.push_back(a.f_[i++]);
    } else if (i == a.f_.size() || b.f_[j].var < a.f_[i].var) {
      r.f_.push_back(b.f_[j++]);
    } else {
      r.f_.push_back({a.f_[i].var, a.f_[i].exp + b.f_[j].exp});
      ++i;
      ++j;
    }
  }
  return r;
}

Monomial operator/(const Monomial& a, const Monomial& b) {
  Monomial r;
  std::size_t j = 0;
  for (auto& f : a.f_) {
    std::uint32_t e = f.exp;
    if (j < b.f_.size() && b.f_[j].var == f.var) e -= b.f_[j++].exp;
    if (e) r.f_.push_back({f.var, e});
  }
  return r;
}

Monomial Monomial::gcd(const Monomial& a, const Monomial& b) {
  Monomial r;
  std::size_t j = 0;
  for (auto& f : a.f_) {
    while (j < b.f_.size() && b.f_[j].var < f.var) ++j;
    if (j < b.f_.size() && b.f_[j].var == f.var) r.f_.push_back({f.var, std::min(f.exp, b.f_[j].exp)});
  }
  return r;
}

Monomial Monomial::without(Symbol s) const {
  Monomial r;
  for (auto& f : f_)
    if (f.var != s) r.f_.push_back(f);
  return r;
}

std::size_t Monomial::hash() const {
  std::size_t h = 1469598103934665603ull;
  for (auto& f : f_) {
    h ^= f.var + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h ^= f.exp + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

int compare(const Monomial& a, const Monomial& b) {
  auto da = a.degree(), db = b.degree();
  if (da != db) return da < db ? -1 : 1;
  auto& fa = a.factors();
  auto& fb = b.factors();
  std::size_t n = std::min(fa.size(), fb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (fa[i].var != fb[i].var) return fa[i].var < fb[i].var ? 1 : -1;
    if (fa[i].exp != fb[i].exp) return fa[i].exp < fb[i].exp ? -1 : 1;
  }
  if (fa.size() == fb.size()) return 0;
  return fa.size() > fb.size() ? 1 : -1;
}

Polynomial::Polynomial(const GaussianRational& c) {
  if (!c.is_zero()) t_.push_back({Monomial(), c});
}

Polynomial Polynomial::var(Symbol s, std::uint32_t e) { return term(Monomial::var(s, e), 1); }

Polynomial Polynomial::term(Monomial m, GaussianRational c) {
  Polynomial p;
  if (!c.is_zero()) p.t_.push_back({std::move(m), std::move(c)});
  return p;
}

Polynomial Polynomial::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return compare(a.mono, b.mono) > 0; });
  Polynomial p;
  for (auto& t : terms) {
    if (!p.t_.empty() && p.t_.back().mono == t.mono) {
      p.t_.back().coeff += t.coeff;
    } else {
      if (!p.t_.empty() && p.t_.back().coeff.is_zero()) p.t_.pop_back();
      p.t_.push_back(std::move(t));
    }
  }
  if (!p.t_.empty() && p.t_.back().coeff.is_zero()) p.t_.pop_back();
  return p;
}

GaussianRational Polynomial::constant_term() const {
  if (!t_.empty() && t_.back().mono.is_one()) return t_.back().coeff;
  return 0;
}

std::uint32_t Polynomial::degree_in(Symbol s) const {
  std::uint32_t d = 0;
  for (auto& t : t_) d = std::max(d, t.mono.degree_in(s));
  return d;
}

std::vector<Symbol> Polynomial::symbols() const {
  std::vector<Symbol> out;
  for (auto& t : t_)
    for (auto& f : t.mono.factors()) out.push_back(f.var);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Polynomial::contains(Symbol s) const {
  for (auto& t : t_)
    if (t.mono.degree_in(s)) return true;
  return false;
}

static std::vector<Term> merge(const std::vector<Term>& a, const std::vector<Term>& b, bool negate_b) {
  std::vector<Term> r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int c;
    if (i == a.size()) c = -1;
    else if (j == b.size()) c = 1;
    else c = compare(a[i].mono, b[j].mono);
    if (c > 0) {
      r.push_back(a[i++]);
    } else if (c < 0) {
      r.push_back(b[j++]);
      if (negate_b) r.back().coeff = -r.back().coeff;
    } else {
      GaussianRational s = negate_b ? a[i].coeff - b[j].coeff : a[i].coeff + b[j].coeff;
      if (!s.is_zero()) r.push_back({a[i].mono, std::move(s)});
      ++i;
      ++j;
    }
  }
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.t_.empty()) return *this;
  t_ = merge(t_, o.t_, false);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.t_.empty()) return *this;
  t_ = merge(t_, o.t_, true);
  return *this;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  r.t_ = merge(a.t_, b.t_, false);
  return r;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  r.t_ = merge(a.t_, b.t_, true);
  return r;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.t_.empty() || b.t_.empty()) return {};
  if (a.t_.size() == 1) return b.times(a.t_[0].mono).scaled(a.t_[0].coeff);
  if (b.t_.size() == 1) return a.times(b.t_[0].mono).scaled(b.t_[0].coeff);
  std::vector<Term> prod;
  prod.reserve(a.t_.size() * b.t_.size());
  for (auto& x : a.t_)
    for (auto& y : b.t_) prod.push_back({x.mono * y.mono, x.coeff * y.coeff});
  return Polynomial::from_terms(std::move(prod));
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& t : r.t_) t.coeff = -t.coeff;
  return r;
}

Polynomial Polynomial::scaled(const GaussianRational& c) const {
  if (c.is_zero()) return {};
  Polynomial r = *this;
  if (c.is_one()) return r;
  for (auto& t : r.t_) t.coeff *= c;
  return r;
}

// Multiplying by a monomial preserves the term order.
Polynomial Polynomial::times(const Monomial& m) const {
  Polynomial r = *this;
  if (m.is_one()) return r;
  for (auto& t : r.t_) t.mono = t.mono * m;
  return r;
}

Polynomial Polynomial::divided(const Monomial& m) const {
  Polynomial r = *this;
  if (m.is_one()) return r;
  for (auto& t : r.t_) t.mono = t.mono / m;
  return r;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial r(1), b = *this;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

Monomial Polynomial::content_monomial() const {
  if (t_.empty()) return {};
  Monomial g = t_[0].mono;
  for (std::size_t i = 1; i < t_.size() && !g.is_one(); ++i) g = Monomial::gcd(g, t_[i].mono);
  return g;
}

std::optional<Polynomial> Polynomial::exact_divide(const Polynomial& d) const {
  if (d.is_zero()) throw Error("zero divisor");
  if (is_zero()) return Polynomial();
  for (Symbol s : d.symbols())
    if (degree_in(s) < d.degree_in(s)) return std::nullopt;
  const Term& ld = d.leading();
  GaussianRational inv = ld.coeff.inverse();
  Polynomial r = *this;
  std::vector<Term> q;
  while (!r.is_zero()) {
    const Term& lt = r.leading();
    if (!ld.mono.divides(lt.mono)) return std::nullopt;
    Term t{lt.mono / ld.mono, lt.coeff * inv};
    r -= d.times(t.mono).scaled(t.coeff);
    q.push_back(std::move(t));
  }
  Polynomial out;
  out.t_ = std::move(q);
  return out;
}

Polynomial Polynomial::derivative(Symbol s) const {
  std::vector<Term> r;
  for (auto& t : t_) {
    auto e = t.mono.degree_in(s);
    if (!e) continue;
    Monomial m = t.mono.without(s);
    if (e > 1) m = m * Monomial::var(s, e - 1);
    r.push_back({std::move(m), t.coeff * GaussianRational(static_cast<long>(e))});
  }
  return from_terms(std::move(r));
}

Polynomial Polynomial::coefficient(Symbol s, std::uint32_t k) const {
  std::vector<Term> r;
  for (auto& t : t_)
    if (t.mono.degree_in(s) == k) r.push_back({t.mono.without(s), t.coeff});
  return from_terms(std::move(r));
}

bool operator==(const Polynomial& a, const Polynomial& b) {
  if (a.t_.size() != b.t_.size()) return false;
  for (std::size_t i = 0; i < a.t_.size(); ++i)
    if (!(a.t_[i].mono == b.t_[i].mono) || !(a.t_[i].coeff == b.t_[i].coeff)) return false;
  return true;
}

std::size_t Polynomial::hash() const {
  std::size_t h = t_.size();
  for (auto& t : t_) h = h * 31 + t.mono.hash() * 7 + t.coeff.hash();
  return h;
}

}  // namespace effcon
