#include "effcon/weyl_algebra.hpp"

#include <cctype>

#include "effcon/error.hpp"

namespace effcon {

namespace {

mpz_class binom(unsigned n, unsigned k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

mpz_class factorial(unsigned n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

// (-i)^k
GaussianRational minus_i_pow(unsigned k) {
  switch (k % 4) {
    case 0: return 1;
    case 1: return {0, -1};
    case 2: return -1;
    default: return {0, 1};
  }
}

}  // namespace

NormalMonomial NormalMonomial::q(int pair, int a) { return pq(pair, a, 0); }
NormalMonomial NormalMonomial::p(int pair, int b) { return pq(pair, 0, b); }
NormalMonomial NormalMonomial::pq(int pair, int a, int b) {
  NormalMonomial m;
  m.e[2 * pair] = static_cast<std::uint8_t>(a);
  m.e[2 * pair + 1] = static_cast<std::uint8_t>(b);
  return m;
}

NormalMonomial operator*(const NormalMonomial& x, const NormalMonomial& y) {
  NormalMonomial r;
  for (std::size_t j = 0; j < r.e.size(); ++j) r.e[j] = static_cast<std::uint8_t>(x.e[j] + y.e[j]);
  return r;
}

bool operator<(const NormalMonomial& x, const NormalMonomial& y) {
  int dx = x.degree(), dy = y.degree();
  if (dx != dy) return dx < dy;
  return x.e < y.e;
}

OperatorPoly OperatorPoly::scalar(int pairs, const ScalarExpr& c) {
  return monomial(pairs, NormalMonomial{}, c);
}

OperatorPoly OperatorPoly::monomial(int pairs, const NormalMonomial& m, const ScalarExpr& c) {
  OperatorPoly r(pairs);
  r.add(m, c);
  return r;
}

int OperatorPoly::degree() const {
  int d = 0;
  for (auto& [m, c] : t_) d = std::max(d, m.degree());
  return d;
}

ScalarExpr OperatorPoly::coefficient(const NormalMonomial& m) const {
  auto it = t_.find(m);
  return it == t_.end() ? ScalarExpr(0) : it->second;
}

void OperatorPoly::add(const NormalMonomial& m, const ScalarExpr& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = t_.emplace(m, c);
  if (fresh) return;
  it->second += c;
  if (it->second.is_zero()) t_.erase(it);
}

OperatorPoly& OperatorPoly::operator+=(const OperatorPoly& o) {
  if (pairs_ == 0) pairs_ = o.pairs_;
  if (o.pairs_ && o.pairs_ != pairs_) throw Error("mismatched pair tables");
  for (auto& [m, c] : o.t_) add(m, c);
  return *this;
}

OperatorPoly& OperatorPoly::operator-=(const OperatorPoly& o) { return *this += -o; }

OperatorPoly OperatorPoly::operator-() const {
  OperatorPoly r(pairs_);
  for (auto& [m, c] : t_) r.t_.emplace(m, -c);
  return r;
}

OperatorPoly OperatorPoly::scaled(const ScalarExpr& c) const {
  OperatorPoly r(pairs_);
  if (c.is_zero()) return r;
  for (auto& [m, x] : t_) r.add(m, x * c);
  return r;
}

OperatorPoly OperatorPoly::map_coefficients(const std::function<ScalarExpr(const ScalarExpr&)>& f) const {
  OperatorPoly r(pairs_);
  for (auto& [m, x] : t_) r.add(m, f(x));
  return r;
}

bool operator==(const OperatorPoly& a, const OperatorPoly& b) {
  if (a.t_.size() != b.t_.size()) return false;
  auto i = a.t_.begin();
  for (auto j = b.t_.begin(); j != b.t_.end(); ++i, ++j)
    if (!(i->first == j->first) || i->second != j->second) return false;
  return true;
}

WeylAlgebra::WeylAlgebra(SymbolTable& table, const std::vector<std::pair<std::string, std::string>>& labels,
                         const std::string& hbar)
    : table_(&table) {
  if (labels.empty() || static_cast<int>(labels.size()) > kMaxPairs)
    throw Error("between 1 and " + std::to_string(kMaxPairs) + " canonical pairs are supported");
  table.set_pairs(static_cast<int>(labels.size()));
  for (auto& [qn, pn] : labels) {
    CanonicalPair cp{qn, pn, table.declare(qn, SymbolKind::expectation),
                     table.declare(pn, SymbolKind::expectation)};
    pairs_.push_back(cp);
  }
  hbar_ = table.find(hbar).value_or(0);
  if (!table.find(hbar)) hbar_ = table.declare(hbar, SymbolKind::parameter, 2);
}

int WeylAlgebra::pair_index(const std::string& label) const {
  for (int i = 0; i < pairs(); ++i)
    if (pairs_[i].position == label || pairs_[i].momentum == label) return i;
  if (!label.empty() && std::all_of(label.begin(), label.end(), [](char c) { return std::isdigit(c); })) {
    int i = std::stoi(label);
    if (i < pairs()) return i;
  }
  throw Error("unknown pair '" + label + "'");
}

void WeylAlgebra::check(const OperatorPoly& a) const {
  if (a.pairs() != 0 && a.pairs() != pairs()) throw Error("mismatched pair tables");
}

const std::vector<WeylAlgebra::Product>& WeylAlgebra::monomial_product(const NormalMonomial& x,
                                                                     const NormalMonomial& y) const {
  auto key = std::make_pair(x, y);
  {
    std::shared_lock lock(mu_);
    auto it = products_.find(key);
    if (it != products_.end()) return it->second;
  }
  struct Partial {
    NormalMonomial mono;
    GaussianRational c;
    unsigned k;
  };
  std::vector<Partial> acc{{NormalMonomial{}, 1, 0}};
  for (int i = 0; i < pairs(); ++i) {
    unsigned a1 = x.qexp(i), b1 = x.pexp(i), a2 = y.qexp(i), b2 = y.pexp(i);
    std::vector<Partial> next;
    for (unsigned k = 0; k <= std::min(b1, a2); ++k) {
      GaussianRational c(mpq_class(factorial(k) * binom(b1, k) * binom(a2, k)));
      c *= minus_i_pow(k);
      NormalMonomial m = NormalMonomial::pq(i, a1 + a2 - k, b1 + b2 - k);
      for (auto& p : acc) next.push_back({p.mono * m, p.c * c, p.k + k});
    }
    acc.swap(next);
  }
  std::map<NormalMonomial, std::vector<Term>> grouped;
  for (auto& p : acc) grouped[p.mono].push_back({Monomial::var(hbar_, p.k), p.c});
  std::vector<Product> out;
  for (auto& [m, terms] : grouped) out.push_back({m, Polynomial::from_terms(std::move(terms))});
  std::unique_lock lock(mu_);
  return products_.emplace(key, std::move(out)).first->second;
}

OperatorPoly WeylAlgebra::mul(const OperatorPoly& a, const OperatorPoly& b) const {
  check(a);
  check(b);
  OperatorPoly r(pairs());
  for (auto& [m1, c1] : a.terms())
    for (auto& [m2, c2] : b.terms()) {
      ScalarExpr c12 = c1 * c2;
      for (auto& pr : monomial_product(m1, m2)) r.add(pr.mono, c12 * ScalarExpr(pr.coeff));
    }
  return r;
}

OperatorPoly WeylAlgebra::pow(const OperatorPoly& a, unsigned n) const {
  OperatorPoly r = one();
  for (unsigned k = 0; k < n; ++k) r = mul(r, a);
  return r;
}

const std::vector<GaussianRational>& WeylAlgebra::weyl_to_normal(int a, int b) const {
  auto key = std::make_pair(a, b);
  {
    std::shared_lock lock(mu_);
    auto it = w2n_.find(key);
    if (it != w2n_.end()) return it->second;
  }
  std::vector<std::pair<int, bool>> order;
  for (int k = 0; k < a; ++k) order.push_back({0, false});
  for (int k = 0; k < b; ++k) order.push_back({0, true});
  OperatorPoly w = weyl_by_peel_order(*this, order);
  std::vector<GaussianRational> out;
  for (int k = 0; k <= std::min(a, b); ++k) {
    ScalarExpr c = w.coefficient(NormalMonomial::pq(0, a - k, b - k));
    out.push_back(c.is_zero() ? GaussianRational(0) : c.num().leading().coeff);
  }
  std::unique_lock lock(mu_);
  return w2n_.emplace(key, std::move(out)).first->second;
}

const std::vector<GaussianRational>& WeylAlgebra::normal_to_weyl(int a, int b) const {
  auto key = std::make_pair(a, b);
  {
    std::shared_lock lock(mu_);
    auto it = n2w_.find(key);
    if (it != n2w_.end()) return it->second;
  }
  const auto& w = weyl_to_normal(a, b);
  int top = std::min(a, b);
  std::vector<GaussianRational> v(top + 1);
  v[0] = 1;
  for (int m = 1; m <= top; ++m) {
    GaussianRational s;
    for (int k = 1; k <= m; ++k) {
      const auto& lower = normal_to_weyl(a - k, b - k);
      s -= w[k] * lower[m - k];
    }
    v[m] = s;
  }
  std::unique_lock lock(mu_);
  return n2w_.emplace(key, std::move(v)).first->second;
}

OperatorPoly op_mul(const WeylAlgebra& alg, const OperatorPoly& a, const OperatorPoly& b) {
  return alg.mul(a, b);
}

OperatorPoly commutator(const WeylAlgebra& alg, const OperatorPoly& a, const OperatorPoly& b) {
  return alg.mul(a, b) - alg.mul(b, a);
}

OperatorPoly weyl_by_peel_order(const WeylAlgebra& alg, const std::vector<std::pair<int, bool>>& order) {
  OperatorPoly w = alg.one();
  ScalarExpr half = ScalarExpr::frac(1, 2);
  for (auto [pair, momentum] : order) {
    OperatorPoly x = momentum ? alg.phat(pair) : alg.qhat(pair);
    w = (alg.mul(w, x) + alg.mul(x, w)).scaled(half);
  }
  return w;
}

OperatorPoly weyl_monomial(const WeylAlgebra& alg, const NormalMonomial& exps) {
  OperatorPoly w = alg.one();
  for (int i = 0; i < alg.pairs(); ++i) {
    int a = exps.qexp(i), b = exps.pexp(i);
    if (a + b == 0) continue;
    const auto& coeffs = alg.weyl_to_normal(a, b);
    OperatorPoly wi(alg.pairs());
    for (int k = 0; k < static_cast<int>(coeffs.size()); ++k)
      wi.add(NormalMonomial::pq(i, a - k, b - k), ScalarExpr(Polynomial::term(Monomial::var(alg.hbar(), k), coeffs[k])));
    w = alg.mul(w, wi);
  }
  return w;
}

OperatorPoly weyl_quantize(const WeylAlgebra& alg, const ScalarExpr& classical) {
  std::vector<Symbol> expect;
  for (int i = 0; i < alg.pairs(); ++i) {
    expect.push_back(alg.pair(i).q);
    expect.push_back(alg.pair(i).p);
  }
  for (Symbol s : expect)
    if (classical.den().contains(s)) throw Error("weyl_quantize needs a polynomial in expectation values");
  OperatorPoly out(alg.pairs());
  for (auto& t : classical.num().terms()) {
    NormalMonomial exps;
    Monomial rest;
    for (auto& f : t.mono.factors()) {
      if (sym::is_moment(f.var) || sym::is_fvar(f.var)) throw Error("moment symbol in classical expression");
      bool placed = false;
      for (int i = 0; i < alg.pairs(); ++i) {
        if (f.var == alg.pair(i).q) exps.e[2 * i] = static_cast<std::uint8_t>(f.exp), placed = true;
        if (f.var == alg.pair(i).p) exps.e[2 * i + 1] = static_cast<std::uint8_t>(f.exp), placed = true;
      }
      if (!placed) rest = rest * Monomial::var(f.var, f.exp);
    }
    ScalarExpr c = ScalarExpr::fraction(Polynomial::term(rest, t.coeff), classical.den());
    out += weyl_monomial(alg, exps).scaled(c);
  }
  return out;
}

namespace {

OperatorPoly shift_impl(const WeylAlgebra& alg, const OperatorPoly& a, bool inverse) {
  OperatorPoly out(alg.pairs());
  for (auto& [m, c] : a.terms()) {
    std::vector<std::pair<NormalMonomial, Polynomial>> acc{{NormalMonomial{}, Polynomial(1)}};
    for (int i = 0; i < alg.pairs(); ++i) {
      unsigned qa = m.qexp(i), pb = m.pexp(i);
      if (qa + pb == 0) continue;
      std::vector<std::pair<NormalMonomial, Polynomial>> next;
      for (unsigned x = 0; x <= qa; ++x)
        for (unsigned y = 0; y <= pb; ++y) {
          GaussianRational cf(mpq_class(binom(qa, x) * binom(pb, y)));
          if (inverse && ((qa - x + pb - y) % 2)) cf = -cf;
          Monomial mono = Monomial::var(alg.pair(i).q, qa - x) * Monomial::var(alg.pair(i).p, pb - y);
          Polynomial f = Polynomial::term(mono, cf);
          NormalMonomial d = NormalMonomial::pq(i, x, y);
          for (auto& [dm, dc] : acc) next.push_back({dm * d, dc * f});
        }
      acc.swap(next);
    }
    for (auto& [dm, dc] : acc) out.add(dm, c * ScalarExpr(dc));
  }
  return out;
}

}  // namespace

OperatorPoly shift_by_expectations(const WeylAlgebra& alg, const OperatorPoly& a) {
  return shift_impl(alg, a, false);
}

OperatorPoly unshift(const WeylAlgebra& alg, const OperatorPoly& centered) {
  return shift_impl(alg, centered, true);
}

ScalarExpr classical_symbol(const WeylAlgebra& alg, const OperatorPoly& a) {
  ScalarExpr out;
  Bindings zero{{alg.hbar(), ScalarExpr(0)}};
  for (auto& [m, c] : a.terms()) {
    Monomial mono;
    for (int i = 0; i < alg.pairs(); ++i)
      mono = mono * Monomial::var(alg.pair(i).q, m.qexp(i)) * Monomial::var(alg.pair(i).p, m.pexp(i));
    out += substitute(c, zero) * ScalarExpr(Polynomial::term(mono, 1));
  }
  return out;
}

namespace {

class OpParser {
 public:
  OpParser(const std::string& s, const WeylAlgebra& alg) : s_(s), alg_(alg) {}

  OperatorPoly parse() {
    OperatorPoly e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("operator parse error at " + std::to_string(pos_) + " in '" + s_ + "': " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  OperatorPoly scalar(const ScalarExpr& c) const { return OperatorPoly::scalar(alg_.pairs(), c); }
  OperatorPoly expr() {
    OperatorPoly e = term();
    for (;;) {
      if (eat('+')) e += term();
      else if (eat('-')) e -= term();
      else return e;
    }
  }
  OperatorPoly term() {
    OperatorPoly e = unary();
    for (;;) {
      if (eat('*')) {
        e = alg_.mul(e, unary());
      } else if (eat('/')) {
        OperatorPoly d = unary();
        if (d.terms().size() != 1 || !d.terms().begin()->first.is_one()) fail("division by an operator");
        e = e.scaled(ScalarExpr(1) / d.terms().begin()->second);
      } else {
        return e;
      }
    }
  }
  OperatorPoly unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    OperatorPoly b = atom();
    if (eat('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      return alg_.pow(b, static_cast<unsigned>(std::stoul(s_.substr(start, pos_ - start))));
    }
    return b;
  }
  OperatorPoly atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      OperatorPoly e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return scalar(ScalarExpr(GaussianRational(mpq_class(mpz_class(s_.substr(start, pos_ - start))))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      if (id == "qhat" || id == "phat") {
        if (!eat('(')) fail("expected '('");
        skip();
        std::size_t a = pos_;
        while (pos_ < s_.size() && s_[pos_] != ')') ++pos_;
        std::string label = s_.substr(a, pos_ - a);
        while (!label.empty() && std::isspace(static_cast<unsigned char>(label.back()))) label.pop_back();
        if (!eat(')')) fail("expected ')'");
        int i;
        try {
          i = alg_.pair_index(label);
        } catch (const Error&) {
          fail("unknown pair '" + label + "'");
        }
        return id == "qhat" ? alg_.qhat(i) : alg_.phat(i);
      }
      if (auto s = alg_.table().find(id)) return scalar(ScalarExpr::var(*s));
      if (id == "i") return scalar(ScalarExpr::imag_unit());
      fail("unknown symbol '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  const WeylAlgebra& alg_;
  std::size_t pos_ = 0;
};

}  // namespace

OperatorPoly parse_operator(const WeylAlgebra& alg, const std::string& text) {
  return OpParser(text, alg).parse();
}

std::string word_text(const WeylAlgebra& alg, const NormalMonomial& m) {
  std::string s;
  for (int i = 0; i < alg.pairs(); ++i) {
    auto put = [&](const std::string& name, int e) {
      if (!e) return;
      if (!s.empty()) s += "*";
      s += name;
      if (e > 1) s += "^" + std::to_string(e);
    };
    put(alg.pair(i).position, m.qexp(i));
    put(alg.pair(i).momentum, m.pexp(i));
  }
  return s.empty() ? "1" : s;
}

std::string to_string(const WeylAlgebra& alg, const OperatorPoly& a) {
  if (a.is_zero()) return "0";
  std::string out;
  for (auto it = a.terms().rbegin(); it != a.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    std::string factors;
    for (int i = 0; i < alg.pairs(); ++i) {
      auto put = [&](const char* op, int e) {
        if (!e) return;
        if (!factors.empty()) factors += "*";
        factors += std::string(op) + "(" + std::to_string(i) + ")";
        if (e > 1) factors += "^" + std::to_string(e);
      };
      put("qhat", m.qexp(i));
      put("phat", m.pexp(i));
    }
    std::string cs = to_string(c, alg.table());
    bool neg = false;
    std::string term;
    if (factors.empty()) {
      term = "(" + cs + ")";
    } else if (c == ScalarExpr(1)) {
      term = factors;
    } else if (c == ScalarExpr(-1)) {
      term = factors;
      neg = true;
    } else {
      term = "(" + cs + ")*" + factors;
    }
    if (out.empty()) out = neg ? "-" + term : term;
    else out += (neg ? " - " : " + ") + term;
  }
  return out;
}

}  // namespace effcon
