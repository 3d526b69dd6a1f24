#include "effcon/moment_space.hpp"

#include "effcon/error.hpp"

namespace effcon {

namespace {

mpz_class binom(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

template <class K, class V, class F>
const V& memo(std::shared_mutex& mu, std::map<K, V>& table, const K& key, F compute) {
  {
    std::shared_lock lock(mu);
    auto it = table.find(key);
    if (it != table.end()) return it->second;
  }
  V value = compute();
  std::unique_lock lock(mu);
  return table.emplace(key, std::move(value)).first->second;
}

}  // namespace

Symbol PhaseSpace::moment_symbol(const NormalMonomial& w) const {
  Exponents d{};
  for (int i = 0; i < kMaxPairs; ++i) {
    d[2 * i] = w.e[2 * i + 1];
    d[2 * i + 1] = w.e[2 * i];
  }
  return sym::moment(d);
}

NormalMonomial PhaseSpace::moment_exponents(Symbol s) const {
  Exponents d = sym::unpack(s);
  NormalMonomial w;
  for (int i = 0; i < kMaxPairs; ++i) {
    w.e[2 * i] = d[2 * i + 1];
    w.e[2 * i + 1] = d[2 * i];
  }
  return w;
}

ScalarExpr PhaseSpace::moment(const NormalMonomial& w) const {
  int d = w.degree();
  if (d == 0) return ScalarExpr(1);
  if (d == 1) return ScalarExpr(0);
  return ScalarExpr::var(moment_symbol(w));
}

ScalarExpr PhaseSpace::G(std::initializer_list<int> display) const {
  NormalMonomial w;
  int k = 0;
  for (int v : display) {
    if (k >= 2 * pairs()) throw Error("too many moment indices");
    w.e[(k % 2 == 0) ? k + 1 : k - 1] = static_cast<std::uint8_t>(v);
    ++k;
  }
  return moment(w);
}

const Polynomial& PhaseSpace::centered_expectation(const NormalMonomial& dm) const {
  return memo(mu_, centered_, dm, [&] {
    struct Partial {
      NormalMonomial w;
      GaussianRational c;
      unsigned k;
    };
    std::vector<Partial> acc{{NormalMonomial{}, 1, 0}};
    for (int i = 0; i < pairs(); ++i) {
      int x = dm.qexp(i), y = dm.pexp(i);
      if (x + y == 0) continue;
      const auto& v = alg_->normal_to_weyl(x, y);
      std::vector<Partial> next;
      for (int k = 0; k < static_cast<int>(v.size()); ++k) {
        if (v[k].is_zero()) continue;
        NormalMonomial part = NormalMonomial::pq(i, x - k, y - k);
        for (auto& p : acc) next.push_back({p.w * part, p.c * v[k], p.k + k});
      }
      acc.swap(next);
    }
    std::vector<Term> terms;
    for (auto& p : acc) {
      int d = p.w.degree();
      if (d == 1) continue;
      Monomial m = Monomial::var(alg_->hbar(), p.k);
      if (d >= 2) m = m * Monomial::var(moment_symbol(p.w));
      terms.push_back({m, p.c});
    }
    return Polynomial::from_terms(std::move(terms));
  });
}

const Polynomial& PhaseSpace::monomial_expectation(const NormalMonomial& m, ExpectationLimit lim) const {
  auto key = std::make_tuple(m, lim.max_grade, lim.max_moment_order);
  return memo(mu_, mono_exp_, key, [&] {
    struct Partial {
      NormalMonomial d;
      Polynomial c;
    };
    std::vector<Partial> acc{{NormalMonomial{}, Polynomial(1)}};
    for (int i = 0; i < pairs(); ++i) {
      int qa = m.qexp(i), pb = m.pexp(i);
      if (qa + pb == 0) continue;
      std::vector<Partial> next;
      for (auto& p : acc)
        for (int x = 0; x <= qa; ++x)
          for (int y = 0; y <= pb; ++y) {
            if (lim.max_grade >= 0 && p.d.degree() + x + y > lim.max_grade) continue;
            Monomial mono = Monomial::var(alg_->pair(i).q, qa - x) * Monomial::var(alg_->pair(i).p, pb - y);
            GaussianRational cf(mpq_class(binom(qa, x) * binom(pb, y)));
            next.push_back({p.d * NormalMonomial::pq(i, x, y), p.c * Polynomial::term(mono, cf)});
          }
      acc.swap(next);
    }
    Polynomial out;
    for (auto& p : acc) {
      const Polynomial& ce = centered_expectation(p.d);
      if (lim.max_moment_order >= 0) {
        std::vector<Term> kept;
        for (auto& t : ce.terms()) {
          bool ok = true;
          for (auto& f : t.mono.factors())
            if (sym::is_moment(f.var) && sym::order(f.var) > lim.max_moment_order) ok = false;
          if (ok) kept.push_back(t);
        }
        out += p.c * Polynomial::from_terms(std::move(kept));
      } else {
        out += p.c * ce;
      }
    }
    return out;
  });
}

ScalarExpr PhaseSpace::expectation(const OperatorPoly& a, ExpectationLimit lim) const {
  if (a.pairs() != 0 && a.pairs() != pairs()) throw Error("mismatched pair tables");
  ScalarExpr out;
  Polynomial poly_part;
  for (auto& [m, c] : a.terms()) {
    const Polynomial& e = monomial_expectation(m, lim);
    if (c.is_polynomial()) poly_part += c.num() * e;
    else out += c * ScalarExpr(e);
  }
  return out + ScalarExpr(poly_part);
}

bool PhaseSpace::is_generator(Symbol s) const {
  if (sym::is_moment(s) || sym::is_fvar(s)) return true;
  return table().kind(s) == SymbolKind::expectation;
}

std::vector<Symbol> PhaseSpace::generators(const ScalarExpr& e) const {
  std::vector<Symbol> out;
  for (Symbol s : e.symbols())
    if (is_generator(s)) out.push_back(s);
  return out;
}

const ScalarExpr& PhaseSpace::centered_g_to_f(Symbol g) const {
  return memo(mu_, g2f_, g, [&] {
    OperatorPoly w = weyl_monomial(*alg_, moment_exponents(g));
    OperatorPoly plain = unshift(*alg_, w);
    Bindings to_f;
    for (int i = 0; i < pairs(); ++i) {
      to_f.emplace(alg_->pair(i).q, ScalarExpr::var(fsymbol(NormalMonomial::q(i))));
      to_f.emplace(alg_->pair(i).p, ScalarExpr::var(fsymbol(NormalMonomial::p(i))));
    }
    ScalarExpr out;
    for (auto& [m, c] : plain.terms()) {
      ScalarExpr f = m.is_one() ? ScalarExpr(1) : ScalarExpr::var(fsymbol(m));
      out += substitute(c, to_f) * f;
    }
    return out;
  });
}

ScalarExpr PhaseSpace::g_to_f(const ScalarExpr& e) const {
  Bindings b;
  for (Symbol s : e.symbols()) {
    if (sym::is_moment(s)) {
      b.emplace(s, centered_g_to_f(s));
    } else if (sym::is_declared(s) && table().kind(s) == SymbolKind::expectation) {
      for (int i = 0; i < pairs(); ++i) {
        if (alg_->pair(i).q == s) b.emplace(s, ScalarExpr::var(fsymbol(NormalMonomial::q(i))));
        if (alg_->pair(i).p == s) b.emplace(s, ScalarExpr::var(fsymbol(NormalMonomial::p(i))));
      }
    }
  }
  return substitute(e, b);
}

ScalarExpr PhaseSpace::f_to_g(const ScalarExpr& e) const {
  Bindings b;
  for (Symbol s : e.symbols()) {
    if (!sym::is_fvar(s)) continue;
    NormalMonomial m;
    m.e = sym::unpack(s);
    b.emplace(s, ScalarExpr(monomial_expectation(m)));
  }
  return substitute(e, b);
}

const ScalarExpr& PhaseSpace::fbracket(Symbol fk, Symbol fl) const {
  return memo(mu_, fbr_, std::make_pair(fk, fl), [&] {
    NormalMonomial k, l;
    k.e = sym::unpack(fk);
    l.e = sym::unpack(fl);
    OperatorPoly c = commutator(*alg_, OperatorPoly::monomial(pairs(), k), OperatorPoly::monomial(pairs(), l));
    ScalarExpr ih = ScalarExpr::imag_unit() * ScalarExpr::var(alg_->hbar());
    ScalarExpr out;
    for (auto& [m, x] : c.terms()) {
      ScalarExpr f = m.is_one() ? ScalarExpr(1) : ScalarExpr::var(fsymbol(m));
      out += (x / ih) * f;
    }
    return out;
  });
}

namespace {

std::uint32_t pair_support(Symbol s, const WeylAlgebra& alg) {
  std::uint32_t mask = 0;
  if (sym::is_moment(s) || sym::is_fvar(s)) {
    Exponents e = sym::unpack(s);
    for (int i = 0; i < alg.pairs(); ++i)
      if (e[2 * i] || e[2 * i + 1]) mask |= 1u << i;
    return mask;
  }
  for (int i = 0; i < alg.pairs(); ++i)
    if (alg.pair(i).q == s || alg.pair(i).p == s) mask |= 1u << i;
  return mask;
}

// Accumulates a sum, keeping polynomial terms in a cheaper polynomial accumulator.
struct Accumulator {
  Polynomial poly;
  ScalarExpr rat;
  void add(const ScalarExpr& e) {
    if (e.is_polynomial()) poly += e.num();
    else rat += e;
  }
  ScalarExpr value() const { return rat + ScalarExpr(poly); }
};

}  // namespace

const ScalarExpr& PhaseSpace::generator_bracket(Symbol x, Symbol y) const {
  static const ScalarExpr zero;
  if (x == y) return zero;
  if ((pair_support(x, *alg_) & pair_support(y, *alg_)) == 0) return zero;
  if (y < x) {
    const ScalarExpr& r = generator_bracket(y, x);
    return memo(mu_, gbr_, std::make_pair(x, y), [&] { return -r; });
  }
  return memo(mu_, gbr_, std::make_pair(x, y), [&] {
    ScalarExpr fx = g_to_f(ScalarExpr::var(x));
    ScalarExpr fy = g_to_f(ScalarExpr::var(y));
    std::vector<std::pair<Symbol, ScalarExpr>> dx, dy;
    for (Symbol s : fx.symbols())
      if (sym::is_fvar(s)) dx.push_back({s, partial_derivative(fx, s)});
    for (Symbol s : fy.symbols())
      if (sym::is_fvar(s)) dy.push_back({s, partial_derivative(fy, s)});
    Accumulator acc;
    for (auto& [k, dk] : dx)
      for (auto& [l, dl] : dy) {
        const ScalarExpr& br = fbracket(k, l);
        if (br.is_zero()) continue;
        acc.add(dk * dl * br);
      }
    bool is_f = sym::is_fvar(x) && sym::is_fvar(y);
    return is_f ? acc.value() : f_to_g(acc.value());
  });
}

ScalarExpr PhaseSpace::poisson_bracket(const ScalarExpr& a, const ScalarExpr& b) const {
  auto ga = generators(a), gb = generators(b);
  if (ga.empty() || gb.empty()) return ScalarExpr(0);
  std::vector<std::pair<Symbol, ScalarExpr>> db;
  for (Symbol y : gb) db.push_back({y, partial_derivative(b, y)});
  Accumulator acc;
  for (Symbol x : ga) {
    ScalarExpr dx;
    bool have = false;
    for (auto& [y, dy] : db) {
      const ScalarExpr& br = generator_bracket(x, y);
      if (br.is_zero()) continue;
      if (!have) {
        dx = partial_derivative(a, x);
        have = true;
      }
      acc.add(dx * dy * br);
    }
  }
  ScalarExpr r = acc.value();
  r.add_assumptions(a.assumptions());
  r.add_assumptions(b.assumptions());
  return r;
}

ScalarExpr PhaseSpace::gbracket_closed_form(int a, int b, int c, int d) const {
  return closed_form_impl(a, b, c, d, true);
}

ScalarExpr PhaseSpace::gbracket_closed_form_unweighted(int a, int b, int c, int d) const {
  return closed_form_impl(a, b, c, d, false);
}

ScalarExpr PhaseSpace::closed_form_impl(int a, int b, int c, int d, bool factorials) const {
  // The sum is written for moments indexed (position, momentum); display indices
  // are (momentum, position), so the roles are exchanged here.
  const long al = b, be = a, ga = d, de = c;
  auto Gq = [&](long x, long y) -> ScalarExpr {
    if (x < 0 || y < 0) return ScalarExpr(0);
    return moment(NormalMonomial::pq(0, static_cast<int>(x), static_cast<int>(y)));
  };
  ScalarExpr quarter = -ScalarExpr::var(alg_->hbar(), 2) * ScalarExpr::frac(1, 4);
  ScalarExpr out;
  for (long j = 0; j <= std::min(al, de); ++j)
    for (long k = 0; k <= std::min(be, ga); ++k) {
      long sign;
      long rs;
      if (j % 2 == 1 && k % 2 == 0) {
        sign = 1;
        rs = (j - 1) / 2 + k / 2;
      } else if (j % 2 == 0 && k % 2 == 1) {
        sign = -1;
        rs = j / 2 + (k - 1) / 2;
      } else {
        continue;
      }
      mpz_class cf = binom(al, j) * binom(be, k) * binom(ga, k) * binom(de, j) * sign;
      if (factorials) {
        mpz_class fj, fk;
        mpz_fac_ui(fj.get_mpz_t(), j);
        mpz_fac_ui(fk.get_mpz_t(), k);
        cf *= fj * fk;
      }
      out += ScalarExpr(GaussianRational(mpq_class(cf))) * quarter.pow(static_cast<unsigned>(rs)) *
             Gq(al + ga - j - k, be + de - j - k);
    }
  out -= ScalarExpr(al * de) * Gq(al - 1, be) * Gq(ga, de - 1);
  out += ScalarExpr(be * ga) * Gq(al, be - 1) * Gq(ga - 1, de);
  return out;
}

ScalarExpr PhaseSpace::quantum_hamiltonian(const OperatorPoly& h, int n) const {
  if (n < 0) return expectation(h);
  return truncate_by_grade(expectation(h, {n, -1}), n, table());
}

std::map<Symbol, ScalarExpr> PhaseSpace::equations_of_motion(const ScalarExpr& hq,
                                                             const std::vector<Symbol>& gens) const {
  std::map<Symbol, ScalarExpr> out;
  for (Symbol g : gens) out.emplace(g, poisson_bracket(ScalarExpr::var(g), hq));
  return out;
}

}  // namespace effcon
