#pragma once

#include <random>
#include <string>

#include "effcon/scalar_expr.hpp"

namespace effcon::testing {

// One canonical pair (q,p) plus a time pair (t,p_t) and the parameters hbar, M.
struct Ring {
  SymbolTable table{2};
  Symbol q, p, t, pt, hbar, M;

  Ring() {
    q = table.declare("q", SymbolKind::expectation);
    p = table.declare("p", SymbolKind::expectation);
    t = table.declare("t", SymbolKind::expectation);
    pt = table.declare("p_t", SymbolKind::expectation);
    hbar = table.declare("hbar", SymbolKind::parameter, 2);
    M = table.declare("M", SymbolKind::parameter);
  }

  ScalarExpr operator()(const std::string& s) const { return parse_expr(s, table); }
  std::string str(const ScalarExpr& e) const { return to_string(e, table); }
};

inline ScalarExpr random_expr(std::mt19937& rng, const std::vector<Symbol>& syms, int max_terms = 3,
                              bool allow_den = true) {
  std::uniform_int_distribution<int> nterms(1, max_terms), coef(-4, 4), ex(0, 2), pick(0, 3);
  auto poly = [&](int n) {
    Polynomial out;
    for (int k = 0; k < n; ++k) {
      Monomial m;
      for (Symbol s : syms)
        if (int e = ex(rng); e && pick(rng) == 0) m = m * Monomial::var(s, e);
      GaussianRational c(coef(rng), pick(rng) == 0 ? coef(rng) : 0);
      out += Polynomial::term(m, c);
    }
    return out;
  };
  Polynomial n = poly(nterms(rng));
  if (!allow_den || pick(rng) != 0) return ScalarExpr(n);
  Polynomial d;
  while (d.is_zero()) d = poly(1 + pick(rng) % 2);
  return ScalarExpr::fraction(n, d);
}

}  // namespace effcon::testing
