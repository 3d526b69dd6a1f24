#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "effcon/error.hpp"
#include "support.hpp"

using namespace effcon;
using effcon::testing::Ring;

TEST_CASE("gaussian rationals stay canonical") {
  GaussianRational a(mpq_class(2, 4), mpq_class(-3, 6));
  CHECK(a.re() == mpq_class(1, 2));
  CHECK(a.re().get_den() == 2);
  CHECK((a * a.inverse()).is_one());
  CHECK((GaussianRational::i() * GaussianRational::i()) == GaussianRational(-1));
  CHECK_THROWS_AS(GaussianRational(0).inverse(), Error);
}

TEST_CASE("arithmetic examples") {
  Ring r;
  CHECK(r("p/M") * r("M") == r("p"));
  CHECK(r.str(r("p/M") * r("M")) == "p");
  CHECK(r("i*hbar/2") + r("i*hbar/2") == r("i*hbar"));
  CHECK(r.str(r("i*hbar/2") + r("i*hbar/2")) == "i*hbar");

  ScalarExpr inv = ScalarExpr(1) / r("p");
  CHECK(r.str(inv) == "1/p");
  CHECK(inv.assumptions() == std::vector<Symbol>{r.p});
  CHECK(r("p") * inv == ScalarExpr(1));
  CHECK_THROWS_WITH_AS(r("q") / r("p - p"), "zero divisor", Error);
}

TEST_CASE("denominators are monic and cancel monomial content") {
  Ring r;
  ScalarExpr e = r("(2*p*q)/(4*M*q)");
  CHECK(e.den() == Polynomial::var(r.M));
  CHECK(r.str(e) == "p/(2*M)");
  ScalarExpr f = r("(p^2 - q^2)/(p + q)");
  CHECK(f.is_polynomial());
  CHECK(f == r("p - q"));
  ScalarExpr g = r("(p + q)/(p^2 - q^2)");
  CHECK(g == r("1/(p - q)"));
}

TEST_CASE("substitution examples") {
  Ring r;
  Bindings b{{r.pt, r("-p^2/(2*M)")}};
  CHECK(substitute(r("p_t + p^2/(2*M)"), b).is_zero());
  ScalarExpr e = r("q*p + i*hbar/2 - G[2,0;0,0]/M");
  CHECK(substitute(e, {{r.q, r("q")}}) == e);
  CHECK(substitute(r("q*p + i*hbar/2"), {{r.hbar, ScalarExpr(0)}}) == r("q*p"));
  CHECK_THROWS_AS(substitute(r("1/(p - q)"), {{r.p, r("q")}}), Error);
  ScalarExpr s = substitute(r("q/p + p_t"), {{r.p, r("t/M")}});
  CHECK(s == r("q*M/t + p_t"));
}

TEST_CASE("derivative examples") {
  Ring r;
  CHECK(partial_derivative(r("p^2/(2*M)"), r.p) == r("p/M"));
  CHECK(partial_derivative(r("1/p"), r.p) == r("-1/p^2"));
  CHECK(partial_derivative(r("q*p + i*hbar/2"), r.hbar) == r("i/2"));
  CHECK(partial_derivative(r("q/(p + q)"), r.q) == r("p/(p+q)^2"));
}

TEST_CASE("grade truncation examples") {
  Ring r;
  ScalarExpr c = r("p_t + p^2/(2*M) + G[2,0;0,0]/(2*M)");
  CHECK(truncate_by_grade(c, 1, r.table) == r("p_t + p^2/(2*M)"));
  CHECK(truncate_by_grade(r("hbar*G[1,1;0,0]"), 3, r.table).is_zero());
  CHECK(truncate_by_grade(r("hbar*G[1,1;0,0]"), 4, r.table) == r("hbar*G[1,1;0,0]"));
  CHECK(truncate_by_grade(c, 1000, r.table) == c);
  CHECK_THROWS_WITH_AS(truncate_by_grade(r("1/G[2,0;0,0]"), 3, r.table),
                       "non-polynomial in graded symbols", Error);
}

TEST_CASE("low order moments collapse") {
  Ring r;
  CHECK(r("G[1,0;0,0]").is_zero());
  CHECK(r("G[0,0;0,0]") == ScalarExpr(1));
  CHECK(r("G[2,0]") == r("G[2,0;0,0]"));
}

TEST_CASE("canonical printing") {
  Ring r;
  CHECK(r.str(r("-i*hbar*p/(2*M)")) == "-i*p*hbar/(2*M)");
  CHECK(r.str(r("q*p + G[1,1;0,0] - i*hbar/2")) == "q*p - i*hbar/2 + G[1,1;0,0]");
  CHECK(r.str(r("(1 + 2*i)*q")) == "q + 2*i*q");
  CHECK(r.str(r("0")) == "0");
  CHECK(r.str(r("(q + p)/(q - p)")) == "(q + p)/(q - p)");
}

namespace {
std::vector<Symbol> small_syms(const Ring& r) { return {r.q, r.p, r.hbar, r.M}; }
}  // namespace

TEST_CASE("ring axioms on random expressions") {
  Ring r;
  std::mt19937 rng(12345);
  auto syms = small_syms(r);
  for (int k = 0; k < 100; ++k) {
    ScalarExpr a = effcon::testing::random_expr(rng, syms);
    ScalarExpr b = effcon::testing::random_expr(rng, syms);
    ScalarExpr c = effcon::testing::random_expr(rng, syms);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK(a - a == ScalarExpr(0));
    CHECK(((a == b) == (a - b).is_zero()));
    if (!b.is_zero()) CHECK((a / b) * b == a);
  }
}

TEST_CASE("substitution commutes with differentiation in a disjoint symbol") {
  Ring r;
  std::mt19937 rng(777);
  auto syms = small_syms(r);
  for (int k = 0; k < 50; ++k) {
    ScalarExpr e = effcon::testing::random_expr(rng, syms);
    ScalarExpr v = effcon::testing::random_expr(rng, {r.p, r.M}, 2, false);
    Bindings b{{r.q, v}};
    ScalarExpr lhs = partial_derivative(substitute(e, b), r.hbar);
    ScalarExpr rhs = substitute(partial_derivative(e, r.hbar), b);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("truncation is an idempotent linear projection") {
  Ring r;
  std::mt19937 rng(99);
  std::vector<Symbol> syms{r.p, r.hbar, sym::moment({2, 0, 0, 0}), sym::moment({1, 1, 0, 0})};
  for (int k = 0; k < 50; ++k) {
    ScalarExpr a = effcon::testing::random_expr(rng, syms, 4, false);
    ScalarExpr b = effcon::testing::random_expr(rng, syms, 4, false);
    for (int n = 0; n <= 6; ++n) {
      ScalarExpr ta = truncate_by_grade(a, n, r.table);
      CHECK(truncate_by_grade(ta, n, r.table) == ta);
      CHECK(truncate_by_grade(a + b, n, r.table) == ta + truncate_by_grade(b, n, r.table));
    }
  }
}

TEST_CASE("printed expressions parse back") {
  Ring r;
  std::mt19937 rng(4242);
  std::vector<Symbol> syms{r.q, r.p, r.hbar, r.M, sym::moment({1, 1, 0, 1})};
  for (int k = 0; k < 100; ++k) {
    ScalarExpr a = effcon::testing::random_expr(rng, syms);
    std::string s = r.str(a);
    ScalarExpr back = r(s);
    CHECK(back == a);
    CHECK(r.str(back) == s);
  }
}
