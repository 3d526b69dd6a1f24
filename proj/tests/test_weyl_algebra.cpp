#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "effcon/error.hpp"
#include "effcon/weyl_algebra.hpp"

using namespace effcon;

namespace {

struct TwoPairs {
  SymbolTable table;
  WeylAlgebra alg;
  Symbol M;
  TwoPairs() : alg(table, {{"q", "p"}, {"t", "p_t"}}) { M = table.declare("M", SymbolKind::parameter); }
  OperatorPoly op(const std::string& s) const { return parse_operator(alg, s); }
  ScalarExpr ex(const std::string& s) const { return parse_expr(s, table); }
};

// Independent oracle: normal ordering of letter words by single swaps p_i q_i -> q_i p_i - i*hbar.
using Letter = std::pair<int, bool>;  // (pair, is momentum)
void rewrite(const WeylAlgebra& alg, std::vector<Letter> w, const ScalarExpr& c, OperatorPoly& out) {
  for (std::size_t j = 0; j + 1 < w.size(); ++j) {
    auto a = w[j], b = w[j + 1];
    if (a.first > b.first) {
      std::swap(w[j], w[j + 1]);
      rewrite(alg, w, c, out);
      return;
    }
    if (a.first == b.first && a.second && !b.second) {
      std::vector<Letter> swapped = w;
      std::swap(swapped[j], swapped[j + 1]);
      rewrite(alg, swapped, c, out);
      std::vector<Letter> shorter(w.begin(), w.begin() + j);
      shorter.insert(shorter.end(), w.begin() + j + 2, w.end());
      rewrite(alg, shorter, c * ScalarExpr(Polynomial::term(Monomial::var(alg.hbar()), GaussianRational(0, -1))), out);
      return;
    }
  }
  NormalMonomial m;
  for (auto [i, mom] : w) ++m.e[2 * i + (mom ? 1 : 0)];
  out.add(m, c);
}

OperatorPoly oracle_word(const WeylAlgebra& alg, const std::vector<Letter>& w) {
  OperatorPoly out(alg.pairs());
  rewrite(alg, w, ScalarExpr(1), out);
  return out;
}

std::vector<Letter> letters(const NormalMonomial& m, int pairs) {
  std::vector<Letter> w;
  for (int i = 0; i < pairs; ++i) {
    for (int k = 0; k < m.qexp(i); ++k) w.push_back({i, false});
    for (int k = 0; k < m.pexp(i); ++k) w.push_back({i, true});
  }
  return w;
}

NormalMonomial random_mono(std::mt19937& rng, int pairs, int max_deg) {
  std::uniform_int_distribution<int> slot(0, 2 * pairs - 1), deg(0, max_deg);
  NormalMonomial m;
  int d = deg(rng);
  for (int k = 0; k < d; ++k) ++m.e[slot(rng)];
  return m;
}

OperatorPoly random_op(std::mt19937& rng, const TwoPairs& s, int terms, int max_deg) {
  std::uniform_int_distribution<int> c(-3, 3);
  OperatorPoly out(s.alg.pairs());
  for (int k = 0; k < terms; ++k)
    out.add(random_mono(rng, s.alg.pairs(), max_deg), ScalarExpr(GaussianRational(c(rng), c(rng))));
  return out;
}

}  // namespace

TEST_CASE("product examples") {
  TwoPairs s;
  CHECK(s.op("phat(0)*qhat(0)") == s.op("qhat(0)*phat(0) - i*hbar"));
  CHECK(s.op("phat(q)*qhat(q)^2") == s.op("qhat(0)^2*phat(0) - 2*i*hbar*qhat(0)"));
  CHECK(s.op("qhat(0)*phat(0)") == OperatorPoly::monomial(2, NormalMonomial::pq(0, 1, 1)));
  CHECK(s.op("phat(0)*qhat(0)^2") == oracle_word(s.alg, {{0, true}, {0, false}, {0, false}}));
  CHECK(s.op("phat(1)*qhat(0)") == s.op("qhat(0)*phat(1)"));
}

TEST_CASE("commutator examples") {
  TwoPairs s;
  CHECK(commutator(s.alg, s.op("qhat(0)"), s.op("phat(0)")) == s.op("i*hbar"));
  CHECK(commutator(s.alg, s.op("qhat(0)"), s.op("qhat(0)^2")).is_zero());
  CHECK(commutator(s.alg, s.op("phat(0)"), s.op("qhat(0)^2")) == s.op("-2*i*hbar*qhat(0)"));
  CHECK(commutator(s.alg, s.op("qhat(t)"), s.op("phat(p)")).is_zero());
}

TEST_CASE("weyl monomial examples") {
  TwoPairs s;
  CHECK(weyl_monomial(s.alg, NormalMonomial::pq(0, 1, 1)) == s.op("qhat(0)*phat(0) - i*hbar/2"));
  CHECK(weyl_monomial(s.alg, NormalMonomial::q(0, 2)) == s.op("qhat(0)^2"));
  NormalMonomial both = NormalMonomial::pq(0, 1, 1) * NormalMonomial::pq(1, 1, 1);
  CHECK(op_mul(s.alg, weyl_monomial(s.alg, NormalMonomial::pq(0, 1, 1)),
               weyl_monomial(s.alg, NormalMonomial::pq(1, 1, 1))) == weyl_monomial(s.alg, both));
}

TEST_CASE("weyl normal coefficients follow the closed binomial form") {
  TwoPairs s;
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 6; ++b) {
      const auto& w = s.alg.weyl_to_normal(a, b);
      const auto& v = s.alg.normal_to_weyl(a, b);
      for (int k = 0; k <= std::min(a, b); ++k) {
        mpz_class f, ca, cb;
        mpz_fac_ui(f.get_mpz_t(), k);
        mpz_bin_uiui(ca.get_mpz_t(), a, k);
        mpz_bin_uiui(cb.get_mpz_t(), b, k);
        GaussianRational base(mpq_class(f * ca * cb));
        GaussianRational half_i(0, mpq_class(1, 2)), x = 1, y = 1;
        for (int j = 0; j < k; ++j) {
          x *= -half_i;
          y *= half_i;
        }
        CHECK(w[k] == base * x);
        CHECK(v[k] == base * y);
      }
    }
}

TEST_CASE("shift examples") {
  TwoPairs s;
  auto sh = [&](const std::string& t) { return shift_by_expectations(s.alg, s.op(t)); };
  OperatorPoly expect_q = OperatorPoly::scalar(2, s.ex("q")) + s.op("qhat(0)");
  CHECK(sh("qhat(0)") == expect_q);
  OperatorPoly expect_p2 = OperatorPoly::scalar(2, s.ex("p^2")) + s.op("2*p*phat(0) + phat(0)^2");
  CHECK(sh("phat(0)^2") == expect_p2);
  OperatorPoly expect_c = OperatorPoly::scalar(2, s.ex("p_t + p^2/(2*M)")) +
                          s.op("phat(1) + p/M*phat(0) + phat(0)^2/(2*M)");
  CHECK(sh("phat(1) + phat(0)^2/(2*M)") == expect_c);
  std::mt19937 rng(5);
  for (int k = 0; k < 30; ++k) {
    OperatorPoly a = random_op(rng, s, 3, 4);
    CHECK(unshift(s.alg, shift_by_expectations(s.alg, a)) == a);
  }
}

TEST_CASE("products agree with the rewriting oracle and are associative") {
  TwoPairs s;
  std::mt19937 rng(2024);
  for (int k = 0; k < 60; ++k) {
    NormalMonomial x = random_mono(rng, 2, 4), y = random_mono(rng, 2, 4), z = random_mono(rng, 2, 4);
    auto wx = letters(x, 2), wy = letters(y, 2);
    std::vector<Letter> w = wx;
    w.insert(w.end(), wy.begin(), wy.end());
    OperatorPoly X = OperatorPoly::monomial(2, x), Y = OperatorPoly::monomial(2, y), Z = OperatorPoly::monomial(2, z);
    CHECK(op_mul(s.alg, X, Y) == oracle_word(s.alg, w));
    CHECK(op_mul(s.alg, op_mul(s.alg, X, Y), Z) == op_mul(s.alg, X, op_mul(s.alg, Y, Z)));
  }
}

TEST_CASE("commutator is bilinear, antisymmetric and satisfies Jacobi") {
  TwoPairs s;
  std::mt19937 rng(31337);
  auto com = [&](const OperatorPoly& a, const OperatorPoly& b) { return commutator(s.alg, a, b); };
  for (int k = 0; k < 30; ++k) {
    OperatorPoly a = random_op(rng, s, 2, 3), b = random_op(rng, s, 2, 3), c = random_op(rng, s, 2, 3);
    ScalarExpr lam = s.ex("2 - 3*i*M");
    CHECK(com(a + b.scaled(lam), c) == com(a, c) + com(b, c).scaled(lam));
    CHECK(com(a, b) == -com(b, a));
    CHECK((com(a, com(b, c)) + com(b, com(c, a)) + com(c, com(a, b))).is_zero());
  }
}

TEST_CASE("weyl recursion is independent of peel order") {
  TwoPairs s;
  for (int deg = 1; deg <= 4; ++deg) {
    std::vector<int> slots(deg, 0);
    std::function<void(int, int)> gen = [&](int pos, int from) {
      if (pos == deg) {
        std::vector<Letter> order;
        NormalMonomial m;
        for (int sl : slots) {
          order.push_back({sl / 2, sl % 2 == 1});
          ++m.e[sl];
        }
        OperatorPoly ref = weyl_monomial(s.alg, m);
        std::sort(order.begin(), order.end());
        do {
          CHECK(weyl_by_peel_order(s.alg, order) == ref);
        } while (std::next_permutation(order.begin(), order.end()));
        return;
      }
      for (int sl = from; sl < 4; ++sl) {
        slots[pos] = sl;
        gen(pos + 1, sl);
      }
    };
    gen(0, 0);
  }
}

TEST_CASE("classical limit of products is the commutative product") {
  TwoPairs s;
  std::mt19937 rng(8);
  for (int k = 0; k < 30; ++k) {
    OperatorPoly a = random_op(rng, s, 2, 3), b = random_op(rng, s, 2, 3);
    CHECK(classical_symbol(s.alg, op_mul(s.alg, a, b)) ==
          classical_symbol(s.alg, a) * classical_symbol(s.alg, b));
  }
}

TEST_CASE("operator text round trip and errors") {
  TwoPairs s;
  OperatorPoly c = s.op("phat(p_t) + phat(p)^2/(2*M)");
  CHECK(parse_operator(s.alg, to_string(s.alg, c)) == c);
  CHECK(word_text(s.alg, NormalMonomial::pq(0, 1, 2)) == "q*p^2");
  CHECK_THROWS_AS(s.op("qhat(7)"), ParseError);
  CHECK_THROWS_AS(s.op("1/phat(0)"), ParseError);
  SymbolTable other;
  WeylAlgebra one(other, {{"x", "k"}});
  CHECK_THROWS_AS(op_mul(s.alg, s.op("qhat(0)"), one.qhat(0)), Error);
}
