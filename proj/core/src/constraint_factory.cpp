#include "effcon/constraint_factory.hpp"

#include <algorithm>
#include <mutex>

#include <gmpxx.h>

#include "effcon/error.hpp"

namespace effcon {

namespace {

Monomial word_monomial(const WeylAlgebra& alg, const NormalMonomial& w) {
  Monomial m;
  for (int i = 0; i < alg.pairs(); ++i) {
    if (w.qexp(i)) m = m * Monomial::var(alg.pair(i).q, w.qexp(i));
    if (w.pexp(i)) m = m * Monomial::var(alg.pair(i).p, w.pexp(i));
  }
  return m;
}

std::mutex powers_mu;

}  // namespace

std::string constraint_label(const WeylAlgebra& alg, const NormalMonomial& word, int n, ConstraintKind kind) {
  std::string head = kind == ConstraintKind::symmetrized ? "S" : "C";
  return head + "[f=" + word_text(alg, word) + ",n=" + std::to_string(n) + "]";
}

bool hierarchy_less(const WeylAlgebra& alg, const EffectiveConstraint& a, const EffectiveConstraint& b) {
  if (a.n != b.n) return a.n < b.n;
  if (a.word.degree() != b.word.degree()) return a.word.degree() < b.word.degree();
  int c = compare(word_monomial(alg, a.word), word_monomial(alg, b.word));
  if (c != 0) return c > 0;
  return a.kind < b.kind;
}

const EffectiveConstraint* ConstraintSet::find(const std::string& label) const {
  for (const auto& c : items_)
    if (c.label == label) return &c;
  return nullptr;
}

bool ConstraintSet::insert(EffectiveConstraint c) {
  if (find(c.label)) return false;
  auto pos = std::upper_bound(items_.begin(), items_.end(), c,
                              [&](const auto& x, const auto& y) { return hierarchy_less(*alg_, x, y); });
  items_.insert(pos, std::move(c));
  return true;
}

ConstraintFactory::ConstraintFactory(const PhaseSpace& ps, OperatorPoly classical)
    : ps_(&ps), c_(std::move(classical)) {
  if (c_.pairs() != ps.pairs()) throw Error("constraint operator uses a different pair table");
  powers_.push_back(ps.algebra().one());
}

const OperatorPoly& ConstraintFactory::power(int n) const {
  std::lock_guard lock(powers_mu);
  while (static_cast<int>(powers_.size()) <= n) powers_.push_back(ps_->algebra().mul(powers_.back(), c_));
  return powers_[n];
}

EffectiveConstraint ConstraintFactory::generate(const NormalMonomial& f, int n, ExpectationLimit lim) const {
  if (n < 1) throw Error("constraint power must be positive");
  const WeylAlgebra& alg = ps_->algebra();
  OperatorPoly op = alg.mul(OperatorPoly::monomial(alg.pairs(), f), power(n));
  EffectiveConstraint out;
  out.word = f;
  out.n = n;
  out.label = constraint_label(alg, f, n);
  out.expr = ps_->expectation(op, lim);
  if (lim.max_grade >= 0) out.expr = truncate_by_grade(out.expr, lim.max_grade, alg.table());
  return out;
}

ConstraintSet ConstraintFactory::tower(const std::vector<NormalMonomial>& words, int nmax, ExpectationLimit lim) const {
  ConstraintSet set(ps_->algebra(), c_, lim);
  for (int n = 1; n <= nmax; ++n)
    for (const auto& w : words) set.insert(generate(w, n, lim));
  return set;
}

EffectiveConstraint ConstraintFactory::symmetrized(const NormalMonomial& f, int n, ExpectationLimit lim) const {
  if (n < 1) throw Error("constraint power must be positive");
  const WeylAlgebra& alg = ps_->algebra();
  OperatorPoly fo = OperatorPoly::monomial(alg.pairs(), f);
  const OperatorPoly& cn = power(n);
  OperatorPoly sym = (alg.mul(cn, fo) + alg.mul(fo, cn)).scaled(ScalarExpr::frac(1, 2));
  EffectiveConstraint out;
  out.word = f;
  out.n = n;
  out.kind = ConstraintKind::symmetrized;
  out.label = constraint_label(alg, f, n, ConstraintKind::symmetrized);
  out.expr = ps_->expectation(sym, lim) - ps_->expectation(cn, lim) * ps_->expectation(fo, lim);
  if (lim.max_grade >= 0) out.expr = truncate_by_grade(out.expr, lim.max_grade, alg.table());
  return out;
}

std::vector<NormalMonomial> default_vocabulary(const WeylAlgebra& alg, int pair, int kmax) {
  std::vector<NormalMonomial> words{NormalMonomial{}};
  std::vector<NormalMonomial> gens;
  for (int i = 0; i < alg.pairs(); ++i) {
    gens.push_back(NormalMonomial::q(i));
    gens.push_back(NormalMonomial::p(i));
  }
  for (const auto& g : gens) words.push_back(g);
  for (int k = 1; k <= kmax; ++k)
    for (const auto& g : gens) {
      NormalMonomial w = g * NormalMonomial::p(pair, k);
      if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
    }
  return words;
}

std::uint64_t count_moments(int m, int pairs) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), m + 2 * pairs - 1, 2 * pairs - 1);
  return r.get_ui();
}

std::uint64_t count_unrestricted(int m, int pairs) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), m + 2 * pairs - 2, 2 * pairs - 1);
  mpq_class q(r * (2 * pairs - 1), m);
  q.canonicalize();
  if (q.get_den() != 1) throw Error("non-integral count");
  return mpz_class(q.get_num()).get_ui();
}

}  // namespace effcon
