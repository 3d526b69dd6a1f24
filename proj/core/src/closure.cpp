#include "effcon/closure.hpp"

#include <algorithm>

namespace effcon {

std::vector<FirstClassFailure> check_first_class(const TruncatedSystem& solved) {
  const auto& ps = solved.space();
  const auto& cs = solved.constraints();
  std::vector<FirstClassFailure> out;
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      ScalarExpr r = solved.reduce(ps.poisson_bracket(cs[i].expr, cs[j].expr));
      if (!r.is_zero()) out.push_back({cs[i].label, cs[j].label, std::move(r)});
    }
  return out;
}

namespace {

OperatorPoly word_op(const WeylAlgebra& alg, const NormalMonomial& w) { return OperatorPoly::monomial(alg.pairs(), w); }

// Normal words of a, each paired with the power of C multiplying it.
void collect(const OperatorPoly& a, int k, std::vector<std::pair<NormalMonomial, int>>& out) {
  for (const auto& [m, c] : a.terms()) {
    (void)c;
    std::pair<NormalMonomial, int> w{m, k};
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
  }
}

}  // namespace

ClosureResult close_constraint_set(const ConstraintFactory& factory, ConstraintSet set, const ClosureOptions& opt) {
  const auto& ps = factory.space();
  const auto& alg = ps.algebra();
  ClosureResult res{std::move(set), false, 0, {}, {}};
  for (;;) {
    TruncatedSystem sys = solve_constraints(truncate_system(ps, res.set, opt.order, opt.mode), opt.policy);
    auto failures = check_first_class(sys);
    if (failures.empty()) {
      res.closed = true;
      return res;
    }
    if (res.rounds >= opt.max_rounds) {
      res.remaining = std::move(failures);
      return res;
    }
    ++res.rounds;
    std::size_t added = 0;
    for (const auto& f : failures) {
      const auto* a = res.set.find(f.a);
      const auto* b = res.set.find(f.b);
      OperatorPoly fa = word_op(alg, a->word), gb = word_op(alg, b->word);
      std::vector<std::pair<NormalMonomial, int>> words;
      collect(commutator(alg, fa, gb), a->n + b->n, words);
      collect(alg.mul(fa, commutator(alg, factory.power(a->n), gb)), b->n, words);
      collect(alg.mul(gb, commutator(alg, fa, factory.power(b->n))), a->n, words);
      std::string origin = "bracket(" + f.a + ", " + f.b + ")";
      for (const auto& [w, k] : words) {
        if (res.set.find(constraint_label(alg, w, k))) continue;
        EffectiveConstraint c = factory.generate(w, k, res.set.limit());
        if (sys.reduce(c.expr).is_zero()) continue;
        c.origin = origin;
        res.additions.push_back(c);
        res.set.insert(std::move(c));
        ++added;
      }
    }
    if (added == 0) {
      res.remaining = std::move(failures);
      return res;
    }
  }
}

}  // namespace effcon
