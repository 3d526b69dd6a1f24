#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "effcon/moment_space.hpp"

namespace effcon {

enum class ConstraintKind { plain, symmetrized };

// <f C^n> for a normal-ordered multiplier word f (unsymmetrized, f on the left).
struct EffectiveConstraint {
  NormalMonomial word;
  int n = 1;
  ConstraintKind kind = ConstraintKind::plain;
  std::string label;
  ScalarExpr expr;
  std::string origin = "declared";
};

std::string constraint_label(const WeylAlgebra& alg, const NormalMonomial& word, int n,
                             ConstraintKind kind = ConstraintKind::plain);

// Solve order: n ascending, then word degree, then the monomial order of the word
// read as a commutative monomial in the expectation symbols.
bool hierarchy_less(const WeylAlgebra& alg, const EffectiveConstraint& a, const EffectiveConstraint& b);

class ConstraintSet {
 public:
  ConstraintSet(const WeylAlgebra& alg, OperatorPoly classical, ExpectationLimit lim)
      : alg_(&alg), c_(std::move(classical)), lim_(lim) {}

  const WeylAlgebra& algebra() const { return *alg_; }
  const OperatorPoly& classical() const { return c_; }
  ExpectationLimit limit() const { return lim_; }
  const std::vector<EffectiveConstraint>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }

  const EffectiveConstraint* find(const std::string& label) const;
  // Inserts in hierarchy order; false if the label is already present.
  bool insert(EffectiveConstraint c);

 private:
  const WeylAlgebra* alg_;
  OperatorPoly c_;
  ExpectationLimit lim_;
  std::vector<EffectiveConstraint> items_;
};

class ConstraintFactory {
 public:
  ConstraintFactory(const PhaseSpace& ps, OperatorPoly classical);

  const PhaseSpace& space() const { return *ps_; }
  const OperatorPoly& classical() const { return c_; }
  const OperatorPoly& power(int n) const;

  EffectiveConstraint generate(const NormalMonomial& f, int n, ExpectationLimit lim = {}) const;
  // Every word with n = 1..nmax.
  ConstraintSet tower(const std::vector<NormalMonomial>& words, int nmax, ExpectationLimit lim = {}) const;
  // (1/2)<C^n f + f C^n> - <C^n><f>: real, but not closed under brackets.
  EffectiveConstraint symmetrized(const NormalMonomial& f, int n = 1, ExpectationLimit lim = {}) const;

 private:
  const PhaseSpace* ps_;
  OperatorPoly c_;
  mutable std::deque<OperatorPoly> powers_;
};

// {1}, every basic generator, and generator * (momentum of `pair`)^k for 1 <= k <= kmax.
std::vector<NormalMonomial> default_vocabulary(const WeylAlgebra& alg, int pair, int kmax);

// Moments of order m over the given number of pairs, and those left after the
// constraints <f (last position)> remove every monomial ending in that variable.
std::uint64_t count_moments(int m, int pairs);
std::uint64_t count_unrestricted(int m, int pairs);

}  // namespace effcon
