#pragma once

#include <string>
#include <vector>

#include "effcon/reduction_engine.hpp"

namespace effcon {

struct FirstClassFailure {
  std::string a;
  std::string b;
  ScalarExpr residue;  // reduced bracket
};

// Brackets of every pair of truncated constraints on the solved surface.
std::vector<FirstClassFailure> check_first_class(const TruncatedSystem& solved);

struct ClosureOptions {
  int order = 2;
  TruncationMode mode = TruncationMode::graded;
  EliminationPolicy policy;
  int max_rounds = 4;
};

struct ClosureResult {
  ConstraintSet set;
  bool closed = false;
  int rounds = 0;
  std::vector<EffectiveConstraint> additions;  // origin names the bracket that produced it
  std::vector<FirstClassFailure> remaining;    // failures left when not closed
};

// Adds <w C^k> for the normal words w appearing in the failing brackets until
// every bracket vanishes weakly or max_rounds is reached.
ClosureResult close_constraint_set(const ConstraintFactory& factory, ConstraintSet set, const ClosureOptions& opt);

}  // namespace effcon
