#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "effcon/constraint_factory.hpp"
#include "effcon/linear_algebra.hpp"

namespace effcon {

enum class TruncationMode { graded, sharp };

std::string to_string(TruncationMode m);
TruncationMode parse_mode(const std::string& s);

// Which pair plays internal time. Its moments, and moments mixing it with the
// other pairs, are solved for first; other moments only as a fallback.
struct EliminationPolicy {
  int time_pair = 0;
};

struct TruncatedConstraint {
  std::string label;
  int n = 1;
  NormalMonomial word;
  std::string origin;
  std::vector<std::string> merged;  // labels with an identical truncated expression
  ScalarExpr expr;
  // Filled by solve_constraints.
  ScalarExpr residual;
  std::optional<Symbol> pivot;
  ScalarExpr surface;
};

struct SolvedEntry {
  Symbol var;
  ScalarExpr value;
  std::string label;  // constraint or gauge condition it came from
};

struct Residual {
  std::string label;
  ScalarExpr expr;
};

class TruncatedSystem {
 public:
  TruncatedSystem(const PhaseSpace& ps, int order, TruncationMode mode) : ps_(&ps), order_(order), mode_(mode) {}

  const PhaseSpace& space() const { return *ps_; }
  const SymbolTable& table() const { return ps_->table(); }
  int order() const { return order_; }
  TruncationMode mode() const { return mode_; }
  int time_pair() const { return time_pair_; }

  std::vector<TruncatedConstraint>& constraints() { return cs_; }
  const std::vector<TruncatedConstraint>& constraints() const { return cs_; }
  const TruncatedConstraint* find(const std::string& label) const;
  std::vector<std::string>& trivial() { return trivial_; }
  const std::vector<std::string>& trivial() const { return trivial_; }

  const std::vector<SolvedEntry>& solutions() const { return table_; }
  const Bindings& bindings() const { return bind_; }
  const std::vector<Residual>& residuals() const { return residuals_; }
  const std::vector<Symbol>& assumptions() const { return assume_; }
  bool solved() const { return solved_; }
  bool is_solved(Symbol s) const { return bind_.count(s) != 0; }

  // Expectation symbols of every pair and moments of order 2..N.
  std::vector<Symbol> generators() const;
  std::vector<Symbol> free_generators() const;
  // Generators living only on pairs other than internal time.
  bool is_physical(Symbol s) const;

  // Substitutes solutions, then truncates per mode.
  ScalarExpr reduce(const ScalarExpr& e) const;
  ScalarExpr truncate(const ScalarExpr& e) const;
  ScalarExpr substitute_solutions(const ScalarExpr& e) const { return substitute(e, bind_); }

  // Adds x = value, rewriting earlier entries so the table stays triangular.
  void add_solution(Symbol x, ScalarExpr value, const std::string& label);
  void add_residual(Residual r) { residuals_.push_back(std::move(r)); }
  void set_time_pair(int p) { time_pair_ = p; }
  void mark_solved() { solved_ = true; }

 private:
  void note_assumptions(const ScalarExpr& e);

  const PhaseSpace* ps_;
  int order_;
  TruncationMode mode_;
  int time_pair_ = 0;
  bool solved_ = false;
  std::vector<TruncatedConstraint> cs_;
  std::vector<std::string> trivial_;
  std::vector<SolvedEntry> table_;
  Bindings bind_;
  std::vector<Residual> residuals_;
  std::vector<Symbol> assume_;
};

TruncatedSystem truncate_system(const PhaseSpace& ps, const ConstraintSet& set, int order, TruncationMode mode);
TruncatedSystem solve_constraints(TruncatedSystem sys, EliminationPolicy policy);
// Reduction against an already solved system.
ScalarExpr weak_reduce(const TruncatedSystem& sys, const ScalarExpr& e);

struct InconsistencyReport {
  std::vector<Residual> hard;      // residual constant in the parameters
  std::vector<Residual> soft;      // physical generator forced to vanish; expr is the generator
  std::vector<Residual> unresolved;
  bool consistent() const { return hard.empty() && soft.empty(); }
};
InconsistencyReport detect_inconsistency(const TruncatedSystem& sys);

struct GaugeFlowRecord {
  std::string label;
  std::vector<std::pair<Symbol, ScalarExpr>> flow;  // nonzero entries on free generators
  ScalarExpr on(Symbol g) const;
};
GaugeFlowRecord gauge_flow(const TruncatedSystem& sys, const std::string& label);

struct FlowRank {
  int free_expectations = 0;
  int free_moments = 0;
  int rank = 0;              // rank of all flow vectors on free generators
  int expectation_rank = 0;  // rank restricted to expectation-value components
  int gauge_moments() const { return rank - expectation_rank; }
  int physical_moments() const { return free_moments - gauge_moments(); }
};
FlowRank flow_rank(const TruncatedSystem& sys);

struct ObservableAnsatz {
  int moment_order = 2;        // moments of order 2..this (capped at N)
  int expectation_degree = 1;  // polynomial degree in the free expectation values
};

struct ObservableRecord {
  std::string name;
  ScalarExpr expr;
  int verified_grade = 0;
};

// Brackets with every constraint, reduced at grade N; empty when all vanish.
std::vector<Residual> observable_failures(const TruncatedSystem& sys, const ScalarExpr& o);
bool is_observable(const TruncatedSystem& sys, const ScalarExpr& o);
std::vector<ObservableRecord> find_observables(const TruncatedSystem& sys, const ObservableAnsatz& ansatz);
// Whether o agrees on the constraint surface with a combination (coefficients in
// the parameters) of the basis and constants.
bool in_observable_span(const TruncatedSystem& sys, const std::vector<ObservableRecord>& basis, const ScalarExpr& o);

// Solves the conditions against the system and appends them to the table.
TruncatedSystem gauge_fix(TruncatedSystem sys, const std::vector<ScalarExpr>& conditions);

struct DiracStructure {
  std::vector<std::string> names;
  std::vector<ScalarExpr> phi;
  Matrix delta;
  Matrix inverse;
  std::vector<Symbol> residual;  // free generators on the gauge surface
  std::map<std::pair<Symbol, Symbol>, ScalarExpr> brackets;
  ScalarExpr bracket(const TruncatedSystem& fixed, const ScalarExpr& f, const ScalarExpr& g) const;
};
// second_class: constraint labels, a leading '-' flipping the sign of the surface form;
// conditions: gauge conditions phi = 0. Returns the
// structure and the gauge-fixed system through `fixed`.
DiracStructure gauge_fix_and_dirac(const TruncatedSystem& sys, const std::vector<std::string>& second_class,
                                   const std::vector<ScalarExpr>& conditions, TruncatedSystem* fixed = nullptr);

enum class UncertaintyStatus { saturated, violated_as_real, satisfied, satisfied_conditionally };
std::string to_string(UncertaintyStatus s);

struct UncertaintyReport {
  int pair = 0;
  ScalarExpr excess;  // G^{qq} G^{pp} - (G^{qp})^2 - hbar^2/4 on the surface
  UncertaintyStatus status = UncertaintyStatus::satisfied_conditionally;
};
UncertaintyReport check_uncertainty(const TruncatedSystem& sys, int pair);

// Condition for a named observable to be real: Im(variable part) = value.
struct RealityCondition {
  std::string name;
  ScalarExpr variable_part;
  ScalarExpr required_imaginary_part;
};
RealityCondition reality_condition(const TruncatedSystem& sys, const std::string& name, const ScalarExpr& o);

// Rewrites target in terms of internal time and the given observables, each
// named by a symbol standing for its value.
ScalarExpr relational_solution(const TruncatedSystem& sys, Symbol internal_time, Symbol target,
                               const std::vector<std::pair<Symbol, ScalarExpr>>& observables);

// An expansion written as base * C^(n) + sum_k n(n-1)...(n-k+1) Cc^(n-k) block[k],
// with Cc the classical constraint.
struct ExpansionTranscription {
  std::string name;
  NormalMonomial word;
  ScalarExpr base;  // multiplies the expansion of C^(n); zero if absent
  std::vector<ScalarExpr> blocks;
};

struct ExpansionCheck {
  std::string name;
  int n = 0;
  bool match = false;
  ScalarExpr difference;  // generated minus transcribed, moments of order >= 4 dropped
};

// Compares <f C^n> with the transcription after p_t -> Cc - (classical rest). `plain`
// is the transcription of C^(n) used for the base term; `cclass` a declared symbol.
ExpansionCheck verify_expansion(const ConstraintFactory& factory, Symbol momentum_to_eliminate, Symbol cclass,
                                const ExpansionTranscription& plain, const ExpansionTranscription& t, int n);

}  // namespace effcon
