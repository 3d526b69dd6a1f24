#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "effcon/closure.hpp"

namespace effcon {

// Scenario file: '#' comments, [section] headers, key = value lines. Repeatable
// keys: gauge.condition, dirac.second_class, golden.file.
//
//   [system]      name, pairs (q:p, t:p_t), time (position label), parameters, constraint
//   [vocabulary]  pair, kmax, nmax, words (classical monomials, ';' separated)
//   [truncation]  order, mode
//   [observables] expectation_degree, moment_order
//   [gauge]       condition
//   [dirac]       second_class
//   [golden]      file
struct Scenario {
  std::string name;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string time;
  std::vector<std::string> parameters;
  std::string constraint;

  std::string vocabulary_pair;
  int kmax = 3;
  int nmax = -1;  // -1: N (graded) or N+1 (sharp), at least 1
  std::vector<std::string> words;

  int order = 2;
  TruncationMode mode = TruncationMode::graded;

  int expectation_degree = 1;
  int moment_order = 2;

  std::vector<std::string> gauge;
  std::vector<std::string> second_class;
  std::vector<std::string> golden;

  std::uint64_t hash = 0;  // FNV-1a of the source text
  std::string directory;   // of the scenario file; golden paths are relative to it
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
// Canonical text; parses back to the same fields.
std::string format_scenario(const Scenario& sc);
std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

// Symbol table, algebra, phase space and constraint factory built from a scenario.
class Model {
 public:
  explicit Model(Scenario sc);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const Scenario& scenario() const { return sc_; }
  const SymbolTable& table() const { return table_; }
  const WeylAlgebra& algebra() const { return *alg_; }
  const PhaseSpace& space() const { return *ps_; }
  const ConstraintFactory& factory() const { return *factory_; }
  int time_pair() const { return time_pair_; }
  EliminationPolicy policy() const { return {time_pair_}; }

  ScalarExpr expr(const std::string& text) const { return parse_expr(text, table_); }
  // Grade-0 parameter standing for the value of a named observable.
  Symbol value_symbol(const std::string& name);
  NormalMonomial word(const std::string& text) const;
  std::vector<NormalMonomial> vocabulary() const;
  int nmax(int order, TruncationMode mode) const;
  ExpectationLimit limit(int order, TruncationMode mode) const;

  ConstraintSet constraints(int order, TruncationMode mode) const;
  TruncatedSystem truncated(int order, TruncationMode mode) const;
  TruncatedSystem solved(int order, TruncationMode mode) const;
  std::vector<ScalarExpr> gauge_conditions() const;

 private:
  Scenario sc_;
  SymbolTable table_;
  std::unique_ptr<WeylAlgebra> alg_;
  std::unique_ptr<PhaseSpace> ps_;
  std::unique_ptr<ConstraintFactory> factory_;
  int time_pair_ = 0;
};

}  // namespace effcon
