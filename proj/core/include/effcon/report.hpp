#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "effcon/scenario.hpp"

namespace effcon {

// Ordered sections of key/value lines. text() is the human report, machine() the
// same content as flat records "section.key=value".
class Report {
 public:
  Report(std::string title, const Scenario& sc);

  void section(const std::string& name);
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, long value) { add(key, std::to_string(value)); }

  std::string text() const;
  std::string machine() const;

 private:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> lines;
  };
  std::string title_;
  std::vector<Section> sections_;
};

// Golden file: one entry per line, "<kind> <tag> [args] : <payload>", '#' comments.
// Directives "order N" and "mode graded|sharp" apply to the entries below them.
//
//   solve <tag> : lhs = rhs              weak equality on the solved surface
//   fixed <tag> : lhs = rhs              the same after gauge fixing
//   flow <tag> [-]<label> : gen = rhs    flow of the (optionally negated) constraint
//   observable <tag> : expr              observable, inside the span that was found
//   bracket <tag> : {f, g} = rhs         Poisson bracket, weakly
//   dirac <tag> : {f, g} = rhs           Dirac bracket on the gauge-fixed surface
//   delta <tag> <i> <j> : expr           Dirac matrix entry, 1-based
//   value <name> : expr                  names an observable for relational entries
//   relational <tag> <target> : expr     target through internal time and the values
//   relational-fixed <tag> <target> : expr
//   uncertainty <tag> <pair> : status    status of the (position) pair, solved surface
//   uncertainty-fixed <tag> <pair> : status
//   consistency <tag> : consistent | hard <expr> | soft <generator>
//   expansion <tag> <word> <k> : expr    block k of the expansion of <word C^n>
//   expansion-base <tag> <word> : expr   multiplies the expansion of C^n
//   expansion-check <tag> <word> : n1, n2, ...
//   known <tag> : reason                 the entry is expected to mismatch
struct GoldenEntry {
  std::string kind;
  std::string tag;
  std::vector<std::string> args;
  std::string payload;
  int order = 0;
  TruncationMode mode = TruncationMode::graded;
  int line = 0;
  std::string known;
};

std::vector<GoldenEntry> parse_golden(const std::string& text, int order, TruncationMode mode);
std::vector<GoldenEntry> load_golden(const std::string& path, int order, TruncationMode mode);

struct GoldenResult {
  std::string kind;
  std::string tag;
  bool ok = false;
  std::string detail;  // mismatch description; empty on success
  std::string known;   // reason when the entry is expected to mismatch
};

// Evaluates every entry against the model. Systems are solved once per order and mode.
class GoldenComparer {
 public:
  explicit GoldenComparer(Model& model);
  ~GoldenComparer();

  std::vector<GoldenResult> compare(const std::vector<GoldenEntry>& entries);

  const TruncatedSystem& solved(int order, TruncationMode mode);
  const TruncatedSystem& fixed(int order, TruncationMode mode);
  const DiracStructure& dirac(int order, TruncationMode mode);

 private:
  GoldenResult run(const GoldenEntry& e);
  struct Cache;
  Model* model_;
  std::unique_ptr<Cache> cache_;
};

// Unexpected mismatches plus known mismatches that now agree.
std::size_t count_failures(const std::vector<GoldenResult>& r);

}  // namespace effcon
