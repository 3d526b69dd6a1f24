#include "effcon/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "effcon/error.hpp"

namespace effcon {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);)
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    int x = std::stoi(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ParseError("not an integer for " + key + ": " + v);
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
  return s;
}

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  sc.hash = fnv1a(text);
  std::string section;
  std::set<std::string> seen;
  std::stringstream in(text);
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto where = [&] { return "line " + std::to_string(lineno) + ": "; };
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(where() + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(where() + "expected key = value");
    std::string key = section + "." + trim(line.substr(0, eq));
    std::string v = trim(line.substr(eq + 1));
    bool repeatable = key == "gauge.condition" || key == "dirac.second_class" || key == "golden.file";
    if (!repeatable && !seen.insert(key).second) throw ParseError(where() + "duplicate key " + key);
    if (key == "system.name") {
      sc.name = v;
    } else if (key == "system.pairs") {
      for (const auto& p : split(v, ',')) {
        auto colon = p.find(':');
        if (colon == std::string::npos) throw ParseError(where() + "pair must read position:momentum");
        sc.pairs.push_back({trim(p.substr(0, colon)), trim(p.substr(colon + 1))});
      }
    } else if (key == "system.time") {
      sc.time = v;
    } else if (key == "system.parameters") {
      sc.parameters = split(v, ',');
    } else if (key == "system.constraint") {
      sc.constraint = v;
    } else if (key == "vocabulary.pair") {
      sc.vocabulary_pair = v;
    } else if (key == "vocabulary.kmax") {
      sc.kmax = to_int(key, v);
    } else if (key == "vocabulary.nmax") {
      sc.nmax = to_int(key, v);
    } else if (key == "vocabulary.words") {
      sc.words = split(v, ';');
    } else if (key == "truncation.order") {
      sc.order = to_int(key, v);
    } else if (key == "truncation.mode") {
      sc.mode = parse_mode(v);
    } else if (key == "observables.expectation_degree") {
      sc.expectation_degree = to_int(key, v);
    } else if (key == "observables.moment_order") {
      sc.moment_order = to_int(key, v);
    } else if (key == "gauge.condition") {
      sc.gauge.push_back(v);
    } else if (key == "dirac.second_class") {
      sc.second_class.push_back(v);
    } else if (key == "golden.file") {
      sc.golden.push_back(v);
    } else {
      throw ParseError(where() + "unknown key " + key);
    }
  }
  if (sc.pairs.empty()) throw ParseError("scenario declares no pairs");
  if (sc.constraint.empty()) throw ParseError("scenario declares no constraint");
  if (sc.order < 0) throw ParseError("truncation order must be nonnegative");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot read scenario " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  Scenario sc = parse_scenario(ss.str());
  sc.directory = std::filesystem::path(path).parent_path().string();
  return sc;
}

std::string format_scenario(const Scenario& sc) {
  std::ostringstream out;
  auto join = [](const std::vector<std::string>& v, const char* sep) {
    std::string r;
    for (std::size_t i = 0; i < v.size(); ++i) r += (i ? sep : "") + v[i];
    return r;
  };
  out << "[system]\nname = " << sc.name << "\npairs = ";
  for (std::size_t i = 0; i < sc.pairs.size(); ++i)
    out << (i ? ", " : "") << sc.pairs[i].first << ":" << sc.pairs[i].second;
  out << "\n";
  if (!sc.time.empty()) out << "time = " << sc.time << "\n";
  if (!sc.parameters.empty()) out << "parameters = " << join(sc.parameters, ", ") << "\n";
  out << "constraint = " << sc.constraint << "\n";
  out << "\n[vocabulary]\n";
  if (!sc.vocabulary_pair.empty()) out << "pair = " << sc.vocabulary_pair << "\n";
  out << "kmax = " << sc.kmax << "\nnmax = " << sc.nmax << "\n";
  if (!sc.words.empty()) out << "words = " << join(sc.words, "; ") << "\n";
  out << "\n[truncation]\norder = " << sc.order << "\nmode = " << to_string(sc.mode) << "\n";
  out << "\n[observables]\nexpectation_degree = " << sc.expectation_degree << "\nmoment_order = " << sc.moment_order
      << "\n";
  if (!sc.gauge.empty()) {
    out << "\n[gauge]\n";
    for (const auto& g : sc.gauge) out << "condition = " << g << "\n";
  }
  if (!sc.second_class.empty()) {
    out << "\n[dirac]\n";
    for (const auto& g : sc.second_class) out << "second_class = " << g << "\n";
  }
  if (!sc.golden.empty()) {
    out << "\n[golden]\n";
    for (const auto& g : sc.golden) out << "file = " << g << "\n";
  }
  return out.str();
}

Model::Model(Scenario sc) : sc_(std::move(sc)) {
  alg_ = std::make_unique<WeylAlgebra>(table_, sc_.pairs);
  for (const auto& p : sc_.parameters) table_.declare(p, SymbolKind::parameter);
  ps_ = std::make_unique<PhaseSpace>(*alg_);
  time_pair_ = sc_.time.empty() ? 0 : alg_->pair_index(sc_.time);
  factory_ = std::make_unique<ConstraintFactory>(*ps_, parse_operator(*alg_, sc_.constraint));
}

Symbol Model::value_symbol(const std::string& name) {
  if (auto s = table_.find(name)) {
    if (table_.kind(*s) != SymbolKind::parameter) throw Error("name already used by a phase-space symbol: " + name);
    return *s;
  }
  return table_.declare(name, SymbolKind::parameter);
}

NormalMonomial Model::word(const std::string& text) const {
  ScalarExpr e = expr(text);
  if (!e.is_polynomial() || !e.num().is_monomial() || !e.num().leading().coeff.is_one())
    throw ParseError("multiplier word must be a monomial: " + text);
  NormalMonomial w;
  for (const auto& f : e.num().leading().mono.factors()) {
    bool placed = false;
    for (int i = 0; i < alg_->pairs(); ++i) {
      if (alg_->pair(i).q == f.var) w.e[2 * i] = static_cast<std::uint8_t>(f.exp), placed = true;
      if (alg_->pair(i).p == f.var) w.e[2 * i + 1] = static_cast<std::uint8_t>(f.exp), placed = true;
    }
    if (!placed) throw ParseError("multiplier word uses a non-canonical symbol: " + text);
  }
  return w;
}

std::vector<NormalMonomial> Model::vocabulary() const {
  if (!sc_.words.empty()) {
    std::vector<NormalMonomial> out;
    for (const auto& w : sc_.words) out.push_back(word(w));
    return out;
  }
  int pair = sc_.vocabulary_pair.empty() ? 0 : alg_->pair_index(sc_.vocabulary_pair);
  return default_vocabulary(*alg_, pair, sc_.kmax);
}

int Model::nmax(int order, TruncationMode mode) const {
  if (sc_.nmax > 0) return sc_.nmax;
  return std::max(1, mode == TruncationMode::graded ? order : order + 1);
}

ExpectationLimit Model::limit(int order, TruncationMode mode) const {
  ExpectationLimit lim;
  if (mode == TruncationMode::graded) lim.max_grade = order;
  else lim.max_moment_order = order;
  return lim;
}

ConstraintSet Model::constraints(int order, TruncationMode mode) const {
  return factory_->tower(vocabulary(), nmax(order, mode), limit(order, mode));
}

TruncatedSystem Model::truncated(int order, TruncationMode mode) const {
  return truncate_system(*ps_, constraints(order, mode), order, mode);
}

TruncatedSystem Model::solved(int order, TruncationMode mode) const {
  return solve_constraints(truncated(order, mode), policy());
}

std::vector<ScalarExpr> Model::gauge_conditions() const {
  std::vector<ScalarExpr> out;
  for (const auto& g : sc_.gauge) out.push_back(expr(g));
  return out;
}

}  // namespace effcon
