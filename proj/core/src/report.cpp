#include "effcon/report.hpp"

#include <fstream>
#include <sstream>

#include "effcon/error.hpp"

namespace effcon {

Report::Report(std::string title, const Scenario& sc) : title_(std::move(title)) {
  section("scenario");
  add("name", sc.name);
  add("hash", hex64(sc.hash));
}

void Report::section(const std::string& name) { sections_.push_back({name, {}}); }

void Report::add(const std::string& key, const std::string& value) {
  if (sections_.empty()) section("main");
  sections_.back().lines.emplace_back(key, value);
}

std::string Report::text() const {
  std::ostringstream out;
  out << "# " << title_ << "\n";
  for (const auto& s : sections_) {
    out << "\n[" << s.name << "]\n";
    for (const auto& [k, v] : s.lines) out << k << " = " << v << "\n";
  }
  return out.str();
}

std::string Report::machine() const {
  std::ostringstream out;
  out << "report.title=" << title_ << "\n";
  for (const auto& s : sections_)
    for (const auto& [k, v] : s.lines) out << s.name << "." << k << "=" << v << "\n";
  return out.str();
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::pair<std::string, std::string> split_eq(const std::string& s, int line) {
  auto eq = s.find('=');
  if (eq == std::string::npos || s.find('=', eq + 1) != std::string::npos)
    throw ParseError("golden line " + std::to_string(line) + ": expected one '='");
  return {trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
}

// "{f, g} = rhs"
struct BracketText {
  std::string f, g, rhs;
};

BracketText split_bracket(const std::string& s, int line) {
  auto fail = [&] { return ParseError("golden line " + std::to_string(line) + ": expected {f, g} = rhs"); };
  if (s.empty() || s[0] != '{') throw fail();
  int depth = 0;
  std::size_t comma = std::string::npos, close = std::string::npos;
  for (std::size_t i = 1; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == '}') {
      if (depth == 0) {
        close = i;
        break;
      }
      --depth;
    }
    if (c == ',' && depth == 0 && comma == std::string::npos) comma = i;
  }
  if (comma == std::string::npos || close == std::string::npos) throw fail();
  auto [lhs, rhs] = split_eq(s.substr(close + 1), line);
  if (!lhs.empty()) throw fail();
  return {trim(s.substr(1, comma - 1)), trim(s.substr(comma + 1, close - comma - 1)), rhs};
}

Symbol as_symbol(const ScalarExpr& e, const SymbolTable& table, const std::string& text) {
  if (e.is_polynomial() && e.num().is_monomial()) {
    const auto& t = e.num().leading();
    if (t.coeff == GaussianRational(1) && t.mono.factors().size() == 1 && t.mono.factors()[0].exp == 1)
      return t.mono.factors()[0].var;
  }
  (void)table;
  throw Error("not a generator: " + text);
}

std::size_t arity(const std::string& kind) {
  if (kind == "flow" || kind == "relational" || kind == "relational-fixed" || kind == "uncertainty" ||
      kind == "uncertainty-fixed" || kind == "expansion-base" || kind == "expansion-check")
    return 1;
  if (kind == "delta" || kind == "expansion") return 2;
  if (kind == "solve" || kind == "fixed" || kind == "observable" || kind == "bracket" || kind == "dirac" ||
      kind == "value" || kind == "consistency" || kind == "known")
    return 0;
  throw ParseError("unknown golden entry kind: " + kind);
}

}  // namespace

std::vector<GoldenEntry> parse_golden(const std::string& text, int order, TruncationMode mode) {
  std::vector<GoldenEntry> out;
  std::vector<GoldenEntry> known;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    auto colon = s.find(" : ");
    if (colon == std::string::npos) {
      auto w = words(s);
      if (w.size() == 2 && w[0] == "order") {
        order = std::stoi(w[1]);
        continue;
      }
      if (w.size() == 2 && w[0] == "mode") {
        mode = parse_mode(w[1]);
        continue;
      }
      throw ParseError("golden line " + std::to_string(line) + ": missing ' : '");
    }
    auto head = words(s.substr(0, colon));
    if (head.size() < 2) throw ParseError("golden line " + std::to_string(line) + ": expected <kind> <tag>");
    GoldenEntry e;
    e.kind = head[0];
    e.tag = head[1];
    e.args.assign(head.begin() + 2, head.end());
    e.payload = trim(s.substr(colon + 3));
    e.order = order;
    e.mode = mode;
    e.line = line;
    if (e.args.size() != arity(e.kind))
      throw ParseError("golden line " + std::to_string(line) + ": wrong number of arguments for " + e.kind);
    (e.kind == "known" ? known : out).push_back(std::move(e));
  }
  for (const auto& k : known) {
    bool hit = false;
    for (auto& e : out)
      if (e.tag == k.tag) {
        e.known = k.payload;
        hit = true;
      }
    if (!hit) throw ParseError("golden line " + std::to_string(k.line) + ": no entry tagged " + k.tag);
  }
  return out;
}

std::vector<GoldenEntry> load_golden(const std::string& path, int order, TruncationMode mode) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open golden file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_golden(ss.str(), order, mode);
}

struct GoldenComparer::Cache {
  using Key = std::pair<int, TruncationMode>;
  std::map<Key, TruncatedSystem> solved, fixed, dirac_fixed;
  std::map<Key, DiracStructure> dirac;
  std::map<Key, std::vector<ObservableRecord>> observables;
  std::map<std::string, std::pair<Symbol, ScalarExpr>> values;
  std::vector<std::string> value_order;
  std::map<std::string, ExpansionTranscription> expansions;
};

GoldenComparer::GoldenComparer(Model& model) : model_(&model), cache_(std::make_unique<Cache>()) {}
GoldenComparer::~GoldenComparer() = default;

const TruncatedSystem& GoldenComparer::solved(int order, TruncationMode mode) {
  auto key = std::make_pair(order, mode);
  auto it = cache_->solved.find(key);
  if (it == cache_->solved.end()) it = cache_->solved.emplace(key, model_->solved(order, mode)).first;
  return it->second;
}

const TruncatedSystem& GoldenComparer::fixed(int order, TruncationMode mode) {
  auto key = std::make_pair(order, mode);
  auto it = cache_->fixed.find(key);
  if (it == cache_->fixed.end())
    it = cache_->fixed.emplace(key, gauge_fix(solved(order, mode), model_->gauge_conditions())).first;
  return it->second;
}

const DiracStructure& GoldenComparer::dirac(int order, TruncationMode mode) {
  auto key = std::make_pair(order, mode);
  auto it = cache_->dirac.find(key);
  if (it == cache_->dirac.end()) {
    const auto& sys = solved(order, mode);
    TruncatedSystem f = sys;
    auto d = gauge_fix_and_dirac(sys, model_->scenario().second_class, model_->gauge_conditions(), &f);
    cache_->dirac_fixed.insert_or_assign(key, std::move(f));
    it = cache_->dirac.emplace(key, std::move(d)).first;
  }
  return it->second;
}

namespace {

ExpansionTranscription& transcription(std::map<std::string, ExpansionTranscription>& m, const Model& model,
                                      const std::string& word) {
  auto it = m.find(word);
  if (it == m.end()) {
    ExpansionTranscription t;
    t.name = word;
    t.word = model.word(word);
    it = m.emplace(word, std::move(t)).first;
  }
  return it->second;
}

}  // namespace

std::vector<GoldenResult> GoldenComparer::compare(const std::vector<GoldenEntry>& entries) {
  // Transcriptions first, so checks may precede the blocks they use.
  for (const auto& e : entries) {
    if (e.kind == "expansion") {
      auto& t = transcription(cache_->expansions, *model_, e.args[0]);
      std::size_t k = std::stoul(e.args[1]);
      if (t.blocks.size() <= k) t.blocks.resize(k + 1);
      t.blocks[k] = model_->expr(e.payload);
    } else if (e.kind == "expansion-base") {
      transcription(cache_->expansions, *model_, e.args[0]).base = model_->expr(e.payload);
    }
  }
  std::vector<GoldenResult> out;
  for (const auto& e : entries) {
    if (e.kind == "expansion" || e.kind == "expansion-base") continue;
    GoldenResult r;
    try {
      r = run(e);
    } catch (const Error& err) {
      r.ok = false;
      r.detail = err.what();
    }
    r.kind = e.kind;
    r.tag = e.tag;
    r.known = e.known;
    out.push_back(std::move(r));
  }
  return out;
}

GoldenResult GoldenComparer::run(const GoldenEntry& e) {
  const Model& m = *model_;
  const auto& table = m.table();
  auto str = [&](const ScalarExpr& x) { return to_string(x, table); };
  GoldenResult r;
  auto weak = [&](const TruncatedSystem& sys, const ScalarExpr& got, const ScalarExpr& want) {
    ScalarExpr d = weak_reduce(sys, got - want);
    r.ok = d.is_zero();
    if (!r.ok) r.detail = "difference " + str(d);
  };

  if (e.kind == "solve" || e.kind == "fixed") {
    auto [lhs, rhs] = split_eq(e.payload, e.line);
    const auto& sys = e.kind == "solve" ? solved(e.order, e.mode) : fixed(e.order, e.mode);
    weak(sys, m.expr(lhs), m.expr(rhs));
  } else if (e.kind == "flow") {
    const auto& sys = solved(e.order, e.mode);
    std::string label = e.args[0];
    int sign = 1;
    if (!label.empty() && label[0] == '-') {
      sign = -1;
      label = label.substr(1);
    }
    auto [lhs, rhs] = split_eq(e.payload, e.line);
    auto flow = gauge_flow(sys, label);
    weak(sys, ScalarExpr(sign) * flow.on(as_symbol(m.expr(lhs), table, lhs)), m.expr(rhs));
  } else if (e.kind == "observable" || e.kind == "value") {
    const auto& sys = solved(e.order, e.mode);
    ScalarExpr o = m.expr(e.payload);
    auto fails = observable_failures(sys, o);
    if (!fails.empty()) {
      r.detail = "bracket with " + fails.front().label + " is " + str(fails.front().expr);
      return r;
    }
    auto key = std::make_pair(e.order, e.mode);
    auto it = cache_->observables.find(key);
    if (it == cache_->observables.end())
      it = cache_->observables
               .emplace(key, find_observables(sys, {m.scenario().moment_order, m.scenario().expectation_degree}))
               .first;
    r.ok = in_observable_span(sys, it->second, o);
    if (!r.ok) r.detail = "observable outside the span that was found";
    if (e.kind == "value") {
      Symbol v = model_->value_symbol(e.tag);
      if (!cache_->values.count(e.tag)) cache_->value_order.push_back(e.tag);
      cache_->values.insert_or_assign(e.tag, std::make_pair(v, o));
    }
  } else if (e.kind == "bracket") {
    auto b = split_bracket(e.payload, e.line);
    const auto& sys = solved(e.order, e.mode);
    weak(sys, m.space().poisson_bracket(m.expr(b.f), m.expr(b.g)), m.expr(b.rhs));
  } else if (e.kind == "dirac") {
    auto b = split_bracket(e.payload, e.line);
    const auto& d = dirac(e.order, e.mode);
    const auto& f = cache_->dirac_fixed.at({e.order, e.mode});
    weak(f, d.bracket(f, m.expr(b.f), m.expr(b.g)), m.expr(b.rhs));
  } else if (e.kind == "delta") {
    const auto& d = dirac(e.order, e.mode);
    const auto& f = cache_->dirac_fixed.at({e.order, e.mode});
    std::size_t i = std::stoul(e.args[0]), j = std::stoul(e.args[1]);
    if (i < 1 || j < 1 || i > d.delta.size() || j > d.delta.size()) throw Error("delta index out of range");
    ScalarExpr got = weak_reduce(f, d.delta[i - 1][j - 1]);
    weak(f, got, m.expr(e.payload));
    if (!r.ok) r.detail = d.names[i - 1] + " x " + d.names[j - 1] + ": got " + str(got);
  } else if (e.kind == "relational" || e.kind == "relational-fixed") {
    const auto& sys = e.kind == "relational" ? solved(e.order, e.mode) : fixed(e.order, e.mode);
    std::vector<std::pair<Symbol, ScalarExpr>> obs;
    for (const auto& name : cache_->value_order) obs.push_back(cache_->values.at(name));
    Symbol time = table.at(m.scenario().time);
    Symbol target = as_symbol(m.expr(e.args[0]), table, e.args[0]);
    ScalarExpr got = relational_solution(sys, time, target, obs);
    r.ok = got == m.expr(e.payload);
    if (!r.ok) r.detail = "got " + str(got);
  } else if (e.kind == "uncertainty" || e.kind == "uncertainty-fixed") {
    const auto& sys = e.kind == "uncertainty" ? solved(e.order, e.mode) : fixed(e.order, e.mode);
    int pair = -1;
    for (std::size_t i = 0; i < m.scenario().pairs.size(); ++i)
      if (m.scenario().pairs[i].first == e.args[0]) pair = static_cast<int>(i);
    if (pair < 0) throw Error("unknown pair: " + e.args[0]);
    auto u = check_uncertainty(sys, pair);
    r.ok = to_string(u.status) == e.payload;
    if (!r.ok) r.detail = "status " + to_string(u.status) + ", excess " + str(u.excess);
  } else if (e.kind == "consistency") {
    const auto& sys = solved(e.order, e.mode);
    auto inc = detect_inconsistency(sys);
    auto w = words(e.payload);
    if (w.empty()) throw ParseError("golden line " + std::to_string(e.line) + ": empty consistency");
    std::string rest = trim(e.payload.substr(w[0].size()));
    if (w[0] == "consistent") {
      r.ok = inc.consistent();
    } else if (w[0] == "hard" || w[0] == "soft") {
      ScalarExpr want = m.expr(rest);
      for (const auto& x : w[0] == "hard" ? inc.hard : inc.soft) r.ok |= x.expr == want;
    } else {
      throw ParseError("golden line " + std::to_string(e.line) + ": unknown consistency " + w[0]);
    }
    if (!r.ok) {
      std::string d;
      for (const auto& x : inc.hard) d += "hard " + str(x.expr) + "; ";
      for (const auto& x : inc.soft) d += "soft " + str(x.expr) + "; ";
      r.detail = d.empty() ? "consistent" : d;
    }
  } else if (e.kind == "expansion-check") {
    auto& ex = cache_->expansions;
    if (!ex.count("1")) throw Error("no transcription for the word 1");
    if (!ex.count(e.args[0])) throw Error("no transcription for the word " + e.args[0]);
    const auto& sc = m.scenario();
    Symbol momentum = table.at(sc.pairs[m.time_pair()].second);
    Symbol cc = model_->value_symbol("Cc");
    r.ok = true;
    std::istringstream in(e.payload);
    for (std::string tok; std::getline(in, tok, ',');) {
      int n = std::stoi(trim(tok));
      auto c = verify_expansion(m.factory(), momentum, cc, ex.at("1"), ex.at(e.args[0]), n);
      if (!c.match) {
        r.ok = false;
        r.detail += "n=" + std::to_string(n) + ": " + str(c.difference) + "; ";
      }
    }
  } else {
    throw Error("unsupported golden entry kind: " + e.kind);
  }
  return r;
}

std::size_t count_failures(const std::vector<GoldenResult>& rs) {
  std::size_t n = 0;
  for (const auto& r : rs) n += r.known.empty() ? !r.ok : r.ok;
  return n;
}

}  // namespace effcon
