#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "effcon/error.hpp"
#include "effcon/report.hpp"

using namespace effcon;

namespace {

struct Options {
  std::string scenario;
  std::string expression;
  int order = -1;
  std::string mode;
  int sharp = -1;
  std::string time;
  int kmax = -1;
  std::string out;
  std::string format = "text";
  std::vector<std::string> golden;
};

Scenario load(const Options& o) {
  Scenario sc = load_scenario(o.scenario);
  if (!o.time.empty()) {
    bool known = false;
    for (const auto& [q, p] : sc.pairs) known |= q == o.time;
    if (!known) throw ParseError("--time: no pair with position " + o.time);
    sc.time = o.time;
  }
  if (o.kmax >= 0) sc.kmax = o.kmax;
  return sc;
}

int order_of(const Options& o, const Scenario& sc) {
  if (o.sharp >= 0) return o.sharp;
  return o.order >= 0 ? o.order : sc.order;
}

TruncationMode mode_of(const Options& o, const Scenario& sc) {
  if (o.sharp >= 0) return TruncationMode::sharp;
  return o.mode.empty() ? sc.mode : parse_mode(o.mode);
}

void emit(const Report& r, const Options& o) {
  std::cout << (o.format == "machine" ? r.machine() : r.text());
  if (o.out.empty()) return;
  std::filesystem::create_directories(o.out);
  std::ofstream(std::filesystem::path(o.out) / "report.txt") << r.text();
  std::ofstream(std::filesystem::path(o.out) / "report.kv") << r.machine();
}

void header(Report& r, int order, TruncationMode mode) {
  r.section("truncation");
  r.add("order", order);
  r.add("mode", to_string(mode));
}

// Reports inconsistencies and returns whether the system is consistent.
bool consistency(Report& r, const Model& m, const TruncatedSystem& sys) {
  auto inc = detect_inconsistency(sys);
  r.section("consistency");
  r.add("consistent", inc.consistent() ? "yes" : "no");
  for (const auto& h : inc.hard) {
    std::string msg = to_string(h.expr, m.table()) + " = 0";
    r.add("hard[" + h.label + "]", msg);
    std::cerr << "hard inconsistency: " << msg << " [" << h.label << "]\n";
  }
  for (const auto& s : inc.soft) {
    std::string g = to_string(s.expr, m.table());
    r.add("soft[" + s.label + "]", g + " = 0");
    std::cerr << "soft inconsistency: " << g << " = 0 [" << s.label << "]\n";
  }
  for (const auto& u : inc.unresolved) r.add("unresolved[" + u.label + "]", to_string(u.expr, m.table()));
  return inc.consistent();
}

void solutions(Report& r, const Model& m, const TruncatedSystem& sys) {
  r.section("solutions");
  for (const auto& e : sys.solutions())
    r.add(m.table().name(e.var), to_string(e.value, m.table()) + "  [" + e.label + "]");
  r.section("assumptions");
  for (Symbol s : sys.assumptions()) r.add(m.table().name(s), "nonzero");
  r.section("residuals");
  for (const auto& x : sys.residuals()) r.add(x.label, to_string(x.expr, m.table()));
  if (!sys.trivial().empty()) {
    r.section("trivial");
    for (const auto& t : sys.trivial()) r.add(t, "0");
  }
}

int cmd_bracket(const Options& o) {
  Scenario sc;
  if (o.scenario.empty()) {
    sc = parse_scenario("[system]\nname = pair\npairs = q:p\nconstraint = qhat(q)\n[vocabulary]\nwords = 1\n");
  } else {
    sc = load(o);
  }
  Model m(std::move(sc));
  std::string s = o.expression;
  auto open = s.find('{'), close = s.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw ParseError("expected {f, g}: " + s);
  std::string inner = s.substr(open + 1, close - open - 1);
  int depth = 0;
  std::size_t comma = std::string::npos;
  for (std::size_t i = 0; i < inner.size() && comma == std::string::npos; ++i) {
    char c = inner[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (c == ',' && depth == 0) comma = i;
  }
  if (comma == std::string::npos) throw ParseError("expected {f, g}: " + s);
  ScalarExpr v = m.space().poisson_bracket(m.expr(inner.substr(0, comma)), m.expr(inner.substr(comma + 1)));
  std::string text = to_string(v, m.table());
  if (o.format == "machine")
    std::cout << "bracket.value=" << text << "\n";
  else
    std::cout << text << "\n";
  return 0;
}

int cmd_generate(const Options& o) {
  Model m(load(o));
  int n = order_of(o, m.scenario());
  auto mode = mode_of(o, m.scenario());
  auto set = m.constraints(n, mode);
  Report r("generate", m.scenario());
  header(r, n, mode);
  r.add("nmax", m.nmax(n, mode));
  r.section("constraints");
  for (const auto& c : set.items()) r.add(c.label, to_string(c.expr, m.table()));
  emit(r, o);
  return 0;
}

int cmd_close(const Options& o) {
  Model m(load(o));
  int n = order_of(o, m.scenario());
  auto mode = mode_of(o, m.scenario());
  auto res = close_constraint_set(m.factory(), m.constraints(n, mode), {n, mode, m.policy(), 4});
  Report r("close", m.scenario());
  header(r, n, mode);
  r.section("closure");
  r.add("closed", res.closed ? "yes" : "no");
  r.add("rounds", res.rounds);
  r.add("size", static_cast<long>(res.set.size()));
  r.section("additions");
  for (const auto& a : res.additions) r.add(a.label, a.origin);
  r.section("remaining");
  for (const auto& f : res.remaining) r.add("{" + f.a + ", " + f.b + "}", to_string(f.residue, m.table()));
  emit(r, o);
  return res.closed ? 0 : 1;
}

int cmd_truncate(const Options& o) {
  Model m(load(o));
  int n = order_of(o, m.scenario());
  auto mode = mode_of(o, m.scenario());
  auto sys = m.truncated(n, mode);
  Report r("truncate", m.scenario());
  header(r, n, mode);
  r.section("constraints");
  for (const auto& c : sys.constraints()) r.add(c.label, to_string(c.expr, m.table()));
  r.section("trivial");
  for (const auto& t : sys.trivial()) r.add(t, "0");
  emit(r, o);
  return 0;
}

int cmd_solve(const Options& o) {
  Model m(load(o));
  int n = order_of(o, m.scenario());
  auto mode = mode_of(o, m.scenario());
  auto sys = m.solved(n, mode);
  Report r("solve", m.scenario());
  header(r, n, mode);
  solutions(r, m, sys);
  bool ok = consistency(r, m, sys);
  emit(r, o);
  return ok ? 0 : 1;
}

int cmd_flows(const Options& o) {
  Model m(load(o));
  int n = order_of(o, m.scenario());
  auto mode = mode_of(o, m.scenario());
  auto sys = m.solved(n, mode);
  Report r("flows", m.scenario());
  header(r, n, mode);
  for (const auto& c : sys.constraints()) {
    auto f = gauge_flow(sys, c.label);
    r.section("flow " + c.label);
    for (const auto& [g, v] : f.flow) r.add(m.table().name(g), to_string(v, m.table()));
  }
  auto fr = flow_rank(sys);
  r.section("rank");
  r.add("free_expectations", fr.free_expectations);
  r.add("free_moments", fr.free_moments);
  r.add("rank", fr.rank);
  r.add("expectation_rank", fr.expectation_rank);
  r.add("gauge_moments", fr.gauge_moments());
  r.add("physical_moments", fr.physical_moments());
  emit(r, o);
  return 0;
}

int cmd_observables(const Options& o) {
  Model m(load(o));
  int n = order_of(o, m.scenario());
  auto mode = mode_of(o, m.scenario());
  auto sys = m.solved(n, mode);
  auto obs = find_observables(sys, {m.scenario().moment_order, m.scenario().expectation_degree});
  Report r("observables", m.scenario());
  header(r, n, mode);
  r.section("observables");
  r.add("count", static_cast<long>(obs.size()));
  for (const auto& x : obs) r.add(x.name, to_string(x.expr, m.table()));
  emit(r, o);
  return 0;
}

int cmd_dirac(const Options& o) {
  Model m(load(o));
  int n = order_of(o, m.scenario());
  auto mode = mode_of(o, m.scenario());
  if (m.scenario().second_class.empty()) throw ParseError("scenario declares no second-class constraints");
  auto sys = m.solved(n, mode);
  TruncatedSystem fixed = sys;
  auto d = gauge_fix_and_dirac(sys, m.scenario().second_class, m.gauge_conditions(), &fixed);
  Report r("dirac", m.scenario());
  header(r, n, mode);
  r.section("phi");
  for (std::size_t i = 0; i < d.names.size(); ++i) r.add(std::to_string(i + 1), d.names[i]);
  r.section("delta");
  for (std::size_t i = 0; i < d.delta.size(); ++i)
    for (std::size_t j = 0; j < d.delta.size(); ++j)
      r.add(std::to_string(i + 1) + "," + std::to_string(j + 1), to_string(weak_reduce(fixed, d.delta[i][j]), m.table()));
  r.section("residual");
  for (Symbol g : d.residual) r.add(m.table().name(g), "free");
  r.section("brackets");
  for (std::size_t i = 0; i < d.residual.size(); ++i)
    for (std::size_t j = i + 1; j < d.residual.size(); ++j) {
      ScalarExpr f = ScalarExpr::var(d.residual[i]), g = ScalarExpr::var(d.residual[j]);
      r.add("{" + m.table().name(d.residual[i]) + ", " + m.table().name(d.residual[j]) + "}",
            to_string(weak_reduce(fixed, d.bracket(fixed, f, g)), m.table()));
    }
  emit(r, o);
  return 0;
}

int cmd_check(const Options& o) {
  Model m(load(o));
  int n = order_of(o, m.scenario());
  auto mode = mode_of(o, m.scenario());
  auto sys = m.solved(n, mode);
  Report r("check", m.scenario());
  header(r, n, mode);
  bool ok = consistency(r, m, sys);

  r.section("uncertainty");
  for (std::size_t i = 0; i < m.scenario().pairs.size(); ++i) {
    auto u = check_uncertainty(sys, static_cast<int>(i));
    r.add(m.scenario().pairs[i].first, to_string(u.status) + "  excess " + to_string(u.excess, m.table()));
  }

  std::vector<std::string> files = o.golden;
  if (files.empty())
    for (const auto& f : m.scenario().golden)
      files.push_back((std::filesystem::path(m.scenario().directory) / f).string());
  GoldenComparer cmp(m);
  for (const auto& f : files) {
    auto results = cmp.compare(load_golden(f, n, mode));
    r.section("golden " + std::filesystem::path(f).filename().string());
    std::size_t matched = 0;
    for (const auto& x : results) {
      std::string status = x.ok ? "match" : "mismatch";
      if (!x.known.empty()) status += (x.ok ? " (expected mismatch now agrees: " : " (known: ") + x.known + ")";
      if (!x.detail.empty()) status += "  " + x.detail;
      r.add(x.kind + " " + x.tag, status);
      matched += x.ok;
    }
    std::size_t failed = count_failures(results);
    r.add("matched", static_cast<long>(matched));
    r.add("entries", static_cast<long>(results.size()));
    r.add("failures", static_cast<long>(failed));
    if (failed) {
      ok = false;
      std::cerr << "golden failures in " << f << ": " << failed << "\n";
    }
  }
  emit(r, o);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective constraint analysis"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* s, bool scenario_positional) {
    if (scenario_positional) s->add_option("scenario", o.scenario, "Scenario file")->required();
    s->add_option("--order", o.order, "Truncation order N");
    s->add_option("--mode", o.mode, "Truncation mode")->check(CLI::IsMember({"graded", "sharp"}));
    s->add_option("--sharp", o.sharp, "Sharp truncation at order N");
    s->add_option("--time", o.time, "Position label of the internal-time pair");
    s->add_option("--kmax", o.kmax, "Highest power of the vocabulary momentum");
    s->add_option("--out", o.out, "Directory for report.txt and report.kv");
    s->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "machine"}));
    s->add_option("--golden", o.golden, "Golden file(s), replacing those of the scenario");
  };

  std::map<std::string, std::function<int(const Options&)>> run{
      {"bracket", cmd_bracket}, {"generate", cmd_generate}, {"close", cmd_close},
      {"truncate", cmd_truncate}, {"solve", cmd_solve},     {"flows", cmd_flows},
      {"observables", cmd_observables}, {"dirac", cmd_dirac}, {"check", cmd_check}};

  auto* b = app.add_subcommand("bracket", "Evaluate a Poisson bracket {f, g}");
  b->add_option("expression", o.expression, "Bracket expression")->required();
  b->add_option("--scenario", o.scenario, "Scenario providing the symbols");
  common(b, false);
  common(app.add_subcommand("generate", "List the effective constraints"), true);
  common(app.add_subcommand("close", "Close the constraint set under brackets"), true);
  common(app.add_subcommand("truncate", "Truncate the constraints"), true);
  common(app.add_subcommand("solve", "Solve the truncated constraints"), true);
  common(app.add_subcommand("flows", "Gauge flows and their rank"), true);
  common(app.add_subcommand("observables", "Find observables"), true);
  common(app.add_subcommand("dirac", "Gauge fixing and Dirac brackets"), true);
  common(app.add_subcommand("check", "Consistency, uncertainty and golden comparisons"), true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    return run.at(app.get_subcommands().front()->get_name())(o);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: bad number: " << e.what() << "\n";
    return 2;
  }
}
