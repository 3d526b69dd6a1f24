// Acceptance run: one line per criterion, then the failing sub-checks with
// their analysis. Every comparison is an exact symbolic equality (tolerance 0).
//
// Exit status is 0 when each failing sub-check is a listed known discrepancy and
// every listed discrepancy still reproduces; 1 otherwise.

#include <functional>
#include <iostream>
#include <random>

#include "effcon/report.hpp"

using namespace effcon;

namespace {

std::string scenario_path(const std::string& name) { return std::string(EFFCON_SCENARIO_DIR) + "/" + name + ".scn"; }
std::string golden_path(const std::string& name) {
  return std::string(EFFCON_SCENARIO_DIR) + "/golden/" + name + ".gld";
}

struct Check {
  std::string name;
  bool ok = false;
  std::string detail;
  std::string known;  // reason, when this sub-check is a listed discrepancy
};

struct Criterion {
  int id;
  std::string title;
  std::vector<Check> checks;
  std::vector<std::string> notes;

  void add(std::string name, bool ok, std::string detail = {}, std::string known = {}) {
    checks.push_back({std::move(name), ok, std::move(detail), std::move(known)});
  }
  bool green() const {
    for (const auto& c : checks)
      if (!c.ok) return false;
    return !checks.empty();
  }
  // Failing sub-checks not on the known list, plus known ones that now pass.
  int unexplained() const {
    int n = 0;
    for (const auto& c : checks) n += c.known.empty() ? !c.ok : c.ok;
    return n;
  }
};

void add_golden(Criterion& c, GoldenComparer& cmp, const std::string& file) {
  auto entries = load_golden(golden_path(file), 2, TruncationMode::graded);
  for (const auto& r : cmp.compare(entries)) c.add(file + ": " + r.kind + " " + r.tag, r.ok, r.detail, r.known);
}

Symbol symbol_of(const ScalarExpr& e) { return e.num().leading().mono.factors().front().var; }

std::vector<Symbol> one_pair_moments(const PhaseSpace& ps, int max_order) {
  std::vector<Symbol> out;
  for (int n = 2; n <= max_order; ++n)
    for (int a = n; a >= 0; --a) out.push_back(symbol_of(ps.G({a, n - a})));
  return out;
}

Criterion dual_bracket() {
  Criterion c{1, "closed-form moment bracket equals the commutator route, one pair, a+b <= 5, c+d <= 5", {}, {}};
  Model m(parse_scenario("[system]\nname = pair\npairs = q:p\nconstraint = qhat(q)\n"));
  const auto& ps = m.space();
  int cases = 0, agree = 0, unweighted_differ = 0;
  std::string first_bad;
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; a + b <= 5; ++b)
      for (int cc = 0; cc <= 5; ++cc)
        for (int d = 0; cc + d <= 5; ++d) {
          if (a + b < 2 || cc + d < 2) continue;
          ++cases;
          ScalarExpr route = ps.poisson_bracket(ps.G({a, b}), ps.G({cc, d}));
          if (ps.gbracket_closed_form(a, b, cc, d) == route)
            ++agree;
          else if (first_bad.empty())
            first_bad = "G[" + std::to_string(a) + "," + std::to_string(b) + "] x G[" + std::to_string(cc) + "," +
                        std::to_string(d) + "]";
          unweighted_differ += !(ps.gbracket_closed_form_unweighted(a, b, cc, d) == route);
        }
  c.add("all " + std::to_string(cases) + " moment pairs", agree == cases,
        std::to_string(cases - agree) + " differ, first " + first_bad);
  c.notes.push_back(std::to_string(agree) + "/" + std::to_string(cases) + " agree with j!k! weights in the hbar series");
  c.notes.push_back("without the weights " + std::to_string(unweighted_differ) + " cases differ at O(hbar^2)");
  return c;
}

Criterion jacobi() {
  Criterion c{2, "Jacobi identity: one-pair generators of total order <= 6, 200 random two-pair triples", {}, {}};
  Model one(parse_scenario("[system]\nname = pair\npairs = q:p\nconstraint = qhat(q)\n"));
  const auto& ps = one.space();
  auto pb = [](const PhaseSpace& s, const ScalarExpr& x, const ScalarExpr& y) { return s.poisson_bracket(x, y); };
  auto jac = [&](const PhaseSpace& s, const ScalarExpr& x, const ScalarExpr& y, const ScalarExpr& z) {
    return pb(s, x, pb(s, y, z)) + pb(s, y, pb(s, z, x)) + pb(s, z, pb(s, x, y));
  };
  std::vector<std::pair<ScalarExpr, int>> gens{{one.expr("q"), 1}, {one.expr("p"), 1}};
  for (Symbol g : one_pair_moments(ps, 4)) gens.push_back({ScalarExpr::var(g), sym::order(g)});
  int triples = 0, ok = 0;
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j)
      for (std::size_t k = j + 1; k < gens.size(); ++k) {
        if (gens[i].second + gens[j].second + gens[k].second > 6) continue;
        ++triples;
        ok += jac(ps, gens[i].first, gens[j].first, gens[k].first).is_zero();
      }
  c.add("one pair, " + std::to_string(triples) + " distinct triples", ok == triples,
        std::to_string(triples - ok) + " violations");

  Model two(parse_scenario("[system]\nname = two\npairs = q:p, t:p_t\nparameters = M\nconstraint = phat(p_t)\n"));
  const auto& ps2 = two.space();
  std::vector<ScalarExpr> pool;
  for (const char* s : {"q", "p", "t", "p_t"}) pool.push_back(two.expr(s));
  for (int n = 2; n <= 3; ++n)
    for (int a = 0; a <= n; ++a)
      for (int b = 0; a + b <= n; ++b)
        for (int e = 0; a + b + e <= n; ++e) pool.push_back(ps2.G({a, b, e, n - a - b - e}));
  std::mt19937 rng(20240611);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<int> coef(-3, 3), terms(1, 2), width(1, 2);
  auto sample = [&] {
    ScalarExpr e;
    for (int t = terms(rng); t > 0; --t) {
      int k = coef(rng);
      ScalarExpr x(k == 0 ? 1 : k);
      for (int w = width(rng); w > 0; --w) x = x * pool[pick(rng)];
      e += x;
    }
    return e;
  };
  int good = 0;
  for (int s = 0; s < 200; ++s) {
    ScalarExpr x = sample(), y = sample(), z = sample();
    good += jac(ps2, x, y, z).is_zero();
  }
  c.add("two pairs, 200 random triples", good == 200, std::to_string(200 - good) + " violations");
  c.notes.push_back("generators are expectation values and moments; random samples are products of up to two "
                    "generators of order <= 3 with small integer coefficients");
  return c;
}

Criterion linear_constraint() {
  Criterion c{3, "constraint q = 0: G^qp = i*hbar/2, saturated uncertainty, consistent sharp truncations", {}, {}};
  Model lin(load_scenario(scenario_path("linear_q")));
  auto sys = lin.solved(3, TruncationMode::graded);
  Symbol gqp = symbol_of(lin.expr("G[1,1]"));
  std::string from;
  for (const auto& e : sys.solutions())
    if (e.var == gqp) from = e.label;
  c.add("G[1,1] solved from C[f=p,n=1]", from == "C[f=p,n=1]", "solved from " + from);
  c.add("G[1,1] = i*hbar/2", weak_reduce(sys, lin.expr("G[1,1] - i*hbar/2")).is_zero());
  auto u = check_uncertainty(sys, 0);
  c.add("uncertainty saturated", u.status == UncertaintyStatus::saturated && u.excess.is_zero(),
        to_string(u.status) + ", excess " + to_string(u.excess, lin.table()));
  GoldenComparer cmp(lin);
  add_golden(c, cmp, "linear_q");

  Model sharp(load_scenario(scenario_path("linear_q_sharp")));
  for (int n = 0; n <= 5; ++n) {
    auto s = sharp.solved(n, TruncationMode::sharp);
    auto inc = detect_inconsistency(s);
    std::string d;
    for (const auto& h : inc.hard) d += "hard " + to_string(h.expr, sharp.table()) + " in " + h.label + "; ";
    for (const auto& h : inc.soft) d += "soft " + to_string(h.expr, sharp.table()) + " in " + h.label + "; ";
    std::string known;
    if (n <= 1)
      known =
          "no moment of order 2 exists at N <= 1, so C[f=p,n=1] = q*p + G[1,1] - i*hbar/2 loses G[1,1] and "
          "leaves -i*hbar/2 = 0; the consistency argument needs G_{0,N-1} = 0, i.e. N >= 2";
    c.add("sharp N=" + std::to_string(n) + " consistent", inc.consistent(), d, known);
  }
  return c;
}

Criterion two_component() {
  Criterion c{4, "two-component system at grade 2: constraints, flows, observables, Dirac structure", {}, {}};
  Model m(load_scenario(scenario_path("two_component")));
  GoldenComparer cmp(m);
  const auto& sys = cmp.solved(2, TruncationMode::graded);
  c.add("five constraints", sys.constraints().size() == 5, std::to_string(sys.constraints().size()));
  c.add("five independent pivots", sys.solutions().size() == 5, std::to_string(sys.solutions().size()));
  c.add("consistent", detect_inconsistency(sys).consistent());
  c.add("first class", check_first_class(sys).empty());
  auto fr = flow_rank(sys);
  c.add("6 free moments: 3 gauge, 3 physical",
        fr.free_moments == 6 && fr.gauge_moments() == 3 && fr.physical_moments() == 3,
        std::to_string(fr.free_moments) + "/" + std::to_string(fr.gauge_moments()) + "/" +
            std::to_string(fr.physical_moments()));

  // Flow identities: flow(G^qp) = -flow(G_{q1p1}), flow(G^q_{q1}) = -(flow(G^qq) + flow(G_{q1q1}))/2.
  auto symbol = [&](const char* s) { return symbol_of(m.expr(s)); };
  Symbol gqp = symbol("G[1,1;0,0]"), g11 = symbol("G[0,0;1,1]"), gq1 = symbol("G[0,1;0,1]"),
         gqq = symbol("G[0,2;0,0]"), g1q1q = symbol("G[0,0;0,2]");
  for (const char* label : {"C[f=p,n=1]", "C[f=q,n=1]", "C[f=p1,n=1]", "C[f=q1,n=1]"}) {
    auto f = gauge_flow(sys, label);
    bool ok = weak_reduce(sys, f.on(gqp) + f.on(g11)).is_zero() &&
              weak_reduce(sys, ScalarExpr(2) * f.on(gq1) + f.on(gqq) + f.on(g1q1q)).is_zero();
    c.add(std::string("flow identities for ") + label, ok);
  }
  auto obs = find_observables(sys, {m.scenario().moment_order, m.scenario().expectation_degree});
  c.add("three observables found", obs.size() == 3, std::to_string(obs.size()));
  const auto& d = cmp.dirac(2, TruncationMode::graded);
  c.add("Delta is 6x6 and invertible", d.delta.size() == 6 && !d.inverse.empty());
  add_golden(c, cmp, "two_component");
  c.notes.push_back("second-class set oriented as in the displayed flows: phi2 = -C_q, phi3 = -C_p1");
  return c;
}

Criterion free_particle() {
  Criterion c{5, "free particle: sharp inconsistencies, grade-2 and grade-3 solutions, observables, relational time",
              {}, {}};
  Model m(load_scenario(scenario_path("free_particle")));
  GoldenComparer cmp(m);
  add_golden(c, cmp, "free_particle");
  return c;
}

Criterion expansions() {
  Criterion c{6, "generated <f C^n> for f = 1, q, t, p_t, p and n <= 3 match the transcribed expansions mod order 4",
              {}, {}};
  Model m(load_scenario(scenario_path("free_particle")));
  GoldenComparer cmp(m);
  add_golden(c, cmp, "free_particle_expansions");
  return c;
}

std::uint64_t enumerate(int slots, int m, bool last_free) {
  std::uint64_t count = 0;
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == slots - 1) {
      if (last_free || left == 0) ++count;
      return;
    }
    for (int v = 0; v <= left; ++v) rec(pos + 1, left - v);
  };
  rec(0, m);
  return count;
}

Criterion counting() {
  Criterion c{7, "moment and constraint counts", {}, {}};
  c.add("count_moments(2, 2) = 10", count_moments(2, 2) == 10);
  c.add("count_moments(2, 1) = 3", count_moments(2, 1) == 3);
  c.add("count_unrestricted(2, 2) = 6", count_unrestricted(2, 2) == 6);
  int bad = 0, total = 0;
  for (int pairs = 1; pairs <= 3; ++pairs)
    for (int order = 2; order <= 8; ++order) {
      ++total;
      bad += count_moments(order, pairs) != enumerate(2 * pairs, order, true);
      bad += count_unrestricted(order, pairs) != enumerate(2 * pairs, order, false);
    }
  c.add("closed forms against enumeration, M <= 8, pairs <= 3", bad == 0,
        std::to_string(bad) + " of " + std::to_string(2 * total) + " differ");
  return c;
}

Criterion symmetrized() {
  Criterion c{8, "symmetrized constraint variant fails the first-class check on the free particle", {}, {}};
  Model m(load_scenario(scenario_path("free_particle")));
  const std::string why =
      "every bracket of the symmetrized set vanishes on the surface those constraints cut out. The argument for "
      "failure concerns states annihilated by C, where the unsymmetrized <f C^n> vanish; that is a different "
      "surface (see the note on S[f=q,n=1]) and the first-class check only tests the symmetrized one. A cubic "
      "potential p_t + p^2/2M + L q^3, closed at N=3 and then symmetrized, is also first class (checked outside "
      "this run, about 5 minutes)";
  {
    auto lim = m.limit(2, TruncationMode::graded);
    auto sq = m.factory().symmetrized(m.word("q"), 1, lim);
    c.notes.push_back("on the unsymmetrized grade-2 surface S[f=q,n=1] reduces to " +
                      to_string(weak_reduce(m.solved(2, TruncationMode::graded), sq.expr), m.table()));
  }
  for (int n : {2, 3}) {
    auto plain = m.constraints(n, TruncationMode::graded);
    ConstraintSet set(m.algebra(), m.factory().classical(), plain.limit());
    for (const auto& x : plain.items())
      set.insert(x.word.is_one() ? x : m.factory().symmetrized(x.word, x.n, plain.limit()));
    auto sys = solve_constraints(truncate_system(m.space(), set, n, TruncationMode::graded), m.policy());
    auto fails = check_first_class(sys);
    std::string d = std::to_string(set.size()) + " constraints, " + std::to_string(fails.size()) + " failing brackets";
    c.add("symmetrized set at N=" + std::to_string(n) + " is not first class", !fails.empty(), d, why);
    c.add("unsymmetrized set at N=" + std::to_string(n) + " is first class",
          check_first_class(m.solved(n, TruncationMode::graded)).empty());
  }
  return c;
}

}  // namespace

int main() {
  std::vector<std::function<Criterion()>> all{dual_bracket,  jacobi,   linear_constraint, two_component,
                                              free_particle, expansions, counting,          symmetrized};
  std::vector<Criterion> results;
  for (const auto& f : all) {
    try {
      results.push_back(f());
    } catch (const std::exception& e) {
      Criterion c{static_cast<int>(results.size()) + 1, "error", {}, {}};
      c.add("run", false, e.what());
      results.push_back(c);
    }
    const auto& c = results.back();
    int passed = 0;
    for (const auto& x : c.checks) passed += x.ok;
    std::cout << "criterion " << c.id << ": " << (c.green() ? "PASS" : "FAIL") << "  " << c.title << "  ("
              << passed << "/" << c.checks.size() << " sub-checks, exact)" << std::endl;
  }

  int unexplained = 0;
  std::cout << "\n";
  for (const auto& c : results) {
    for (const auto& n : c.notes) std::cout << "  [" << c.id << "] note: " << n << "\n";
    for (const auto& x : c.checks) {
      if (x.ok && x.known.empty()) continue;
      std::cout << "  [" << c.id << "] " << (x.ok ? "agrees, though listed as known: " : "red: ") << x.name;
      if (!x.detail.empty()) std::cout << "  -- " << x.detail;
      std::cout << "\n";
      if (!x.known.empty()) std::cout << "      analysis: " << x.known << "\n";
    }
    unexplained += c.unexplained();
  }
  std::cout << "\nunexplained: " << unexplained << "\n";
  return unexplained == 0 ? 0 : 1;
}
