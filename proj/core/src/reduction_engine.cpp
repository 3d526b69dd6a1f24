#include "effcon/reduction_engine.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "effcon/error.hpp"

namespace effcon {

namespace {

std::uint32_t support(const WeylAlgebra& alg, Symbol s) {
  std::uint32_t mask = 0;
  if (sym::is_moment(s)) {
    Exponents e = sym::unpack(s);
    for (int i = 0; i < alg.pairs(); ++i)
      if (e[2 * i] || e[2 * i + 1]) mask |= 1u << i;
    return mask;
  }
  for (int i = 0; i < alg.pairs(); ++i)
    if (alg.pair(i).q == s || alg.pair(i).p == s) mask |= 1u << i;
  return mask;
}

bool is_expectation(const SymbolTable& t, Symbol s) {
  return sym::is_declared(s) && t.kind(s) == SymbolKind::expectation;
}

bool is_parameter(const SymbolTable& t, Symbol s) { return sym::is_declared(s) && t.kind(s) == SymbolKind::parameter; }

ScalarExpr grade_part(const ScalarExpr& e, int g, const SymbolTable& t) {
  std::vector<Term> kept;
  for (const auto& term : e.num().terms())
    if (grade(term.mono, t) == g) kept.push_back(term);
  ScalarExpr out = ScalarExpr::fraction(Polynomial::from_terms(std::move(kept)), e.den());
  out.add_assumptions(e.assumptions());
  return out;
}

ScalarExpr drop_moments_above(const ScalarExpr& e, int n) {
  auto keep = [&](const Monomial& m) {
    for (const auto& f : m.factors())
      if (sym::is_moment(f.var) && sym::order(f.var) > n) return false;
    return true;
  };
  for (const auto& t : e.den().terms())
    if (!keep(t.mono)) throw Error("moment in a denominator");
  std::vector<Term> kept;
  for (const auto& t : e.num().terms())
    if (keep(t.mono)) kept.push_back(t);
  ScalarExpr out = ScalarExpr::fraction(Polynomial::from_terms(std::move(kept)), e.den());
  out.add_assumptions(e.assumptions());
  return out;
}

bool has_moment(const ScalarExpr& e) {
  for (Symbol s : e.symbols())
    if (sym::is_moment(s)) return true;
  return false;
}

bool has_generator(const TruncatedSystem& sys, const ScalarExpr& e) {
  for (Symbol s : e.symbols())
    if (sym::is_moment(s) || is_expectation(sys.table(), s)) return true;
  return false;
}

ScalarExpr coefficient_of(const ScalarExpr& e, Symbol x) {
  ScalarExpr c = ScalarExpr::fraction(e.num().coefficient(x, 1), e.den());
  c.add_assumptions(e.assumptions());
  return c;
}

struct Pivot {
  Symbol var;
  ScalarExpr value;
};

// Candidate ranking: mixed time moments, pure time moments, time expectation
// values, then any other moment.
std::optional<Pivot> choose_pivot(const TruncatedSystem& sys, const ScalarExpr& r) {
  const auto& alg = sys.space().algebra();
  const auto& table = sys.table();
  const bool graded = sys.mode() == TruncationMode::graded;
  const std::uint32_t time_bit = 1u << sys.time_pair();
  ScalarExpr lead = r;
  if (graded) lead = grade_part(r, min_grade(r, table), table);

  using Key = std::tuple<int, int, int, Symbol>;
  std::optional<Key> best_key;
  Symbol best = 0;
  ScalarExpr best_coef;
  for (Symbol x : lead.symbols()) {
    int category;
    int time_order = 0;
    if (sym::is_moment(x)) {
      std::uint32_t m = support(alg, x);
      if (m & time_bit) {
        category = (m == time_bit) ? 1 : 0;
        Exponents e = sym::unpack(x);
        time_order = e[2 * sys.time_pair()] + e[2 * sys.time_pair() + 1];
      } else {
        category = 3;
      }
    } else if (is_expectation(table, x) && support(alg, x) == time_bit) {
      category = 2;
    } else {
      continue;
    }
    if (sys.is_solved(x) || lead.den().contains(x) || r.den().contains(x)) continue;
    if (lead.num().degree_in(x) != 1) continue;
    ScalarExpr coef;
    if (graded) {
      coef = coefficient_of(lead, x);
      if (min_grade(coef, table) != 0 || has_moment(coef)) continue;
      bool graded_symbol = false;
      for (Symbol s : coef.symbols()) graded_symbol = graded_symbol || table.grade(s) != 0;
      if (graded_symbol) continue;
    } else {
      if (r.num().degree_in(x) != 1) continue;
      coef = coefficient_of(r, x);
      if (has_moment(coef)) continue;
    }
    if (coef.is_zero()) continue;
    int coef_rank = has_generator(sys, coef) ? 1 : 0;
    Key key{category, -time_order, coef_rank, x};
    if (!best_key || key < *best_key) {
      best_key = key;
      best = x;
      best_coef = coef;
    }
  }
  if (!best_key) return std::nullopt;

  ScalarExpr value = -(r - best_coef * ScalarExpr::var(best)) / best_coef;
  value = sys.truncate(value);
  Bindings self;
  for (int iter = 0; value.contains(best); ++iter) {
    if (!graded || iter > 4 * sys.order() + 4) throw Error("pivot does not separate: " + table.name(best));
    self[best] = value;
    value = sys.truncate(substitute(value, self));
  }
  return Pivot{best, value};
}

std::string residual_text(const TruncatedSystem& sys, const ScalarExpr& e) { return to_string(e, sys.table()); }

}  // namespace

std::string to_string(TruncationMode m) { return m == TruncationMode::graded ? "graded" : "sharp"; }

TruncationMode parse_mode(const std::string& s) {
  if (s == "graded") return TruncationMode::graded;
  if (s == "sharp") return TruncationMode::sharp;
  throw ParseError("unknown truncation mode: " + s);
}

const TruncatedConstraint* TruncatedSystem::find(const std::string& label) const {
  for (const auto& c : cs_) {
    if (c.label == label) return &c;
    for (const auto& m : c.merged)
      if (m == label) return &c;
  }
  return nullptr;
}

std::vector<Symbol> TruncatedSystem::generators() const {
  const auto& alg = ps_->algebra();
  std::vector<Symbol> out;
  for (int i = 0; i < alg.pairs(); ++i) {
    out.push_back(alg.pair(i).q);
    out.push_back(alg.pair(i).p);
  }
  int slots = 2 * alg.pairs();
  std::vector<Symbol> moments;
  std::vector<int> e(slots, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == slots) {
      NormalMonomial m;
      for (int k = 0; k < slots; ++k) m.e[k] = static_cast<std::uint8_t>(e[k]);
      if (m.degree() >= 2) moments.push_back(ps_->moment_symbol(m));
      return;
    }
    for (int v = 0; v <= left; ++v) {
      e[pos] = v;
      self(self, pos + 1, left - v);
    }
    e[pos] = 0;
  };
  rec(rec, 0, std::max(order_, 0));
  std::sort(moments.begin(), moments.end());
  out.insert(out.end(), moments.begin(), moments.end());
  return out;
}

std::vector<Symbol> TruncatedSystem::free_generators() const {
  std::vector<Symbol> out;
  for (Symbol s : generators())
    if (!is_solved(s)) out.push_back(s);
  return out;
}

bool TruncatedSystem::is_physical(Symbol s) const {
  std::uint32_t m = support(ps_->algebra(), s);
  return m != 0 && (m & (1u << time_pair_)) == 0;
}

ScalarExpr TruncatedSystem::truncate(const ScalarExpr& e) const {
  if (mode_ == TruncationMode::graded) return truncate_by_grade(e, order_, table());
  return drop_moments_above(e, order_);
}

ScalarExpr TruncatedSystem::reduce(const ScalarExpr& e) const {
  if (bind_.empty()) return truncate(e);
  return truncate(substitute(truncate(e), bind_));
}

void TruncatedSystem::note_assumptions(const ScalarExpr& e) {
  for (Symbol s : e.assumptions())
    if (std::find(assume_.begin(), assume_.end(), s) == assume_.end()) assume_.push_back(s);
  for (Symbol s : e.den().symbols())
    if (std::find(assume_.begin(), assume_.end(), s) == assume_.end()) assume_.push_back(s);
}

void TruncatedSystem::add_solution(Symbol x, ScalarExpr value, const std::string& label) {
  Bindings one{{x, value}};
  for (auto& entry : table_) {
    if (!entry.value.contains(x)) continue;
    entry.value = truncate(substitute(entry.value, one));
    bind_[entry.var] = entry.value;
    note_assumptions(entry.value);
  }
  note_assumptions(value);
  bind_[x] = value;
  table_.push_back({x, std::move(value), label});
}

TruncatedSystem truncate_system(const PhaseSpace& ps, const ConstraintSet& set, int order, TruncationMode mode) {
  if (order < 0) throw Error("truncation order must be nonnegative");
  if (&ps.algebra() != &set.algebra()) throw Error("constraint set belongs to another algebra");
  TruncatedSystem sys(ps, order, mode);
  for (const auto& c : set.items()) {
    ScalarExpr e = sys.truncate(c.expr);
    if (e.is_zero()) {
      sys.trivial().push_back(c.label);
      continue;
    }
    bool merged = false;
    for (auto& prev : sys.constraints())
      if (prev.expr == e) {
        prev.merged.push_back(c.label);
        merged = true;
        break;
      }
    if (merged) continue;
    TruncatedConstraint t;
    t.label = c.label;
    t.n = c.n;
    t.word = c.word;
    t.origin = c.origin;
    t.expr = std::move(e);
    sys.constraints().push_back(std::move(t));
  }
  return sys;
}

TruncatedSystem solve_constraints(TruncatedSystem sys, EliminationPolicy policy) {
  if (policy.time_pair < 0 || policy.time_pair >= sys.space().pairs()) throw Error("time pair out of range");
  sys.set_time_pair(policy.time_pair);
  const auto& table = sys.table();
  for (auto& c : sys.constraints()) {
    ScalarExpr r = sys.reduce(c.expr);
    c.residual = r;
    if (r.is_zero()) continue;
    auto piv = choose_pivot(sys, r);
    if (piv) {
      c.pivot = piv->var;
      sys.add_solution(piv->var, std::move(piv->value), c.label);
      continue;
    }
    if (sys.mode() == TruncationMode::graded) {
      ScalarExpr lead = grade_part(r, min_grade(r, table), table);
      if (has_generator(sys, lead))
        throw Error("nonlinear leading term in " + c.label + ": " + residual_text(sys, lead));
    }
    sys.add_residual({c.label, r});
  }
  // Surface forms: the constraint with other constraints' expectation-value
  // solutions inserted, which drops multiples of those constraints.
  for (auto& c : sys.constraints()) {
    Bindings b;
    for (const auto& s : sys.solutions())
      if (!sym::is_moment(s.var) && s.label != c.label) b.emplace(s.var, s.value);
    c.surface = b.empty() ? c.expr : sys.truncate(substitute(c.expr, b));
  }
  sys.mark_solved();
  return sys;
}

ScalarExpr weak_reduce(const TruncatedSystem& sys, const ScalarExpr& e) { return sys.reduce(e); }

InconsistencyReport detect_inconsistency(const TruncatedSystem& sys) {
  InconsistencyReport rep;
  Bindings forced;
  auto force = [&](Symbol s, const std::string& label) {
    forced.emplace(s, ScalarExpr(0));
    rep.soft.push_back({label, ScalarExpr::var(s)});
  };
  for (const auto& s : sys.solutions())
    if (s.value.is_zero() && sys.is_physical(s.var) && !forced.count(s.var)) force(s.var, s.label);
  // A single-monomial residual forces one of its physical factors to vanish; moments
  // are preferred, and a factor already forced satisfies it.
  std::vector<const Residual*> open;
  for (const auto& r : sys.residuals()) open.push_back(&r);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<const Residual*> next;
    for (const Residual* r : open) {
      ScalarExpr e = forced.empty() ? r->expr : substitute(r->expr, forced);
      if (e.is_zero()) continue;
      if (!has_generator(sys, e)) {
        rep.hard.push_back({r->label, e});
        continue;
      }
      if (e.num().is_monomial()) {
        std::optional<Symbol> pick;
        for (const auto& f : e.num().leading().mono.factors()) {
          if (!sys.is_physical(f.var)) continue;
          if (!pick || (sym::is_moment(f.var) && !sym::is_moment(*pick))) pick = f.var;
        }
        if (pick) {
          force(*pick, r->label);
          changed = true;
          continue;
        }
      }
      next.push_back(r);
    }
    open.swap(next);
  }
  for (const Residual* r : open) rep.unresolved.push_back(*r);
  return rep;
}

ScalarExpr GaugeFlowRecord::on(Symbol g) const {
  for (const auto& [s, e] : flow)
    if (s == g) return e;
  return ScalarExpr(0);
}

GaugeFlowRecord gauge_flow(const TruncatedSystem& sys, const std::string& label) {
  const TruncatedConstraint* c = sys.find(label);
  if (!c) throw Error("unknown constraint: " + label);
  GaugeFlowRecord rec;
  rec.label = c->label;
  for (Symbol g : sys.free_generators()) {
    ScalarExpr d = sys.reduce(sys.space().poisson_bracket(ScalarExpr::var(g), c->surface));
    if (!d.is_zero()) rec.flow.push_back({g, std::move(d)});
  }
  return rec;
}

FlowRank flow_rank(const TruncatedSystem& sys) {
  FlowRank out;
  std::vector<Symbol> gens = sys.free_generators();
  std::vector<int> exp_cols;
  for (std::size_t j = 0; j < gens.size(); ++j) {
    if (sym::is_moment(gens[j])) {
      ++out.free_moments;
    } else {
      ++out.free_expectations;
      exp_cols.push_back(static_cast<int>(j));
    }
  }
  Matrix all, exp_only;
  for (const auto& c : sys.constraints()) {
    GaugeFlowRecord f = gauge_flow(sys, c.label);
    Row r, re;
    for (Symbol g : gens) r.push_back(f.on(g));
    for (int j : exp_cols) re.push_back(r[j]);
    all.push_back(std::move(r));
    exp_only.push_back(std::move(re));
  }
  out.rank = rank(all);
  out.expectation_rank = exp_cols.empty() ? 0 : rank(exp_only);
  return out;
}

std::vector<Residual> observable_failures(const TruncatedSystem& sys, const ScalarExpr& o) {
  std::vector<Residual> out;
  for (const auto& c : sys.constraints()) {
    ScalarExpr r = sys.reduce(sys.space().poisson_bracket(o, c.expr));
    if (!r.is_zero()) out.push_back({c.label, std::move(r)});
  }
  return out;
}

bool is_observable(const TruncatedSystem& sys, const ScalarExpr& o) { return observable_failures(sys, o).empty(); }

namespace {

// Coordinates of surface images, over monomials in the generators.
Matrix image_coordinates(const TruncatedSystem& sys, const std::vector<ScalarExpr>& exprs) {
  std::vector<ScalarExpr> images;
  images.reserve(exprs.size());
  for (const auto& e : exprs) images.push_back(sys.reduce(e));
  auto polys = clear_denominators(images);
  const auto& t = sys.table();
  // hbar stays a row key: truncation does not commute with multiplying by it.
  return coefficient_matrix(polys, [&](Symbol s) { return is_parameter(t, s) && t.grade(s) == 0; });
}

// Constants, accepted observables, their products and hbar multiples, as seen on
// the truncated surface.
class ObservableSpan {
 public:
  ObservableSpan(const TruncatedSystem& sys, int max_factors) : sys_(sys), max_factors_(max_factors) {
    for (const auto& info : sys.table().declared())
      if (info.kind == SymbolKind::parameter && info.grade > 0) graded_.push_back(sys.table().at(info.name));
    push(ScalarExpr(1), 0);
    rank_ = rank(image_coordinates(sys_, exprs()));
  }

  bool contains(const ScalarExpr& o) const {
    auto v = exprs();
    v.push_back(o);
    return rank(image_coordinates(sys_, v)) == rank_;
  }

  void add(const ScalarExpr& o) {
    std::size_t n = items_.size();
    for (std::size_t i = 0; i < n; ++i) {
      ScalarExpr prod = items_[i].first;
      for (int f = items_[i].second + 1; f <= max_factors_; ++f) {
        prod = sys_.truncate(prod * o);
        if (prod.is_zero()) break;
        push(prod, f);
      }
    }
    rank_ = rank(image_coordinates(sys_, exprs()));
  }

 private:
  std::vector<ScalarExpr> exprs() const {
    std::vector<ScalarExpr> v;
    for (const auto& it : items_) v.push_back(it.first);
    return v;
  }
  void push(const ScalarExpr& e, int factors) {
    items_.push_back({e, factors});
    for (Symbol h : graded_)
      for (ScalarExpr m = sys_.truncate(e * ScalarExpr::var(h)); !m.is_zero(); m = sys_.truncate(m * ScalarExpr::var(h)))
        items_.push_back({m, factors});
  }

  const TruncatedSystem& sys_;
  int max_factors_;
  std::vector<Symbol> graded_;
  std::vector<std::pair<ScalarExpr, int>> items_;
  int rank_ = 0;
};

std::vector<Monomial> monomials_up_to(const std::vector<Symbol>& vars, int degree) {
  std::vector<Monomial> out{Monomial()};
  std::vector<Monomial> frontier{Monomial()};
  for (int d = 1; d <= degree; ++d) {
    std::vector<Monomial> next;
    for (const auto& m : frontier)
      for (Symbol v : vars) {
        // Nondecreasing symbol order avoids duplicates.
        if (!m.is_one() && m.factors().back().var > v) continue;
        next.push_back(m * Monomial::var(v));
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier.swap(next);
  }
  return out;
}

ScalarExpr normalize_leading(const ScalarExpr& e, const SymbolTable& t) {
  if (e.is_zero()) return e;
  const Term& lead = e.num().leading();
  Monomial params;
  for (const auto& f : lead.mono.factors())
    if (is_parameter(t, f.var) && t.grade(f.var) == 0) params = params * Monomial::var(f.var, f.exp);
  return e / ScalarExpr(Polynomial::term(params, lead.coeff));
}

}  // namespace

std::vector<ObservableRecord> find_observables(const TruncatedSystem& sys, const ObservableAnsatz& ansatz) {
  const auto& ps = sys.space();
  const auto& table = sys.table();
  std::vector<Symbol> exps, moments;
  for (Symbol g : sys.generators()) {
    if (sym::is_moment(g)) {
      if (sym::order(g) <= std::min(ansatz.moment_order, sys.order())) moments.push_back(g);
    } else if (!sys.is_solved(g)) {
      exps.push_back(g);
    }
  }
  std::vector<Monomial> monos = monomials_up_to(exps, ansatz.expectation_degree);
  struct BasisFn {
    Monomial m;
    std::optional<Symbol> h;
    ScalarExpr expr;
  };
  std::vector<BasisFn> basis;
  for (const auto& m : monos) {
    if (!m.is_one()) basis.push_back({m, std::nullopt, ScalarExpr(Polynomial::term(m, 1))});
    for (Symbol h : moments) basis.push_back({m, h, ScalarExpr(Polynomial::term(m * Monomial::var(h), 1))});
  }
  const int K = static_cast<int>(basis.size());

  std::vector<Symbol> gens = exps;
  gens.insert(gens.end(), moments.begin(), moments.end());
  Matrix rows;
  for (const auto& c : sys.constraints()) {
    std::map<Symbol, ScalarExpr> flow;
    for (Symbol x : gens) {
      ScalarExpr f = sys.reduce(ps.poisson_bracket(ScalarExpr::var(x), c.expr));
      if (!f.is_zero()) flow.emplace(x, std::move(f));
    }
    if (flow.empty()) continue;
    std::vector<ScalarExpr> v(K);
    for (int k = 0; k < K; ++k) {
      const auto& b = basis[k];
      ScalarExpr acc;
      for (const auto& f : b.m.factors()) {
        auto it = flow.find(f.var);
        if (it == flow.end()) continue;
        Monomial rest = b.m / Monomial::var(f.var);
        ScalarExpr d(Polynomial::term(rest, GaussianRational(static_cast<long>(f.exp))));
        if (b.h) d *= sys.reduce(ScalarExpr::var(*b.h));
        acc += d * it->second;
      }
      if (b.h) {
        auto it = flow.find(*b.h);
        if (it != flow.end()) acc += ScalarExpr(Polynomial::term(b.m, 1)) * it->second;
      }
      v[k] = sys.truncate(acc);
    }
    auto polys = clear_denominators(v);
    Matrix part = coefficient_matrix(polys, [&](Symbol s) { return is_parameter(table, s); });
    for (auto& r : part) rows.push_back(std::move(r));
  }

  std::vector<Row> kernel;
  if (rows.empty()) {
    for (int k = 0; k < K; ++k) {
      Row r(K, ScalarExpr(0));
      r[k] = ScalarExpr(1);
      kernel.push_back(std::move(r));
    }
  } else {
    kernel = null_space(rows, K);
  }

  // Shown on the surface when that keeps generators out of denominators.
  auto display = [&](const ScalarExpr& o) {
    ScalarExpr r = sys.reduce(o);
    for (Symbol s : r.den().symbols())
      if (sym::is_moment(s) || is_expectation(table, s)) r = o;
    std::vector<Term> kept;
    for (const auto& t : r.num().terms()) {
      bool gen = false;
      for (const auto& f : t.mono.factors()) gen = gen || sym::is_moment(f.var) || is_expectation(table, f.var);
      if (gen) kept.push_back(t);
    }
    return normalize_leading(ScalarExpr::fraction(Polynomial::from_terms(std::move(kept)), r.den()), table);
  };
  struct Candidate {
    ScalarExpr expr;
    std::uint32_t degree;
    std::size_t size;
    std::string text;
  };
  std::vector<Candidate> cands;
  for (const auto& u : kernel) {
    ScalarExpr o;
    for (int k = 0; k < K; ++k)
      if (!u[k].is_zero()) o += u[k] * basis[k].expr;
    if (o.is_zero() || !has_generator(sys, o)) continue;
    o = display(o);
    if (o.is_zero()) continue;
    // hbar times a lower-order quantity passes only because the failure drops out of grade.
    bool graded_content = false;
    for (const auto& f : o.num().content_monomial().factors()) graded_content = graded_content || (is_parameter(table, f.var) && table.grade(f.var) > 0);
    if (graded_content) continue;
    std::uint32_t deg = 0;
    for (const auto& t : o.num().terms()) {
      std::uint32_t d = 0;
      for (const auto& f : t.mono.factors())
        if (sym::is_moment(f.var) || (is_expectation(table, f.var) && sys.is_physical(f.var))) d += f.exp;
      deg = std::max(deg, d);
    }
    cands.push_back({o, deg, o.num().terms().size(), to_string(o, table)});
  }
  std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
    return std::tie(a.degree, a.size, a.text) < std::tie(b.degree, b.size, b.text);
  });

  // Products of accepted observables are observables too; they do not count as new.
  ObservableSpan span(sys, 2 * ansatz.expectation_degree + 2);
  std::vector<ObservableRecord> out;
  for (auto& c : cands) {
    if (span.contains(c.expr)) continue;
    span.add(c.expr);
    out.push_back({"O" + std::to_string(out.size() + 1), c.expr, sys.order()});
  }
  return out;
}

bool in_observable_span(const TruncatedSystem& sys, const std::vector<ObservableRecord>& basis, const ScalarExpr& o) {
  ObservableSpan span(sys, 2);
  for (const auto& b : basis) span.add(b.expr);
  return span.contains(o);
}

TruncatedSystem gauge_fix(TruncatedSystem sys, const std::vector<ScalarExpr>& conditions) {
  for (const auto& phi : conditions) {
    ScalarExpr r = sys.reduce(phi);
    std::string label = "gauge[" + to_string(phi, sys.table()) + "]";
    if (r.is_zero()) throw Error("gauge condition is implied by the constraints: " + label);
    auto piv = choose_pivot(sys, r);
    if (!piv) throw Error("gauge condition cannot be solved: " + label);
    sys.add_solution(piv->var, std::move(piv->value), label);
  }
  return sys;
}

ScalarExpr DiracStructure::bracket(const TruncatedSystem& fixed, const ScalarExpr& f, const ScalarExpr& g) const {
  const auto& ps = fixed.space();
  const std::size_t n = phi.size();
  std::vector<ScalarExpr> fp(n), pg(n);
  for (std::size_t i = 0; i < n; ++i) {
    fp[i] = fixed.reduce(ps.poisson_bracket(f, phi[i]));
    pg[i] = fixed.reduce(ps.poisson_bracket(phi[i], g));
  }
  ScalarExpr out = fixed.reduce(ps.poisson_bracket(f, g));
  for (std::size_t i = 0; i < n; ++i) {
    if (fp[i].is_zero()) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (!inverse[i][j].is_zero() && !pg[j].is_zero()) out -= fp[i] * inverse[i][j] * pg[j];
  }
  return fixed.truncate(out);
}

DiracStructure gauge_fix_and_dirac(const TruncatedSystem& sys, const std::vector<std::string>& second_class,
                                   const std::vector<ScalarExpr>& conditions, TruncatedSystem* fixed_out) {
  TruncatedSystem fixed = gauge_fix(sys, conditions);
  const auto& ps = sys.space();
  DiracStructure d;
  for (const auto& label : second_class) {
    bool negate = !label.empty() && label[0] == '-';
    const TruncatedConstraint* c = sys.find(negate ? label.substr(1) : label);
    if (!c) throw Error("unknown constraint: " + label);
    d.names.push_back(label);
    d.phi.push_back(negate ? -c->surface : c->surface);
  }
  for (const auto& phi : conditions) {
    d.names.push_back("gauge[" + to_string(phi, sys.table()) + "]");
    d.phi.push_back(phi);
  }
  const std::size_t n = d.phi.size();
  d.delta.assign(n, Row(n, ScalarExpr(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      d.delta[i][j] = fixed.reduce(ps.poisson_bracket(d.phi[i], d.phi[j]));
      d.delta[j][i] = -d.delta[i][j];
    }
  auto inv = inverse(d.delta);
  if (!inv) {
    auto ns = null_space(d.delta, static_cast<int>(n));
    std::string w;
    for (std::size_t i = 0; i < n; ++i) w += (i ? ", " : "") + to_string(ns.front()[i], sys.table());
    throw Error("gauge conditions do not fix second-class set; null vector (" + w + ")");
  }
  d.inverse = std::move(*inv);
  d.residual = fixed.free_generators();
  for (std::size_t i = 0; i < d.residual.size(); ++i)
    for (std::size_t j = i + 1; j < d.residual.size(); ++j) {
      ScalarExpr b = d.bracket(fixed, ScalarExpr::var(d.residual[i]), ScalarExpr::var(d.residual[j]));
      if (!b.is_zero()) d.brackets.emplace(std::make_pair(d.residual[i], d.residual[j]), std::move(b));
    }
  if (fixed_out) *fixed_out = std::move(fixed);
  return d;
}

std::string to_string(UncertaintyStatus s) {
  switch (s) {
    case UncertaintyStatus::saturated:
      return "saturated";
    case UncertaintyStatus::violated_as_real:
      return "violated-as-real";
    case UncertaintyStatus::satisfied:
      return "satisfied";
    case UncertaintyStatus::satisfied_conditionally:
      return "satisfied-conditionally";
  }
  return "?";
}

UncertaintyReport check_uncertainty(const TruncatedSystem& sys, int pair) {
  const auto& ps = sys.space();
  if (pair < 0 || pair >= ps.pairs()) throw Error("pair out of range");
  ScalarExpr qq = ps.moment(NormalMonomial::q(pair, 2));
  ScalarExpr pp = ps.moment(NormalMonomial::p(pair, 2));
  ScalarExpr qp = ps.moment(NormalMonomial::pq(pair, 1, 1));
  ScalarExpr h = ScalarExpr::var(ps.algebra().hbar());
  ScalarExpr u = qq * pp - qp * qp - h * h * ScalarExpr::frac(1, 4);
  UncertaintyReport rep;
  rep.pair = pair;
  rep.excess = sys.substitute_solutions(u);
  if (rep.excess.is_zero()) {
    rep.status = UncertaintyStatus::saturated;
  } else if (!has_generator(sys, rep.excess)) {
    // Constant in the parameters: positive real means strictly satisfied.
    bool real = true, positive = true;
    for (const auto& t : rep.excess.num().terms()) {
      real = real && t.coeff.is_real();
      positive = positive && t.coeff.re() > 0;
    }
    rep.status = (real && positive) ? UncertaintyStatus::satisfied : UncertaintyStatus::violated_as_real;
  }
  return rep;
}

RealityCondition reality_condition(const TruncatedSystem& sys, const std::string& name, const ScalarExpr& o) {
  std::vector<Term> constant, variable;
  for (const auto& t : o.num().terms()) {
    bool gen = false;
    for (const auto& f : t.mono.factors())
      gen = gen || sym::is_moment(f.var) || is_expectation(sys.table(), f.var);
    (gen ? variable : constant).push_back(t);
  }
  std::vector<Term> imag;
  for (const auto& t : constant) imag.push_back({t.mono, GaussianRational(t.coeff.im())});
  RealityCondition rc;
  rc.name = name;
  rc.variable_part = ScalarExpr::fraction(Polynomial::from_terms(variable), o.den());
  rc.required_imaginary_part = -ScalarExpr::fraction(Polynomial::from_terms(imag), o.den());
  return rc;
}

ScalarExpr relational_solution(const TruncatedSystem& sys, Symbol internal_time, Symbol target,
                               const std::vector<std::pair<Symbol, ScalarExpr>>& observables) {
  std::vector<Symbol> gens = sys.generators();
  if (std::find(gens.begin(), gens.end(), target) == gens.end())
    throw Error("target not resolvable at current grade: " + sys.table().name(target));
  ScalarExpr t = sys.reduce(ScalarExpr::var(target));
  if (target == internal_time) return t;
  std::vector<bool> used(observables.size(), false);
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t i = 0; i < observables.size() && !progress; ++i) {
      if (used[i]) continue;
      ScalarExpr o = sys.reduce(observables[i].second);
      std::optional<Symbol> pick;
      for (Symbol x : t.symbols()) {
        if (x == internal_time || !(sym::is_moment(x) || is_expectation(sys.table(), x))) continue;
        if (!o.contains(x) || o.den().contains(x) || o.num().degree_in(x) != 1) continue;
        ScalarExpr c = coefficient_of(o, x);
        if (c.is_zero() || c.contains(x)) continue;
        if (!pick || x > *pick) pick = x;
      }
      if (!pick) continue;
      ScalarExpr c = coefficient_of(o, *pick);
      ScalarExpr value = (ScalarExpr::var(observables[i].first) - (o - c * ScalarExpr::var(*pick))) / c;
      t = substitute(t, Bindings{{*pick, value}});
      used[i] = true;
      progress = true;
    }
  }
  for (Symbol x : t.symbols())
    if (x != internal_time && (sym::is_moment(x) || is_expectation(sys.table(), x)) && sys.is_solved(x))
      throw Error("target not resolvable at current grade");
  return t;
}

ExpansionCheck verify_expansion(const ConstraintFactory& factory, Symbol momentum, Symbol cclass,
                                const ExpansionTranscription& plain, const ExpansionTranscription& tr, int n) {
  const auto& alg = factory.space().algebra();
  ScalarExpr cl = classical_symbol(alg, factory.classical());
  ScalarExpr lin = coefficient_of(cl, momentum);
  if (!(lin == ScalarExpr(1)) || cl.num().degree_in(momentum) != 1)
    throw Error("constraint is not linear in " + alg.table().name(momentum));
  ScalarExpr rest = cl - ScalarExpr::var(momentum);
  Bindings sub{{momentum, ScalarExpr::var(cclass) - rest}};

  auto expand = [&](const ExpansionTranscription& x) {
    ScalarExpr out;
    for (int k = 0; k < static_cast<int>(x.blocks.size()) && k <= n; ++k) {
      long ff = 1;
      for (int j = 0; j < k; ++j) ff *= (n - j);
      out += ScalarExpr(ff) * ScalarExpr::var(cclass).pow(static_cast<unsigned>(n - k)) * x.blocks[k];
    }
    return out;
  };
  ScalarExpr transcribed = expand(tr);
  if (!tr.base.is_zero()) transcribed += tr.base * expand(plain);

  ExpectationLimit lim;
  lim.max_moment_order = 3;
  ScalarExpr generated = factory.generate(tr.word, n, lim).expr;
  ExpansionCheck out;
  out.name = tr.name;
  out.n = n;
  out.difference = drop_moments_above(substitute(generated, sub) - substitute(transcribed, sub), 3);
  out.match = out.difference.is_zero();
  return out;
}

}  // namespace effcon
