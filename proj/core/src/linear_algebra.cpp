#include "effcon/linear_algebra.hpp"

#include <map>
#include <numeric>
#include <algorithm>

#include "effcon/error.hpp"

namespace effcon {

namespace {

std::size_t weight(const ScalarExpr& e) { return e.num().terms().size() + e.den().terms().size(); }

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b) > 0; }
};

}  // namespace

Matrix identity_matrix(int n) {
  Matrix m(n, Row(n, ScalarExpr(0)));
  for (int i = 0; i < n; ++i) m[i][i] = ScalarExpr(1);
  return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.empty()) return {};
  std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  if (a[0].size() != k) throw Error("matrix shape mismatch");
  Matrix out(n, Row(m, ScalarExpr(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l].is_zero()) continue;
      for (std::size_t j = 0; j < m; ++j)
        if (!b[l][j].is_zero()) out[i][j] += a[i][l] * b[l][j];
    }
  return out;
}

Echelon row_reduce(Matrix m, const std::vector<int>& column_order) {
  Echelon out;
  if (m.empty()) return out;
  int cols = static_cast<int>(m[0].size());
  std::vector<int> order = column_order;
  if (order.empty()) {
    order.resize(cols);
    std::iota(order.begin(), order.end(), 0);
  }
  std::size_t r = 0;
  for (int c : order) {
    if (r == m.size()) break;
    std::size_t best = m.size();
    for (std::size_t i = r; i < m.size(); ++i)
      if (!m[i][c].is_zero() && (best == m.size() || weight(m[i][c]) < weight(m[best][c]))) best = i;
    if (best == m.size()) continue;
    std::swap(m[r], m[best]);
    ScalarExpr inv = ScalarExpr(1) / m[r][c];
    for (auto& x : m[r])
      if (!x.is_zero()) x *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      ScalarExpr f = m[i][c];
      for (int j = 0; j < cols; ++j)
        if (!m[r][j].is_zero()) m[i][j] -= f * m[r][j];
    }
    out.pivots.push_back(c);
    ++r;
  }
  m.resize(r);
  out.rref = std::move(m);
  return out;
}

int exact_rank(const Matrix& m) { return static_cast<int>(row_reduce(m).pivots.size()); }

namespace {

// Arithmetic modulo a 61-bit prime p = 1 mod 4, where i is a square root of -1.
constexpr std::uint64_t kPrime = 2305843009213693921ULL;
constexpr std::uint64_t kSqrtMinusOne = 583529827753931384ULL;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % kPrime);
}
std::uint64_t addmod(std::uint64_t a, std::uint64_t b) { return (a + b) % kPrime; }
std::uint64_t submod(std::uint64_t a, std::uint64_t b) { return (a + kPrime - b) % kPrime; }
std::uint64_t powmod(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  for (; e; e >>= 1, a = mulmod(a, a))
    if (e & 1) r = mulmod(r, a);
  return r;
}
std::uint64_t invmod(std::uint64_t a) { return powmod(a, kPrime - 2); }

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mpz_mod(const mpz_class& z) {
  mpz_class r = z % kPrime;
  if (r < 0) r += kPrime;
  return r.get_ui();
}

std::uint64_t rational_mod(const mpq_class& q) {
  std::uint64_t d = mpz_mod(q.get_den());
  if (d == 0) throw Error("evaluation point hits a rational denominator");
  return mulmod(mpz_mod(q.get_num()), invmod(d));
}

std::uint64_t eval_poly(const Polynomial& p, std::uint64_t seed) {
  std::uint64_t acc = 0;
  for (const auto& t : p.terms()) {
    std::uint64_t v = addmod(rational_mod(t.coeff.re()), mulmod(kSqrtMinusOne, rational_mod(t.coeff.im())));
    for (const auto& f : t.mono.factors()) v = mulmod(v, powmod(splitmix(f.var ^ seed) % kPrime, f.exp));
    acc = addmod(acc, v);
  }
  return acc;
}

int modular_rank(const Matrix& m, std::uint64_t seed) {
  if (m.empty()) return 0;
  std::size_t cols = m[0].size();
  std::vector<std::vector<std::uint64_t>> a(m.size(), std::vector<std::uint64_t>(cols, 0));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const ScalarExpr& e = m[i][j];
      if (e.is_zero()) continue;
      std::uint64_t d = eval_poly(e.den(), seed);
      if (d == 0) return -1;
      a[i][j] = mulmod(eval_poly(e.num(), seed), invmod(d));
    }
  int r = 0;
  for (std::size_t c = 0; c < cols && r < static_cast<int>(a.size()); ++c) {
    std::size_t piv = a.size();
    for (std::size_t i = r; i < a.size(); ++i)
      if (a[i][c]) {
        piv = i;
        break;
      }
    if (piv == a.size()) continue;
    std::swap(a[r], a[piv]);
    std::uint64_t inv = invmod(a[r][c]);
    for (std::size_t i = r + 1; i < a.size(); ++i) {
      if (!a[i][c]) continue;
      std::uint64_t f = mulmod(a[i][c], inv);
      for (std::size_t j = c; j < cols; ++j) a[i][j] = submod(a[i][j], mulmod(f, a[r][j]));
    }
    ++r;
  }
  return r;
}

}  // namespace

// The rank over the function field equals the rank at a generic point; two
// independent evaluation points make a miss vanishingly unlikely.
int rank(const Matrix& m) {
  int best = -1;
  for (std::uint64_t seed : {0x5eedULL, 0xc0ffeeULL}) best = std::max(best, modular_rank(m, seed));
  return best < 0 ? exact_rank(m) : best;
}

std::vector<Row> null_space(const Matrix& m, int cols, const std::vector<int>& column_order) {
  Echelon e = row_reduce(m, column_order);
  std::vector<bool> is_pivot(cols, false);
  for (int c : e.pivots) is_pivot[c] = true;
  std::vector<int> order = column_order;
  if (order.empty()) {
    order.resize(cols);
    std::iota(order.begin(), order.end(), 0);
  }
  std::vector<Row> out;
  for (int f : order) {
    if (is_pivot[f]) continue;
    Row v(cols, ScalarExpr(0));
    v[f] = ScalarExpr(1);
    for (std::size_t i = 0; i < e.pivots.size(); ++i) v[e.pivots[i]] = -e.rref[i][f];
    out.push_back(std::move(v));
  }
  return out;
}

std::optional<Matrix> inverse(const Matrix& m) {
  int n = static_cast<int>(m.size());
  Matrix aug(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(m[i].size()) != n) throw Error("matrix is not square");
    aug[i] = m[i];
    for (int j = 0; j < n; ++j) aug[i].push_back(ScalarExpr(i == j ? 1 : 0));
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Echelon e = row_reduce(std::move(aug), order);
  if (static_cast<int>(e.pivots.size()) < n) return std::nullopt;
  // Rows come out in pivot order, which is the column order 0..n-1.
  Matrix inv(n);
  for (int i = 0; i < n; ++i) inv[i].assign(e.rref[i].begin() + n, e.rref[i].end());
  return inv;
}

std::vector<Polynomial> clear_denominators(const std::vector<ScalarExpr>& v) {
  std::vector<Polynomial> dens;
  bool monomial = true;
  for (const auto& e : v) {
    if (e.is_zero() || e.den().is_constant()) continue;
    bool seen = false;
    for (const auto& d : dens) seen = seen || d == e.den();
    if (!seen) dens.push_back(e.den());
    monomial = monomial && e.den().is_monomial();
  }
  Polynomial common(1);
  if (monomial) {
    Monomial l;
    for (const auto& d : dens) {
      const Monomial& m = d.leading().mono;
      Monomial g = Monomial::gcd(l, m);
      l = l * (m / g);
    }
    common = Polynomial::term(l, 1);
  } else {
    for (const auto& d : dens) common = common * d;
  }
  std::vector<Polynomial> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (e.is_zero()) {
      out.emplace_back();
      continue;
    }
    auto q = common.exact_divide(e.den());
    if (!q) throw Error("denominator clearing failed");
    out.push_back(e.num() * *q);
  }
  return out;
}

Matrix coefficient_matrix(const std::vector<Polynomial>& polys, const std::function<bool(Symbol)>& is_coefficient) {
  std::map<Monomial, std::map<std::size_t, std::vector<Term>>, MonomialLess> rows;
  for (std::size_t col = 0; col < polys.size(); ++col) {
    for (const auto& t : polys[col].terms()) {
      Monomial key, coef;
      for (const auto& f : t.mono.factors()) {
        if (is_coefficient(f.var))
          coef = coef * Monomial::var(f.var, f.exp);
        else
          key = key * Monomial::var(f.var, f.exp);
      }
      rows[key][col].push_back({coef, t.coeff});
    }
  }
  Matrix out;
  out.reserve(rows.size());
  for (auto& [key, cols] : rows) {
    Row r(polys.size(), ScalarExpr(0));
    for (auto& [col, terms] : cols) r[col] = ScalarExpr(Polynomial::from_terms(std::move(terms)));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace effcon
