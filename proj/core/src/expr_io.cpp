#include <cctype>
#include <sstream>

#include "effcon/error.hpp"
#include "effcon/scalar_expr.hpp"

namespace effcon {

namespace {

std::string factor_text(const VarPow& f, const SymbolTable& table) {
  std::string s = table.name(f.var);
  if (f.exp != 1) s += "^" + std::to_string(f.exp);
  return s;
}

// One real or imaginary part of a term: sign handled by the caller.
std::string term_body(const mpq_class& absval, bool imag, const Monomial& m, const Monomial& den_mono,
                      const SymbolTable& table) {
  std::vector<std::string> top, bottom;
  if (absval.get_num() != 1) top.push_back(absval.get_num().get_str());
  if (imag) top.push_back("i");
  for (auto& f : m.factors()) top.push_back(factor_text(f, table));
  if (top.empty()) top.push_back("1");
  if (absval.get_den() != 1) bottom.push_back(absval.get_den().get_str());
  for (auto& f : den_mono.factors()) bottom.push_back(factor_text(f, table));
  std::string s;
  for (std::size_t k = 0; k < top.size(); ++k) s += (k ? "*" : "") + top[k];
  if (bottom.empty()) return s;
  s += "/";
  if (bottom.size() == 1) return s + bottom[0];
  s += "(";
  for (std::size_t k = 0; k < bottom.size(); ++k) s += (k ? "*" : "") + bottom[k];
  return s + ")";
}

std::string poly_text(const Polynomial& p, const Monomial& den_mono, const mpq_class& den_scale,
                      const SymbolTable& table) {
  if (p.is_zero()) return "0";
  std::string out;
  auto emit = [&](const mpq_class& v, bool imag, const Monomial& m) {
    if (sgn(v) == 0) return;
    mpq_class a = abs(v) / den_scale;
    bool neg = sgn(v) < 0;
    if (out.empty()) out += neg ? "-" : "";
    else out += neg ? " - " : " + ";
    Monomial g = Monomial::gcd(m, den_mono);
    out += term_body(a, imag, m / g, den_mono / g, table);
  };
  for (auto& t : p.terms()) {
    emit(t.coeff.re(), false, t.mono);
    emit(t.coeff.im(), true, t.mono);
  }
  return out;
}

}  // namespace

std::string to_string(const Polynomial& p, const SymbolTable& table) {
  return poly_text(p, Monomial(), mpq_class(1), table);
}

std::string to_string(const ScalarExpr& e, const SymbolTable& table) {
  if (e.is_polynomial()) return to_string(e.num(), table);
  if (e.den().is_monomial()) {
    const Term& d = e.den().leading();
    return poly_text(e.num(), d.mono, d.coeff.re(), table);
  }
  return "(" + to_string(e.num(), table) + ")/(" + to_string(e.den(), table) + ")";
}

namespace {

class Parser {
 public:
  Parser(const std::string& s, const SymbolTable& t) : s_(s), t_(t) {}

  ScalarExpr parse() {
    ScalarExpr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("parse error at " + std::to_string(pos_) + " in '" + s_ + "': " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  ScalarExpr expr() {
    ScalarExpr e = term();
    for (;;) {
      if (eat('+')) e += term();
      else if (eat('-')) e -= term();
      else return e;
    }
  }
  ScalarExpr term() {
    ScalarExpr e = unary();
    for (;;) {
      if (eat('*')) e *= unary();
      else if (eat('/')) e /= unary();
      else return e;
    }
  }
  ScalarExpr unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  ScalarExpr power() {
    ScalarExpr base = atom();
    if (eat('^')) {
      skip();
      long e = integer();
      if (e < 0) fail("negative exponent");
      return base.pow(static_cast<unsigned>(e));
    }
    return base;
  }
  long integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    return std::stol(s_.substr(start, pos_ - start));
  }
  ScalarExpr moment(bool is_g) {
    if (!eat('[')) fail("expected '['");
    Exponents ex{};
    int slot = 0;
    for (;;) {
      if (slot >= 2 * t_.pairs()) fail("too many indices");
      ex[slot] = static_cast<std::uint8_t>(integer());
      ++slot;
      if (eat(']')) break;
      if (eat(',')) {
        if (slot % 2 == 0) fail("expected ';' between pairs");
        continue;
      }
      if (eat(';')) {
        if (slot % 2 != 0) fail("expected ',' inside a pair");
        continue;
      }
      fail("expected ',', ';' or ']'");
    }
    if (slot % 2 != 0) fail("odd number of indices");
    int order = sym::total(ex);
    if (!is_g) {
      if (order == 0) return ScalarExpr(1);
      return ScalarExpr::var(sym::fvar(ex));
    }
    if (order == 0) return ScalarExpr(1);
    if (order == 1) return ScalarExpr(0);
    return ScalarExpr::var(sym::moment(ex));
  }
  ScalarExpr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ScalarExpr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      mpz_class z(s_.substr(start, pos_ - start));
      return ScalarExpr(GaussianRational(mpq_class(z)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      if ((id == "G" || id == "F") && (skip(), pos_ < s_.size() && s_[pos_] == '['))
        return moment(id == "G");
      if (auto s = t_.find(id)) return ScalarExpr::var(*s);
      if (id == "i") return ScalarExpr::imag_unit();
      fail("unknown symbol '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  const SymbolTable& t_;
  std::size_t pos_ = 0;
};

}  // namespace

ScalarExpr parse_expr(const std::string& text, const SymbolTable& table) {
  return Parser(text, table).parse();
}

}  // namespace effcon
