#include "effcon/symbol.hpp"

#include "effcon/error.hpp"

namespace effcon {
namespace sym {

int total(const Exponents& e) {
  int t = 0;
  for (auto v : e) t += v;
  return t;
}

Symbol pack(std::uint64_t kind, const Exponents& e) {
  int t = total(e);
  if (t > 63) throw Error("moment order too large");
  std::uint64_t code = (kind << kKindShift) | (std::uint64_t(t) << kOrderShift);
  for (int j = 0; j < 2 * kMaxPairs; ++j) {
    if (e[j] > 127) throw Error("exponent too large");
    code |= std::uint64_t(e[j]) << (49 - 7 * j);
  }
  return code;
}

Exponents unpack(Symbol s) {
  Exponents e{};
  for (int j = 0; j < 2 * kMaxPairs; ++j) e[j] = static_cast<std::uint8_t>((s >> (49 - 7 * j)) & 0x7f);
  return e;
}

}  // namespace sym

Symbol SymbolTable::declare(const std::string& name, SymbolKind kind, int grade) {
  if (by_name_.count(name)) throw Error("duplicate symbol '" + name + "'");
  if (kind == SymbolKind::moment || kind == SymbolKind::fvariable)
    throw Error("moment symbols are not declared by name");
  Symbol s = sym::declared(static_cast<std::uint32_t>(info_.size()));
  info_.push_back({name, kind, grade});
  by_name_.emplace(name, s);
  return s;
}

std::optional<Symbol> SymbolTable::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

Symbol SymbolTable::at(const std::string& name) const {
  auto s = find(name);
  if (!s) throw Error("unknown symbol '" + name + "'");
  return *s;
}

SymbolKind SymbolTable::kind(Symbol s) const {
  if (sym::is_moment(s)) return SymbolKind::moment;
  if (sym::is_fvar(s)) return SymbolKind::fvariable;
  return info_.at(s).kind;
}

int SymbolTable::grade(Symbol s) const {
  if (sym::is_moment(s)) return sym::order(s);
  if (sym::is_fvar(s)) return 0;
  return info_.at(s).grade;
}

std::string SymbolTable::name(Symbol s) const {
  if (sym::is_declared(s)) return info_.at(s).name;
  Exponents e = sym::unpack(s);
  std::string out = sym::is_moment(s) ? "G[" : "F[";
  for (int p = 0; p < pairs_; ++p) {
    if (p) out += ";";
    out += std::to_string(e[2 * p]) + "," + std::to_string(e[2 * p + 1]);
  }
  return out + "]";
}

}  // namespace effcon
