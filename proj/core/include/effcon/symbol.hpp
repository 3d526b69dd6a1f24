#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace effcon {

// A symbol is a packed 64-bit code. Comparing codes gives the symbol order:
// declared symbols (declaration order) first, then moments by (order, exponents),
// then F-symbols.
using Symbol = std::uint64_t;

inline constexpr int kMaxPairs = 4;

// Exponents for up to kMaxPairs canonical pairs, two slots per pair.
// Moments store (momentum, position) per pair; F-symbols store (position, momentum).
using Exponents = std::array<std::uint8_t, 2 * kMaxPairs>;

enum class SymbolKind : std::uint8_t { expectation, parameter, moment, fvariable };

namespace sym {

inline constexpr unsigned kKindShift = 62;
inline constexpr unsigned kOrderShift = 56;
inline constexpr std::uint64_t kDeclared = 0;
inline constexpr std::uint64_t kMoment = 1;
inline constexpr std::uint64_t kFVar = 2;

inline std::uint64_t kind_bits(Symbol s) { return s >> kKindShift; }
inline bool is_moment(Symbol s) { return kind_bits(s) == kMoment; }
inline bool is_fvar(Symbol s) { return kind_bits(s) == kFVar; }
inline bool is_declared(Symbol s) { return kind_bits(s) == kDeclared; }

int total(const Exponents& e);
Symbol pack(std::uint64_t kind, const Exponents& e);
Exponents unpack(Symbol s);
inline int order(Symbol s) { return static_cast<int>((s >> kOrderShift) & 0x3f); }

inline Symbol moment(const Exponents& e) { return pack(kMoment, e); }
inline Symbol fvar(const Exponents& e) { return pack(kFVar, e); }
inline Symbol declared(std::uint32_t index) { return index; }

}  // namespace sym

struct SymbolInfo {
  std::string name;
  SymbolKind kind;
  int grade;
};

// Names and grades of declared symbols plus the number of canonical pairs used
// to print moment and F-symbols.
class SymbolTable {
 public:
  SymbolTable() = default;
  explicit SymbolTable(int pairs) : pairs_(pairs) {}

  Symbol declare(const std::string& name, SymbolKind kind, int grade = 0);
  std::optional<Symbol> find(const std::string& name) const;
  Symbol at(const std::string& name) const;

  int pairs() const { return pairs_; }
  void set_pairs(int n) { pairs_ = n; }

  SymbolKind kind(Symbol s) const;
  int grade(Symbol s) const;
  std::string name(Symbol s) const;
  const std::vector<SymbolInfo>& declared() const { return info_; }

 private:
  int pairs_ = 1;
  std::vector<SymbolInfo> info_;
  std::unordered_map<std::string, Symbol> by_name_;
};

}  // namespace effcon
