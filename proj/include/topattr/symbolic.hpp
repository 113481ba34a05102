#pragma once

// One-sided shift over a finite alphabet (8 symbols for the octupling coding).

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "topattr/phase.hpp"

namespace topattr {

class IFS;

struct SymbolWord {
  std::vector<std::uint8_t> symbols;

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  std::uint8_t operator[](std::size_t i) const { return symbols[i]; }
  bool operator==(const SymbolWord&) const = default;
  auto operator<=>(const SymbolWord&) const = default;
};

SymbolWord make_word(std::initializer_list<int> symbols, int alphabet = 8);
SymbolWord concat(const SymbolWord& a, const SymbolWord& b);

// Digit-string form "0237"; symbols above 9 are not representable.
std::string to_digit_string(const SymbolWord& w);
SymbolWord parse_digit_string(std::string_view s, int alphabet = 8);

SymbolWord shift(const SymbolWord& w);

// First n base-`base` digits of phi in [0, 1): digit k = floor(base^{k+1} phi) mod base.
SymbolWord encode(double phi, int n, int base = 8);
// Same, read off the exact tape when the point carries one.
SymbolWord encode(const Point& p, int n, int base = 8);
// Cylinder arc [lo, lo + base^-len) on the circle.
Box decode(const SymbolWord& w, int base = 8);

// Word containing every word of length <= L at least `copies` times: copy k is
// the linearized de Bruijn sequence B(alphabet, L) relabeled by a fixed
// permutation depending on k (copy 0 is unpermuted).
SymbolWord rich_sequence(int L, int copies, int alphabet = 8);
// Lyndon-word (FKM) de Bruijn cycle of order L, length alphabet^L.
SymbolWord de_bruijn(int alphabet, int L);
// Digit tape long enough to drive `length` steps of an orbit.
std::shared_ptr<const DigitTape> rich_tape(int L, std::size_t length, int base = 8);

// [0, 2] ++ steering word ++ w0 (or [0] ++ w0 when x0 is the parking point q).
// Steering is the reversed Hutchinson word, mapped to fiber symbols 2, 4, 6.
SymbolWord dense_orbit_witness(const SymbolWord& w0, std::array<double, 2> x0, double eps, const IFS& ifs,
                               int max_len = 64);

}  // namespace topattr
