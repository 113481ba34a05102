#include "topattr/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "topattr/error.hpp"
#include "topattr/hutchinson.hpp"

namespace topattr {

namespace {

void check_alphabet(int alphabet) {
  if (alphabet < 1 || alphabet > 256) throw ValidationError("alphabet size out of range");
}

// Permutation of {0..n-1} with the given factoradic rank.
std::vector<std::uint8_t> unrank_permutation(std::uint64_t rank, int n) {
  std::vector<std::uint8_t> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), std::uint8_t{0});
  std::vector<std::uint64_t> fact(static_cast<std::size_t>(n) + 1, 1);
  for (int i = 1; i <= n; ++i) fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i) - 1] * static_cast<std::uint64_t>(i);
  std::vector<std::uint8_t> out;
  for (int i = n; i >= 1; --i) {
    const std::uint64_t f = fact[static_cast<std::size_t>(i) - 1];
    const auto j = static_cast<std::size_t>(rank / f);
    out.push_back(pool[j]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
    rank %= f;
  }
  return out;
}

}  // namespace

SymbolWord make_word(std::initializer_list<int> symbols, int alphabet) {
  check_alphabet(alphabet);
  SymbolWord w;
  for (int s : symbols) {
    if (s < 0 || s >= alphabet) throw ValidationError("symbol out of alphabet");
    w.symbols.push_back(static_cast<std::uint8_t>(s));
  }
  return w;
}

SymbolWord concat(const SymbolWord& a, const SymbolWord& b) {
  SymbolWord w = a;
  w.symbols.insert(w.symbols.end(), b.symbols.begin(), b.symbols.end());
  return w;
}

std::string to_digit_string(const SymbolWord& w) {
  std::string s;
  s.reserve(w.size());
  for (auto d : w.symbols) {
    if (d > 9) throw ValidationError("symbol has no single-digit form");
    s.push_back(static_cast<char>('0' + d));
  }
  return s;
}

SymbolWord parse_digit_string(std::string_view s, int alphabet) {
  check_alphabet(alphabet);
  SymbolWord w;
  for (char c : s) {
    if (c < '0' || c > '9' || c - '0' >= alphabet) {
      throw ValidationError("bad symbol '" + std::string(1, c) + "' in word");
    }
    w.symbols.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return w;
}

SymbolWord shift(const SymbolWord& w) {
  if (w.empty()) throw ValidationError("shift of the empty word");
  SymbolWord out;
  out.symbols.assign(w.symbols.begin() + 1, w.symbols.end());
  return out;
}

SymbolWord encode(double phi, int n, int base) {
  if (n < 0) throw ValidationError("encode length must be >= 0");
  if (base < 2) throw ValidationError("encode base must be >= 2");
  if (!(phi >= 0.0 && phi < 1.0)) throw ValidationError("encode needs an angle in [0, 1)");
  SymbolWord w;
  w.symbols.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double y = phi * base;
    const double d = std::floor(y);
    w.symbols.push_back(static_cast<std::uint8_t>(d));
    phi = y - d;
  }
  return w;
}

SymbolWord encode(const Point& p, int n, int base) {
  if (!p.tape || p.tape->base != base) return encode(p.x[0], n, base);
  SymbolWord w;
  for (int k = 0; k < n; ++k) {
    const std::size_t pos = p.offset + static_cast<std::size_t>(k);
    w.symbols.push_back(pos < p.tape->digits.size() ? p.tape->digits[pos] : 0);
  }
  return w;
}

Box decode(const SymbolWord& w, int base) {
  Box b;
  b.dim = 1;
  double lo = 0.0, width = 1.0;
  for (auto d : w.symbols) {
    if (d >= base) throw ValidationError("symbol out of alphabet");
    width /= base;
    lo += d * width;
  }
  b.lo[0] = lo;
  b.hi[0] = lo + width;
  b.depth = base == 8 ? 3 * static_cast<int>(w.size()) : static_cast<int>(w.size());
  return b;
}

SymbolWord de_bruijn(int alphabet, int L) {
  check_alphabet(alphabet);
  if (L < 1) throw ValidationError("de Bruijn order must be >= 1");
  SymbolWord out;
  std::vector<int> w{-1};
  while (!w.empty()) {
    ++w.back();
    const std::size_t m = w.size();
    if (static_cast<std::size_t>(L) % m == 0) {
      for (int s : w) out.symbols.push_back(static_cast<std::uint8_t>(s));
    }
    while (w.size() < static_cast<std::size_t>(L)) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == alphabet - 1) w.pop_back();
  }
  return out;
}

SymbolWord rich_sequence(int L, int copies, int alphabet) {
  if (L < 1) throw ValidationError("rich_sequence needs L >= 1");
  if (copies < 1) throw ValidationError("rich_sequence needs copies >= 1");
  const SymbolWord cycle = de_bruijn(alphabet, L);
  SymbolWord lin = cycle;
  for (int i = 0; i + 1 < L; ++i) lin.symbols.push_back(cycle.symbols[static_cast<std::size_t>(i)]);

  std::uint64_t perms = 1;
  const bool permute = alphabet <= 20;
  if (permute) {
    for (int i = 2; i <= alphabet; ++i) perms *= static_cast<std::uint64_t>(i);
  }
  SymbolWord out;
  out.symbols.reserve(lin.size() * static_cast<std::size_t>(copies));
  for (int k = 0; k < copies; ++k) {
    if (!permute || k == 0) {
      out.symbols.insert(out.symbols.end(), lin.symbols.begin(), lin.symbols.end());
      continue;
    }
    const auto perm = unrank_permutation((static_cast<std::uint64_t>(k) * 7919u) % perms, alphabet);
    for (auto s : lin.symbols) out.symbols.push_back(perm[s]);
  }
  return out;
}

std::shared_ptr<const DigitTape> rich_tape(int L, std::size_t length, int base) {
  const std::size_t per_copy = static_cast<std::size_t>(std::pow(base, L)) + static_cast<std::size_t>(L) - 1;
  const std::size_t need = length + static_cast<std::size_t>(significant_digits(base)) + 1;
  const auto copies = static_cast<int>((need + per_copy - 1) / per_copy);
  auto tape = std::make_shared<DigitTape>();
  tape->base = base;
  tape->digits = rich_sequence(L, std::max(copies, 1), base).symbols;
  return tape;
}

SymbolWord dense_orbit_witness(const SymbolWord& w0, std::array<double, 2> x0, double eps, const IFS& ifs,
                               int max_len) {
  if (!(eps > 0.0)) throw ValidationError("witness needs eps > 0");
  const auto fam = ifs.family();
  if (!fam) throw ValidationError("witness needs the fiber IFS");
  const FiberGeometry& g = fam->geometry();
  if (x0[0] == g.q[0] && x0[1] == g.q[1]) return concat(make_word({0}), w0);
  if (!g.in_D(x0[0], x0[1])) throw ValidationError("witness target must lie in D or be q");

  // The certificate covers all of Z, which contains f_2(q).
  const WordSearchResult found = hutchinson_word_search(ifs, {x0[0], x0[1], 0.0}, eps, max_len);
  SymbolWord out = make_word({0, 2});
  for (auto it = found.word.symbols.rbegin(); it != found.word.symbols.rend(); ++it) {
    out.symbols.push_back(static_cast<std::uint8_t>(FiberFamily::member_symbol(*it)));
  }
  return concat(out, w0);
}

}  // namespace topattr
