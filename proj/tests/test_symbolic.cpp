#include <doctest.h>

#include <cmath>
#include <map>

#include "topattr/error.hpp"
#include "topattr/hutchinson.hpp"
#include "topattr/random.hpp"
#include "topattr/symbolic.hpp"

using namespace topattr;

TEST_SUITE("symbolic") {

TEST_CASE("shift") {
  CHECK(shift(make_word({0, 1, 2, 3})) == make_word({1, 2, 3}));
  CHECK(shift(make_word({7})).empty());
  CHECK(shift(shift(make_word({5, 5, 0}))) == make_word({0}));
  CHECK_THROWS(shift(SymbolWord{}));
  CHECK_THROWS(make_word({8}));
}

TEST_CASE("digit strings") {
  CHECK(to_digit_string(make_word({0, 2, 3, 7})) == "0237");
  CHECK(parse_digit_string("0237") == make_word({0, 2, 3, 7}));
  CHECK_THROWS(parse_digit_string("08"));
}

TEST_CASE("encode") {
  CHECK(encode(0.0, 4) == make_word({0, 0, 0, 0}));
  CHECK(encode(1.0 / 8, 3) == make_word({1, 0, 0}));
  CHECK(encode(0.6, 2) == make_word({4, 6}));
}

TEST_CASE("decode") {
  Box b = decode(SymbolWord{});
  CHECK(b.lo[0] == 0.0);
  CHECK(b.hi[0] == 1.0);
  b = decode(make_word({3}));
  CHECK(b.lo[0] == 3.0 / 8);
  CHECK(b.hi[0] == 4.0 / 8);
  b = decode(make_word({0, 2}));
  CHECK(b.lo[0] == 2.0 / 64);
  CHECK(b.hi[0] == 3.0 / 64);
}

TEST_CASE("decode inverts encode") {
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const double phi = rng.uniform();
    for (int n = 0; n <= 12; ++n) {
      const Box b = decode(encode(phi, n));
      CHECK(phi >= b.lo[0]);
      CHECK(phi < b.hi[0]);
    }
  }
}

TEST_CASE("de Bruijn") {
  const SymbolWord w = de_bruijn(8, 2);
  CHECK(w.size() == 64);
  std::map<int, int> seen;
  for (std::size_t i = 0; i < 64; ++i) ++seen[w[i] * 8 + w[(i + 1) % 64]];
  CHECK(seen.size() == 64);
}

TEST_CASE("rich sequences") {
  const SymbolWord w1 = rich_sequence(1, 1);
  for (int s = 0; s < 8; ++s) CHECK(std::count(w1.symbols.begin(), w1.symbols.end(), s) >= 1);

  for (int copies : {1, 3}) {
    const SymbolWord w = rich_sequence(2, copies);
    CHECK(w.size() == static_cast<std::size_t>(copies) * (64 + 1));
    std::map<int, int> count;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) ++count[w[i] * 8 + w[i + 1]];
    CHECK(count.size() == 64);
    for (const auto& [k, c] : count) CHECK(c >= copies);
    std::map<int, int> singles;
    for (auto s : w.symbols) ++singles[s];
    for (const auto& [k, c] : singles) CHECK(c >= copies);
  }
}

TEST_CASE("dense orbit witness") {
  const IFS ifs = IFS::fiber();
  const FiberFamily& fam = *ifs.family();
  const auto q = fam.geometry().q;
  CHECK(dense_orbit_witness(make_word({3, 3}), q, 0.1, ifs) == make_word({0, 3, 3}));

  const auto p = fam.piece(FiberFamily::Top).apply(q[0], q[1]);
  CHECK(dense_orbit_witness(SymbolWord{}, p, 10.0, ifs) == make_word({0, 2}));

  const double eps = 0.2;
  const SymbolWord w = dense_orbit_witness(SymbolWord{}, {-1.5, 0.0}, eps, ifs);
  REQUIRE(w.size() >= 2);
  CHECK(w[0] == 0);
  CHECK(w[1] == 2);
  const double diam_z = 6.0;
  const int limit = static_cast<int>(std::ceil(std::log(eps / diam_z) / std::log(ifs.lambda()))) + 2;
  CHECK(static_cast<int>(w.size()) - 2 <= limit);
  // forward evaluation: the fiber symbols after the leading 0 act in order
  std::array<double, 2> x = q;
  for (std::size_t i = 1; i < w.size(); ++i) x = fam.piece(FiberFamily::Top + (w[i] / 2 - 1)).apply(x[0], x[1]);
  CHECK(std::hypot(x[0] + 1.5, x[1]) < eps);

  CHECK_THROWS(dense_orbit_witness(SymbolWord{}, {2.5, 0.0}, 0.1, ifs));
}

}
