#include <doctest.h>

#include <cmath>
#include <sstream>

#include "topattr/error.hpp"
#include "topattr/phase.hpp"
#include "topattr/random.hpp"

using namespace topattr;

namespace {

Point pt(const SpacePtr& s, std::initializer_list<double> c) {
  std::vector<double> v(c);
  return make_point(s, v);
}

}  // namespace

TEST_SUITE("phase") {

TEST_CASE("space descriptors validate") {
  CHECK_THROWS_AS(make_interval_space(1, -1), ValidationError);
  CHECK_THROWS_AS(make_interval_space(-1, 1, {0.5}), ValidationError);
  CHECK_THROWS_AS(make_disk_space(0.0), ValidationError);
  CHECK(make_interval_space(-1, 1, {2})->atoms.size() == 1);
}

TEST_CASE("points") {
  auto circle = make_circle_space();
  CHECK(pt(circle, {1.25}).x[0] == doctest::Approx(0.25));
  auto disk = make_disk_space(3.0);
  CHECK_THROWS_AS(pt(disk, {3.0, 0.1}), DomainError);
  auto iv = make_interval_space(-1, 1, {2});
  CHECK(pt(iv, {2.0}).is_atom());
  CHECK_THROWS_AS(pt(iv, {1.5}), DomainError);
}

TEST_CASE("distance") {
  auto circle = make_circle_space();
  CHECK(distance(pt(circle, {0.1}), pt(circle, {0.9})) == doctest::Approx(0.2));
  auto iv = make_interval_space(-1, 1, {2});
  CHECK(distance(pt(iv, {1.0}), make_atom(iv, 0)) == doctest::Approx(1.0));
  auto torus = make_solid_torus_space(3.0);
  CHECK(distance(pt(torus, {0.1, 0, 0}), pt(torus, {0.1, 3, 0})) == doctest::Approx(3.0));
  CHECK_THROWS(distance(pt(circle, {0.1}), pt(iv, {0.1})));
}

TEST_CASE("distance is a metric on samples") {
  auto torus = make_solid_torus_space(3.0);
  Rng rng(7);
  auto draw = [&] {
    for (;;) {
      double x = rng.uniform(-3, 3), y = rng.uniform(-3, 3);
      if (x * x + y * y <= 9) return pt(torus, {rng.uniform(), x, y});
    }
  };
  for (int i = 0; i < 2000; ++i) {
    Point a = draw(), b = draw(), c = draw();
    CHECK(distance(a, b) == distance(b, a));
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12);
  }
}

TEST_CASE("subdivide") {
  auto circle = make_circle_space();
  BoxCover root = full_cover(Grid::at_depth(circle, 0));
  BoxCover halves = subdivide(root);
  REQUIRE(halves.size() == 2);
  CHECK(halves.depth() == 1);
  auto b = halves.boxes();
  CHECK(b[0].lo[0] == 0.0);
  CHECK(b[0].hi[0] == 0.5);
  CHECK(b[1].hi[0] == 1.0);

  auto iv = make_interval_space(-1, 1, {2});
  BoxCover atom(Grid::at_depth(iv, 0), {atom_key(0)});
  BoxCover sub = subdivide(atom);
  CHECK(sub.keys() == std::vector<CellKey>{atom_key(0)});

  BoxCover c = root;
  for (int d = 0; d < 10; ++d) c = subdivide(c);
  CHECK(c.size() == 1024);
  for (const Box& x : c.boxes()) CHECK(x.hi[0] - x.lo[0] == std::ldexp(1.0, -10));
}

TEST_CASE("subdivide partitions each parent") {
  auto torus = make_solid_torus_space(3.0);
  BoxCover c = full_cover(Grid::product(torus, 2, 2));
  BoxCover f = subdivide(c);
  for (CellKey k : f.keys()) {
    const Box child = f.grid().box(k);
    const auto mid = child.center();
    auto parent = c.grid().key_of_coords(mid);
    REQUIRE(parent);
    const Box p = c.grid().box(*parent);
    for (int d = 0; d < 3; ++d) {
      CHECK(child.lo[d] >= p.lo[d]);
      CHECK(child.hi[d] <= p.hi[d]);
    }
  }
  double vol_parent = 0, vol_child = 0;
  for (const Box& b : c.boxes()) vol_parent += (b.hi[0] - b.lo[0]) * (b.hi[1] - b.lo[1]) * (b.hi[2] - b.lo[2]);
  for (const Box& b : f.boxes()) vol_child += (b.hi[0] - b.lo[0]) * (b.hi[1] - b.lo[1]) * (b.hi[2] - b.lo[2]);
  CHECK(vol_child == doctest::Approx(vol_parent));
}

TEST_CASE("ball containment") {
  auto circle = make_circle_space();
  Grid g = Grid::at_depth(circle, 6);
  CHECK(ball_contained(full_cover(g), pt(circle, {0.3}), 0.1, 64));

  std::vector<CellKey> left;
  for (CellKey k : g.all_cells()) {
    if (g.box(k).hi[0] <= 0.5) left.push_back(k);
  }
  BoxCover half(g, left);
  CHECK_FALSE(ball_contained(half, pt(circle, {0.75}), 0.1, 64));
  CHECK(ball_contained(half, pt(circle, {0.25}), 0.1, 64));

  auto iv = make_interval_space(-1, 1, {2});
  BoxCover atom(Grid::at_depth(iv, 8), {atom_key(0)});
  CHECK(ball_contained(atom, make_atom(iv, 0), 0.5, 64));
  CHECK_FALSE(ball_contained(BoxCover(Grid::at_depth(iv, 8)), make_atom(iv, 0), 0.5, 64));
}

TEST_CASE("ball containment is monotone") {
  auto circle = make_circle_space();
  Grid g = Grid::at_depth(circle, 7);
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<CellKey> a, b;
    for (CellKey k : g.all_cells()) {
      const double u = rng.uniform();
      if (u < 0.7) a.push_back(k);
      if (u < 0.85) b.push_back(k);
    }
    BoxCover ca(g, a), cb(g, b);
    REQUIRE(ca.subset_of(cb));
    for (int j = 0; j < 10; ++j) {
      Point c = pt(circle, {rng.uniform()});
      if (ball_contained(ca, c, 0.02, 32)) CHECK(ball_contained(cb, c, 0.02, 32));
    }
  }
}

TEST_CASE("interior cells and dilation") {
  auto iv = make_interval_space(0, 1);
  Grid g = Grid::at_depth(iv, 3);
  BoxCover c(g, {g.all_cells()[2], g.all_cells()[3], g.all_cells()[4]});
  CHECK(interior_cells(c).size() == 1);
  CHECK(dilate(c).size() == 5);
  auto atoms = make_interval_space(-1, 1, {2});
  Grid ga = Grid::at_depth(atoms, 3);
  CHECK(is_interior_cell(BoxCover(ga, {atom_key(0)}), atom_key(0)));
}

TEST_CASE("csv round trip") {
  auto torus = make_solid_torus_space(3.0);
  Grid g = Grid::product(torus, 3, 4);
  BoxCover c = full_cover(g);
  std::stringstream ss;
  write_cover_csv(ss, c);
  BoxCover back = read_cover_csv(ss, torus);
  CHECK(back == c);

  auto iv = make_interval_space(-1, 1, {2});
  Grid gi = Grid::at_depth(iv, 8);
  BoxCover ci(gi, {atom_key(0), gi.key_of(pt(iv, {0.0}))});
  std::stringstream si;
  write_cover_csv(si, ci);
  CHECK(read_cover_csv(si, iv) == ci);
}

}
