#include <doctest.h>

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "topattr/attractor.hpp"
#include "topattr/error.hpp"
#include "topattr/report.hpp"
#include "topattr/symbolic.hpp"

using namespace topattr;

namespace {

Point pt(const SpacePtr& s, std::initializer_list<double> c) {
  std::vector<double> v(c);
  return make_point(s, v);
}

AnalysisParams quick(int depth, double delta = 0.1) {
  AnalysisParams p;
  p.depth = depth;
  p.delta = delta;
  p.grid_per_axis = 21;
  p.n_tail = 4000;
  return p;
}

BoxCover arc(const Grid& g, double lo, double hi) {
  std::vector<CellKey> keys;
  for (CellKey k : g.all_cells()) {
    const Box b = g.box(k);
    if (b.lo[0] >= lo && b.hi[0] <= hi) keys.push_back(k);
  }
  return BoxCover(g, keys);
}

CellKey zero_box(const Grid& g) { return g.key_of(pt(g.space(), {0.0})); }

nlohmann::json fixture(const std::string& name) {
  std::ifstream f(std::string(TOPATTR_FIXTURE_DIR) + "/" + name);
  REQUIRE(f.good());
  return nlohmann::json::parse(f);
}

}  // namespace

TEST_SUITE("attractor") {

TEST_CASE("params validate") {
  AnalysisParams p;
  CHECK_NOTHROW(p.validate());
  p.delta = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.n_tail = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.fiber_depth = 4;
  CHECK_THROWS_AS(analysis_grid(make_circle_space(), p), ValidationError);
}

TEST_CASE("omega limit examples") {
  MapSpec ce = counterexample_map();
  AnalysisParams p = quick(8);
  const OmegaEstimate e = omega_limit(ce, pt(ce.space, {0.3}), p);
  const Grid& g = e.cover.grid();
  CHECK(e.cover.keys() == BoxCover(g, {atom_key(0), zero_box(g)}).keys());

  MapSpec half = polynomial_map("half", 0, 1, {0, 0.5});
  const OmegaEstimate h = omega_limit(half, pt(half.space, {1.0}), p);
  REQUIRE(h.cover.size() == 1);
  CHECK(h.cover.grid().box(h.cover.keys()[0]).lo[0] == 0.0);

  MapSpec oct = mtupling_map(8);
  AnalysisParams q = quick(12);
  q.n_transient = 0;
  q.n_tail = 4096;
  const Point x = make_symbolic_point(oct.space, rich_tape(4, 5000), 0);
  CHECK(omega_limit(oct, x, q).cover.size() == 4096);
}

TEST_CASE("omega estimates nest under longer transients") {
  MapSpec sp = skew_product_map();
  AnalysisParams p;
  p.depth = 5;
  p.fiber_depth = 4;
  p.n_transient = 100;
  p.n_tail = 3000;
  const Point x = make_symbolic_point(sp.space, rich_tape(3, 10000), 5, std::array<double, 2>{-1.5, 0.0});
  const BoxCover a = omega_limit(sp, x, p).cover;
  p.n_transient = 200;
  p.n_tail = 2900;
  CHECK(omega_limit(sp, x, p).cover.subset_of(a));
}

TEST_CASE("delta ball check") {
  auto circle = make_circle_space();
  Grid g = Grid::at_depth(circle, 8);
  AnalysisParams p;
  CHECK(delta_ball_check({pt(circle, {0}), full_cover(g), p}, 0.1).has_value());
  CHECK_FALSE(delta_ball_check({pt(circle, {0}), arc(g, 0, 0.5), p}, 0.6).has_value());

  MapSpec ce = counterexample_map();
  Grid gi = Grid::at_depth(ce.space, 8);
  const BoxCover a(gi, {atom_key(0), zero_box(gi)});
  auto c = delta_ball_check({pt(ce.space, {0.3}), a, p}, 0.5);
  REQUIRE(c);
  CHECK(c->is_atom());
}

TEST_CASE("merge classes") {
  auto circle = make_circle_space();
  Grid g = Grid::at_depth(circle, 6);
  AnalysisParams p;
  std::vector<OmegaEstimate> full{{pt(circle, {0}), full_cover(g), p}, {pt(circle, {0.5}), full_cover(g), p}};
  CHECK(merge_classes(full, {0, 1}).size() == 1);

  std::vector<OmegaEstimate> halves{{pt(circle, {0.2}), arc(g, 0.0, 0.5), p}, {pt(circle, {0.7}), arc(g, 0.5, 1.0), p}};
  const auto two = merge_classes(halves, {0, 1});
  REQUIRE(two.size() == 2);
  CHECK(two[0].members == std::vector<std::size_t>{0});

  MapSpec ce = counterexample_map();
  AnalysisParams q = quick(8, 0.4);
  std::vector<OmegaEstimate> est;
  std::vector<std::size_t> idx;
  for (int i = 0; i < 50; ++i) {
    est.push_back(omega_limit(ce, pt(ce.space, {-1.0 + 2.0 * i / 49}), q));
    idx.push_back(static_cast<std::size_t>(i));
  }
  const auto one = merge_classes(est, idx);
  REQUIRE(one.size() == 1);
  const Grid& gi = one[0].cover.grid();
  CHECK(one[0].cover.keys() == BoxCover(gi, {atom_key(0), zero_box(gi)}).keys());
}

TEST_CASE("merge is order independent") {
  auto circle = make_circle_space();
  Grid g = Grid::at_depth(circle, 6);
  AnalysisParams p;
  std::vector<OmegaEstimate> est{{pt(circle, {0.1}), arc(g, 0.0, 0.3), p},
                                 {pt(circle, {0.2}), arc(g, 0.1, 0.45), p},
                                 {pt(circle, {0.6}), arc(g, 0.55, 0.8), p},
                                 {pt(circle, {0.9}), arc(g, 0.7, 0.95), p}};
  const auto base = merge_classes(est, {0, 1, 2, 3});
  REQUIRE(base.size() == 2);
  const auto shuffled = merge_classes(est, {3, 1, 0, 2});
  REQUIRE(shuffled.size() == 2);
  std::vector<std::vector<CellKey>> a, b;
  for (const auto& c : base) a.push_back(c.cover.keys());
  for (const auto& c : shuffled) b.push_back(c.cover.keys());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
}

TEST_CASE("transition graph components") {
  std::vector<std::vector<std::uint32_t>> adj{{1}, {2}, {0}, {3}, {}};
  auto comps = TransitionGraph::components(adj);
  CHECK(comps.size() == 3);
  std::sort(comps.begin(), comps.end());
  CHECK(comps[0] == std::vector<std::uint32_t>{0, 1, 2});

  MapSpec oct = mtupling_map(8);
  const BoxCover all = full_cover(Grid::at_depth(oct.space, 10));
  const TransitionGraph tg(oct, all, 4, 0.0, 4);
  CHECK(strongly_connected(tg, all));
  for (const auto& e : tg.edges()) CHECK(e.size() >= 1);
  CHECK(tg.recurrent().size() == all.size());
}

TEST_CASE("strong transitivity") {
  MapSpec oct = mtupling_map(8);
  AnalysisParams p = quick(10);
  const BoxCover all = full_cover(Grid::at_depth(oct.space, 10));
  for (std::size_t i = 0; i < all.size(); i += 97) {
    const auto r = strong_transitivity_check(oct, all, all.keys()[i], p);
    CHECK(r.covered);
    CHECK(r.iterations <= 5);
  }

  MapSpec id = mtupling_map(1);
  const BoxCover g6 = full_cover(Grid::at_depth(id.space, 6));
  const BoxCover half = arc(g6.grid(), 0, 0.5);
  BoxCover seed(g6.grid(), {half.keys()[10]});
  CHECK_FALSE(strong_transitivity_check(id, g6, half.keys()[10], p).covered);

  MapSpec ce = counterexample_map();
  Grid gi = Grid::at_depth(ce.space, 8);
  const BoxCover a(gi, {atom_key(0), zero_box(gi)});
  const auto r = strong_transitivity_check(ce, a, atom_key(0), p);
  CHECK(r.covered);
  CHECK(r.iterations == 2);
}

TEST_CASE("sensitivity") {
  MapSpec oct = mtupling_map(8);
  const BoxCover all = full_cover(Grid::at_depth(oct.space, 10));
  CHECK(sensitivity_estimate(oct, all, 1e-3, 20, 64) >= 0.4);

  MapSpec half = polynomial_map("half", 0, 1, {0, 0.5});
  const BoxCover h = full_cover(Grid::at_depth(half.space, 8));
  for (double eps : {1e-2, 1e-3}) CHECK(sensitivity_estimate(half, h, eps, 20, 64) <= 2 * eps);

  MapSpec sp = skew_product_map();
  const BoxCover t = full_cover(Grid::product(sp.space, 6, 4));
  CHECK(sensitivity_estimate(sp, t, 1e-3, 20, 32) >= 0.4);
}

TEST_CASE("punctured points") {
  MapSpec ce = counterexample_map();
  AnalysisParams p = quick(8, 0.4);
  std::vector<OmegaEstimate> est;
  for (double x : {-0.9, 0.0, 0.3}) est.push_back(omega_limit(ce, pt(ce.space, {x}), p));
  CHECK(punctured_points(est[0].cover, est, {0, 1, 2}, 0.2).empty());

  MapSpec oct = mtupling_map(8);
  AnalysisParams q = quick(8);
  const BoxCover all = full_cover(Grid::at_depth(oct.space, 8));
  std::vector<OmegaEstimate> oe{omega_limit(oct, pt(oct.space, {0.0}), q),
                                omega_limit(oct, make_symbolic_point(oct.space, rich_tape(3, 6000), 0), q)};
  const auto hits = punctured_points(all, oe, {0, 1}, 0.1);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].index == 0);
  CHECK(distance(hits[0].center, pt(oct.space, {0.0})) >= 0.1);

  MapSpec half = polynomial_map("half", 0, 1, {0, 0.5});
  std::vector<OmegaEstimate> he{omega_limit(half, pt(half.space, {1.0}), q)};
  CHECK(punctured_points(he[0].cover, he, {0}, 0.1).empty());
}

TEST_CASE("interior invariance audit") {
  MapSpec ce = counterexample_map();
  AnalysisParams p = quick(8, 0.4);
  Grid gi = Grid::at_depth(ce.space, 8);
  const BoxCover a(gi, {atom_key(0), zero_box(gi)});
  const auto v = interior_invariance_audit(ce, a, p);
  REQUIRE(v.size() == 1);
  CHECK(v[0].from == atom_key(0));
  CHECK(v[0].to == zero_box(gi));

  MapSpec oct = mtupling_map(8);
  CHECK(interior_invariance_audit(oct, full_cover(Grid::at_depth(oct.space, 8)), p).empty());
}

TEST_CASE("decomposition: counterexample") {
  MapSpec ce = counterexample_map();
  AnalysisParams p;
  p.delta = 0.4;
  p.depth = 8;
  const Decomposition d = decompose_attractors(ce, p);
  REQUIRE(d.attractors.size() == 1);
  const AttractorReport& a = d.attractors[0];
  const Grid& g = a.cover.grid();
  CHECK(a.cover.keys() == BoxCover(g, {atom_key(0), zero_box(g)}).keys());
  CHECK(a.basin_fraction == 1.0);
  CHECK(a.has_delta_ball);
  CHECK(a.transitive);
  CHECK(a.strong.covered);
  CHECK(a.punctured == 0);
  CHECK(a.dichotomy_branch == "dense-orbit");
  CHECK(a.violations.size() == 1);
  CHECK(d.outliers.empty());
  CHECK(d.remainder.empty());
}

TEST_CASE("decomposition: octupling") {
  MapSpec oct = mtupling_map(8);
  AnalysisParams p;
  p.depth = 10;
  const Decomposition d = decompose_attractors(oct, p);
  REQUIRE(d.attractors.size() == 1);
  const AttractorReport& a = d.attractors[0];
  CHECK(a.cover.size() == 1024);
  CHECK(a.transitive);
  CHECK(a.sensitive);
  CHECK(a.violations.empty());
  CHECK(a.basin_fraction == 1.0);
  CHECK(d.remainder.empty());
  // strong transitivity implies transitivity
  for (const auto& r : d.attractors) CHECK((!r.strong.covered || r.transitive));
}

TEST_CASE("decomposition: cubic against the orbit oracle") {
  const auto fx = fixture("cubic_oracle.json");
  MapSpec cubic = make_map("cubic");
  AnalysisParams p;
  p.delta = fx["delta"].get<double>();
  p.grid_per_axis = fx["grid"].get<int>();
  p.n_transient = fx["transient"].get<int>();
  p.n_tail = fx["tail"].get<int>();
  const Decomposition d = decompose_attractors(cubic, p);
  CHECK(d.attractors.size() == fx["classes"].get<std::size_t>());
  CHECK(d.outliers.size() == fx["outliers"].get<std::size_t>());
  CHECK(d.remainder_delta_free);
  CHECK(d.remainder_ball_free);
  for (CellKey k : d.remainder.keys()) {
    const Box b = d.remainder.grid().box(k);
    bool near_fixed = false;
    for (const auto& f : fx["fixed_points"]) {
      const double x = f["x"].get<double>();
      near_fixed = near_fixed || (x >= b.lo[0] && x <= b.hi[0]);
    }
    CHECK(near_fixed);
  }
}

TEST_CASE("basin openness on a finer grid") {
  MapSpec oct = mtupling_map(8);
  AnalysisParams p;
  p.depth = 8;
  p.grid_per_axis = 25;
  p.n_tail = 3000;
  const Decomposition coarse = decompose_attractors(oct, p);
  p.grid_per_axis = 100;
  const Decomposition fine = decompose_attractors(oct, p);
  REQUIRE(coarse.attractors.size() == 1);
  REQUIRE(fine.attractors.size() == 1);
  CHECK(fine.attractors[0].cover == coarse.attractors[0].cover);
  CHECK(fine.attractors[0].basin_fraction == 1.0);
}

TEST_CASE("merge soundness under a longer tail") {
  MapSpec oct = mtupling_map(8);
  AnalysisParams p;
  p.depth = 8;
  p.grid_per_axis = 10;
  p.n_tail = 3000;
  const Decomposition a = decompose_attractors(oct, p);
  p.n_tail = 6000;
  const Decomposition b = decompose_attractors(oct, p);
  REQUIRE(a.attractors.size() == 1);
  REQUIRE(b.attractors.size() == 1);
  const BoxCover& ca = a.attractors[0].cover;
  const BoxCover& cb = b.attractors[0].cover;
  const double sym = static_cast<double>(ca.minus(cb).size() + cb.minus(ca).size());
  CHECK(sym == 0.0);
}

TEST_CASE("reports are independent of the worker count") {
  for (const char* name : {"counterexample", "mtupling:8"}) {
    MapSpec m = make_map(name);
    AnalysisParams p;
    p.delta = 0.4;
    p.depth = 8;
    p.grid_per_axis = 33;
    p.n_tail = 2000;
    p.workers = 1;
    const std::string one = analysis_json(m, p, decompose_attractors(m, p), {}, "").dump();
    p.workers = 8;
    const Decomposition d8 = decompose_attractors(m, p);
    p.workers = 1;
    CHECK(analysis_json(m, p, d8, {}, "").dump() == one);
  }
}

}
