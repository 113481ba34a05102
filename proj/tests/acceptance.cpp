// Acceptance run: one PASS/FAIL line per criterion, with wall time.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "topattr/attractor.hpp"
#include "topattr/cli.hpp"
#include "topattr/hutchinson.hpp"
#include "topattr/parallel.hpp"
#include "topattr/random.hpp"
#include "topattr/report.hpp"
#include "topattr/symbolic.hpp"

using namespace topattr;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::string report;  // compared across runs
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

nlohmann::json load_fixture(const std::string& name) {
  std::ifstream f(std::string(TOPATTR_FIXTURE_DIR) + "/" + name);
  if (!f) return nullptr;
  return nlohmann::json::parse(f);
}

Outcome counterexample(int workers) {
  const std::vector<std::string> args{"topattr", "analyze", "--map", "counterexample", "--delta", "0.4",
                                      "--depth", "8", "--grid", "101", "--workers", std::to_string(workers)};
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  if (run_cli(static_cast<int>(argv.size()), argv.data(), out, err) != 0) {
    o.detail = "analyze failed: " + err.str();
    return o;
  }
  o.report = out.str();
  const auto j = nlohmann::json::parse(o.report);
  const auto& as = j["attractors"];
  const MapSpec ce = counterexample_map();
  const Grid g = Grid::at_depth(ce.space, 8);
  std::vector<double> zero{0.0};
  const std::string atom = describe_cell(g, atom_key(0));
  const std::string zbox = describe_cell(g, g.key_of(make_point(ce.space, zero)));
  bool cover_ok = false, basin_ok = false, viol_ok = false;
  if (as.size() == 1) {
    cover_ok = as[0]["boxes"] == nlohmann::json::array({zbox, atom}) ||
               as[0]["boxes"] == nlohmann::json::array({atom, zbox});
    basin_ok = as[0]["basin_fraction"] == 1.0;
    for (const auto& v : as[0]["violations"]) viol_ok = viol_ok || (v["from"] == atom && v["to"] == zbox);
  }
  o.pass = as.size() == 1 && cover_ok && basin_ok && viol_ok;
  o.detail = "attractors=" + std::to_string(as.size()) + " cover={atom 2, 0-box}:" + (cover_ok ? "yes" : "no") +
             " basin=1:" + (basin_ok ? "yes" : "no") + " atom2->0box:" + (viol_ok ? "yes" : "no");
  return o;
}

Outcome fiber_gate(int) {
  Outcome o;
  const IFS ifs = IFS::fiber();
  const PropertyReport r = verify_fiber_properties(ifs, 100000, 0);
  Json j;
  j["constants"] = fiber_constants_json(ifs.family()->constants());
  j["fiber_properties"] = property_report_json(r);
  o.report = j.dump();
  const auto fx = load_fixture("fiber_ifs.json");
  const bool fixture_ok = !fx.is_null() && nlohmann::json::parse(o.report) == fx;
  o.pass = r.all_pass() && r.min_margin() >= 0.01 && fixture_ok;
  o.detail = fmt("margins %.4f", r.props[0].margin) + fmt(" %.4f", r.props[1].margin) +
             fmt(" %.4f", r.props[2].margin) + fmt(" %.4f", r.props[3].margin) +
             " fixture:" + (fixture_ok ? "match" : "MISMATCH");
  return o;
}

Outcome word_search(int) {
  Outcome o;
  const IFS ifs = IFS::fiber();
  const FiberGeometry& geo = ifs.family()->geometry();
  const double radius = 0.2;
  const double diam_z = 2.0 * geo.radius;
  const int limit = static_cast<int>(std::ceil(std::log(0.1 / diam_z) / std::log(ifs.lambda()))) + 2;
  Rng targets(20240601);
  Rng probes(77);
  int found = 0, landed = 0, longest = 0;
  Json words = Json::array();
  for (int t = 0; t < 20; ++t) {
    double cx, cy;
    do {
      cx = targets.uniform(-geo.radius, 0.0);
      cy = targets.uniform(-geo.radius, geo.radius);
    } while (!geo.in_D(cx, cy));
    WordSearchResult r;
    try {
      r = hutchinson_word_search(ifs, {cx, cy, 0.0}, radius, limit);
    } catch (const std::exception&) {
      words.push_back(nullptr);
      continue;
    }
    ++found;
    longest = std::max(longest, static_cast<int>(r.word.size()));
    words.push_back(to_digit_string(r.word));
    bool all_in = true;
    for (int i = 0; i < 1000; ++i) {
      double x, y;
      do {
        x = probes.uniform(-geo.radius, geo.z_cut);
        y = probes.uniform(-geo.radius, geo.radius);
      } while (!geo.in_Z(x, y));
      const auto img = ifs.apply_word(r.word, {x, y, 0.0});
      all_in = all_in && std::hypot(img[0] - cx, img[1] - cy) < radius;
    }
    landed += all_in ? 1 : 0;
  }
  o.report = words.dump();
  o.pass = found == 20 && landed == 20 && longest <= limit;
  o.detail = "found " + std::to_string(found) + "/20, forward-checked " + std::to_string(landed) +
             "/20, max |w|=" + std::to_string(longest) + " (limit " + std::to_string(limit) + ")";
  return o;
}

Outcome octupling(int workers) {
  Outcome o;
  const MapSpec oct = mtupling_map(8);
  AnalysisParams p;
  p.depth = 10;
  p.delta = 0.1;
  p.workers = workers;
  const auto pts = initial_grid(oct, p);
  std::vector<OmegaEstimate> est(pts.size());
  std::vector<char> ball(pts.size());
  parallel_for(pts.size(), workers, [&](std::size_t i) {
    est[i] = omega_limit(oct, pts[i], p);
    ball[i] = delta_ball_check(est[i], p.delta).has_value();
  });
  std::size_t balls = 0;
  for (char b : ball) balls += b ? 1 : 0;
  const bool a = balls == pts.size();

  const BoxCover all = full_cover(analysis_grid(oct.space, p));
  const TransitionGraph tg(oct, all, p.samples_per_axis, p.bloat, workers);
  const bool b = strongly_connected(tg, all);

  int worst = 0;
  bool covered = true;
  for (CellKey k : all.keys()) {
    const auto st = strong_transitivity_check(oct, all, k, p);
    covered = covered && st.covered;
    worst = std::max(worst, st.iterations);
  }
  const bool c = covered && worst <= 6;

  const double r = sensitivity_estimate(oct, all, 1e-3, 20, p.sensitivity_samples, p.seed);
  const bool d = r >= 0.4;

  o.pass = a && b && c && d;
  o.detail = "(a) " + std::to_string(balls) + "/" + std::to_string(pts.size()) + " delta-balls; (b) strongly connected:" +
             (b ? "yes" : "no") + "; (c) max iterations " + std::to_string(worst) + fmt("; (d) r=%.4f", r);
  o.report = o.detail;
  return o;
}

Outcome skew_audit(int workers) {
  Outcome o;
  const MapSpec sp = skew_product_map();
  const FiberGeometry& geo = std::get<SkewProduct>(sp.rule).family->geometry();
  AnalysisParams p;
  p.depth = 6;
  p.fiber_depth = 4;
  p.workers = workers;
  const Grid g = analysis_grid(sp.space, p);
  const std::size_t steps = 100000, transient = 100;
  const Point start =
      make_symbolic_point(sp.space, rich_tape(3, steps + 10), 0, std::array<double, 2>{-1.5, 0.0});

  std::vector<double> qc{0.0, geo.q[0], geo.q[1]};
  const CellKey q_cell = g.key_of(make_point(sp.space, qc));
  const auto q_fiber = unpack_cell(q_cell);
  std::vector<CellKey> targets;
  for (CellKey k : g.all_cells()) {
    const Box b = g.box(k);
    const auto idx = unpack_cell(k);
    if (b.lo[1] < geo.d_cut || (idx[1] == q_fiber[1] && idx[2] == q_fiber[2])) targets.push_back(k);
  }
  const BoxCover target(g, targets);

  std::vector<CellKey> visited;
  std::size_t forbidden = 0;
  visit_orbit(sp, start, steps, [&](const Point& x, std::size_t n) {
    if (n < transient) return;
    visited.push_back(g.key_of(x));
    if (x.x[1] >= geo.z_cut && std::fabs(x.x[2]) > 0.1) ++forbidden;
  });
  const BoxCover seen(g, visited);
  const double coverage = static_cast<double>(target.intersected(seen).size()) / static_cast<double>(target.size());

  const auto viol = interior_invariance_audit(sp, seen, p);
  std::size_t arc0 = 0;
  for (const Violation& v : viol) {
    const Box b = g.box(v.from);
    if (b.hi[0] <= 1.0 / 8 && b.hi[1] <= geo.d_cut) ++arc0;
  }
  o.pass = coverage >= 0.95 && forbidden == 0 && arc0 >= 1;
  o.detail = fmt("coverage %.4f of ", coverage) + std::to_string(target.size()) + " target boxes; visits to (M\\Z)&|y|>0.1: " +
             std::to_string(forbidden) + "; violations " + std::to_string(viol.size()) + " (" + std::to_string(arc0) +
             " from arc-0 x D)";
  o.report = o.detail;
  return o;
}

Outcome merge_property(int workers) {
  Outcome o;
  const MapSpec oct = mtupling_map(8);
  AnalysisParams p;
  p.depth = 10;
  p.delta = 0.1;
  p.grid_per_axis = 50;
  p.workers = workers;
  const Decomposition d = decompose_attractors(oct, p);
  const bool oct_ok = d.attractors.size() == 1 && d.attractors[0].merged_from == 50;

  const auto fx = load_fixture("cubic_oracle.json");
  bool cubic_ok = false;
  std::string cubic_detail = "fixture missing";
  std::string cubic_report;
  if (!fx.is_null()) {
    const MapSpec cubic = make_map("cubic");
    AnalysisParams q;
    q.delta = fx["delta"].get<double>();
    q.grid_per_axis = fx["grid"].get<int>();
    q.n_transient = fx["transient"].get<int>();
    q.n_tail = fx["tail"].get<int>();
    q.depth = 8;
    q.workers = workers;
    const Decomposition c = decompose_attractors(cubic, q);
    cubic_ok = c.attractors.size() == fx["classes"].get<std::size_t>() && c.remainder_delta_free;
    cubic_detail = "cubic classes " + std::to_string(c.attractors.size()) + " (oracle " +
                   std::to_string(fx["classes"].get<int>()) + "), remainder " + std::to_string(c.remainder.size()) +
                   " boxes, delta-ball-free:" + (c.remainder_delta_free ? "yes" : "no");
    cubic_report = analysis_json(cubic, q, c, {}, "").dump();
  }
  AnalysisParams shown = p;
  shown.workers = 0;
  o.report = analysis_json(oct, shown, d, {}, "").dump() + cubic_report;
  o.pass = oct_ok && cubic_ok;
  o.detail = "octupling classes " + std::to_string(d.attractors.size()) + " from " +
             std::to_string(d.attractors.empty() ? 0 : d.attractors[0].merged_from) + " estimates; " + cubic_detail;
  return o;
}

struct Criterion {
  const char* name;
  double limit_s;
  std::function<Outcome(int)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"1 counterexample exactness", 1.0, counterexample},
      {"2 fiber-property gate", 30.0, fiber_gate},
      {"3 Hutchinson word search", 60.0, word_search},
      {"4 octupling suite", 60.0, octupling},
      {"5 skew-product interior audit", 300.0, skew_audit},
      {"6 merge property", 30.0, merge_property},
  };
  bool all = true;
  std::vector<std::string> first;
  for (const auto& c : criteria) {
    set_default_workers(8);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o = c.run(8);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = o.pass && s < c.limit_s;
    all = all && ok;
    std::printf("%s criterion %s: %s [%.2fs, limit %.0fs]\n", ok ? "PASS" : "FAIL", c.name, o.detail.c_str(), s,
                c.limit_s);
    std::fflush(stdout);
    first.push_back(std::move(o.report));
  }

  bool same = true;
  std::string where;
  for (int w : {8, 1}) {
    set_default_workers(w);
    for (std::size_t i = 0; i < criteria.size(); ++i) {
      if (criteria[i].run(w).report != first[i]) {
        same = false;
        where += " " + std::to_string(i + 1) + "@" + std::to_string(w);
      }
    }
  }
  all = all && same;
  std::printf("%s criterion 7 determinism: reports 1-6 %s across repeat run and workers 8/1%s\n",
              same ? "PASS" : "FAIL", same ? "identical" : "differ", where.c_str());
  return all ? 0 : 1;
}
