#include "topattr/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "topattr/error.hpp"
#include "topattr/parallel.hpp"
#include "topattr/random.hpp"
#include "topattr/symbolic.hpp"

namespace topattr {

void AnalysisParams::validate() const {
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");
  if (depth < 0 || depth > 3 * kMaxLevels) throw ValidationError("depth out of range");
  if (fiber_depth && (*fiber_depth < 0 || *fiber_depth > 2 * kMaxLevels)) {
    throw ValidationError("fiber depth out of range");
  }
  if (n_transient < 0) throw ValidationError("transient must be >= 0");
  if (n_tail < 1) throw ValidationError("tail must be >= 1");
  if (grid_per_axis < 1) throw ValidationError("grid must be >= 1");
  if (!(bloat >= 0.0)) throw ValidationError("bloat must be >= 0");
  if (probe_count < 1) throw ValidationError("probe count must be >= 1");
  if (samples_per_axis < 2) throw ValidationError("samples per axis must be >= 2");
  if (sensitivity_steps < 1 || sensitivity_samples < 1) throw ValidationError("sensitivity counts must be >= 1");
  if (max_iterations < 1) throw ValidationError("iteration budget must be >= 1");
  if (workers < 0) throw ValidationError("workers must be >= 0");
}

int AnalysisParams::worker_count() const { return workers > 0 ? workers : default_workers(); }

Grid analysis_grid(const SpacePtr& space, const AnalysisParams& params) {
  if (params.fiber_depth) {
    if (space->kind != SpaceKind::CircleTimesDisk) throw ValidationError("fiber depth needs a circle x disk map");
    return Grid::product(space, params.depth, *params.fiber_depth);
  }
  return Grid::at_depth(space, params.depth);
}

namespace {

constexpr std::size_t kTapeStride = 97;

int tape_order(int base, int levels) {
  const double bits = std::log2(static_cast<double>(base));
  int L = std::max(1, static_cast<int>(std::ceil(levels / bits)));
  while (L > 1 && std::pow(base, L) > static_cast<double>(1 << 20)) --L;
  return L;
}

std::shared_ptr<const DigitTape> grid_tape(int base, int levels, const AnalysisParams& p) {
  const std::size_t need = static_cast<std::size_t>(p.grid_per_axis - 1) * kTapeStride +
                           static_cast<std::size_t>(p.n_transient) + static_cast<std::size_t>(p.n_tail) + 2;
  return rich_tape(tape_order(base, levels), need, base);
}

bool point_ok(const SpaceDescriptor& s, const std::array<double, 3>& c) {
  switch (s.kind) {
    case SpaceKind::Disk:
      return c[0] * c[0] + c[1] * c[1] <= s.disk_radius * s.disk_radius;
    case SpaceKind::CircleTimesDisk:
      return c[1] * c[1] + c[2] * c[2] <= s.disk_radius * s.disk_radius;
    default:
      return true;
  }
}

double wrap_gap(double a, double b) {
  double d = std::fabs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

// Distance from point c to the closed box b, in the space's metric.
double point_box_distance(const SpaceDescriptor& s, const std::array<double, 3>& c, const Box& b) {
  auto gap = [](double v, double lo, double hi) { return v < lo ? lo - v : (v > hi ? v - hi : 0.0); };
  switch (s.kind) {
    case SpaceKind::IntervalWithAtoms:
      return gap(c[0], b.lo[0], b.hi[0]);
    case SpaceKind::Circle: {
      if (c[0] >= b.lo[0] && c[0] <= b.hi[0]) return 0.0;
      return std::min(wrap_gap(c[0], b.lo[0]), wrap_gap(c[0], b.hi[0]));
    }
    case SpaceKind::Disk:
      return std::hypot(gap(c[0], b.lo[0], b.hi[0]), gap(c[1], b.lo[1], b.hi[1]));
    case SpaceKind::CircleTimesDisk: {
      const double base =
          (c[0] >= b.lo[0] && c[0] <= b.hi[0]) ? 0.0 : std::min(wrap_gap(c[0], b.lo[0]), wrap_gap(c[0], b.hi[0]));
      return std::max(base, std::hypot(gap(c[1], b.lo[1], b.hi[1]), gap(c[2], b.lo[2], b.hi[2])));
    }
  }
  return 0.0;
}

// Cells (and atoms) meeting the open ball B(center, r).
std::vector<CellKey> cells_in_ball(const Grid& g, const Point& center, double r) {
  const SpaceDescriptor& s = *g.space();
  std::vector<CellKey> out;
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    if (std::fabs(s.atoms[i] - center.x[0]) < r) out.push_back(atom_key(static_cast<int>(i)));
  }
  const int dim = g.dim();
  std::array<std::int64_t, 3> lo{}, hi{};
  for (int k = 0; k < dim; ++k) {
    const double w = g.width(k);
    lo[k] = static_cast<std::int64_t>(std::floor((center.x[k] - r - g.root_lo(k)) / w));
    hi[k] = static_cast<std::int64_t>(std::floor((center.x[k] + r - g.root_lo(k)) / w));
    if (g.periodic(k)) {
      if (hi[k] - lo[k] + 1 >= g.cells(k)) {
        lo[k] = 0;
        hi[k] = g.cells(k) - 1;
      }
    } else {
      lo[k] = std::max<std::int64_t>(lo[k], 0);
      hi[k] = std::min<std::int64_t>(hi[k], g.cells(k) - 1);
    }
  }
  for (std::int64_t c = lo[2]; c <= hi[2]; ++c) {
    for (std::int64_t b = lo[1]; b <= hi[1]; ++b) {
      for (std::int64_t a = lo[0]; a <= hi[0]; ++a) {
        std::array<std::int64_t, 3> idx{a, b, c};
        for (int k = 0; k < dim; ++k) {
          if (g.periodic(k)) idx[k] = ((idx[k] % g.cells(k)) + g.cells(k)) % g.cells(k);
        }
        const CellKey key = pack_cell(idx);
        if (!g.cell_in_space(key)) continue;
        if (point_box_distance(s, center.x, g.box(key)) < r) out.push_back(key);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<Point> cell_center_point(const Grid& g, CellKey k) {
  if (is_atom_key(k)) return make_atom(g.space(), atom_of(k));
  const Box b = g.box(k);
  const auto c = b.center();
  if (!point_ok(*g.space(), c)) return std::nullopt;
  return make_point(g.space(), std::span<const double>(c.data(), static_cast<std::size_t>(g.dim())));
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;  // smallest index is the root
  }
};

std::size_t packing_bound(const SpaceDescriptor& s, double delta) {
  auto fl = [](double v) { return static_cast<std::size_t>(std::max(1.0, std::floor(v))); };
  switch (s.kind) {
    case SpaceKind::IntervalWithAtoms:
      return fl((s.hi - s.lo) / (2.0 * delta) + 1.0) + s.atoms.size();
    case SpaceKind::Circle:
      return fl(1.0 / (2.0 * delta));
    case SpaceKind::Disk:
      return fl(std::pow(s.disk_radius / delta + 1.0, 2.0));
    case SpaceKind::CircleTimesDisk:
      return fl(1.0 / (2.0 * delta)) * fl(std::pow(s.disk_radius / delta + 1.0, 2.0));
  }
  return 1;
}

}  // namespace

std::vector<Point> initial_grid(const MapSpec& map, const AnalysisParams& params) {
  params.validate();
  const SpaceDescriptor& s = *map.space;
  const int G = params.grid_per_axis;
  std::vector<Point> pts;
  const auto* mt = std::get_if<MTupling>(&map.rule);
  const bool skew = std::holds_alternative<SkewProduct>(map.rule);
  if ((mt && mt->m >= 2) || skew) {
    const int base = skew ? 8 : mt->m;
    const Grid g = analysis_grid(map.space, params);
    const auto tape = grid_tape(base, g.levels()[0], params);
    const double golden = 2.39996322972865332;
    for (int k = 0; k < G; ++k) {
      const std::size_t off = static_cast<std::size_t>(k) * kTapeStride;
      if (skew) {
        const double rr = 0.99 * s.disk_radius * std::sqrt((k + 0.5) / G);
        const std::array<double, 2> f{rr * std::cos(golden * k), rr * std::sin(golden * k)};
        pts.push_back(make_symbolic_point(map.space, tape, off, f));
      } else {
        pts.push_back(make_symbolic_point(map.space, tape, off));
      }
    }
    return pts;
  }
  switch (s.kind) {
    case SpaceKind::IntervalWithAtoms:
      for (int i = 0; i < G; ++i) {
        const double x = G == 1 ? 0.5 * (s.lo + s.hi) : s.lo + (s.hi - s.lo) * i / (G - 1);
        pts.push_back(make_point(map.space, std::span<const double>(&x, 1)));
      }
      break;
    case SpaceKind::Circle:
      for (int i = 0; i < G; ++i) {
        const double x = static_cast<double>(i) / G;
        pts.push_back(make_point(map.space, std::span<const double>(&x, 1)));
      }
      break;
    case SpaceKind::Disk: {
      const double R = s.disk_radius;
      for (int j = 0; j < G; ++j) {
        for (int i = 0; i < G; ++i) {
          const std::array<double, 2> c{-R + 2 * R * (i + 0.5) / G, -R + 2 * R * (j + 0.5) / G};
          if (c[0] * c[0] + c[1] * c[1] <= R * R) pts.push_back(make_point(map.space, c));
        }
      }
      break;
    }
    case SpaceKind::CircleTimesDisk:
      break;
  }
  return pts;
}

OmegaEstimate omega_limit(const MapSpec& map, const Point& x, const AnalysisParams& params) {
  const Grid g = analysis_grid(map.space, params);
  Point p = x;
  for (int i = 0; i < params.n_transient; ++i) p = apply(map, p);
  std::vector<CellKey> keys;
  keys.reserve(static_cast<std::size_t>(params.n_tail));
  visit_orbit(map, p, static_cast<std::size_t>(params.n_tail),
              [&](const Point& q, std::size_t) { keys.push_back(g.key_of(q)); });
  return OmegaEstimate{x, BoxCover(g, std::move(keys)), params};
}

std::optional<Point> find_ball(const BoxCover& cover, double radius, int probe_count) {
  for (CellKey k : cover.keys()) {
    auto c = cell_center_point(cover.grid(), k);
    if (c && ball_contained(cover, *c, radius, probe_count)) return c;
  }
  return std::nullopt;
}

std::optional<Point> delta_ball_check(const OmegaEstimate& est, double delta) {
  return find_ball(est.cover, delta, est.params.probe_count);
}

std::vector<AttractorClass> merge_classes(const std::vector<OmegaEstimate>& estimates,
                                          const std::vector<std::size_t>& eligible) {
  const std::size_t n = eligible.size();
  UnionFind uf(n);
  std::vector<std::pair<CellKey, std::size_t>> owners;
  for (std::size_t i = 0; i < n; ++i) {
    const BoxCover& c = estimates[eligible[i]].cover;
    for (CellKey k : c.keys()) {
      if (is_interior_cell(c, k)) owners.emplace_back(k, i);
    }
  }
  std::sort(owners.begin(), owners.end());
  for (std::size_t j = 1; j < owners.size(); ++j) {
    if (owners[j].first == owners[j - 1].first) uf.unite(owners[j].second, owners[j - 1].second);
  }
  std::vector<AttractorClass> classes;
  std::vector<std::size_t> slot(n, SIZE_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = uf.find(i);
    if (slot[r] == SIZE_MAX) {
      slot[r] = classes.size();
      classes.push_back(AttractorClass{BoxCover(estimates[eligible[i]].cover.grid()), {}});
    }
    AttractorClass& cls = classes[slot[r]];
    cls.members.push_back(eligible[i]);
    cls.cover.insert_all(estimates[eligible[i]].cover.keys());
  }
  return classes;
}

TransitionGraph::TransitionGraph(const MapSpec& map, const BoxCover& nodes, int samples_per_axis, double bloat,
                                 int workers)
    : nodes_(nodes), edges_(nodes.size()) {
  const auto& keys = nodes_.keys();
  parallel_for(keys.size(), workers, [&](std::size_t i) {
    for (CellKey k : image_box(map, nodes_.grid(), keys[i], samples_per_axis, bloat)) {
      auto it = std::lower_bound(keys.begin(), keys.end(), k);
      if (it != keys.end() && *it == k) edges_[i].push_back(static_cast<std::uint32_t>(it - keys.begin()));
    }
  });
}

std::vector<std::vector<std::uint32_t>> TransitionGraph::restricted_to(const BoxCover& sub) const {
  const auto& keys = nodes_.keys();
  std::vector<std::int64_t> remap(keys.size(), -1);
  for (std::size_t i = 0; i < sub.keys().size(); ++i) {
    auto it = std::lower_bound(keys.begin(), keys.end(), sub.keys()[i]);
    if (it != keys.end() && *it == sub.keys()[i]) remap[static_cast<std::size_t>(it - keys.begin())] = static_cast<std::int64_t>(i);
  }
  std::vector<std::vector<std::uint32_t>> adj(sub.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (remap[i] < 0) continue;
    for (auto j : edges_[i]) {
      if (remap[j] >= 0) adj[static_cast<std::size_t>(remap[i])].push_back(static_cast<std::uint32_t>(remap[j]));
    }
  }
  return adj;
}

std::vector<std::vector<std::uint32_t>> TransitionGraph::components(const std::vector<std::vector<std::uint32_t>>& adj) {
  const std::size_t n = adj.size();
  constexpr std::uint32_t kUnset = UINT32_MAX;
  std::vector<std::uint32_t> index(n, kUnset), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::vector<std::uint32_t>> out;
  std::uint32_t counter = 0;
  struct Frame {
    std::uint32_t v;
    std::size_t next;
  };
  std::vector<Frame> call;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < adj[f.v].size()) {
        const std::uint32_t w = adj[f.v][f.next++];
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const std::uint32_t v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::uint32_t> comp;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

std::vector<CellKey> TransitionGraph::recurrent() const {
  std::vector<CellKey> out;
  for (const auto& comp : components(edges_)) {
    bool cyc = comp.size() > 1;
    if (!cyc) {
      const auto v = comp.front();
      cyc = std::find(edges_[v].begin(), edges_[v].end(), v) != edges_[v].end();
    }
    if (cyc) {
      for (auto v : comp) out.push_back(nodes_.keys()[v]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool strongly_connected(const TransitionGraph& g, const BoxCover& sub) {
  if (sub.empty()) return false;
  return TransitionGraph::components(g.restricted_to(sub)).size() == 1;
}

StrongTransitivity strong_transitivity_check(const MapSpec& map, const BoxCover& attractor, CellKey u,
                                             const AnalysisParams& params) {
  const Grid& g = attractor.grid();
  BoxCover frontier(g, {u});
  BoxCover seen(g);
  for (int it = 1; it <= params.max_iterations; ++it) {
    const auto& keys = frontier.keys();
    std::vector<std::vector<CellKey>> parts(keys.size());
    parallel_for(keys.size(), params.worker_count(), [&](std::size_t i) {
      parts[i] = image_box(map, g, keys[i], params.samples_per_axis, params.bloat);
    });
    std::vector<CellKey> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    frontier = BoxCover(g, std::move(all));
    BoxCover grown = seen.united(frontier);
    const bool stalled = grown.size() == seen.size();
    seen = std::move(grown);
    if (attractor.subset_of(seen)) return {true, it};
    if (stalled) return {false, it};
  }
  return {false, params.max_iterations};
}

double sensitivity_estimate(const MapSpec& map, const BoxCover& lambda_set, double eps, int n_steps,
                            int sample_count, std::uint64_t seed) {
  if (!(eps > 0.0)) throw ValidationError("sensitivity needs eps > 0");
  if (lambda_set.empty()) throw ValidationError("sensitivity needs a nonempty set");
  const Grid& g = lambda_set.grid();
  const SpaceDescriptor& s = *g.space();
  const int dim = g.dim();
  constexpr int kBallPoints = 16;
  Rng rng(seed);
  double r_hat = INFINITY;
  for (int si = 0; si < sample_count; ++si) {
    const CellKey k = lambda_set.keys()[rng.below(lambda_set.size())];
    std::vector<Point> ball;
    if (is_atom_key(k)) {
      ball.push_back(make_atom(g.space(), atom_of(k)));
    } else {
      const Box b = g.box(k);
      std::array<double, 3> c{};
      bool ok = false;
      for (int tries = 0; tries < 64 && !ok; ++tries) {
        for (int d = 0; d < dim; ++d) c[d] = rng.uniform(b.lo[d], b.hi[d]);
        ok = point_ok(s, c);
      }
      if (!ok) continue;
      const Point x = make_point(g.space(), std::span<const double>(c.data(), static_cast<std::size_t>(dim)));
      ball.push_back(x);
      for (int j = 1; j < kBallPoints; ++j) {
        std::array<double, 3> y = x.x;
        for (int d = 0; d < dim; ++d) y[d] += rng.uniform(-eps, eps);
        if (s.kind == SpaceKind::Disk && std::hypot(y[0] - x.x[0], y[1] - x.x[1]) >= eps) continue;
        if (s.kind == SpaceKind::CircleTimesDisk && std::hypot(y[1] - x.x[1], y[2] - x.x[2]) >= eps) continue;
        if (s.kind == SpaceKind::IntervalWithAtoms && (y[0] < s.lo || y[0] > s.hi)) continue;
        if (!point_ok(s, y)) continue;
        const Point q = make_point(g.space(), std::span<const double>(y.data(), static_cast<std::size_t>(dim)));
        if (lambda_set.contains(q)) ball.push_back(q);
      }
    }
    double best = 0.0;
    for (int n = 0; n <= n_steps; ++n) {
      for (std::size_t a = 0; a < ball.size(); ++a) {
        for (std::size_t b2 = a + 1; b2 < ball.size(); ++b2) best = std::max(best, distance(ball[a], ball[b2]));
      }
      if (n < n_steps) {
        for (auto& p : ball) p = apply(map, p);
      }
    }
    r_hat = std::min(r_hat, best);
  }
  return std::isfinite(r_hat) ? r_hat : 0.0;
}

std::vector<PuncturedPoint> punctured_points(const BoxCover& attractor, const std::vector<OmegaEstimate>& estimates,
                                             const std::vector<std::size_t>& basin, double r) {
  if (!(r > 0.0)) throw ValidationError("puncture radius must be positive");
  const Grid& g = attractor.grid();
  struct Candidate {
    Point center;
    std::vector<CellKey> cells;
  };
  std::vector<Candidate> cands;
  for (CellKey k : attractor.keys()) {
    auto c = cell_center_point(g, k);
    if (!c) continue;
    Candidate cand{*c, {}};
    for (CellKey b : cells_in_ball(g, *c, r)) {
      if (attractor.contains(b)) cand.cells.push_back(b);
    }
    cands.push_back(std::move(cand));
  }
  std::vector<PuncturedPoint> out;
  for (std::size_t i : basin) {
    const BoxCover& est = estimates[i].cover;
    for (const Candidate& c : cands) {
      const bool missed = std::none_of(c.cells.begin(), c.cells.end(), [&](CellKey b) { return est.contains(b); });
      if (missed) {
        out.push_back({i, c.center});
        break;
      }
    }
  }
  return out;
}

std::vector<Violation> interior_invariance_audit(const MapSpec& map, const BoxCover& attractor,
                                                 const AnalysisParams& params) {
  const auto& keys = attractor.keys();
  std::vector<std::vector<Violation>> parts(keys.size());
  parallel_for(keys.size(), params.worker_count(), [&](std::size_t i) {
    if (!is_interior_cell(attractor, keys[i])) return;
    for (CellKey t : image_box(map, attractor.grid(), keys[i], params.samples_per_axis, params.bloat)) {
      if (!attractor.contains(t) || !is_interior_cell(attractor, t)) parts[i].push_back({keys[i], t});
    }
  });
  std::vector<Violation> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

BoxCover check_nonwandering_outside(const MapSpec& map, const std::vector<BoxCover>& attractors,
                                    const AnalysisParams& params) {
  const Grid g = analysis_grid(map.space, params);
  BoxCover full = full_cover(g);
  BoxCover inside(g);
  for (const BoxCover& a : attractors) inside = inside.united(a);
  const TransitionGraph graph(map, full, params.samples_per_axis, params.bloat, params.worker_count());
  BoxCover rec(g, graph.recurrent());
  return rec.minus(inside);
}

Decomposition decompose_attractors(const MapSpec& map, const AnalysisParams& params) {
  return decompose_attractors(map, params, initial_grid(map, params));
}

Decomposition decompose_attractors(const MapSpec& map, const AnalysisParams& params,
                                   const std::vector<Point>& points) {
  params.validate();
  const int workers = params.worker_count();
  Decomposition out;
  const std::size_t n = points.size();
  out.estimates.resize(n);
  std::vector<char> has_ball(n, 0);
  parallel_for(n, workers, [&](std::size_t i) {
    out.estimates[i] = omega_limit(map, points[i], params);
    has_ball[i] = delta_ball_check(out.estimates[i], params.delta).has_value();
  });
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < n; ++i) {
    if (has_ball[i]) {
      eligible.push_back(i);
    } else {
      out.outliers.push_back({i, points[i]});
    }
  }
  const auto classes = merge_classes(out.estimates, eligible);
  if (classes.size() > packing_bound(*map.space, params.delta)) {
    throw std::logic_error("more attractor classes than disjoint delta-balls fit in the space");
  }

  std::vector<BoxCover> covers;
  for (const AttractorClass& cls : classes) {
    AttractorReport rep;
    rep.cover = cls.cover;
    rep.merged_from = cls.members.size();
    const BoxCover grown = dilate(cls.cover);
    std::vector<std::size_t> basin;
    for (std::size_t i = 0; i < n; ++i) {
      if (out.estimates[i].cover.subset_of(grown)) basin.push_back(i);
    }
    rep.basin_fraction = n == 0 ? 0.0 : static_cast<double>(basin.size()) / static_cast<double>(n);
    rep.has_delta_ball = find_ball(cls.cover, params.delta, params.probe_count).has_value();

    const BoxCover inner = interior_cells(cls.cover);
    std::size_t adjacent = 0;
    for (CellKey k : cls.cover.keys()) {
      bool ok = inner.contains(k);
      for (CellKey nb : cls.cover.grid().neighbors(k)) ok = ok || inner.contains(nb);
      adjacent += ok ? 1 : 0;
    }
    rep.interior_adjacent_fraction = static_cast<double>(adjacent) / static_cast<double>(cls.cover.size());
    rep.closure_of_interior = rep.interior_adjacent_fraction >= params.closure_threshold;

    const TransitionGraph graph(map, cls.cover, params.samples_per_axis, params.bloat, workers);
    rep.transitive = strongly_connected(graph, cls.cover);
    const CellKey u = inner.empty() ? cls.cover.keys().front() : inner.keys().front();
    rep.strong = strong_transitivity_check(map, cls.cover, u, params);

    double r_hat = INFINITY;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      r_hat = std::min(r_hat, sensitivity_estimate(map, cls.cover, eps, params.sensitivity_steps,
                                                   params.sensitivity_samples, params.seed));
    }
    rep.sensitivity_r = r_hat;
    rep.sensitive = r_hat >= params.delta / 3.0;
    rep.punctured = punctured_points(cls.cover, out.estimates, basin, params.delta / 3.0).size();
    rep.dichotomy_branch = rep.punctured == 0 ? "dense-orbit" : "sensitive";
    rep.violations = interior_invariance_audit(map, cls.cover, params);
    covers.push_back(cls.cover);
    out.attractors.push_back(std::move(rep));
  }

  out.remainder = check_nonwandering_outside(map, covers, params);
  if (!out.remainder.empty()) {
    double diam = 0.0;
    for (CellKey k : out.remainder.keys()) diam = std::max(diam, out.remainder.grid().box(k).diameter());
    out.remainder_ball_free = diam == 0.0 || !find_ball(out.remainder, 2.0 * diam, params.probe_count);
    out.remainder_delta_free = !find_ball(out.remainder, params.delta, params.probe_count);
  }
  return out;
}

}  // namespace topattr
