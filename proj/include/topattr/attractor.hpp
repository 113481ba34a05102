#pragma once

// Finite-resolution attractor analysis: omega-limit covers, delta-ball
// detection, class merging, transition graphs, and the per-attractor checks.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "topattr/maps.hpp"
#include "topattr/phase.hpp"

namespace topattr {

struct AnalysisParams {
  double delta = 0.1;
  int depth = 8;
  // Circle x disk only: fiber bisections; `depth` then counts base bisections.
  std::optional<int> fiber_depth;
  int n_transient = 100;
  int n_tail = 10000;
  int grid_per_axis = 101;
  double bloat = 0.0;
  std::uint64_t seed = 0;
  int probe_count = 64;
  int samples_per_axis = 4;
  int sensitivity_steps = 20;
  int sensitivity_samples = 64;
  double closure_threshold = 0.9;
  int max_iterations = 64;
  int workers = 0;  // 0: default pool size

  void validate() const;
  int worker_count() const;
};

Grid analysis_grid(const SpacePtr& space, const AnalysisParams& params);

// Initial conditions: an evenly spaced lattice, except that m-tupling (m >= 2)
// and skew-product base angles are read from a rich digit tape at offsets
// k * stride so that orbits stay exact.
std::vector<Point> initial_grid(const MapSpec& map, const AnalysisParams& params);

struct OmegaEstimate {
  Point source;
  BoxCover cover;
  AnalysisParams params;
};

OmegaEstimate omega_limit(const MapSpec& map, const Point& x, const AnalysisParams& params);
// Visits fn(point, step) for steps 0..n-1 of the orbit of x (step 0 is x).
template <class Fn>
Point visit_orbit(const MapSpec& map, Point x, std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) {
    fn(x, i);
    x = apply(map, x);
  }
  return x;
}

// Some candidate center (box centers in key order, atoms included) whose
// delta-ball lies in the cover.
std::optional<Point> find_ball(const BoxCover& cover, double radius, int probe_count);
std::optional<Point> delta_ball_check(const OmegaEstimate& est, double delta);

struct AttractorClass {
  BoxCover cover;
  std::vector<std::size_t> members;  // indices into the estimate list
};

// Union-find over estimates: two merge when some box is interior to both.
std::vector<AttractorClass> merge_classes(const std::vector<OmegaEstimate>& estimates,
                                          const std::vector<std::size_t>& eligible);

class TransitionGraph {
 public:
  TransitionGraph(const MapSpec& map, const BoxCover& nodes, int samples_per_axis, double bloat, int workers);

  const BoxCover& nodes() const { return nodes_; }
  const std::vector<std::vector<std::uint32_t>>& edges() const { return edges_; }
  // Edges to node indices only; images outside the node set are dropped.
  std::vector<std::vector<std::uint32_t>> restricted_to(const BoxCover& sub) const;
  // Strongly connected components (Tarjan), each sorted, in discovery order.
  static std::vector<std::vector<std::uint32_t>> components(const std::vector<std::vector<std::uint32_t>>& adj);
  // Nodes lying on some directed cycle (self-loops included).
  std::vector<CellKey> recurrent() const;

 private:
  BoxCover nodes_;
  std::vector<std::vector<std::uint32_t>> edges_;
};

bool strongly_connected(const TransitionGraph& g, const BoxCover& sub);

struct StrongTransitivity {
  bool covered = false;
  int iterations = 0;
};

// Images F_n = f(F_{n-1}) of {U}, n >= 1, until their union covers the attractor.
StrongTransitivity strong_transitivity_check(const MapSpec& map, const BoxCover& attractor, CellKey u,
                                             const AnalysisParams& params);

double sensitivity_estimate(const MapSpec& map, const BoxCover& lambda_set, double eps, int n_steps,
                            int sample_count, std::uint64_t seed = 0);

struct PuncturedPoint {
  std::size_t index;  // into the estimate list
  Point center;       // attractor box center whose r-ball the omega-limit misses
};

std::vector<PuncturedPoint> punctured_points(const BoxCover& attractor, const std::vector<OmegaEstimate>& estimates,
                                             const std::vector<std::size_t>& basin, double r);

struct Violation {
  CellKey from;
  CellKey to;
  bool operator==(const Violation&) const = default;
};

std::vector<Violation> interior_invariance_audit(const MapSpec& map, const BoxCover& attractor,
                                                 const AnalysisParams& params);

struct AttractorReport {
  BoxCover cover;
  std::size_t merged_from = 0;
  double basin_fraction = 0.0;
  bool has_delta_ball = false;
  double interior_adjacent_fraction = 0.0;
  bool closure_of_interior = false;
  bool transitive = false;
  StrongTransitivity strong;
  double sensitivity_r = 0.0;
  bool sensitive = false;
  std::size_t punctured = 0;
  std::string dichotomy_branch;
  std::vector<Violation> violations;
};

struct Outlier {
  std::size_t index;
  Point point;
};

struct Decomposition {
  std::vector<AttractorReport> attractors;
  std::vector<Outlier> outliers;
  BoxCover remainder;
  bool remainder_ball_free = true;  // no ball of radius 2 * box diameter
  bool remainder_delta_free = true;
  std::vector<OmegaEstimate> estimates;
};

Decomposition decompose_attractors(const MapSpec& map, const AnalysisParams& params);
Decomposition decompose_attractors(const MapSpec& map, const AnalysisParams& params,
                                   const std::vector<Point>& points);

// Cells outside every attractor that lie on a cycle of the full-grid
// transition graph.
BoxCover check_nonwandering_outside(const MapSpec& map, const std::vector<BoxCover>& attractors,
                                    const AnalysisParams& params);

}  // namespace topattr
