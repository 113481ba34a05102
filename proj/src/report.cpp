#include "topattr/report.hpp"

#include <cstdio>

namespace topattr {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string describe_cell(const Grid& grid, CellKey k) {
  if (is_atom_key(k)) return "atom:" + fmt(grid.space()->atoms[static_cast<std::size_t>(atom_of(k))]);
  const Box b = grid.box(k);
  std::string s;
  for (int d = 0; d < b.dim; ++d) {
    if (d) s += "x";
    s += "[" + fmt(b.lo[d]) + "," + fmt(b.hi[d]) + "]";
  }
  return s;
}

Json point_json(const Point& p) {
  if (p.is_atom()) return Json{{"atom", p.space->atoms[static_cast<std::size_t>(p.atom)]}};
  Json c = Json::array();
  for (int d = 0; d < p.dim(); ++d) c.push_back(p.x[static_cast<std::size_t>(d)]);
  return c;
}

Json params_json(const AnalysisParams& p) {
  Json j;
  j["delta"] = p.delta;
  j["depth"] = p.depth;
  j["fiber_depth"] = p.fiber_depth ? Json(*p.fiber_depth) : Json(nullptr);
  j["transient"] = p.n_transient;
  j["tail"] = p.n_tail;
  j["grid"] = p.grid_per_axis;
  j["bloat"] = p.bloat;
  j["seed"] = p.seed;
  j["probe_count"] = p.probe_count;
  j["samples_per_axis"] = p.samples_per_axis;
  j["sensitivity_steps"] = p.sensitivity_steps;
  j["sensitivity_samples"] = p.sensitivity_samples;
  j["closure_threshold"] = p.closure_threshold;
  j["max_iterations"] = p.max_iterations;
  return j;
}

Json analysis_json(const MapSpec& map, const AnalysisParams& params, const Decomposition& d,
                   const std::vector<std::string>& box_paths, const std::string& remainder_path) {
  Json j;
  j["map"] = map.name;
  j["space"] = map.space->describe();
  j["params"] = params_json(params);
  j["attractors"] = Json::array();
  for (std::size_t i = 0; i < d.attractors.size(); ++i) {
    const AttractorReport& a = d.attractors[i];
    Json r;
    r["boxes_csv_path"] = i < box_paths.size() ? Json(box_paths[i]) : Json(nullptr);
    r["box_count"] = a.cover.size();
    r["boxes"] = Json::array();
    if (a.cover.size() <= 16) {
      for (CellKey k : a.cover.keys()) r["boxes"].push_back(describe_cell(a.cover.grid(), k));
    }
    r["merged_from"] = a.merged_from;
    r["basin_fraction"] = a.basin_fraction;
    Json f;
    f["has_delta_ball"] = a.has_delta_ball;
    f["closure_of_interior"] = a.closure_of_interior;
    f["interior_adjacent_fraction"] = a.interior_adjacent_fraction;
    f["transitive"] = a.transitive;
    f["strongly_transitive"] = a.strong.covered;
    f["strong_iterations"] = a.strong.iterations;
    f["sensitive"] = a.sensitive;
    f["sensitivity_r"] = a.sensitivity_r;
    f["punctured"] = a.punctured;
    f["dichotomy_branch"] = a.dichotomy_branch;
    r["flags"] = f;
    r["violation_count"] = a.violations.size();
    r["violations"] = Json::array();
    for (const Violation& v : a.violations) {
      r["violations"].push_back(
          Json{{"from", describe_cell(a.cover.grid(), v.from)}, {"to", describe_cell(a.cover.grid(), v.to)}});
    }
    j["attractors"].push_back(std::move(r));
  }
  j["outliers"] = Json::array();
  for (const Outlier& o : d.outliers) j["outliers"].push_back(Json{{"index", o.index}, {"point", point_json(o.point)}});
  j["nonwandering_remainder_csv_path"] = remainder_path.empty() ? Json(nullptr) : Json(remainder_path);
  j["nonwandering_remainder"] = Json{{"box_count", d.remainder.size()},
                                     {"ball_free", d.remainder_ball_free},
                                     {"delta_ball_free", d.remainder_delta_free}};
  return j;
}

Json fiber_constants_json(const FiberConstants& c) {
  Json j;
  j["fold"] = {c.fold.c1, c.fold.c2, c.fold.c3};
  j["blaschke_a"] = c.blaschke_a;
  j["arc_overlap_deg"] = c.arc_overlap_deg;
  j["center_scale"] = c.center_scale;
  j["center_shift"] = {c.center_shift[0], c.center_shift[1]};
  j["lambda"] = c.lambda;
  return j;
}

Json property_report_json(const PropertyReport& r) {
  Json j;
  j["lambda"] = r.lambda;
  j["sample_count"] = r.sample_count;
  j["all_pass"] = r.all_pass();
  j["min_margin"] = r.min_margin();
  j["properties"] = Json::array();
  for (std::size_t i = 0; i < r.props.size(); ++i) {
    const PropertyResult& p = r.props[i];
    Json e;
    e["id"] = i + 1;
    e["pass"] = p.pass;
    e["margin"] = p.margin;
    e["value"] = p.value;
    e["witness"] = p.witness ? Json{(*p.witness)[0], (*p.witness)[1]} : Json(nullptr);
    j["properties"].push_back(std::move(e));
  }
  return j;
}

Json word_search_json(const WordSearchResult& r) {
  Json j;
  j["word"] = to_digit_string(r.word);
  j["length"] = r.word.symbols.size();
  j["image_center"] = {r.image_center[0], r.image_center[1]};
  j["distance"] = r.distance;
  j["bound"] = r.bound;
  j["certificate"] = r.distance + r.bound;
  return j;
}

}  // namespace topattr
