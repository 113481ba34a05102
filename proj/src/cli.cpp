#include "topattr/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "topattr/error.hpp"
#include "topattr/hutchinson.hpp"
#include "topattr/parallel.hpp"
#include "topattr/report.hpp"

namespace topattr {

namespace {

void emit(const Json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  f << text;
}

void write_csv(const BoxCover& cover, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  write_cover_csv(f, cover);
}

void apply_workers(const RunConfig& cfg) {
  if (cfg.params.workers > 0) set_default_workers(cfg.params.workers);
}

}  // namespace

std::vector<double> parse_coords(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("bad coordinate list '" + text + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty coordinate list");
  return out;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  cfg.params.validate();
  apply_workers(cfg);
  const MapSpec map = make_map(cfg.map);
  const Decomposition d = decompose_attractors(map, cfg.params);
  std::vector<std::string> paths;
  std::string rem_path;
  if (!cfg.boxes_out.empty()) {
    for (std::size_t i = 0; i < d.attractors.size(); ++i) {
      paths.push_back(cfg.boxes_out + "_A" + std::to_string(i + 1) + ".csv");
      write_csv(d.attractors[i].cover, paths.back());
    }
    rem_path = cfg.boxes_out + "_remainder.csv";
    write_csv(d.remainder, rem_path);
  }
  emit(analysis_json(map, cfg.params, d, paths, rem_path), cfg.out, out);
  return 0;
}

int cmd_omega(const RunConfig& cfg, std::ostream& out) {
  cfg.params.validate();
  const MapSpec map = make_map(cfg.map);
  if (cfg.x.empty()) throw ValidationError("omega needs --x");
  const auto c = parse_coords(cfg.x);
  Point p;
  try {
    p = make_point(map.space, c);
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  const OmegaEstimate est = omega_limit(map, p, cfg.params);
  if (cfg.boxes_out.empty()) {
    write_cover_csv(out, est.cover);
  } else {
    write_csv(est.cover, cfg.boxes_out);
  }
  return 0;
}

int cmd_ifs(const RunConfig& cfg, std::ostream& out) {
  apply_workers(cfg);
  const IFS ifs = IFS::fiber();
  Json j;
  j["constants"] = fiber_constants_json(ifs.family()->constants());
  if (cfg.verify) {
    if (cfg.samples < 10000) throw ValidationError("--samples must be >= 10000");
    j["fiber_properties"] = property_report_json(verify_fiber_properties(ifs, cfg.samples, cfg.params.seed));
  }
  if (!cfg.boxes_out.empty()) {
    const BoxCover a = ifs_attractor(ifs, cfg.ifs_depth, cfg.params.samples_per_axis);
    write_csv(a, cfg.boxes_out);
    j["attractor"] = Json{{"depth", cfg.ifs_depth}, {"box_count", a.size()}, {"boxes_csv_path", cfg.boxes_out}};
  }
  emit(j, cfg.out, out);
  return 0;
}

int cmd_wordsearch(const RunConfig& cfg, std::ostream& out) {
  if (!(cfg.radius > 0.0)) throw ValidationError("--radius must be positive");
  if (cfg.max_len < 0) throw ValidationError("--max-len must be >= 0");
  const auto c = parse_coords(cfg.center);
  if (c.size() != 2) throw ValidationError("--center needs two coordinates");
  const IFS ifs = IFS::fiber();
  const auto r = hutchinson_word_search(ifs, {c[0], c[1], 0.0}, cfg.radius, cfg.max_len);
  emit(word_search_json(r), cfg.out, out);
  return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  AnalysisParams& p = cfg.params;
  int fiber_depth = -1;
  CLI::App app{"Finite-resolution attractor analysis"};
  app.set_config("--config", "", "key=value file; command-line flags win");
  app.require_subcommand(1, 1);
  app.add_option("--map", cfg.map, "map name: counterexample, mtupling:<m>, skewproduct, cubic, ifs:<2|4|6>");
  app.add_option("--delta", p.delta);
  app.add_option("--depth", p.depth);
  app.add_option("--fiber-depth", fiber_depth, "circle x disk only: fiber bisections");
  app.add_option("--grid", p.grid_per_axis);
  app.add_option("--transient", p.n_transient);
  app.add_option("--tail", p.n_tail);
  app.add_option("--bloat", p.bloat);
  app.add_option("--seed", p.seed);
  app.add_option("--workers", p.workers);
  app.add_option("--samples-per-axis", p.samples_per_axis);
  app.add_option("--out", cfg.out, "JSON output path");
  app.add_option("--boxes-out", cfg.boxes_out, "CSV path or prefix");
  app.add_option("--x", cfg.x, "start point, comma separated");
  app.add_option("--center", cfg.center);
  app.add_option("--radius", cfg.radius);
  app.add_option("--max-len", cfg.max_len);
  app.add_option("--ifs-depth", cfg.ifs_depth);
  app.add_option("--samples", cfg.samples);
  app.add_flag("--verify", cfg.verify);
  for (const char* name : {"analyze", "omega", "ifs", "wordsearch"}) {
    app.add_subcommand(name)->fallthrough();
  }
  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (fiber_depth >= 0) p.fiber_depth = fiber_depth;
  cfg.command = app.get_subcommands().front()->get_name();
  try {
    if (cfg.command == "analyze") return cmd_analyze(cfg, out);
    if (cfg.command == "omega") return cmd_omega(cfg, out);
    if (cfg.command == "ifs") return cmd_ifs(cfg, out);
    return cmd_wordsearch(cfg, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetExhausted& e) {
    err << "budget exhausted: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace topattr
