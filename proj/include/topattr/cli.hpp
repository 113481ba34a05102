#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "topattr/attractor.hpp"

namespace topattr {

struct RunConfig {
  std::string command;
  std::string map = "mtupling:8";
  AnalysisParams params;
  std::string out;        // JSON report; stdout when empty
  std::string boxes_out;  // CSV path (omega, ifs) or prefix (analyze)
  std::string x;          // comma-separated start point
  std::string center = "-1.5,0";
  double radius = 0.2;
  int max_len = 64;
  bool verify = false;
  int ifs_depth = 8;
  std::size_t samples = 100000;
};

std::vector<double> parse_coords(const std::string& text);

int cmd_analyze(const RunConfig& cfg, std::ostream& out);
int cmd_omega(const RunConfig& cfg, std::ostream& out);
int cmd_ifs(const RunConfig& cfg, std::ostream& out);
int cmd_wordsearch(const RunConfig& cfg, std::ostream& out);

// Parses argv, dispatches, maps errors to exit codes: 0 ok, 2 invalid input,
// 3 budget exhausted, 1 anything else.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace topattr
