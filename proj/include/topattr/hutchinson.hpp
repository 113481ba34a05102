#pragma once

// Iterated function systems: property checks for the fiber maps, the box
// Hutchinson operator, and certified word search.

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "topattr/maps.hpp"
#include "topattr/phase.hpp"
#include "topattr/symbolic.hpp"

namespace topattr {

// Points of the space with first coordinate below `cut`.
struct Region {
  double cut = std::numeric_limits<double>::infinity();
  bool contains(const SpaceDescriptor& s, const std::array<double, 3>& c) const;
};

class IFS {
 public:
  IFS(SpacePtr space, std::vector<MapSpec> members, double lambda, Region z);
  // The three fiber maps with symbols 2, 4, 6 acting on the disk; Z = {x < 1}.
  static IFS fiber(std::shared_ptr<const FiberFamily> family = default_fiber_family());

  const SpacePtr& space() const { return space_; }
  const std::vector<MapSpec>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  double lambda() const { return lambda_; }
  const Region& z() const { return z_; }
  const std::shared_ptr<const FiberFamily>& family() const { return family_; }

  // Center z_c and radius R_c with Z inside the closed ball B(z_c, R_c).
  const std::array<double, 3>& tracked_center() const { return center_; }
  double tracked_radius() const { return radius_; }

  std::array<double, 3> apply_member(std::size_t i, const std::array<double, 3>& c) const;
  // f_w(c) = f_{w_1} o ... o f_{w_m}(c).
  std::array<double, 3> apply_word(const SymbolWord& w, const std::array<double, 3>& c) const;
  double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) const;

 private:
  SpacePtr space_;
  std::vector<MapSpec> members_;
  double lambda_;
  Region z_;
  std::shared_ptr<const FiberFamily> family_;
  std::array<double, 3> center_{};
  double radius_ = 0.0;
};

struct PropertyResult {
  bool pass = false;
  double margin = 0.0;  // signed distance to the violated boundary (or to lambda for property 1)
  double value = 0.0;   // the measured quantity
  std::optional<std::array<double, 2>> witness;
};

struct PropertyReport {
  std::array<PropertyResult, 4> props;
  std::size_t sample_count = 0;
  double lambda = 0.0;

  bool all_pass() const;
  double min_margin() const;
};

// 1: contraction ratio on Z <= lambda. 2: D covered by the member images of D
// and those images lie in Z. 3: member images of M \ Z lie in D. 4: member
// images of Z lie in Z.
PropertyReport verify_fiber_properties(const IFS& ifs, std::size_t sample_count, std::uint64_t seed = 0);

// Outer box cover of the IFS attractor at `depth`: selection iteration
// C <- C ∩ H(C) to a fixed point, then bisection, starting from the cells of Z.
BoxCover ifs_attractor(const IFS& ifs, int depth, int samples_per_axis = 4, int max_steps = 10000);
// Cells hit by the member images of `cover` (one Hutchinson step, unrestricted).
BoxCover hutchinson_step(const IFS& ifs, const BoxCover& cover, int samples_per_axis = 4);

struct WordSearchResult {
  SymbolWord word;  // member indices
  std::array<double, 3> image_center{};
  double distance = 0.0;  // dist(f_w(z_c), target)
  double bound = 0.0;     // lambda^|w| * R_c
};

// Shortest word (beam search, ties broken by distance then lexicographically)
// with dist(f_w(z_c), center) + lambda^|w| R_c <= radius. Throws
// BudgetExhausted when nothing certifies within max_len.
WordSearchResult hutchinson_word_search(const IFS& ifs, const std::array<double, 3>& center, double radius,
                                        int max_len, std::size_t beam_width = 256);

}  // namespace topattr
