#pragma once

// The map zoo: exact point evaluation plus outer box-image estimates.

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "topattr/kernels.hpp"
#include "topattr/phase.hpp"

namespace topattr {

// Fiber disk M of radius 3 with the half-plane regions Z = {x < 1} and
// D = {x < 0}, the parking point q and the sink point s.
struct FiberGeometry {
  double radius = 3.0;
  double z_cut = 1.0;
  double d_cut = 0.0;
  std::array<double, 2> q{2.0, 0.0};
  std::array<double, 2> s{-1.0, 0.0};

  bool in_M(double x, double y) const { return x * x + y * y <= radius * radius; }
  bool in_Z(double x, double y) const { return in_M(x, y) && x < z_cut; }
  bool in_D(double x, double y) const { return in_M(x, y) && x < d_cut; }
};

struct BumpSpec {
  double l = 0.0;
  double r = 1.0;
};

// Smooth monotone transition from 0 at l to 1 at r; clamps outside [l, r].
double bump(const BumpSpec& spec, double t);

struct FiberConstants {
  kernels::FoldParams fold{0.2, 0.8, 1.1};
  double blaschke_a = 0.36;
  double arc_overlap_deg = 3.5;
  double center_scale = 0.8;
  std::array<double, 2> center_shift{0.2, 0.0};
  double lambda = 0.9;
};

enum class PieceKind { Constant, Affine, Blaschke };

// One fiber map: a constant, or (affine | Blaschke) after the fold.
struct FiberPiece {
  PieceKind kind = PieceKind::Constant;
  std::array<double, 2> value{};
  double scale = 1.0;
  std::array<double, 2> shift{};
  kernels::BlaschkeParams blaschke{3.0, 0.0, 1.0, 0.0};
  bool folded = true;
  kernels::FoldParams fold{0.2, 0.8, 1.1};

  std::array<double, 2> apply(double x, double y) const;
  void apply_batch(const double* x, const double* y, double* ox, double* oy, std::size_t n) const;
};

// Pieces indexed by FiberFamily::Id.
class FiberFamily {
 public:
  enum Id { Q = 0, S = 1, Top = 2, Center = 3, Bottom = 4 };
  static constexpr int kPieces = 5;

  explicit FiberFamily(FiberConstants c = {}, FiberGeometry g = {});

  const FiberConstants& constants() const { return constants_; }
  const FiberGeometry& geometry() const { return geometry_; }
  const FiberPiece& piece(int id) const { return pieces_[static_cast<std::size_t>(id)]; }
  double lambda() const { return constants_.lambda; }
  // Global Lipschitz bound of the non-constant pieces on M.
  double lipschitz_bound() const { return lipschitz_; }
  // Largest value of the fold on [0, radius].
  double fold_max() const { return fold_max_; }

  // IFS member k in {0, 1, 2} is the fiber map with symbol 2, 4, 6.
  static int member_piece(int k) { return Top + k; }
  static int member_symbol(int k) { return 2 * (k + 1); }

 private:
  FiberConstants constants_;
  FiberGeometry geometry_;
  std::array<FiberPiece, kPieces> pieces_;
  double lipschitz_ = 1.0;
  double fold_max_ = 0.0;
};

std::shared_ptr<const FiberFamily> default_fiber_family();

// f_phi = (1 - w) * piece(from) + w * piece(to); exactly piece(from) when from == to.
struct FiberBlend {
  int from = FiberFamily::Q;
  int to = FiberFamily::Q;
  double w = 0.0;
  double l = 0.0;  // schedule segment containing phi
  double r = 1.0;
};

FiberBlend fiber_schedule(double phi);
std::array<double, 2> fiber_map(const FiberFamily& fam, double phi, double x, double y);
// Maximum slope of smooth_step, used for d/dphi bounds of the blends.
double smooth_step_slope_bound();

struct Counterexample {};
struct MTupling {
  int m = 2;
};
struct SkewProduct {
  std::shared_ptr<const FiberFamily> family;
};
struct IfsMember {
  int index = 0;
  std::shared_ptr<const FiberFamily> family;
};
// Polynomial sum c_k x^k on an interval space; must map the interval into itself.
struct Generic1d {
  std::vector<double> coeffs;
};

using MapRule = std::variant<Counterexample, MTupling, SkewProduct, IfsMember, Generic1d>;

struct MapSpec {
  std::string name;
  SpacePtr space;
  MapRule rule;
  std::optional<double> lipschitz_hint;
};

MapSpec counterexample_map();
MapSpec mtupling_map(int m);
MapSpec skew_product_map(std::shared_ptr<const FiberFamily> family = default_fiber_family());
MapSpec ifs_member_map(int index, std::shared_ptr<const FiberFamily> family = default_fiber_family());
MapSpec polynomial_map(std::string name, double lo, double hi, std::vector<double> coeffs);
// Registry: counterexample, mtupling:<m>, skewproduct, cubic, ifs:<2|4|6>.
MapSpec make_map(const std::string& name);

Point apply(const MapSpec& map, const Point& p);

// Batch evaluation on coordinate arrays (continuous points only, no tapes).
// coords[k] holds axis k; results are written in place of out.
void apply_coords(const MapSpec& map, const std::array<std::vector<double>, 3>& in,
                  std::array<std::vector<double>, 3>& out);

// Per-box Lipschitz matrix L[j][k] bounding |d f_j / d x_k| over the box.
std::array<std::array<double, 3>, 3> local_lipschitz(const MapSpec& map, const Box& b);

// Grid cells (of the box's grid) hit by images of a cell-centered sample of
// box `key`, each image inflated per axis by bloat + sum_k L[j][k] * h_k,
// h_k = half the sample spacing.
std::vector<CellKey> image_box(const MapSpec& map, const Grid& grid, CellKey key, int samples_per_axis,
                               double bloat);

}  // namespace topattr
