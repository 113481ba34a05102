#pragma once

// Phase-space geometry: spaces, points, boxes, uniform box grids and covers.
//
// Coordinates:
//   interval-with-atoms  x                  (atoms are isolated points outside [lo, hi])
//   circle               angle in [0, 1)    (one full turn == 1)
//   disk                 (x, y), x^2 + y^2 <= r^2
//   circle x disk        (angle, x, y)

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace topattr {

enum class SpaceKind { IntervalWithAtoms, Circle, Disk, CircleTimesDisk };

struct SpaceDescriptor {
  SpaceKind kind = SpaceKind::Circle;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> atoms;
  double circumference = 1.0;
  double disk_radius = 3.0;

  int dimension() const;
  bool operator==(const SpaceDescriptor&) const = default;
  std::string describe() const;
};

using SpacePtr = std::shared_ptr<const SpaceDescriptor>;

SpacePtr make_interval_space(double lo, double hi, std::vector<double> atoms = {});
SpacePtr make_circle_space();
SpacePtr make_disk_space(double radius = 3.0);
SpacePtr make_solid_torus_space(double radius = 3.0);

// Base-m expansion of an angle, used to run m-tupling orbits exactly: the
// double-precision orbit of any angle under 8x collapses to 0 after ~18 steps.
struct DigitTape {
  int base = 8;
  std::vector<std::uint8_t> digits;
};

// Number of leading digits that determine a double-precision angle in `base`.
int significant_digits(int base);
double tape_value(const DigitTape& tape, std::size_t offset);

struct Point {
  SpacePtr space;
  std::array<double, 3> x{};
  int atom = -1;  // index into space->atoms, or -1
  std::shared_ptr<const DigitTape> tape;  // optional exact expansion of x[0]
  std::size_t offset = 0;

  bool is_atom() const { return atom >= 0; }
  int dim() const { return space->dimension(); }
};

// Builds a point, snapping an interval coordinate equal to an atom onto that
// atom and wrapping circle angles into [0, 1). Throws DomainError if outside.
Point make_point(const SpacePtr& space, std::span<const double> coords);
Point make_atom(const SpacePtr& space, int atom);
Point make_symbolic_point(const SpacePtr& space, std::shared_ptr<const DigitTape> tape,
                          std::size_t offset, std::span<const double> fiber = {});
bool in_space(const SpaceDescriptor& space, const Point& p);

double distance(const Point& p, const Point& q);

struct Box {
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
  int dim = 1;
  int depth = 0;
  int atom = -1;

  bool is_atom() const { return atom >= 0; }
  std::array<double, 3> center() const;
  double diameter() const;  // Euclidean diagonal; 0 for atoms
};

// Cell identifier inside a Grid. Continuous cells pack 21 bits per axis;
// atom cells set the top bit and carry the atom index.
using CellKey = std::uint64_t;
inline constexpr CellKey kAtomBit = CellKey{1} << 63;
inline constexpr int kAxisBits = 21;
inline constexpr int kMaxLevels = 20;

inline bool is_atom_key(CellKey k) { return (k & kAtomBit) != 0; }
inline CellKey atom_key(int atom) { return kAtomBit | static_cast<CellKey>(atom); }
inline int atom_of(CellKey k) { return static_cast<int>(k & ~kAtomBit); }
CellKey pack_cell(std::array<std::int64_t, 3> idx);
std::array<std::int64_t, 3> unpack_cell(CellKey k);

// Uniform dyadic grid over a space's root box: axis k is bisected levels[k] times.
class Grid {
 public:
  Grid() = default;
  Grid(SpacePtr space, std::array<int, 3> levels);

  // Grid reached by `depth` successive longest-axis bisections of the root box.
  static Grid at_depth(SpacePtr space, int depth);
  // Circle x disk grid with `base_levels` bisections of the angle and
  // `fiber_depth` longest-axis bisections of the fiber square.
  static Grid product(SpacePtr space, int base_levels, int fiber_depth);

  const SpacePtr& space() const { return space_; }
  const std::array<int, 3>& levels() const { return levels_; }
  int dim() const { return dim_; }
  int depth() const;
  std::int64_t cells(int axis) const { return std::int64_t{1} << levels_[axis]; }
  double root_lo(int axis) const { return root_lo_[axis]; }
  double root_hi(int axis) const { return root_hi_[axis]; }
  double width(int axis) const;
  bool periodic(int axis) const;

  // Axis a further bisection would split (longest side, lowest index on ties).
  int longest_axis() const;
  Grid refined(int axis) const;

  CellKey key_of(const Point& p) const;
  // Cell containing a continuous coordinate tuple (half-open cells, the top
  // cell closed). nullopt when outside the root box.
  std::optional<CellKey> key_of_coords(std::span<const double> c) const;
  Box box(CellKey k) const;
  // True if the (closed) cell meets the space; atoms always do.
  bool cell_in_space(CellKey k) const;
  // Face neighbors that exist and meet the space. Atoms have none.
  std::vector<CellKey> neighbors(CellKey k) const;
  // Face and diagonal neighbors (Chebyshev radius 1).
  std::vector<CellKey> ring(CellKey k) const;
  // Every cell meeting the space, atoms included, in sorted order.
  std::vector<CellKey> all_cells() const;
  bool operator==(const Grid& o) const;

 private:
  SpacePtr space_;
  std::array<int, 3> levels_{};
  std::array<double, 3> root_lo_{};
  std::array<double, 3> root_hi_{};
  int dim_ = 1;
};

// Finite union of same-grid cells, stored as a sorted unique key set.
class BoxCover {
 public:
  BoxCover() = default;
  explicit BoxCover(Grid grid) : grid_(std::move(grid)) {}
  BoxCover(Grid grid, std::vector<CellKey> keys);

  const Grid& grid() const { return grid_; }
  const std::vector<CellKey>& keys() const { return keys_; }
  int depth() const { return grid_.depth(); }
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  bool contains(CellKey k) const;
  bool contains(const Point& p) const;
  std::vector<Box> boxes() const;

  void insert(CellKey k);
  void insert_all(std::span<const CellKey> ks);
  BoxCover united(const BoxCover& o) const;
  BoxCover intersected(const BoxCover& o) const;
  BoxCover minus(const BoxCover& o) const;
  bool subset_of(const BoxCover& o) const;
  bool operator==(const BoxCover& o) const { return grid_ == o.grid_ && keys_ == o.keys_; }

 private:
  Grid grid_;
  std::vector<CellKey> keys_;
};

BoxCover full_cover(const Grid& grid);

BoxCover subdivide(const BoxCover& cover);

// True iff every deterministic probe point of the open ball B(center, radius)
// lies in the cover. Atoms inside the ball are always probed.
bool ball_contained(const BoxCover& cover, const Point& center, double radius, int probe_count);

// Cell-level neighborhood tests used by the attractor machinery.
bool is_interior_cell(const BoxCover& cover, CellKey k);
BoxCover interior_cells(const BoxCover& cover);
// Cover dilated by one cell in every direction (face and diagonal).
BoxCover dilate(const BoxCover& cover);

// CSV dump: depth, lo_1..lo_n, hi_1..hi_n, atom_id
void write_cover_csv(std::ostream& out, const BoxCover& cover);
BoxCover read_cover_csv(std::istream& in, const SpacePtr& space);

}  // namespace topattr
