#include "topattr/phase.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "topattr/error.hpp"

namespace topattr {

namespace {

constexpr double kContainSlack = 1e-12;

double wrap_unit(double a) {
  double w = a - std::floor(a);
  if (w >= 1.0) w = 0.0;
  return w;
}

double circle_gap(double a, double b) {
  double d = std::fabs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t bits_of(double v) { return std::bit_cast<std::uint64_t>(v); }

}  // namespace

int SpaceDescriptor::dimension() const {
  switch (kind) {
    case SpaceKind::IntervalWithAtoms:
    case SpaceKind::Circle:
      return 1;
    case SpaceKind::Disk:
      return 2;
    case SpaceKind::CircleTimesDisk:
      return 3;
  }
  return 1;
}

std::string SpaceDescriptor::describe() const {
  std::ostringstream os;
  switch (kind) {
    case SpaceKind::IntervalWithAtoms:
      os << "interval[" << lo << "," << hi << "]";
      for (double a : atoms) os << "+{" << a << "}";
      break;
    case SpaceKind::Circle:
      os << "circle";
      break;
    case SpaceKind::Disk:
      os << "disk(r=" << disk_radius << ")";
      break;
    case SpaceKind::CircleTimesDisk:
      os << "circle x disk(r=" << disk_radius << ")";
      break;
  }
  return os.str();
}

SpacePtr make_interval_space(double lo, double hi, std::vector<double> atoms) {
  if (!(lo < hi)) throw ValidationError("interval space needs lo < hi");
  for (double a : atoms) {
    if (!std::isfinite(a) || (a >= lo && a <= hi)) {
      throw ValidationError("atoms must lie strictly outside the interval");
    }
  }
  auto s = std::make_shared<SpaceDescriptor>();
  s->kind = SpaceKind::IntervalWithAtoms;
  s->lo = lo;
  s->hi = hi;
  s->atoms = std::move(atoms);
  return s;
}

SpacePtr make_circle_space() {
  auto s = std::make_shared<SpaceDescriptor>();
  s->kind = SpaceKind::Circle;
  return s;
}

SpacePtr make_disk_space(double radius) {
  if (!(radius > 0)) throw ValidationError("disk radius must be positive");
  auto s = std::make_shared<SpaceDescriptor>();
  s->kind = SpaceKind::Disk;
  s->disk_radius = radius;
  return s;
}

SpacePtr make_solid_torus_space(double radius) {
  if (!(radius > 0)) throw ValidationError("disk radius must be positive");
  auto s = std::make_shared<SpaceDescriptor>();
  s->kind = SpaceKind::CircleTimesDisk;
  s->disk_radius = radius;
  return s;
}

int significant_digits(int base) {
  return static_cast<int>(std::ceil(53.0 / std::log2(static_cast<double>(base)))) + 1;
}

double tape_value(const DigitTape& tape, std::size_t offset) {
  const int k = significant_digits(tape.base);
  double v = 0.0;
  for (int i = k - 1; i >= 0; --i) {
    std::size_t pos = offset + static_cast<std::size_t>(i);
    double d = pos < tape.digits.size() ? tape.digits[pos] : 0.0;
    v = (v + d) / tape.base;
  }
  if (v >= 1.0) v = std::nextafter(1.0, 0.0);
  return v;
}

namespace {

bool disk_ok(double x, double y, double r) {
  return std::isfinite(x) && std::isfinite(y) && x * x + y * y <= r * r * (1.0 + kContainSlack);
}

}  // namespace

Point make_point(const SpacePtr& space, std::span<const double> c) {
  if (static_cast<int>(c.size()) != space->dimension()) {
    throw DomainError("expected " + std::to_string(space->dimension()) + " coordinates for " +
                      space->describe());
  }
  Point p;
  p.space = space;
  switch (space->kind) {
    case SpaceKind::IntervalWithAtoms: {
      for (std::size_t i = 0; i < space->atoms.size(); ++i) {
        if (c[0] == space->atoms[i]) return make_atom(space, static_cast<int>(i));
      }
      if (!(c[0] >= space->lo && c[0] <= space->hi)) {
        throw DomainError("point outside " + space->describe());
      }
      p.x[0] = c[0];
      break;
    }
    case SpaceKind::Circle:
      if (!std::isfinite(c[0])) throw DomainError("non-finite angle");
      p.x[0] = wrap_unit(c[0]);
      break;
    case SpaceKind::Disk:
      if (!disk_ok(c[0], c[1], space->disk_radius)) throw DomainError("point outside disk");
      p.x[0] = c[0];
      p.x[1] = c[1];
      break;
    case SpaceKind::CircleTimesDisk:
      if (!std::isfinite(c[0])) throw DomainError("non-finite angle");
      if (!disk_ok(c[1], c[2], space->disk_radius)) throw DomainError("fiber point outside disk");
      p.x = {wrap_unit(c[0]), c[1], c[2]};
      break;
  }
  return p;
}

Point make_atom(const SpacePtr& space, int atom) {
  if (space->kind != SpaceKind::IntervalWithAtoms || atom < 0 ||
      atom >= static_cast<int>(space->atoms.size())) {
    throw DomainError("no such atom");
  }
  Point p;
  p.space = space;
  p.atom = atom;
  p.x[0] = space->atoms[static_cast<std::size_t>(atom)];
  return p;
}

Point make_symbolic_point(const SpacePtr& space, std::shared_ptr<const DigitTape> tape,
                          std::size_t offset, std::span<const double> fiber) {
  if (space->kind != SpaceKind::Circle && space->kind != SpaceKind::CircleTimesDisk) {
    throw DomainError("symbolic points need an angular coordinate");
  }
  if (!tape || tape->base < 2) throw DomainError("symbolic point needs a tape with base >= 2");
  std::array<double, 3> c{tape_value(*tape, offset), 0.0, 0.0};
  if (space->kind == SpaceKind::CircleTimesDisk) {
    if (fiber.size() != 2) throw DomainError("fiber needs two coordinates");
    c[1] = fiber[0];
    c[2] = fiber[1];
  }
  Point p = make_point(space, std::span<const double>(c.data(), static_cast<std::size_t>(space->dimension())));
  p.tape = std::move(tape);
  p.offset = offset;
  return p;
}

bool in_space(const SpaceDescriptor& s, const Point& p) {
  switch (s.kind) {
    case SpaceKind::IntervalWithAtoms:
      if (p.is_atom()) return p.atom < static_cast<int>(s.atoms.size());
      return p.x[0] >= s.lo && p.x[0] <= s.hi;
    case SpaceKind::Circle:
      return p.x[0] >= 0.0 && p.x[0] < 1.0;
    case SpaceKind::Disk:
      return disk_ok(p.x[0], p.x[1], s.disk_radius);
    case SpaceKind::CircleTimesDisk:
      return p.x[0] >= 0.0 && p.x[0] < 1.0 && disk_ok(p.x[1], p.x[2], s.disk_radius);
  }
  return false;
}

double distance(const Point& p, const Point& q) {
  if (!p.space || !q.space || (p.space != q.space && !(*p.space == *q.space))) {
    throw DomainError("distance between points of different spaces");
  }
  switch (p.space->kind) {
    case SpaceKind::IntervalWithAtoms:
      return std::fabs(p.x[0] - q.x[0]);
    case SpaceKind::Circle:
      return circle_gap(p.x[0], q.x[0]);
    case SpaceKind::Disk:
      return std::hypot(p.x[0] - q.x[0], p.x[1] - q.x[1]);
    case SpaceKind::CircleTimesDisk:
      return std::max(circle_gap(p.x[0], q.x[0]), std::hypot(p.x[1] - q.x[1], p.x[2] - q.x[2]));
  }
  return 0.0;
}

std::array<double, 3> Box::center() const {
  std::array<double, 3> c{};
  for (int k = 0; k < dim; ++k) c[k] = 0.5 * (lo[k] + hi[k]);
  return c;
}

double Box::diameter() const {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += (hi[k] - lo[k]) * (hi[k] - lo[k]);
  return std::sqrt(s);
}

CellKey pack_cell(std::array<std::int64_t, 3> idx) {
  return static_cast<CellKey>(idx[0]) | (static_cast<CellKey>(idx[1]) << kAxisBits) |
         (static_cast<CellKey>(idx[2]) << (2 * kAxisBits));
}

std::array<std::int64_t, 3> unpack_cell(CellKey k) {
  constexpr CellKey mask = (CellKey{1} << kAxisBits) - 1;
  return {static_cast<std::int64_t>(k & mask), static_cast<std::int64_t>((k >> kAxisBits) & mask),
          static_cast<std::int64_t>((k >> (2 * kAxisBits)) & mask)};
}

Grid::Grid(SpacePtr space, std::array<int, 3> levels) : space_(std::move(space)), levels_(levels) {
  dim_ = space_->dimension();
  const double r = space_->disk_radius;
  switch (space_->kind) {
    case SpaceKind::IntervalWithAtoms:
      root_lo_ = {space_->lo, 0, 0};
      root_hi_ = {space_->hi, 0, 0};
      break;
    case SpaceKind::Circle:
      root_lo_ = {0, 0, 0};
      root_hi_ = {1, 0, 0};
      break;
    case SpaceKind::Disk:
      root_lo_ = {-r, -r, 0};
      root_hi_ = {r, r, 0};
      break;
    case SpaceKind::CircleTimesDisk:
      root_lo_ = {0, -r, -r};
      root_hi_ = {1, r, r};
      break;
  }
  for (int k = 0; k < 3; ++k) {
    if (k >= dim_) levels_[k] = 0;
    if (levels_[k] < 0 || levels_[k] > kMaxLevels) throw ValidationError("grid level out of range");
  }
}

Grid Grid::at_depth(SpacePtr space, int depth) {
  if (depth < 0) throw ValidationError("depth must be nonnegative");
  Grid g(std::move(space), {0, 0, 0});
  for (int i = 0; i < depth; ++i) g = g.refined(g.longest_axis());
  return g;
}

Grid Grid::product(SpacePtr space, int base_levels, int fiber_depth) {
  if (space->kind != SpaceKind::CircleTimesDisk) {
    throw ValidationError("product grid needs a circle x disk space");
  }
  if (fiber_depth < 0) throw ValidationError("fiber depth must be nonnegative");
  std::array<int, 3> lv{base_levels, (fiber_depth + 1) / 2, fiber_depth / 2};
  return Grid(std::move(space), lv);
}

int Grid::depth() const { return levels_[0] + levels_[1] + levels_[2]; }

double Grid::width(int axis) const {
  return (root_hi_[axis] - root_lo_[axis]) / static_cast<double>(cells(axis));
}

bool Grid::periodic(int axis) const {
  return axis == 0 && (space_->kind == SpaceKind::Circle || space_->kind == SpaceKind::CircleTimesDisk);
}

int Grid::longest_axis() const {
  int best = 0;
  for (int k = 1; k < dim_; ++k) {
    if (width(k) > width(best)) best = k;
  }
  return best;
}

Grid Grid::refined(int axis) const {
  auto lv = levels_;
  ++lv[axis];
  return Grid(space_, lv);
}

std::optional<CellKey> Grid::key_of_coords(std::span<const double> c) const {
  std::array<std::int64_t, 3> idx{};
  for (int k = 0; k < dim_; ++k) {
    const double span = root_hi_[k] - root_lo_[k];
    const double n = static_cast<double>(cells(k));
    const double t = (c[k] - root_lo_[k]) / span * n;
    if (!std::isfinite(t)) return std::nullopt;
    double f = std::floor(t);
    if (periodic(k)) {
      f = f - n * std::floor(f / n);
    } else {
      if (f == n && c[k] == root_hi_[k]) f = n - 1.0;
      if (f < 0.0 || f >= n) return std::nullopt;
    }
    idx[k] = static_cast<std::int64_t>(f);
  }
  return pack_cell(idx);
}

CellKey Grid::key_of(const Point& p) const {
  if (p.is_atom()) return atom_key(p.atom);
  auto k = key_of_coords(std::span<const double>(p.x.data(), static_cast<std::size_t>(dim_)));
  if (!k) throw DomainError("point outside the grid's root box");
  return *k;
}

Box Grid::box(CellKey k) const {
  Box b;
  b.dim = dim_;
  b.depth = depth();
  if (is_atom_key(k)) {
    b.atom = atom_of(k);
    double a = space_->atoms.at(static_cast<std::size_t>(b.atom));
    b.lo[0] = b.hi[0] = a;
    return b;
  }
  auto idx = unpack_cell(k);
  for (int d = 0; d < dim_; ++d) {
    const double w = width(d);
    b.lo[d] = root_lo_[d] + static_cast<double>(idx[d]) * w;
    b.hi[d] = idx[d] + 1 == cells(d) ? root_hi_[d] : root_lo_[d] + static_cast<double>(idx[d] + 1) * w;
  }
  return b;
}

namespace {

bool rect_meets_disk(double x0, double x1, double y0, double y1, double r) {
  const double cx = std::clamp(0.0, x0, x1);
  const double cy = std::clamp(0.0, y0, y1);
  return cx * cx + cy * cy <= r * r;
}

}  // namespace

bool Grid::cell_in_space(CellKey k) const {
  if (is_atom_key(k)) return atom_of(k) < static_cast<int>(space_->atoms.size());
  auto idx = unpack_cell(k);
  for (int d = 0; d < dim_; ++d) {
    if (idx[d] < 0 || idx[d] >= cells(d)) return false;
  }
  if (space_->kind == SpaceKind::Disk || space_->kind == SpaceKind::CircleTimesDisk) {
    Box b = box(k);
    const int o = space_->kind == SpaceKind::Disk ? 0 : 1;
    return rect_meets_disk(b.lo[o], b.hi[o], b.lo[o + 1], b.hi[o + 1], space_->disk_radius);
  }
  return true;
}

std::vector<CellKey> Grid::neighbors(CellKey k) const {
  std::vector<CellKey> out;
  if (is_atom_key(k)) return out;
  auto idx = unpack_cell(k);
  for (int d = 0; d < dim_; ++d) {
    for (int s : {-1, 1}) {
      auto j = idx;
      j[d] += s;
      if (periodic(d)) {
        if (cells(d) == 1) continue;
        j[d] = (j[d] + cells(d)) % cells(d);
      } else if (j[d] < 0 || j[d] >= cells(d)) {
        continue;
      }
      CellKey n = pack_cell(j);
      if (cell_in_space(n)) out.push_back(n);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<CellKey> Grid::ring(CellKey k) const {
  std::vector<CellKey> out;
  if (is_atom_key(k)) return out;
  auto idx = unpack_cell(k);
  const int lim1 = dim_ > 1 ? 1 : 0;
  const int lim2 = dim_ > 2 ? 1 : 0;
  for (int a = -1; a <= 1; ++a) {
    for (int b = -lim1; b <= lim1; ++b) {
      for (int c = -lim2; c <= lim2; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        std::array<std::int64_t, 3> j{idx[0] + a, idx[1] + b, idx[2] + c};
        bool ok = true;
        for (int d = 0; d < dim_; ++d) {
          if (periodic(d)) {
            j[d] = (j[d] % cells(d) + cells(d)) % cells(d);
          } else if (j[d] < 0 || j[d] >= cells(d)) {
            ok = false;
          }
        }
        if (!ok) continue;
        CellKey n = pack_cell(j);
        if (n != k && cell_in_space(n)) out.push_back(n);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<CellKey> Grid::all_cells() const {
  std::vector<CellKey> out;
  const std::int64_t n0 = cells(0), n1 = dim_ > 1 ? cells(1) : 1, n2 = dim_ > 2 ? cells(2) : 1;
  out.reserve(static_cast<std::size_t>(n0 * n1 * n2));
  for (std::int64_t c = 0; c < n2; ++c) {
    for (std::int64_t b = 0; b < n1; ++b) {
      for (std::int64_t a = 0; a < n0; ++a) {
        CellKey k = pack_cell({a, b, c});
        if (cell_in_space(k)) out.push_back(k);
      }
    }
  }
  for (std::size_t i = 0; i < space_->atoms.size(); ++i) out.push_back(atom_key(static_cast<int>(i)));
  std::sort(out.begin(), out.end());
  return out;
}

bool Grid::operator==(const Grid& o) const {
  if (levels_ != o.levels_) return false;
  if (space_ == o.space_) return true;
  return space_ && o.space_ && *space_ == *o.space_;
}

BoxCover::BoxCover(Grid grid, std::vector<CellKey> keys) : grid_(std::move(grid)), keys_(std::move(keys)) {
  std::sort(keys_.begin(), keys_.end());
  keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
}

bool BoxCover::contains(CellKey k) const { return std::binary_search(keys_.begin(), keys_.end(), k); }

bool BoxCover::contains(const Point& p) const {
  if (p.is_atom()) return contains(atom_key(p.atom));
  auto k = grid_.key_of_coords(std::span<const double>(p.x.data(), static_cast<std::size_t>(grid_.dim())));
  return k && contains(*k);
}

std::vector<Box> BoxCover::boxes() const {
  std::vector<Box> out;
  out.reserve(keys_.size());
  for (CellKey k : keys_) out.push_back(grid_.box(k));
  return out;
}

void BoxCover::insert(CellKey k) {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
  if (it == keys_.end() || *it != k) keys_.insert(it, k);
}

void BoxCover::insert_all(std::span<const CellKey> ks) {
  keys_.insert(keys_.end(), ks.begin(), ks.end());
  std::sort(keys_.begin(), keys_.end());
  keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
}

BoxCover BoxCover::united(const BoxCover& o) const {
  if (!(grid_ == o.grid_)) throw ValidationError("cover union across different grids");
  std::vector<CellKey> out;
  std::set_union(keys_.begin(), keys_.end(), o.keys_.begin(), o.keys_.end(), std::back_inserter(out));
  BoxCover r(grid_);
  r.keys_ = std::move(out);
  return r;
}

BoxCover BoxCover::intersected(const BoxCover& o) const {
  if (!(grid_ == o.grid_)) throw ValidationError("cover intersection across different grids");
  std::vector<CellKey> out;
  std::set_intersection(keys_.begin(), keys_.end(), o.keys_.begin(), o.keys_.end(), std::back_inserter(out));
  BoxCover r(grid_);
  r.keys_ = std::move(out);
  return r;
}

BoxCover BoxCover::minus(const BoxCover& o) const {
  if (!(grid_ == o.grid_)) throw ValidationError("cover difference across different grids");
  std::vector<CellKey> out;
  std::set_difference(keys_.begin(), keys_.end(), o.keys_.begin(), o.keys_.end(), std::back_inserter(out));
  BoxCover r(grid_);
  r.keys_ = std::move(out);
  return r;
}

bool BoxCover::subset_of(const BoxCover& o) const {
  return std::includes(o.keys_.begin(), o.keys_.end(), keys_.begin(), keys_.end());
}

BoxCover full_cover(const Grid& grid) { return BoxCover(grid, grid.all_cells()); }

BoxCover subdivide(const BoxCover& cover) {
  if (cover.empty()) throw ValidationError("subdivide needs a nonempty cover");
  const Grid& g = cover.grid();
  const int axis = g.longest_axis();
  Grid fine = g.refined(axis);
  std::vector<CellKey> out;
  out.reserve(cover.size() * 2);
  for (CellKey k : cover.keys()) {
    if (is_atom_key(k)) {
      out.push_back(k);
      continue;
    }
    auto idx = unpack_cell(k);
    auto a = idx, b = idx;
    a[axis] = 2 * idx[axis];
    b[axis] = 2 * idx[axis] + 1;
    out.push_back(pack_cell(a));
    out.push_back(pack_cell(b));
  }
  return BoxCover(std::move(fine), std::move(out));
}

namespace {

// Additive-recurrence (Kronecker) sequence in up to three dimensions, started
// at an offset hashed from the ball so that verdicts are reproducible.
struct ProbeSequence {
  std::array<double, 3> alpha{};
  std::array<double, 3> state{};

  ProbeSequence(const Point& c, double radius) {
    // Generalized golden ratios for d = 3 (phi_3 = 1.22074...).
    constexpr double g = 1.2207440846057596;
    alpha = {1.0 / g, 1.0 / (g * g), 1.0 / (g * g * g)};
    std::uint64_t h = splitmix64(bits_of(radius));
    for (int k = 0; k < 3; ++k) h = splitmix64(h ^ bits_of(c.x[k]));
    for (int k = 0; k < 3; ++k) {
      h = splitmix64(h);
      state[k] = static_cast<double>(h >> 11) * 0x1.0p-53;
    }
  }

  std::array<double, 3> next() {
    for (int k = 0; k < 3; ++k) {
      state[k] += alpha[k];
      state[k] -= std::floor(state[k]);
    }
    return state;
  }
};

bool covered(const BoxCover& cover, std::span<const double> c) {
  auto k = cover.grid().key_of_coords(c);
  return k && cover.contains(*k);
}

}  // namespace

bool ball_contained(const BoxCover& cover, const Point& center, double radius, int probe_count) {
  if (!(radius > 0)) throw ValidationError("ball radius must be positive");
  if (probe_count < 1) throw ValidationError("probe_count must be >= 1");
  const SpaceDescriptor& s = *cover.grid().space();
  const double r = radius * (1.0 - 1e-9);
  ProbeSequence seq(center, radius);

  switch (s.kind) {
    case SpaceKind::IntervalWithAtoms: {
      const double c = center.x[0];
      for (std::size_t i = 0; i < s.atoms.size(); ++i) {
        if (std::fabs(s.atoms[i] - c) < radius && !cover.contains(atom_key(static_cast<int>(i)))) {
          return false;
        }
      }
      const double a = std::max(c - r, s.lo);
      const double b = std::min(c + r, s.hi);
      if (a > b) return true;  // the ball holds no continuum points
      std::array<double, 1> probe{a};
      if (!covered(cover, probe)) return false;
      probe[0] = b;
      if (!covered(cover, probe)) return false;
      for (int i = 0; i < probe_count; ++i) {
        probe[0] = a + (b - a) * seq.next()[0];
        if (!covered(cover, probe)) return false;
      }
      return true;
    }
    case SpaceKind::Circle: {
      const double c = center.x[0];
      std::array<double, 1> probe{};
      for (double e : {-r, r}) {
        probe[0] = wrap_unit(c + std::min(e, 0.5));
        if (!covered(cover, probe)) return false;
      }
      for (int i = 0; i < probe_count; ++i) {
        probe[0] = wrap_unit(c + std::min(r, 0.5) * (2.0 * seq.next()[0] - 1.0));
        if (!covered(cover, probe)) return false;
      }
      return true;
    }
    case SpaceKind::Disk:
    case SpaceKind::CircleTimesDisk: {
      const bool prod = s.kind == SpaceKind::CircleTimesDisk;
      const int o = prod ? 1 : 0;
      const double R = s.disk_radius;
      auto test = [&](double base, double x, double y) {
        if (x * x + y * y > R * R) return true;  // not a point of the space
        std::array<double, 3> q{};
        if (prod) {
          q = {wrap_unit(base), x, y};
        } else {
          q = {x, y, 0.0};
        }
        return covered(cover, std::span<const double>(q.data(), static_cast<std::size_t>(s.dimension())));
      };
      const double cb = prod ? center.x[0] : 0.0;
      const double cx = center.x[o], cy = center.x[o + 1];
      const double br = std::min(r, 0.5);
      if (!test(cb, cx, cy)) return false;
      for (double e : {-r, r}) {
        if (!test(cb, cx + e, cy) || !test(cb, cx, cy + e)) return false;
        if (prod && !test(cb + (e < 0 ? -br : br), cx, cy)) return false;
      }
      for (int i = 0; i < probe_count; ++i) {
        auto u = seq.next();
        const double rad = r * std::sqrt(u[0]);
        const double ang = 2.0 * M_PI * u[1];
        const double base = prod ? cb + br * (2.0 * u[2] - 1.0) : 0.0;
        if (!test(base, cx + rad * std::cos(ang), cy + rad * std::sin(ang))) return false;
      }
      return true;
    }
  }
  return false;
}

bool is_interior_cell(const BoxCover& cover, CellKey k) {
  if (!cover.contains(k)) return false;
  if (is_atom_key(k)) return true;
  for (CellKey n : cover.grid().neighbors(k)) {
    if (!cover.contains(n)) return false;
  }
  return true;
}

BoxCover interior_cells(const BoxCover& cover) {
  std::vector<CellKey> out;
  for (CellKey k : cover.keys()) {
    if (is_interior_cell(cover, k)) out.push_back(k);
  }
  return BoxCover(cover.grid(), std::move(out));
}

BoxCover dilate(const BoxCover& cover) {
  std::vector<CellKey> out(cover.keys().begin(), cover.keys().end());
  for (CellKey k : cover.keys()) {
    auto r = cover.grid().ring(k);
    out.insert(out.end(), r.begin(), r.end());
  }
  return BoxCover(cover.grid(), std::move(out));
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_cover_csv(std::ostream& out, const BoxCover& cover) {
  const int n = cover.grid().dim();
  out << "depth";
  for (int k = 1; k <= n; ++k) out << ",lo_" << k;
  for (int k = 1; k <= n; ++k) out << ",hi_" << k;
  out << ",atom_id\n";
  for (CellKey key : cover.keys()) {
    Box b = cover.grid().box(key);
    out << b.depth;
    for (int k = 0; k < n; ++k) out << ',' << fmt_double(b.lo[k]);
    for (int k = 0; k < n; ++k) out << ',' << fmt_double(b.hi[k]);
    out << ',';
    if (b.is_atom()) out << b.atom;
    out << '\n';
  }
}

BoxCover read_cover_csv(std::istream& in, const SpacePtr& space) {
  const int n = space->dimension();
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty box CSV");
  if (static_cast<int>(split_csv(line).size()) != 2 * n + 2) {
    throw ValidationError("box CSV header does not match space dimension");
  }
  struct Row {
    int depth;
    std::array<double, 3> lo{}, hi{};
    int atom = -1;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (static_cast<int>(f.size()) != 2 * n + 2) throw ValidationError("malformed box CSV row: " + line);
    Row r;
    try {
      r.depth = std::stoi(f[0]);
      for (int k = 0; k < n; ++k) {
        r.lo[k] = std::stod(f[1 + k]);
        r.hi[k] = std::stod(f[1 + n + k]);
      }
      if (!f.back().empty()) r.atom = std::stoi(f.back());
    } catch (const std::exception&) {
      throw ValidationError("malformed box CSV row: " + line);
    }
    rows.push_back(r);
  }
  Grid probe(space, {0, 0, 0});
  int depth = rows.empty() ? 0 : rows.front().depth;
  std::array<int, 3> lv{};
  bool have_levels = false;
  for (const Row& r : rows) {
    if (r.depth != depth) throw ValidationError("box CSV mixes depths");
    if (r.atom >= 0 || have_levels) continue;
    for (int k = 0; k < n; ++k) {
      const double ratio = (probe.root_hi(k) - probe.root_lo(k)) / (r.hi[k] - r.lo[k]);
      lv[k] = static_cast<int>(std::lround(std::log2(ratio)));
    }
    have_levels = true;
  }
  Grid grid = have_levels ? Grid(space, lv) : Grid::at_depth(space, depth);
  if (grid.depth() != depth) throw ValidationError("box CSV depth does not match box sizes");
  std::vector<CellKey> keys;
  keys.reserve(rows.size());
  for (const Row& r : rows) {
    if (r.atom >= 0) {
      if (r.atom >= static_cast<int>(space->atoms.size())) throw ValidationError("unknown atom id in CSV");
      keys.push_back(atom_key(r.atom));
      continue;
    }
    std::array<double, 3> c{};
    for (int k = 0; k < n; ++k) c[k] = 0.5 * (r.lo[k] + r.hi[k]);
    auto key = grid.key_of_coords(std::span<const double>(c.data(), static_cast<std::size_t>(n)));
    if (!key) throw ValidationError("box outside the space in CSV");
    keys.push_back(*key);
  }
  return BoxCover(grid, std::move(keys));
}

}  // namespace topattr
