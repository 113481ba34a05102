#include "topattr/maps.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>

#include "topattr/error.hpp"

namespace topattr {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_multiple(int m, double phi) {
  double y = static_cast<double>(m) * phi;
  y = y - std::floor(y);
  return y >= 1.0 ? 0.0 : y;
}

void project_into_disk(double r, double& x, double& y) {
  const double n2 = x * x + y * y;
  if (n2 > r * r) {
    const double k = r / std::sqrt(n2);
    x *= k;
    y *= k;
  }
}

struct Segment {
  double l, r;
  int from, to;
};

constexpr Segment kSchedule[] = {
    {0.0, 0.125, FiberFamily::Q, FiberFamily::Q},
    {0.125, 0.1875, FiberFamily::Q, FiberFamily::S},
    {0.1875, 0.25, FiberFamily::S, FiberFamily::Top},
    {0.25, 0.375, FiberFamily::Top, FiberFamily::Top},
    {0.375, 0.5, FiberFamily::Top, FiberFamily::Center},
    {0.5, 0.625, FiberFamily::Center, FiberFamily::Center},
    {0.625, 0.75, FiberFamily::Center, FiberFamily::Bottom},
    {0.75, 0.875, FiberFamily::Bottom, FiberFamily::Bottom},
    {0.875, 0.9375, FiberFamily::Bottom, FiberFamily::S},
    {0.9375, 1.0, FiberFamily::S, FiberFamily::Q},
};

}  // namespace

double bump(const BumpSpec& spec, double t) {
  if (!(spec.l < spec.r)) throw ValidationError("bump needs l < r");
  if (t <= spec.l) return 0.0;
  if (t >= spec.r) return 1.0;
  return kernels::smooth_step((t - spec.l) / (spec.r - spec.l));
}

double smooth_step_slope_bound() {
  static const double bound = [] {
    double best = 0.0;
    const int n = 20000;
    for (int i = 1; i < n; ++i) {
      const double u = static_cast<double>(i) / n;
      const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
      const double da = a / (u * u), db = b / ((1.0 - u) * (1.0 - u));
      best = std::max(best, (da * b + a * db) / ((a + b) * (a + b)));
    }
    return best * 1.01;
  }();
  return bound;
}

std::array<double, 2> FiberPiece::apply(double x, double y) const {
  std::array<double, 2> out{};
  apply_batch(&x, &y, &out[0], &out[1], 1);
  return out;
}

void FiberPiece::apply_batch(const double* x, const double* y, double* ox, double* oy, std::size_t n) const {
  if (kind == PieceKind::Constant) {
    std::fill(ox, ox + n, value[0]);
    std::fill(oy, oy + n, value[1]);
    return;
  }
  const kernels::Table& k = n == 1 ? kernels::scalar_table() : kernels::active();
  std::vector<double> fx;
  const double* xin = x;
  double one = 0.0;
  if (folded) {
    if (n == 1) {
      one = kernels::fold_eta(fold, x[0]);
      xin = &one;
    } else {
      fx.resize(n);
      k.fold(fold, x, fx.data(), n);
      xin = fx.data();
    }
  }
  if (kind == PieceKind::Affine) {
    k.affine(scale, shift[0], shift[1], xin, y, ox, oy, n);
  } else {
    k.blaschke(blaschke, xin, y, ox, oy, n);
  }
}

FiberFamily::FiberFamily(FiberConstants c, FiberGeometry g) : constants_(c), geometry_(g) {
  const double R = g.radius;
  const double a = c.blaschke_a;
  if (!(c.lambda > 0.0) || !(a > -1.0 && a < 1.0) || !(R > 0.0)) {
    throw ValidationError("invalid fiber constants");
  }
  pieces_[Q].kind = PieceKind::Constant;
  pieces_[Q].value = g.q;
  pieces_[S].kind = PieceKind::Constant;
  pieces_[S].value = g.s;

  const std::complex<double> bi = (std::complex<double>(0, 1) - a) / (1.0 - a * std::complex<double>(0, 1));
  const double span = 2.0 * (kPi - std::arg(bi));
  const double over = c.arc_overlap_deg * kPi / 180.0;
  const double alpha_top = (kPi / 2 - over + span / 2) - kPi;
  const double alpha_bottom = (3 * kPi / 2 + over - span / 2) - kPi;
  for (auto [id, alpha] : {std::pair{Top, alpha_top}, std::pair{Bottom, alpha_bottom}}) {
    FiberPiece& p = pieces_[id];
    p.kind = PieceKind::Blaschke;
    p.blaschke = {R, a, std::cos(alpha), std::sin(alpha)};
    p.fold = c.fold;
  }
  FiberPiece& mid = pieces_[Center];
  mid.kind = PieceKind::Affine;
  mid.scale = c.center_scale;
  mid.shift = c.center_shift;
  mid.fold = c.fold;

  const int n = 30000;
  for (int i = 0; i <= n; ++i) {
    fold_max_ = std::max(fold_max_, kernels::fold_eta(c.fold, R * i / n));
  }
  fold_max_ += 1e-6;
  const double re = std::max(0.0, a * fold_max_ / R);
  const double blaschke_lip = (1.0 - a * a) / ((1.0 - re) * (1.0 - re));
  lipschitz_ = std::max(std::fabs(c.center_scale), blaschke_lip);
}

std::shared_ptr<const FiberFamily> default_fiber_family() {
  static const auto fam = std::make_shared<const FiberFamily>();
  return fam;
}

FiberBlend fiber_schedule(double phi) {
  phi -= std::floor(phi);
  for (const Segment& s : kSchedule) {
    if (phi >= s.l && phi < s.r) {
      FiberBlend b{s.from, s.to, 0.0, s.l, s.r};
      if (s.from != s.to) b.w = bump({s.l, s.r}, phi);
      return b;
    }
  }
  return FiberBlend{FiberFamily::S, FiberFamily::Q, 1.0, 0.9375, 1.0};
}

std::array<double, 2> fiber_map(const FiberFamily& fam, double phi, double x, double y) {
  const FiberBlend b = fiber_schedule(phi);
  std::array<double, 2> out = fam.piece(b.from).apply(x, y);
  if (b.from != b.to) {
    const auto other = fam.piece(b.to).apply(x, y);
    const double t1 = 1.0 - b.w;
    out[0] = t1 * out[0] + b.w * other[0];
    out[1] = t1 * out[1] + b.w * other[1];
  }
  project_into_disk(fam.geometry().radius, out[0], out[1]);
  return out;
}

MapSpec counterexample_map() {
  static const SpacePtr space = make_interval_space(-1.0, 1.0, {2.0});
  return MapSpec{"counterexample", space, Counterexample{}, std::nullopt};
}

MapSpec mtupling_map(int m) {
  if (m < 1) throw ValidationError("m-tupling needs m >= 1");
  static const SpacePtr space = make_circle_space();
  return MapSpec{"mtupling:" + std::to_string(m), space, MTupling{m}, std::nullopt};
}

MapSpec skew_product_map(std::shared_ptr<const FiberFamily> family) {
  if (!family) throw ValidationError("skew product needs a fiber family");
  SpacePtr space = make_solid_torus_space(family->geometry().radius);
  return MapSpec{"skewproduct", space, SkewProduct{std::move(family)}, std::nullopt};
}

MapSpec ifs_member_map(int index, std::shared_ptr<const FiberFamily> family) {
  if (index < 0 || index > 2) throw ValidationError("IFS member index must be 0, 1 or 2");
  if (!family) throw ValidationError("IFS member needs a fiber family");
  SpacePtr space = make_disk_space(family->geometry().radius);
  return MapSpec{"ifs:" + std::to_string(FiberFamily::member_symbol(index)), space,
                 IfsMember{index, std::move(family)}, std::nullopt};
}

MapSpec polynomial_map(std::string name, double lo, double hi, std::vector<double> coeffs) {
  if (coeffs.empty()) throw ValidationError("polynomial needs coefficients");
  return MapSpec{std::move(name), make_interval_space(lo, hi), Generic1d{std::move(coeffs)}, std::nullopt};
}

MapSpec make_map(const std::string& name) {
  if (name == "counterexample") return counterexample_map();
  if (name == "skewproduct") return skew_product_map();
  if (name == "cubic") return polynomial_map("cubic", -1.0, 1.0, {0.0, 0.0, 0.0, 1.0});
  auto parse_int = [&](std::size_t pos) {
    int v = 0;
    const char* b = name.data() + pos;
    const char* e = name.data() + name.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || ptr != e || b == e) throw ValidationError("bad map name: " + name);
    return v;
  };
  if (name.rfind("mtupling:", 0) == 0) {
    const int m = parse_int(9);
    if (m < 1 || m > 4096) throw ValidationError("m-tupling factor out of range: " + name);
    return mtupling_map(m);
  }
  if (name.rfind("ifs:", 0) == 0) {
    const int sym = parse_int(4);
    if (sym != 2 && sym != 4 && sym != 6) throw ValidationError("IFS members are ifs:2, ifs:4, ifs:6");
    return ifs_member_map(sym / 2 - 1);
  }
  throw ValidationError("unknown map: " + name);
}

namespace {

double horner(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

Point advance_base(const SpacePtr& space, int m, const Point& p, const std::array<double, 3>& rest) {
  Point q;
  q.space = space;
  q.x = rest;
  if (p.tape && p.tape->base == m) {
    q.tape = p.tape;
    q.offset = p.offset + 1;
    q.x[0] = tape_value(*p.tape, q.offset);
  } else {
    q.x[0] = wrap_multiple(m, p.x[0]);
  }
  return q;
}

}  // namespace

Point apply(const MapSpec& map, const Point& p) {
  if (!p.space || !(p.space == map.space || *p.space == *map.space)) {
    throw DomainError("point does not belong to the space of " + map.name);
  }
  if (!in_space(*map.space, p)) throw DomainError("point outside the space of " + map.name);
  return std::visit(
      [&](const auto& rule) -> Point {
        using R = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<R, Counterexample>) {
          if (p.is_atom()) {
            const double zero = 0.0;
            return make_point(map.space, std::span<const double>(&zero, 1));
          }
          return make_atom(map.space, 0);
        } else if constexpr (std::is_same_v<R, MTupling>) {
          return advance_base(map.space, rule.m, p, {0.0, 0.0, 0.0});
        } else if constexpr (std::is_same_v<R, SkewProduct>) {
          const auto f = fiber_map(*rule.family, p.x[0], p.x[1], p.x[2]);
          return advance_base(map.space, 8, p, {0.0, f[0], f[1]});
        } else if constexpr (std::is_same_v<R, IfsMember>) {
          auto f = rule.family->piece(FiberFamily::member_piece(rule.index)).apply(p.x[0], p.x[1]);
          project_into_disk(rule.family->geometry().radius, f[0], f[1]);
          Point q;
          q.space = map.space;
          q.x = {f[0], f[1], 0.0};
          return q;
        } else {
          const double v = horner(rule.coeffs, p.x[0]);
          return make_point(map.space, std::span<const double>(&v, 1));
        }
      },
      map.rule);
}

void apply_coords(const MapSpec& map, const std::array<std::vector<double>, 3>& in,
                  std::array<std::vector<double>, 3>& out) {
  const std::size_t n = in[0].size();
  const int dim = map.space->dimension();
  for (int k = 0; k < 3; ++k) out[k].assign(k < dim ? n : 0, 0.0);
  const kernels::Table& kt = kernels::active();
  std::visit(
      [&](const auto& rule) {
        using R = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<R, Counterexample>) {
          throw DomainError("counterexample images are atoms; use apply()");
        } else if constexpr (std::is_same_v<R, MTupling>) {
          kt.mtupling(rule.m, in[0].data(), out[0].data(), n);
        } else if constexpr (std::is_same_v<R, Generic1d>) {
          for (std::size_t i = 0; i < n; ++i) out[0][i] = horner(rule.coeffs, in[0][i]);
        } else if constexpr (std::is_same_v<R, IfsMember>) {
          const double r = rule.family->geometry().radius;
          rule.family->piece(FiberFamily::member_piece(rule.index))
              .apply_batch(in[0].data(), in[1].data(), out[0].data(), out[1].data(), n);
          for (std::size_t i = 0; i < n; ++i) project_into_disk(r, out[0][i], out[1][i]);
        } else {
          const FiberFamily& fam = *rule.family;
          kt.mtupling(8, in[0].data(), out[0].data(), n);
          // Lanes sharing a schedule segment are evaluated together.
          std::size_t i = 0;
          std::vector<double> ax, ay, bx, by, w;
          while (i < n) {
            const FiberBlend b0 = fiber_schedule(in[0][i]);
            std::size_t j = i + 1;
            while (j < n) {
              const FiberBlend bj = fiber_schedule(in[0][j]);
              if (bj.from != b0.from || bj.to != b0.to) break;
              ++j;
            }
            const std::size_t m = j - i;
            double* ox = out[1].data() + i;
            double* oy = out[2].data() + i;
            fam.piece(b0.from).apply_batch(in[1].data() + i, in[2].data() + i, ox, oy, m);
            if (b0.from != b0.to) {
              ax.assign(ox, ox + m);
              ay.assign(oy, oy + m);
              bx.resize(m);
              by.resize(m);
              w.resize(m);
              fam.piece(b0.to).apply_batch(in[1].data() + i, in[2].data() + i, bx.data(), by.data(), m);
              for (std::size_t k = 0; k < m; ++k) w[k] = fiber_schedule(in[0][i + k]).w;
              kt.blend(w.data(), ax.data(), bx.data(), ox, m);
              kt.blend(w.data(), ay.data(), by.data(), oy, m);
            }
            for (std::size_t k = 0; k < m; ++k) project_into_disk(fam.geometry().radius, ox[k], oy[k]);
            i = j;
          }
        }
      },
      map.rule);
}

std::array<std::array<double, 3>, 3> local_lipschitz(const MapSpec& map, const Box& b) {
  std::array<std::array<double, 3>, 3> L{};
  const int dim = map.space->dimension();
  if (map.lipschitz_hint) {
    for (int j = 0; j < dim; ++j) {
      for (int k = 0; k < dim; ++k) L[j][k] = *map.lipschitz_hint;
    }
    return L;
  }
  std::visit(
      [&](const auto& rule) {
        using R = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<R, Counterexample>) {
        } else if constexpr (std::is_same_v<R, MTupling>) {
          L[0][0] = rule.m;
        } else if constexpr (std::is_same_v<R, Generic1d>) {
          const double M = std::max(std::fabs(b.lo[0]), std::fabs(b.hi[0]));
          double s = 0.0;
          for (std::size_t k = 1; k < rule.coeffs.size(); ++k) {
            s += std::fabs(rule.coeffs[k]) * static_cast<double>(k) * std::pow(M, static_cast<double>(k - 1));
          }
          L[0][0] = s;
        } else if constexpr (std::is_same_v<R, IfsMember>) {
          const double l = rule.family->lipschitz_bound();
          L[0] = {l, l, 0.0};
          L[1] = {l, l, 0.0};
        } else {
          const FiberFamily& fam = *rule.family;
          L[0][0] = 8.0;
          double lf = 0.0, lphi = 0.0;
          const double diam = 2.0 * fam.geometry().radius;
          for (const Segment& s : kSchedule) {
            if (!(b.hi[0] >= s.l && b.lo[0] < s.r)) continue;
            for (int id : {s.from, s.to}) {
              if (fam.piece(id).kind != PieceKind::Constant) lf = std::max(lf, fam.lipschitz_bound());
            }
            if (s.from != s.to) lphi = std::max(lphi, smooth_step_slope_bound() / (s.r - s.l) * diam);
          }
          L[1] = {lphi, lf, lf};
          L[2] = {lphi, lf, lf};
        }
      },
      map.rule);
  return L;
}

namespace {

struct AxisRange {
  std::int64_t lo, hi;  // inclusive, unwrapped for periodic axes
};

// Cells met by the open interval (v - r, v + r), or the cell of v when r == 0.
std::optional<AxisRange> axis_range(const Grid& g, int axis, double v, double r) {
  const double span = g.root_hi(axis) - g.root_lo(axis);
  const double n = static_cast<double>(g.cells(axis));
  auto t_of = [&](double x) { return (x - g.root_lo(axis)) / span * n; };
  double lo, hi;
  if (r == 0.0) {
    lo = hi = std::floor(t_of(v));
    if (!g.periodic(axis) && hi == n && v == g.root_hi(axis)) lo = hi = n - 1;
  } else {
    lo = std::floor(t_of(v - r));
    hi = std::ceil(t_of(v + r)) - 1.0;
    if (hi < lo) hi = lo;
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) return std::nullopt;
  if (g.periodic(axis)) {
    if (hi - lo + 1.0 >= n) return AxisRange{0, g.cells(axis) - 1};
    return AxisRange{static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)};
  }
  lo = std::max(lo, 0.0);
  hi = std::min(hi, n - 1.0);
  if (hi < lo) return std::nullopt;
  return AxisRange{static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)};
}

void emit_cells(const Grid& g, const std::array<double, 3>& v, const std::array<double, 3>& r,
                std::vector<CellKey>& out) {
  const int dim = g.dim();
  std::array<AxisRange, 3> rg{AxisRange{0, 0}, AxisRange{0, 0}, AxisRange{0, 0}};
  for (int k = 0; k < dim; ++k) {
    auto a = axis_range(g, k, v[k], r[k]);
    if (!a) return;
    rg[k] = *a;
  }
  const bool disk = g.space()->kind == SpaceKind::Disk || g.space()->kind == SpaceKind::CircleTimesDisk;
  for (std::int64_t c = rg[2].lo; c <= rg[2].hi; ++c) {
    for (std::int64_t b = rg[1].lo; b <= rg[1].hi; ++b) {
      for (std::int64_t a = rg[0].lo; a <= rg[0].hi; ++a) {
        std::array<std::int64_t, 3> idx{a, b, c};
        for (int k = 0; k < dim; ++k) {
          if (g.periodic(k)) idx[k] = ((idx[k] % g.cells(k)) + g.cells(k)) % g.cells(k);
        }
        const CellKey key = pack_cell(idx);
        if (!disk || g.cell_in_space(key)) out.push_back(key);
      }
    }
  }
}

void emit_atoms_near(const SpaceDescriptor& s, double v, double r, std::vector<CellKey>& out) {
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    if (std::fabs(s.atoms[i] - v) < r) out.push_back(atom_key(static_cast<int>(i)));
  }
}

}  // namespace

std::vector<CellKey> image_box(const MapSpec& map, const Grid& grid, CellKey key, int samples_per_axis,
                               double bloat) {
  if (samples_per_axis < 2) throw ValidationError("samples_per_axis must be >= 2");
  if (!(bloat >= 0.0)) throw ValidationError("bloat must be >= 0");
  const SpaceDescriptor& sp = *grid.space();
  const int dim = grid.dim();
  const Box b = grid.box(key);
  std::vector<CellKey> out;

  auto emit_point = [&](const Point& q, const std::array<double, 3>& r) {
    if (q.is_atom()) {
      out.push_back(atom_key(q.atom));
      if (r[0] > 0.0) {
        emit_cells(grid, q.x, r, out);
        emit_atoms_near(sp, q.x[0], r[0], out);
      }
      return;
    }
    emit_cells(grid, q.x, r, out);
    if (!sp.atoms.empty() && r[0] > 0.0) emit_atoms_near(sp, q.x[0], r[0], out);
  };

  if (b.is_atom()) {
    emit_point(apply(map, make_atom(grid.space(), b.atom)), {bloat, bloat, bloat});
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  const int S = samples_per_axis;
  const auto L = local_lipschitz(map, b);
  std::array<double, 3> h{}, r{};
  for (int k = 0; k < dim; ++k) h[k] = (b.hi[k] - b.lo[k]) / (2.0 * S);
  for (int j = 0; j < dim; ++j) {
    r[j] = bloat;
    for (int k = 0; k < dim; ++k) r[j] += L[j][k] * h[k];
  }

  std::size_t count = 1;
  for (int k = 0; k < dim; ++k) count *= static_cast<std::size_t>(S);
  std::array<std::vector<double>, 3> in, img;
  for (int k = 0; k < dim; ++k) in[k].resize(count);
  for (std::size_t s = 0; s < count; ++s) {
    std::size_t rem = s;
    for (int k = 0; k < dim; ++k) {
      const auto i = static_cast<double>(rem % static_cast<std::size_t>(S));
      rem /= static_cast<std::size_t>(S);
      in[k][s] = b.lo[k] + (b.hi[k] - b.lo[k]) * ((i + 0.5) / S);
    }
    if (sp.kind == SpaceKind::Disk) {
      project_into_disk(sp.disk_radius, in[0][s], in[1][s]);
    } else if (sp.kind == SpaceKind::CircleTimesDisk) {
      project_into_disk(sp.disk_radius, in[1][s], in[2][s]);
    }
  }

  if (!sp.atoms.empty()) {
    for (std::size_t s = 0; s < count; ++s) {
      const double x = in[0][s];
      emit_point(apply(map, make_point(grid.space(), std::span<const double>(&x, 1))), r);
    }
  } else {
    apply_coords(map, in, img);
    std::array<double, 3> v{};
    for (std::size_t s = 0; s < count; ++s) {
      for (int k = 0; k < dim; ++k) v[k] = img[k][s];
      emit_cells(grid, v, r, out);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace topattr
