#include "topattr/hutchinson.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "topattr/error.hpp"
#include "topattr/parallel.hpp"
#include "topattr/random.hpp"

namespace topattr {

bool Region::contains(const SpaceDescriptor& s, const std::array<double, 3>& c) const {
  switch (s.kind) {
    case SpaceKind::IntervalWithAtoms:
      return c[0] >= s.lo && c[0] <= s.hi && c[0] < cut;
    case SpaceKind::Disk:
      return c[0] * c[0] + c[1] * c[1] <= s.disk_radius * s.disk_radius && c[0] < cut;
    default:
      return false;
  }
}

IFS::IFS(SpacePtr space, std::vector<MapSpec> members, double lambda, Region z)
    : space_(std::move(space)), members_(std::move(members)), lambda_(lambda), z_(z) {
  if (members_.empty()) throw ValidationError("IFS needs at least one member");
  if (!(lambda_ > 0.0 && lambda_ < 1.0)) throw ValidationError("IFS contraction factor must lie in (0, 1)");
  for (const MapSpec& m : members_) {
    if (!(*m.space == *space_)) throw ValidationError("IFS member " + m.name + " acts on another space");
  }
  switch (space_->kind) {
    case SpaceKind::IntervalWithAtoms: {
      const double hi = std::min(space_->hi, z_.cut);
      if (!(hi > space_->lo)) throw ValidationError("IFS region is empty");
      center_ = {0.5 * (space_->lo + hi), 0.0, 0.0};
      radius_ = 0.5 * (hi - space_->lo);
      break;
    }
    case SpaceKind::Disk:
      center_ = {0.0, 0.0, 0.0};
      radius_ = space_->disk_radius;
      break;
    default:
      throw ValidationError("IFS supports interval and disk spaces");
  }
}

IFS IFS::fiber(std::shared_ptr<const FiberFamily> family) {
  std::vector<MapSpec> members;
  for (int k = 0; k < 3; ++k) members.push_back(ifs_member_map(k, family));
  SpacePtr space = members.front().space;
  IFS ifs(std::move(space), std::move(members), family->lambda(), Region{family->geometry().z_cut});
  ifs.family_ = std::move(family);
  return ifs;
}

std::array<double, 3> IFS::apply_member(std::size_t i, const std::array<double, 3>& c) const {
  const MapSpec& m = members_.at(i);
  if (const auto* mem = std::get_if<IfsMember>(&m.rule)) {
    auto f = mem->family->piece(FiberFamily::member_piece(mem->index)).apply(c[0], c[1]);
    const double r = mem->family->geometry().radius;
    const double n2 = f[0] * f[0] + f[1] * f[1];
    if (n2 > r * r) {
      const double k = r / std::sqrt(n2);
      f[0] *= k;
      f[1] *= k;
    }
    return {f[0], f[1], 0.0};
  }
  const Point p = make_point(space_, std::span<const double>(c.data(), static_cast<std::size_t>(space_->dimension())));
  return apply(m, p).x;
}

std::array<double, 3> IFS::apply_word(const SymbolWord& w, const std::array<double, 3>& c) const {
  std::array<double, 3> v = c;
  for (auto it = w.symbols.rbegin(); it != w.symbols.rend(); ++it) v = apply_member(*it, v);
  return v;
}

double IFS::distance(const std::array<double, 3>& a, const std::array<double, 3>& b) const {
  if (space_->kind == SpaceKind::Disk) return std::hypot(a[0] - b[0], a[1] - b[1]);
  return std::fabs(a[0] - b[0]);
}

bool PropertyReport::all_pass() const {
  return std::all_of(props.begin(), props.end(), [](const PropertyResult& p) { return p.pass; });
}

double PropertyReport::min_margin() const {
  double m = props[0].margin;
  for (const auto& p : props) m = std::min(m, p.margin);
  return m;
}

namespace {

struct Cloud {
  std::vector<double> x, y;
  std::size_t size() const { return x.size(); }
};

template <class Pred>
Cloud sample_region(Rng& rng, std::size_t n, double x0, double x1, double R, Pred keep) {
  Cloud c;
  c.x.reserve(n);
  c.y.reserve(n);
  while (c.size() < n) {
    const double x = rng.uniform(x0, x1);
    const double y = rng.uniform(-R, R);
    if (x * x + y * y <= R * R && keep(x)) {
      c.x.push_back(x);
      c.y.push_back(y);
    }
  }
  return c;
}

Cloud image(const FiberPiece& p, const Cloud& c) {
  Cloud out;
  out.x.resize(c.size());
  out.y.resize(c.size());
  p.apply_batch(c.x.data(), c.y.data(), out.x.data(), out.y.data(), c.size());
  return out;
}

// Largest image x over the members, with the source point that attains it.
std::pair<double, std::array<double, 2>> max_image_x(const FiberFamily& fam, const Cloud& c, double R,
                                                     bool& left_disk) {
  double best = -INFINITY;
  std::array<double, 2> at{};
  for (int k = 0; k < 3; ++k) {
    const Cloud im = image(fam.piece(FiberFamily::member_piece(k)), c);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (im.x[i] > best) {
        best = im.x[i];
        at = {c.x[i], c.y[i]};
      }
      if (im.x[i] * im.x[i] + im.y[i] * im.y[i] > R * R * (1.0 + 1e-9)) left_disk = true;
    }
  }
  return {best, at};
}

}  // namespace

PropertyReport verify_fiber_properties(const IFS& ifs, std::size_t sample_count, std::uint64_t seed) {
  if (sample_count < 10000) throw ValidationError("verify_fiber_properties needs at least 1e4 samples");
  const auto fam = ifs.family();
  if (!fam) throw ValidationError("property verification needs the fiber IFS");
  const FiberGeometry& g = fam->geometry();
  const double R = g.radius;
  const double lambda = ifs.lambda();
  Rng rng(seed);

  const Cloud D = sample_region(rng, sample_count, -R, g.d_cut, R, [&](double x) { return x < g.d_cut; });
  const Cloud Z = sample_region(rng, sample_count, -R, g.z_cut, R, [&](double x) { return x < g.z_cut; });
  const Cloud MZ = sample_region(rng, sample_count, g.z_cut, R, R, [&](double x) { return x >= g.z_cut; });

  PropertyReport rep;
  rep.sample_count = sample_count;
  rep.lambda = lambda;

  // 1: random pairs plus near pairs in Z.
  {
    const std::size_t n = Z.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    Cloud P = Z, Q;
    Q.x.resize(n);
    Q.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      Q.x[i] = Z.x[perm[i]];
      Q.y[i] = Z.y[perm[i]];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double x = Z.x[i] + rng.uniform(-1e-4, 1e-4);
      const double y = Z.y[i] + rng.uniform(-1e-4, 1e-4);
      if (x < g.z_cut && x * x + y * y <= R * R) {
        P.x.push_back(Z.x[i]);
        P.y.push_back(Z.y[i]);
        Q.x.push_back(x);
        Q.y.push_back(y);
      }
    }
    const kernels::Table& kt = kernels::active();
    double worst = 0.0;
    int worst_member = 0;
    for (int k = 0; k < 3; ++k) {
      const FiberPiece& f = fam->piece(FiberFamily::member_piece(k));
      const Cloud FP = image(f, P), FQ = image(f, Q);
      const double r = kt.max_ratio(P.x.data(), P.y.data(), Q.x.data(), Q.y.data(), FP.x.data(), FP.y.data(),
                                    FQ.x.data(), FQ.y.data(), P.size(), 1e-9);
      if (r > worst) {
        worst = r;
        worst_member = k;
      }
    }
    PropertyResult& res = rep.props[0];
    res.value = worst;
    res.margin = lambda - worst;
    res.pass = worst <= lambda;
    if (!res.pass) {
      const FiberPiece& f = fam->piece(FiberFamily::member_piece(worst_member));
      const Cloud FP = image(f, P), FQ = image(f, Q);
      double best = -1.0;
      for (std::size_t i = 0; i < P.size(); ++i) {
        const double d = std::hypot(P.x[i] - Q.x[i], P.y[i] - Q.y[i]);
        if (!(d > 1e-9)) continue;
        const double r = std::hypot(FP.x[i] - FQ.x[i], FP.y[i] - FQ.y[i]) / d;
        if (r > best) {
          best = r;
          res.witness = std::array<double, 2>{P.x[i], P.y[i]};
        }
      }
    }
  }

  // 2: D covered by the member images of D, and those images inside Z.
  {
    const std::size_t n = D.size();
    std::vector<double> depth(n, -INFINITY);
    std::vector<double> px(n), py(n);
    const kernels::Table& kt = kernels::active();
    for (int k = 0; k < 3; ++k) {
      const FiberPiece& f = fam->piece(FiberFamily::member_piece(k));
      if (f.kind == PieceKind::Blaschke) {
        kt.blaschke_inverse(f.blaschke, D.x.data(), D.y.data(), px.data(), py.data(), n);
        const double a = f.blaschke.a;
        for (std::size_t i = 0; i < n; ++i) {
          const double wx = px[i] / R, wy = py[i] / R;
          const double dx = 1.0 - a * wx, dy = -a * wy;
          const double scale = (1.0 - a * a) / (dx * dx + dy * dy);
          depth[i] = std::max(depth[i], (g.d_cut - px[i]) * scale);
        }
      } else if (f.kind == PieceKind::Affine) {
        for (std::size_t i = 0; i < n; ++i) {
          const double qx = (D.x[i] - f.shift[0]) / f.scale;
          const double qy = (D.y[i] - f.shift[1]) / f.scale;
          const double d = std::min(g.d_cut - qx, R - std::hypot(qx, qy)) * std::fabs(f.scale);
          depth[i] = std::max(depth[i], d);
        }
      }
    }
    double cover = INFINITY;
    std::array<double, 2> at{};
    for (std::size_t i = 0; i < n; ++i) {
      if (depth[i] < cover) {
        cover = depth[i];
        at = {D.x[i], D.y[i]};
      }
    }
    bool left_disk = false;
    const auto [mx, src] = max_image_x(*fam, D, R, left_disk);
    const double inside = g.z_cut - mx;
    PropertyResult& res = rep.props[1];
    res.value = cover;
    res.margin = std::min(cover, inside);
    res.pass = cover > 0.0 && inside > 0.0 && !left_disk;
    if (!res.pass) res.witness = cover <= inside ? at : src;
  }

  // 3 and 4: images of M \ Z inside D, images of Z inside Z.
  for (int prop : {2, 3}) {
    const Cloud& src = prop == 2 ? MZ : Z;
    const double cut = prop == 2 ? g.d_cut : g.z_cut;
    bool left_disk = false;
    const auto [mx, at] = max_image_x(*fam, src, R, left_disk);
    PropertyResult& res = rep.props[static_cast<std::size_t>(prop)];
    res.value = mx;
    res.margin = cut - mx;
    res.pass = mx < cut && !left_disk;
    if (!res.pass) res.witness = at;
  }
  return rep;
}

BoxCover hutchinson_step(const IFS& ifs, const BoxCover& cover, int samples_per_axis) {
  const auto& keys = cover.keys();
  std::vector<std::vector<CellKey>> parts(keys.size());
  parallel_for(keys.size(), [&](std::size_t i) {
    for (const MapSpec& m : ifs.members()) {
      auto img = image_box(m, cover.grid(), keys[i], samples_per_axis, 0.0);
      parts[i].insert(parts[i].end(), img.begin(), img.end());
    }
  });
  std::vector<CellKey> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return BoxCover(cover.grid(), std::move(all));
}

BoxCover ifs_attractor(const IFS& ifs, int depth, int samples_per_axis, int max_steps) {
  if (depth < 0) throw ValidationError("depth must be >= 0");
  Grid grid = Grid::at_depth(ifs.space(), 0);
  std::vector<CellKey> start;
  for (CellKey k : grid.all_cells()) {
    if (grid.box(k).lo[0] < ifs.z().cut) start.push_back(k);
  }
  BoxCover c(grid, std::move(start));
  int steps = 0;
  for (int d = 0;; ++d) {
    for (;;) {
      if (++steps > max_steps) {
        throw BudgetExhausted("Hutchinson iteration did not settle within " + std::to_string(max_steps) +
                              " steps");
      }
      BoxCover next = c.intersected(hutchinson_step(ifs, c, samples_per_axis));
      if (next == c) break;
      c = std::move(next);
    }
    if (d == depth || c.empty()) break;
    BoxCover fine = subdivide(c);
    std::vector<CellKey> keep;
    for (CellKey k : fine.keys()) {
      if (fine.grid().cell_in_space(k)) keep.push_back(k);
    }
    c = BoxCover(fine.grid(), std::move(keep));
  }
  return c;
}

WordSearchResult hutchinson_word_search(const IFS& ifs, const std::array<double, 3>& center, double radius,
                                        int max_len, std::size_t beam_width) {
  if (!(radius > 0.0)) throw ValidationError("target radius must be positive");
  if (max_len < 0) throw ValidationError("max_len must be >= 0");
  const auto& zc = ifs.tracked_center();
  const double Rc = ifs.tracked_radius();

  struct Cand {
    SymbolWord word;
    std::array<double, 3> img;
    double dist;
  };
  auto better = [](const Cand& a, const Cand& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.word < b.word;
  };

  std::vector<Cand> beam{{SymbolWord{}, zc, ifs.distance(zc, center)}};
  double bound = Rc;
  double best_slack = beam[0].dist + bound;
  if (beam[0].dist + bound <= radius) return {SymbolWord{}, zc, beam[0].dist, bound};

  for (int len = 1; len <= max_len; ++len) {
    bound *= ifs.lambda();
    std::vector<Cand> next;
    next.reserve(beam.size() * ifs.size());
    for (const Cand& c : beam) {
      for (std::size_t j = 0; j < ifs.size(); ++j) {
        Cand e;
        e.word = c.word;
        e.word.symbols.push_back(static_cast<std::uint8_t>(j));
        e.img = ifs.apply_word(e.word, zc);
        e.dist = ifs.distance(e.img, center);
        if (e.dist > bound + radius) continue;  // f_w(Z) cannot meet the target
        next.push_back(std::move(e));
      }
    }
    if (next.empty()) break;
    std::sort(next.begin(), next.end(), better);
    for (const Cand& c : next) best_slack = std::min(best_slack, c.dist + bound);
    if (next.front().dist + bound <= radius) {
      const Cand& w = next.front();
      return {w.word, w.img, w.dist, bound};
    }
    if (next.size() > beam_width) next.resize(beam_width);
    beam = std::move(next);
  }
  std::ostringstream msg;
  msg << "no certified word within length " << max_len << " (best dist + bound = " << best_slack
      << ", radius " << radius << ")";
  throw BudgetExhausted(msg.str());
}

}  // namespace topattr
