#include <algorithm>
#include <array>
#include <cmath>

#include "topattr/kernels.hpp"

namespace topattr::kernels {

namespace {

constexpr int kGaussPoints = 32;

struct GaussRule {
  std::array<double, kGaussPoints> node{};
  std::array<double, kGaussPoints> weight{};
};

// Legendre roots by Newton iteration from the Chebyshev guesses.
GaussRule make_gauss_rule() {
  GaussRule g;
  const int n = kGaussPoints;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    g.node[i] = x;
    g.weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

const GaussRule& gauss_rule() {
  static const GaussRule rule = make_gauss_rule();
  return rule;
}

void mtupling_scalar(int m, const double* in, double* out, std::size_t n) {
  const double md = m;
  for (std::size_t i = 0; i < n; ++i) {
    double y = md * in[i];
    y = y - std::floor(y);
    out[i] = y >= 1.0 ? 0.0 : y;
  }
}

void affine_scalar(double scale, double tx, double ty, const double* x, const double* y, double* ox,
                   double* oy, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    ox[i] = scale * x[i] + tx;
    oy[i] = scale * y[i] + ty;
  }
}

void blaschke_scalar(const BlaschkeParams& p, const double* x, const double* y, double* ox, double* oy,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double wx = x[i] / p.radius;
    const double wy = y[i] / p.radius;
    const double nx = wx - p.a;
    const double ny = wy;
    const double dx = 1.0 - p.a * wx;
    const double dy = -(p.a * wy);
    const double den = dx * dx + dy * dy;
    const double bx = (nx * dx + ny * dy) / den;
    const double by = (ny * dx - nx * dy) / den;
    ox[i] = p.radius * (p.cos_alpha * bx - p.sin_alpha * by);
    oy[i] = p.radius * (p.sin_alpha * bx + p.cos_alpha * by);
  }
}

void blaschke_inverse_scalar(const BlaschkeParams& p, const double* x, const double* y, double* ox,
                             double* oy, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double wx = (p.cos_alpha * x[i] + p.sin_alpha * y[i]) / p.radius;
    const double wy = (p.cos_alpha * y[i] - p.sin_alpha * x[i]) / p.radius;
    const double nx = wx + p.a;
    const double ny = wy;
    const double dx = 1.0 + p.a * wx;
    const double dy = p.a * wy;
    const double den = dx * dx + dy * dy;
    const double bx = (nx * dx + ny * dy) / den;
    const double by = (ny * dx - nx * dy) / den;
    ox[i] = p.radius * bx;
    oy[i] = p.radius * by;
  }
}

void fold_scalar(const FoldParams& p, const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = fold_eta(p, x[i]);
}

void blend_scalar(const double* w, const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t1 = 1.0 - w[i];
    out[i] = t1 * a[i] + w[i] * b[i];
  }
}

void quantize_scalar(const double* x, std::size_t n, double lo, double hi, std::int64_t cells, bool periodic,
                     std::int32_t* out) {
  const double span = hi - lo;
  const double c = static_cast<double>(cells);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (x[i] - lo) / span * c;
    double f = std::floor(t);
    bool ok = std::isfinite(t);
    if (periodic) {
      f = f - c * std::floor(f / c);
    } else {
      if (f == c && x[i] == hi) f = c - 1.0;
      ok = ok && f >= 0.0 && f < c;
    }
    out[i] = ok ? static_cast<std::int32_t>(f) : -1;
  }
}

double max_ratio_scalar(const double* px, const double* py, const double* qx, const double* qy,
                        const double* fpx, const double* fpy, const double* fqx, const double* fqy,
                        std::size_t n, double min_sep) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = px[i] - qx[i];
    const double dy = py[i] - qy[i];
    const double d = std::sqrt(dx * dx + dy * dy);
    if (!(d > min_sep)) continue;
    const double ex = fpx[i] - fqx[i];
    const double ey = fpy[i] - fqy[i];
    const double r = std::sqrt(ex * ex + ey * ey) / d;
    best = std::max(best, r);
  }
  return best;
}

}  // namespace

double smooth_step(double u) {
  if (!(u > 0.0)) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

double smooth_step_integral(double u) {
  if (!(u > 0.0)) return 0.0;
  if (u >= 1.0) return u - 0.5;
  const GaussRule& g = gauss_rule();
  double s = 0.0;
  for (int i = 0; i < kGaussPoints; ++i) s += g.weight[i] * smooth_step(0.5 * u * (g.node[i] + 1.0));
  return 0.5 * u * s;
}

double fold_far_value(const FoldParams& p) { return p.c1 - p.c2 - 0.5 * (p.c3 - p.c2); }

double fold_eta(const FoldParams& p, double x) {
  if (x <= 0.0) return x;
  if (x >= p.c3) return fold_far_value(p);
  const double w = p.c3 - p.c2;
  return x - 2.0 * p.c1 * smooth_step_integral(x / p.c1) + w * smooth_step_integral((x - p.c2) / w);
}

double fold_eta_derivative(const FoldParams& p, double x) {
  if (x <= 0.0) return 1.0;
  if (x >= p.c3) return 0.0;
  return 1.0 - 2.0 * smooth_step(x / p.c1) + smooth_step((x - p.c2) / (p.c3 - p.c2));
}

const Table& scalar_table() {
  static const Table t{mtupling_scalar, affine_scalar,  blaschke_scalar, blaschke_inverse_scalar,
                       fold_scalar,     blend_scalar,   quantize_scalar, max_ratio_scalar};
  return t;
}

}  // namespace topattr::kernels
