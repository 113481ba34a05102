#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "topattr/kernels.hpp"

namespace topattr::kernels {

namespace {

constexpr std::size_t W = 4;

void mtupling_avx2(int m, const double* in, double* out, std::size_t n) {
  const __m256d md = _mm256_set1_pd(static_cast<double>(m));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + W <= n; i += W) {
    __m256d y = _mm256_mul_pd(md, _mm256_loadu_pd(in + i));
    y = _mm256_sub_pd(y, _mm256_floor_pd(y));
    y = _mm256_blendv_pd(y, zero, _mm256_cmp_pd(y, one, _CMP_GE_OQ));
    _mm256_storeu_pd(out + i, y);
  }
  if (i < n) scalar_table().mtupling(m, in + i, out + i, n - i);
}

void affine_avx2(double scale, double tx, double ty, const double* x, const double* y, double* ox, double* oy,
                 std::size_t n) {
  const __m256d s = _mm256_set1_pd(scale);
  const __m256d vx = _mm256_set1_pd(tx);
  const __m256d vy = _mm256_set1_pd(ty);
  std::size_t i = 0;
  for (; i + W <= n; i += W) {
    _mm256_storeu_pd(ox + i, _mm256_add_pd(_mm256_mul_pd(s, _mm256_loadu_pd(x + i)), vx));
    _mm256_storeu_pd(oy + i, _mm256_add_pd(_mm256_mul_pd(s, _mm256_loadu_pd(y + i)), vy));
  }
  if (i < n) scalar_table().affine(scale, tx, ty, x + i, y + i, ox + i, oy + i, n - i);
}

inline void complex_div(__m256d nx, __m256d ny, __m256d dx, __m256d dy, __m256d& bx, __m256d& by) {
  const __m256d den = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
  bx = _mm256_div_pd(_mm256_add_pd(_mm256_mul_pd(nx, dx), _mm256_mul_pd(ny, dy)), den);
  by = _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(ny, dx), _mm256_mul_pd(nx, dy)), den);
}

void blaschke_avx2(const BlaschkeParams& p, const double* x, const double* y, double* ox, double* oy,
                   std::size_t n) {
  const __m256d R = _mm256_set1_pd(p.radius);
  const __m256d a = _mm256_set1_pd(p.a);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d c = _mm256_set1_pd(p.cos_alpha);
  const __m256d s = _mm256_set1_pd(p.sin_alpha);
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + W <= n; i += W) {
    const __m256d wx = _mm256_div_pd(_mm256_loadu_pd(x + i), R);
    const __m256d wy = _mm256_div_pd(_mm256_loadu_pd(y + i), R);
    const __m256d nx = _mm256_sub_pd(wx, a);
    const __m256d dx = _mm256_sub_pd(one, _mm256_mul_pd(a, wx));
    const __m256d dy = _mm256_xor_pd(_mm256_mul_pd(a, wy), sign);
    __m256d bx, by;
    complex_div(nx, wy, dx, dy, bx, by);
    _mm256_storeu_pd(ox + i, _mm256_mul_pd(R, _mm256_sub_pd(_mm256_mul_pd(c, bx), _mm256_mul_pd(s, by))));
    _mm256_storeu_pd(oy + i, _mm256_mul_pd(R, _mm256_add_pd(_mm256_mul_pd(s, bx), _mm256_mul_pd(c, by))));
  }
  if (i < n) scalar_table().blaschke(p, x + i, y + i, ox + i, oy + i, n - i);
}

void blaschke_inverse_avx2(const BlaschkeParams& p, const double* x, const double* y, double* ox, double* oy,
                           std::size_t n) {
  const __m256d R = _mm256_set1_pd(p.radius);
  const __m256d a = _mm256_set1_pd(p.a);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d c = _mm256_set1_pd(p.cos_alpha);
  const __m256d s = _mm256_set1_pd(p.sin_alpha);
  std::size_t i = 0;
  for (; i + W <= n; i += W) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    const __m256d wx = _mm256_div_pd(_mm256_add_pd(_mm256_mul_pd(c, vx), _mm256_mul_pd(s, vy)), R);
    const __m256d wy = _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(c, vy), _mm256_mul_pd(s, vx)), R);
    const __m256d nx = _mm256_add_pd(wx, a);
    const __m256d dx = _mm256_add_pd(one, _mm256_mul_pd(a, wx));
    const __m256d dy = _mm256_mul_pd(a, wy);
    __m256d bx, by;
    complex_div(nx, wy, dx, dy, bx, by);
    _mm256_storeu_pd(ox + i, _mm256_mul_pd(R, bx));
    _mm256_storeu_pd(oy + i, _mm256_mul_pd(R, by));
  }
  if (i < n) scalar_table().blaschke_inverse(p, x + i, y + i, ox + i, oy + i, n - i);
}

// Identity and saturated lanes are vectorized; lanes on the bend fall back to
// the scalar quadrature.
void fold_avx2(const FoldParams& p, const double* x, double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d c3 = _mm256_set1_pd(p.c3);
  const __m256d far = _mm256_set1_pd(fold_far_value(p));
  std::size_t i = 0;
  for (; i + W <= n; i += W) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d flat = _mm256_cmp_pd(v, zero, _CMP_LE_OQ);
    const __m256d sat = _mm256_cmp_pd(v, c3, _CMP_GE_OQ);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(_mm256_blendv_pd(far, v, flat), far, sat));
    const int bend = ~(_mm256_movemask_pd(flat) | _mm256_movemask_pd(sat)) & 0xF;
    if (bend) {
      for (std::size_t k = 0; k < W; ++k) {
        if (bend & (1 << k)) out[i + k] = fold_eta(p, x[i + k]);
      }
    }
  }
  for (; i < n; ++i) out[i] = fold_eta(p, x[i]);
}

void blend_avx2(const double* w, const double* a, const double* b, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + W <= n; i += W) {
    const __m256d vw = _mm256_loadu_pd(w + i);
    const __m256d t1 = _mm256_sub_pd(one, vw);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(t1, _mm256_loadu_pd(a + i)),
                                            _mm256_mul_pd(vw, _mm256_loadu_pd(b + i))));
  }
  if (i < n) scalar_table().blend(w + i, a + i, b + i, out + i, n - i);
}

void quantize_avx2(const double* x, std::size_t n, double lo, double hi, std::int64_t cells, bool periodic,
                   std::int32_t* out) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  const __m256d span = _mm256_set1_pd(hi - lo);
  const double cd = static_cast<double>(cells);
  const __m256d c = _mm256_set1_pd(cd);
  const __m256d cm1 = _mm256_set1_pd(cd - 1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d neg1 = _mm256_set1_pd(-1.0);
  const __m256d inf = _mm256_set1_pd(INFINITY);
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  std::size_t i = 0;
  for (; i + W <= n; i += W) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d t = _mm256_mul_pd(_mm256_div_pd(_mm256_sub_pd(v, vlo), span), c);
    __m256d f = _mm256_floor_pd(t);
    __m256d ok = _mm256_cmp_pd(_mm256_and_pd(t, absmask), inf, _CMP_LT_OQ);
    if (periodic) {
      f = _mm256_sub_pd(f, _mm256_mul_pd(c, _mm256_floor_pd(_mm256_div_pd(f, c))));
    } else {
      const __m256d top = _mm256_and_pd(_mm256_cmp_pd(f, c, _CMP_EQ_OQ), _mm256_cmp_pd(v, vhi, _CMP_EQ_OQ));
      f = _mm256_blendv_pd(f, cm1, top);
      ok = _mm256_and_pd(ok, _mm256_and_pd(_mm256_cmp_pd(f, zero, _CMP_GE_OQ), _mm256_cmp_pd(f, c, _CMP_LT_OQ)));
    }
    f = _mm256_blendv_pd(neg1, f, ok);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out + i), _mm256_cvttpd_epi32(f));
  }
  if (i < n) scalar_table().quantize(x + i, n - i, lo, hi, cells, periodic, out + i);
}

double max_ratio_avx2(const double* px, const double* py, const double* qx, const double* qy, const double* fpx,
                      const double* fpy, const double* fqx, const double* fqy, std::size_t n, double min_sep) {
  const __m256d sep = _mm256_set1_pd(min_sep);
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + W <= n; i += W) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(qx + i));
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(py + i), _mm256_loadu_pd(qy + i));
    const __m256d d = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
    const __m256d ex = _mm256_sub_pd(_mm256_loadu_pd(fpx + i), _mm256_loadu_pd(fqx + i));
    const __m256d ey = _mm256_sub_pd(_mm256_loadu_pd(fpy + i), _mm256_loadu_pd(fqy + i));
    const __m256d e = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey)));
    const __m256d keep = _mm256_cmp_pd(d, sep, _CMP_GT_OQ);
    const __m256d r = _mm256_div_pd(e, _mm256_blendv_pd(_mm256_set1_pd(1.0), d, keep));
    best = _mm256_max_pd(best, _mm256_and_pd(r, keep));
  }
  alignas(32) double lanes[W];
  _mm256_store_pd(lanes, best);
  double out = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  if (i < n) out = std::max(out, scalar_table().max_ratio(px + i, py + i, qx + i, qy + i, fpx + i, fpy + i,
                                                          fqx + i, fqy + i, n - i, min_sep));
  return out;
}

}  // namespace

const Table& avx2_table_impl() {
  static const Table t{mtupling_avx2, affine_avx2,  blaschke_avx2, blaschke_inverse_avx2,
                       fold_avx2,     blend_avx2,   quantize_avx2, max_ratio_avx2};
  return t;
}

}  // namespace topattr::kernels
