#pragma once

// Batch kernels over structure-of-arrays coordinates. Each entry point has a
// scalar reference version and, on x86-64, an AVX2 version chosen at runtime.
// Both variants perform the same IEEE operations in the same order, so their
// outputs agree bit for bit.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace topattr::kernels {

enum class Isa { Scalar, Avx2 };

bool avx2_available();
// Active variant: AVX2 when the CPU supports it, unless TOPATTR_ISA=scalar.
Isa active_isa();
// Force a variant (tests). Requesting AVX2 on a CPU without it throws.
void set_isa(Isa isa);
std::string_view isa_name(Isa isa);

// Rotated, rescaled Blaschke factor z -> R e^{i alpha} B_a(z / R),
// B_a(w) = (w - a) / (1 - a w).
struct BlaschkeParams {
  double radius;
  double a;
  double cos_alpha;
  double sin_alpha;
};

// Smooth fold x -> eta(x) on the first coordinate; identity for x <= 0.
struct FoldParams {
  double c1;
  double c2;
  double c3;
};

struct Table {
  void (*mtupling)(int m, const double* in, double* out, std::size_t n);
  void (*affine)(double scale, double tx, double ty, const double* x, const double* y, double* ox,
                 double* oy, std::size_t n);
  void (*blaschke)(const BlaschkeParams& p, const double* x, const double* y, double* ox, double* oy,
                   std::size_t n);
  void (*blaschke_inverse)(const BlaschkeParams& p, const double* x, const double* y, double* ox,
                           double* oy, std::size_t n);
  void (*fold)(const FoldParams& p, const double* x, double* out, std::size_t n);
  // out = (1 - w) * a + w * b, lane-wise.
  void (*blend)(const double* w, const double* a, const double* b, double* out, std::size_t n);
  // Cell index along one grid axis, -1 when outside the root interval.
  void (*quantize)(const double* x, std::size_t n, double lo, double hi, std::int64_t cells,
                   bool periodic, std::int32_t* out);
  // max |f(p) - f(q)| / |p - q| over pairs with |p - q| > min_sep; 0 if none.
  double (*max_ratio)(const double* px, const double* py, const double* qx, const double* qy,
                      const double* fpx, const double* fpy, const double* fqx, const double* fqy,
                      std::size_t n, double min_sep);
};

const Table& scalar_table();
// nullptr when the AVX2 variant was not built or the CPU lacks AVX2.
const Table* avx2_table();
const Table& active();

// Scalar building blocks shared by both variants.
// C-infinity step: 0 for u <= 0, 1 for u >= 1, flat to all orders at both ends.
double smooth_step(double u);
// Integral of smooth_step over [0, u].
double smooth_step_integral(double u);
double fold_eta(const FoldParams& p, double x);
double fold_eta_derivative(const FoldParams& p, double x);
double fold_far_value(const FoldParams& p);

}  // namespace topattr::kernels
