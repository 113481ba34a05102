#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "topattr/kernels.hpp"

namespace topattr::kernels {

#if defined(TOPATTR_HAVE_AVX2)
const Table& avx2_table_impl();
#endif

namespace {

Isa initial_isa() {
  const char* env = std::getenv("TOPATTR_ISA");
  if (env && std::string(env) == "scalar") return Isa::Scalar;
  return avx2_available() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

bool avx2_available() {
#if defined(TOPATTR_HAVE_AVX2)
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok;
#else
  return false;
#endif
}

const Table* avx2_table() {
#if defined(TOPATTR_HAVE_AVX2)
  if (avx2_available()) return &avx2_table_impl();
#endif
  return nullptr;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_available()) throw std::runtime_error("AVX2 kernels unavailable");
  current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const Table& active() {
  if (active_isa() == Isa::Avx2) {
    if (const Table* t = avx2_table()) return *t;
  }
  return scalar_table();
}

}  // namespace topattr::kernels
