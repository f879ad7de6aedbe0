#include <cstdlib>
#include <cstring>

#include "stochastica/kernels.hpp"

namespace stochastica::kernels {
namespace detail {

void axpy_scalar(std::size_t n, double c, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += c * x[i];
}

void axpby_scalar(std::size_t n, double a, const double* x, double b, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void cmul_const_scalar(std::size_t n, cplx w, cplx* x) {
  const double wr = w.real(), wi = w.imag();
  double* p = reinterpret_cast<double*>(x);
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = p[2 * i], ai = p[2 * i + 1];
    p[2 * i] = ar * wr - ai * wi;
    p[2 * i + 1] = ar * wi + ai * wr;
  }
}

void cmul_scalar(std::size_t n, const cplx* a, const cplx* b, cplx* out) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* po = reinterpret_cast<double*>(out);
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    po[2 * i] = ar * br - ai * bi;
    po[2 * i + 1] = ar * bi + ai * br;
  }
}

// Fixed 4-way striped order; the AVX2 path performs the same additions in the
// same order lane-by-lane, so results are bit-identical.
double sum_scalar(std::size_t n, const double* x) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i & 3] += x[i];
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

cplx csum_scalar(std::size_t n, const cplx* x) {
  const double* p = reinterpret_cast<const double*>(x);
  double acc[4] = {0.0, 0.0, 0.0, 0.0};  // [re0, im0, re1, im1] stripes
  for (std::size_t i = 0; i < n; ++i) {
    acc[2 * (i & 1)] += p[2 * i];
    acc[2 * (i & 1) + 1] += p[2 * i + 1];
  }
  return {acc[0] + acc[2], acc[1] + acc[3]};
}

}  // namespace detail

namespace {

bool host_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa resolve() {
  if (const char* env = std::getenv("STOCHASTICA_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0) {
      require(host_has_avx2(), ErrKind::config,
              "STOCHASTICA_SIMD=avx2 requested but the host lacks AVX2");
      return Isa::avx2;
    }
    fail(ErrKind::config, std::string("unknown STOCHASTICA_SIMD value: ") + env);
  }
  return host_has_avx2() ? Isa::avx2 : Isa::scalar;
}

Isa g_isa = resolve();

}  // namespace

Isa active() { return g_isa; }

void force(Isa isa) {
  if (isa == Isa::avx2)
    require(host_has_avx2(), ErrKind::config, "AVX2 unavailable on this host");
  g_isa = isa;
}

#if defined(__x86_64__) || defined(_M_X64)
#define STOCHASTICA_DISPATCH(fn, ...) \
  return g_isa == Isa::avx2 ? detail::fn##_avx2(__VA_ARGS__) : detail::fn##_scalar(__VA_ARGS__)
#else
#define STOCHASTICA_DISPATCH(fn, ...) return detail::fn##_scalar(__VA_ARGS__)
#endif

void axpy(std::size_t n, double c, const double* x, double* y) {
  STOCHASTICA_DISPATCH(axpy, n, c, x, y);
}
void axpby(std::size_t n, double a, const double* x, double b, double* y) {
  STOCHASTICA_DISPATCH(axpby, n, a, x, b, y);
}
void cmul_const(std::size_t n, cplx w, cplx* x) {
  STOCHASTICA_DISPATCH(cmul_const, n, w, x);
}
void cmul(std::size_t n, const cplx* a, const cplx* b, cplx* out) {
  STOCHASTICA_DISPATCH(cmul, n, a, b, out);
}
double sum(std::size_t n, const double* x) { STOCHASTICA_DISPATCH(sum, n, x); }
cplx csum(std::size_t n, const cplx* x) { STOCHASTICA_DISPATCH(csum, n, x); }

#undef STOCHASTICA_DISPATCH

}  // namespace stochastica::kernels
