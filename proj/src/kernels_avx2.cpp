// AVX2 kernel variants.  Compiled with -mavx2 but not -mfma and with FP
// contraction off, so every lane performs exactly the scalar reference's
// multiply-then-add sequence and results are bit-identical to it.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "stochastica/kernels.hpp"

namespace stochastica::kernels::detail {

void axpy_avx2(std::size_t n, double c, const double* x, double* y) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    __m256d vx = _mm256_loadu_pd(x + i);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(vc, vx));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += c * x[i];
}

void axpby_avx2(std::size_t n, double a, const double* x, double b, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    __m256d vy = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(vx, vy));
  }
  for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

namespace {

// One complex-multiply step on packed [re0, im0, re1, im1] data:
// out = a * b elementwise over two complex values.
inline __m256d cmul_pd(__m256d a, __m256d b) {
  __m256d re = _mm256_movedup_pd(a);           // [ar0, ar0, ar1, ar1]
  __m256d im = _mm256_permute_pd(a, 0xF);      // [ai0, ai0, ai1, ai1]
  __m256d bs = _mm256_permute_pd(b, 0x5);      // [bi0, br0, bi1, br1]
  __m256d t0 = _mm256_mul_pd(re, b);           // [ar*br, ar*bi, ...]
  __m256d t1 = _mm256_mul_pd(im, bs);          // [ai*bi, ai*br, ...]
  return _mm256_addsub_pd(t0, t1);             // [ar*br - ai*bi, ar*bi + ai*br]
}

}  // namespace

void cmul_const_avx2(std::size_t n, cplx w, cplx* x) {
  double* p = reinterpret_cast<double*>(x);
  const __m256d vw = _mm256_setr_pd(w.real(), w.imag(), w.real(), w.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(p + 2 * i);
    _mm256_storeu_pd(p + 2 * i, cmul_pd(va, vw));
  }
  if (i < n) {
    const double ar = p[2 * i], ai = p[2 * i + 1];
    p[2 * i] = ar * w.real() - ai * w.imag();
    p[2 * i + 1] = ar * w.imag() + ai * w.real();
  }
}

void cmul_avx2(std::size_t n, const cplx* a, const cplx* b, cplx* out) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* po = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    _mm256_storeu_pd(po + 2 * i, cmul_pd(va, vb));
  }
  if (i < n) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    po[2 * i] = ar * br - ai * bi;
    po[2 * i + 1] = ar * bi + ai * br;
  }
}

double sum_avx2(std::size_t n, const double* x) {
  __m256d vacc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vacc = _mm256_add_pd(vacc, _mm256_loadu_pd(x + i));
  alignas(32) double acc[4];
  _mm256_store_pd(acc, vacc);
  for (; i < n; ++i) acc[i & 3] += x[i];
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

cplx csum_avx2(std::size_t n, const cplx* x) {
  const double* p = reinterpret_cast<const double*>(x);
  __m256d vacc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vacc = _mm256_add_pd(vacc, _mm256_loadu_pd(p + 2 * i));
  alignas(32) double acc[4];
  _mm256_store_pd(acc, vacc);
  if (i < n) {
    acc[0] += p[2 * i];
    acc[1] += p[2 * i + 1];
  }
  return {acc[0] + acc[2], acc[1] + acc[3]};
}

}  // namespace stochastica::kernels::detail

#endif  // x86_64
