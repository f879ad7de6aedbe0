#pragma once
// Hot-loop kernels with scalar reference and AVX2 variants selected at
// runtime.  Both paths compute bit-identical results: the AVX2 code avoids
// FMA contraction and the reductions use a fixed striped accumulation order
// that the scalar reference reproduces, so the ISA choice can never perturb
// simulation output.  Override the dispatch with STOCHASTICA_SIMD=scalar|avx2.

#include <cstddef>

#include "stochastica/core.hpp"

namespace stochastica::kernels {

enum class Isa { scalar, avx2 };

// Active instruction set (resolved on first use from cpuid and the
// STOCHASTICA_SIMD environment variable).
Isa active();

// Force a specific path (tests); throws if unavailable on this host.
void force(Isa isa);

// y[i] += c * x[i] over n doubles.
void axpy(std::size_t n, double c, const double* x, double* y);

// y[i] = a * x[i] + b * y[i] over n doubles.
void axpby(std::size_t n, double a, const double* x, double b, double* y);

// x[i] *= w over n complex values (broadcast complex scale).
void cmul_const(std::size_t n, cplx w, cplx* x);

// out[i] = a[i] * b[i] over n complex values.
void cmul(std::size_t n, const cplx* a, const cplx* b, cplx* out);

// Striped sum of n doubles (fixed 4-way stripe order, ISA-invariant).
double sum(std::size_t n, const double* x);

// Striped sum of n complex values (fixed 2-way stripe order).
cplx csum(std::size_t n, const cplx* x);

namespace detail {
// Scalar reference implementations (exposed for equivalence tests).
void axpy_scalar(std::size_t n, double c, const double* x, double* y);
void axpby_scalar(std::size_t n, double a, const double* x, double b, double* y);
void cmul_const_scalar(std::size_t n, cplx w, cplx* x);
void cmul_scalar(std::size_t n, const cplx* a, const cplx* b, cplx* out);
double sum_scalar(std::size_t n, const double* x);
cplx csum_scalar(std::size_t n, const cplx* x);
#if defined(__x86_64__) || defined(_M_X64)
void axpy_avx2(std::size_t n, double c, const double* x, double* y);
void axpby_avx2(std::size_t n, double a, const double* x, double b, double* y);
void cmul_const_avx2(std::size_t n, cplx w, cplx* x);
void cmul_avx2(std::size_t n, const cplx* a, const cplx* b, cplx* out);
double sum_avx2(std::size_t n, const double* x);
cplx csum_avx2(std::size_t n, const cplx* x);
#endif
}  // namespace detail

}  // namespace stochastica::kernels
