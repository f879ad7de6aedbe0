#pragma once
// Core value types shared by every module: the complex scalar, the per-cell
// field container, and the error taxonomy.

#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace stochastica {

using cplx = std::complex<double>;

inline constexpr cplx I{0.0, 1.0};

// ---------------------------------------------------------------------------
// Errors

enum class ErrKind {
  config,        // invalid parameter combination
  noise,         // noise-generation failure (filter shape mismatch, ...)
  transform,     // transform size/kind failure
  unsupported,   // operation outside the supported surface
  divergence,    // non-finite fields during integration
  projection,    // manifold projection failed to converge
  degenerate,    // degenerate ensemble (all weights culled, ...)
  io,            // file read/write failure
  checksum,      // result-file integrity failure
};

class SimError : public std::runtime_error {
 public:
  SimError(ErrKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrKind kind() const { return kind_; }

 private:
  ErrKind kind_;
};

[[noreturn]] inline void fail(ErrKind k, const std::string& msg) {
  throw SimError(k, msg);
}

inline void require(bool ok, ErrKind k, const std::string& msg) {
  if (!ok) fail(k, msg);
}

// ---------------------------------------------------------------------------
// Field: one cell of components over a spatial lattice and a vector ensemble.
//
// Layout is [component][space...][ensemble] with the ensemble index fastest,
// so elementwise kernels and reductions run over contiguous memory.  Spatial
// dims are stored row-major in the order x, y, z (time is never a Field dim).

struct Field {
  int nf = 1;                // number of components
  std::vector<int> space;    // spatial point counts; empty for pure SDEs
  int nspace = 1;            // product of space
  int nens = 1;              // vector-ensemble size
  std::vector<cplx> v;

  Field() = default;
  Field(int nf_, std::vector<int> space_, int nens_)
      : nf(nf_), space(std::move(space_)), nens(nens_) {
    nspace = 1;
    for (int n : space) nspace *= n;
    v.assign(static_cast<std::size_t>(nf) * nspace * nens, cplx{});
  }

  std::size_t size() const { return v.size(); }
  std::size_t comp_size() const { return static_cast<std::size_t>(nspace) * nens; }

  cplx* comp(int f) { return v.data() + comp_size() * f; }
  const cplx* comp(int f) const { return v.data() + comp_size() * f; }

  cplx& at(int f, int s, int e) { return v[(static_cast<std::size_t>(f) * nspace + s) * nens + e]; }
  const cplx& at(int f, int s, int e) const {
    return v[(static_cast<std::size_t>(f) * nspace + s) * nens + e];
  }

  bool same_shape(const Field& o) const {
    return nf == o.nf && space == o.space && nens == o.nens;
  }
};

using Fields = std::vector<Field>;

inline bool all_finite(const Field& f) {
  for (const cplx& z : f.v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

}  // namespace stochastica
