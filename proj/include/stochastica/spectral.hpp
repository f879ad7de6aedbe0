#pragma once
// Interaction-picture spectral machinery: derivative arrays over the momentum
// lattice, the four trigonometric transform maps implementing non-periodic
// boundary pairs, the FFT path for periodic boundaries, the linear propagator
// exp(dt_ip * L), and physics-normalized output transforms.

#include <functional>
#include <map>
#include <tuple>
#include <vector>

#include "stochastica/boundaries.hpp"
#include "stochastica/core.hpp"
#include "stochastica/lattice.hpp"
#include "stochastica/randoms.hpp"

namespace stochastica {

enum class TransformKind { dst1, dct1, dst2, dst3, dct2, dct3 };
enum class Direction { forward, inverse };

// Transform kind implementing a non-periodic boundary pair:
// Dirichlet-Dirichlet -> DST-I, Robin-Robin -> DCT-I,
// Dirichlet-Robin -> DST-III, Robin-Dirichlet -> DCT-III.
TransformKind kind_for_pair(BoundaryPair p);

// Dense N x N row-major matrix of the requested transform; forward and
// inverse matrices compose to the identity on the kind's boundary-compatible
// subspace.  Cached; the reference is stable for the process lifetime.
const std::vector<double>& trig_matrix(int n, TransformKind kind, Direction dir);

// 1-D transform of a complex vector at unit stride (out may not alias in).
void trig_transform(const cplx* in, cplx* out, int n, TransformKind kind,
                    Direction dir);

// Momentum-space derivative coefficients (i k)^order along `dim` (>= 1), in
// the dim's native transform ordering.  Non-periodic pairs require even
// order; order 0 gives the all-ones identity array.
std::vector<cplx> derivative_array(const Grid& g, int dim, int order,
                                   BoundaryPair pair);

// One momentum-lattice point handed to a linear-operator callback; Dx, Dy,
// Dz are the first-derivative symbols for the first three space dimensions
// (combine only even powers under non-periodic boundaries).
struct LinearPoint {
  int cell = 0;
  int comp = 0;
  cplx Dx{}, Dy{}, Dz{};
};
using LinearOp = std::function<cplx(const LinearPoint&)>;

// FFT plan / transform-matrix cache.  Transforms on distinct data blocks are
// safe to run concurrently; the internal caches are mutex-guarded.
class SpectralWorkspace {
 public:
  SpectralWorkspace() = default;
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  // In-place complex DFT along space dim `sdim` (0-based among space dims)
  // of one component block laid out [space...][ens].  Forward is the
  // unnormalized e^{-ikx} sum; inverse applies the 1/N factor.
  void fft_dim(cplx* block, const std::vector<int>& extents, int nens,
               int sdim, bool forward);

  // Same geometry through a dense trig-transform matrix.
  void trig_dim(cplx* block, const std::vector<int>& extents, int nens,
                int sdim, TransformKind kind, Direction dir);

 private:
  void* plan_for(int n, int inner, int sign);
  std::map<std::tuple<int, int, int>, void*> plans_;
};

// The linear propagator exp(dt_ip * L(k)) with per-axis transform kinds.
struct Propagator {
  double dt_ip = 0;
  bool identity = true;
  // exp(dt_ip * L) per [cell][comp] over the space lattice; an empty inner
  // vector marks a component with L = 0 (skipped entirely).
  std::vector<std::vector<std::vector<cplx>>> expL;
  std::vector<std::vector<std::vector<BoundaryPair>>> pairs;  // [cell][sdim][comp]
};

// Build exp(dt_ip * L) for every cell component; `cell_comps` lists the
// component count per cell; a null `lin` yields the identity propagator.
Propagator build_propagator(const Grid& g, const std::vector<int>& cell_comps,
                            const BoundarySpec& bounds, const LinearOp& lin,
                            double dt_ip);

// Apply the propagator: per component, forward transform along each space
// dimension with its kind, multiply by exp(dt_ip*L), inverse transform.
// Dirichlet/Robin boundary re-imposition is the caller's step logic.
void propagate_ip(Fields& a, const Propagator& p, SpectralWorkspace& ws);

// Spectral derivative of even (or periodic any) order along one space dim.
void spectral_derivative(Field& f, const Grid& g, const BoundarySpec& bounds,
                         int cell, int sdim, int order, SpectralWorkspace& ws);

// Transform flagged space dims of a field to graphics-centered momentum
// space with the physics normalization dx/sqrt(2*pi) per dim and the origin
// phase e^{-i k O}.
Field fourier_output_transform(const Field& f, const Grid& g,
                               const std::vector<char>& space_flags,
                               SpectralWorkspace& ws);

// Periodic full-space transform service for momentum-filtered noise
// (forward unnormalized, inverse 1/N per dim).
class PeriodicKSpace final : public KSpaceTransform {
 public:
  PeriodicKSpace(const Grid& g, SpectralWorkspace& ws) : g_(&g), ws_(&ws) {}
  void forward(Field& f) const override;
  void inverse(Field& f) const override;

 private:
  const Grid* g_;
  SpectralWorkspace* ws_;
};

}  // namespace stochastica
