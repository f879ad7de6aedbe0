#pragma once
// Counter-based random generation (Philox4x64-10) plus the lattice-scaled
// noise and initial-random fields, momentum filtering hooks, and the
// fine/coarse consistency rules used by error checking.
//
// Every draw is addressed by (seed, stream, context, step, block), so noise
// sequences are reproducible bit-for-bit regardless of scheduling, and each
// high-level ensemble member owns an independent stream.

#include <array>
#include <cstdint>
#include <functional>

#include "stochastica/core.hpp"
#include "stochastica/lattice.hpp"

namespace stochastica {

struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // flat serial x parallel sub-ensemble index
};

// The Philox4x64-10 block function (Random123 constants, numpy-compatible).
std::array<std::uint64_t, 4> philox_block(const std::array<std::uint64_t, 4>& ctr,
                                          const std::array<std::uint64_t, 2>& key);

// Draw contexts: disjoint counter namespaces per purpose and sequence index.
inline std::uint64_t rng_context(int sequence, int purpose) {
  return (static_cast<std::uint64_t>(sequence) << 8) | static_cast<std::uint64_t>(purpose);
}
inline constexpr int kCtxPropagation = 0;
inline constexpr int kCtxInitial = 1;
inline constexpr int kCtxBoundary = 2;

// Buffered counter-addressed generator for one (state, context, step) cell.
class CounterRng {
 public:
  CounterRng(const RngState& s, std::uint64_t ctx, std::uint64_t step)
      : key_{s.seed, s.stream}, ctr_{0, step, ctx, 0} {}

  // Uniform on (0,1): ((word >> 11) + 0.5) * 2^-53; never exactly 0 or 1.
  double uniform01();
  // Standard normal via Box-Muller on a pair of uniforms.
  double gaussian();

 private:
  void refill();
  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> ctr_;
  std::array<double, 4> buf_{};
  int pos_ = 4;
  double spare_ = 0;
  bool have_spare_ = false;
};

// Momentum-space transform service injected by the spectral module so that
// k-noise filtering does not pull FFT machinery into this module.
struct KSpaceTransform {
  virtual ~KSpaceTransform() = default;
  virtual void forward(Field& f) const = 0;   // x -> k (all spatial dims)
  virtual void inverse(Field& f) const = 0;   // k -> x
};

// Filter callback applied to one k-space noise cell in place.
using KFilter = std::function<void(Field& kcell, int cell, const Grid&)>;

struct NoiseSpec {
  std::vector<int> noises;     // per-cell x-space Gaussian dimensions
  std::vector<int> knoises;    // per-cell filtered momentum-space dimensions
  std::vector<int> unoises;    // per-cell uniform jump dimensions
  std::vector<int> inrandoms;  // initial-field analogues
  std::vector<int> krandoms;
  std::vector<int> urandoms;
  KFilter nfilter;             // propagation k-noise filter
  KFilter rfilter;             // initial k-random filter

  int total_prop_cells() const {
    return static_cast<int>(noises.size() + knoises.size() + unoises.size());
  }
};

// A generated noise set: cells concatenated [noises..., knoises..., unoises...]
// (or the initial analogues), with the counts recorded for coarsening rules.
struct NoiseSet {
  Fields cells;
  int n_gauss = 0;  // leading cells with Gaussian statistics (x-space)
  int n_kgauss = 0; // then momentum-filtered Gaussian cells
  int n_uniform = 0;
};

// Propagation noises for one computational step of size dt: x-space Gaussians
// of variance 1/(dt*dV), filtered k-space Gaussians, uniforms on [0, 1/dt].
NoiseSet propagation_noise(const Grid& grid, const NoiseSpec& spec, double dt,
                           int nens, const RngState& rng, std::uint64_t ctx,
                           std::uint64_t step, const KSpaceTransform* kspace);

// Initial random fields: variance 1/dV Gaussians (unit when d=1), rfilter on
// krandoms, uniforms on [0,1].
NoiseSet initial_randoms(const Grid& grid, const NoiseSpec& spec, int nens,
                         const RngState& rng, std::uint64_t ctx,
                         const KSpaceTransform* kspace);

// Element-wise average of two fine Gaussian noise fields (correct coarse
// variance 1/(2 dt_fine dV)).
Field coarsen_gaussian(const Field& fine_a, const Field& fine_b);

// Element-wise minimum of two fine uniform jump noises (a jump in either fine
// step occurs in the coarse step).
Field coarsen_uniform(const Field& fine_a, const Field& fine_b);

// Apply the per-cell coarsening rules across a whole noise set.
NoiseSet coarsen_noise(const NoiseSet& fine_a, const NoiseSet& fine_b);

}  // namespace stochastica
