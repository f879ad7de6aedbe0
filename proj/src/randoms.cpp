#include "stochastica/randoms.hpp"

#include <cmath>
#include <numbers>

namespace stochastica {

namespace {

// Philox4x64 round constants (Random123).
constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> philox_block(const std::array<std::uint64_t, 4>& ctr,
                                          const std::array<std::uint64_t, 2>& key) {
  std::array<std::uint64_t, 4> c = ctr;
  std::uint64_t k0 = key[0];
  std::uint64_t k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

void CounterRng::refill() {
  auto out = philox_block(ctr_, key_);
  // Advance the block index; the (step, ctx) words address the call site.
  ++ctr_[0];
  for (int i = 0; i < 4; ++i) {
    buf_[i] = (static_cast<double>(out[i] >> 11) + 0.5) * 0x1.0p-53;
  }
  pos_ = 0;
}

double CounterRng::uniform01() {
  if (pos_ >= 4) refill();
  return buf_[pos_++];
}

double CounterRng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

namespace {

Field make_gaussian_cell(const Grid& grid, int ncomp, int nens, double stddev,
                         CounterRng& rng) {
  Field f(ncomp, grid.space_points(), nens);
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    f.v[i] = cplx{stddev * rng.gaussian(), 0.0};
  }
  return f;
}

Field make_uniform_cell(const Grid& grid, int ncomp, int nens, double scale,
                        CounterRng& rng) {
  Field f(ncomp, grid.space_points(), nens);
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    f.v[i] = cplx{scale * rng.uniform01(), 0.0};
  }
  return f;
}

void apply_kfilter(Field& f, int cell, const Grid& grid, const KFilter& filter,
                   const KSpaceTransform* kspace) {
  if (!filter) return;  // unfiltered k-noise is distributionally plain noise
  require(kspace != nullptr, ErrKind::transform,
          "momentum-space noise filtering requires a transform service");
  kspace->forward(f);
  filter(f, cell, grid);
  kspace->inverse(f);
}

}  // namespace

NoiseSet propagation_noise(const Grid& grid, const NoiseSpec& spec, double dt,
                           int nens, const RngState& rng, std::uint64_t ctx,
                           std::uint64_t step, const KSpaceTransform* kspace) {
  require(dt > 0, ErrKind::config, "propagation noise requires dt > 0");
  CounterRng gen(rng, ctx, step);
  NoiseSet set;
  set.n_gauss = static_cast<int>(spec.noises.size());
  set.n_kgauss = static_cast<int>(spec.knoises.size());
  set.n_uniform = static_cast<int>(spec.unoises.size());
  double gauss_sd = 1.0 / std::sqrt(dt * grid.dV);
  for (int n : spec.noises) {
    set.cells.push_back(make_gaussian_cell(grid, n, nens, gauss_sd, gen));
  }
  for (std::size_t c = 0; c < spec.knoises.size(); ++c) {
    Field f = make_gaussian_cell(grid, spec.knoises[c], nens, gauss_sd, gen);
    apply_kfilter(f, static_cast<int>(c), grid, spec.nfilter, kspace);
    set.cells.push_back(std::move(f));
  }
  for (int n : spec.unoises) {
    set.cells.push_back(make_uniform_cell(grid, n, nens, 1.0 / dt, gen));
  }
  return set;
}

NoiseSet initial_randoms(const Grid& grid, const NoiseSpec& spec, int nens,
                         const RngState& rng, std::uint64_t ctx,
                         const KSpaceTransform* kspace) {
  CounterRng gen(rng, ctx, 0);
  NoiseSet set;
  set.n_gauss = static_cast<int>(spec.inrandoms.size());
  set.n_kgauss = static_cast<int>(spec.krandoms.size());
  set.n_uniform = static_cast<int>(spec.urandoms.size());
  double gauss_sd = 1.0 / std::sqrt(grid.dV);
  for (int n : spec.inrandoms) {
    set.cells.push_back(make_gaussian_cell(grid, n, nens, gauss_sd, gen));
  }
  for (std::size_t c = 0; c < spec.krandoms.size(); ++c) {
    Field f = make_gaussian_cell(grid, spec.krandoms[c], nens, gauss_sd, gen);
    apply_kfilter(f, static_cast<int>(c), grid, spec.rfilter, kspace);
    set.cells.push_back(std::move(f));
  }
  for (int n : spec.urandoms) {
    set.cells.push_back(make_uniform_cell(grid, n, nens, 1.0, gen));
  }
  return set;
}

Field coarsen_gaussian(const Field& fine_a, const Field& fine_b) {
  require(fine_a.same_shape(fine_b), ErrKind::noise,
          "coarsening requires identically shaped noise fields");
  Field out = fine_a;
  for (std::size_t i = 0; i < out.v.size(); ++i) {
    out.v[i] = 0.5 * (fine_a.v[i] + fine_b.v[i]);
  }
  return out;
}

Field coarsen_uniform(const Field& fine_a, const Field& fine_b) {
  require(fine_a.same_shape(fine_b), ErrKind::noise,
          "coarsening requires identically shaped noise fields");
  Field out = fine_a;
  for (std::size_t i = 0; i < out.v.size(); ++i) {
    out.v[i] = cplx{std::min(fine_a.v[i].real(), fine_b.v[i].real()), 0.0};
  }
  return out;
}

NoiseSet coarsen_noise(const NoiseSet& fine_a, const NoiseSet& fine_b) {
  require(fine_a.n_gauss == fine_b.n_gauss &&
              fine_a.n_kgauss == fine_b.n_kgauss &&
              fine_a.n_uniform == fine_b.n_uniform,
          ErrKind::noise, "coarsening requires matching noise-set structure");
  NoiseSet out;
  out.n_gauss = fine_a.n_gauss;
  out.n_kgauss = fine_a.n_kgauss;
  out.n_uniform = fine_a.n_uniform;
  int ng = fine_a.n_gauss + fine_a.n_kgauss;
  for (int c = 0; c < ng; ++c) {
    out.cells.push_back(coarsen_gaussian(fine_a.cells[c], fine_b.cells[c]));
  }
  for (int c = ng; c < ng + fine_a.n_uniform; ++c) {
    out.cells.push_back(coarsen_uniform(fine_a.cells[c], fine_b.cells[c]));
  }
  return out;
}

}  // namespace stochastica
