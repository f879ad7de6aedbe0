#include "stochastica/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "stochastica/kernels.hpp"

namespace stochastica {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex g_fftw_mutex;
std::mutex g_matrix_mutex;

// The four boundary-pair maps need six concrete sum forms: the two
// self-inverse I-type maps plus the III-form/II-form pair in each family.
enum class Form { dst1, dct1, dst3_form, dst2_form, dct3_form, dct2_form };

Form form_for(TransformKind kind, Direction dir) {
  const bool fwd = dir == Direction::forward;
  switch (kind) {
    case TransformKind::dst1: return Form::dst1;
    case TransformKind::dct1: return Form::dct1;
    case TransformKind::dst3: return fwd ? Form::dst3_form : Form::dst2_form;
    case TransformKind::dst2: return fwd ? Form::dst2_form : Form::dst3_form;
    case TransformKind::dct3: return fwd ? Form::dct3_form : Form::dct2_form;
    case TransformKind::dct2: return fwd ? Form::dct2_form : Form::dct3_form;
  }
  fail(ErrKind::transform, "unknown transform kind");
}

// Row-major n x n matrix of one sum form, normalization s = sqrt(2/(n-1)).
// Conventions (1-based slots in comments, 0-based indices in code):
//   DST-I : u_k = s * sum_{n=2}^{N-1} u_n sin(pi (k-1)(n-1)/M), endpoints 0.
//   DCT-I : half-weight endpoints (u_1 + (-1)^{k-1} u_N)/2, all N slots.
//   DST-III form: modes (k-1/2); consumes u_N/2 with alternating sign.
//   DST-II form : its inverse map back to points, u_1 = 0 automatically.
//   DCT-III form: modes (k-1/2); consumes u_1/2.
//   DCT-II form : its inverse, u_N = 0 automatically.
std::vector<double> build_matrix(int n, Form form) {
  const int m = n - 1;
  const double s = std::sqrt(2.0 / m);
  const double pi = std::numbers::pi;
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  auto sign = [](int k) { return (k % 2 == 0) ? 1.0 : -1.0; };
  switch (form) {
    case Form::dst1:
      for (int k = 1; k < n - 1; ++k)
        for (int j = 1; j < n - 1; ++j)
          a[k * n + j] = s * std::sin(pi * k * j / m);
      break;
    case Form::dct1:
      for (int k = 0; k < n; ++k) {
        a[k * n] = s * 0.5;
        a[k * n + n - 1] = s * 0.5 * sign(k);
        for (int j = 1; j < n - 1; ++j)
          a[k * n + j] = s * std::cos(pi * k * j / m);
      }
      break;
    case Form::dst3_form:
      for (int k = 0; k < n - 1; ++k) {
        a[k * n + n - 1] = s * 0.5 * sign(k);
        for (int j = 1; j < n - 1; ++j)
          a[k * n + j] = s * std::sin(pi * (k + 0.5) * j / m);
      }
      break;
    case Form::dst2_form:
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n - 1; ++k)
          a[j * n + k] = s * std::sin(pi * (k + 0.5) * j / m);
      break;
    case Form::dct3_form:
      for (int k = 0; k < n - 1; ++k) {
        a[k * n] = s * 0.5;
        for (int j = 1; j < n - 1; ++j)
          a[k * n + j] = s * std::cos(pi * (k + 0.5) * j / m);
      }
      break;
    case Form::dct2_form:
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n - 1; ++k)
          a[j * n + k] = s * std::cos(pi * (k + 0.5) * j / m);
      break;
  }
  return a;
}

std::map<std::tuple<int, int>, std::vector<double>>& matrix_cache() {
  static std::map<std::tuple<int, int>, std::vector<double>> cache;
  return cache;
}

}  // namespace

TransformKind kind_for_pair(BoundaryPair p) {
  validate_pair(p);
  require(!is_periodic(p), ErrKind::transform,
          "periodic boundaries use the FFT path, not a trig transform");
  if (p.lo == 1) return p.hi == 1 ? TransformKind::dst1 : TransformKind::dst3;
  return p.hi == -1 ? TransformKind::dct1 : TransformKind::dct3;
}

const std::vector<double>& trig_matrix(int n, TransformKind kind, Direction dir) {
  require(n >= 3, ErrKind::transform,
          "trig transforms require at least 3 points");
  const Form form = form_for(kind, dir);
  std::lock_guard<std::mutex> lock(g_matrix_mutex);
  auto key = std::make_tuple(n, static_cast<int>(form));
  auto it = matrix_cache().find(key);
  if (it == matrix_cache().end()) {
    it = matrix_cache().emplace(key, build_matrix(n, form)).first;
  }
  return it->second;
}

void trig_transform(const cplx* in, cplx* out, int n, TransformKind kind,
                    Direction dir) {
  const std::vector<double>& m = trig_matrix(n, kind, dir);
  for (int k = 0; k < n; ++k) {
    cplx acc{};
    for (int j = 0; j < n; ++j) acc += m[k * n + j] * in[j];
    out[k] = acc;
  }
}

std::vector<cplx> derivative_array(const Grid& g, int dim, int order,
                                   BoundaryPair pair) {
  require(dim >= 1 && dim < g.dimensions, ErrKind::config,
          "derivative arrays apply to space dimensions only");
  require(order >= 0, ErrKind::config, "derivative order must be >= 0");
  const int n = g.points[dim];
  if (order == 0) return std::vector<cplx>(n, cplx{1.0, 0.0});
  validate_pair(pair);
  std::vector<double> k;
  if (is_periodic(pair)) {
    k = momentum_axis(g, dim, MomentumOrder::propagation_fft);
  } else {
    require(order % 2 == 0, ErrKind::unsupported,
            "odd-order spectral derivatives require periodic boundaries; "
            "use finite differences instead");
    TransformKind kind = kind_for_pair(pair);
    const bool half =
        kind == TransformKind::dst3 || kind == TransformKind::dct3;
    k = momentum_axis(g, dim, MomentumOrder::trig, half);
  }
  std::vector<cplx> out(n);
  for (int j = 0; j < n; ++j) {
    cplx sym{0.0, k[j]};
    cplx val{1.0, 0.0};
    for (int o = 0; o < order; ++o) val *= sym;
    out[j] = val;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Workspace

SpectralWorkspace::~SpectralWorkspace() {
  std::lock_guard<std::mutex> lock(g_fftw_mutex);
  for (auto& [key, plan] : plans_) {
    fftw_destroy_plan(static_cast<fftw_plan>(plan));
  }
}

void* SpectralWorkspace::plan_for(int n, int inner, int sign) {
  std::lock_guard<std::mutex> lock(g_fftw_mutex);
  auto key = std::make_tuple(n, inner, sign);
  auto it = plans_.find(key);
  if (it != plans_.end()) return it->second;
  std::vector<cplx> dummy(static_cast<std::size_t>(n) * inner);
  auto* buf = reinterpret_cast<fftw_complex*>(dummy.data());
  fftw_plan plan =
      fftw_plan_many_dft(1, &n, inner, buf, nullptr, inner, 1, buf, nullptr,
                         inner, 1, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  require(plan != nullptr, ErrKind::transform, "FFT plan creation failed");
  plans_[key] = plan;
  return plan;
}

namespace {

struct DimGeometry {
  int n = 1;      // extent of the transformed dim
  int inner = 1;  // contiguous values per slot (trailing dims x ensemble)
  int outer = 1;  // leading blocks
};

DimGeometry geometry(const std::vector<int>& extents, int nens, int sdim) {
  DimGeometry geo;
  geo.n = extents[sdim];
  geo.inner = nens;
  for (std::size_t e = sdim + 1; e < extents.size(); ++e) geo.inner *= extents[e];
  for (int e = 0; e < sdim; ++e) geo.outer *= extents[e];
  return geo;
}

}  // namespace

void SpectralWorkspace::fft_dim(cplx* block, const std::vector<int>& extents,
                                int nens, int sdim, bool forward) {
  const DimGeometry geo = geometry(extents, nens, sdim);
  auto* plan = static_cast<fftw_plan>(
      plan_for(geo.n, geo.inner, forward ? FFTW_FORWARD : FFTW_BACKWARD));
  for (int o = 0; o < geo.outer; ++o) {
    auto* ptr = reinterpret_cast<fftw_complex*>(
        block + static_cast<std::size_t>(o) * geo.n * geo.inner);
    fftw_execute_dft(plan, ptr, ptr);
  }
  if (!forward) {
    const std::size_t total =
        static_cast<std::size_t>(geo.outer) * geo.n * geo.inner;
    kernels::cmul_const(total, cplx{1.0 / geo.n, 0.0}, block);
  }
}

void SpectralWorkspace::trig_dim(cplx* block, const std::vector<int>& extents,
                                 int nens, int sdim, TransformKind kind,
                                 Direction dir) {
  const DimGeometry geo = geometry(extents, nens, sdim);
  const std::vector<double>& mat = trig_matrix(geo.n, kind, dir);
  thread_local std::vector<cplx> tmp;
  const std::size_t slab = static_cast<std::size_t>(geo.n) * geo.inner;
  tmp.resize(slab);
  for (int o = 0; o < geo.outer; ++o) {
    cplx* base = block + o * slab;
    std::fill(tmp.begin(), tmp.end(), cplx{});
    for (int k = 0; k < geo.n; ++k) {
      auto* dst = reinterpret_cast<double*>(tmp.data() + k * geo.inner);
      for (int j = 0; j < geo.n; ++j) {
        const double mkj = mat[k * geo.n + j];
        if (mkj == 0.0) continue;
        kernels::axpy(2 * static_cast<std::size_t>(geo.inner), mkj,
                      reinterpret_cast<const double*>(base + j * geo.inner), dst);
      }
    }
    std::memcpy(base, tmp.data(), slab * sizeof(cplx));
  }
}

// ---------------------------------------------------------------------------
// Propagator

Propagator build_propagator(const Grid& g, const std::vector<int>& cell_comps,
                            const BoundarySpec& bounds, const LinearOp& lin,
                            double dt_ip) {
  Propagator p;
  p.dt_ip = dt_ip;
  const int ds = g.dimensions - 1;
  const int ncells = static_cast<int>(cell_comps.size());
  p.pairs.resize(ncells);
  for (int c = 0; c < ncells; ++c) {
    p.pairs[c].assign(ds, {});
    for (int sd = 0; sd < ds; ++sd) {
      p.pairs[c][sd].resize(cell_comps[c]);
      for (int f = 0; f < cell_comps[c]; ++f) {
        BoundaryPair pair = bounds.get(c, sd, f);
        validate_pair(pair);
        if (!is_periodic(pair)) {
          require(g.points[sd + 1] >= 3, ErrKind::transform,
                  "non-periodic boundaries require at least 3 points");
        }
        p.pairs[c][sd][f] = pair;
      }
    }
  }
  p.expL.resize(ncells);
  if (!lin) return p;

  // First-derivative symbols per dim slot, then exp(dt_ip * L) per k-point.
  std::vector<int> strides(ds, 1);
  for (int sd = ds - 2; sd >= 0; --sd)
    strides[sd] = strides[sd + 1] * g.points[sd + 2];
  int live = 0;
  for (int c = 0; c < ncells; ++c) {
    for (int f = 0; f < cell_comps[c]; ++f) {
      std::vector<std::vector<cplx>> sym(ds);
      for (int sd = 0; sd < ds; ++sd) {
        BoundaryPair pair = p.pairs[c][sd][f];
        std::vector<double> k;
        if (is_periodic(pair)) {
          k = momentum_axis(g, sd + 1, MomentumOrder::propagation_fft);
        } else {
          TransformKind kind = kind_for_pair(pair);
          const bool half =
              kind == TransformKind::dst3 || kind == TransformKind::dct3;
          k = momentum_axis(g, sd + 1, MomentumOrder::trig, half);
        }
        sym[sd].resize(k.size());
        for (std::size_t j = 0; j < k.size(); ++j) sym[sd][j] = cplx{0.0, k[j]};
      }
      std::vector<cplx> e(g.nspace);
      bool any = false;
      for (int s = 0; s < g.nspace; ++s) {
        LinearPoint pt;
        pt.cell = c;
        pt.comp = f;
        if (ds > 0) pt.Dx = sym[0][(s / strides[0]) % g.points[1]];
        if (ds > 1) pt.Dy = sym[1][(s / strides[1]) % g.points[2]];
        if (ds > 2) pt.Dz = sym[2][(s / strides[2]) % g.points[3]];
        cplx L = lin(pt);
        if (L != cplx{}) any = true;
        e[s] = std::exp(dt_ip * L);
      }
      if (any) {
        p.expL[c].push_back(std::move(e));
        ++live;
      } else {
        p.expL[c].emplace_back();
      }
    }
  }
  p.identity = live == 0;
  return p;
}

void propagate_ip(Fields& a, const Propagator& p, SpectralWorkspace& ws) {
  if (p.identity) return;
  require(a.size() <= p.expL.size(), ErrKind::config,
          "propagator built for fewer cells than the field set");
  for (std::size_t c = 0; c < a.size(); ++c) {
    Field& f = a[c];
    const int ds = static_cast<int>(f.space.size());
    require(ds == static_cast<int>(p.pairs[c].size()), ErrKind::config,
            "field space dimensions do not match the propagator");
    require(f.nf <= static_cast<int>(p.expL[c].size()), ErrKind::config,
            "propagator built for fewer components than the field");
    for (int comp = 0; comp < f.nf; ++comp) {
      const std::vector<cplx>& e = p.expL[c][comp];
      if (e.empty()) continue;  // L = 0: exact identity, skip transforms
      cplx* block = f.comp(comp);
      for (int sd = 0; sd < ds; ++sd) {
        BoundaryPair pair = p.pairs[c][sd][comp];
        if (is_periodic(pair)) {
          ws.fft_dim(block, f.space, f.nens, sd, true);
        } else {
          ws.trig_dim(block, f.space, f.nens, sd, kind_for_pair(pair),
                      Direction::forward);
        }
      }
      for (int s = 0; s < f.nspace; ++s) {
        kernels::cmul_const(f.nens, e[s], block + static_cast<std::size_t>(s) * f.nens);
      }
      for (int sd = ds - 1; sd >= 0; --sd) {
        BoundaryPair pair = p.pairs[c][sd][comp];
        if (is_periodic(pair)) {
          ws.fft_dim(block, f.space, f.nens, sd, false);
        } else {
          ws.trig_dim(block, f.space, f.nens, sd, kind_for_pair(pair),
                      Direction::inverse);
        }
      }
    }
  }
}

void spectral_derivative(Field& f, const Grid& g, const BoundarySpec& bounds,
                         int cell, int sdim, int order, SpectralWorkspace& ws) {
  const int ds = static_cast<int>(f.space.size());
  require(sdim >= 0 && sdim < ds, ErrKind::config,
          "spectral derivative dimension out of range");
  const DimGeometry geo = geometry(f.space, f.nens, sdim);
  for (int comp = 0; comp < f.nf; ++comp) {
    BoundaryPair pair = bounds.get(cell, sdim, comp);
    std::vector<cplx> darr = derivative_array(g, sdim + 1, order, pair);
    cplx* block = f.comp(comp);
    if (is_periodic(pair)) {
      ws.fft_dim(block, f.space, f.nens, sdim, true);
    } else {
      ws.trig_dim(block, f.space, f.nens, sdim, kind_for_pair(pair),
                  Direction::forward);
    }
    for (int o = 0; o < geo.outer; ++o) {
      for (int j = 0; j < geo.n; ++j) {
        kernels::cmul_const(
            geo.inner, darr[j],
            block + (static_cast<std::size_t>(o) * geo.n + j) * geo.inner);
      }
    }
    if (is_periodic(pair)) {
      ws.fft_dim(block, f.space, f.nens, sdim, false);
    } else {
      ws.trig_dim(block, f.space, f.nens, sdim, kind_for_pair(pair),
                  Direction::inverse);
    }
  }
}

Field fourier_output_transform(const Field& f, const Grid& g,
                               const std::vector<char>& space_flags,
                               SpectralWorkspace& ws) {
  Field out = f;
  const int ds = static_cast<int>(out.space.size());
  const double root2pi = std::sqrt(2.0 * std::numbers::pi);
  thread_local std::vector<cplx> tmp;
  for (int sd = 0; sd < ds; ++sd) {
    if (sd >= static_cast<int>(space_flags.size()) || !space_flags[sd]) continue;
    const DimGeometry geo = geometry(out.space, out.nens, sd);
    const int off = centered_zero_index(geo.n);
    const double dk = g.dk_periodic[sd + 1];
    const double fac = g.dx[sd + 1] / root2pi;
    const double origin = g.origins[sd + 1];
    std::vector<cplx> phase(geo.n);
    for (int gi = 0; gi < geo.n; ++gi) {
      const double k = (gi - off) * dk;
      phase[gi] = fac * std::exp(cplx{0.0, -k * origin});
    }
    const std::size_t slab = static_cast<std::size_t>(geo.n) * geo.inner;
    tmp.resize(slab);
    for (int comp = 0; comp < out.nf; ++comp) {
      cplx* block = out.comp(comp);
      ws.fft_dim(block, out.space, out.nens, sd, true);
      for (int o = 0; o < geo.outer; ++o) {
        cplx* base = block + o * slab;
        for (int gi = 0; gi < geo.n; ++gi) {
          const int j = ((gi - off) % geo.n + geo.n) % geo.n;
          std::memcpy(tmp.data() + static_cast<std::size_t>(gi) * geo.inner,
                      base + static_cast<std::size_t>(j) * geo.inner,
                      geo.inner * sizeof(cplx));
          kernels::cmul_const(geo.inner, phase[gi],
                              tmp.data() + static_cast<std::size_t>(gi) * geo.inner);
        }
        std::memcpy(base, tmp.data(), slab * sizeof(cplx));
      }
    }
  }
  return out;
}

void PeriodicKSpace::forward(Field& f) const {
  const int ds = static_cast<int>(f.space.size());
  for (int comp = 0; comp < f.nf; ++comp) {
    for (int sd = 0; sd < ds; ++sd) {
      ws_->fft_dim(f.comp(comp), f.space, f.nens, sd, true);
    }
  }
}

void PeriodicKSpace::inverse(Field& f) const {
  const int ds = static_cast<int>(f.space.size());
  for (int comp = 0; comp < f.nf; ++comp) {
    for (int sd = 0; sd < ds; ++sd) {
      ws_->fft_dim(f.comp(comp), f.space, f.nens, sd, false);
    }
  }
}

}  // namespace stochastica
