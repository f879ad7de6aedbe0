#include "stochastica/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "stochastica/kernels.hpp"

namespace stochastica {

namespace {

// Row-major strides of a space-extent vector (last dimension fastest).
std::vector<long> space_strides(const std::vector<int>& ext) {
  std::vector<long> s(ext.size(), 1);
  for (int d = static_cast<int>(ext.size()) - 2; d >= 0; --d)
    s[d] = s[d + 1] * ext[d + 1];
  return s;
}

void advance_odometer(std::vector<int>& idx, const std::vector<int>& ext) {
  for (int d = static_cast<int>(ext.size()) - 1; d >= 0; --d) {
    if (++idx[d] < ext[d]) return;
    idx[d] = 0;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Space integrals and averages

Field integrate(const Field& o, const std::vector<double>& measure,
                const Grid& g, const IntegrationBounds* bounds,
                const std::vector<char>* periodic) {
  const int d = g.dimensions;
  require(static_cast<int>(measure.size()) == d, ErrKind::config,
          "integration measure length must equal the grid dimension count");
  const int ds = d - 1;
  require(static_cast<int>(o.space.size()) == ds, ErrKind::config,
          "field space rank does not match the grid");
  if (bounds)
    require(static_cast<int>(bounds->range.size()) == d, ErrKind::config,
            "integration bounds length must equal the grid dimension count");

  std::vector<std::vector<double>> w(ds);  // empty = dimension not integrated
  std::vector<int> out_space(o.space);
  for (int sd = 0; sd < ds; ++sd) {
    if (measure[sd + 1] <= 0) continue;
    const int n = g.points[sd + 1];
    require(o.space[sd] == n, ErrKind::config,
            "integrated dimension must hold the full grid point count");
    const bool per = periodic && sd + 1 < static_cast<int>(periodic->size()) &&
                     (*periodic)[sd + 1];
    int i0 = 0, i1 = n - 1;
    if (bounds && bounds->range[sd + 1][0] <= bounds->range[sd + 1][1]) {
      const double lo = bounds->range[sd + 1][0];
      const double hi = bounds->range[sd + 1][1];
      const double tol =
          1e-12 * (std::abs(lo) + std::abs(hi) + std::abs(g.ranges[sd + 1]));
      i0 = n;
      i1 = -1;
      for (int i = 0; i < n; ++i) {
        const double x = g.r[sd + 1][i];
        if (x >= lo - tol && x <= hi + tol) {
          i0 = std::min(i0, i);
          i1 = i;
        }
      }
      require(i0 <= i1, ErrKind::config,
              "integration bounds exclude every grid point");
    }
    std::vector<double> wd(n, 0.0);
    for (int i = i0; i <= i1; ++i) wd[i] = measure[sd + 1];
    const bool closed_loop = per && i0 == 0 && i1 == n - 1;
    if (!closed_loop && i0 != i1) {
      wd[i0] *= 0.5;
      wd[i1] *= 0.5;
    }
    w[sd] = std::move(wd);
    out_space[sd] = 1;
  }

  Field out(o.nf, out_space, o.nens);
  const std::vector<long> ostr = space_strides(out_space);
  const long E2 = 2L * o.nens;
  std::vector<int> idx(ds, 0);
  for (int f = 0; f < o.nf; ++f) {
    std::fill(idx.begin(), idx.end(), 0);
    const cplx* src = o.comp(f);
    cplx* dst = out.comp(f);
    for (int s = 0; s < o.nspace; ++s, advance_odometer(idx, o.space)) {
      double wt = 1.0;
      long so = 0;
      for (int sd = 0; sd < ds; ++sd) {
        if (w[sd].empty())
          so += idx[sd] * ostr[sd];
        else
          wt *= w[sd][idx[sd]];
      }
      if (wt == 0.0) continue;
      kernels::axpy(E2, wt,
                    reinterpret_cast<const double*>(src + static_cast<long>(s) * o.nens),
                    reinterpret_cast<double*>(dst + so * o.nens));
    }
  }
  return out;
}

Field grid_average(const Field& o, const std::vector<double>& flags,
                   const Grid&) {
  const int ds = static_cast<int>(o.space.size());
  std::vector<char> sel(ds, 0);
  long count = 1;
  for (int sd = 0; sd < ds; ++sd) {
    const bool on = flags.empty() ||
                    (sd + 1 < static_cast<int>(flags.size()) && flags[sd + 1] > 0);
    if (on) {
      sel[sd] = 1;
      count *= o.space[sd];
    }
  }
  std::vector<int> out_space(o.space);
  for (int sd = 0; sd < ds; ++sd)
    if (sel[sd]) out_space[sd] = 1;

  Field out(o.nf, out_space, o.nens);
  const std::vector<long> ostr = space_strides(out_space);
  const double inv = 1.0 / static_cast<double>(count);
  const long E2 = 2L * o.nens;
  std::vector<int> idx(ds, 0);
  for (int f = 0; f < o.nf; ++f) {
    std::fill(idx.begin(), idx.end(), 0);
    const cplx* src = o.comp(f);
    cplx* dst = out.comp(f);
    for (int s = 0; s < o.nspace; ++s, advance_odometer(idx, o.space)) {
      long so = 0;
      for (int sd = 0; sd < ds; ++sd)
        if (!sel[sd]) so += idx[sd] * ostr[sd];
      kernels::axpy(E2, inv,
                    reinterpret_cast<const double*>(src + static_cast<long>(s) * o.nens),
                    reinterpret_cast<double*>(dst + so * o.nens));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Probability binning

Field bin_probability(const Field& samples,
                      const std::vector<std::vector<double>>& binranges,
                      std::vector<std::vector<double>>* kept_centers) {
  struct Var {
    int line;
    double c0, width;
    int nb;
  };
  const int nv = std::min<int>(samples.nf, static_cast<int>(binranges.size()));
  std::vector<Var> kept;
  for (int v = 0; v < nv; ++v) {
    const auto& c = binranges[v];
    if (c.empty()) continue;  // marginalized variable
    require(c.size() >= 2, ErrKind::config,
            "a binned variable needs at least two bin centers");
    const double width = c[1] - c[0];
    require(width > 0, ErrKind::config, "bin centers must increase");
    for (std::size_t i = 2; i < c.size(); ++i)
      require(std::abs((c[i] - c[i - 1]) - width) <=
                  1e-9 * std::max(1.0, std::abs(width)),
              ErrKind::config, "bin widths must be uniform");
    kept.push_back({v, c[0], width, static_cast<int>(c.size())});
  }
  require(!kept.empty(), ErrKind::config,
          "probability binning needs at least one non-empty bin range");

  long nbins = 1;
  double wprod = 1.0;
  for (const Var& kv : kept) {
    nbins *= kv.nb;
    wprod *= kv.width;
  }
  Field out(static_cast<int>(nbins), samples.space, 1);
  const double weight = 1.0 / (wprod * samples.nens);
  for (int s = 0; s < samples.nspace; ++s) {
    for (int e = 0; e < samples.nens; ++e) {
      long flat = 0, stride = 1;
      bool inside = true;
      for (const Var& kv : kept) {  // first kept variable varies fastest
        const double val = samples.at(kv.line, s, e).real();
        const double pos = (val - kv.c0) / kv.width;
        if (!(pos > -1.0 && pos < kv.nb)) {
          inside = false;
          break;
        }
        const long j = std::lround(pos);
        if (j < 0 || j >= kv.nb ||
            !(std::abs(val - (kv.c0 + j * kv.width)) < kv.width / 2)) {
          inside = false;
          break;
        }
        flat += j * stride;
        stride *= kv.nb;
      }
      if (inside) out.at(static_cast<int>(flat), s, 0) += weight;
    }
  }
  if (kept_centers) {
    kept_centers->clear();
    for (const Var& kv : kept) kept_centers->push_back(binranges[kv.line]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Step-averaged series and temporal spectra

std::vector<Field> spectral_field_average(const std::vector<Field>& pts,
                                          bool check_pass) {
  const std::size_t L = pts.size();
  require(L >= 2, ErrKind::config,
          "step averaging needs at least two samples");
  for (const Field& p : pts)
    require(p.same_shape(pts[0]), ErrKind::config,
            "step averaging needs samples of one shape");
  std::vector<Field> out;
  const std::size_t n = pts[0].size();
  if (!check_pass) {
    out.reserve(L - 1);
    for (std::size_t j = 0; j + 1 < L; ++j) {
      Field m = pts[j];
      kernels::axpby(2 * n, 0.5, reinterpret_cast<const double*>(pts[j + 1].v.data()),
                     0.5, reinterpret_cast<double*>(m.v.data()));
      out.push_back(std::move(m));
    }
    return out;
  }
  require(L % 2 == 1, ErrKind::config,
          "check-pass averaging needs an odd sample count");
  out.reserve((L - 1) / 2);
  for (std::size_t j = 0; j + 2 < L; j += 2) {
    Field m = pts[j];
    kernels::axpby(2 * n, 2.0, reinterpret_cast<const double*>(pts[j + 1].v.data()),
                   1.0, reinterpret_cast<double*>(m.v.data()));
    kernels::axpby(2 * n, 1.0, reinterpret_cast<const double*>(pts[j + 2].v.data()),
                   1.0, reinterpret_cast<double*>(m.v.data()));
    kernels::cmul_const(n, cplx{0.25, 0.0}, m.v.data());
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<double> spectrum_axis(double h, int pad_len, int n_keep) {
  require(h > 0 && pad_len >= 1 && n_keep >= 1 && n_keep <= pad_len,
          ErrKind::config, "invalid spectrum geometry");
  const double dw = 2.0 * std::numbers::pi / (pad_len * h);
  const int off = centered_zero_index(n_keep);
  std::vector<double> w(n_keep);
  for (int gi = 0; gi < n_keep; ++gi) w[gi] = (gi - off) * dw;
  return w;
}

std::vector<Field> time_spectrum(const std::vector<Field>& midpts, double t0,
                                 double h, int pad_len, int n_keep,
                                 SpectralWorkspace& ws) {
  const int L = static_cast<int>(midpts.size());
  require(L >= 1, ErrKind::config, "temporal spectra need at least one sample");
  require(h > 0 && pad_len >= L && n_keep >= 1 && n_keep <= pad_len,
          ErrKind::config, "invalid spectrum geometry");
  for (const Field& p : midpts)
    require(p.same_shape(midpts[0]), ErrKind::config,
            "temporal spectra need samples of one shape");
  const std::size_t elems = midpts[0].size();

  // Conjugate trick: the workspace forward FFT is the e^{-i...} sum, so
  // transforming the conjugated series and conjugating back yields the
  // e^{+iwt} convention.
  std::vector<cplx> buf(static_cast<std::size_t>(pad_len) * elems, cplx{});
  for (int j = 0; j < L; ++j) {
    const cplx* src = midpts[j].v.data();
    cplx* dst = buf.data() + static_cast<std::size_t>(j) * elems;
    for (std::size_t q = 0; q < elems; ++q) dst[q] = std::conj(src[q]);
  }
  ws.fft_dim(buf.data(), {pad_len}, static_cast<int>(elems), 0, true);

  const double dw = 2.0 * std::numbers::pi / (pad_len * h);
  const double fac = h / std::sqrt(2.0 * std::numbers::pi);
  const int off = centered_zero_index(n_keep);
  std::vector<Field> out;
  out.reserve(n_keep);
  for (int gi = 0; gi < n_keep; ++gi) {
    const int m = gi - off;
    const int bin = ((m % pad_len) + pad_len) % pad_len;
    const double omega = m * dw;
    const cplx phase = fac * std::exp(cplx{0.0, omega * (t0 + h / 2)});
    Field f = midpts[0];
    const cplx* src = buf.data() + static_cast<std::size_t>(bin) * elems;
    for (std::size_t q = 0; q < elems; ++q) f.v[q] = phase * std::conj(src[q]);
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Graph evaluation

namespace {

Field ensemble_mean(const Field& o) {
  Field m(o.nf, o.space, 1);
  const long E = o.nens;
  for (int f = 0; f < o.nf; ++f)
    for (int s = 0; s < o.nspace; ++s)
      m.at(f, s, 0) = kernels::csum(E, &o.at(f, s, 0)) / static_cast<double>(E);
  return m;
}

Field ensemble_slice(const Field& o, int n) {
  Field sc(o.nf, o.space, n);
  for (int f = 0; f < o.nf; ++f)
    for (int s = 0; s < o.nspace; ++s)
      std::memcpy(&sc.at(f, s, 0), &o.at(f, s, 0), n * sizeof(cplx));
  return sc;
}

}  // namespace

std::vector<GraphResult> evaluate_observables(
    const TrajectorySeries& series, const std::vector<ObserveSpec>& specs,
    const Grid& g, SpectralWorkspace& ws) {
  const int N = series.stored_points;
  const std::size_t L = series.t.size();
  require(L >= 1 && series.cells.size() == L, ErrKind::config,
          "trajectory series times and samples must align");
  if (series.midpoint)
    require(N >= 2 && series.steps >= 1 &&
                static_cast<int>(L) == (N - 1) * series.steps,
            ErrKind::config,
            "midpoint series length must be (stored_points-1)*steps");
  else
    require(static_cast<int>(L) == N, ErrKind::config,
            "stored series length must equal stored_points");
  const std::size_t ncells = series.cells[0].size();
  require(ncells >= 1, ErrKind::config, "trajectory series has no field cells");
  const int E = series.cells[0][0].nens;

  // Stored-grid view of the series: a midpoint series maps stored point 0 to
  // the first midpoint and stored point j to the midpoint of the last fine
  // step before t_j.
  std::vector<std::size_t> stored_ix;
  std::vector<double> stored_t;
  if (series.midpoint) {
    const double dt = series.h * series.steps;
    stored_ix.push_back(0);
    stored_t.push_back(series.t0);
    for (int j = 1; j < N; ++j) {
      stored_ix.push_back(static_cast<std::size_t>(j) * series.steps - 1);
      stored_t.push_back(series.t0 + j * dt);
    }
  } else {
    for (std::size_t j = 0; j < L; ++j) stored_ix.push_back(j);
    stored_t = series.t;
  }

  // Temporal spectra of every cell, built once and shared across graphs.
  std::vector<std::vector<Field>> spec_cells;
  std::vector<double> omega;
  const auto build_spectra = [&] {
    if (!spec_cells.empty()) return;
    require(series.midpoint, ErrKind::config,
            "temporal spectra require a midpoint-averaged series");
    const int pad = N * series.steps;
    omega = spectrum_axis(series.h, pad, N);
    spec_cells.resize(ncells);
    std::vector<Field> one;
    for (std::size_t c = 0; c < ncells; ++c) {
      one.clear();
      one.reserve(L);
      for (std::size_t j = 0; j < L; ++j) one.push_back(series.cells[j][c]);
      spec_cells[c] = time_spectrum(one, series.t0, series.h, pad, N, ws);
    }
  };

  std::vector<GraphResult> results;
  results.reserve(specs.size());
  for (const ObserveSpec& spec : specs) {
    GraphResult r;
    r.spectral = !spec.transforms.empty() && spec.transforms[0] != 0;
    std::vector<char> sflags;
    bool any_space = false;
    for (std::size_t dd = 1; dd < spec.transforms.size(); ++dd) {
      sflags.push_back(spec.transforms[dd] != 0);
      any_space = any_space || spec.transforms[dd] != 0;
    }

    std::size_t npts;
    if (r.spectral) {
      build_spectra();
      npts = static_cast<std::size_t>(N);
      r.axis = omega;
    } else {
      npts = stored_ix.size();
      r.axis = stored_t;
    }

    Fields cells(ncells);
    for (std::size_t j = 0; j < npts; ++j) {
      for (std::size_t c = 0; c < ncells; ++c)
        cells[c] = r.spectral ? spec_cells[c][j] : series.cells[stored_ix[j]][c];
      if (any_space)
        for (Field& cell : cells)
          cell = fourier_output_transform(cell, g, sflags, ws);
      Field o = spec.observe ? spec.observe(cells, r.axis[j]) : cells[0];
      require(o.nens == E, ErrKind::config,
              "observe output must keep the ensemble dimension");
      Field point;
      if (!spec.binranges.empty()) {
        point = bin_probability(o, spec.binranges,
                                j == 0 ? &r.bin_centers : nullptr);
      } else if (spec.scatters > 0) {
        require(spec.scatters <= E, ErrKind::config,
                "scatters exceeds the ensemble size");
        point = ensemble_slice(o, spec.scatters);
      } else {
        point = ensemble_mean(o);
      }
      if (spec.output) point = spec.output(point);
      r.points.push_back(std::move(point));
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace stochastica
