#include "stochastica/stepper.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include "stochastica/kernels.hpp"

namespace stochastica {

namespace {

struct MethodRow {
  Method m;
  const char* name;
  MethodTraits traits;
};

constexpr MethodRow kMethods[] = {
    {Method::euler, "Euler", {1, 1, Calculus::ito}},
    {Method::implicit, "Implicit", {1, 1, Calculus::backward_ito}},
    {Method::mp, "MP", {2, 2, Calculus::stratonovich}},
    {Method::mpadapt, "MPadapt", {2, 2, Calculus::stratonovich}},
    {Method::rk2, "RK2", {1, 2, Calculus::stratonovich}},
    {Method::rk4, "RK4", {2, 4, Calculus::stratonovich}},
};

const MethodRow& row(Method m) {
  for (const auto& r : kMethods)
    if (r.m == m) return r;
  fail(ErrKind::config, "unknown integration method");
}

// y += c * x over all cells.
void add_scaled(Fields& y, double c, const Fields& x) {
  for (std::size_t f = 0; f < y.size(); ++f) {
    kernels::axpy(2 * y[f].v.size(), c,
                  reinterpret_cast<const double*>(x[f].v.data()),
                  reinterpret_cast<double*>(y[f].v.data()));
  }
}

// y = a * x + b * y over all cells.
void blend(Fields& y, double a, const Fields& x, double b) {
  for (std::size_t f = 0; f < y.size(); ++f) {
    kernels::axpby(2 * y[f].v.size(), a,
                   reinterpret_cast<const double*>(x[f].v.data()), b,
                   reinterpret_cast<double*>(y[f].v.data()));
  }
}

Fields zero_like(const Fields& a) {
  Fields z = a;
  for (auto& f : z) std::fill(f.v.begin(), f.v.end(), cplx{});
  return z;
}

}  // namespace

MethodTraits method_traits(Method m) { return row(m).traits; }

const char* method_name(Method m) { return row(m).name; }

Method method_from_name(const std::string& name) {
  for (const auto& r : kMethods)
    if (name == r.name) return r.m;
  fail(ErrKind::config, "unknown method name: " + name);
}

Field adapt_transform(const Field& a, AdaptDirection dir, double threshold) {
  require(threshold > 0, ErrKind::config, "adapt threshold must be positive");
  Field out = a;
  if (dir == AdaptDirection::forward) {
    for (auto& v : out.v)
      if (std::norm(v) > threshold) v = 1.0 / v;
  } else {
    const double inv = 1.0 / threshold;
    for (auto& v : out.v)
      if (std::norm(v) < inv) v = 1.0 / v;
  }
  return out;
}

namespace {

// Per-step integrator state shared by the method bodies.
struct Stepper {
  const StepContext& ctx;
  const NoiseSet& w;

  Fields deriv(const Fields& x, double t) const {
    if (ctx.define) ctx.define(x, w, t);
    if (!ctx.deriv) return zero_like(x);
    Fields d = ctx.deriv(x, w, t);
    require(d.size() == x.size(), ErrKind::config,
            "derivative returned a different number of field cells");
    for (std::size_t f = 0; f < d.size(); ++f)
      require(d[f].same_shape(x[f]), ErrKind::config,
              "derivative cell shape does not match the field");
    return d;
  }

  const Propagator* pick(int ipsteps) const {
    const Propagator* want = ipsteps == 1 ? ctx.full : ctx.half;
    const Propagator* other = ipsteps == 1 ? ctx.half : ctx.full;
    if (!want && other) {
      fail(ErrKind::config,
           ipsteps == 1
               ? "method needs the full-step propagator, only the half-step one is set"
               : "method needs the half-step propagator, only the full-step one is set");
    }
    if (want) {
      const double need = ipsteps == 1 ? ctx.dtr : ctx.dtr / 2;
      require(std::abs(want->dt_ip - need) <= 1e-12 * std::abs(need) + 1e-300,
              ErrKind::config,
              "propagator interaction-picture interval does not match the step");
      require(ctx.ws != nullptr, ErrKind::config,
              "a spectral workspace is required when a propagator is set");
    }
    return want;
  }

  void propagate(Fields& x, const Propagator* p) const {
    if (p) propagate_ip(x, *p, *ctx.ws);
  }
};

// MPadapt branch mask: +1 keep, -1 invert, decided once from the field at the
// start of the step (elements exactly at the threshold keep the identity
// branch).
std::vector<std::vector<std::int8_t>> adapt_mask(const Fields& a,
                                                 double threshold) {
  std::vector<std::vector<std::int8_t>> mask(a.size());
  for (std::size_t f = 0; f < a.size(); ++f) {
    mask[f].resize(a[f].v.size());
    for (std::size_t i = 0; i < a[f].v.size(); ++i)
      mask[f][i] = std::norm(a[f].v[i]) > threshold ? -1 : 1;
  }
  return mask;
}

// Elementwise x^p for the held mask.
Fields pow_mask(const Fields& x,
                const std::vector<std::vector<std::int8_t>>& mask) {
  Fields out = x;
  for (std::size_t f = 0; f < out.size(); ++f)
    for (std::size_t i = 0; i < out[f].v.size(); ++i)
      if (mask[f][i] < 0) out[f].v[i] = 1.0 / out[f].v[i];
  return out;
}

}  // namespace

Fields step(Method m, const Fields& a, const NoiseSet& w,
            const StepContext& ctx) {
  require(ctx.dtr > 0, ErrKind::config, "step size must be positive");
  require(ctx.iterations >= 1, ErrKind::config, "iterations must be >= 1");
  const Stepper s{ctx, w};
  const double dt = ctx.dtr;
  const double t = ctx.t;
  Fields out;

  switch (m) {
    case Method::euler: {
      const Propagator* p = s.pick(1);
      Fields d = s.deriv(a, t);
      out = a;
      add_scaled(out, dt, d);
      s.propagate(out, p);
      break;
    }
    case Method::implicit: {
      const Propagator* p = s.pick(1);
      Fields r0 = a;
      s.propagate(r0, p);
      Fields x = r0;
      for (int i = 0; i < ctx.iterations; ++i) {
        Fields d = s.deriv(x, t + dt);
        x = r0;
        add_scaled(x, dt, d);
      }
      out = std::move(x);
      break;
    }
    case Method::mp: {
      const Propagator* p = s.pick(2);
      Fields r0 = a;
      s.propagate(r0, p);
      Fields x = r0;
      const double tm = t + dt / 2;
      for (int i = 0; i < ctx.iterations; ++i) {
        Fields d = s.deriv(x, tm);
        x = r0;
        add_scaled(x, dt / 2, d);
      }
      // Extrapolate through the midpoint: 2 x - r0, then the second half-step.
      blend(x, -1.0, r0, 2.0);
      s.propagate(x, p);
      out = std::move(x);
      break;
    }
    case Method::mpadapt: {
      const Propagator* p = s.pick(2);
      const auto mask = adapt_mask(a, ctx.adapt_threshold);
      Fields r0 = a;
      s.propagate(r0, p);
      const Fields tilde0 = pow_mask(r0, mask);
      Fields x = tilde0;
      const double tm = t + dt / 2;
      for (int i = 0; i < ctx.iterations; ++i) {
        Fields d = s.deriv(pow_mask(x, mask), tm);
        // x_next = tilde0 + (dt/2) p x^(1-p) D: p=+1 plain, p=-1 uses -x^2 D.
        Fields xn = tilde0;
        for (std::size_t f = 0; f < xn.size(); ++f) {
          for (std::size_t j = 0; j < xn[f].v.size(); ++j) {
            const cplx dj = d[f].v[j];
            xn[f].v[j] += (dt / 2) * (mask[f][j] > 0
                                          ? dj
                                          : -x[f].v[j] * x[f].v[j] * dj);
          }
        }
        x = std::move(xn);
      }
      blend(x, -1.0, tilde0, 2.0);
      out = pow_mask(x, mask);
      s.propagate(out, p);
      break;
    }
    case Method::rk2: {
      const Propagator* p = s.pick(1);
      Fields d0 = s.deriv(a, t);
      Fields abar = a;
      s.propagate(abar, p);
      Fields a1 = a;
      add_scaled(a1, dt, d0);
      s.propagate(a1, p);
      Fields a2 = s.deriv(a1, t + dt);
      blend(a2, 1.0, abar, dt);  // a2 = abar + dt * D[a1]
      out = std::move(a1);
      blend(out, 0.5, a2, 0.5);
      break;
    }
    case Method::rk4: {
      const Propagator* p = s.pick(2);
      const double tm = t + dt / 2;
      Fields abar = a;
      s.propagate(abar, p);
      Fields d1 = s.deriv(a, t);
      s.propagate(d1, p);
      for (auto& f : d1)
        for (auto& v : f.v) v *= dt / 2;
      Fields stage = abar;
      add_scaled(stage, 1.0, d1);
      Fields d2 = s.deriv(stage, tm);
      for (auto& f : d2)
        for (auto& v : f.v) v *= dt / 2;
      stage = abar;
      add_scaled(stage, 1.0, d2);
      Fields d3 = s.deriv(stage, tm);
      for (auto& f : d3)
        for (auto& v : f.v) v *= dt / 2;
      stage = abar;
      add_scaled(stage, 2.0, d3);
      s.propagate(stage, p);
      Fields d4 = s.deriv(stage, t + dt);
      for (auto& f : d4)
        for (auto& v : f.v) v *= dt / 2;
      out = abar;
      add_scaled(out, 1.0 / 3, d1);
      add_scaled(out, 2.0 / 3, d2);
      add_scaled(out, 2.0 / 3, d3);
      s.propagate(out, p);
      add_scaled(out, 1.0 / 3, d4);
      break;
    }
  }

  for (const auto& f : out) {
    if (!all_finite(f)) {
      fail(ErrKind::divergence,
           std::string("non-finite field values after a ") + method_name(m) +
               " step at t = " + std::to_string(t + dt));
    }
  }
  return out;
}

Fields ito_stratonovich_drift_shift(const NoiseTermFn& B, const Fields& a,
                                    const NoiseSet& shape, double h) {
  require(h > 0, ErrKind::config, "finite-difference step must be positive");

  NoiseSet zero = shape;
  for (auto& c : zero.cells) std::fill(c.v.begin(), c.v.end(), cplx{});

  // Scalar noise indices: one per (cell, component) pair.
  std::vector<std::pair<int, int>> noise_ix;
  for (std::size_t c = 0; c < shape.cells.size(); ++c)
    for (int k = 0; k < shape.cells[c].nf; ++k)
      noise_ix.emplace_back(static_cast<int>(c), k);

  auto unit = [&](std::size_t k) {
    NoiseSet u = zero;
    auto [c, comp] = noise_ix[k];
    Field& f = u.cells[c];
    for (int s = 0; s < f.nspace; ++s)
      for (int e = 0; e < f.nens; ++e) f.at(comp, s, e) = 1.0;
    return u;
  };

  // Noise-term columns at the base point (affine-safe: subtract B(a, 0)).
  const Fields base0 = B(a, zero);
  std::vector<Fields> cols(noise_ix.size());
  for (std::size_t k = 0; k < noise_ix.size(); ++k) {
    cols[k] = B(a, unit(k));
    add_scaled(cols[k], -1.0, base0);
  }

  // Field component indices: one per (cell, component) pair.
  std::vector<std::pair<int, int>> field_ix;
  for (std::size_t f = 0; f < a.size(); ++f)
    for (int c = 0; c < a[f].nf; ++c)
      field_ix.emplace_back(static_cast<int>(f), c);

  Fields shift = zero_like(a);
  for (const auto& [fj, cj] : field_ix) {
    Fields ap = a, am = a;
    for (int s = 0; s < a[fj].nspace; ++s) {
      for (int e = 0; e < a[fj].nens; ++e) {
        ap[fj].at(cj, s, e) += h;
        am[fj].at(cj, s, e) -= h;
      }
    }
    const Fields basep = B(ap, zero);
    const Fields basem = B(am, zero);
    for (std::size_t k = 0; k < noise_ix.size(); ++k) {
      Fields colp = B(ap, unit(k));
      add_scaled(colp, -1.0, basep);
      Fields colm = B(am, unit(k));
      add_scaled(colm, -1.0, basem);
      // dB = (colp - colm) / 2h; accumulate (1/2) B_jk dB_ik elementwise.
      for (std::size_t fi = 0; fi < shift.size(); ++fi) {
        for (int ci = 0; ci < shift[fi].nf; ++ci) {
          for (int s = 0; s < shift[fi].nspace; ++s) {
            for (int e = 0; e < shift[fi].nens; ++e) {
              const cplx db = (colp[fi].at(ci, s, e) - colm[fi].at(ci, s, e)) /
                              (2 * h);
              shift[fi].at(ci, s, e) +=
                  0.5 * cols[k][fj].at(cj, s, e) * db;
            }
          }
        }
      }
    }
  }
  return shift;
}

}  // namespace stochastica
