#include "stochastica/advanced.hpp"

#include <algorithm>
#include <cmath>

namespace stochastica {

Manifold quadratic_manifold(std::vector<double> q, int iterations) {
  Manifold m;
  m.kind = Manifold::Kind::quadratic;
  m.q = std::move(q);
  m.iterations = iterations;
  return m;
}

Manifold polynomial_manifold(std::vector<double> vc, int power,
                             int iterations) {
  require(power >= 1, ErrKind::config, "polynomial manifold power must be >= 1");
  Manifold m;
  m.kind = Manifold::Kind::polynomial;
  m.vc = std::move(vc);
  m.power = power;
  m.iterations = iterations;
  return m;
}

Manifold catenoid_manifold(int iterations) {
  Manifold m;
  m.kind = Manifold::Kind::catenoid;
  m.iterations = iterations;
  return m;
}

namespace {

void check_components(const Manifold& mf, int nf) {
  switch (mf.kind) {
    case Manifold::Kind::quadratic:
      require(static_cast<int>(mf.q.size()) == nf * nf, ErrKind::config,
              "quadratic manifold matrix size does not match the components");
      break;
    case Manifold::Kind::polynomial:
      require(static_cast<int>(mf.vc.size()) == nf, ErrKind::config,
              "polynomial manifold coefficient count does not match");
      break;
    case Manifold::Kind::catenoid:
      require(nf == 3, ErrKind::config,
              "the catenoid manifold needs exactly three components");
      break;
  }
}

cplx constraint(const Manifold& mf, const std::vector<cplx>& x) {
  const int n = static_cast<int>(x.size());
  cplx f{};
  switch (mf.kind) {
    case Manifold::Kind::quadratic:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f += mf.q[i * n + j] * x[i] * x[j];
      return f - 1.0;
    case Manifold::Kind::polynomial:
      for (int i = 0; i < n; ++i) {
        cplx p{1.0, 0.0};
        for (int k = 0; k < mf.power; ++k) p *= x[i];
        f += mf.vc[i] * p;
      }
      return f - 1.0;
    case Manifold::Kind::catenoid: {
      const cplx sh = std::sinh(x[2]);
      return x[0] * x[0] + x[1] * x[1] - sh * sh - 1.0;
    }
  }
  return f;
}

std::vector<cplx> gradient(const Manifold& mf, const std::vector<cplx>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<cplx> g(n);
  switch (mf.kind) {
    case Manifold::Kind::quadratic:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          g[i] += (mf.q[i * n + j] + mf.q[j * n + i]) * x[j];
      break;
    case Manifold::Kind::polynomial:
      for (int i = 0; i < n; ++i) {
        cplx p{1.0, 0.0};
        for (int k = 0; k < mf.power - 1; ++k) p *= x[i];
        g[i] = static_cast<double>(mf.power) * mf.vc[i] * p;
      }
      break;
    case Manifold::Kind::catenoid:
      g[0] = 2.0 * x[0];
      g[1] = 2.0 * x[1];
      g[2] = -std::sinh(2.0 * x[2]);
      break;
  }
  return g;
}

}  // namespace

Field project(const Manifold& mf, const Field& d, const Field& a, int option) {
  require(option == 0 || option == 1 || option == 2 || option == 4,
          ErrKind::config, "projection option must be 0, 1, 2 or 4");
  check_components(mf, a.nf);
  if (option == 1)
    require(d.same_shape(a), ErrKind::config,
            "projected vector shape does not match the field");

  const int n = a.nf;
  Field out = option == 4 ? Field(1, a.space, a.nens) : a;
  std::vector<cplx> x(n), dv(n);
  for (int s = 0; s < a.nspace; ++s) {
    for (int e = 0; e < a.nens; ++e) {
      for (int i = 0; i < n; ++i) x[i] = a.at(i, s, e);
      switch (option) {
        case 0: {
          const auto g = gradient(mf, x);
          for (int i = 0; i < n; ++i) out.at(i, s, e) = g[i];
          break;
        }
        case 1: {
          for (int i = 0; i < n; ++i) dv[i] = d.at(i, s, e);
          const auto g = gradient(mf, x);
          cplx gd{}, gg{};
          for (int i = 0; i < n; ++i) {
            gd += g[i] * dv[i];
            gg += g[i] * g[i];
          }
          require(gg != cplx{}, ErrKind::projection,
                  "degenerate constraint gradient in tangential projection");
          for (int i = 0; i < n; ++i)
            out.at(i, s, e) = dv[i] - g[i] * gd / gg;
          break;
        }
        case 2: {
          const double f0 = std::abs(constraint(mf, x));
          for (int it = 0; it < mf.iterations; ++it) {
            const cplx f = constraint(mf, x);
            const auto g = gradient(mf, x);
            cplx gg{};
            for (int i = 0; i < n; ++i) gg += g[i] * g[i];
            require(gg != cplx{}, ErrKind::projection,
                    "degenerate constraint gradient in normal projection");
            for (int i = 0; i < n; ++i) x[i] -= f * g[i] / gg;
          }
          const double f1 = std::abs(constraint(mf, x));
          bool finite = true;
          for (const cplx& v : x)
            finite = finite && std::isfinite(v.real()) && std::isfinite(v.imag());
          require(finite && f1 <= std::max(0.5 * f0, 1e-12), ErrKind::projection,
                  "normal projection did not converge");
          for (int i = 0; i < n; ++i) out.at(i, s, e) = x[i];
          break;
        }
        case 4:
          out.at(0, s, e) = constraint(mf, x);
          break;
      }
    }
  }
  return out;
}

const char* projected_method_name(ProjectedMethod m) {
  switch (m) {
    case ProjectedMethod::enproj:
      return "Enproj";
    case ProjectedMethod::mpproj:
      return "MPproj";
    case ProjectedMethod::mpnproj:
      return "MPnproj";
  }
  fail(ErrKind::config, "unknown projected method");
}

ProjectedMethod projected_method_from_name(const std::string& name) {
  if (name == "Enproj") return ProjectedMethod::enproj;
  if (name == "MPproj") return ProjectedMethod::mpproj;
  if (name == "MPnproj") return ProjectedMethod::mpnproj;
  fail(ErrKind::config, "unknown projected method name: " + name);
}

Fields step_projected(ProjectedMethod pm, const Fields& a, const NoiseSet& w,
                      const StepContext& ctx, const Manifold& mf) {
  require(a.size() == 1, ErrKind::config,
          "projected methods act on a single field cell");
  check_components(mf, a[0].nf);

  StepContext pc = ctx;
  DerivFn base = ctx.deriv;
  pc.deriv = [&base, &mf](const Fields& x, const NoiseSet& wn, double t) {
    Fields d;
    if (base) {
      d = base(x, wn, t);
    } else {
      d = x;
      for (auto& f : d) std::fill(f.v.begin(), f.v.end(), cplx{});
    }
    d[0] = project(mf, d[0], x[0], 1);
    return d;
  };

  Fields out = step(pm == ProjectedMethod::enproj ? Method::euler : Method::mp,
                    a, w, pc);
  if (pm != ProjectedMethod::mpproj)
    out[0] = project(mf, out[0], out[0], 2);
  return out;
}

void breed(WeightState& ws, Field& a) {
  require(a.nf >= 2, ErrKind::config,
          "weighted fields need at least two components");
  require(a.nspace == 1, ErrKind::config,
          "breeding acts on single-point trajectory ensembles");
  ws.breed_fraction = 0;
  if (ws.thresholdw <= 0 || a.nens < 2) return;

  const int omega = a.nf - 1;
  auto weight = [&](int e) { return std::exp(a.at(omega, 0, e).real()); };

  double mean = 0;
  for (int e = 0; e < a.nens; ++e) mean += weight(e);
  mean /= a.nens;
  const double cut = ws.thresholdw / mean;

  int below = 0;
  for (int e = 0; e < a.nens; ++e) below += weight(e) < cut;
  require(below < a.nens, ErrKind::degenerate,
          "every trajectory weight fell below the breeding threshold");

  const double ln2 = std::log(2.0);
  int bred = 0;
  for (int e = 0; e < a.nens; ++e) {
    if (weight(e) >= cut) continue;
    // Most probable trajectory, lowest index among maxima.
    int best = 0;
    double wbest = weight(0);
    for (int j = 1; j < a.nens; ++j) {
      const double wj = weight(j);
      if (wj > wbest) {
        wbest = wj;
        best = j;
      }
    }
    for (int c = 0; c < a.nf; ++c) a.at(c, 0, e) = a.at(c, 0, best);
    a.at(omega, 0, e) -= ln2;
    a.at(omega, 0, best) -= ln2;
    ++bred;
  }
  ws.breed_fraction = static_cast<double>(bred) / a.nens;
}

cplx weighted_average(const Field& a, int comp) {
  require(a.nf >= 2, ErrKind::config,
          "weighted fields need at least two components");
  require(a.nspace == 1, ErrKind::config,
          "weighted averages act on single-point trajectory ensembles");
  require(comp >= 0 && comp < a.nf, ErrKind::config,
          "weighted average component out of range");
  const int omega = a.nf - 1;
  cplx num{}, den{};
  for (int e = 0; e < a.nens; ++e) {
    const cplx w = std::exp(a.at(omega, 0, e));
    num += a.at(comp, 0, e) * w;
    den += w;
  }
  require(den != cplx{}, ErrKind::degenerate,
          "total trajectory weight vanished in a weighted average");
  return num / den;
}

}  // namespace stochastica
