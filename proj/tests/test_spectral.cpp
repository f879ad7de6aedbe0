#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include "oracle_data/trig_oracle.inc"
#include "stochastica/spectral.hpp"

using namespace stochastica;
using std::numbers::pi;

namespace {

// Exact rebuild of the oracle generator's test vectors.
std::vector<double> lcg_vector(int n, std::uint32_t seed) {
  std::uint64_t state = seed & 0xFFFFFFFFu;
  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    state = (1103515245ull * state + 12345ull) & 0x7FFFFFFFull;
    out.push_back((static_cast<double>(state % 2001) - 1000.0) / 500.0);
  }
  return out;
}

Grid grid_1d_space(int n, double range,
                   std::optional<double> origin = std::nullopt) {
  GridSpec s;
  s.dimensions = 2;
  s.points = {2, n};
  s.ranges = {1, range};
  if (origin) s.origins = {0, *origin};
  return build_grid(s);
}

std::vector<cplx> to_cplx(const std::vector<double>& u) {
  std::vector<cplx> z(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) z[i] = {u[i], 0.0};
  return z;
}

double max_err(const std::vector<cplx>& a, const std::vector<double>& b) {
  double e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    e = std::max(e, std::abs(a[i].real() - b[i]));
    e = std::max(e, std::abs(a[i].imag()));
  }
  return e;
}

const std::vector<double>& oracle(const char* kind, int n) {
  using V = const std::vector<double>&;
  auto pick = [&](V dst1, V dct1, V dst3, V dct3) -> V {
    std::string k(kind);
    if (k == "dst1") return dst1;
    if (k == "dct1") return dct1;
    if (k == "dst3") return dst3;
    return dct3;
  };
  switch (n) {
    case 3: return pick(trig_oracle::dst1_3, trig_oracle::dct1_3, trig_oracle::dst3_3, trig_oracle::dct3_3);
    case 4: return pick(trig_oracle::dst1_4, trig_oracle::dct1_4, trig_oracle::dst3_4, trig_oracle::dct3_4);
    case 5: return pick(trig_oracle::dst1_5, trig_oracle::dct1_5, trig_oracle::dst3_5, trig_oracle::dct3_5);
    case 8: return pick(trig_oracle::dst1_8, trig_oracle::dct1_8, trig_oracle::dst3_8, trig_oracle::dct3_8);
    case 17: return pick(trig_oracle::dst1_17, trig_oracle::dct1_17, trig_oracle::dst3_17, trig_oracle::dct3_17);
    case 33: return pick(trig_oracle::dst1_33, trig_oracle::dct1_33, trig_oracle::dst3_33, trig_oracle::dct3_33);
    default: return pick(trig_oracle::dst1_64, trig_oracle::dct1_64, trig_oracle::dst3_64, trig_oracle::dct3_64);
  }
}

}  // namespace

TEST_CASE("forward trig transforms reproduce the frozen oracle") {
  for (int n : trig_oracle::sizes) {
    auto u = to_cplx(lcg_vector(n, 1000 + n));
    std::vector<cplx> out(n);
    trig_transform(u.data(), out.data(), n, TransformKind::dst1, Direction::forward);
    CHECK(max_err(out, oracle("dst1", n)) < 1e-12);
    trig_transform(u.data(), out.data(), n, TransformKind::dct1, Direction::forward);
    CHECK(max_err(out, oracle("dct1", n)) < 1e-12);
    trig_transform(u.data(), out.data(), n, TransformKind::dst3, Direction::forward);
    CHECK(max_err(out, oracle("dst3", n)) < 1e-12);
    trig_transform(u.data(), out.data(), n, TransformKind::dct3, Direction::forward);
    CHECK(max_err(out, oracle("dct3", n)) < 1e-12);
  }
}

TEST_CASE("all six kinds round-trip on their boundary-compatible subspaces") {
  for (int n : trig_oracle::sizes) {
    auto u = lcg_vector(n, 77 + n);
    for (TransformKind kind :
         {TransformKind::dst1, TransformKind::dct1, TransformKind::dst2,
          TransformKind::dst3, TransformKind::dct2, TransformKind::dct3}) {
      auto expect = u;
      if (kind == TransformKind::dst1) expect.front() = expect.back() = 0.0;
      if (kind == TransformKind::dst3) expect.front() = 0.0;
      if (kind == TransformKind::dct3 || kind == TransformKind::dst2 ||
          kind == TransformKind::dct2) {
        expect.back() = 0.0;
      }
      auto z = to_cplx(expect);  // start inside the compatible subspace
      std::vector<cplx> mid(n), back(n);
      trig_transform(z.data(), mid.data(), n, kind, Direction::forward);
      trig_transform(mid.data(), back.data(), n, kind, Direction::inverse);
      CHECK(max_err(back, expect) < 1e-12);
    }
  }
}

TEST_CASE("DST-I unit impulse and pure mode") {
  // N=3, u=[0,1,0]: single interior coefficient sqrt(2/2)*sin(pi/2) = 1.
  std::vector<cplx> u{{0, 0}, {1, 0}, {0, 0}}, out(3);
  trig_transform(u.data(), out.data(), 3, TransformKind::dst1, Direction::forward);
  CHECK(out[0].real() == doctest::Approx(0.0));
  CHECK(out[1].real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(out[2].real() == doctest::Approx(0.0));

  // u_n = sin(pi (n-1)/(N-1)): only the first interior slot survives.
  const int n = 17;
  std::vector<cplx> v(n), vt(n);
  for (int j = 0; j < n; ++j) v[j] = {std::sin(pi * j / (n - 1.0)), 0.0};
  trig_transform(v.data(), vt.data(), n, TransformKind::dst1, Direction::forward);
  for (int k = 0; k < n; ++k) {
    if (k == 1) {
      CHECK(vt[k].real() == doctest::Approx(std::sqrt((n - 1) / 2.0)).epsilon(1e-12));
    } else {
      CHECK(std::abs(vt[k]) < 1e-12);
    }
  }
}

TEST_CASE("trig transforms reject tiny axes") {
  std::vector<cplx> u(2), out(2);
  CHECK_THROWS_AS(
      trig_transform(u.data(), out.data(), 2, TransformKind::dst1, Direction::forward),
      SimError);
}

TEST_CASE("derivative arrays: periodic and trig eigenvalues") {
  {
    GridSpec s;
    s.dimensions = 2;
    s.points = {2, 4};
    s.ranges = {1, 3};  // dx = 1
    Grid g = build_grid(s);
    auto d2 = derivative_array(g, 1, 2, {});
    CHECK(d2[0].real() == doctest::Approx(0.0));
    CHECK(d2[1].real() == doctest::Approx(-pi * pi / 4).epsilon(1e-13));
    CHECK(d2[2].real() == doctest::Approx(-pi * pi).epsilon(1e-13));
    CHECK(d2[3].real() == doctest::Approx(-pi * pi / 4).epsilon(1e-13));
    for (const cplx& z : d2) CHECK(z.imag() == 0.0);

    auto d1 = derivative_array(g, 1, 1, {});
    CHECK(d1[1] == cplx{0.0, pi / 2});
    CHECK(d1[2] == cplx{0.0, pi});  // positive Nyquist
    CHECK(d1[3] == cplx{0.0, -pi / 2});

    auto d0 = derivative_array(g, 1, 0, {});
    for (const cplx& z : d0) CHECK(z == cplx{1.0, 0.0});
  }
  {
    Grid g = grid_1d_space(3, pi);
    auto d2 = derivative_array(g, 1, 2, {1, 1});
    CHECK(d2[1].real() == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK_THROWS_AS(derivative_array(g, 1, 1, {1, 1}), SimError);
    try {
      derivative_array(g, 1, 1, {1, 1});
    } catch (const SimError& e) {
      CHECK(e.kind() == ErrKind::unsupported);
    }
    // Half-integer ladder for the mixed pairs.
    auto dr = derivative_array(g, 1, 2, {1, -1});
    CHECK(dr[0].real() == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(dr[1].real() == doctest::Approx(-2.25).epsilon(1e-14));
  }
}

TEST_CASE("identity propagator leaves fields untouched") {
  Grid g = grid_1d_space(8, 5);
  SpectralWorkspace ws;
  Fields a{Field(2, {8}, 3)};
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> d(-1, 1);
  for (cplx& z : a[0].v) z = {d(gen), d(gen)};
  Fields orig = a;

  Propagator p0 = build_propagator(g, {2}, {}, nullptr, 0.1);
  CHECK(p0.identity);
  propagate_ip(a, p0, ws);
  for (std::size_t i = 0; i < a[0].v.size(); ++i) CHECK(a[0].v[i] == orig[0].v[i]);

  Propagator pz =
      build_propagator(g, {2}, {}, [](const LinearPoint&) { return cplx{}; }, 0.1);
  CHECK(pz.identity);
  propagate_ip(a, pz, ws);
  for (std::size_t i = 0; i < a[0].v.size(); ++i) CHECK(a[0].v[i] == orig[0].v[i]);
}

TEST_CASE("heat relaxation under Dirichlet boundaries is exact for sin(x)") {
  const int n = 51;
  Grid g = grid_1d_space(n, pi, 0.0);  // x in [0, pi]
  SpectralWorkspace ws;
  BoundarySpec bounds;
  bounds.pairs = {{{BoundaryPair{1, 1}}}};
  auto lin = [](const LinearPoint& p) { return p.Dx * p.Dx; };
  Propagator p = build_propagator(g, {1}, bounds, lin, 0.1);

  Fields a{Field(1, {n}, 1)};
  for (int j = 0; j < n; ++j) a[0].at(0, j, 0) = {std::sin(g.r[1][j]), 0.0};
  propagate_ip(a, p, ws);
  const double decay = std::exp(-0.1);
  for (int j = 0; j < n; ++j) {
    CHECK(std::abs(a[0].at(0, j, 0).real() - decay * std::sin(g.r[1][j])) < 1e-10);
    CHECK(std::abs(a[0].at(0, j, 0).imag()) < 1e-12);
  }
}

TEST_CASE("propagator composes to identity under time reversal") {
  const int n = 24;
  Grid g = grid_1d_space(n, 7);
  SpectralWorkspace ws;
  auto lin = [](const LinearPoint& p) { return p.Dx * p.Dx + cplx{0.0, 0.3}; };
  Propagator fwd = build_propagator(g, {1}, {}, lin, 0.05);
  Propagator bwd = build_propagator(g, {1}, {}, lin, -0.05);

  Fields a{Field(1, {n}, 2)};
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> d(-1, 1);
  for (cplx& z : a[0].v) z = {d(gen), d(gen)};
  Fields orig = a;
  propagate_ip(a, fwd, ws);
  propagate_ip(a, bwd, ws);
  for (std::size_t i = 0; i < a[0].v.size(); ++i)
    CHECK(std::abs(a[0].v[i] - orig[0].v[i]) < 1e-12);
}

TEST_CASE("plane waves decay exactly in two dimensions across ensembles") {
  GridSpec s;
  s.dimensions = 3;
  s.points = {2, 16, 12};
  s.ranges = {1, 8, 6};
  Grid g = build_grid(s);
  SpectralWorkspace ws;
  auto lin = [](const LinearPoint& p) { return p.Dx * p.Dx + p.Dy * p.Dy; };
  const double dt = 0.07;
  Propagator p = build_propagator(g, {1}, {}, lin, dt);

  const double kx = 2 * g.dk_periodic[1], ky = 3 * g.dk_periodic[2];
  Field f(1, {16, 12}, 3);
  for (int jx = 0; jx < 16; ++jx) {
    for (int jy = 0; jy < 12; ++jy) {
      cplx val = std::exp(cplx{0.0, kx * g.r[1][jx] + ky * g.r[2][jy]});
      for (int e = 0; e < 3; ++e) f.at(0, jx * 12 + jy, e) = val * (1.0 + e);
    }
  }
  Fields a{f};
  propagate_ip(a, p, ws);
  const double decay = std::exp(-dt * (kx * kx + ky * ky));
  for (int jx = 0; jx < 16; ++jx) {
    for (int jy = 0; jy < 12; ++jy) {
      cplx want = decay * std::exp(cplx{0.0, kx * g.r[1][jx] + ky * g.r[2][jy]});
      for (int e = 0; e < 3; ++e) {
        CHECK(std::abs(a[0].at(0, jx * 12 + jy, e) - want * (1.0 + e)) < 1e-10);
      }
    }
  }
}

TEST_CASE("spectral derivative matches eigenvalue multiplication") {
  const int n = 33;
  Grid g = grid_1d_space(n, 4);
  SpectralWorkspace ws;
  BoundarySpec bounds;
  bounds.pairs = {{{BoundaryPair{-1, -1}}}};

  Field f(1, {n}, 1);
  auto u = lcg_vector(n, 5);
  for (int j = 0; j < n; ++j) f.at(0, j, 0) = {u[j], 0.0};

  // Transform of D2 u must equal eigenvalue times transform of u.
  Field df = f;
  spectral_derivative(df, g, bounds, 0, 0, 2, ws);
  std::vector<cplx> tu(n), tdu(n);
  trig_transform(f.comp(0), tu.data(), n, TransformKind::dct1, Direction::forward);
  trig_transform(df.comp(0), tdu.data(), n, TransformKind::dct1, Direction::forward);
  auto eig = derivative_array(g, 1, 2, {-1, -1});
  for (int k = 0; k < n; ++k) CHECK(std::abs(tdu[k] - eig[k] * tu[k]) < 1e-10);
}

TEST_CASE("Parseval holds through the output transform") {
  const int n = 40;
  Grid g = grid_1d_space(n, 12.5);
  SpectralWorkspace ws;
  Field f(1, {n}, 2);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> d(-1, 1);
  for (cplx& z : f.v) z = {d(gen), d(gen)};

  Field kf = fourier_output_transform(f, g, {1}, ws);
  for (int e = 0; e < 2; ++e) {
    double xsum = 0, ksum = 0;
    for (int j = 0; j < n; ++j) {
      xsum += std::norm(f.at(0, j, e)) * g.dx[1];
      ksum += std::norm(kf.at(0, j, e)) * g.dk_periodic[1];
    }
    CHECK(xsum == doctest::Approx(ksum).epsilon(1e-10));
  }
}

TEST_CASE("output transform of a constant is a k=0 spike") {
  const int n = 21;
  Grid g = grid_1d_space(n, 10);  // origin -5
  SpectralWorkspace ws;
  Field f(1, {n}, 1);
  const cplx c{0.7, -0.2};
  for (cplx& z : f.v) z = c;
  Field kf = fourier_output_transform(f, g, {1}, ws);
  const int zero = centered_zero_index(n);
  const cplx spike = c * static_cast<double>(n) * g.dx[1] / std::sqrt(2 * pi);
  for (int j = 0; j < n; ++j) {
    if (j == zero) {
      CHECK(std::abs(kf.at(0, j, 0) - spike) < 1e-12);
    } else {
      CHECK(std::abs(kf.at(0, j, 0)) < 1e-11);
    }
  }
}

TEST_CASE("Gaussian is its own output transform") {
  const int n = 129;
  Grid g = grid_1d_space(n, 20);  // x in [-10, 10]
  SpectralWorkspace ws;
  Field f(1, {n}, 1);
  for (int j = 0; j < n; ++j)
    f.at(0, j, 0) = {std::exp(-0.5 * g.r[1][j] * g.r[1][j]), 0.0};
  Field kf = fourier_output_transform(f, g, {1}, ws);
  auto k = momentum_axis(g, 1, MomentumOrder::graphics_centered);
  for (int j = 0; j < n; ++j) {
    CHECK(std::abs(kf.at(0, j, 0) - cplx{std::exp(-0.5 * k[j] * k[j]), 0.0}) < 1e-6);
  }
}

TEST_CASE("periodic k-space service round-trips and spikes correctly") {
  GridSpec s;
  s.dimensions = 3;
  s.points = {2, 10, 6};
  s.ranges = {1, 5, 3};
  Grid g = build_grid(s);
  SpectralWorkspace ws;
  PeriodicKSpace service(g, ws);

  Field f(2, {10, 6}, 4);
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> d(-1, 1);
  for (cplx& z : f.v) z = {d(gen), d(gen)};
  Field orig = f;
  service.forward(f);
  service.inverse(f);
  for (std::size_t i = 0; i < f.v.size(); ++i)
    CHECK(std::abs(f.v[i] - orig.v[i]) < 1e-12);

  Field c(1, {10, 6}, 1);
  for (cplx& z : c.v) z = {1.0, 0.0};
  service.forward(c);
  CHECK(std::abs(c.at(0, 0, 0) - cplx{60.0, 0.0}) < 1e-10);  // raw N_total at k=0
  double off_spike = 0;
  for (int sp = 1; sp < 60; ++sp) off_spike = std::max(off_spike, std::abs(c.at(0, sp, 0)));
  CHECK(off_spike < 1e-10);
}
