#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stochastica/findiff.hpp"
#include "stochastica/spectral.hpp"

using namespace stochastica;
using std::numbers::pi;

namespace {

Grid space_grid(int n, double range, double origin) {
  GridSpec s;
  s.dimensions = 2;
  s.points = {2, n};
  s.ranges = {1, range};
  s.origins = {0, origin};
  return build_grid(s);
}

Field sampled(const Grid& g, double (*fn)(double)) {
  const int n = g.points[1];
  Field f(1, {n}, 1);
  for (int j = 0; j < n; ++j) f.at(0, j, 0) = {fn(g.r[1][j]), 0.0};
  return f;
}

BoundarySpec pair_spec(int lo, int hi) {
  BoundarySpec b;
  b.pairs = {{{BoundaryPair{lo, hi}}}};
  return b;
}

BoundaryValues values_1d(cplx lo, cplx hi) {
  BoundaryValues bv;
  Field f(1, {2}, 1);
  f.at(0, 0, 0) = lo;
  f.at(0, 1, 0) = hi;
  bv.vals = {{f}};
  return bv;
}

}  // namespace

TEST_CASE("linear field has exact interior first derivative") {
  Grid g = space_grid(11, 5, 0);
  Field f = sampled(g, [](double x) { return x; });
  Field df = d1(f, g, 1, 0, {}, {});
  for (int j = 1; j < 10; ++j)
    CHECK(df.at(0, j, 0).real() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("Robin boundaries return the prescribed derivative exactly") {
  Grid g = space_grid(9, 4, 0);
  Field f = sampled(g, [](double x) { return x * x + 1; });
  BoundarySpec b = pair_spec(-1, -1);

  Field df0 = d1(f, g, 1, 0, b, {});
  CHECK(df0.at(0, 0, 0) == cplx{});
  CHECK(df0.at(0, 8, 0) == cplx{});

  BoundaryValues bv = values_1d({0.25, 0}, {-1.5, 0});
  Field df = d1(f, g, 1, 0, b, bv);
  CHECK(df.at(0, 0, 0) == cplx{0.25, 0});
  CHECK(df.at(0, 8, 0) == cplx{-1.5, 0});
}

TEST_CASE("sin(x) first derivative meets the central-difference bound") {
  const int n = 51;
  Grid g = space_grid(n, pi, 0);  // dx = pi/50
  Field f = sampled(g, [](double x) { return std::sin(x); });
  Field df = d1(f, g, 1, 0, pair_spec(1, 1), {});
  double maxerr = 0;
  for (int j = 1; j < n - 1; ++j)
    maxerr = std::max(maxerr,
                      std::abs(df.at(0, j, 0).real() - std::cos(g.r[1][j])));
  CHECK(maxerr <= 6.6e-4);
}

TEST_CASE("constant field: second derivative vanishes for every boundary type") {
  Grid g = space_grid(8, 3, -1);
  Field f = sampled(g, [](double) { return 2.5; });
  // Robin with zero derivative values and periodic are exactly zero.
  for (auto spec : {pair_spec(0, 0), pair_spec(-1, -1)}) {
    Field ddf = d2(f, g, 1, 0, spec, {});
    for (int j = 0; j < 8; ++j) CHECK(std::abs(ddf.at(0, j, 0)) < 1e-13);
  }
  // Dirichlet with ghost equal to the constant.
  Field ddf = d2(f, g, 1, 0, pair_spec(1, 1), values_1d({2.5, 0}, {2.5, 0}));
  for (int j = 0; j < 8; ++j) CHECK(std::abs(ddf.at(0, j, 0)) < 1e-12);
}

TEST_CASE("x^2 with exact extension ghosts: second derivative is 2 everywhere") {
  const int n = 9;
  Grid g = space_grid(n, 4, 0);  // x in [0,4], dx = 0.5
  const double dx = g.dx[1];
  Field f = sampled(g, [](double x) { return x * x; });
  BoundaryValues bv = values_1d({(0 - dx) * (0 - dx), 0}, {(4 + dx) * (4 + dx), 0});
  Field ddf = d2(f, g, 1, 0, pair_spec(1, 1), bv);
  for (int j = 0; j < n; ++j)
    CHECK(ddf.at(0, j, 0).real() == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("interior errors shrink with slope two under refinement") {
  double e1 = 0, e2 = 0, e4 = 0;
  for (int n : {26, 51, 101}) {
    Grid g = space_grid(n, pi, 0);
    Field f = sampled(g, [](double x) { return std::sin(x); });
    Field df = d1(f, g, 1, 0, pair_spec(1, 1), {});
    Field ddf = d2(f, g, 1, 0, pair_spec(1, 1), {});
    double ed1 = 0, ed2 = 0;
    for (int j = 1; j < n - 1; ++j) {
      ed1 = std::max(ed1, std::abs(df.at(0, j, 0).real() - std::cos(g.r[1][j])));
      ed2 = std::max(ed2, std::abs(ddf.at(0, j, 0).real() + std::sin(g.r[1][j])));
    }
    double err = std::max(ed1, ed2);
    (n == 26 ? e1 : n == 51 ? e2 : e4) = err;
  }
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::log2(e2 / e4) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("Robin second derivative at a symmetric extremum is second order") {
  const int n = 41;
  Grid g = space_grid(n, pi, 0);
  const double dx = g.dx[1];
  Field f = sampled(g, [](double x) { return std::cos(x); });
  // cos'(0) = cos'(pi) = 0: natural zero-Neumann values.
  Field ddf = d2(f, g, 1, 0, pair_spec(-1, -1), {});
  CHECK(std::abs(ddf.at(0, 0, 0).real() + 1.0) <= dx * dx / 6);
  CHECK(std::abs(ddf.at(0, n - 1, 0).real() - 1.0) <= dx * dx / 6);
}

TEST_CASE("periodic D1 tracks the spectral derivative at low momentum") {
  const int n = 64;
  GridSpec s;
  s.dimensions = 2;
  s.points = {2, n};
  s.ranges = {1, 16};
  Grid g = build_grid(s);
  const double dx = g.dx[1];
  const double kmax = pi / dx;
  for (int m = 1; m < n / 2; ++m) {
    const double k = m * g.dk_periodic[1];
    if (k > kmax / 4) break;
    Field f(1, {n}, 1);
    for (int j = 0; j < n; ++j)
      f.at(0, j, 0) = std::exp(cplx{0.0, k * g.r[1][j]});
    Field df = d1(f, g, 1, 0, {}, {});
    // Central-difference symbol sin(k dx)/dx versus spectral i k.
    double maxrel = 0;
    for (int j = 0; j < n; ++j) {
      const cplx want = cplx{0.0, k} * f.at(0, j, 0);
      maxrel = std::max(maxrel, std::abs(df.at(0, j, 0) - want) / k);
    }
    if (k <= kmax / 6) CHECK(maxrel <= 0.05);
    CHECK(maxrel <= 0.101);
  }
}

TEST_CASE("component selection returns the requested subset") {
  Grid g = space_grid(7, 3, 0);
  Field f(2, {7}, 2);
  for (int j = 0; j < 7; ++j) {
    for (int e = 0; e < 2; ++e) {
      f.at(0, j, e) = {g.r[1][j], 0.0};
      f.at(1, j, e) = {g.r[1][j] * g.r[1][j], 0.0};
    }
  }
  Field df = d1(f, g, 1, 0, {}, {}, {1});
  REQUIRE(df.nf == 1);
  for (int j = 1; j < 6; ++j)
    for (int e = 0; e < 2; ++e)
      CHECK(df.at(0, j, e).real() ==
            doctest::Approx(2 * g.r[1][j]).epsilon(1e-12));
}

TEST_CASE("time-dimension derivatives are rejected") {
  Grid g = space_grid(7, 3, 0);
  Field f(1, {7}, 1);
  CHECK_THROWS_AS(d1(f, g, 0, 0, {}, {}), SimError);
  try {
    d1(f, g, 0, 0, {}, {});
  } catch (const SimError& e) {
    CHECK(e.kind() == ErrKind::unsupported);
  }
}

TEST_CASE("derivatives along higher dimensions use the right strides") {
  GridSpec s;
  s.dimensions = 3;
  s.points = {2, 5, 21};
  s.ranges = {1, 2, pi};
  s.origins = {0, 0, 0};
  Grid g = build_grid(s);
  Field f(1, {5, 21}, 2);
  for (int jx = 0; jx < 5; ++jx)
    for (int jy = 0; jy < 21; ++jy)
      for (int e = 0; e < 2; ++e)
        f.at(0, jx * 21 + jy, e) = {(1 + g.r[1][jx]) * std::sin(g.r[2][jy]), 0.0};
  Field df = d1(f, g, 2, 0, {}, {});
  for (int jx = 0; jx < 5; ++jx) {
    for (int jy = 1; jy < 20; ++jy) {
      const double want = (1 + g.r[1][jx]) * std::cos(g.r[2][jy]);
      // Truncation error of the central stencil is dy^2/6 ~ 4.1e-3 relative.
      for (int e = 0; e < 2; ++e)
        CHECK(df.at(0, jx * 21 + jy, e).real() ==
              doctest::Approx(want).epsilon(4.5e-3));
    }
  }
}

TEST_CASE("boundary imposition pins Dirichlet and reconstructs Robin rows") {
  Grid g = space_grid(6, 2.5, 0);
  const double dx = g.dx[1];
  Fields a{Field(1, {6}, 2)};
  for (int j = 0; j < 6; ++j)
    for (int e = 0; e < 2; ++e) a[0].at(0, j, e) = {1.0 + j + e, 0.5};

  // No stored values: the field is untouched even with non-periodic bounds.
  Fields before = a;
  impose_boundaries(a, g, pair_spec(1, -1), {});
  for (std::size_t i = 0; i < a[0].v.size(); ++i)
    CHECK(a[0].v[i] == before[0].v[i]);

  BoundaryValues bv;
  Field vals(1, {2}, 2);
  vals.at(0, 0, 0) = {9.0, 0.0};
  vals.at(0, 0, 1) = {8.0, 0.0};
  vals.at(0, 1, 0) = {0.5, 0.0};
  vals.at(0, 1, 1) = {-0.5, 0.0};
  bv.vals = {{vals}};
  impose_boundaries(a, g, pair_spec(1, -1), bv);
  CHECK(a[0].at(0, 0, 0) == cplx{9.0, 0.0});
  CHECK(a[0].at(0, 0, 1) == cplx{8.0, 0.0});
  // Robin upper: a_N = a_{N-1} + b dx.
  CHECK(a[0].at(0, 5, 0) == a[0].at(0, 4, 0) + cplx{0.5, 0.0} * dx);
  CHECK(a[0].at(0, 5, 1) == a[0].at(0, 4, 1) + cplx{-0.5, 0.0} * dx);
}
