#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include "oracle_data/likelihood_oracle.inc"
#include "stochastica/errors.hpp"
#include "stochastica/randoms.hpp"
#include "stochastica/spectral.hpp"
#include "stochastica/stepper.hpp"

using namespace stochastica;

namespace {

Grid time_only_grid(int points, double duration) {
  GridSpec s;
  s.dimensions = 1;
  s.points = {points};
  s.ranges = {duration};
  return build_grid(s);
}

// Exact probability mass of a centered Gaussian over [c-w/2, c+w/2].
double gauss_bin_mass(double c, double w, double var) {
  const double s = std::sqrt(2.0 * var);
  return 0.5 * (std::erf((c + w / 2) / s) - std::erf((c - w / 2) / s));
}

}  // namespace

// ---------------------------------------------------------------------------
// extrapolate

TEST_CASE("richardson factors follow the doubling table") {
  CHECK(richardson_factor(0) == 0.0);
  CHECK(richardson_factor(1) == doctest::Approx(1.0));
  CHECK(richardson_factor(2) == doctest::Approx(1.0 / 3));
  CHECK(richardson_factor(3) == doctest::Approx(1.0 / 7));
  CHECK_THROWS_AS(richardson_factor(-1), SimError);
}

TEST_CASE("extrapolation cancels the modeled error term") {
  SUBCASE("first-order model is cancelled exactly") {
    const double R0 = 3.7, k = 0.42;
    auto ex = extrapolate({R0 + k}, {R0 + 2 * k}, 1);
    CHECK(ex.value[0] == doctest::Approx(R0).epsilon(1e-14));
    CHECK(ex.step_error[0] == doctest::Approx(k).epsilon(1e-12));
  }
  SUBCASE("order zero keeps the fine value with the raw difference") {
    auto ex = extrapolate({1.0, 2.0}, {1.5, 1.0}, 0);
    CHECK(ex.value[0] == 1.0);
    CHECK(ex.value[1] == 2.0);
    CHECK(ex.step_error[0] == doctest::Approx(0.5));
    CHECK(ex.step_error[1] == doctest::Approx(1.0));
  }
  SUBCASE("identical results have zero error") {
    auto ex = extrapolate({2.5}, {2.5}, 2);
    CHECK(ex.value[0] == doctest::Approx(2.5));
    CHECK(ex.step_error[0] == 0.0);
  }
  SUBCASE("length mismatch is a configuration error") {
    CHECK_THROWS_AS(extrapolate({1.0}, {1.0, 2.0}, 1), SimError);
  }
}

TEST_CASE("extrapolation gains one order on a smooth problem") {
  // RK2 on da/dt = cos(t) a has global error O(dt^2); extrapolating with
  // order 2 must converge with slope 3 +- 0.2.
  auto deriv = [](const Fields& a, const NoiseSet&, double t) {
    Fields d = a;
    for (auto& v : d[0].v) v *= std::cos(t);
    return d;
  };
  const double T = 1.0;
  const double exact = std::exp(std::sin(T));
  auto solve = [&](double h) {
    Fields a(1, Field(1, {}, 1));
    a[0].at(0, 0, 0) = cplx{1.0, 0.0};
    StepContext ctx;
    ctx.deriv = deriv;
    ctx.dtr = h;
    const int n = static_cast<int>(std::lround(T / h));
    for (int i = 0; i < n; ++i) {
      ctx.t = i * h;
      a = step(Method::rk2, a, NoiseSet{}, ctx);
    }
    return a[0].at(0, 0, 0).real();
  };

  std::vector<double> errs;
  for (double h : {0.1, 0.05, 0.025}) {
    auto ex = extrapolate({solve(h)}, {solve(2 * h)}, 2);
    errs.push_back(std::abs(ex.value[0] - exact));
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    const double slope = std::log2(errs[i] / errs[i + 1]);
    CHECK(slope > 2.8);
    CHECK(slope < 3.2);
  }
}

TEST_CASE("shared coarsened noise leaves no step error on pure noise") {
  // Euler on da/dt = w: two fine steps with noises (wa, wb) land exactly where
  // one coarse step with their average lands, so the check difference is
  // round-off only.
  Grid tg = time_only_grid(3, 1.0);
  const int E = 16;
  const double h = 0.25;
  NoiseSpec spec;
  spec.noises = {1};
  RngState rng{2024, 0};
  NoiseSet wa = propagation_noise(tg, spec, h, E, rng, kCtxPropagation, 0, nullptr);
  NoiseSet wb = propagation_noise(tg, spec, h, E, rng, kCtxPropagation, 1, nullptr);
  NoiseSet wc = coarsen_noise(wa, wb);

  std::vector<double> fine(E), coarse(E);
  for (int e = 0; e < E; ++e) {
    fine[e] = h * wa.cells[0].at(0, 0, e).real() +
              h * wb.cells[0].at(0, 0, e).real();
    coarse[e] = 2 * h * wc.cells[0].at(0, 0, e).real();
  }
  auto ex = extrapolate(fine, coarse, 1);
  for (int e = 0; e < E; ++e) CHECK(ex.step_error[e] <= 1e-12);
}

// ---------------------------------------------------------------------------
// sampling_stats

TEST_CASE("sub-ensemble statistics") {
  SUBCASE("two sub-means give the textbook sigma") {
    auto st = sampling_stats({{0.0}, {2.0}});
    CHECK(st.mean[0] == doctest::Approx(1.0));
    CHECK(st.sigma[0] == doctest::Approx(1.0));
  }
  SUBCASE("identical sub-means give zero sigma") {
    auto st = sampling_stats({{3.0, -1.0}, {3.0, -1.0}, {3.0, -1.0}});
    CHECK(st.mean[0] == doctest::Approx(3.0));
    CHECK(st.sigma[0] == 0.0);
    CHECK(st.sigma[1] == 0.0);
  }
  SUBCASE("a single sub-ensemble has no sigma plane") {
    auto st = sampling_stats({{1.0, 2.0}});
    CHECK(st.mean.size() == 2);
    CHECK(st.sigma.empty());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(sampling_stats({}), SimError);
    CHECK_THROWS_AS(sampling_stats({{1.0}, {1.0, 2.0}}), SimError);
  }
}

TEST_CASE("one-sigma bands cover at the Gaussian rate") {
  // With M = 100 Gaussian sub-means, the estimated one-sigma interval for the
  // grand mean should cover the truth about 68% of the time.
  const int R = 1000, M = 100;
  int covered = 0;
  for (int r = 0; r < R; ++r) {
    CounterRng gen(RngState{4321, static_cast<std::uint64_t>(r)}, 0, 0);
    std::vector<std::vector<double>> subs(M, std::vector<double>(1));
    for (int m = 0; m < M; ++m) subs[m][0] = gen.gaussian();
    auto st = sampling_stats(subs);
    if (std::abs(st.mean[0]) < st.sigma[0]) ++covered;
  }
  const double frac = static_cast<double>(covered) / R;
  CHECK(frac > 0.63);
  CHECK(frac < 0.73);
}

// ---------------------------------------------------------------------------
// chi_squared / g_squared

TEST_CASE("chi-squared in count and variance modes") {
  SUBCASE("a matching comparison scores zero") {
    auto c = chi_squared({1.0, 2.0}, {0.5, 0.5}, {1.0, 2.0}, {}, 1e-12, 10, 0);
    CHECK(c.chi2 == 0.0);
    CHECK(c.k == 2);
  }
  SUBCASE("count mode reproduces the hand value") {
    auto c = chi_squared({1.2}, {}, {1.0}, {}, 1e-12, 5, 10.0);
    CHECK(c.chi2 == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(c.k == 1);
  }
  SUBCASE("the count cutoff is strict") {
    auto c = chi_squared({1.2}, {}, {1.0}, {}, 1e-12, 10, 10.0);
    CHECK(c.k == 0);  // E = 10 is not > mincount
  }
  SUBCASE("variance mode combines both error sources") {
    auto c = chi_squared({6.0}, {3.0}, {1.0}, {4.0}, 0.0, 10, 0);
    CHECK(c.chi2 == doctest::Approx(1.0));
    CHECK(c.k == 1);
  }
  SUBCASE("densities below the cutoff are skipped") {
    auto c = chi_squared({1.0, 1e-15}, {0.1, 0.1}, {1.0, 1e-15}, {}, 1e-12, 10, 0);
    CHECK(c.k == 1);
    CHECK(c.excluded == 0);
  }
  SUBCASE("zero denominators are excluded and tallied") {
    auto c = chi_squared({1.0}, {0.0}, {1.5}, {}, 1e-12, 10, 0);
    CHECK(c.k == 0);
    CHECK(c.excluded == 1);
  }
  SUBCASE("length mismatch is a configuration error") {
    CHECK_THROWS_AS(chi_squared({1.0}, {}, {1.0, 2.0}, {}, 1e-12, 10, 0),
                    SimError);
  }
}

TEST_CASE("maximum likelihood reproduces the frozen hand value") {
  SUBCASE("matching counts score zero") {
    auto g = g_squared({20.0, 30.0}, {20.0, 30.0}, 5);
    CHECK(g.chi2 == doctest::Approx(0.0));
    CHECK(g.k == 2);
  }
  SUBCASE("the 12/8 versus 10/10 example") {
    auto g = g_squared({12.0, 8.0}, {10.0, 10.0}, 5);
    CHECK(g.chi2 == doctest::Approx(likelihood_oracle::g2_12_8).epsilon(1e-12));
    CHECK(g.k == 2);
  }
  SUBCASE("expected counts are rescaled to the observed total") {
    auto g = g_squared({12.0, 8.0}, {5.0, 5.0}, 4.0);
    CHECK(g.chi2 == doctest::Approx(likelihood_oracle::g2_12_8).epsilon(1e-12));
  }
  SUBCASE("bins failing the count cutoff drop out before rescaling") {
    auto g = g_squared({12.0, 8.0, 1.0}, {10.0, 10.0, 20.0}, 5);
    CHECK(g.k == 2);
    CHECK(g.chi2 == doctest::Approx(likelihood_oracle::g2_12_8).epsilon(1e-12));
  }
}

TEST_CASE("wiener counts fit the gaussian law at a hundred thousand samples") {
  const int n = 100000;
  const double w = 0.5;
  std::vector<double> centers;
  for (int c = -6; c <= 6; ++c) centers.push_back(c * w);
  std::vector<double> counts(centers.size(), 0.0);
  CounterRng gen(RngState{31415, 0}, 0, 0);
  for (int i = 0; i < n; ++i) {
    const double x = gen.gaussian();  // a Wiener path at t = 1
    const double pos = (x - centers.front()) / w;
    const long j = std::lround(pos);
    if (j >= 0 && j < static_cast<long>(centers.size()) &&
        std::abs(x - centers[j]) < w / 2)
      counts[j] += 1.0;
  }
  std::vector<double> density(counts.size()), expected(counts.size()),
      exp_counts(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) {
    density[j] = counts[j] / (n * w);
    expected[j] = gauss_bin_mass(centers[j], w, 1.0) / w;
    exp_counts[j] = n * w * expected[j];
  }

  auto c = chi_squared(density, {}, expected, {}, 1e-12, 10, n * w);
  CHECK(c.k == static_cast<long>(centers.size()));
  const double chi_per_k = c.chi2 / c.k;
  CHECK(chi_per_k > 0.3);
  CHECK(chi_per_k < 2.5);

  // The likelihood statistic agrees with chi-squared on well-matched data.
  auto g = g_squared(counts, exp_counts, 10);
  CHECK(g.k == c.k);
  CHECK(g.chi2 / c.chi2 == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("variance-mode chi-squared calibrates to one on independent sets") {
  // Compare binned Gaussian densities, with sub-ensemble sampling errors,
  // against the exact law: chi2/k should average 1 over repeats.
  const int R = 50, M = 16, n = 500;
  const double w = 0.5;
  std::vector<double> centers;
  for (int c = -5; c <= 5; ++c) centers.push_back(c * w);
  const std::size_t B = centers.size();
  std::vector<double> expected(B);
  for (std::size_t j = 0; j < B; ++j)
    expected[j] = gauss_bin_mass(centers[j], w, 1.0) / w;

  double acc = 0;
  int with_all_bins = 0;
  for (int r = 0; r < R; ++r) {
    std::vector<std::vector<double>> subs(M, std::vector<double>(B, 0.0));
    for (int m = 0; m < M; ++m) {
      CounterRng gen(RngState{777, static_cast<std::uint64_t>(r * M + m)}, 0, 0);
      for (int i = 0; i < n; ++i) {
        const double x = gen.gaussian();
        const double pos = (x - centers.front()) / w;
        const long j = std::lround(pos);
        if (j >= 0 && j < static_cast<long>(B) &&
            std::abs(x - centers[j]) < w / 2)
          subs[m][j] += 1.0 / (n * w);
      }
    }
    auto st = sampling_stats(subs);
    auto c = chi_squared(st.mean, st.sigma, expected, {}, 1e-12, 10, 0);
    REQUIRE(c.k > 0);
    if (c.k == static_cast<long>(B)) ++with_all_bins;
    acc += c.chi2 / c.k;
  }
  CHECK(with_all_bins == R);
  const double mean_chi = acc / R;
  CHECK(mean_chi > 0.8);
  CHECK(mean_chi < 1.2);
}

// ---------------------------------------------------------------------------
// summarize

TEST_CASE("error planes track their largest populated index") {
  ErrorPlanes g;
  CHECK(g.errors() == 0);
  g.mean = {1.0};
  CHECK(g.errors() == 1);
  g.step = {0.1};
  CHECK(g.errors() == 2);
  g.sampling = {0.2};
  CHECK(g.errors() == 3);
}

TEST_CASE("summaries normalize and combine by category") {
  ErrorPlanes a;
  a.label = "a";
  a.mean = {3.0, 4.0};
  a.step = {0.1, 0.2};
  ErrorPlanes b;
  b.label = "b";
  b.mean = {1.0, 1.0};
  b.step = {0.3, 0.4};
  b.comparison = {2.0, 2.0};

  SUBCASE("relative RMS with comparison-preferred normalizers") {
    std::vector<GraphErrorSummary> per;
    ErrorVector ev = summarize({a, b}, true, true, 1.5, &per);
    const double step_a = std::sqrt((0.01 + 0.04) / 2) / 4.0;  // norm max|mean|
    const double step_b = std::sqrt((0.09 + 0.16) / 2) / 2.0;  // norm max|comp|
    const double comp_b = 1.0 / 2.0;  // |mean - comparison| = 1 everywhere
    CHECK(per[0].normalizer == doctest::Approx(4.0));
    CHECK(per[1].normalizer == doctest::Approx(2.0));
    CHECK(per[0].step == doctest::Approx(step_a).epsilon(1e-12));
    CHECK(per[1].step == doctest::Approx(step_b).epsilon(1e-12));
    CHECK(per[1].comparison == doctest::Approx(comp_b).epsilon(1e-12));
    CHECK(ev.step ==
          doctest::Approx(std::sqrt((step_a * step_a + step_b * step_b) / 2)));
    CHECK(ev.comparison == doctest::Approx(comp_b));
    CHECK(ev.total == doctest::Approx(std::sqrt(
                          (ev.step * ev.step + ev.comparison * ev.comparison) /
                          2)));
    CHECK(ev.sampling == 0.0);
    CHECK(ev.elapsed == doctest::Approx(1.5));
  }
  SUBCASE("maximum reduction replaces the RMS") {
    std::vector<GraphErrorSummary> per;
    summarize({a}, true, false, 0.0, &per);
    CHECK(per[0].step == doctest::Approx(0.2 / 4.0));
  }
  SUBCASE("absolute errors when normalization is off") {
    std::vector<GraphErrorSummary> per;
    summarize({b}, false, true, 0.0, &per);
    CHECK(per[0].normalizer == doctest::Approx(1.0));
    CHECK(per[0].comparison == doctest::Approx(1.0));
  }
  SUBCASE("a single category is the total") {
    ErrorVector ev = summarize({a}, true, true, 0.0);
    CHECK(ev.total == doctest::Approx(ev.step));
    CHECK(ev.comparison == 0.0);
  }
  SUBCASE("zero-error runs give a zero vector") {
    ErrorPlanes quiet;
    quiet.mean = {1.0, 2.0};
    ErrorVector ev = summarize({quiet}, true, true, 0.25);
    CHECK(ev.total == 0.0);
    CHECK(ev.step == 0.0);
    CHECK(ev.sampling == 0.0);
    CHECK(ev.comparison == 0.0);
    CHECK(ev.elapsed == doctest::Approx(0.25));
  }
  SUBCASE("errors at round-off are not counted as errors") {
    ErrorPlanes tiny = a;
    tiny.step = {1e-12, 1e-12};
    ErrorVector ev = summarize({tiny}, true, true, 0.0);
    CHECK(ev.step == 0.0);
    CHECK(ev.total == 0.0);
  }
  SUBCASE("plane length mismatches are configuration errors") {
    ErrorPlanes broken = a;
    broken.sampling = {0.1};
    CHECK_THROWS_AS(summarize({broken}, true, true, 0.0), SimError);
  }
}

TEST_CASE("summaries carry the goodness of fit") {
  ErrorPlanes g;
  g.mean = {1.0, 2.0};
  g.sampling = {0.5, 0.5};
  g.comparison = {1.5, 1.5};
  std::vector<GraphErrorSummary> per;
  ErrorVector ev = summarize({g}, true, true, 0.0, &per);
  auto direct = chi_squared(g.mean, g.sampling, g.comparison, {}, g.cutoff,
                            g.mincount, g.scale);
  REQUIRE(per[0].has_chi2);
  CHECK(per[0].chi2 == doctest::Approx(direct.chi2));
  CHECK(per[0].chi2_k == direct.k);
  CHECK(ev.chi2_per_k ==
        doctest::Approx(direct.chi2 / static_cast<double>(direct.k)));

  SUBCASE("count mode is selected by a positive scale") {
    ErrorPlanes counts = g;
    counts.sampling.clear();
    counts.scale = 100.0;
    counts.mincount = 10.0;
    std::vector<GraphErrorSummary> per2;
    summarize({counts}, true, true, 0.0, &per2);
    auto want = chi_squared(counts.mean, {}, counts.comparison, {},
                            counts.cutoff, counts.mincount, counts.scale);
    REQUIRE(per2[0].has_chi2);
    CHECK(per2[0].chi2 == doctest::Approx(want.chi2));
  }
  SUBCASE("no error planes means no chi-squared") {
    ErrorPlanes bare;
    bare.mean = {1.0};
    bare.comparison = {2.0};
    std::vector<GraphErrorSummary> per3;
    summarize({bare}, true, true, 0.0, &per3);
    CHECK_FALSE(per3[0].has_chi2);
  }
}

TEST_CASE("error reports print the expected summary lines") {
  ErrorPlanes g;
  g.label = "demo";
  g.mean = {1.0};
  g.step = {0.25};
  std::vector<GraphErrorSummary> per;
  ErrorVector ev = summarize({g}, true, true, 0.125, &per);

  std::ostringstream quiet;
  print_error_report(ev, per, 0, quiet);
  CHECK(quiet.str().find("step 0.25") != std::string::npos);
  CHECK(quiet.str().find("elapsed 0.125") != std::string::npos);
  CHECK(quiet.str().find("graph") == std::string::npos);

  std::ostringstream full;
  print_error_report(ev, per, 1, full);
  CHECK(full.str().find("graph 1 (demo)") != std::string::npos);
  CHECK(full.str().find("step=0.25") != std::string::npos);
}

// ---------------------------------------------------------------------------
// xcheck

TEST_CASE("xcheck tabulates halving runs and rejects growth") {
  SUBCASE("a deterministic halving sequence") {
    auto runner = [](int factor) {
      ErrorPlanes g;
      g.mean = {8.0 / factor};
      g.comparison = {0.0};
      g.step = {4.0 / factor};
      return std::make_pair(0.1 / factor, std::vector<ErrorPlanes>{g});
    };
    auto table = xcheck(3, runner);
    REQUIRE(table.size() == 3);
    CHECK(table[0].steps_factor == 1);
    CHECK(table[1].steps_factor == 2);
    CHECK(table[2].steps_factor == 4);
    CHECK(table[2].dt == doctest::Approx(0.025));
    CHECK(table[0].max_difference == doctest::Approx(8.0));
    CHECK(table[1].max_difference == doctest::Approx(4.0));
    CHECK(table[2].max_difference == doctest::Approx(2.0));
    CHECK(table[1].step_error == doctest::Approx(2.0));
  }
  SUBCASE("growing differences are degenerate convergence") {
    auto runner = [](int factor) {
      ErrorPlanes g;
      g.mean = {factor == 1 ? 1.0 : 10.0};
      g.comparison = {0.0};
      return std::make_pair(0.1 / factor, std::vector<ErrorPlanes>{g});
    };
    CHECK_THROWS_AS(xcheck(2, runner), SimError);
  }
  SUBCASE("missing comparisons are configuration errors") {
    auto runner = [](int factor) {
      ErrorPlanes g;
      g.mean = {1.0};
      return std::make_pair(0.1 / factor, std::vector<ErrorPlanes>{g});
    };
    CHECK_THROWS_AS(xcheck(1, runner), SimError);
    CHECK_THROWS_AS(xcheck(0, [](int) {
      return std::make_pair(0.1, std::vector<ErrorPlanes>{});
    }), SimError);
  }
  SUBCASE("level failures propagate") {
    auto runner = [](int factor) -> std::pair<double, std::vector<ErrorPlanes>> {
      if (factor > 1) throw SimError(ErrKind::divergence, "field blew up");
      ErrorPlanes g;
      g.mean = {1.0};
      g.comparison = {0.0};
      return {0.1, {g}};
    };
    CHECK_THROWS_AS(xcheck(2, runner), SimError);
  }
}

TEST_CASE("xcheck sees round-off differences on an exact linear model") {
  // da/dt = lambda a through the interaction picture is exact at any step.
  Grid tg = time_only_grid(5, 1.0);
  SpectralWorkspace ws;
  const cplx lambda{-0.7, 0.4};
  const cplx a0{1.0, 0.5};
  auto runner = [&](int factor) {
    const int n = 4 * factor;
    const double h = 1.0 / n;
    Propagator full = build_propagator(
        tg, {1}, {}, [&](const LinearPoint&) { return lambda; }, h);
    StepContext ctx;
    ctx.dtr = h;
    ctx.ws = &ws;
    ctx.full = &full;
    Fields a(1, Field(1, {}, 1));
    a[0].at(0, 0, 0) = a0;
    for (int i = 0; i < n; ++i) {
      ctx.t = i * h;
      a = step(Method::euler, a, NoiseSet{}, ctx);
    }
    const cplx exact = std::exp(lambda) * a0;
    ErrorPlanes g;
    g.mean = {a[0].at(0, 0, 0).real(), a[0].at(0, 0, 0).imag()};
    g.comparison = {exact.real(), exact.imag()};
    return std::make_pair(h, std::vector<ErrorPlanes>{g});
  };
  auto table = xcheck(2, runner);
  for (const auto& row : table) CHECK(row.max_difference < 1e-12);
}

TEST_CASE("xcheck measures first-order strong convergence of the midpoint") {
  // Kubo oscillator da = i g a o dW with one shared Brownian path across
  // levels: the strong error of the midpoint method halves per level.  The
  // coupling g keeps |g h w / 2| small in the Gaussian tails, where the
  // four-pass midpoint iteration would otherwise leave a residual that
  // swamps the O(h) phase error being measured.
  Grid tg = time_only_grid(3, 1.0);
  const int E = 64, F = 32;
  const double hf = 1.0 / F;
  const double g_coupling = 0.3;
  NoiseSpec spec;
  spec.noises = {1};
  RngState rng{606, 0};
  std::vector<NoiseSet> fine;
  for (int k = 0; k < F; ++k)
    fine.push_back(
        propagation_noise(tg, spec, hf, E, rng, kCtxPropagation, k, nullptr));

  // Exact endpoint for the piecewise-constant driving: a = exp(i g W(1)).
  std::vector<cplx> exact(E);
  for (int e = 0; e < E; ++e) {
    double W = 0;
    for (int k = 0; k < F; ++k) W += hf * fine[k].cells[0].at(0, 0, e).real();
    exact[e] = std::exp(cplx{0.0, g_coupling * W});
  }

  auto runner = [&](int factor) {
    const int steps = 8 * factor;
    const int group = F / steps;
    const double h = 1.0 / steps;
    Fields a(1, Field(1, {}, E));
    for (int e = 0; e < E; ++e) a[0].at(0, 0, e) = cplx{1.0, 0.0};
    StepContext ctx;
    ctx.dtr = h;
    ctx.deriv = [E, g_coupling](const Fields& f, const NoiseSet& w, double) {
      Fields d(1, Field(1, {}, E));
      for (int e = 0; e < E; ++e)
        d[0].at(0, 0, e) =
            cplx{0.0, g_coupling * w.cells[0].at(0, 0, e).real()} *
            f[0].at(0, 0, e);
      return d;
    };
    // Pairwise tree reduction keeps every fine cell at equal weight.
    std::function<NoiseSet(int, int)> block = [&](int lo, int len) {
      if (len == 1) return fine[static_cast<std::size_t>(lo)];
      return coarsen_noise(block(lo, len / 2), block(lo + len / 2, len / 2));
    };
    for (int s = 0; s < steps; ++s) {
      NoiseSet w = block(s * group, group);
      ctx.t = s * h;
      a = step(Method::mp, a, w, ctx);
    }
    double acc = 0;
    for (int e = 0; e < E; ++e) acc += std::norm(a[0].at(0, 0, e) - exact[e]);
    ErrorPlanes g;
    g.mean = {std::sqrt(acc / E)};
    g.comparison = {0.0};
    return std::make_pair(h, std::vector<ErrorPlanes>{g});
  };

  auto table = xcheck(3, runner);
  const double r01 = table[0].max_difference / table[1].max_difference;
  const double r12 = table[1].max_difference / table[2].max_difference;
  CHECK(r01 > 1.6);
  CHECK(r01 < 2.4);
  CHECK(r12 > 1.6);
  CHECK(r12 < 2.4);
}
