#include "stochastica/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace stochastica {

double richardson_factor(int order) {
  require(order >= 0, ErrKind::config, "extrapolation order must be >= 0");
  if (order == 0) return 0.0;
  require(order < 63, ErrKind::config, "extrapolation order is unreasonably large");
  return 1.0 / (std::pow(2.0, order) - 1.0);
}

Extrapolation extrapolate(const std::vector<double>& fine,
                          const std::vector<double>& coarse, int order) {
  require(fine.size() == coarse.size(), ErrKind::config,
          "fine and coarse results must have equal lengths");
  const double eps = richardson_factor(order);
  Extrapolation out;
  out.value.resize(fine.size());
  out.step_error.resize(fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) {
    if (order == 0) {
      out.value[i] = fine[i];
      out.step_error[i] = std::abs(fine[i] - coarse[i]);
    } else {
      out.value[i] = (1.0 + eps) * fine[i] - eps * coarse[i];
      out.step_error[i] = std::abs(out.value[i] - fine[i]);
    }
  }
  return out;
}

SamplingStats sampling_stats(
    const std::vector<std::vector<double>>& sub_means) {
  const std::size_t M = sub_means.size();
  require(M >= 1, ErrKind::config, "sampling statistics need a sub-ensemble");
  const std::size_t P = sub_means[0].size();
  for (const auto& s : sub_means)
    require(s.size() == P, ErrKind::config,
            "sub-ensemble means must have equal lengths");

  SamplingStats out;
  out.mean.assign(P, 0.0);
  for (const auto& s : sub_means)
    for (std::size_t i = 0; i < P; ++i) out.mean[i] += s[i];
  for (double& m : out.mean) m /= static_cast<double>(M);
  if (M < 2) return out;  // sigma plane absent, not zero

  out.sigma.assign(P, 0.0);
  for (const auto& s : sub_means)
    for (std::size_t i = 0; i < P; ++i) {
      const double d = s[i] - out.mean[i];
      out.sigma[i] += d * d;
    }
  const double fac = 1.0 / (static_cast<double>(M - 1) * static_cast<double>(M));
  for (double& s : out.sigma) s = std::sqrt(s * fac);
  return out;
}

ChiSquared chi_squared(const std::vector<double>& mean,
                       const std::vector<double>& sampling_sigma,
                       const std::vector<double>& comparison,
                       const std::vector<double>& comp_sigma, double cutoff,
                       double mincount, double scale) {
  const std::size_t P = mean.size();
  require(comparison.size() == P, ErrKind::config,
          "chi-squared needs a comparison for every point");
  require(sampling_sigma.empty() || sampling_sigma.size() == P, ErrKind::config,
          "sampling-error plane length mismatch");
  require(comp_sigma.empty() || comp_sigma.size() == P, ErrKind::config,
          "comparison-error plane length mismatch");

  ChiSquared out;
  for (std::size_t i = 0; i < P; ++i) {
    if (scale > 0) {
      const double N = scale * mean[i];
      const double E = scale * comparison[i];
      if (!(N > mincount && E > mincount)) continue;
      const double d = N - E;
      out.chi2 += d * d / E;
      ++out.k;
    } else {
      if (!(mean[i] > cutoff && comparison[i] > cutoff)) continue;
      const double ss = sampling_sigma.empty() ? 0.0 : sampling_sigma[i];
      const double se = comp_sigma.empty() ? 0.0 : comp_sigma[i];
      const double var = ss * ss + se * se;
      if (var <= 0) {
        ++out.excluded;
        continue;
      }
      const double d = mean[i] - comparison[i];
      out.chi2 += d * d / var;
      ++out.k;
    }
  }
  return out;
}

ChiSquared g_squared(const std::vector<double>& counts,
                     const std::vector<double>& expected, double mincount) {
  require(counts.size() == expected.size(), ErrKind::config,
          "likelihood needs an expected count for every bin");
  double sumN = 0, sumE = 0;
  std::vector<char> in(counts.size(), 0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > mincount && expected[i] > mincount) {
      in[i] = 1;
      sumN += counts[i];
      sumE += expected[i];
    }
  }
  ChiSquared out;
  if (sumE <= 0) return out;
  const double rescale = sumN / sumE;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!in[i]) continue;
    out.chi2 += 2.0 * counts[i] * std::log(counts[i] / (expected[i] * rescale));
    ++out.k;
  }
  return out;
}

int ErrorPlanes::errors() const {
  if (!sampling.empty()) return 3;
  if (!step.empty()) return 2;
  return mean.empty() ? 0 : 1;
}

namespace {

double reduce_plane(const std::vector<double>& v, bool rms) {
  if (v.empty()) return 0.0;
  if (!rms) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double acc = 0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double rms_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double acc = 0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

constexpr double kErrorFloor = 1e-10;

}  // namespace

ErrorVector summarize(const std::vector<ErrorPlanes>& graphs, bool relerr,
                      bool rmserr, double elapsed,
                      std::vector<GraphErrorSummary>* per_graph) {
  std::vector<double> cat_step, cat_sampling, cat_comparison, cat_chi;
  if (per_graph) per_graph->clear();

  for (const ErrorPlanes& g : graphs) {
    const std::size_t P = g.mean.size();
    auto check_len = [&](const std::vector<double>& v, const char* what) {
      require(v.empty() || v.size() == P, ErrKind::config, what);
    };
    check_len(g.step, "step plane length mismatch");
    check_len(g.sampling, "sampling plane length mismatch");
    check_len(g.comparison, "comparison plane length mismatch");
    check_len(g.comp_sys, "comparison systematic plane length mismatch");
    check_len(g.comp_stat, "comparison statistical plane length mismatch");

    GraphErrorSummary s;
    s.label = g.label;
    double norm = 1.0;
    if (relerr) {
      const double maxcomp = g.comparison.empty() ? 0.0 : max_abs(g.comparison);
      const double cand = maxcomp > 0 ? maxcomp : max_abs(g.mean);
      if (cand > 0) norm = cand;
    }
    s.normalizer = norm;

    if (!g.step.empty()) {
      s.has_step = true;
      s.step = reduce_plane(g.step, rmserr) / norm;
      if (s.step > kErrorFloor) cat_step.push_back(s.step);
    }
    if (!g.sampling.empty()) {
      s.has_sampling = true;
      s.sampling = reduce_plane(g.sampling, rmserr) / norm;
      if (s.sampling > kErrorFloor) cat_sampling.push_back(s.sampling);
    }
    if (!g.comparison.empty()) {
      s.has_comparison = true;
      std::vector<double> diff(P);
      for (std::size_t i = 0; i < P; ++i) diff[i] = g.mean[i] - g.comparison[i];
      s.comparison = reduce_plane(diff, rmserr) / norm;
      if (s.comparison > kErrorFloor) cat_comparison.push_back(s.comparison);

      const bool have_sigma = !g.sampling.empty() || !g.comp_stat.empty();
      if (g.scale > 0 || have_sigma) {
        const ChiSquared c = chi_squared(g.mean, g.sampling, g.comparison,
                                         g.comp_stat, g.cutoff, g.mincount,
                                         g.scale);
        if (c.k > 0) {
          s.has_chi2 = true;
          s.chi2 = c.chi2;
          s.chi2_k = c.k;
          cat_chi.push_back(c.chi2 / static_cast<double>(c.k));
        }
      }
    }
    if (per_graph) per_graph->push_back(std::move(s));
  }

  ErrorVector ev;
  ev.elapsed = elapsed;
  ev.step = rms_of(cat_step);
  ev.sampling = rms_of(cat_sampling);
  ev.comparison = rms_of(cat_comparison);
  ev.chi2_per_k = rms_of(cat_chi);
  std::vector<double> cats;
  if (!cat_step.empty()) cats.push_back(ev.step);
  if (!cat_sampling.empty()) cats.push_back(ev.sampling);
  if (!cat_comparison.empty()) cats.push_back(ev.comparison);
  ev.total = rms_of(cats);
  return ev;
}

void print_error_report(const ErrorVector& ev,
                        const std::vector<GraphErrorSummary>& per_graph,
                        int verbose, std::ostream& os) {
  if (verbose < 0) return;
  os << "Errors (step error is the full difference |extrapolated - fine|):\n";
  os << "  total " << ev.total << ", step " << ev.step << ", sampling "
     << ev.sampling << ", comparison " << ev.comparison << ", chi2/k "
     << ev.chi2_per_k << ", elapsed " << ev.elapsed << " s\n";
  if (verbose < 1) return;
  for (std::size_t n = 0; n < per_graph.size(); ++n) {
    const GraphErrorSummary& s = per_graph[n];
    os << "  graph " << (n + 1);
    if (!s.label.empty()) os << " (" << s.label << ")";
    os << ":";
    if (s.has_step) os << " step=" << s.step;
    if (s.has_sampling) os << " samp=" << s.sampling;
    if (s.has_comparison) os << " diff=" << s.comparison;
    if (s.has_chi2)
      os << " chi2/k=" << s.chi2 / static_cast<double>(s.chi2_k)
         << " (k=" << s.chi2_k << ")";
    if (!s.has_step && !s.has_sampling && !s.has_comparison) os << " no errors";
    os << "\n";
  }
}

std::vector<XcheckLevel> xcheck(int levels, const XcheckRunner& run) {
  require(levels >= 1, ErrKind::config, "xcheck needs at least one level");
  require(static_cast<bool>(run), ErrKind::config, "xcheck needs a runner");

  std::vector<XcheckLevel> table;
  for (int lvl = 0; lvl < levels; ++lvl) {
    XcheckLevel row;
    row.steps_factor = 1 << lvl;
    auto [dt, planes] = run(row.steps_factor);
    row.dt = dt;

    bool any_comparison = false;
    for (const ErrorPlanes& g : planes) {
      if (g.comparison.empty()) continue;
      any_comparison = true;
      require(g.comparison.size() == g.mean.size(), ErrKind::config,
              "comparison plane length mismatch");
      for (std::size_t i = 0; i < g.mean.size(); ++i)
        row.max_difference = std::max(row.max_difference,
                                      std::abs(g.mean[i] - g.comparison[i]));
    }
    require(any_comparison, ErrKind::config,
            "xcheck needs at least one comparison plane");

    const ErrorVector ev = summarize(planes, false, true, 0.0);
    row.step_error = ev.step;
    row.sampling_error = ev.sampling;

    if (!table.empty()) {
      const double prev = table.back().max_difference;
      require(row.max_difference <= 2.0 * prev + 1e-12, ErrKind::degenerate,
              "comparison difference grew while the step size shrank");
    }
    table.push_back(row);
  }
  return table;
}

}  // namespace stochastica
