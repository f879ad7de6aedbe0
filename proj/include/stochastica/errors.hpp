#pragma once
// Step-size and sampling error machinery: Richardson extrapolation of
// fine/coarse check pairs, sub-ensemble statistics, chi-squared and
// maximum-likelihood goodness of fit, normalized error summaries, and the
// convergence checker that reruns a simulation at successively halved steps.
//
// All operations work on flat real arrays: graph data planes are real-valued,
// with one entry per (line, space point, time point) in any consistent order,
// as long as every plane of one graph uses the same order.

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "stochastica/core.hpp"

namespace stochastica {

// Richardson step-size factor eps(n) = 1/(2^n - 1) = (1, 1/3, 1/7, ...).
// eps(0) = 0: no extrapolation, the raw fine result is kept.
double richardson_factor(int order);

struct Extrapolation {
  std::vector<double> value;       // best estimate at the fine step size
  std::vector<double> step_error;  // |value - fine|: the full difference
};

// Combine results computed with steps dt (fine) and 2*dt (coarse).
// order 0: value = fine, error = |fine - coarse|.
// order n: value = (1+eps)*fine - eps*coarse, error = eps*|fine - coarse|.
Extrapolation extrapolate(const std::vector<double>& fine,
                          const std::vector<double>& coarse, int order);

struct SamplingStats {
  std::vector<double> mean;
  // Standard deviation of the mean, estimated from the spread of the
  // sub-ensemble means; empty (absent, not zero) when fewer than two.
  std::vector<double> sigma;
};

SamplingStats sampling_stats(const std::vector<std::vector<double>>& sub_means);

struct ChiSquared {
  double chi2 = 0;
  long k = 0;         // number of contributing points
  long excluded = 0;  // points dropped for zero denominators after cutoffs
};

// Goodness of fit between a measured plane and a comparison plane.
//   scale == 0 (variance mode): chi2 = sum (p-e)^2 / (sigma^2 + sigma_e^2)
//     over points with p, e > cutoff; points whose combined variance is zero
//     are excluded and tallied.
//   scale > 0 (count mode): N = scale*p, E = scale*e, chi2 = sum (N-E)^2 / E
//     over bins with N, E > mincount.
// Empty sigma planes contribute zero variance.
ChiSquared chi_squared(const std::vector<double>& mean,
                       const std::vector<double>& sampling_sigma,
                       const std::vector<double>& comparison,
                       const std::vector<double>& comp_sigma, double cutoff,
                       double mincount, double scale);

// Maximum-likelihood statistic G^2 = 2 sum N ln(N/E) over bins with
// N, E > mincount, with E rescaled so that sum N = sum E over those bins.
ChiSquared g_squared(const std::vector<double>& counts,
                     const std::vector<double>& expected, double mincount);

// The per-graph data planes, indexed by the check index c = 1..6:
// mean, step error, sampling error, comparison, comparison systematic error,
// comparison statistical error.  Planes beyond the available data stay empty;
// non-empty planes must match the mean plane's length.
struct ErrorPlanes {
  std::string label;
  std::vector<double> mean;        // c = 1
  std::vector<double> step;        // c = 2
  std::vector<double> sampling;    // c = 3
  std::vector<double> comparison;  // c = 4
  std::vector<double> comp_sys;    // c = 5
  std::vector<double> comp_stat;   // c = 6

  double cutoff = 1e-12;  // density cutoff for variance-mode chi-squared
  double mincount = 10;   // count cutoff for count-mode chi-squared
  double scale = 0;       // counts per unit density; 0 selects variance mode

  // Largest populated error-plane index: 0 empty, 1 mean only, 2 with step
  // errors, 3 with sampling errors.
  int errors() const;
};

struct GraphErrorSummary {
  std::string label;
  double step = 0, sampling = 0, comparison = 0;
  bool has_step = false, has_sampling = false, has_comparison = false;
  double normalizer = 1.0;
  double chi2 = 0;
  long chi2_k = 0;
  bool has_chi2 = false;
};

// The six-component error vector: RMS totals over the categories that have
// any errors, the goodness of fit, and the elapsed time.
struct ErrorVector {
  double total = 0;       // RMS over step/sampling/comparison categories
  double step = 0;        // RMS over graphs with step errors
  double sampling = 0;    // RMS over graphs with sampling errors
  double comparison = 0;  // RMS over graphs with comparisons
  double chi2_per_k = 0;  // RMS over graphs with a valid chi-squared
  double elapsed = 0;     // seconds, supplied by the caller
};

// Reduce per-graph planes to normalized per-graph errors and category totals.
// relerr: normalize by the largest |comparison| (when present and nonzero),
// else the largest |mean|; skipped when the normalizer is zero or relerr is
// off.  rmserr selects RMS reduction over points; otherwise the maximum is
// used.  Per-graph values at or below 1e-10 do not contribute to category
// totals, and categories with no contributions are ignored in the final RMS.
ErrorVector summarize(const std::vector<ErrorPlanes>& graphs, bool relerr,
                      bool rmserr, double elapsed,
                      std::vector<GraphErrorSummary>* per_graph = nullptr);

// Print the error summary: the category totals at any verbosity, plus the
// per-graph table at verbosity >= 1.
void print_error_report(const ErrorVector& ev,
                        const std::vector<GraphErrorSummary>& per_graph,
                        int verbose, std::ostream& os);

struct XcheckLevel {
  int steps_factor = 1;
  double dt = 0;
  double max_difference = 0;  // max |mean - comparison| over graphs and points
  double step_error = 0;      // absolute RMS category totals at this level
  double sampling_error = 0;
};

// One convergence-check run: given the factor by which to multiply the step
// count, return the computational step actually used and the resulting data
// planes.  At least one graph must carry a comparison plane.
using XcheckRunner =
    std::function<std::pair<double, std::vector<ErrorPlanes>>(int steps_factor)>;

// Run the simulation `levels` times, doubling the step count each time, and
// tabulate dt, the maximum comparison difference, and the estimated errors.
// The differences must not grow: a level exceeding twice the previous
// difference (beyond round-off) is a degenerate-convergence error.  Strict
// monotonicity is not required because sampling floors leave the difference
// fluctuating once step errors are below it.
std::vector<XcheckLevel> xcheck(int levels, const XcheckRunner& run);

}  // namespace stochastica
