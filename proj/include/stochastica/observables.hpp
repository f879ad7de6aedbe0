#pragma once
// Observable evaluation over trajectories: trapezoidal space integrals and
// lattice averages, probability binning, step-averaged series for time-domain
// spectra, the windowed temporal Fourier transform, and the per-graph
// reduction pipeline (transform -> observe -> mean / bin / scatter).

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "stochastica/core.hpp"
#include "stochastica/lattice.hpp"
#include "stochastica/randoms.hpp"
#include "stochastica/spectral.hpp"

namespace stochastica {

// ---------------------------------------------------------------------------
// Space integrals and averages

// Per-dimension coordinate bounds; entries with lo > hi leave the dimension
// unbounded.  Bounds are interpreted on the position axes.
struct IntegrationBounds {
  std::vector<std::array<double, 2>> range;  // [dimensions][lo, hi]
};

// Trapezoidal integral over the dimensions selected by measure(j) > 0, where
// the measure value is the step used (pass dx entries for position space and
// dk entries after an output transform; dimension 0 is time and is ignored).
// The quadrature follows the domain topology per dimension: a bounded
// dimension spans [O, O+R] and takes half-weight endpoints, while a periodic
// dimension (flagged in `periodic`, full-dimension vector, empty = none) is a
// closed loop of length N*dx on which every point owns one full cell.
// Optional bounds restrict each dimension to the grid points inside
// [lo, hi]; the restricted sub-range takes half-weight endpoints.  Integrated
// dimensions collapse to singletons.  Selected dimensions must carry the full
// grid point count.
Field integrate(const Field& o, const std::vector<double>& measure,
                const Grid& g, const IntegrationBounds* bounds = nullptr,
                const std::vector<char>* periodic = nullptr);

// Plain mean over the space dimensions flagged by flags(j) > 0 (dimension 0
// is time and is ignored; an empty vector averages every space dimension).
// Averaged dimensions collapse to singletons.
Field grid_average(const Field& o, const std::vector<double>& flags,
                   const Grid& g);

// ---------------------------------------------------------------------------
// Probability binning

// Joint probability density of the real parts of the sample lines.
// binranges[v] lists uniform-width bin centers for line v (width = center
// spacing; at least two centers); an empty list marginalizes that line.
// Lines beyond the binranges list and binranges beyond the line count are
// ignored.  A sample lands in bin j of a variable iff |o - c_j| < width/2
// (strictly), and contributes 1/(prod(widths) * n_samples) to its joint bin;
// samples outside any binned range are dropped, so the total mass equals the
// fraction of samples inside the binned domain.  The output holds one
// component per joint bin with the first kept variable varying fastest,
// space dimensions preserved and the ensemble collapsed; `kept_centers`
// (optional) receives the center lists of the kept variables.  Non-uniform
// center spacing or no binned variable at all is a configuration error.
Field bin_probability(const Field& samples,
                      const std::vector<std::vector<double>>& binranges,
                      std::vector<std::vector<double>>* kept_centers = nullptr);

// ---------------------------------------------------------------------------
// Step-averaged series and temporal spectra

// Midpoint averages of a fine trajectory, used for every output when any
// temporal spectrum is requested.  Without a check pass, L samples map to
// L-1 midpoints (a_j + a_{j+1})/2 at times (t_j + t_{j+1})/2.  With a check
// pass the fine chain holds both half-step points of each coarse step (L odd)
// and averages (a_j + 2 a_{j+1/2} + a_{j+1})/4 over the same intervals as the
// coarse chain, so fine and coarse spectra stay comparable.
std::vector<Field> spectral_field_average(const std::vector<Field>& pts,
                                          bool check_pass);

// Windowed temporal transform a~(w) = (2*pi)^{-1/2} Integral a(t) e^{+iwt} dt
// of L midpoint samples spaced h starting at t0 + h/2: the series is
// zero-padded to pad_len, scaled by h/sqrt(2*pi) with the start phase
// e^{+iw(t0+h/2)}, and the n_keep lowest frequencies are returned in
// graphics-centered order with dw = 2*pi/(pad_len*h).
std::vector<Field> time_spectrum(const std::vector<Field>& midpts, double t0,
                                 double h, int pad_len, int n_keep,
                                 SpectralWorkspace& ws);

// The angular frequencies matching time_spectrum's output bins.
std::vector<double> spectrum_axis(double h, int pad_len, int n_keep);

// ---------------------------------------------------------------------------
// Graph specifications and evaluation

// One output graph: the observe callback maps the field cells at one
// space-time (or frequency) point to a line x space x ensemble array; the
// reduction is the ensemble mean unless binranges selects probability
// binning or scatters > 0 captures raw trajectories.
struct ObserveSpec {
  // Report label for this graph; empty picks a numbered default.
  std::string label;

  // cells: integrated field cell(s) followed by any auxiliary cell(s);
  // the scalar argument is the axis value (time, or omega when transformed).
  std::function<Field(const Fields& cells, double)> observe;

  // Per space-time dimension (index 0 = time): nonzero requests a Fourier
  // transform of every cell before observe runs.
  std::vector<int> transforms;

  // Bin centers per line variable; non-empty switches the graph to a
  // probability density (see bin_probability).
  std::vector<std::vector<double>> binranges;

  // Capture the first `scatters` ensemble members raw instead of averaging.
  int scatters = 0;

  // Optional post-average functional applied to each reduced point.
  std::function<Field(const Field&)> output;

  // Optional analytic reference: axis value -> one value per line.
  std::function<std::vector<cplx>(double)> compare;
};

// Auxiliary-field definition: one extra cell of `auxfields` components
// computed from the integrated fields and the step noise, stored as the
// average over the previous step (the step's noise included).
struct AuxSpec {
  std::function<Field(const Fields&, const NoiseSet&, double)> define;
  int auxfields = 0;
};

// One lane's stored trajectory.  `cells[j]` holds the field cell(s) plus any
// auxiliary cell(s) at sample j.  A stored series samples the output points
// t_j directly.  A midpoint series (required whenever any graph requests a
// temporal transform) holds the (stored_points-1)*steps fine-step midpoint
// averages spaced h = dt/steps from t0 + h/2.
struct TrajectorySeries {
  std::vector<double> t;      // sample times
  std::vector<Fields> cells;  // per sample: field cell(s) + auxiliary cell(s)
  bool midpoint = false;
  double t0 = 0;
  double h = 0;           // midpoint sample spacing
  int stored_points = 0;  // output-grid length N
  int steps = 1;          // fine steps per output interval
};

// One reduced graph: a value per axis point.  Mean graphs carry one
// component per line with the ensemble collapsed; binned graphs carry one
// component per joint bin (densities in the real part); scatter graphs keep
// the first `scatters` ensemble members.
struct GraphResult {
  bool spectral = false;      // axis holds omega instead of time
  std::vector<double> axis;   // stored times, or graphics-ordered omega
  std::vector<Field> points;  // one reduced field per axis entry
  std::vector<std::vector<double>> bin_centers;  // kept centers when binned
};

// Evaluate every graph over one lane's trajectory.  Cells are transformed
// before observe runs: a temporal flag replaces the time axis by the
// truncated spectrum of the midpoint series (pad to stored_points*steps,
// keep stored_points bins), and space flags apply the physics-normalized
// output transform to every cell.  Graphs without a temporal flag evaluated
// on a midpoint series output at the stored grid, taking the midpoint of the
// last fine step before each stored point (the first midpoint at point 0).
// Requesting a temporal transform on a stored series, a scatter count above
// the ensemble size, or an observe output whose ensemble dimension does not
// match the series is a configuration error.
std::vector<GraphResult> evaluate_observables(
    const TrajectorySeries& series, const std::vector<ObserveSpec>& specs,
    const Grid& g, SpectralWorkspace& ws);

}  // namespace stochastica
