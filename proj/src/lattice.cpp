#include "stochastica/lattice.hpp"

#include <cmath>

namespace stochastica {

Grid build_grid(const GridSpec& spec) {
  const int d = spec.dimensions;
  require(d >= 1, ErrKind::config, "dimensions must be >= 1");
  require(static_cast<int>(spec.points.size()) == d &&
              static_cast<int>(spec.ranges.size()) == d,
          ErrKind::config, "points/ranges length must equal dimensions");
  require(spec.origins.empty() || static_cast<int>(spec.origins.size()) == d,
          ErrKind::config, "origins length must equal dimensions");

  Grid g;
  g.dimensions = d;
  g.points = spec.points;
  g.ranges = spec.ranges;
  g.origins = spec.origins;
  if (g.origins.empty()) {
    g.origins.assign(d, 0.0);
    for (int i = 1; i < d; ++i) g.origins[i] = -0.5 * g.ranges[i];
  }
  g.steps = spec.steps.empty() ? std::vector<int>(d, 1) : spec.steps;
  if (static_cast<int>(g.steps.size()) < d) g.steps.resize(d, 1);
  for (int i = 1; i < d; ++i)
    require(g.steps[i] == 1, ErrKind::unsupported,
            "spatial refinement via steps is not supported; steps apply to dimension 1 only");
  require(g.steps[0] >= 1, ErrKind::config, "steps(1) must be >= 1");

  g.dx.resize(d);
  g.dk_periodic.resize(d);
  g.dk_trig.resize(d);
  g.r.resize(d);
  for (int i = 0; i < d; ++i) {
    require(g.ranges[i] > 0, ErrKind::config, "ranges must be positive");
    require(g.points[i] >= 2, ErrKind::config,
            "at least 2 points per plotted dimension");
    g.dx[i] = g.ranges[i] / (g.points[i] - 1);
    g.dk_periodic[i] = 2.0 * M_PI / (g.points[i] * g.dx[i]);
    g.dk_trig[i] = M_PI / ((g.points[i] - 1) * g.dx[i]);
    g.r[i].resize(g.points[i]);
    for (int n = 0; n < g.points[i]; ++n) g.r[i][n] = g.origins[i] + n * g.dx[i];
  }
  g.dt = g.dx[0];
  for (int i = 1; i < d; ++i) {
    g.dV *= g.dx[i];
    g.dkV *= g.dk_periodic[i];
    g.nspace *= g.points[i];
  }
  return g;
}

std::vector<double> momentum_axis(const Grid& g, int dim, MomentumOrder order,
                                  bool half_mode) {
  require(dim >= 0 && dim < g.dimensions, ErrKind::config,
          "momentum_axis: dimension out of range");
  const int n = g.points[dim];
  std::vector<double> k(n);
  switch (order) {
    case MomentumOrder::propagation_fft: {
      const double dk = g.dk_periodic[dim];
      for (int j = 0; j < n; ++j) k[j] = (j <= n / 2 ? j : j - n) * dk;
      break;
    }
    case MomentumOrder::graphics_centered: {
      const double dk = g.dk_periodic[dim];
      const int off = centered_zero_index(n);
      for (int j = 0; j < n; ++j) k[j] = (j - off) * dk;
      break;
    }
    case MomentumOrder::trig: {
      const double dk = g.dk_trig[dim];
      for (int j = 0; j < n; ++j) k[j] = (half_mode ? j + 0.5 : j) * dk;
      break;
    }
  }
  return k;
}

}  // namespace stochastica
