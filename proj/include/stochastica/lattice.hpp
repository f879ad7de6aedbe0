#pragma once
// Space-time grid construction: coordinate axes, step sizes, momentum axes in
// propagation / graphics / trig conventions, and cell volumes.

#include <vector>

#include "stochastica/core.hpp"

namespace stochastica {

struct GridSpec {
  int dimensions = 1;
  std::vector<int> points;      // [N1..Nd]
  std::vector<double> ranges;   // [R1..Rd]
  std::vector<double> origins;  // [O1..Od]; empty -> defaults O1=0, Oi=-Ri/2
  std::vector<int> steps;       // intermediate steps per output point; empty -> all 1
};

struct Grid {
  int dimensions = 1;
  std::vector<int> points;
  std::vector<double> ranges, origins;
  std::vector<int> steps;
  std::vector<double> dx;           // dx_i = R_i/(N_i-1)
  double dt = 0;                    // dx[0]
  std::vector<double> dk_periodic;  // 2*pi/(N_i dx_i)
  std::vector<double> dk_trig;      // pi/((N_i-1) dx_i)
  std::vector<std::vector<double>> r;  // coordinate axes, r[i][n] = O_i + n*dx_i
  double dV = 1;                    // product of spatial dx
  double dkV = 1;                   // product of spatial dk_periodic
  int nspace = 1;                   // product of spatial N_i

  std::vector<int> space_points() const {
    return {points.begin() + 1, points.end()};
  }
};

enum class MomentumOrder { propagation_fft, graphics_centered, trig };

// Build a grid, applying the default origins / steps when unspecified.
Grid build_grid(const GridSpec& spec);

// Momentum axis for one dimension (0-based dim index; dim 0 is time).
// propagation_fft: k_j = j*dk for j <= N/2, (j-N)*dk above (Nyquist positive).
// graphics_centered: k_i = (i - floor((N-1)/2))*dk, dk = 2*pi/(N dx).
// trig: multiples of dk_trig; `half_mode` selects the (j+1/2) ladder used by
// the mixed Dirichlet/Robin transform kinds.
std::vector<double> momentum_axis(const Grid& g, int dim, MomentumOrder order,
                                  bool half_mode = false);

// Index offset of k=0 in the graphics-centered ordering: floor((N-1)/2).
inline int centered_zero_index(int n) { return (n - 1) / 2; }

}  // namespace stochastica
