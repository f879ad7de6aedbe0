#pragma once
// Central finite-difference derivatives with periodic, Dirichlet, and
// Robin/Neumann boundary handling, plus boundary-value re-imposition after
// interaction-picture propagation.

#include <vector>

#include "stochastica/boundaries.hpp"
#include "stochastica/core.hpp"
#include "stochastica/lattice.hpp"

namespace stochastica {

// First derivative along grid dimension `dim` (1 = x, 2 = y, ...).
// Interior: (a_{i+1} - a_{i-1})/(2 dx).  Boundaries: periodic wraps;
// Dirichlet returns the periodic formula (the imposed value overrides it in
// time evolution); Robin returns the prescribed derivative exactly.
// `comps` selects components (empty = all); the result holds the selected
// components in order.
Field d1(const Field& a, const Grid& g, int dim, int cell,
         const BoundarySpec& bounds, const BoundaryValues& bvals,
         const std::vector<int>& comps = {});

// Second derivative along `dim`.  Interior: (a_{i+1} - 2a_i + a_{i-1})/dx^2.
// Boundaries extend the lattice by a ghost point: periodic wraps; Dirichlet
// uses the stored boundary value as the ghost; Robin uses the ghost implied
// by the prescribed derivative, giving (2/dx^2)[a_2 - a_1 - b dx] at the
// lower end (first-order there, second-order in the interior).
Field d2(const Field& a, const Grid& g, int dim, int cell,
         const BoundarySpec& bounds, const BoundaryValues& bvals,
         const std::vector<int>& comps = {});

// Re-impose explicit boundary values on the field set (called after each
// interaction-picture propagation when explicit values are present):
// Dirichlet rows are pinned to b; Robin rows are set from the neighbour row
// and the prescribed derivative (a_1 = a_2 - b dx, a_N = a_{N-1} + b dx).
// Axes without stored values are left untouched.
void impose_boundaries(Fields& a, const Grid& g, const BoundarySpec& bounds,
                       const BoundaryValues& bvals);

}  // namespace stochastica
