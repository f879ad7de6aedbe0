#pragma once
// Boundary-condition descriptors shared by the spectral and finite-difference
// operators: per-axis type pairs, the per-field boundary matrix, and the
// boundary-value container filled by static specs or callbacks.

#include <vector>

#include "stochastica/core.hpp"

namespace stochastica {

// Types at the two ends of one (cell, space dimension, component) axis:
//   -1 Robin/Neumann (derivative prescribed), 0 periodic, +1 Dirichlet.
struct BoundaryPair {
  int lo = 0;
  int hi = 0;
  friend bool operator==(const BoundaryPair&, const BoundaryPair&) = default;
};

inline bool is_periodic(BoundaryPair p) { return p.lo == 0 && p.hi == 0; }

inline void validate_pair(BoundaryPair p) {
  require(p.lo >= -1 && p.lo <= 1 && p.hi >= -1 && p.hi <= 1, ErrKind::config,
          "boundary types must be -1 (Robin), 0 (periodic), or +1 (Dirichlet)");
  require((p.lo == 0) == (p.hi == 0), ErrKind::config,
          "periodic boundaries cannot be combined with Dirichlet/Robin on one axis");
}

// Boundary matrix: pairs[cell][space dim][component], defaulting to periodic
// wherever entries are absent.
struct BoundarySpec {
  std::vector<std::vector<std::vector<BoundaryPair>>> pairs;

  BoundaryPair get(int cell, int sdim, int comp) const {
    if (cell < static_cast<int>(pairs.size()) &&
        sdim < static_cast<int>(pairs[cell].size()) &&
        comp < static_cast<int>(pairs[cell][sdim].size())) {
      return pairs[cell][sdim][comp];
    }
    return {};
  }

  bool all_periodic() const {
    for (const auto& c : pairs)
      for (const auto& d : c)
        for (const auto& p : d)
          if (!is_periodic(p)) return false;
    return true;
  }
};

// Boundary values b(component, end, ensemble) per (cell, space dimension):
// field values at Dirichlet ends, derivative values at Robin ends.  Stored as
// a Field with a two-point pseudo-space axis: index 0 = lower, 1 = upper.
struct BoundaryValues {
  std::vector<std::vector<Field>> vals;  // [cell][sdim]

  bool empty() const { return vals.empty(); }

  // nullptr means all-zero boundary values (the default).
  const Field* get(int cell, int sdim) const {
    if (cell < static_cast<int>(vals.size()) &&
        sdim < static_cast<int>(vals[cell].size()) &&
        vals[cell][sdim].v.size() > 0) {
      return &vals[cell][sdim];
    }
    return nullptr;
  }
};

}  // namespace stochastica
