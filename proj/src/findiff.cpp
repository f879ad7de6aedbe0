#include "stochastica/findiff.hpp"

namespace stochastica {

namespace {

struct DimGeometry {
  int n = 1;
  int inner = 1;  // trailing spatial extents x ensemble (contiguous)
  int outer = 1;
};

DimGeometry geometry(const Field& a, int sdim) {
  DimGeometry geo;
  geo.n = a.space[sdim];
  geo.inner = a.nens;
  for (std::size_t e = sdim + 1; e < a.space.size(); ++e) geo.inner *= a.space[e];
  for (int e = 0; e < sdim; ++e) geo.outer *= a.space[e];
  return geo;
}

int check_dim(const Field& a, const Grid& g, int dim) {
  require(dim != 0, ErrKind::unsupported,
          "time derivatives are not available; dimension 1 is time");
  require(dim >= 1 && dim < g.dimensions, ErrKind::config,
          "derivative dimension out of range");
  const int sdim = dim - 1;
  require(sdim < static_cast<int>(a.space.size()), ErrKind::config,
          "field has no such space dimension");
  require(a.space[sdim] >= 3, ErrKind::config,
          "finite differences require at least 3 points");
  return sdim;
}

std::vector<int> resolve_comps(const Field& a, const std::vector<int>& comps) {
  if (comps.empty()) {
    std::vector<int> all(a.nf);
    for (int f = 0; f < a.nf; ++f) all[f] = f;
    return all;
  }
  for (int f : comps)
    require(f >= 0 && f < a.nf, ErrKind::config,
            "derivative component index out of range");
  return comps;
}

// Boundary value for (comp, end, ensemble); zero when no values are stored.
inline cplx bval(const Field* bv, int comp, int end, int e) {
  return bv ? bv->at(comp, end, e) : cplx{};
}

}  // namespace

Field d1(const Field& a, const Grid& g, int dim, int cell,
         const BoundarySpec& bounds, const BoundaryValues& bvals,
         const std::vector<int>& comps) {
  const int sdim = check_dim(a, g, dim);
  const DimGeometry geo = geometry(a, sdim);
  const std::vector<int> sel = resolve_comps(a, comps);
  const double inv2dx = 1.0 / (2.0 * g.dx[dim]);
  const Field* bv = bvals.get(cell, sdim);

  Field out(static_cast<int>(sel.size()), a.space, a.nens);
  for (std::size_t oc = 0; oc < sel.size(); ++oc) {
    const int f = sel[oc];
    const BoundaryPair pair = bounds.get(cell, sdim, f);
    validate_pair(pair);
    const cplx* src = a.comp(f);
    cplx* dst = out.comp(static_cast<int>(oc));
    const std::size_t inner = geo.inner;
    for (int o = 0; o < geo.outer; ++o) {
      const cplx* base = src + static_cast<std::size_t>(o) * geo.n * inner;
      cplx* obase = dst + static_cast<std::size_t>(o) * geo.n * inner;
      for (int j = 1; j < geo.n - 1; ++j) {
        const cplx* up = base + (j + 1) * inner;
        const cplx* dn = base + (j - 1) * inner;
        cplx* row = obase + j * inner;
        for (std::size_t i = 0; i < inner; ++i) row[i] = inv2dx * (up[i] - dn[i]);
      }
      // Lower boundary row.
      if (pair.lo == -1) {
        const int nens = a.nens;
        for (std::size_t i = 0; i < inner; ++i)
          obase[i] = bval(bv, f, 0, static_cast<int>(i) % nens);
      } else {  // periodic wrap; Dirichlet returns the same formula
        const cplx* up = base + inner;
        const cplx* dn = base + (geo.n - 1) * inner;
        for (std::size_t i = 0; i < inner; ++i) obase[i] = inv2dx * (up[i] - dn[i]);
      }
      // Upper boundary row.
      cplx* top = obase + static_cast<std::size_t>(geo.n - 1) * inner;
      if (pair.hi == -1) {
        const int nens = a.nens;
        for (std::size_t i = 0; i < inner; ++i)
          top[i] = bval(bv, f, 1, static_cast<int>(i) % nens);
      } else {
        const cplx* up = base;  // wraps to the first row
        const cplx* dn = base + (geo.n - 2) * inner;
        for (std::size_t i = 0; i < inner; ++i) top[i] = inv2dx * (up[i] - dn[i]);
      }
    }
  }
  return out;
}

Field d2(const Field& a, const Grid& g, int dim, int cell,
         const BoundarySpec& bounds, const BoundaryValues& bvals,
         const std::vector<int>& comps) {
  const int sdim = check_dim(a, g, dim);
  const DimGeometry geo = geometry(a, sdim);
  const std::vector<int> sel = resolve_comps(a, comps);
  const double dx = g.dx[dim];
  const double invdx2 = 1.0 / (dx * dx);
  const Field* bv = bvals.get(cell, sdim);

  Field out(static_cast<int>(sel.size()), a.space, a.nens);
  for (std::size_t oc = 0; oc < sel.size(); ++oc) {
    const int f = sel[oc];
    const BoundaryPair pair = bounds.get(cell, sdim, f);
    validate_pair(pair);
    const cplx* src = a.comp(f);
    cplx* dst = out.comp(static_cast<int>(oc));
    const std::size_t inner = geo.inner;
    const int nens = a.nens;
    for (int o = 0; o < geo.outer; ++o) {
      const cplx* base = src + static_cast<std::size_t>(o) * geo.n * inner;
      cplx* obase = dst + static_cast<std::size_t>(o) * geo.n * inner;
      for (int j = 1; j < geo.n - 1; ++j) {
        const cplx* up = base + (j + 1) * inner;
        const cplx* mid = base + j * inner;
        const cplx* dn = base + (j - 1) * inner;
        cplx* row = obase + j * inner;
        for (std::size_t i = 0; i < inner; ++i)
          row[i] = invdx2 * (up[i] - 2.0 * mid[i] + dn[i]);
      }
      // Lower boundary row with the type's ghost point.
      {
        const cplx* up = base + inner;
        const cplx* mid = base;
        cplx* row = obase;
        if (pair.lo == 0) {
          const cplx* ghost = base + (geo.n - 1) * inner;
          for (std::size_t i = 0; i < inner; ++i)
            row[i] = invdx2 * (up[i] - 2.0 * mid[i] + ghost[i]);
        } else if (pair.lo == 1) {
          for (std::size_t i = 0; i < inner; ++i)
            row[i] = invdx2 *
                     (up[i] - 2.0 * mid[i] + bval(bv, f, 0, static_cast<int>(i) % nens));
        } else {
          for (std::size_t i = 0; i < inner; ++i)
            row[i] = 2.0 * invdx2 *
                     (up[i] - mid[i] - bval(bv, f, 0, static_cast<int>(i) % nens) * dx);
        }
      }
      // Upper boundary row.
      {
        const cplx* dn = base + (geo.n - 2) * inner;
        const cplx* mid = base + (geo.n - 1) * inner;
        cplx* row = obase + static_cast<std::size_t>(geo.n - 1) * inner;
        if (pair.hi == 0) {
          const cplx* ghost = base;
          for (std::size_t i = 0; i < inner; ++i)
            row[i] = invdx2 * (ghost[i] - 2.0 * mid[i] + dn[i]);
        } else if (pair.hi == 1) {
          for (std::size_t i = 0; i < inner; ++i)
            row[i] = invdx2 *
                     (dn[i] - 2.0 * mid[i] + bval(bv, f, 1, static_cast<int>(i) % nens));
        } else {
          for (std::size_t i = 0; i < inner; ++i)
            row[i] = 2.0 * invdx2 *
                     (dn[i] - mid[i] + bval(bv, f, 1, static_cast<int>(i) % nens) * dx);
        }
      }
    }
  }
  return out;
}

void impose_boundaries(Fields& a, const Grid& g, const BoundarySpec& bounds,
                       const BoundaryValues& bvals) {
  if (bvals.empty()) return;
  for (std::size_t c = 0; c < a.size(); ++c) {
    Field& f = a[c];
    const int ds = static_cast<int>(f.space.size());
    for (int sd = 0; sd < ds; ++sd) {
      const Field* bv = bvals.get(static_cast<int>(c), sd);
      if (!bv) continue;  // no explicit values: leave the propagated field
      const DimGeometry geo = geometry(f, sd);
      const double dx = g.dx[sd + 1];
      for (int comp = 0; comp < f.nf; ++comp) {
        const BoundaryPair pair = bounds.get(static_cast<int>(c), sd, comp);
        if (is_periodic(pair)) continue;
        cplx* block = f.comp(comp);
        const std::size_t inner = geo.inner;
        for (int o = 0; o < geo.outer; ++o) {
          cplx* base = block + static_cast<std::size_t>(o) * geo.n * inner;
          cplx* top = base + static_cast<std::size_t>(geo.n - 1) * inner;
          for (std::size_t i = 0; i < inner; ++i) {
            const int e = static_cast<int>(i) % f.nens;
            if (pair.lo == 1) {
              base[i] = bv->at(comp, 0, e);
            } else {
              base[i] = base[inner + i] - bv->at(comp, 0, e) * dx;
            }
            if (pair.hi == 1) {
              top[i] = bv->at(comp, 1, e);
            } else {
              top[i] = *(top + i - inner) + bv->at(comp, 1, e) * dx;
            }
          }
        }
      }
    }
  }
}

}  // namespace stochastica
