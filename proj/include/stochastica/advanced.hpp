#pragma once
// Projected SDE methods on constraint manifolds, and weighted-trajectory
// breeding for equations carrying a per-trajectory log-weight.

#include <vector>

#include "stochastica/stepper.hpp"

namespace stochastica {

// Codimension-one constraint manifold f(a) = 0 acting on the components of a
// single field cell at each (space point, trajectory) independently.
struct Manifold {
  enum class Kind { quadratic, polynomial, catenoid };
  Kind kind = Kind::quadratic;
  std::vector<double> q;   // quadratic: row-major n x n matrix,
                           //   f = sum q_ij x_i x_j - 1
  std::vector<double> vc;  // polynomial: f = sum vc_i x_i^power - 1
  int power = 2;
  int iterations = 4;      // fixed-point passes for the normal projection
};

Manifold quadratic_manifold(std::vector<double> q, int iterations = 4);
Manifold polynomial_manifold(std::vector<double> vc, int power,
                             int iterations = 4);
// f = x1^2 + x2^2 - sinh(x3)^2 - 1; requires exactly three components.
Manifold catenoid_manifold(int iterations = 4);

// Projection options:
//   0 -> the constraint gradient at a (the vector generating the tangential
//        projector), for testing;
//   1 -> tangential projection of d at a: d - g (g.d)/(g.g);
//   2 -> normal projection of a onto the manifold by damped fixed-point
//        iteration x <- x - f(x) g(x)/(g.g), `iterations` passes (d unused);
//   4 -> constraint residual f(a), one value per point (d unused).
// Dot products are bilinear (no conjugation): fields are real in the
// projected-SDE setting.  Throws ErrKind::projection when the normal
// projection fails to reduce the residual, ErrKind::config for bad options
// or mismatched component counts.
Field project(const Manifold& mf, const Field& d, const Field& a, int option);

// Projected integrators: tangentially project every derivative evaluation at
// the evaluation point; Enproj (Euler) and MPnproj (midpoint) additionally
// normally project the result.  MPproj omits the final normal projection.
enum class ProjectedMethod { enproj, mpproj, mpnproj };
const char* projected_method_name(ProjectedMethod m);
ProjectedMethod projected_method_from_name(const std::string& name);

Fields step_projected(ProjectedMethod pm, const Fields& a, const NoiseSet& w,
                      const StepContext& ctx, const Manifold& mf);

// Weighted trajectories: the weight exponent Omega is carried as the LAST
// component of the field, and averages weight each trajectory by exp(Omega).
struct WeightState {
  double thresholdw = 0;     // breeding cut (0 disables breeding)
  double breed_fraction = 0; // fraction of trajectories bred in the last call
};

// One breeding pass over the trajectory ensemble: any trajectory with
// exp(Re Omega) < thresholdw / <exp(Re Omega)> is replaced by a copy of the
// currently most probable trajectory (lowest index among maxima), and both
// copies' exponential weights are halved (Omega -> Omega - ln 2), conserving
// the surviving total weight.  Requires nf >= 2 and a single space point.
// Throws ErrKind::degenerate when every trajectory falls below the cut.
void breed(WeightState& ws, Field& a);

// Weighted ensemble average of one component at the single space point:
// sum_e a_e exp(Omega_e) / sum_e exp(Omega_e).
cplx weighted_average(const Field& a, int comp);

}  // namespace stochastica
