#pragma once
// The six standard integrators with interaction-picture composition.
//
// Every method advances one computational step dtr.  The nonlinear derivative
// D[a, t] is supplied as a callback receiving the current noise set, which is
// held constant across all internal stages of one step.  Linear dynamics are
// applied through prebuilt interaction-picture propagators: methods with one
// IP transform per step use the full-step propagator, methods with two use the
// half-step propagator.  A null propagator means "no linear term".

#include <functional>
#include <string>

#include "stochastica/core.hpp"
#include "stochastica/randoms.hpp"
#include "stochastica/spectral.hpp"

namespace stochastica {

enum class Method { euler, implicit, mp, mpadapt, rk2, rk4 };

// Stochastic calculus a method's fixed points converge to.
enum class Calculus { ito, backward_ito, stratonovich };

struct MethodTraits {
  int ipsteps;     // sequential propagator applications spanning one step
  int det_order;   // deterministic convergence order
  Calculus calculus;
};

MethodTraits method_traits(Method m);
const char* method_name(Method m);
Method method_from_name(const std::string& name);  // ErrKind::config if unknown

// Nonlinear derivative D[a, t]: returns da/dt contributions with the same
// shape as `a`.  The noise set is the draw for the current step.
using DerivFn =
    std::function<Fields(const Fields&, const NoiseSet&, double)>;

// Optional auxiliary-definition hook, invoked with the same arguments
// immediately before every derivative evaluation.
using DefineFn =
    std::function<void(const Fields&, const NoiseSet&, double)>;

struct StepContext {
  double t = 0.0;          // time at the start of the step
  double dtr = 0.0;        // current computational step
  int iterations = 4;      // fixed iteration count for Implicit/MP/MPadapt
  double adapt_threshold = 1.0;  // |a|^2 inversion threshold (MPadapt)

  // P(dtr) for ipsteps=1 methods, P(dtr/2) for ipsteps=2 methods.  Null means
  // no linear term.  Supplying only the wrong-length propagator for the chosen
  // method is a configuration error.
  const Propagator* full = nullptr;
  const Propagator* half = nullptr;
  SpectralWorkspace* ws = nullptr;  // required when a used propagator is set

  DerivFn deriv;    // empty means D = 0
  DefineFn define;  // optional
};

// Advance one computational step.  Pure in (a, w, ctx).  Throws
// ErrKind::divergence when the result contains non-finite values, and
// ErrKind::config for missing/mismatched propagators or iterations < 1.
Fields step(Method m, const Fields& a, const NoiseSet& w,
            const StepContext& ctx);

// Noise term B(a)·w of an SDE, linear in the noise values.
using NoiseTermFn = std::function<Fields(const Fields&, const NoiseSet&)>;

// Ito -> Stratonovich drift conversion term (1/2) B_jk dB_ik/da_j evaluated
// at `a` by central finite differences through the black-box noise term.
// `shape` supplies the noise-cell geometry (its values are ignored).  B is
// assumed analytic in the field components.
Fields ito_stratonovich_drift_shift(const NoiseTermFn& B, const Fields& a,
                                    const NoiseSet& shape, double h = 1e-6);

// Elementwise amplitude inversion used by MPadapt.  Forward replaces elements
// with |a|^2 strictly above the threshold by their reciprocal; elements at or
// below the threshold pass through (ties take the identity branch).  Inverse
// replaces elements with |a|^2 strictly below 1/threshold by their reciprocal,
// recovering amplitudes that the forward pass inverted.  Inside the stepper
// the branch chosen at step start is carried across the whole step instead of
// being re-decided.
enum class AdaptDirection { forward, inverse };
Field adapt_transform(const Field& a, AdaptDirection dir, double threshold);

}  // namespace stochastica
