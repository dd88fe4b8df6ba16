#pragma once

#include <json.hpp>

namespace einwarp {

// Single table of default numerical tolerances. Every verification report
// echoes the instance it was produced with.
struct Tolerances {
  // warping-function ODE
  double consistency_rel = 1e-12;  // user-supplied c vs. initial data, scaled by (1+|c|)
  double drift = 1e-8;             // max |first integral residual| along a solution
  double phi_floor = 1e-8;         // integration halts before phi reaches this
  double turning = 1e-6;           // |phi'| below this uses the removable-singularity K
  double identity = 1e-9;          // closed-form identities along integrated solutions
  double closed_form = 1e-9;       // n=5 integrator vs sqrt(t^2-c)

  // intrinsic geometry
  double pole = 1e-3;       // fiber angles closer than this to a pole are rejected
  double fd_step = 1e-3;    // finite-difference step for Christoffel/Riemann
  double einstein = 5e-5;   // FD Einstein residual
  double perturbed_min = 1e-3;  // negative controls must exceed this
  double spread_const = 1e-4;   // sectional spread for constant-curvature charts
  double spread_nonconst = 1e-2;
  double einstein_analytic = 1e-10;  // closed-form Einstein conditions on solutions

  // immersions
  double pullback_analytic = 1e-8;
  double pullback_quadrature = 1e-6;
  double margin = 1e-12;  // tolerated negative embeddability margin (roundoff at t0)

  // extrinsic
  double flat_normal = 1e-6;
  double umbilic_group = 1e-5;
  double umbilic_identity = 1e-6;
  double delta_check = 1e-6;
  double gauss_equation = 1e-4;
  double codazzi = 1e-3;
  double dupin = 1e-4;
  double appendix = 1e-6;
  double intrinsic_extrinsic = 1e-4;
};

nlohmann::json to_json(const Tolerances& tol);

// Applies overrides from a JSON object; unknown keys and non-positive values
// raise ConfigError.
void apply_overrides(Tolerances& tol, const nlohmann::json& overrides);

}  // namespace einwarp
