#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace einwarp::warp {

/// Data of the warping-function problem
///   2 phi phi'' + (n-3)(phi'^2 - eps) + rho phi^2 = 0
/// together with its conserved level
///   phi'^2 = eps - rho/(n-1) phi^2 + c / phi^(n-3).
struct WarpParams {
  int n = 4;        // manifold dimension, >= 4
  int eps = 1;      // normalized Ricci sign of the fiber, one of -1, 0, 1
  double rho = 0;   // Ricci constant of the warped product
  double c = 0;     // first-integral constant
  double t0 = 0;
  double phi0 = 1;  // > 0
  double dphi0 = 0;

  /// Builds parameters with c derived from the initial data (exactly consistent).
  static WarpParams from_initial_data(int n, int eps, double rho, double t0, double phi0,
                                      double dphi0);

  /// Builds parameters with a user-supplied c, validated against the initial
  /// data to |residual| <= tol_rel * (1 + |c|).
  static WarpParams with_constant(int n, int eps, double rho, double c, double t0, double phi0,
                                  double dphi0, double tol_rel = 1e-12);

  void validate() const;
};

/// One point of a solution: the full 3-jet of phi at t.
struct WarpSample {
  double t = 0;
  double phi = 0;
  double dphi = 0;
  double d2phi = 0;
  double d3phi = 0;
};

double rhs_second_order(const WarpParams& params, double phi, double dphi);
double first_integral_residual(const WarpParams& params, double phi, double dphi);
double c_from_state(int n, int eps, double rho, double phi, double dphi);
/// Derivative of the second-order law: phi''' = -phi' ((n-2) phi'' + rho phi) / phi.
double third_derivative(const WarpParams& params, double phi, double dphi);

/// Sample at (t, phi, dphi) with phi'' and phi''' filled from the closed-form operations.
WarpSample make_sample(const WarpParams& params, double t, double phi, double dphi);

enum class HaltReason { Completed, PhiFloor };
std::string to_string(HaltReason reason);

struct IntegrateOptions {
  double tol_drift = 1e-8;
  double phi_floor = 1e-8;
  // When false, reaching phi_floor raises DomainExhausted; when true the
  // truncated solution is returned with halt() == PhiFloor.
  bool allow_truncation = false;
};

/// Dense trajectory produced by fixed-step RK4 on (phi, phi'). Immutable.
class WarpSolution {
 public:
  WarpSolution(WarpParams params, double step, double t_requested, std::vector<WarpSample> samples,
               std::vector<double> drift_log, HaltReason halt);

  const WarpParams& params() const { return params_; }
  std::span<const WarpSample> samples() const { return samples_; }
  std::span<const double> drift_log() const { return drift_log_; }
  double step() const { return step_; }
  double t_requested() const { return t_requested_; }
  double t_begin() const { return samples_.front().t; }
  double t_end() const { return samples_.back().t; }
  HaltReason halt() const { return halt_; }
  double max_drift() const;

  /// Dense output: one RK4 step of size <= step/2 from the nearest stored sample.
  WarpSample at(double t) const;

 private:
  WarpParams params_;
  double step_;
  double t_requested_;
  std::vector<WarpSample> samples_;
  std::vector<double> drift_log_;
  HaltReason halt_;
};

WarpSolution integrate(const WarpParams& params, double t_end, double step,
                       const IntegrateOptions& options = {});

/// Ricci-flat data with phi(0) = (n-3)/2, phi'(0) = 0, c = -((n-3)/2)^(n-3).
WarpParams schwarzschild_params(int n);
bool is_schwarzschild(const WarpParams& params);

/// 3-jet of sqrt(t^2 - c), the n = 5 solutions of the second-order law.
WarpSample closed_form_n5(double c, double t);

/// Gauss curvature of the base dt^2 + phi'^2 du^2, i.e. -phi'''/phi'; near
/// turning points the equivalent form ((n-2) phi'' + rho phi) / phi is used.
double gauss_curvature_L(const WarpParams& params, const WarpSample& sample,
                         double tol_turning = 1e-6);

/// 1 - phi'^2 - phi''^2: positive iff the rotation-surface profile exists.
double embeddability_margin(const WarpSample& sample);

/// (phi'^2 + phi''^2) - [1 - x^(n-3) + x^(2(n-2))], x = (n-3)/(2 phi).
double schwarzschild_identity_residual(const WarpParams& params, const WarpSample& sample);

struct Fact1Residuals {
  double curvature = 0;  // K vs -(n-2)(n-3)c / (2 phi^(n-1))
  double laplacian = 0;  // 2 phi'' vs -(n-3)c / phi^(n-2)
  double hessian = 0;    // phi'' vs -(n-3)c / (2 phi^(n-2))
};

/// Ricci-flat (rho = 0, eps = 1) curvature/Laplacian/Hessian identities.
Fact1Residuals fact1_diagnostics(const WarpParams& params, const WarpSample& sample);

/// (-c)^(1/(n-3)): the infimum of phi, attained at its unique critical point.
double critical_infimum(const WarpParams& params);

/// A warping function t -> 3-jet, backed by an integrated solution or a closed
/// form. Charts and immersions hold these by value.
class WarpFunction {
 public:
  using Eval = std::function<WarpSample(double)>;

  WarpFunction(std::string label, double t_lo, double t_hi, Eval eval,
               std::optional<WarpParams> params = std::nullopt,
               std::shared_ptr<const WarpSolution> solution = nullptr);

  static WarpFunction from_solution(std::shared_ptr<const WarpSolution> solution);
  static WarpFunction from_closed_form_n5(double c, double t_lo, double t_hi);
  /// (1/a) sin(a t): the c = 0 solution with eps = 1, rho = (n-1) a^2.
  static WarpFunction sine(int n, double a, double t_lo, double t_hi);
  /// phi = t: the c = 0 Ricci-flat solution with eps = 1.
  static WarpFunction linear(int n, double t_lo, double t_hi);
  static WarpFunction constant(double value);

  /// lambda * phi; solves the same law with eps -> lambda^2 eps.
  WarpFunction scaled(double lambda) const;

  WarpSample operator()(double t) const;

  const std::string& label() const { return label_; }
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }
  double scale() const { return scale_; }
  const std::optional<WarpParams>& params() const { return params_; }
  const std::shared_ptr<const WarpSolution>& solution() const { return solution_; }

 private:
  std::string label_;
  double t_lo_;
  double t_hi_;
  Eval eval_;
  std::optional<WarpParams> params_;
  std::shared_ptr<const WarpSolution> solution_;
  double scale_ = 1.0;
};

nlohmann::json to_json(const WarpParams& params);
WarpParams params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const WarpFunction& warp);

/// Envelope with the parameters verbatim plus grid and drift summary.
nlohmann::json solution_envelope(const WarpSolution& solution);

/// CSV with header t,phi,dphi,d2phi,d3phi,first_integral_residual (17 digits).
void write_csv(std::ostream& out, const WarpSolution& solution);

}  // namespace einwarp::warp
