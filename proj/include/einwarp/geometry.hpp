#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "einwarp/warpfunc.hpp"

namespace einwarp::geom {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class FiberKind { RoundSphere, ProductOfSpheres };

/// Fiber F^{n-2}: one round sphere, or S^m(r1) x S^{k}(r2) with m + k = n - 2.
struct FiberSpec {
  FiberKind kind = FiberKind::RoundSphere;
  std::vector<int> dims;
  std::vector<double> radii;
  std::optional<int> eps;  // claimed normalized Ricci sign

  static FiberSpec round(int dim, double radius = 1.0);
  static FiberSpec product(int m, double r1, int k, double r2);

  int dim() const;
  /// Normalized Ricci of each factor, (d-1)/r^2.
  std::vector<double> factor_ricci() const;
  /// Spread of the factor Ricci constants; 0 iff the product is Einstein.
  double einstein_defect() const;
};

/// Unit-sphere metric in hyperspherical angles (theta_1, ..., theta_{d-1}, az):
/// diag(1, sin^2 theta_1, sin^2 theta_1 sin^2 theta_2, ...).
Mat unit_sphere_metric(const Vec& angles);

/// Indices of the polar angles (all but the azimuth) of a d-sphere chart.
std::vector<int> polar_angle_indices(int dim);

enum class BaseKind { WarpedCoords, RoundBase, FlatBase, Custom };
std::string to_string(BaseKind kind);

/// Chart on L^2 x_phi F^{n-2}. Coordinates are (t, u, fiber angles); for
/// RoundBase (t, u) are the polar and azimuthal angles of a round S^2.
///   WarpedCoords: dt^2 + phi'(t)^2 du^2 + phi(t)^2 g_F
///   RoundBase:    R^2 (dt^2 + sin^2 t du^2) + phi^2 g_F   (phi constant)
///   FlatBase:     dt^2 + du^2 + phi(t)^2 g_F
///   Custom:       any metric function (e.g. an induced metric)
struct ChartSpec {
  std::string label;
  BaseKind base_kind = BaseKind::WarpedCoords;
  double base_radius = 1.0;
  warp::WarpFunction warp = warp::WarpFunction::constant(1.0);
  FiberSpec fiber;
  Vec lo;  // domain box
  Vec hi;
  std::function<Mat(const Vec&)> custom_metric;
  // Coordinates that are polar angles (rejected near 0 and pi).
  std::vector<int> polar_coords;

  int dim() const { return static_cast<int>(lo.size()); }

  static ChartSpec warped(std::string label, warp::WarpFunction warp, FiberSpec fiber,
                          double t_lo, double t_hi);
  static ChartSpec round_base(std::string label, double base_radius, double phi, FiberSpec fiber);
  static ChartSpec flat_base(std::string label, warp::WarpFunction warp, FiberSpec fiber,
                             double t_lo, double t_hi, double u_lo, double u_hi);
  /// Same domain and polar bookkeeping as `like`, metric supplied by `metric`.
  static ChartSpec custom(std::string label, const ChartSpec& like,
                          std::function<Mat(const Vec&)> metric);
};

/// Default fiber angle box: polar angles in [0.4, pi - 0.4], azimuths in [0, 2 pi).
void default_fiber_box(const FiberSpec& fiber, Vec& lo, Vec& hi, std::vector<int>& polar,
                       int offset);

Mat metric_at(const ChartSpec& chart, const Vec& x, double tol_pole = 1e-3,
              double tol_turning = 1e-6);

/// Gamma[k](i, j) = Gamma^k_{ij} by central differences of the metric.
std::vector<Mat> christoffel_fd(const ChartSpec& chart, const Vec& x, double h);

/// Fully covariant Riemann tensor R_{abcd} = <R(d_c, d_d) d_b, d_a>, flat index
/// ((a*n + b)*n + c)*n + d.
struct Riemann {
  int n = 0;
  std::vector<double> data;
  double operator()(int a, int b, int c, int d) const {
    return data[static_cast<std::size_t>(((a * n + b) * n + c) * n + d)];
  }
  double& operator()(int a, int b, int c, int d) {
    return data[static_cast<std::size_t>(((a * n + b) * n + c) * n + d)];
  }
  /// Max violation of R_abcd = -R_bacd = -R_abdc = R_cdab.
  double symmetry_defect() const;
};

Riemann riemann_fd(const ChartSpec& chart, const Vec& x, double h);

struct SectionalSample {
  int i = 0;
  int j = 0;
  double K = 0;
};

struct CurvatureReport {
  Vec point;
  Mat metric;
  Mat ricci;
  double scalar = 0;
  double einstein_residual = 0;
  double ricci_asymmetry = 0;  // before symmetrization
  double riemann_symmetry = 0;
  std::vector<SectionalSample> sectional_samples;
  double fd_step = 0;

  double sectional_spread() const;
};

/// Ricci, scalar curvature and coordinate sectional curvatures at x; the
/// residual is max |Ric - rho g| / (1 + max |g|).
CurvatureReport ricci_fd(const ChartSpec& chart, const Vec& x, double h, double rho,
                         std::uint64_t plane_seed = 42);

/// (r1, r2) = ((n-2) phi'' - (K - rho) phi, 2 phi'' + (n-3)(phi'^2 - eps)/phi + rho phi).
std::pair<double, double> einstein_conditions_residual(const warp::WarpParams& params,
                                                       const warp::WarpSample& sample, double K);

struct RadiiPair {
  double r1 = 0;
  double r2 = 0;
};

/// S^2(1/sqrt(rho)) x S^{n-2}(sqrt((n-3)/rho)).
RadiiPair clifford_radii(int n, double rho);
/// Torus in S^m x S^{n-m-2} with r_i^2 = (m-1)/(n-3), (n-m-3)/(n-3); 2 <= m <= n-4.
RadiiPair torus_radii_n3(int n, int m);
/// Torus with r_i^2 = (m-1)/(n-4), (n-m-3)/(n-4); 2 <= m <= n-4 (m = n-3 collapses r2).
RadiiPair torus_radii_n4(int n, int m);

/// Deterministic uniform doubles in [0,1) from mt19937_64 (53-bit mantissa).
class SeededUniform {
 public:
  explicit SeededUniform(std::uint64_t seed);
  double next();

 private:
  std::mt19937_64 engine_;
};

/// `count` seeded points in the domain box shrunk by `margin` on each side.
std::vector<Vec> sample_points(const ChartSpec& chart, int count, std::uint64_t seed,
                               double margin = 0.02);

nlohmann::json to_json(const FiberSpec& fiber);
nlohmann::json to_json(const ChartSpec& chart);
nlohmann::json to_json(const CurvatureReport& report);

/// CSV rows `t,u,y0,...,einstein_residual,scalar`.
std::string curvature_csv(const std::vector<CurvatureReport>& reports);

}  // namespace einwarp::geom
