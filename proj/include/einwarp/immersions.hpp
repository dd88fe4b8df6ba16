#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "einwarp/geometry.hpp"
#include "einwarp/warpfunc.hpp"

namespace einwarp::imm {

using geom::Mat;
using geom::Vec;

/// Value, first and second partials of a map R^n -> R^N at one point.
/// second[k](i, j) = d_i d_j f^k.
struct Jet2 {
  Vec value;
  Mat first;
  std::vector<Mat> second;

  static Jet2 zero(int ambient, int dim);
  int ambient() const { return static_cast<int>(value.size()); }
  int dim() const { return static_cast<int>(first.cols()); }
  /// The ambient vector d_i d_j f.
  Vec second_vec(int i, int j) const;
  double symmetry_defect() const;
  Mat pullback() const { return first.transpose() * first; }
};

using JetMap = std::function<Jet2(const Vec&)>;

/// Unit d-sphere in R^{d+1} in hyperspherical angles, coordinates listed in
/// reverse so theta_1 = 0 maps to the last axis; scaled by `radius`.
Jet2 sphere_jet(const Vec& angles, double radius = 1.0);

/// Product of the factor spheres of `fiber`, followed by `offset` constant coordinates.
Jet2 fiber_jet(const geom::FiberSpec& fiber, const Vec& y, const std::vector<double>& offset = {});

/// Scalar function of the two base coordinates with its gradient and Hessian.
struct ScalarJet2 {
  double value = 0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
};

/// (base(x), w(x) * fiber(y)) on coordinates (x_0, x_1, y...).
Jet2 compose_warped(const Jet2& base, const ScalarJet2& w, const Jet2& fiber);

enum class ImmersionKind {
  Clifford,
  Rotational,
  Schwarzschild,
  ProfileSurface1b,
  WarpedComposite,
  ExtraCodimExample
};
std::string to_string(ImmersionKind kind);

struct ImmersionSpec {
  ImmersionKind kind = ImmersionKind::Rotational;
  std::string label;
  geom::ChartSpec chart;
  int ambient_dim = 0;
  JetMap map;
  nlohmann::json parameters = nlohmann::json::object();
  double scale = 1.0;  // calibrated s for warped composites
  double pullback_tol = 1e-8;
  std::optional<warp::WarpFunction> warp;  // the profile warp, when there is one

  int dim() const { return chart.dim(); }
  Jet2 operator()(const Vec& x) const;
};

/// Rotation surface t, theta -> (psi, phi' sin, phi' cos, phi) with
/// psi' = sqrt(1 - phi'^2 - phi''^2), psi(t_lo) = 0.
class Profile1b {
 public:
  Profile1b(warp::WarpFunction warp, double t_lo, double t_hi, double tol_margin = 1e-12,
            double grid_step = 1e-3);

  double psi(double t) const;
  /// psi' and psi''; psi'' from differentiating psi'^2 = margin.
  std::array<double, 2> psi_derivatives(const warp::WarpSample& s) const;
  Jet2 operator()(const Vec& x) const;

  const warp::WarpFunction& warp() const { return warp_; }
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }
  /// Smallest margin seen on the quadrature grid (diagnostic for the t_lo clip).
  double min_margin() const { return min_margin_; }

 private:
  warp::WarpFunction warp_;
  double t_lo_;
  double t_hi_;
  std::vector<double> grid_;
  std::vector<double> psi_;
  double min_margin_ = 0;
};

ImmersionSpec clifford_immersion(int n, double rho);
ImmersionSpec profile_1b(const warp::WarpFunction& warp, double t_lo, double t_hi,
                         double tol_margin = 1e-12);
/// f(x, y) = (h(x), phi(x) * fiber(y)) where `profile` is a surface whose last
/// coordinate is phi. `chart` must carry the matching warped metric.
ImmersionSpec rotational_immersion(const ImmersionSpec& profile, const geom::ChartSpec& chart,
                                   std::vector<double> fiber_offset = {});
ImmersionSpec schwarzschild_immersion(int n, const warp::WarpFunction& warp, double t_lo = 0.1,
                                      double t_hi = 3.0);
/// Integrates the Schwarzschild warp for n on [0, t_hi] and builds the immersion.
ImmersionSpec schwarzschild_immersion(int n, double t_lo = 0.1, double t_hi = 3.0,
                                      double step = 1e-3);

/// f(x, y) = (B h1(x), s <h1(x), e> h2(y)) with B the projection onto an
/// orthonormal basis of e^perp; s calibrated on the fiber block at the chart
/// centre when `scale` is empty.
ImmersionSpec warped_composite(std::string label, const geom::ChartSpec& chart, JetMap h1,
                               int h1_ambient, JetMap h2, const Vec& e,
                               std::optional<double> scale = std::nullopt);

/// Non-rotational Ricci-flat example on the flat cone over an offset torus.
ImmersionSpec nonrotational_example1(int n, int m);
/// Non-rotational examples with K = 1 (spherical base) or K = 0 (cylinder base).
ImmersionSpec nonrotational_example2(int n, int m, int K);
/// (h(t, theta), phi(t) j(y)) into R^{n+3} with the unit-sphere torus of
/// radii^2 = (m-1)/(n-4), (n-m-3)/(n-4). phi is the Schwarzschild warp scaled
/// by sqrt((n-4)/(n-3)), which makes the fiber term match.
ImmersionSpec extra_codim_example(int n, int m, double t_lo = 0.1, double t_hi = 3.0);

/// f + amplitude * (x_0 x_{n-1}, x_0^2, 0, ...): breaks the chart match and, in
/// codimension >= 2, generically the commuting of the shape operators.
ImmersionSpec perturbed_immersion(const ImmersionSpec& spec, double amplitude);

/// max || first^T first - metric_at || over the points.
double pullback_defect(const ImmersionSpec& spec, const std::vector<Vec>& points);

/// The chart with metric replaced by the pullback of the Euclidean metric.
geom::ChartSpec induced_chart(const ImmersionSpec& spec);

struct Mesh {
  std::vector<Vec> vertices;  // full ambient coordinates
  std::vector<std::array<int, 3>> faces;
  std::array<int, 3> projection{0, 1, 2};
  int degenerate_faces() const;
};

/// Grid over chart coordinates (i, j) with the others fixed at `base_point`;
/// resolution counts vertices per direction; coordinates whose range is a full
/// period are sampled half-open.
Mesh build_mesh(const ImmersionSpec& spec, std::array<int, 2> slice, std::array<int, 2> resolution,
                const Vec& base_point, std::optional<std::array<double, 4>> ranges = std::nullopt);
std::string mesh_obj(const Mesh& mesh);
std::string mesh_csv(const Mesh& mesh);
/// Writes <stem>.obj and <stem>.csv atomically.
void export_mesh(const Mesh& mesh, const std::filesystem::path& stem);

nlohmann::json to_json(const ImmersionSpec& spec);

}  // namespace einwarp::imm
