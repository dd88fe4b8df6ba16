#include "einwarp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "einwarp/error.hpp"
#include "einwarp/io.hpp"

namespace einwarp::geom {

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

FiberSpec FiberSpec::round(int dim, double radius) {
  if (dim < 1 || !(radius > 0)) throw Error(ErrorCode::BadRange, "round fiber needs dim >= 1, r > 0");
  FiberSpec f;
  f.kind = FiberKind::RoundSphere;
  f.dims = {dim};
  f.radii = {radius};
  f.eps = 1;
  return f;
}

FiberSpec FiberSpec::product(int m, double r1, int k, double r2) {
  if (m < 1 || k < 1 || !(r1 > 0) || !(r2 > 0))
    throw Error(ErrorCode::BadRange, "product fiber needs positive dims and radii");
  FiberSpec f;
  f.kind = FiberKind::ProductOfSpheres;
  f.dims = {m, k};
  f.radii = {r1, r2};
  if (f.einstein_defect() <= 1e-12 * (1 + std::abs(f.factor_ricci()[0]))) {
    const double lam = f.factor_ricci()[0];
    if (std::abs(lam - 1) <= 1e-12) f.eps = 1;
  }
  return f;
}

int FiberSpec::dim() const {
  int d = 0;
  for (int k : dims) d += k;
  return d;
}

std::vector<double> FiberSpec::factor_ricci() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < dims.size(); ++i) out.push_back((dims[i] - 1) / (radii[i] * radii[i]));
  return out;
}

double FiberSpec::einstein_defect() const {
  const auto r = factor_ricci();
  const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  return *hi - *lo;
}

Mat unit_sphere_metric(const Vec& angles) {
  const auto d = angles.size();
  Mat g = Mat::Zero(d, d);
  double w = 1;
  for (Eigen::Index k = 0; k < d; ++k) {
    g(k, k) = w;
    const double s = std::sin(angles[k]);
    w *= s * s;
  }
  return g;
}

std::vector<int> polar_angle_indices(int dim) {
  std::vector<int> out;
  for (int k = 0; k + 1 < dim; ++k) out.push_back(k);
  return out;
}

std::string to_string(BaseKind kind) {
  switch (kind) {
    case BaseKind::WarpedCoords: return "warped_coords";
    case BaseKind::RoundBase: return "round_base";
    case BaseKind::FlatBase: return "flat_base";
    case BaseKind::Custom: return "custom";
  }
  return "unknown";
}

void default_fiber_box(const FiberSpec& fiber, Vec& lo, Vec& hi, std::vector<int>& polar,
                       int offset) {
  int at = offset;
  for (int d : fiber.dims) {
    for (int k = 0; k < d; ++k) {
      if (k + 1 < d) {
        lo[at + k] = 0.4;
        hi[at + k] = kPi - 0.4;
        polar.push_back(at + k);
      } else {
        lo[at + k] = 0;
        hi[at + k] = 2 * kPi;
      }
    }
    at += d;
  }
}

namespace {

ChartSpec with_box(std::string label, BaseKind kind, FiberSpec fiber, double t_lo, double t_hi,
                   double u_lo, double u_hi) {
  ChartSpec c;
  c.label = std::move(label);
  c.base_kind = kind;
  c.fiber = std::move(fiber);
  const int n = 2 + c.fiber.dim();
  c.lo = Vec::Zero(n);
  c.hi = Vec::Zero(n);
  c.lo[0] = t_lo;
  c.hi[0] = t_hi;
  c.lo[1] = u_lo;
  c.hi[1] = u_hi;
  default_fiber_box(c.fiber, c.lo, c.hi, c.polar_coords, 2);
  return c;
}

}  // namespace

ChartSpec ChartSpec::warped(std::string label, warp::WarpFunction warp, FiberSpec fiber,
                            double t_lo, double t_hi) {
  if (!(t_lo >= warp.t_lo() && t_hi <= warp.t_hi() && t_lo < t_hi))
    throw Error(ErrorCode::OutsideDomain, "chart t-range outside the warping function's range");
  auto c = with_box(std::move(label), BaseKind::WarpedCoords, std::move(fiber), t_lo, t_hi, 0,
                    2 * kPi);
  c.warp = std::move(warp);
  return c;
}

ChartSpec ChartSpec::round_base(std::string label, double base_radius, double phi,
                                FiberSpec fiber) {
  if (!(base_radius > 0) || !(phi > 0))
    throw Error(ErrorCode::BadRange, "round base needs positive radius and warp");
  auto c = with_box(std::move(label), BaseKind::RoundBase, std::move(fiber), 0.3, kPi - 0.3, 0,
                    2 * kPi);
  c.polar_coords.insert(c.polar_coords.begin(), 0);
  c.base_radius = base_radius;
  c.warp = warp::WarpFunction::constant(phi);
  return c;
}

ChartSpec ChartSpec::flat_base(std::string label, warp::WarpFunction warp, FiberSpec fiber,
                               double t_lo, double t_hi, double u_lo, double u_hi) {
  if (!(t_lo >= warp.t_lo() && t_hi <= warp.t_hi() && t_lo < t_hi && u_lo < u_hi))
    throw Error(ErrorCode::OutsideDomain, "chart range outside the warping function's range");
  auto c = with_box(std::move(label), BaseKind::FlatBase, std::move(fiber), t_lo, t_hi, u_lo, u_hi);
  c.warp = std::move(warp);
  return c;
}

ChartSpec ChartSpec::custom(std::string label, const ChartSpec& like,
                            std::function<Mat(const Vec&)> metric) {
  ChartSpec c = like;
  c.label = std::move(label);
  c.base_kind = BaseKind::Custom;
  c.custom_metric = std::move(metric);
  return c;
}

Mat metric_at(const ChartSpec& chart, const Vec& x, double tol_pole, double tol_turning) {
  const int n = chart.dim();
  if (x.size() != n) throw Error(ErrorCode::OutsideDomain, "coordinate vector has wrong length");
  for (int i = 0; i < n; ++i) {
    const double slack = 1e-12 * (1 + std::abs(chart.hi[i] - chart.lo[i]));
    if (!(x[i] >= chart.lo[i] - slack && x[i] <= chart.hi[i] + slack))
      throw Error(ErrorCode::OutsideDomain,
                  "coordinate " + std::to_string(i) + " = " + io::fmt17(x[i]) + " outside box");
  }
  for (int i : chart.polar_coords) {
    const double a = std::fmod(x[i], kPi);
    if (std::min(std::abs(a), kPi - std::abs(a)) < tol_pole)
      throw Error(ErrorCode::SingularChartPoint, "angle coordinate " + std::to_string(i) +
                                                     " within tol_pole of a pole");
  }
  if (chart.base_kind == BaseKind::Custom) return chart.custom_metric(x);

  Mat g = Mat::Zero(n, n);
  const auto s = chart.warp(x[0]);
  if (!(s.phi > 0)) throw Error(ErrorCode::NonPositiveWarp, "phi <= 0 at t = " + io::fmt17(x[0]));
  switch (chart.base_kind) {
    case BaseKind::WarpedCoords:
      if (std::abs(s.dphi) < tol_turning)
        throw Error(ErrorCode::SingularChartPoint,
                    "phi' vanishes at t = " + io::fmt17(x[0]) + " (polar origin of the base)");
      g(0, 0) = 1;
      g(1, 1) = s.dphi * s.dphi;
      break;
    case BaseKind::RoundBase: {
      const double r2 = chart.base_radius * chart.base_radius;
      const double st = std::sin(x[0]);
      g(0, 0) = r2;
      g(1, 1) = r2 * st * st;
      break;
    }
    case BaseKind::FlatBase:
      g(0, 0) = 1;
      g(1, 1) = 1;
      break;
    case BaseKind::Custom: break;
  }
  int at = 2;
  const double w = s.phi * s.phi;
  for (std::size_t f = 0; f < chart.fiber.dims.size(); ++f) {
    const int d = chart.fiber.dims[f];
    const double r = chart.fiber.radii[f];
    g.block(at, at, d, d) = w * r * r * unit_sphere_metric(x.segment(at, d));
    at += d;
  }
  return g;
}

std::vector<Mat> christoffel_fd(const ChartSpec& chart, const Vec& x, double h) {
  const int n = chart.dim();
  const Mat g = metric_at(chart, x);
  const Mat ginv = g.inverse();
  std::vector<Mat> dg(n);  // dg[k] = d_k g
  for (int k = 0; k < n; ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    dg[k] = (metric_at(chart, xp) - metric_at(chart, xm)) / (2 * h);
  }
  // lowered Gamma_{l i j} = (d_i g_jl + d_j g_il - d_l g_ij) / 2
  std::vector<Mat> gamma(n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Vec low(n);
      for (int l = 0; l < n; ++l) low[l] = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
      const Vec up = ginv * low;
      for (int k = 0; k < n; ++k) {
        gamma[k](i, j) = up[k];
        gamma[k](j, i) = up[k];
      }
    }
  return gamma;
}

double Riemann::symmetry_defect() const {
  double worst = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double v = (*this)(a, b, c, d);
          worst = std::max({worst, std::abs(v + (*this)(b, a, c, d)),
                            std::abs(v + (*this)(a, b, d, c)), std::abs(v - (*this)(c, d, a, b))});
        }
  return worst;
}

// R_abcd = 1/2 (g_ad,bc + g_bc,ad - g_ac,bd - g_bd,ac)
//          + g_ef (Gamma^e_bc Gamma^f_ad - Gamma^e_bd Gamma^f_ac)
// with symmetric second-difference stencils; both pair antisymmetries then hold
// to roundoff, unlike differencing the Christoffel symbols a second time.
Riemann riemann_fd(const ChartSpec& chart, const Vec& x, double h) {
  const int n = chart.dim();
  const Mat g0 = metric_at(chart, x);
  std::vector<Mat> gp(n), gm(n);
  for (int k = 0; k < n; ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    gp[k] = metric_at(chart, xp);
    gm[k] = metric_at(chart, xm);
  }
  std::vector<Mat> ddg(static_cast<std::size_t>(n * n));  // ddg[p*n+q] = d_p d_q g
  for (int p = 0; p < n; ++p) {
    ddg[static_cast<std::size_t>(p * n + p)] = (gp[p] - 2 * g0 + gm[p]) / (h * h);
    for (int q = p + 1; q < n; ++q) {
      Vec a = x, b = x, c = x, d = x;
      a[p] += h, a[q] += h;
      b[p] += h, b[q] -= h;
      c[p] -= h, c[q] += h;
      d[p] -= h, d[q] -= h;
      const Mat m = (metric_at(chart, a) - metric_at(chart, b) - metric_at(chart, c) +
                     metric_at(chart, d)) /
                    (4 * h * h);
      ddg[static_cast<std::size_t>(p * n + q)] = m;
      ddg[static_cast<std::size_t>(q * n + p)] = m;
    }
  }
  std::vector<Mat> dg(n);
  for (int k = 0; k < n; ++k) dg[k] = (gp[k] - gm[k]) / (2 * h);
  const Mat ginv = g0.inverse();
  // Gamma^e_ij as vectors indexed by e
  std::vector<Vec> gam(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec low(n);
      for (int l = 0; l < n; ++l) low[l] = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
      gam[static_cast<std::size_t>(i * n + j)] = ginv * low;
    }
  const auto D = [&](int p, int q, int i, int j) {
    return ddg[static_cast<std::size_t>(p * n + q)](i, j);
  };
  const auto G = [&](int i, int j) -> const Vec& { return gam[static_cast<std::size_t>(i * n + j)]; };

  Riemann R;
  R.n = n;
  R.data.assign(static_cast<std::size_t>(n * n * n * n), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double second =
              0.5 * (D(b, c, a, d) + D(a, d, b, c) - D(b, d, a, c) - D(a, c, b, d));
          const double quad = G(b, c).dot(g0 * G(a, d)) - G(b, d).dot(g0 * G(a, c));
          R(a, b, c, d) = second + quad;
        }
  return R;
}

double CurvatureReport::sectional_spread() const {
  if (sectional_samples.empty()) return 0;
  double lo = sectional_samples.front().K, hi = lo;
  for (const auto& s : sectional_samples) {
    lo = std::min(lo, s.K);
    hi = std::max(hi, s.K);
  }
  return hi - lo;
}

CurvatureReport ricci_fd(const ChartSpec& chart, const Vec& x, double h, double rho,
                         std::uint64_t plane_seed) {
  const int n = chart.dim();
  const Riemann R = riemann_fd(chart, x, h);
  CurvatureReport rep;
  rep.point = x;
  rep.fd_step = h;
  rep.metric = metric_at(chart, x);
  const Mat ginv = rep.metric.inverse();
  Mat ric = Mat::Zero(n, n);
  // Ric_bd = g^{ac} R_abcd
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      double acc = 0;
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) acc += ginv(a, c) * R(a, b, c, d);
      ric(b, d) = acc;
    }
  rep.ricci_asymmetry = max_abs(ric - ric.transpose());
  rep.ricci = 0.5 * (ric + ric.transpose());
  rep.scalar = (ginv.cwiseProduct(rep.ricci)).sum();
  rep.einstein_residual = max_abs(rep.ricci - rho * rep.metric) / (1 + max_abs(rep.metric));
  rep.riemann_symmetry = R.symmetry_defect();

  std::vector<std::pair<int, int>> planes;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (i != 0 || j != 1) planes.emplace_back(i, j);
  SeededUniform rng(plane_seed);
  for (std::size_t k = planes.size(); k > 1; --k) {
    const auto r = static_cast<std::size_t>(rng.next() * static_cast<double>(k));
    std::swap(planes[k - 1], planes[std::min(r, k - 1)]);
  }
  planes.insert(planes.begin(), {0, 1});
  planes.resize(std::min<std::size_t>(planes.size(), 10));
  const Mat& g = rep.metric;
  for (auto [i, j] : planes) {
    const double area = g(i, i) * g(j, j) - g(i, j) * g(i, j);
    rep.sectional_samples.push_back({i, j, R(i, j, i, j) / area});
  }
  return rep;
}

std::pair<double, double> einstein_conditions_residual(const warp::WarpParams& p,
                                                       const warp::WarpSample& s, double K) {
  const double r1 = (p.n - 2) * s.d2phi - (K - p.rho) * s.phi;
  const double r2 = 2 * s.d2phi + (p.n - 3) * (s.dphi * s.dphi - p.eps) / s.phi + p.rho * s.phi;
  return {r1, r2};
}

RadiiPair clifford_radii(int n, double rho) {
  if (n < 4) throw Error(ErrorCode::BadDimension, "n >= 4 required");
  if (!(rho > 0)) throw Error(ErrorCode::BadRange, "Clifford radii need rho > 0");
  return {1 / std::sqrt(rho), std::sqrt((n - 3) / rho)};
}

RadiiPair torus_radii_n3(int n, int m) {
  if (m < 2 || m > n - 4)
    throw Error(ErrorCode::BadRange, "need 2 <= m <= n-4, got m = " + std::to_string(m));
  return {std::sqrt((m - 1.0) / (n - 3)), std::sqrt((n - m - 3.0) / (n - 3))};
}

RadiiPair torus_radii_n4(int n, int m) {
  if (m < 2 || m > n - 4)
    throw Error(ErrorCode::BadRange,
                "need 2 <= m <= n-4 (m = n-3 gives r2 = 0), got m = " + std::to_string(m));
  return {std::sqrt((m - 1.0) / (n - 4)), std::sqrt((n - m - 3.0) / (n - 4))};
}

SeededUniform::SeededUniform(std::uint64_t seed) : engine_(seed) {}

double SeededUniform::next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::vector<Vec> sample_points(const ChartSpec& chart, int count, std::uint64_t seed,
                               double margin) {
  SeededUniform rng(seed);
  std::vector<Vec> out;
  const int n = chart.dim();
  for (int k = 0; k < count; ++k) {
    Vec x(n);
    for (int i = 0; i < n; ++i) {
      const double w = chart.hi[i] - chart.lo[i];
      x[i] = chart.lo[i] + w * (margin + (1 - 2 * margin) * rng.next());
    }
    out.push_back(x);
  }
  return out;
}

nlohmann::json to_json(const FiberSpec& f) {
  nlohmann::json j;
  j["kind"] = f.kind == FiberKind::RoundSphere ? "round_sphere" : "product_of_spheres";
  j["dims"] = f.dims;
  j["radii"] = f.radii;
  j["eps"] = f.eps ? nlohmann::json(*f.eps) : nlohmann::json(nullptr);
  j["factor_ricci"] = f.factor_ricci();
  return j;
}

namespace {

nlohmann::json to_array(const Vec& v) {
  auto a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

nlohmann::json to_array(const Mat& m) {
  auto a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_array(Vec(m.row(i).transpose())));
  return a;
}

}  // namespace

nlohmann::json to_json(const ChartSpec& c) {
  nlohmann::json j;
  j["label"] = c.label;
  j["base_kind"] = to_string(c.base_kind);
  j["base_radius"] = c.base_radius;
  j["warp"] = warp::to_json(c.warp);
  j["fiber"] = to_json(c.fiber);
  j["lo"] = to_array(c.lo);
  j["hi"] = to_array(c.hi);
  j["polar_coords"] = c.polar_coords;
  return j;
}

nlohmann::json to_json(const CurvatureReport& r) {
  nlohmann::json j;
  j["point"] = to_array(r.point);
  j["ricci"] = to_array(r.ricci);
  j["scalar"] = r.scalar;
  j["einstein_residual"] = r.einstein_residual;
  j["ricci_asymmetry"] = r.ricci_asymmetry;
  j["riemann_symmetry"] = r.riemann_symmetry;
  j["fd_step"] = r.fd_step;
  auto planes = nlohmann::json::array();
  for (const auto& s : r.sectional_samples) planes.push_back({{"plane", {s.i, s.j}}, {"K", s.K}});
  j["sectional_samples"] = planes;
  return j;
}

std::string curvature_csv(const std::vector<CurvatureReport>& reports) {
  std::ostringstream out;
  if (reports.empty()) return "einstein_residual,scalar\n";
  const auto n = reports.front().point.size();
  out << "t,u,";
  for (Eigen::Index i = 2; i < n; ++i) out << 'y' << i - 2 << ',';
  out << "einstein_residual,scalar\n";
  for (const auto& r : reports) {
    for (Eigen::Index i = 0; i < n; ++i) out << io::fmt17(r.point[i]) << ',';
    out << io::fmt17(r.einstein_residual) << ',' << io::fmt17(r.scalar) << '\n';
  }
  return out.str();
}

}  // namespace einwarp::geom
