#include "einwarp/immersions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "einwarp/error.hpp"
#include "einwarp/io.hpp"

namespace einwarp::imm {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_full_period(double lo, double hi) { return std::abs(hi - lo - 2 * kPi) < 1e-12; }

Jet2 rows(const Jet2& j, int start, int count) {
  Jet2 out;
  out.value = j.value.segment(start, count);
  out.first = j.first.middleRows(start, count);
  out.second.assign(j.second.begin() + start, j.second.begin() + start + count);
  return out;
}

ScalarJet2 scalar_row(const Jet2& j, int k) {
  ScalarJet2 s;
  s.value = j.value[k];
  s.grad = j.first.row(k).transpose();
  s.hess = j.second[static_cast<std::size_t>(k)];
  return s;
}

// Orthonormal basis of the complement of unit e, as columns.
Mat complement_basis(const Vec& e) {
  const auto a = e.size();
  Eigen::HouseholderQR<Mat> qr(e);
  const Mat q = qr.householderQ() * Mat::Identity(a, a);
  return q.rightCols(a - 1);
}

geom::ChartSpec surface_chart(std::string label, const warp::WarpFunction& w, double t_lo,
                              double t_hi) {
  geom::ChartSpec c;
  c.label = std::move(label);
  c.base_kind = geom::BaseKind::Custom;
  c.warp = w;
  c.lo = Vec(2);
  c.hi = Vec(2);
  c.lo << t_lo, 0;
  c.hi << t_hi, 2 * kPi;
  c.custom_metric = [w](const Vec& x) {
    const auto s = w(x[0]);
    Mat g = Mat::Zero(2, 2);
    g(0, 0) = 1;
    g(1, 1) = s.dphi * s.dphi;
    return g;
  };
  return c;
}

}  // namespace

Jet2 Jet2::zero(int ambient, int dim) {
  Jet2 j;
  j.value = Vec::Zero(ambient);
  j.first = Mat::Zero(ambient, dim);
  j.second.assign(static_cast<std::size_t>(ambient), Mat::Zero(dim, dim));
  return j;
}

Vec Jet2::second_vec(int i, int j) const {
  Vec v(ambient());
  for (int k = 0; k < ambient(); ++k) v[k] = second[static_cast<std::size_t>(k)](i, j);
  return v;
}

double Jet2::symmetry_defect() const {
  double worst = 0;
  for (const auto& m : second) worst = std::max(worst, (m - m.transpose()).cwiseAbs().maxCoeff());
  return worst;
}

Jet2 sphere_jet(const Vec& angles, double radius) {
  const int d = static_cast<int>(angles.size());
  Jet2 out = Jet2::zero(d + 1, d);
  // component k (standard order) = prod_j c_kj(theta_j) with c in {sin, cos, 1}
  for (int k = 0; k <= d; ++k) {
    std::vector<std::array<double, 3>> c(static_cast<std::size_t>(d));  // value, d1, d2
    for (int j = 0; j < d; ++j) {
      const double s = std::sin(angles[j]), co = std::cos(angles[j]);
      if (j < k)
        c[j] = {s, co, -s};
      else if (j == k)
        c[j] = {co, -s, -co};
      else
        c[j] = {1, 0, 0};
    }
    const auto prod_except = [&](int a, int b) {
      double p = 1;
      for (int j = 0; j < d; ++j)
        if (j != a && j != b) p *= c[j][0];
      return p;
    };
    const int row = d - k;
    out.value[row] = radius * prod_except(-1, -1);
    for (int a = 0; a < d; ++a) {
      out.first(row, a) = radius * c[a][1] * prod_except(a, -1);
      out.second[row](a, a) = radius * c[a][2] * prod_except(a, -1);
      for (int b = a + 1; b < d; ++b) {
        const double v = radius * c[a][1] * c[b][1] * prod_except(a, b);
        out.second[row](a, b) = v;
        out.second[row](b, a) = v;
      }
    }
  }
  return out;
}

Jet2 fiber_jet(const geom::FiberSpec& fiber, const Vec& y, const std::vector<double>& offset) {
  const int d = fiber.dim();
  int ambient = static_cast<int>(offset.size());
  for (int k : fiber.dims) ambient += k + 1;
  Jet2 out = Jet2::zero(ambient, d);
  int row = 0, col = 0;
  for (std::size_t f = 0; f < fiber.dims.size(); ++f) {
    const int k = fiber.dims[f];
    const Jet2 s = sphere_jet(y.segment(col, k), fiber.radii[f]);
    out.value.segment(row, k + 1) = s.value;
    out.first.block(row, col, k + 1, k) = s.first;
    for (int r = 0; r <= k; ++r) out.second[static_cast<std::size_t>(row + r)].block(col, col, k, k) = s.second[r];
    row += k + 1;
    col += k;
  }
  for (double v : offset) out.value[row++] = v;
  return out;
}

Jet2 compose_warped(const Jet2& base, const ScalarJet2& w, const Jet2& fiber) {
  const int a = base.ambient(), b = fiber.ambient(), d = fiber.dim();
  Jet2 out = Jet2::zero(a + b, 2 + d);
  out.value.head(a) = base.value;
  out.value.tail(b) = w.value * fiber.value;
  out.first.topLeftCorner(a, 2) = base.first;
  out.first.bottomLeftCorner(b, 2) = fiber.value * w.grad.transpose();
  out.first.bottomRightCorner(b, d) = w.value * fiber.first;
  for (int k = 0; k < a; ++k) out.second[k].topLeftCorner(2, 2) = base.second[k];
  for (int l = 0; l < b; ++l) {
    Mat& m = out.second[static_cast<std::size_t>(a + l)];
    m.topLeftCorner(2, 2) = fiber.value[l] * w.hess;
    const Eigen::RowVectorXd dj = fiber.first.row(l);
    m.topRightCorner(2, d) = w.grad * dj;
    m.bottomLeftCorner(d, 2) = m.topRightCorner(2, d).transpose();
    m.bottomRightCorner(d, d) = w.value * fiber.second[static_cast<std::size_t>(l)];
  }
  return out;
}

std::string to_string(ImmersionKind kind) {
  switch (kind) {
    case ImmersionKind::Clifford: return "clifford";
    case ImmersionKind::Rotational: return "rotational";
    case ImmersionKind::Schwarzschild: return "schwarzschild";
    case ImmersionKind::ProfileSurface1b: return "profile_surface_1b";
    case ImmersionKind::WarpedComposite: return "warped_composite";
    case ImmersionKind::ExtraCodimExample: return "extra_codim_example";
  }
  return "unknown";
}

Jet2 ImmersionSpec::operator()(const Vec& x) const { return map(x); }

Profile1b::Profile1b(warp::WarpFunction warp, double t_lo, double t_hi, double tol_margin,
                     double grid_step)
    : warp_(std::move(warp)), t_lo_(t_lo), t_hi_(t_hi) {
  if (!(t_lo < t_hi)) throw Error(ErrorCode::OutsideDomain, "empty profile range");
  const auto steps = std::max<long long>(1, std::llround((t_hi - t_lo) / grid_step));
  const double h = (t_hi - t_lo) / static_cast<double>(steps);
  const auto root_margin = [&](double t) {
    const double m = warp::embeddability_margin(warp_(t));
    min_margin_ = std::min(min_margin_, m);
    if (m < -tol_margin)
      throw Error(ErrorCode::MarginViolated,
                  "1 - phi'^2 - phi''^2 = " + io::fmt17(m) + " at t = " + io::fmt17(t));
    return std::sqrt(std::max(0.0, m));
  };
  min_margin_ = HUGE_VAL;
  grid_.push_back(t_lo);
  psi_.push_back(0);
  double fa = root_margin(t_lo);
  for (long long k = 1; k <= steps; ++k) {
    const double a = grid_.back();
    const double b = k == steps ? t_hi : t_lo + static_cast<double>(k) * h;
    const double fm = root_margin(0.5 * (a + b));
    const double fb = root_margin(b);
    psi_.push_back(psi_.back() + (b - a) / 6 * (fa + 4 * fm + fb));
    grid_.push_back(b);
    fa = fb;
  }
}

double Profile1b::psi(double t) const {
  if (!(t >= t_lo_ - 1e-12 && t <= t_hi_ + 1e-12))
    throw Error(ErrorCode::OutOfDomain, "t = " + io::fmt17(t) + " outside the profile range");
  auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  const auto k = static_cast<std::size_t>(std::max<long>(0, (it - grid_.begin()) - 1));
  const double a = grid_[k];
  if (t == a) return psi_[k];
  // 5-point Gauss-Legendre on [a, t]
  static constexpr double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831,
                                  -0.9061798459386640, 0.9061798459386640};
  static constexpr double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                  0.2369268850561891, 0.2369268850561891};
  const double half = 0.5 * (t - a), mid = 0.5 * (t + a);
  double acc = 0;
  for (int i = 0; i < 5; ++i)
    acc += w[i] * std::sqrt(std::max(0.0, warp::embeddability_margin(warp_(mid + half * x[i]))));
  return psi_[k] + half * acc;
}

std::array<double, 2> Profile1b::psi_derivatives(const warp::WarpSample& s) const {
  const double d1 = std::sqrt(std::max(0.0, warp::embeddability_margin(s)));
  const double d2 = d1 > 0 ? -(s.dphi * s.d2phi + s.d2phi * s.d3phi) / d1 : 0.0;
  return {d1, d2};
}

Jet2 Profile1b::operator()(const Vec& x) const {
  const double t = x[0], th = x[1];
  const auto s = warp_(t);
  const auto [p1, p2] = psi_derivatives(s);
  const double sn = std::sin(th), cs = std::cos(th);
  Jet2 j = Jet2::zero(4, 2);
  j.value << psi(t), s.dphi * sn, s.dphi * cs, s.phi;
  j.first.col(0) << p1, s.d2phi * sn, s.d2phi * cs, s.dphi;
  j.first.col(1) << 0, s.dphi * cs, -s.dphi * sn, 0;
  const double tt[4] = {p2, s.d3phi * sn, s.d3phi * cs, s.d2phi};
  const double tq[4] = {0, s.d2phi * cs, -s.d2phi * sn, 0};
  const double qq[4] = {0, -s.dphi * sn, -s.dphi * cs, 0};
  for (int k = 0; k < 4; ++k) {
    j.second[k](0, 0) = tt[k];
    j.second[k](0, 1) = j.second[k](1, 0) = tq[k];
    j.second[k](1, 1) = qq[k];
  }
  return j;
}

ImmersionSpec clifford_immersion(int n, double rho) {
  if (n < 4) throw Error(ErrorCode::BadRange, "Clifford immersion needs n >= 4");
  const auto r = geom::clifford_radii(n, rho);
  ImmersionSpec spec;
  spec.kind = ImmersionKind::Clifford;
  spec.label = "clifford";
  spec.chart = geom::ChartSpec::round_base("clifford", r.r1, r.r2, geom::FiberSpec::round(n - 2));
  spec.ambient_dim = n + 2;
  spec.map = [r, n](const Vec& x) {
    ScalarJet2 w;
    w.value = r.r2;
    return compose_warped(sphere_jet(x.head(2), r.r1), w, sphere_jet(x.tail(n - 2)));
  };
  spec.parameters = {{"n", n}, {"rho", rho}, {"r1", r.r1}, {"r2", r.r2}};
  return spec;
}

ImmersionSpec profile_1b(const warp::WarpFunction& warp, double t_lo, double t_hi,
                         double tol_margin) {
  auto prof = std::make_shared<const Profile1b>(warp, t_lo, t_hi, tol_margin);
  ImmersionSpec spec;
  spec.kind = ImmersionKind::ProfileSurface1b;
  spec.label = "profile_1b";
  spec.chart = surface_chart("profile_1b", warp, t_lo, t_hi);
  spec.ambient_dim = 4;
  spec.map = [prof](const Vec& x) { return (*prof)(x); };
  spec.parameters = {{"t_lo", t_lo}, {"t_hi", t_hi}, {"min_margin", prof->min_margin()}};
  spec.pullback_tol = 1e-6;
  spec.warp = warp;
  return spec;
}

ImmersionSpec rotational_immersion(const ImmersionSpec& profile, const geom::ChartSpec& chart,
                                   std::vector<double> fiber_offset) {
  const int q = profile.ambient_dim;
  const auto pmap = profile.map;
  const auto fiber = chart.fiber;
  const int d = fiber.dim();
  ImmersionSpec spec;
  spec.kind = ImmersionKind::Rotational;
  spec.label = "rotational";
  spec.chart = chart;
  spec.ambient_dim = q - 1 + fiber_jet(fiber, Vec::Constant(d, 1.0), fiber_offset).ambient();
  spec.map = [pmap, q, fiber, d, fiber_offset](const Vec& x) {
    const Jet2 g = pmap(x.head(2));
    return compose_warped(rows(g, 0, q - 1), scalar_row(g, q - 1),
                          fiber_jet(fiber, x.tail(d), fiber_offset));
  };
  spec.parameters = profile.parameters;
  spec.pullback_tol = profile.pullback_tol;
  spec.warp = profile.warp;
  return spec;
}

ImmersionSpec schwarzschild_immersion(int n, const warp::WarpFunction& warp, double t_lo,
                                      double t_hi) {
  const auto profile = profile_1b(warp, t_lo, t_hi);
  auto chart = geom::ChartSpec::warped("schwarzschild", warp, geom::FiberSpec::round(n - 2), t_lo,
                                       t_hi);
  auto spec = rotational_immersion(profile, chart);
  spec.kind = ImmersionKind::Schwarzschild;
  spec.label = "schwarzschild";
  spec.parameters["n"] = n;
  return spec;
}

ImmersionSpec schwarzschild_immersion(int n, double t_lo, double t_hi, double step) {
  auto sol = std::make_shared<const warp::WarpSolution>(
      warp::integrate(warp::schwarzschild_params(n), t_hi, step));
  return schwarzschild_immersion(n, warp::WarpFunction::from_solution(sol), t_lo, t_hi);
}

ImmersionSpec warped_composite(std::string label, const geom::ChartSpec& chart, JetMap h1,
                               int h1_ambient, JetMap h2, const Vec& e,
                               std::optional<double> scale) {
  if (e.size() != h1_ambient || std::abs(e.norm() - 1) > 1e-12)
    throw Error(ErrorCode::BadRange, "splitting vector must be a unit vector of the h1 space");
  const Mat B = complement_basis(e);
  const int d = chart.fiber.dim();
  const auto make = [=](double s) {
    return [=](const Vec& x) {
      const Jet2 H = h1(x.head(2));
      ScalarJet2 sigma;
      sigma.value = e.dot(H.value);
      if (!(sigma.value > 0))
        throw Error(ErrorCode::NonPositiveWarp, "<h1, e> = " + io::fmt17(sigma.value));
      sigma.grad = H.first.transpose() * e;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) sigma.hess(i, j) = e.dot(H.second_vec(i, j));
      Jet2 base = Jet2::zero(h1_ambient - 1, 2);
      base.value = B.transpose() * H.value;
      base.first = B.transpose() * H.first;
      for (int k = 0; k < h1_ambient - 1; ++k)
        for (int l = 0; l < h1_ambient; ++l) base.second[k] += B(l, k) * H.second[l];
      sigma.value *= s;
      sigma.grad *= s;
      sigma.hess *= s;
      return compose_warped(base, sigma, h2(x.tail(d)));
    };
  };
  double s = 1;
  if (scale) {
    s = *scale;
  } else {
    const Vec centre = 0.5 * (chart.lo + chart.hi);
    const Mat got = make(1.0)(centre).pullback().bottomRightCorner(d, d);
    const Mat want = geom::metric_at(chart, centre).bottomRightCorner(d, d);
    s = std::sqrt(want.trace() / got.trace());
  }
  ImmersionSpec spec;
  spec.kind = ImmersionKind::WarpedComposite;
  spec.label = std::move(label);
  spec.chart = chart;
  spec.map = make(s);
  spec.ambient_dim = spec.map(0.5 * (chart.lo + chart.hi)).ambient();
  spec.scale = s;
  spec.parameters = {{"scale", s}, {"calibrated", !scale.has_value()}};
  auto ej = nlohmann::json::array();
  for (Eigen::Index i = 0; i < e.size(); ++i) ej.push_back(e[i]);
  spec.parameters["e"] = ej;
  return spec;
}

ImmersionSpec nonrotational_example1(int n, int m) {
  const auto r = geom::torus_radii_n3(n, m);
  const auto fiber = geom::FiberSpec::product(m, r.r1, n - m - 2, r.r2);
  const auto chart = geom::ChartSpec::flat_base("nonrot1", warp::WarpFunction::linear(n, 0.5, 2),
                                                fiber, 0.5, 2, -1, 1);
  const std::vector<double> offset{std::sqrt(1.0 / (n - 3))};
  const JetMap h1 = [](const Vec& x) {
    Jet2 j = Jet2::zero(2, 2);
    j.value = x;
    j.first = Mat::Identity(2, 2);
    return j;
  };
  const JetMap h2 = [fiber, offset](const Vec& y) { return fiber_jet(fiber, y, offset); };
  Vec e(2);
  e << 1, 0;
  auto spec = warped_composite("nonrot1", chart, h1, 2, h2, e);
  spec.parameters.update({{"n", n}, {"m", m}, {"r1", r.r1}, {"r2", r.r2}, {"offset", offset[0]}});
  return spec;
}

ImmersionSpec nonrotational_example2(int n, int m, int K) {
  if (K != 0 && K != 1) throw Error(ErrorCode::BadRange, "example (2) exists for K = 0, 1 only");
  const auto r = geom::torus_radii_n3(n, m);
  const auto fiber = geom::FiberSpec::product(m, r.r1, n - m - 2, r.r2);
  geom::ChartSpec chart;
  JetMap h1;
  if (K == 1) {
    chart = geom::ChartSpec::warped("nonrot2_k1", warp::WarpFunction::sine(n, 1, 0.05, 1.5), fiber,
                                    0.2, 1.3);
    h1 = [](const Vec& x) {
      const double ct = std::cos(x[0]), st = std::sin(x[0]);
      const double cu = std::cos(x[1]), su = std::sin(x[1]);
      Jet2 j = Jet2::zero(3, 2);
      j.value << ct * su, ct * cu, st;
      j.first.col(0) << -st * su, -st * cu, ct;
      j.first.col(1) << ct * cu, -ct * su, 0;
      j.second[0] << -ct * su, -st * cu, -st * cu, -ct * su;
      j.second[1] << -ct * cu, st * su, st * su, -ct * cu;
      j.second[2] << -st, 0, 0, 0;
      return j;
    };
  } else {
    chart = geom::ChartSpec::flat_base("nonrot2_k0", warp::WarpFunction::linear(n, 0.5, 2), fiber,
                                       0.5, 2, 0, 2 * kPi);
    h1 = [](const Vec& x) {
      const double cu = std::cos(x[1]), su = std::sin(x[1]);
      Jet2 j = Jet2::zero(3, 2);
      j.value << su, cu, x[0];
      j.first.col(0) << 0, 0, 1;
      j.first.col(1) << cu, -su, 0;
      j.second[0](1, 1) = -su;
      j.second[1](1, 1) = -cu;
      return j;
    };
  }
  const JetMap h2 = [fiber](const Vec& y) { return fiber_jet(fiber, y); };
  Vec e(3);
  e << 0, 0, 1;
  auto spec = warped_composite(K == 1 ? "nonrot2_k1" : "nonrot2_k0", chart, h1, 3, h2, e);
  // the sphere radius the calibrated scale selects for the h2 image
  spec.parameters.update({{"n", n},
                          {"m", m},
                          {"K", K},
                          {"r1", r.r1},
                          {"r2", r.r2},
                          {"effective_sphere_radius", spec.scale * std::hypot(r.r1, r.r2)}});
  return spec;
}

ImmersionSpec extra_codim_example(int n, int m, double t_lo, double t_hi) {
  if (n < 6) throw Error(ErrorCode::BadRange, "extra-codimension example needs n >= 6");
  const auto r = geom::torus_radii_n4(n, m);
  const double lambda = std::sqrt((n - 4.0) / (n - 3.0));
  auto sol = std::make_shared<const warp::WarpSolution>(
      warp::integrate(warp::schwarzschild_params(n), t_hi, 1e-3));
  const auto w = warp::WarpFunction::from_solution(sol).scaled(lambda);
  const auto fiber = geom::FiberSpec::product(m, r.r1, n - m - 2, r.r2);
  const auto chart = geom::ChartSpec::warped("extra_codim", w, fiber, t_lo, t_hi);
  auto spec = rotational_immersion(profile_1b(w, t_lo, t_hi), chart);
  spec.kind = ImmersionKind::ExtraCodimExample;
  spec.label = "extra_codim";
  spec.parameters.update({{"n", n}, {"m", m}, {"r1", r.r1}, {"r2", r.r2}, {"warp_scale", lambda}});
  return spec;
}

ImmersionSpec perturbed_immersion(const ImmersionSpec& spec, double amplitude) {
  ImmersionSpec out = spec;
  out.label = spec.label + "_perturbed";
  out.parameters["perturbation_amplitude"] = amplitude;
  const auto base = spec.map;
  out.map = [base, amplitude](const Vec& x) {
    Jet2 j = base(x);
    const auto n = x.size(), last = n - 1;
    j.value[0] += amplitude * x[0] * x[last];
    j.first(0, 0) += amplitude * x[last];
    j.first(0, last) += amplitude * x[0];
    j.second[0](0, last) += amplitude;
    j.second[0](last, 0) += amplitude;
    j.value[1] += amplitude * x[0] * x[0];
    j.first(1, 0) += 2 * amplitude * x[0];
    j.second[1](0, 0) += 2 * amplitude;
    return j;
  };
  return out;
}

double pullback_defect(const ImmersionSpec& spec, const std::vector<Vec>& points) {
  double worst = 0;
  for (const auto& x : points)
    worst = std::max(worst,
                     (spec(x).pullback() - geom::metric_at(spec.chart, x)).cwiseAbs().maxCoeff());
  return worst;
}

geom::ChartSpec induced_chart(const ImmersionSpec& spec) {
  const auto map = spec.map;
  return geom::ChartSpec::custom(spec.label + "_induced", spec.chart,
                                 [map](const Vec& x) { return map(x).pullback(); });
}

int Mesh::degenerate_faces() const {
  int bad = 0;
  for (const auto& f : faces) {
    const Vec a = vertices[f[1]] - vertices[f[0]];
    const Vec b = vertices[f[2]] - vertices[f[0]];
    const double area2 = a.squaredNorm() * b.squaredNorm() - std::pow(a.dot(b), 2);
    if (!(area2 > 1e-24)) ++bad;
  }
  return bad;
}

Mesh build_mesh(const ImmersionSpec& spec, std::array<int, 2> slice, std::array<int, 2> resolution,
                const Vec& base_point, std::optional<std::array<double, 4>> ranges) {
  const auto& c = spec.chart;
  std::array<double, 4> r = ranges.value_or(std::array<double, 4>{
      c.lo[slice[0]], c.hi[slice[0]], c.lo[slice[1]], c.hi[slice[1]]});
  for (int k = 0; k < 2; ++k) {
    const int i = slice[k];
    if (i < 0 || i >= c.dim() || resolution[k] < 2)
      throw Error(ErrorCode::OutsideDomain, "bad slice specification");
    if (r[2 * k] < c.lo[i] - 1e-12 || r[2 * k + 1] > c.hi[i] + 1e-12 || !(r[2 * k] < r[2 * k + 1]))
      throw Error(ErrorCode::OutsideDomain, "slice range outside the chart box");
  }
  const bool periodic[2] = {is_full_period(r[0], r[1]), is_full_period(r[2], r[3])};
  Mesh mesh;
  const int na = resolution[0], nb = resolution[1];
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b) {
      Vec x = base_point;
      const double fa = periodic[0] ? double(a) / na : double(a) / (na - 1);
      const double fb = periodic[1] ? double(b) / nb : double(b) / (nb - 1);
      x[slice[0]] = r[0] + fa * (r[1] - r[0]);
      x[slice[1]] = r[2] + fb * (r[3] - r[2]);
      mesh.vertices.push_back(spec(x).value);
    }
  const int ea = periodic[0] ? na : na - 1, eb = periodic[1] ? nb : nb - 1;
  for (int a = 0; a < ea; ++a)
    for (int b = 0; b < eb; ++b) {
      const int p = a * nb + b, q = a * nb + (b + 1) % nb;
      const int s = ((a + 1) % na) * nb + b, t = ((a + 1) % na) * nb + (b + 1) % nb;
      mesh.faces.push_back({p, s, t});
      mesh.faces.push_back({p, t, q});
    }
  return mesh;
}

std::string mesh_obj(const Mesh& mesh) {
  std::ostringstream out;
  for (const auto& v : mesh.vertices) {
    out << 'v';
    for (int k : mesh.projection) out << ' ' << io::fmt17(k < v.size() ? v[k] : 0.0);
    out << '\n';
  }
  for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  return out.str();
}

std::string mesh_csv(const Mesh& mesh) {
  std::ostringstream out;
  const auto N = mesh.vertices.empty() ? 0 : mesh.vertices.front().size();
  for (Eigen::Index k = 0; k < N; ++k) out << (k ? "," : "") << "coord_" << k;
  out << '\n';
  for (const auto& v : mesh.vertices) {
    for (Eigen::Index k = 0; k < N; ++k) out << (k ? "," : "") << io::fmt17(v[k]);
    out << '\n';
  }
  return out.str();
}

void export_mesh(const Mesh& mesh, const std::filesystem::path& stem) {
  auto obj = stem, csv = stem;
  obj += ".obj";
  csv += ".csv";
  io::write_atomic(obj, mesh_obj(mesh));
  io::write_atomic(csv, mesh_csv(mesh));
}

nlohmann::json to_json(const ImmersionSpec& spec) {
  nlohmann::json j;
  j["kind"] = to_string(spec.kind);
  j["label"] = spec.label;
  j["ambient_dim"] = spec.ambient_dim;
  j["dim"] = spec.dim();
  j["chart"] = geom::to_json(spec.chart);
  j["parameters"] = spec.parameters;
  j["scale"] = spec.scale;
  j["pullback_tol"] = spec.pullback_tol;
  if (spec.warp) j["warp"] = warp::to_json(*spec.warp);
  return j;
}

}  // namespace einwarp::imm
