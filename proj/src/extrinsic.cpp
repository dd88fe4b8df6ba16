#include "einwarp/extrinsic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "einwarp/error.hpp"
#include "einwarp/io.hpp"

namespace einwarp::ext {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGolden = 0.6180339887498949;

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// fixed generic weights for combining commuting operators
Mat generic_combination(const std::vector<Mat>& ops) {
  Mat m = Mat::Zero(ops.front().rows(), ops.front().cols());
  double w = 1;
  for (const auto& A : ops) {
    m += w * A;
    w *= kGolden;
  }
  return m;
}

Mat normal_projector(const Mat& first) {
  const auto N = first.rows();
  const Mat g = first.transpose() * first;
  return Mat::Identity(N, N) - first * g.ldlt().solve(first.transpose());
}

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

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

FrameData frames(const imm::Jet2& jet, const std::optional<Mat>& seed) {
  const Mat& J = jet.first;
  const auto N = J.rows(), n = J.cols();
  if (N <= n) throw Error(ErrorCode::RankDeficient, "no normal space");
  Mat E = Mat::Zero(N, n);
  Mat R = Mat::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Vec v = J.col(k);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i < k; ++i) {
        const double c = E.col(i).dot(v);
        R(i, k) += c;
        v -= c * E.col(i);
      }
    const double len = v.norm();
    if (!(len > 1e-10 * std::max(1.0, J.col(k).norm())))
      throw Error(ErrorCode::RankDeficient, "tangent vectors are linearly dependent");
    R(k, k) = len;
    E.col(k) = v / len;
  }
  FrameData f;
  f.tangent = E;
  f.C = R.triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));

  const Mat Q = seed.value_or(Mat::Identity(N, N));
  Mat span = E;
  std::vector<bool> used(static_cast<std::size_t>(N), false);
  f.normal = Mat::Zero(N, N - n);
  for (Eigen::Index a = 0; a < N - n; ++a) {
    Eigen::Index best = -1;
    double best_len = -1;
    Vec best_v;
    for (Eigen::Index c = 0; c < N; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      const Vec v = Q.col(c) - span * (span.transpose() * Q.col(c));
      if (v.norm() > best_len) {
        best_len = v.norm();
        best = c;
        best_v = v;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    best_v -= span * (span.transpose() * best_v);
    best_v.normalize();
    f.normal.col(a) = best_v;
    span.conservativeResize(N, span.cols() + 1);
    span.col(span.cols() - 1) = best_v;
  }
  Mat full(N, N);
  full << f.tangent, f.normal;
  f.orthonormality_defect = max_abs(full.transpose() * full - Mat::Identity(N, N));
  return f;
}

Vec ShapeOperatorSet::alpha(int i, int j) const {
  Vec v(codim());
  for (int a = 0; a < codim(); ++a) v[a] = A[static_cast<std::size_t>(a)](i, j);
  return v;
}

ShapeOperatorSet second_fundamental_form(const imm::Jet2& jet, const FrameData& frame) {
  const int n = jet.dim();
  const auto k = frame.normal.cols();
  ShapeOperatorSet ops;
  ops.H = Vec::Zero(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    Mat F(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) F(i, j) = frame.normal.col(a).dot(jet.second_vec(i, j));
    const Mat A = frame.C.transpose() * F * frame.C;
    ops.asymmetry = std::max(ops.asymmetry, max_abs(A - A.transpose()));
    ops.A.push_back(0.5 * (A + A.transpose()));
    ops.H[a] = ops.A.back().trace() / n;
  }
  return ops;
}

double flat_normal_bundle_residual(const ShapeOperatorSet& ops) {
  double worst = 0;
  for (std::size_t a = 0; a < ops.A.size(); ++a)
    for (std::size_t b = a + 1; b < ops.A.size(); ++b)
      worst = std::max(worst, max_abs(ops.A[a] * ops.A[b] - ops.A[b] * ops.A[a]));
  return worst;
}

double profile_delta_check(const imm::Jet2& g, const warp::WarpSample& s, double tol) {
  if (g.ambient() != 4 || g.dim() != 2)
    throw Error(ErrorCode::FrameMismatch, "profile jet must map R^2 into R^4");
  const double w = 1 - s.dphi * s.dphi;
  if (!(w > tol)) throw Error(ErrorCode::DegenerateDelta, "1 - phi'^2 = " + io::fmt17(w));
  Vec delta(4);
  delta.head(3) = -s.dphi * g.first.col(0).head(3);
  delta[3] = w;
  const auto f = frames(g);
  Mat F(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) F(i, j) = delta.dot(g.second_vec(i, j));
  const Mat A = f.C.transpose() * F * f.C;
  return max_abs(A - s.d2phi * Mat::Identity(2, 2));
}

double UmbilicalReport::max_residual() const {
  double m = 0;
  for (double v : {ga1, eqalpha, eqalpha2, eqalpha1})
    m = std::isnan(v) ? NAN : std::max(m, v);
  return m;
}

Diagonalization simultaneous_diagonalize(const std::vector<Mat>& ops) {
  Eigen::SelfAdjointEigenSolver<Mat> es(generic_combination(ops));
  Diagonalization d;
  d.V = es.eigenvectors();
  for (const auto& A : ops) d.diagonals.push_back((d.V.transpose() * A * d.V).diagonal());
  return d;
}

UmbilicalReport umbilical_structure(const ShapeOperatorSet& ops, double rho, double tol_group,
                                    double tol_flat) {
  UmbilicalReport rep;
  rep.commutator = flat_normal_bundle_residual(ops);
  if (rep.commutator > tol_flat)
    throw Error(ErrorCode::NotFlatNormal,
                "shape operators do not commute: " + io::fmt17(rep.commutator));
  const int n = ops.dim(), k = ops.codim();
  const auto diag = simultaneous_diagonalize(ops.A);
  std::vector<Vec> etas(static_cast<std::size_t>(n), Vec(k));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < k; ++a) etas[i][a] = diag.diagonals[a][i];

  // group eigendirections sharing a principal normal
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < n; ++i) {
    bool placed = false;
    for (auto& g : groups) {
      const Vec& ref = etas[g.front()];
      if ((etas[i] - ref).norm() < tol_group * (1 + ref.norm())) {
        g.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({i});
  }
  const auto best = std::max_element(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    return a.size() < b.size();
  });
  rep.umbilical_dim = static_cast<int>(best->size());
  rep.eta = Vec::Zero(k);
  rep.leaf_basis = Mat(n, rep.umbilical_dim);
  for (int c = 0; c < rep.umbilical_dim; ++c) {
    rep.eta += etas[(*best)[c]] / rep.umbilical_dim;
    rep.leaf_basis.col(c) = diag.V.col((*best)[c]);
  }
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (std::find(best->begin(), best->end(), i) == best->end()) rest.push_back(i);
  rep.complement = Mat(n, static_cast<Eigen::Index>(rest.size()));
  for (std::size_t c = 0; c < rest.size(); ++c) rep.complement.col(c) = diag.V.col(rest[c]);

  if (k != 2 || rest.size() != 2) return rep;
  // a fixed rotation inside the complement keeps the checks off the eigenbasis
  const double th = 0.3;
  const Vec e1 = std::cos(th) * rep.complement.col(0) + std::sin(th) * rep.complement.col(1);
  const Vec e2 = -std::sin(th) * rep.complement.col(0) + std::cos(th) * rep.complement.col(1);
  rep.complement.col(0) = e1;
  rep.complement.col(1) = e2;
  const auto alpha = [&](const Vec& x, const Vec& y) {
    Vec v(k);
    for (int a = 0; a < k; ++a) v[a] = x.dot(ops.A[a] * y);
    return v;
  };
  const Vec a11 = alpha(e1, e1), a22 = alpha(e2, e2), a12 = alpha(e1, e2);
  const Vec& eta = rep.eta;
  rep.K_complement = a11.dot(a22) - a12.squaredNorm();
  rep.ga1 = std::max(std::abs(rho - rep.K_complement - (n - 2) * a11.dot(eta)),
                     std::abs(rho - rep.K_complement - (n - 2) * a22.dot(eta)));
  rep.eqalpha = std::abs(a11.dot(eta) - a22.dot(eta));
  rep.eqalpha2 = std::abs(a12.dot(eta));
  rep.eqalpha1 = std::max(std::abs(rho - (n - 3) * eta.squaredNorm() - 2 * a11.dot(eta)),
                          std::abs(rho - (n - 3) * eta.squaredNorm() - 2 * a22.dot(eta)));
  return rep;
}

double gauss_equation_residual(const ShapeOperatorSet& ops, const Mat& ricci_chart,
                               const FrameData& frame) {
  const int n = ops.dim();
  if (ricci_chart.rows() != n || ricci_chart.cols() != n || frame.C.rows() != n)
    throw Error(ErrorCode::FrameMismatch, "Ricci matrix and frame disagree in dimension");
  const Mat ric = frame.C.transpose() * ricci_chart * frame.C;
  Mat rhs = Mat::Zero(n, n);
  for (const auto& A : ops.A) rhs += A.trace() * A - A * A;
  return max_abs(ric - rhs);
}

double codazzi_residual(const imm::ImmersionSpec& spec, const Vec& x, double h) {
  const int n = spec.dim();
  const auto jet = spec(x);
  const Mat PN = normal_projector(jet.first);
  const Mat g = jet.pullback();
  const Mat ginv = g.inverse();
  const auto N = jet.ambient();
  // alpha_jk as ambient vectors, normal-projected
  const auto alpha_at = [&](const imm::Jet2& j) {
    const Mat P = normal_projector(j.first);
    std::vector<Vec> a(static_cast<std::size_t>(n * n));
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) a[static_cast<std::size_t>(p * n + q)] = P * j.second_vec(p, q);
    return a;
  };
  const auto a0 = alpha_at(jet);
  std::vector<std::vector<Vec>> da(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const auto ap = alpha_at(spec(xp)), am = alpha_at(spec(xm));
    da[i].resize(static_cast<std::size_t>(n * n));
    for (int p = 0; p < n * n; ++p) da[i][p] = PN * (ap[p] - am[p]) / (2 * h);
  }
  // Gamma^l_ij from the jet
  std::vector<Vec> gam(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gam[i * n + j] = ginv * (jet.first.transpose() * jet.second_vec(i, j));
  const auto nabla = [&](int i, int j, int k) {
    Vec v = da[i][j * n + k];
    for (int l = 0; l < n; ++l)
      v -= gam[i * n + j][l] * a0[l * n + k] + gam[i * n + k][l] * a0[j * n + l];
    return v;
  };
  std::vector<Vec> D(static_cast<std::size_t>(n * n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) D[(i * n + j) * n + k] = nabla(i, j, k) - nabla(j, i, k);
  const auto frame = frames(jet);
  const Mat& C = frame.C;
  double worst = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Vec v = Vec::Zero(N);
        for (int i = 0; i <= a; ++i)
          for (int j = 0; j <= b; ++j)
            for (int k = 0; k <= c; ++k) v += C(i, a) * C(j, b) * C(k, c) * D[(i * n + j) * n + k];
        worst = std::max(worst, v.norm());
      }
  return worst;
}

double codazzi_residual_field(const ShapeField& field, const Vec& x, double h) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<Mat>> d(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const auto p = field(xp), m = field(xm);
    for (std::size_t a = 0; a < p.size(); ++a) d[i].push_back((p[a] - m[a]) / (2 * h));
  }
  double worst = 0;
  for (std::size_t a = 0; a < d[0].size(); ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(d[i][a](j, k) - d[j][a](i, k)));
  return worst;
}

ShapeField synthetic_epsilon_minus_field() {
  return [](const Vec& x) {
    const double a = 1 + 0.3 * x[0] + 0.1 * x[1] * x[1];
    const double b = 2 + 0.2 * x[1] - 0.1 * x[2];
    const double p = 1 + 0.1 * x[2] + 0.05 * x[3];
    const double q = -(a * a - b * b) / p;
    Mat A1 = Mat::Zero(4, 4), A2 = Mat::Zero(4, 4);
    A1.diagonal() << a, a, b, b;
    A2.diagonal() << 0, 0, p, q;
    return std::vector<Mat>{A1, A2};
  };
}

double dupin_residual(const imm::ImmersionSpec& spec, const Vec& x, double rho, double h,
                      int samples) {
  const int last = spec.dim() - 1;
  const auto eta_ambient = [&](const Vec& z) {
    const auto jet = spec(z);
    const auto f = frames(jet);
    const auto rep = umbilical_structure(second_fundamental_form(jet, f), rho);
    return Vec(f.normal * rep.eta);
  };
  double worst = 0;
  for (int s = 0; s < samples; ++s) {
    Vec z = x;
    z[last] = 0.1 + 2 * kPi * s / samples;
    const auto jet = spec(z);
    Vec zp = z, zm = z;
    zp[last] += h;
    zm[last] -= h;
    const Vec d = (eta_ambient(zp) - eta_ambient(zm)) / (2 * h);
    const double speed = jet.first.col(last).norm();
    worst = std::max(worst, (normal_projector(jet.first) * d).norm() / speed);
  }
  return worst;
}

std::string to_string(AppendixForm form) {
  switch (form) {
    case AppendixForm::EpsilonForm: return "epsilon_form";
    case AppendixForm::GenericForm: return "generic_form";
    case AppendixForm::Unclassified: return "unclassified";
  }
  return "unknown";
}

namespace {

// Angle in [0, pi) minimizing |-sin(t) x + cos(t) y|: 1e4-step grid, then golden section.
std::pair<double, double> zero_angle(double x, double y) {
  const auto f = [&](double t) { return std::abs(-std::sin(t) * x + std::cos(t) * y); };
  constexpr int steps = 10000;
  int best = 0;
  double best_v = f(0);
  for (int j = 1; j < steps; ++j) {
    const double v = f(kPi * j / steps);
    if (v < best_v) {
      best_v = v;
      best = j;
    }
  }
  double lo = kPi * (best - 1) / steps, hi = kPi * (best + 1) / steps;
  double c = hi - kGolden * (hi - lo), d = lo + kGolden * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kGolden * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kGolden * (hi - lo);
      fd = f(d);
    }
  }
  double t = 0.5 * (lo + hi);
  if (f(kPi * best / steps) < f(t)) t = kPi * best / steps;
  return {t, f(t)};
}

}  // namespace

AppendixRecord appendix_classify(const Mat& A1, const Mat& A2, double tol) {
  if (A1.rows() != 4 || A1.cols() != 4 || A2.rows() != 4 || A2.cols() != 4)
    throw Error(ErrorCode::NotNormalForm, "appendix normal forms are for n = 4");
  const Vec d1 = A1.diagonal(), d2 = A2.diagonal();
  const double scale = 1 + std::max(d1.cwiseAbs().maxCoeff(), d2.cwiseAbs().maxCoeff());
  Mat off1 = A1, off2 = A2;
  off1.diagonal().setZero();
  off2.diagonal().setZero();
  if (std::max(max_abs(off1), max_abs(off2)) > tol * scale)
    throw Error(ErrorCode::NotNormalForm, "operators are not diagonal in a shared frame");

  AppendixRecord rec;
  struct Candidate {
    int k;
    double angle;
    Vec r1, r2;
    std::vector<int> zeros;
  };
  std::vector<Candidate> cands;
  for (int k = 0; k < 4; ++k) {
    const auto [t, v] = zero_angle(d1[k], d2[k]);
    if (v > tol * scale) continue;
    Candidate c{k, t, std::cos(t) * d1 + std::sin(t) * d2, -std::sin(t) * d1 + std::cos(t) * d2, {}};
    for (int i = 0; i < 4; ++i)
      if (std::abs(c.r2[i]) <= tol * scale) c.zeros.push_back(i);
    cands.push_back(c);
  }
  if (cands.empty())
    throw Error(ErrorCode::NotNormalForm, "no normal rotation zeroes a diagonal entry of A2");

  for (const auto& c : cands) {
    if (c.zeros.size() != 2) continue;
    std::vector<int> others;
    for (int i = 0; i < 4; ++i)
      if (std::find(c.zeros.begin(), c.zeros.end(), i) == c.zeros.end()) others.push_back(i);
    const int z1 = c.zeros[0], z2 = c.zeros[1], o1 = others[0], o2 = others[1];
    if (std::abs(c.r1[z1] - c.r1[z2]) > tol * scale || std::abs(c.r1[o1] - c.r1[o2]) > tol * scale)
      continue;
    rec.form = AppendixForm::EpsilonForm;
    rec.rotation = c.angle;
    rec.order = {z1, z2, o1, o2};
    rec.a = 0.5 * (c.r1[z1] + c.r1[z2]);
    rec.b = 0.5 * (c.r1[o1] + c.r1[o2]);
    rec.p = c.r2[o1];
    rec.q = c.r2[o2];
    const double diff = rec.a * rec.a - rec.b * rec.b;
    const double pq = rec.p * rec.q;
    rec.eps = (std::abs(diff) > tol * scale ? pq * diff : pq) >= 0 ? 1 : -1;
    rec.eps_residual = std::abs(pq - rec.eps * diff);
    return rec;
  }

  const auto& c = cands.front();
  std::vector<int> order{c.k};
  for (int i = 0; i < 4; ++i)
    if (i != c.k) order.push_back(i);
  rec.rotation = c.angle;
  rec.order = {order[0], order[1], order[2], order[3]};
  const double a = c.r1[order[0]], b = c.r1[order[1]], cc = c.r1[order[2]], d = c.r1[order[3]];
  const double p = c.r2[order[1]], q = c.r2[order[2]], r = c.r2[order[3]];
  rec.abcd = {a, b, cc, d};
  rec.pqr = {p, q, r};
  rec.relation_residuals = {std::abs(p * q - (a * d - b * cc)), std::abs(p * r - (a * cc - b * d)),
                            std::abs(q * r - (a * b - cc * d))};
  rec.positivity_product = (b * a - cc * d) * (cc * a - b * d) * (d * a - b * cc);
  const double worst = *std::max_element(rec.relation_residuals.begin(), rec.relation_residuals.end());
  rec.form = worst <= tol * scale * scale ? AppendixForm::GenericForm : AppendixForm::Unclassified;
  return rec;
}

std::vector<std::array<double, 3>> solve_generic_relations(double a, double b, double c, double d,
                                                           double tol) {
  const double X = a * d - b * c, Y = a * c - b * d, Z = a * b - c * d;
  std::vector<std::array<double, 3>> out;
  if (X == 0 || Y == 0 || Z == 0) return out;
  const double mp = std::sqrt(std::abs(X * Y / Z)), mq = std::sqrt(std::abs(X * Z / Y)),
               mr = std::sqrt(std::abs(Y * Z / X));
  for (int s = 0; s < 8; ++s) {
    const double p = (s & 1 ? -1 : 1) * mp, q = (s & 2 ? -1 : 1) * mq, r = (s & 4 ? -1 : 1) * mr;
    const double scale = 1 + std::abs(X) + std::abs(Y) + std::abs(Z);
    if (std::abs(p * q - X) <= tol * scale && std::abs(p * r - Y) <= tol * scale &&
        std::abs(q * r - Z) <= tol * scale)
      out.push_back({p, q, r});
  }
  return out;
}

ExtrinsicPoint analyze_point(const imm::ImmersionSpec& spec, const Vec& x, double rho,
                             double fd_step, double tol_group, double tol_flat,
                             const std::optional<Mat>& seed) {
  ExtrinsicPoint pt;
  pt.x = x;
  const auto jet = spec(x);
  const auto frame = frames(jet, seed);
  const auto ops = second_fundamental_form(jet, frame);
  pt.orthonormality = frame.orthonormality_defect;
  pt.alpha_symmetry = ops.asymmetry;
  pt.fnb = flat_normal_bundle_residual(ops);
  if (pt.fnb <= tol_flat) pt.umb = umbilical_structure(ops, rho, tol_group, tol_flat);
  const auto ric = geom::ricci_fd(spec.chart, x, fd_step, rho).ricci;
  pt.gauss = gauss_equation_residual(ops, ric, frame);
  return pt;
}

nlohmann::json to_json(const ShapeOperatorSet& ops) {
  nlohmann::json j;
  auto A = nlohmann::json::array();
  for (const auto& m : ops.A) A.push_back(to_array(m));
  j["A"] = A;
  j["H"] = to_array(ops.H);
  return j;
}

nlohmann::json to_json(const UmbilicalReport& r) {
  return {{"umbilical_dim", r.umbilical_dim},
          {"eta", to_array(r.eta)},
          {"commutator", r.commutator},
          {"ga1", finite_or_null(r.ga1)},
          {"eqalpha", finite_or_null(r.eqalpha)},
          {"eqalpha2", finite_or_null(r.eqalpha2)},
          {"eqalpha1", finite_or_null(r.eqalpha1)},
          {"K_complement", finite_or_null(r.K_complement)}};
}

nlohmann::json to_json(const AppendixRecord& r) {
  nlohmann::json j = {{"form", to_string(r.form)},
                      {"rotation", r.rotation},
                      {"order", r.order},
                      {"search", r.search}};
  if (r.form == AppendixForm::EpsilonForm) {
    j.update({{"a", r.a}, {"b", r.b}, {"p", r.p}, {"q", r.q}, {"eps", r.eps},
              {"eps_residual", r.eps_residual}});
  } else {
    j.update({{"abcd", r.abcd},
              {"pqr", r.pqr},
              {"relation_residuals", {finite_or_null(r.relation_residuals[0]),
                                      finite_or_null(r.relation_residuals[1]),
                                      finite_or_null(r.relation_residuals[2])}},
              {"positivity_product", finite_or_null(r.positivity_product)}});
  }
  return j;
}

nlohmann::json to_json(const ExtrinsicPoint& p) {
  return {{"x", to_array(p.x)},
          {"fnb_residual", p.fnb},
          {"umbilical", to_json(p.umb)},
          {"gauss_residual", finite_or_null(p.gauss)},
          {"orthonormality", p.orthonormality},
          {"alpha_symmetry", p.alpha_symmetry}};
}

std::string extrinsic_csv(const std::vector<ExtrinsicPoint>& points) {
  std::ostringstream out;
  const auto n = points.empty() ? 2 : points.front().x.size();
  out << "t,u,";
  for (Eigen::Index i = 2; i < n; ++i) out << 'y' << i - 2 << ',';
  out << "fnb_residual,umb_dim,ga1_res,eqalpha1_res,gauss_res\n";
  for (const auto& p : points) {
    for (Eigen::Index i = 0; i < n; ++i) out << io::fmt17(p.x[i]) << ',';
    out << io::fmt17(p.fnb) << ',' << p.umb.umbilical_dim << ',' << io::fmt17(p.umb.ga1) << ','
        << io::fmt17(p.umb.eqalpha1) << ',' << io::fmt17(p.gauss) << '\n';
  }
  return out.str();
}

}  // namespace einwarp::ext
