#include <doctest.h>

#include <cmath>
#include <numbers>

#include "einwarp/extrinsic.hpp"
#include "oracles.hpp"

using namespace einwarp;
using namespace einwarp::imm;
using namespace einwarp::ext;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

ImmersionSpec flat_plane(int n, int N) {
  ImmersionSpec s;
  s.label = "plane";
  const auto like = clifford_immersion(n, 1).chart;
  s.chart = geom::ChartSpec::custom("plane", like, [n](const Vec&) { return Mat(Mat::Identity(n, n)); });
  s.ambient_dim = N;
  s.map = [n, N](const Vec& x) {
    Jet2 j = Jet2::zero(N, n);
    j.value.head(n) = x;
    j.first.topRows(n).setIdentity();
    return j;
  };
  return s;
}

// round n-sphere of radius r in R^{n+1}, chart of hyperspherical angles
Jet2 sphere_at(int n, double r) {
  Vec ang(n);
  for (int i = 0; i < n; ++i) ang[i] = 0.9 + 0.17 * i;
  return sphere_jet(ang, r);
}

std::vector<Vec> pts(const ImmersionSpec& s, int count, std::uint64_t seed = 42) {
  return geom::sample_points(s.chart, count, seed);
}

}  // namespace

TEST_CASE("frames: orthonormal, tangent span, upper-triangular change") {
  for (const auto& s : {clifford_immersion(5, 1), schwarzschild_immersion(5), extra_codim_example(7, 2)}) {
    for (const auto& x : pts(s, 5)) {
      const auto j = s(x);
      const auto f = frames(j);
      CHECK(f.orthonormality_defect <= 1e-10);
      CHECK((j.first * f.C - f.tangent).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(f.C.triangularView<Eigen::StrictlyLower>().toDenseMatrix().cwiseAbs().maxCoeff() == 0.0);
      CHECK((f.normal.transpose() * j.first).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("frames: rank deficiency") {
  Jet2 j = Jet2::zero(4, 2);
  j.first(0, 0) = 1;
  j.first(0, 1) = 2;
  CHECK_THROWS_CODE(frames(j), ErrorCode::RankDeficient);
}

TEST_CASE("flat plane: normals are ambient axes, everything vanishes") {
  const auto s = flat_plane(4, 7);
  Vec x(4);
  x << 0.3, -0.2, 1.1, 0.5;
  const auto j = s(x);
  const auto f = frames(j);
  CHECK((f.normal - Mat::Identity(7, 7).rightCols(3)).cwiseAbs().maxCoeff() <= 1e-14);
  const auto ops = second_fundamental_form(j, f);
  for (const auto& A : ops.A) CHECK(A.cwiseAbs().maxCoeff() == 0.0);
  CHECK(gauss_equation_residual(ops, Mat::Zero(4, 4), f) == 0.0);
  CHECK_THROWS_CODE(gauss_equation_residual(ops, Mat::Zero(3, 3), f), ErrorCode::FrameMismatch);
  CHECK(codazzi_residual(s, x, 1e-3) <= 1e-10);
}

TEST_CASE("round sphere: A = I/r for the inward normal, totally umbilical") {
  for (int n : {2, 3, 5}) {
    const double r = 1.7;
    const auto j = sphere_at(n, r);
    const auto f = frames(j);
    auto ops = second_fundamental_form(j, f);
    const double sign = f.normal.col(0).dot(j.value) < 0 ? 1.0 : -1.0;  // inward normal
    CHECK((sign * ops.A[0] - Mat::Identity(n, n) / r).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(sign * ops.H[0] - 1 / r) <= 1e-12);
    const auto u = umbilical_structure(ops, 0);
    CHECK(u.umbilical_dim == n);
  }
}

TEST_CASE("Clifford n=5: product shape operators") {
  const auto s = clifford_immersion(5, 1);
  for (const auto& x : pts(s, 5)) {
    const auto j = s(x);
    const auto f = frames(j);
    const auto ops = second_fundamental_form(j, f);
    CHECK(flat_normal_bundle_residual(ops) <= 1e-10);
    // the normals are the factor radial directions up to sign
    const Vec rad1 = (Vec(7) << j.value.head(3), Vec::Zero(4)).finished().normalized();
    const Vec rad2 = (Vec(7) << Vec::Zero(3), j.value.tail(4)).finished().normalized();
    double m1 = 0, m2 = 0;
    for (int a = 0; a < 2; ++a) {
      m1 = std::max(m1, std::abs(f.normal.col(a).dot(rad1)));
      m2 = std::max(m2, std::abs(f.normal.col(a).dot(rad2)));
    }
    CHECK(m1 == Approx(1).epsilon(1e-12));
    CHECK(m2 == Approx(1).epsilon(1e-12));
    // spectra {1,1,0,0,0} and {0,0,1/sqrt2 x3} after orienting inward
    std::vector<Vec> spectra;
    for (int a = 0; a < 2; ++a) {
      Eigen::SelfAdjointEigenSolver<Mat> es(ops.A[a]);
      Vec ev = es.eigenvalues();
      if (ev.sum() < 0) ev = (-ev).eval();
      std::sort(ev.data(), ev.data() + ev.size());
      spectra.push_back(ev);
    }
    if (spectra[0][4] < 0.9) std::swap(spectra[0], spectra[1]);
    Vec e1(5), e2(5);
    e1 << 0, 0, 0, 1, 1;
    e2 << 0, 0, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    CHECK((spectra[0] - e1).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((spectra[1] - e2).cwiseAbs().maxCoeff() <= 1e-12);
    const auto u = umbilical_structure(ops, 1);
    CHECK(u.umbilical_dim == 3);
    CHECK(u.max_residual() <= 1e-6);
    CHECK(ops.asymmetry <= 1e-12);
  }
}

TEST_CASE("flat normal bundle: Schwarzschild vs perturbed control") {
  const auto s = schwarzschild_immersion(5);
  const auto bad = perturbed_immersion(s, 1.0);
  double worst_good = 0, worst_bad_min = 1e300;
  for (const auto& x : pts(s, 10)) {
    const auto j = s(x);
    worst_good = std::max(worst_good, flat_normal_bundle_residual(second_fundamental_form(j, frames(j))));
    const auto jb = bad(x);
    const auto opsb = second_fundamental_form(jb, frames(jb));
    worst_bad_min = std::min(worst_bad_min, flat_normal_bundle_residual(opsb));
    CHECK_THROWS_CODE(umbilical_structure(opsb, 0), ErrorCode::NotFlatNormal);
  }
  CHECK(worst_good <= 1e-6);
  CHECK(worst_bad_min > 1e-3);
}

TEST_CASE("profile delta check") {
  const auto w5 = schwarzschild_immersion(5).warp.value();
  const auto p5 = profile_1b(w5, 0.1, 3.0);
  Vec x(2);
  x << 1.0, 0.7;
  CHECK(profile_delta_check(p5(x), w5(1.0)) <= 1e-6);

  const auto w6 = schwarzschild_immersion(6).warp.value();
  const auto p6 = profile_1b(w6, 0.1, 3.0);
  for (double t : {0.4, 1.3, 2.6}) {
    x << t, 2.1;
    CHECK(profile_delta_check(p6(x), w6(t)) <= 1e-6);
  }

  // phi'' = 0: the delta operator vanishes
  const warp::WarpFunction lin("affine", 0, 2,
                               [](double t) { return warp::WarpSample{t, 1 + t / 2, 0.5, 0, 0}; });
  const auto q = profile_1b(lin, 0, 2);
  x << 1.0, 0.4;
  CHECK(profile_delta_check(q(x), lin(1.0)) <= 1e-12);

  const warp::WarpFunction unit("unit slope", 0, 2,
                                [](double t) { return warp::WarpSample{t, 1 + t, 1, 0, 0}; });
  CHECK_THROWS_CODE(profile_delta_check(q(x), unit(1.0)), ErrorCode::DegenerateDelta);
}

TEST_CASE("umbilical structure and Gauss equation on Schwarzschild immersions") {
  for (int n : {4, 5, 6}) {
    const auto s = schwarzschild_immersion(n);
    for (const auto& x : pts(s, 20)) {
      const auto p = analyze_point(s, x, 0);
      CHECK(p.fnb <= 1e-6);
      CHECK(p.umb.umbilical_dim == n - 2);
      CHECK(p.umb.max_residual() <= 1e-6);
      CHECK(p.gauss <= 1e-4);
      CHECK(p.alpha_symmetry <= 1e-12);
      CHECK(p.orthonormality <= 1e-10);
    }
  }
}

TEST_CASE("intrinsic-extrinsic: complement curvature equals K of the base") {
  for (int n : {4, 5, 6}) {
    const auto s = schwarzschild_immersion(n);
    const auto w = s.warp.value();
    for (const auto& x : pts(s, 10)) {
      const auto j = s(x);
      const auto u = umbilical_structure(second_fundamental_form(j, frames(j)), 0);
      const double K = warp::gauss_curvature_L(*w.params(), w(x[0]));
      CHECK(std::abs(u.K_complement - K) <= 1e-4);
      // the two structure equations combined give the same K
      const double eta2 = u.eta.squaredNorm();
      CHECK(std::abs((n - 2) * (n - 3) * eta2 / 2 - K) <= 1e-4);
    }
  }
}

TEST_CASE("umbilical dimension on other fixtures") {
  const auto e = extra_codim_example(7, 2);
  for (const auto& x : pts(e, 5)) {
    const auto p = analyze_point(e, x, 0);
    CHECK(p.fnb <= 1e-6);
    CHECK(p.umb.umbilical_dim != 7 - 2);
    CHECK(p.gauss <= 1e-4);
  }
  const auto c = clifford_immersion(6, 2);
  for (const auto& x : pts(c, 5)) {
    const auto p = analyze_point(c, x, 2);
    CHECK(p.umb.umbilical_dim == 4);
    CHECK(p.gauss <= 1e-4);
  }
}

TEST_CASE("Codazzi") {
  for (const auto& s : {schwarzschild_immersion(5), clifford_immersion(5, 1), extra_codim_example(7, 2)})
    for (const auto& x : pts(s, 5)) CHECK(codazzi_residual(s, x, 1e-3) <= 1e-3);

  // a field in the excluded form stays Codazzi-defective under refinement
  const auto field = synthetic_epsilon_minus_field();
  Vec z = Vec::Constant(4, 0.3);
  const double r2 = codazzi_residual_field(field, z, 1e-2);
  const double r3 = codazzi_residual_field(field, z, 1e-3);
  const double r4 = codazzi_residual_field(field, z, 1e-4);
  CHECK(r4 > 0.1);
  CHECK(std::abs(r3 - r4) < 1e-3 * r4);
  CHECK(std::abs(r2 - r4) < 1e-2 * r4);
  const auto fz = field(z);
  const double a = fz[0](0, 0), b = fz[0](2, 2);
  CHECK(fz[1](2, 2) * fz[1](3, 3) == Approx(-(a * a - b * b)).epsilon(1e-14));

  // constant operators are Codazzi-clean
  const ShapeField constant = [](const Vec&) {
    Mat A = Mat::Zero(4, 4);
    A.diagonal() << 1, 1, 2, 2;
    return std::vector<Mat>{A, Mat::Zero(4, 4)};
  };
  CHECK(codazzi_residual_field(constant, z, 1e-3) <= 1e-10);
}

TEST_CASE("Dupin: principal normal parallel along the leaves") {
  for (int n : {4, 5, 6}) {
    const auto s = schwarzschild_immersion(n);
    for (const auto& x : pts(s, 3)) CHECK(dupin_residual(s, x, 0) <= 1e-4);
  }
}

TEST_CASE("appendix: Schwarzschild n=4 is the epsilon = +1 form") {
  const auto s = schwarzschild_immersion(4);
  for (const auto& x : pts(s, 12)) {
    const auto j = s(x);
    const auto ops = second_fundamental_form(j, frames(j));
    const auto d = simultaneous_diagonalize(ops.A);
    const auto rec = appendix_classify(d.diagonals[0].asDiagonal(), d.diagonals[1].asDiagonal());
    REQUIRE(rec.form == AppendixForm::EpsilonForm);
    CHECK(rec.eps == 1);
    CHECK(rec.eps_residual <= 1e-6);
  }
}

TEST_CASE("appendix: synthetic normal forms") {
  Mat A1 = Mat::Zero(4, 4), A2 = Mat::Zero(4, 4);
  A1.diagonal() << 1, 1, 2, 2;
  A2.diagonal() << 0, 0, 1, -3;
  auto rec = appendix_classify(A1, A2);
  CHECK(rec.form == AppendixForm::EpsilonForm);
  CHECK(rec.eps == 1);
  CHECK(rec.eps_residual <= 1e-12);

  A2.diagonal() << 0, 0, 1, 3;
  rec = appendix_classify(A1, A2);
  CHECK(rec.form == AppendixForm::EpsilonForm);
  CHECK(rec.eps == -1);

  // generic form, relation solved by hand: p = q = r = 1
  A1.diagonal() << 2, 1, 1, 1;
  A2.diagonal() << 0, 1, 1, 1;
  rec = appendix_classify(A1, A2);
  CHECK(rec.form == AppendixForm::GenericForm);
  for (double r : rec.relation_residuals) CHECK(r <= 1e-12);
  CHECK(rec.positivity_product == Approx(1.0));
  const auto sols = solve_generic_relations(2, 1, 1, 1);
  REQUIRE(sols.size() == 2);
  for (const auto& s : sols) {
    CHECK(std::abs(std::abs(s[0]) - 1) <= 1e-12);
    CHECK(s[0] * s[1] == Approx(1.0));
    CHECK(s[0] * s[2] == Approx(1.0));
  }

  // the same operators after a normal rotation: the search must undo it
  const double th = 0.8;
  Mat B1 = std::cos(th) * A1 - std::sin(th) * A2, B2 = std::sin(th) * A1 + std::cos(th) * A2;
  rec = appendix_classify(B1, B2);
  CHECK(rec.form == AppendixForm::GenericForm);
  for (double r : rec.relation_residuals) CHECK(r <= 1e-6);

  Mat off = A1;
  off(0, 1) = off(1, 0) = 0.5;
  CHECK_THROWS_CODE(appendix_classify(off, A2), ErrorCode::NotNormalForm);
  CHECK_THROWS_CODE(appendix_classify(Mat::Identity(3, 3), Mat::Identity(3, 3)), ErrorCode::NotNormalForm);
}

TEST_CASE("frame invariance under random seed rotations") {
  for (const auto& s : {schwarzschild_immersion(5), clifford_immersion(5, 1)}) {
    const double rho = s.kind == ImmersionKind::Clifford ? 1.0 : 0.0;
    for (const auto& x : pts(s, 3)) {
      const auto ref = analyze_point(s, x, rho);
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Mat Q = oracle::random_orthogonal(s.ambient_dim, seed);
        const auto p = analyze_point(s, x, rho, 1e-3, 1e-5, 1e-6, Q);
        CHECK(p.umb.umbilical_dim == ref.umb.umbilical_dim);
        CHECK(std::abs(p.fnb - ref.fnb) <= 1e-9);
        CHECK(std::abs(p.gauss - ref.gauss) <= 1e-9);
        CHECK(std::abs(p.umb.ga1 - ref.umb.ga1) <= 1e-9);
        CHECK(std::abs(p.umb.eqalpha1 - ref.umb.eqalpha1) <= 1e-9);
        CHECK(std::abs(p.umb.K_complement - ref.umb.K_complement) <= 1e-9);
        CHECK(std::abs(p.umb.eta.norm() - ref.umb.eta.norm()) <= 1e-9);
      }
    }
  }
}

TEST_CASE("serialization") {
  const auto s = schwarzschild_immersion(5);
  const auto x = pts(s, 2);
  std::vector<ExtrinsicPoint> v{analyze_point(s, x[0], 0), analyze_point(s, x[1], 0)};
  const auto csv = extrinsic_csv(v);
  CHECK(csv.rfind("t,u,y0,y1,y2,fnb_residual,umb_dim,ga1_res,eqalpha1_res,gauss_res\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  const auto j = to_json(v[0]);
  CHECK(j["umbilical"]["umbilical_dim"] == 3);
  Mat A1 = Mat::Zero(4, 4), A2 = Mat::Zero(4, 4);
  A1.diagonal() << 1, 1, 2, 2;
  A2.diagonal() << 0, 0, 1, -3;
  const auto rj = to_json(appendix_classify(A1, A2));
  CHECK(rj["form"] == "epsilon_form");
  CHECK(rj["eps"] == 1);
}
