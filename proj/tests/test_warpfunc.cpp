#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "einwarp/warpfunc.hpp"
#include "oracles.hpp"

using namespace einwarp;
using namespace einwarp::warp;
using doctest::Approx;

namespace {

WarpParams custom(int n, int eps, double rho, double c) {
  WarpParams p;
  p.n = n;
  p.eps = eps;
  p.rho = rho;
  p.c = c;
  return p;
}

}  // namespace

TEST_CASE("rhs_second_order") {
  CHECK(rhs_second_order(custom(5, 1, 0, -1), 1.0, 0.0) == Approx(1.0).epsilon(1e-15));
  for (int n : {4, 5, 8}) CHECK(rhs_second_order(custom(n, 1, 0, 0), 2.7, 1.0) == 0.0);
  // phi = sin t solves the law with rho = n-1; at t = pi/6 phi'' = -sin(pi/6)
  const double t = std::numbers::pi / 6;
  const double v = rhs_second_order(custom(5, 1, 4, 0), std::sin(t), std::cos(t));
  CHECK(v == Approx(-0.5).epsilon(1e-14));
  CHECK(v == Approx(-std::sin(t)).epsilon(1e-14));
  CHECK_THROWS_CODE(rhs_second_order(custom(5, 1, 0, 0), 0.0, 1.0), ErrorCode::NonPositivePhi);
  CHECK_THROWS_CODE(rhs_second_order(custom(5, 1, 0, 0), -1.0, 1.0), ErrorCode::NonPositivePhi);
}

TEST_CASE("first_integral_residual") {
  CHECK(std::abs(first_integral_residual(custom(5, 1, 0, -1), std::sqrt(2.0), std::sqrt(0.5))) <
        1e-15);
  CHECK(std::abs(first_integral_residual(custom(6, 1, 0, -27.0 / 8), 1.5, 0.0)) < 1e-15);
  const auto p = WarpParams::from_initial_data(7, -1, 2.5, 0.3, 1.7, 0.4);
  CHECK(std::abs(first_integral_residual(p, p.phi0, p.dphi0)) < 1e-14);
  CHECK_THROWS_CODE(first_integral_residual(p, 0.0, 0.0), ErrorCode::NonPositivePhi);
}

TEST_CASE("c_from_state") {
  CHECK(c_from_state(5, 1, 0, 1.0, 0.0) == -1.0);
  CHECK(std::abs(c_from_state(7, 1, 6, 1.0, 0.0)) < 1e-15);
  CHECK(c_from_state(6, 1, 0, 1.5, 0.0) == Approx(-3.375).epsilon(1e-15));
  CHECK_THROWS_CODE(c_from_state(5, 1, 0, 0.0, 0.0), ErrorCode::NonPositivePhi);
}

TEST_CASE("with_constant validates against the initial data") {
  CHECK_NOTHROW(WarpParams::with_constant(5, 1, 0, -1, 0, 1, 0));
  CHECK_THROWS_CODE(WarpParams::with_constant(5, 1, 0, -0.9, 0, 1, 0),
                    ErrorCode::InconsistentParams);
  CHECK_THROWS_CODE(WarpParams::from_initial_data(3, 1, 0, 0, 1, 0), ErrorCode::BadDimension);
  CHECK_THROWS_CODE(WarpParams::from_initial_data(5, 1, 0, 0, -1, 0), ErrorCode::NonPositivePhi);
}

TEST_CASE("third_derivative") {
  CHECK(third_derivative(custom(6, 1, 0, -3.375), 1.5, 0.0) == 0.0);

  // Taylor-arithmetic differentiation of sqrt(t^2 + 1) at t = 1
  const auto x = oracle::Taylor3::variable(1.0);
  const auto phi = sqrt(x * x + oracle::Taylor3::constant(1.0));
  const double expected = phi.derivative(3);
  CHECK(expected == Approx(-0.53033008588991064).epsilon(1e-15));
  CHECK(phi.derivative(1) == Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(third_derivative(custom(5, 1, 0, -1), phi.derivative(0), phi.derivative(1)) ==
        Approx(expected).epsilon(1e-13));

  for (double t : {0.2, 0.9, 1.4}) {
    CHECK(third_derivative(custom(5, 1, 4, 0), std::sin(t), std::cos(t)) ==
          Approx(-std::cos(t)).epsilon(1e-13));
  }
}

TEST_CASE("integrate reproduces sqrt(t^2+1) for n = 5") {
  const auto sol = integrate(schwarzschild_params(5), 5.0, 1e-3);
  CHECK(sol.halt() == HaltReason::Completed);
  CHECK(sol.samples().size() == 5001);
  double err = 0;
  for (const auto& s : sol.samples()) err = std::max(err, std::abs(s.phi - std::sqrt(s.t * s.t + 1)));
  CHECK(err <= 1e-9);
}

TEST_CASE("integrate reproduces the shifted sine for c = 0") {
  const int n = 6;
  const double a = 1.0;
  const auto p = WarpParams::from_initial_data(n, 1, (n - 1) * a * a, 0.0, 1 / a, 0.0);
  CHECK(std::abs(p.c) < 1e-15);
  const auto sol = integrate(p, 1.5, 1e-3);
  double err = 0;
  for (const auto& s : sol.samples())
    err = std::max(err, std::abs(s.phi - std::sin(a * s.t + std::numbers::pi / 2) / a));
  CHECK(err <= 1e-10);
}

TEST_CASE("integrate conserves the first integral for Schwarzschild n = 6") {
  const auto sol = integrate(schwarzschild_params(6), 5.0, 1e-3);
  CHECK(sol.max_drift() <= 1e-9);
}

TEST_CASE("integrate error paths") {
  // phi = cos t reaches the floor at pi/2
  const auto p = WarpParams::from_initial_data(5, 1, 4, 0, 1, 0);
  CHECK_THROWS_CODE(integrate(p, 5.0, 1e-3), ErrorCode::DomainExhausted);
  IntegrateOptions opts;
  opts.allow_truncation = true;
  // the equation is singular at phi = 0, so accuracy degrades in the last steps
  opts.tol_drift = 1e-5;
  const auto sol = integrate(p, 5.0, 1e-3, opts);
  CHECK(sol.halt() == HaltReason::PhiFloor);
  CHECK(sol.t_end() < std::numbers::pi / 2);
  CHECK(sol.t_end() > std::numbers::pi / 2 - 2e-3);
  CHECK(std::all_of(sol.samples().begin(), sol.samples().end(),
                    [](const WarpSample& s) { return s.phi > 0; }));

  CHECK_THROWS_CODE(integrate(schwarzschild_params(5), 5.0, 0.5), ErrorCode::StepTooLarge);
  CHECK_THROWS_CODE(integrate(schwarzschild_params(5), 5.0, -1.0), ErrorCode::StepTooLarge);
}

TEST_CASE("dense output agrees with the closed form between grid points") {
  const auto sol = integrate(schwarzschild_params(5), 3.0, 1e-3);
  for (double t : {0.00037, 1.23456, 2.9994}) {
    const auto s = sol.at(t);
    const auto e = closed_form_n5(-1, t);
    CHECK(std::abs(s.phi - e.phi) < 1e-11);
    CHECK(std::abs(s.dphi - e.dphi) < 1e-11);
    CHECK(std::abs(s.d3phi - e.d3phi) < 1e-10);
  }
  CHECK_THROWS_CODE(sol.at(3.1), ErrorCode::OutOfDomain);
}

TEST_CASE("schwarzschild_params") {
  const auto p5 = schwarzschild_params(5);
  CHECK(p5.eps == 1);
  CHECK(p5.rho == 0);
  CHECK(p5.c == -1);
  CHECK(p5.phi0 == 1);
  CHECK(p5.dphi0 == 0);
  CHECK(schwarzschild_params(4).c == -0.5);
  CHECK(schwarzschild_params(4).phi0 == 0.5);
  CHECK(schwarzschild_params(7).c == -16);
  CHECK(schwarzschild_params(7).phi0 == 2);
  CHECK_THROWS_CODE(schwarzschild_params(3), ErrorCode::BadDimension);
}

TEST_CASE("closed_form_n5") {
  const auto s0 = closed_form_n5(-1, 0);
  CHECK(s0.phi == 1);
  CHECK(s0.dphi == 0);
  CHECK(s0.d2phi == 1);
  CHECK(s0.d3phi == 0);
  CHECK(closed_form_n5(-1, 1e6).dphi == Approx(1.0).epsilon(1e-12));
  const auto s1 = closed_form_n5(1, std::sqrt(2.0));
  CHECK(s1.phi == Approx(1.0).epsilon(1e-15));
  CHECK(s1.dphi == Approx(std::sqrt(2.0)).epsilon(1e-15));
  // the 3-jet against Taylor arithmetic at a generic point
  const auto x = oracle::Taylor3::variable(0.7);
  const auto phi = sqrt(x * x + oracle::Taylor3::constant(2.5));
  const auto s = closed_form_n5(-2.5, 0.7);
  CHECK(s.d2phi == Approx(phi.derivative(2)).epsilon(1e-14));
  CHECK(s.d3phi == Approx(phi.derivative(3)).epsilon(1e-14));
  CHECK_THROWS_CODE(closed_form_n5(1, 1), ErrorCode::OutOfDomain);
  CHECK_THROWS_CODE(closed_form_n5(1, 0.5), ErrorCode::OutOfDomain);
}

TEST_CASE("gauss_curvature_L") {
  const auto p5 = schwarzschild_params(5);
  const auto s0 = make_sample(p5, 0, 1, 0);
  CHECK(gauss_curvature_L(p5, s0) == Approx(3.0).epsilon(1e-15));
  CHECK(-(5 - 2) * (5 - 3) * p5.c / (2 * std::pow(s0.phi, 4)) == 3.0);

  const auto sine = WarpFunction::sine(5, 1, 0.1, 1.4);
  for (double t : {0.3, 0.8, 1.3}) CHECK(gauss_curvature_L(*sine.params(), sine(t)) == Approx(1.0));

  const auto p = WarpParams::from_initial_data(6, 1, 3.0, 0, 0.5, std::sqrt(1 - 0.6 * 0.25));
  CHECK(std::abs(p.c) < 1e-15);
  const auto sol = integrate(p, 1.0, 1e-3);
  for (const auto& s : sol.samples())
    CHECK(gauss_curvature_L(p, s) == Approx(3.0 / 5).epsilon(1e-9));
}

TEST_CASE("embeddability_margin") {
  for (int n : {4, 5, 6, 7}) {
    const auto p = schwarzschild_params(n);
    const auto sol = integrate(p, 3.0, 1e-3);
    CHECK(std::abs(embeddability_margin(sol.samples()[0])) <= 1e-12);
    for (std::size_t i = 1; i < sol.samples().size(); ++i)
      CHECK(embeddability_margin(sol.samples()[i]) > 0);
  }
  CHECK(embeddability_margin({0, 0.5, 1.0, 0.0, 0}) == 0.0);
  CHECK(embeddability_margin({0, 0.5, 1.0, 0.3, 0}) < 0);
}

TEST_CASE("schwarzschild_identity_residual") {
  CHECK(std::abs(schwarzschild_identity_residual(schwarzschild_params(5),
                                                 make_sample(schwarzschild_params(5), 0, 1, 0))) <
        1e-15);
  const auto p4 = schwarzschild_params(4);
  CHECK(std::abs(schwarzschild_identity_residual(p4, make_sample(p4, 0, 0.5, 0))) < 1e-15);
  const auto p6 = schwarzschild_params(6);
  const auto sol = integrate(p6, 2.0, 1e-3);
  CHECK(std::abs(schwarzschild_identity_residual(p6, sol.at(1.0))) <= 1e-9);
  CHECK_THROWS_CODE(schwarzschild_identity_residual(custom(5, 1, 1, -1), WarpSample{0, 1, 0, 0, 0}),
                    ErrorCode::WrongFamily);
}

TEST_CASE("fact1_diagnostics") {
  const auto p = schwarzschild_params(5);
  const auto r0 = fact1_diagnostics(p, make_sample(p, 0, 1, 0));
  CHECK(std::abs(r0.curvature) < 1e-15);
  CHECK(std::abs(r0.laplacian) < 1e-15);
  CHECK(std::abs(r0.hessian) < 1e-15);
  for (int n : {4, 6, 7}) {
    const auto pn = schwarzschild_params(n);
    const auto sol = integrate(pn, 4.0, 1e-3);
    double worst = 0;
    double inf_phi = HUGE_VAL;
    double t_at_inf = -1;
    for (const auto& s : sol.samples()) {
      const auto r = fact1_diagnostics(pn, s);
      worst = std::max({worst, std::abs(r.curvature), std::abs(r.laplacian), std::abs(r.hessian)});
      if (s.phi < inf_phi) {
        inf_phi = s.phi;
        t_at_inf = s.t;
      }
    }
    CHECK(worst < 1e-9);
    CHECK(inf_phi == Approx(critical_infimum(pn)).epsilon(1e-14));
    CHECK(t_at_inf == 0.0);
  }
  CHECK_THROWS_CODE(fact1_diagnostics(custom(5, 1, 2, 0), WarpSample{0, 1, 0, 0, 0}),
                    ErrorCode::WrongRegime);
  CHECK_THROWS_CODE(fact1_diagnostics(custom(5, 0, 0, 0), WarpSample{0, 1, 0, 0, 0}),
                    ErrorCode::WrongRegime);
}

TEST_CASE("property: conservation and fourth-order convergence") {
  for (int n : {4, 5, 6, 7, 9}) {
    const auto p = schwarzschild_params(n);
    CHECK(integrate(p, 5.0, 1e-3).max_drift() <= 1e-8);
    // truncation-dominated regime: the coarse steps keep roundoff negligible
    IntegrateOptions loose;
    loose.tol_drift = HUGE_VAL;
    const double coarse = integrate(p, 5.0, 0.04, loose).max_drift();
    const double fine = integrate(p, 5.0, 0.02, loose).max_drift();
    CHECK(coarse / fine >= 8.0);
  }
}

TEST_CASE("property: integrator agrees with sqrt(t^2-c) for several c") {
  for (double c : {-4.0, -1.0, -0.25, 0.5, 2.0}) {
    const double t0 = c > 0 ? std::sqrt(c) + 0.5 : 0.0;
    const auto e0 = closed_form_n5(c, t0);
    const auto p = WarpParams::with_constant(5, 1, 0, c, t0, e0.phi, e0.dphi);
    const auto sol = integrate(p, t0 + 5.0, 1e-3);
    double err = 0;
    for (const auto& s : sol.samples())
      err = std::max(err, std::abs(s.phi - closed_form_n5(c, s.t).phi));
    CHECK(err <= 1e-9);
  }
}

TEST_CASE("property: the two curvature formulas agree on solutions") {
  oracle::SplitMix rng{7};
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + static_cast<int>(rng.next() * 6);
    const int eps = static_cast<int>(rng.next() * 3) - 1;
    const double rho = 4 * rng.next() - 2;
    const double phi = 0.5 + 2 * rng.next();
    const double dphi = 2 * rng.next() - 1;
    const auto p = WarpParams::from_initial_data(n, eps, rho, 0, phi, dphi);
    const auto s = make_sample(p, 0, phi, dphi);
    if (std::abs(dphi) <= 1e-6) continue;
    CHECK(std::abs(-s.d3phi / s.dphi - ((n - 2) * s.d2phi + rho * phi) / phi) <= 1e-10);
  }
}

TEST_CASE("property: c = 0 gives constant K, Schwarzschild does not") {
  const auto p = WarpParams::from_initial_data(5, 1, 4, 0, 1, 0);
  IntegrateOptions opts;
  opts.allow_truncation = true;
  const auto sol = integrate(p, 1.4, 1e-3, opts);
  double mean = 0;
  for (const auto& s : sol.samples()) mean += gauss_curvature_L(p, s);
  mean /= static_cast<double>(sol.samples().size());
  double var = 0;
  for (const auto& s : sol.samples()) var += std::pow(gauss_curvature_L(p, s) - mean, 2);
  var /= static_cast<double>(sol.samples().size());
  CHECK(var <= 1e-10);
  CHECK(mean == Approx(1.0));

  for (int n : {4, 5, 6}) {
    const auto ps = schwarzschild_params(n);
    const auto ss = integrate(ps, 2.0, 1e-3);
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    for (const auto& s : ss.samples()) {
      lo = std::min(lo, gauss_curvature_L(ps, s));
      hi = std::max(hi, gauss_curvature_L(ps, s));
    }
    CHECK(hi - lo > 0.1);
  }
}

TEST_CASE("property: Schwarzschild solutions increase for t > 0") {
  for (int n : {4, 5, 6, 7, 9}) {
    const auto sol = integrate(schwarzschild_params(n), 5.0, 1e-3);
    const auto s = sol.samples();
    for (std::size_t i = 1; i < s.size(); ++i) {
      CHECK(s[i].dphi > 0);
      CHECK(s[i].phi > s[i - 1].phi);
      CHECK(embeddability_margin(s[i]) > 0);
    }
  }
}

TEST_CASE("CSV and JSON serialization") {
  const auto sol = integrate(schwarzschild_params(5), 0.002, 1e-3);
  std::ostringstream csv;
  write_csv(csv, sol);
  const std::string text = csv.str();
  CHECK(text.rfind("t,phi,dphi,d2phi,d3phi,first_integral_residual\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.find("0.001,1.0000004999998751,") != std::string::npos);

  const auto env = solution_envelope(sol);
  CHECK(env["params"]["c"] == -1.0);
  CHECK(env["samples"] == 3);
  CHECK(env["halt"] == "completed");
  const auto back = params_from_json(env["params"]);
  CHECK(back.c == sol.params().c);
  CHECK(back.phi0 == sol.params().phi0);
}

TEST_CASE("WarpFunction wrappers") {
  auto sol = std::make_shared<const WarpSolution>(integrate(schwarzschild_params(5), 2.0, 1e-3));
  const auto w = WarpFunction::from_solution(sol);
  const auto cf = WarpFunction::from_closed_form_n5(-1, 0, 2);
  CHECK(std::abs(w(1.3).phi - cf(1.3).phi) < 1e-11);
  const auto half = w.scaled(0.5);
  CHECK(half(1.3).dphi == Approx(0.5 * w(1.3).dphi).epsilon(1e-15));
  CHECK(half.scale() == 0.5);
  CHECK_THROWS_CODE(w(2.5), ErrorCode::OutOfDomain);
  const auto lin = WarpFunction::linear(6, 0.1, 3);
  CHECK(lin(2).phi == 2);
  CHECK(lin(2).dphi == 1);
}
