#include "einwarp/suite.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <memory>

#include "einwarp/error.hpp"
#include "einwarp/warpfunc.hpp"

namespace einwarp::suite {

std::string to_string(Cmp cmp) {
  switch (cmp) {
    case Cmp::LessEq: return "<=";
    case Cmp::GreaterEq: return ">=";
    case Cmp::Equal: return "==";
  }
  return "?";
}

void VerificationReport::add(std::string name, double value, double tolerance,
                             std::string provenance, Cmp cmp) {
  bool ok = false;
  if (!std::isnan(value)) {
    switch (cmp) {
      case Cmp::LessEq: ok = value <= tolerance; break;
      case Cmp::GreaterEq: ok = value >= tolerance; break;
      case Cmp::Equal: ok = value == tolerance; break;
    }
  }
  checks.push_back({std::move(name), ok, value, tolerance, cmp, std::move(provenance)});
}

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

nlohmann::json VerificationReport::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name},
                   {"status", c.pass ? "pass" : "fail"},
                   {"value", std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr)},
                   {"tolerance", c.tolerance},
                   {"comparison", to_string(c.cmp)},
                   {"provenance", c.provenance}});
  return {{"title", title},
          {"parameters", parameters},
          {"details", details},
          {"checks", arr},
          {"status", pass() ? "pass" : "fail"},
          {"tolerances", einwarp::to_json(tolerances)}};
}

nlohmann::json Selection::to_json() const {
  return {{"family", family}, {"n", n},           {"rho", rho},       {"m", m},
          {"K", K},           {"perturb", perturb}, {"induced", induced}, {"points", points},
          {"seed", seed},     {"t_lo", t_lo},     {"t_hi", t_hi},     {"step", step}};
}

namespace {

std::shared_ptr<const warp::WarpSolution> schwarzschild_solution(int n, double t_hi, double step) {
  return std::make_shared<const warp::WarpSolution>(
      warp::integrate(warp::schwarzschild_params(n), t_hi, step));
}

double sine_rate(const Selection& sel) {
  if (!(sel.rho > 0)) throw Error(ErrorCode::BadRange, "sine family needs rho > 0");
  return std::sqrt(sel.rho / (sel.n - 1));
}

}  // namespace

double family_rho(const Selection& sel) {
  if (sel.family == "clifford" || sel.family == "sine") return sel.rho;
  if (sel.family == "nonrot2" && sel.K == 1) return sel.n - 1;  // unit-sphere base, sine warp
  return 0.0;
}

geom::ChartSpec chart_for(const Selection& sel) {
  const double lam = 1 + sel.perturb;
  if (sel.family == "clifford") {
    const auto r = geom::clifford_radii(sel.n, sel.rho);
    return geom::ChartSpec::round_base("clifford", r.r1, lam * r.r2, geom::FiberSpec::round(sel.n - 2));
  }
  if (sel.family == "schwarzschild") {
    const auto w = warp::WarpFunction::from_solution(schwarzschild_solution(sel.n, sel.t_hi, sel.step));
    return geom::ChartSpec::warped("schwarzschild", w.scaled(lam), geom::FiberSpec::round(sel.n - 2),
                                   sel.t_lo, sel.t_hi);
  }
  if (sel.family == "sine") {
    const double a = sine_rate(sel);
    return geom::ChartSpec::warped("sine", warp::WarpFunction::sine(sel.n, a, 0.05 / a, 1.5 / a).scaled(lam),
                                   geom::FiberSpec::round(sel.n - 2), 0.4 / a, 1.2 / a);
  }
  if (sel.family == "flat") {
    return geom::ChartSpec::flat_base("flat", warp::WarpFunction::linear(sel.n, 0.5, 2).scaled(lam),
                                      geom::FiberSpec::round(sel.n - 2), 0.5, 2, -1, 1);
  }
  if (sel.perturb != 0)
    throw Error(ErrorCode::ConfigError, "perturb is not available for family " + sel.family);
  const auto spec = immersion_for(sel);
  return sel.induced ? imm::induced_chart(spec) : spec.chart;
}

imm::ImmersionSpec immersion_for(const Selection& sel) {
  imm::ImmersionSpec spec;
  if (sel.family == "clifford")
    spec = imm::clifford_immersion(sel.n, sel.rho);
  else if (sel.family == "schwarzschild")
    spec = imm::schwarzschild_immersion(sel.n, sel.t_lo, sel.t_hi, sel.step);
  else if (sel.family == "nonrot1")
    spec = imm::nonrotational_example1(sel.n, sel.m);
  else if (sel.family == "nonrot2")
    spec = imm::nonrotational_example2(sel.n, sel.m, sel.K);
  else if (sel.family == "extra")
    spec = imm::extra_codim_example(sel.n, sel.m, sel.t_lo, sel.t_hi);
  else if (sel.family == "profile")
    spec = imm::profile_1b(warp::WarpFunction::from_solution(schwarzschild_solution(sel.n, sel.t_hi, sel.step)),
                           sel.t_lo, sel.t_hi);
  else
    throw Error(ErrorCode::ConfigError, "no immersion for family '" + sel.family + "'");
  return spec;
}

VerificationReport verify_intrinsic(const Selection& sel, const Tolerances& tol,
                                    std::vector<geom::CurvatureReport>* samples) {
  VerificationReport rep;
  rep.title = "intrinsic " + sel.family;
  rep.parameters = sel.to_json();
  rep.tolerances = tol;
  const auto chart = chart_for(sel);
  const double rho = family_rho(sel);
  double worst = 0, worst_sym = 0, spread_max = 0, spread_min = HUGE_VAL;
  for (const auto& x : geom::sample_points(chart, sel.points, sel.seed)) {
    const auto r = geom::ricci_fd(chart, x, tol.fd_step, rho, sel.seed);
    worst = std::max(worst, r.einstein_residual);
    worst_sym = std::max(worst_sym, r.riemann_symmetry);
    spread_max = std::max(spread_max, r.sectional_spread());
    spread_min = std::min(spread_min, r.sectional_spread());
    if (samples) samples->push_back(r);
  }
  rep.details = {{"chart", geom::to_json(chart)},
                 {"rho", rho},
                 {"riemann_symmetry_max", worst_sym},
                 {"sectional_spread_min", spread_min},
                 {"sectional_spread_max", spread_max}};
  rep.add("einstein_residual_max", worst, tol.einstein,
          "max |Ric - rho g| / (1 + max |g|), FD curvature at seeded points");
  if (sel.perturb == 0 && (sel.family == "sine" || sel.family == "flat"))
    rep.add("sectional_spread_max", spread_max, tol.spread_const,
            "c = 0 warp: coordinate sectional curvatures all equal");
  if (sel.perturb == 0 && sel.family == "schwarzschild")
    rep.add("sectional_spread_max", spread_max, tol.spread_nonconst,
            "c < 0 warp: sectional curvatures not constant", Cmp::GreaterEq);
  return rep;
}

VerificationReport verify_extrinsic(const Selection& sel, const Tolerances& tol,
                                    std::vector<ext::ExtrinsicPoint>* samples) {
  VerificationReport rep;
  rep.title = "extrinsic " + sel.family;
  rep.parameters = sel.to_json();
  rep.tolerances = tol;
  auto spec = immersion_for(sel);
  if (sel.perturb != 0) spec = imm::perturbed_immersion(spec, sel.perturb);
  const double rho = family_rho(sel);
  const auto pts = geom::sample_points(spec.chart, sel.points, sel.seed);
  const bool rotational = sel.family == "schwarzschild" || sel.family == "clifford";

  double fnb = 0, gauss = 0, struct_res = 0, orth = 0, sym = 0;
  int dim_min = spec.dim() + 1, dim_max = -1;
  bool flat = true;
  for (const auto& x : pts) {
    const auto p = ext::analyze_point(spec, x, rho, tol.fd_step, tol.umbilic_group, tol.flat_normal);
    fnb = std::max(fnb, p.fnb);
    gauss = std::max(gauss, p.gauss);
    orth = std::max(orth, p.orthonormality);
    sym = std::max(sym, p.alpha_symmetry);
    if (p.fnb > tol.flat_normal) {
      flat = false;
    } else {
      dim_min = std::min(dim_min, p.umb.umbilical_dim);
      dim_max = std::max(dim_max, p.umb.umbilical_dim);
      struct_res = std::max(struct_res, p.umb.max_residual());
    }
    if (samples) samples->push_back(p);
  }
  rep.details = {{"immersion", imm::to_json(spec)},
                 {"umbilical_dim_min", flat ? dim_min : -1},
                 {"umbilical_dim_max", flat ? dim_max : -1},
                 {"orthonormality_max", orth},
                 {"alpha_symmetry_max", sym}};
  if (spec.ambient_dim - spec.dim() >= 2)
    rep.add("flat_normal_bundle", fnb, tol.flat_normal, "max ||[A_a, A_b]||, Ricci equation");
  if (rotational) {
    rep.add("umbilical_dim", flat && dim_min == dim_max ? dim_min : NAN, sel.n - 2,
            "dimension of U = {X : alpha(X, Y) = <X, Y> eta}", Cmp::Equal);
    rep.add("umbilical_structure", flat ? struct_res : NAN, tol.umbilic_identity,
            "rho - K = (n-2)<a_ii,eta>; <a_11,eta> = <a_22,eta>; <a_12,eta> = 0; "
            "rho - (n-3)|eta|^2 = 2<a_ii,eta>");
  }
  rep.add("gauss_equation", gauss, tol.gauss_equation,
          "Ric(X,Y) = n<alpha(X,Y),H> - sum <alpha(X,E_i),alpha(Y,E_i)>");

  double cod = 0;
  for (std::size_t i = 0; i < std::min<std::size_t>(5, pts.size()); ++i)
    cod = std::max(cod, ext::codazzi_residual(spec, pts[i], 1e-3));
  rep.add("codazzi", cod, tol.codazzi, "(nabla_X alpha)(Y,Z) = (nabla_Y alpha)(X,Z), FD h = 1e-3");

  if (sel.family == "schwarzschild" && sel.perturb == 0) {
    const auto& w = *spec.warp;
    const auto prof = imm::profile_1b(w, sel.t_lo, sel.t_hi, tol.margin);
    double delta = 0, ke = 0, dup = 0;
    for (const auto& x : pts) {
      Eigen::Vector2d tx(x[0], x[1]);
      delta = std::max(delta, ext::profile_delta_check(prof(tx), w(x[0])));
      const auto j = spec(x);
      const auto u = ext::umbilical_structure(ext::second_fundamental_form(j, ext::frames(j)), 0,
                                              tol.umbilic_group, tol.flat_normal);
      ke = std::max(ke, std::abs(u.K_complement - warp::gauss_curvature_L(*w.params(), w(x[0]))));
    }
    for (std::size_t i = 0; i < std::min<std::size_t>(3, pts.size()); ++i)
      dup = std::max(dup, ext::dupin_residual(spec, pts[i], 0));
    rep.add("profile_delta", delta, tol.delta_check,
            "A^g_delta = phi'' I for delta = (-phi' h_t, 1 - phi'^2)");
    rep.add("intrinsic_extrinsic_K", ke, tol.intrinsic_extrinsic,
            "<a_11,a_22> - |a_12|^2 = -phi'''/phi'");
    rep.add("dupin", dup, tol.dupin, "P_N d(eta)/ds = 0 along a leaf circle");
    if (sel.n == 4) {
      double res = 0, eps_min = 1;
      for (const auto& x : pts) {
        const auto j = spec(x);
        const auto d = ext::simultaneous_diagonalize(ext::second_fundamental_form(j, ext::frames(j)).A);
        const auto r = ext::appendix_classify(d.diagonals[0].asDiagonal(), d.diagonals[1].asDiagonal(),
                                              tol.appendix);
        const bool eform = r.form == ext::AppendixForm::EpsilonForm;
        eps_min = std::min(eps_min, eform ? double(r.eps) : 0.0);
        res = std::max(res, eform ? r.eps_residual : NAN);
      }
      rep.add("appendix_epsilon", eps_min, 1, "epsilon form with eps = +1 at every point", Cmp::Equal);
      rep.add("appendix_residual", res, tol.appendix, "|pq - (a^2 - b^2)|");
    }
  }
  return rep;
}

VerificationReport classify_appendix(const std::optional<std::pair<geom::Vec, geom::Vec>>& diagonals,
                                     int points, std::uint64_t seed, const Tolerances& tol) {
  VerificationReport rep;
  rep.title = "appendix";
  rep.tolerances = tol;
  if (diagonals) {
    const auto r = ext::appendix_classify(diagonals->first.asDiagonal(), diagonals->second.asDiagonal(),
                                          tol.appendix);
    rep.parameters = {{"source", "explicit"}};
    rep.details = {{"record", ext::to_json(r)}};
    rep.add("classified", r.form == ext::AppendixForm::Unclassified ? 0 : 1, 1,
            "one of the two normal forms holds", Cmp::Equal);
    if (r.form == ext::AppendixForm::GenericForm)
      rep.add("positivity_product", r.positivity_product, 0, "(ba-cd)(ca-bd)(da-bc) > 0 (>= reported)",
              Cmp::GreaterEq);
    return rep;
  }
  rep.parameters = {{"source", "schwarzschild n=4"}, {"points", points}, {"seed", seed}};
  const auto spec = imm::schwarzschild_immersion(4);
  auto records = nlohmann::json::array();
  int epsilon_plus = 0;
  double res = 0;
  for (const auto& x : geom::sample_points(spec.chart, points, seed)) {
    const auto j = spec(x);
    const auto d = ext::simultaneous_diagonalize(ext::second_fundamental_form(j, ext::frames(j)).A);
    const auto r = ext::appendix_classify(d.diagonals[0].asDiagonal(), d.diagonals[1].asDiagonal(),
                                          tol.appendix);
    records.push_back(ext::to_json(r));
    if (r.form == ext::AppendixForm::EpsilonForm && r.eps == 1) {
      ++epsilon_plus;
      res = std::max(res, r.eps_residual);
    }
  }
  rep.add("epsilon_plus_points", epsilon_plus, points, "points classified as eps = +1", Cmp::Equal);
  rep.add("epsilon_residual", epsilon_plus ? res : NAN, tol.appendix, "|pq - (a^2 - b^2)|");

  const auto sols = ext::solve_generic_relations(2, 1, 1, 1);
  auto sj = nlohmann::json::array();
  double dist = HUGE_VAL;
  for (const auto& s : sols) {
    sj.push_back(s);
    dist = std::min(dist, std::max({std::abs(s[0] - 1), std::abs(s[1] - 1), std::abs(s[2] - 1)}));
  }
  const double a = 2, b = 1, c = 1, dd = 1;
  const double product = (b * a - c * dd) * (c * a - b * dd) * (dd * a - b * c);
  rep.details = {{"records", records}, {"generic_example", {{"abcd", {a, b, c, dd}}, {"solutions", sj}}}};
  rep.add("generic_pqr_111", dist, 1e-12, "brute-force signs for pq = ad-bc, pr = ac-bd, qr = ab-cd");
  rep.add("generic_positivity", product, 1, "(ba-cd)(ca-bd)(da-bc) = 1", Cmp::Equal);
  return rep;
}

VerificationReport pullback_suite(int points, std::uint64_t seed, const Tolerances& tol) {
  VerificationReport rep;
  rep.title = "pullback";
  rep.parameters = {{"points", points}, {"seed", seed}};
  rep.tolerances = tol;
  std::vector<imm::ImmersionSpec> specs{
      imm::clifford_immersion(5, 1),
      imm::clifford_immersion(6, 2),
      imm::schwarzschild_immersion(4),
      imm::schwarzschild_immersion(5),
      imm::schwarzschild_immersion(6),
      imm::profile_1b(warp::WarpFunction::from_solution(schwarzschild_solution(5, 3, 1e-3)), 0.1, 3),
      imm::nonrotational_example1(7, 2),
      imm::nonrotational_example2(7, 2, 1),
      imm::nonrotational_example2(7, 2, 0),
      imm::extra_codim_example(7, 2)};
  for (const auto& s : specs) {
    const double defect = imm::pullback_defect(s, geom::sample_points(s.chart, points, seed));
    const double t = s.pullback_tol > tol.pullback_analytic ? tol.pullback_quadrature : tol.pullback_analytic;
    rep.add(s.label + "_n" + std::to_string(s.dim()), defect, t,
            "max |Df^T Df - g_chart| at seeded points");
  }
  return rep;
}

VerificationReport warp_suite(const Tolerances& tol) {
  VerificationReport rep;
  rep.title = "warp";
  rep.tolerances = tol;
  {
    const auto p = warp::WarpParams::with_constant(5, 1, 0, -1, 0, 1, 0);
    const auto sol = warp::integrate(p, 5.0, 1e-3);
    double err = 0;
    for (const auto& s : sol.samples()) err = std::max(err, std::abs(s.phi - std::sqrt(s.t * s.t + 1)));
    rep.add("closed_form_n5", err, tol.closed_form, "phi = sqrt(t^2 + 1), t in [0, 5], step 1e-3");
  }
  for (int n : {4, 5, 6, 7, 9}) {
    const auto p = warp::schwarzschild_params(n);
    warp::IntegrateOptions loose;
    loose.tol_drift = HUGE_VAL;
    const double drift = warp::integrate(p, 5.0, 1e-3, loose).max_drift();
    const double coarse = warp::integrate(p, 5.0, 0.04, loose).max_drift();
    const double fine = warp::integrate(p, 5.0, 0.02, loose).max_drift();
    rep.add("drift_n" + std::to_string(n), drift, tol.drift,
            "phi'^2 - eps + rho/(n-1) phi^2 - c/phi^(n-3) along RK4, step 1e-3");
    rep.add("drift_halving_n" + std::to_string(n), coarse / fine, 8,
            "drift(0.04) / drift(0.02)", Cmp::GreaterEq);
  }
  for (int n : {4, 5, 6}) {
    const auto p = warp::schwarzschild_params(n);
    const auto sol = warp::integrate(p, 5.0, 1e-3);
    double id = 0, min_margin = HUGE_VAL;
    for (const auto& s : sol.samples()) {
      id = std::max(id, std::abs(warp::schwarzschild_identity_residual(p, s)));
      if (s.t >= 0.1 - 1e-12) min_margin = std::min(min_margin, warp::embeddability_margin(s));
    }
    const std::string tag = "_n" + std::to_string(n);
    rep.add("schwarzschild_identity" + tag, id, tol.identity,
            "phi'^2 + phi''^2 = 1 - x^(n-3) + x^(2(n-2)), x = (n-3)/(2 phi)");
    rep.add("margin_at_0" + tag, std::abs(warp::embeddability_margin(sol.samples().front())), tol.margin,
            "1 - phi'^2 - phi''^2 at t = 0");
    rep.add("margin_min_t_ge_0.1" + tag, min_margin, DBL_MIN, "1 - phi'^2 - phi''^2 > 0 for t >= 0.1",
            Cmp::GreaterEq);
  }
  return rep;
}

nlohmann::json full_report(std::uint64_t seed, const Tolerances& tol) {
  nlohmann::json out;
  out["seed"] = seed;
  out["warp"] = warp_suite(tol).to_json();

  auto intrinsic = nlohmann::json::array();
  const auto sel = [&](std::string family, int n, double rho, int m = 2, int K = 1) {
    Selection s;
    s.family = std::move(family);
    s.n = n;
    s.rho = rho;
    s.m = m;
    s.K = K;
    s.seed = seed;
    return s;
  };
  bool pass = true;
  const auto push = [&](nlohmann::json& arr, const VerificationReport& r) {
    pass = pass && r.pass();
    arr.push_back(r.to_json());
  };
  pass = pass && out["warp"]["status"] == "pass";
  for (const auto& s : {sel("clifford", 5, 1), sel("clifford", 6, 2), sel("schwarzschild", 5, 0),
                        sel("schwarzschild", 6, 0), sel("nonrot1", 7, 0), sel("nonrot2", 7, 0, 2, 1),
                        sel("nonrot2", 7, 0, 2, 0), sel("sine", 6, 5), sel("flat", 5, 0)})
    push(intrinsic, verify_intrinsic(s, tol));
  out["intrinsic"] = intrinsic;

  auto extrinsic = nlohmann::json::array();
  for (int n : {4, 5, 6}) push(extrinsic, verify_extrinsic(sel("schwarzschild", n, 0), tol));
  out["extrinsic"] = extrinsic;

  const auto app = classify_appendix(std::nullopt, 12, seed, tol);
  const auto pb = pullback_suite(20, seed, tol);
  pass = pass && app.pass() && pb.pass();
  out["appendix"] = app.to_json();
  out["pullback"] = pb.to_json();
  out["status"] = pass ? "pass" : "fail";
  return out;
}

}  // namespace einwarp::suite
