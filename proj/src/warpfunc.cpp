#include "einwarp/warpfunc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "einwarp/error.hpp"
#include "einwarp/io.hpp"

namespace einwarp::warp {

namespace {

void require_positive_phi(double phi) {
  if (!(phi > 0)) throw Error(ErrorCode::NonPositivePhi, "phi = " + io::fmt17(phi));
}

void require_dimension(int n) {
  if (n < 4) throw Error(ErrorCode::BadDimension, "n = " + std::to_string(n) + " (need n >= 4)");
}

struct State {
  double phi;
  double dphi;
};

State rk4_step(const WarpParams& p, State y, double h) {
  const auto f = [&](State s) { return State{s.dphi, rhs_second_order(p, s.phi, s.dphi)}; };
  const State k1 = f(y);
  const State k2 = f({y.phi + 0.5 * h * k1.phi, y.dphi + 0.5 * h * k1.dphi});
  const State k3 = f({y.phi + 0.5 * h * k2.phi, y.dphi + 0.5 * h * k2.dphi});
  const State k4 = f({y.phi + h * k3.phi, y.dphi + h * k3.dphi});
  return {y.phi + h / 6.0 * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi),
          y.dphi + h / 6.0 * (k1.dphi + 2 * k2.dphi + 2 * k3.dphi + k4.dphi)};
}

}  // namespace

void WarpParams::validate() const {
  require_dimension(n);
  if (eps < -1 || eps > 1)
    throw Error(ErrorCode::InconsistentParams, "eps must be -1, 0 or 1");
  if (!std::isfinite(rho) || !std::isfinite(c) || !std::isfinite(t0) || !std::isfinite(dphi0))
    throw Error(ErrorCode::InconsistentParams, "non-finite parameter");
  require_positive_phi(phi0);
}

WarpParams WarpParams::from_initial_data(int n, int eps, double rho, double t0, double phi0,
                                         double dphi0) {
  WarpParams p{n, eps, rho, 0.0, t0, phi0, dphi0};
  p.validate();
  p.c = c_from_state(n, eps, rho, phi0, dphi0);
  return p;
}

WarpParams WarpParams::with_constant(int n, int eps, double rho, double c, double t0, double phi0,
                                     double dphi0, double tol_rel) {
  WarpParams p{n, eps, rho, c, t0, phi0, dphi0};
  p.validate();
  const double res = first_integral_residual(p, phi0, dphi0);
  if (std::abs(res) > tol_rel * (1 + std::abs(c)))
    throw Error(ErrorCode::InconsistentParams,
                "initial data off the level set c = " + io::fmt17(c) + " (residual " +
                    io::fmt17(res) + ")");
  return p;
}

double rhs_second_order(const WarpParams& p, double phi, double dphi) {
  require_positive_phi(phi);
  return -((p.n - 3) * (dphi * dphi - p.eps) + p.rho * phi * phi) / (2 * phi);
}

double first_integral_residual(const WarpParams& p, double phi, double dphi) {
  require_positive_phi(phi);
  return dphi * dphi - p.eps + p.rho / (p.n - 1) * phi * phi - p.c / std::pow(phi, p.n - 3);
}

double c_from_state(int n, int eps, double rho, double phi, double dphi) {
  require_positive_phi(phi);
  require_dimension(n);
  return (dphi * dphi - eps + rho / (n - 1) * phi * phi) * std::pow(phi, n - 3);
}

double third_derivative(const WarpParams& p, double phi, double dphi) {
  const double d2 = rhs_second_order(p, phi, dphi);
  return -dphi * ((p.n - 2) * d2 + p.rho * phi) / phi;
}

WarpSample make_sample(const WarpParams& p, double t, double phi, double dphi) {
  return {t, phi, dphi, rhs_second_order(p, phi, dphi), third_derivative(p, phi, dphi)};
}

std::string to_string(HaltReason reason) {
  switch (reason) {
    case HaltReason::Completed: return "completed";
    case HaltReason::PhiFloor: return "phi_floor";
  }
  return "unknown";
}

WarpSolution::WarpSolution(WarpParams params, double step, double t_requested,
                           std::vector<WarpSample> samples, std::vector<double> drift_log,
                           HaltReason halt)
    : params_(params),
      step_(step),
      t_requested_(t_requested),
      samples_(std::move(samples)),
      drift_log_(std::move(drift_log)),
      halt_(halt) {}

double WarpSolution::max_drift() const {
  double m = 0;
  for (double d : drift_log_) m = std::max(m, std::abs(d));
  return m;
}

WarpSample WarpSolution::at(double t) const {
  const double slack = 1e-12 * (1 + std::abs(t));
  if (!(t >= t_begin() - slack && t <= t_end() + slack))
    throw Error(ErrorCode::OutOfDomain, "t = " + io::fmt17(t) + " outside [" +
                                            io::fmt17(t_begin()) + ", " + io::fmt17(t_end()) + "]");
  const auto last = static_cast<long long>(samples_.size()) - 1;
  const auto k = std::clamp(std::llround((t - params_.t0) / step_), 0LL, last);
  const WarpSample& s = samples_[static_cast<std::size_t>(k)];
  const double dt = t - s.t;
  if (dt == 0) return s;
  const State y = rk4_step(params_, {s.phi, s.dphi}, dt);
  return make_sample(params_, t, y.phi, y.dphi);
}

WarpSolution integrate(const WarpParams& params, double t_end, double step,
                       const IntegrateOptions& options) {
  params.validate();
  if (!(step > 0)) throw Error(ErrorCode::StepTooLarge, "step must be positive");
  if (!(t_end > params.t0)) throw Error(ErrorCode::OutOfDomain, "t_end must exceed t0");
  const auto steps = std::max<long long>(1, std::llround((t_end - params.t0) / step));
  const double h = (t_end - params.t0) / static_cast<double>(steps);

  std::vector<WarpSample> samples;
  std::vector<double> drift;
  samples.reserve(static_cast<std::size_t>(steps) + 1);
  drift.reserve(static_cast<std::size_t>(steps) + 1);

  State y{params.phi0, params.dphi0};
  samples.push_back(make_sample(params, params.t0, y.phi, y.dphi));
  drift.push_back(first_integral_residual(params, y.phi, y.dphi));
  HaltReason halt = HaltReason::Completed;

  for (long long k = 1; k <= steps; ++k) {
    State next{};
    try {
      next = rk4_step(params, y, h);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonPositivePhi) throw;
      next.phi = 0;  // a stage left the admissible half-line
    }
    if (!(next.phi > options.phi_floor)) {
      halt = HaltReason::PhiFloor;
      break;
    }
    y = next;
    const double t = params.t0 + static_cast<double>(k) * h;
    samples.push_back(make_sample(params, t, y.phi, y.dphi));
    drift.push_back(first_integral_residual(params, y.phi, y.dphi));
  }

  if (halt == HaltReason::PhiFloor && !options.allow_truncation)
    throw Error(ErrorCode::DomainExhausted,
                "phi reached the floor after t = " + io::fmt17(samples.back().t));

  WarpSolution solution(params, h, t_end, std::move(samples), std::move(drift), halt);
  if (solution.max_drift() > options.tol_drift)
    throw Error(ErrorCode::StepTooLarge, "first-integral drift " +
                                             io::fmt17(solution.max_drift()) + " exceeds " +
                                             io::fmt17(options.tol_drift));
  return solution;
}

WarpParams schwarzschild_params(int n) {
  require_dimension(n);
  const double phi0 = (n - 3) / 2.0;
  WarpParams p{n, 1, 0.0, -std::pow(phi0, n - 3), 0.0, phi0, 0.0};
  return p;
}

bool is_schwarzschild(const WarpParams& p) {
  if (p.n < 4 || p.eps != 1 || p.rho != 0) return false;
  const double c = -std::pow((p.n - 3) / 2.0, p.n - 3);
  return std::abs(p.c - c) <= 1e-12 * (1 + std::abs(c));
}

WarpSample closed_form_n5(double c, double t) {
  const double q = t * t - c;
  if (!(q > 0)) throw Error(ErrorCode::OutOfDomain, "need t^2 > c");
  const double phi = std::sqrt(q);
  // phi' = t/phi, phi'' = -c/phi^3, phi''' = 3ct/phi^5
  return {t, phi, t / phi, -c / (q * phi), 3 * c * t / (q * q * phi)};
}

double gauss_curvature_L(const WarpParams& p, const WarpSample& s, double tol_turning) {
  if (std::abs(s.dphi) < tol_turning) return ((p.n - 2) * s.d2phi + p.rho * s.phi) / s.phi;
  return -s.d3phi / s.dphi;
}

double embeddability_margin(const WarpSample& s) {
  return 1 - s.dphi * s.dphi - s.d2phi * s.d2phi;
}

double schwarzschild_identity_residual(const WarpParams& p, const WarpSample& s) {
  if (!is_schwarzschild(p))
    throw Error(ErrorCode::WrongFamily, "identity holds only for the Ricci-flat family");
  const double x = (p.n - 3) / (2 * s.phi);
  const double rhs = 1 - std::pow(x, p.n - 3) + std::pow(x, 2 * (p.n - 2));
  return s.dphi * s.dphi + s.d2phi * s.d2phi - rhs;
}

Fact1Residuals fact1_diagnostics(const WarpParams& p, const WarpSample& s) {
  if (p.rho != 0 || p.eps != 1)
    throw Error(ErrorCode::WrongRegime, "requires rho = 0 and eps = 1");
  const int n = p.n;
  const double k_expected = -(n - 2) * (n - 3) * p.c / (2 * std::pow(s.phi, n - 1));
  const double lap_expected = -(n - 3) * p.c / std::pow(s.phi, n - 2);
  const double hess_expected = lap_expected / 2;
  // Hess phi = phi'' I in the (t,u) chart, so the Laplacian is 2 phi''.
  return {gauss_curvature_L(p, s) - k_expected, 2 * s.d2phi - lap_expected,
          s.d2phi - hess_expected};
}

double critical_infimum(const WarpParams& p) {
  if (!(p.c < 0)) throw Error(ErrorCode::WrongRegime, "critical value needs c < 0");
  return std::pow(-p.c, 1.0 / (p.n - 3));
}

WarpFunction::WarpFunction(std::string label, double t_lo, double t_hi, Eval eval,
                           std::optional<WarpParams> params,
                           std::shared_ptr<const WarpSolution> solution)
    : label_(std::move(label)),
      t_lo_(t_lo),
      t_hi_(t_hi),
      eval_(std::move(eval)),
      params_(params),
      solution_(std::move(solution)) {}

WarpFunction WarpFunction::from_solution(std::shared_ptr<const WarpSolution> solution) {
  const auto* raw = solution.get();
  return WarpFunction("integrated", raw->t_begin(), raw->t_end(),
                      [raw](double t) { return raw->at(t); }, raw->params(), solution);
}

WarpFunction WarpFunction::from_closed_form_n5(double c, double t_lo, double t_hi) {
  WarpParams p{5, 1, 0.0, c, 0.0, 1.0, 0.0};
  p.phi0 = closed_form_n5(c, t_lo).phi;
  p.t0 = t_lo;
  p.dphi0 = closed_form_n5(c, t_lo).dphi;
  return WarpFunction("closed_form_n5", t_lo, t_hi, [c](double t) { return closed_form_n5(c, t); },
                      p);
}

WarpFunction WarpFunction::sine(int n, double a, double t_lo, double t_hi) {
  require_dimension(n);
  if (a == 0) throw Error(ErrorCode::BadRange, "sine warp needs a != 0");
  WarpParams p{n, 1, (n - 1) * a * a, 0.0, t_lo, std::sin(a * t_lo) / a, std::cos(a * t_lo)};
  return WarpFunction(
      "sine", t_lo, t_hi,
      [a](double t) {
        const double s = std::sin(a * t), co = std::cos(a * t);
        return WarpSample{t, s / a, co, -a * s, -a * a * co};
      },
      p);
}

WarpFunction WarpFunction::linear(int n, double t_lo, double t_hi) {
  require_dimension(n);
  WarpParams p{n, 1, 0.0, 0.0, t_lo, t_lo, 1.0};
  return WarpFunction(
      "linear", t_lo, t_hi, [](double t) { return WarpSample{t, t, 1, 0, 0}; }, p);
}

WarpFunction WarpFunction::constant(double value) {
  require_positive_phi(value);
  return WarpFunction("constant", -HUGE_VAL, HUGE_VAL,
                      [value](double t) { return WarpSample{t, value, 0, 0, 0}; });
}

WarpFunction WarpFunction::scaled(double lambda) const {
  if (!(lambda > 0)) throw Error(ErrorCode::BadRange, "scale must be positive");
  WarpFunction out = *this;
  auto inner = eval_;
  out.eval_ = [inner, lambda](double t) {
    WarpSample s = inner(t);
    s.phi *= lambda;
    s.dphi *= lambda;
    s.d2phi *= lambda;
    s.d3phi *= lambda;
    return s;
  };
  out.scale_ = scale_ * lambda;
  return out;
}

WarpSample WarpFunction::operator()(double t) const {
  if (!(t >= t_lo_ && t <= t_hi_))
    throw Error(ErrorCode::OutOfDomain, label_ + " warp evaluated at t = " + io::fmt17(t));
  return eval_(t);
}

nlohmann::json to_json(const WarpParams& p) {
  return {{"n", p.n},   {"eps", p.eps}, {"rho", p.rho},    {"c", p.c},
          {"t0", p.t0}, {"phi0", p.phi0}, {"dphi0", p.dphi0}};
}

WarpParams params_from_json(const nlohmann::json& j) {
  WarpParams p;
  p.n = j.at("n").get<int>();
  p.eps = j.at("eps").get<int>();
  p.rho = j.at("rho").get<double>();
  p.c = j.at("c").get<double>();
  p.t0 = j.at("t0").get<double>();
  p.phi0 = j.at("phi0").get<double>();
  p.dphi0 = j.at("dphi0").get<double>();
  p.validate();
  return p;
}

nlohmann::json to_json(const WarpFunction& warp) {
  nlohmann::json j = {{"kind", warp.label()}, {"scale", warp.scale()}};
  if (std::isfinite(warp.t_lo())) j["t_lo"] = warp.t_lo();
  if (std::isfinite(warp.t_hi())) j["t_hi"] = warp.t_hi();
  if (warp.params()) j["params"] = to_json(*warp.params());
  if (warp.solution()) j["step"] = warp.solution()->step();
  return j;
}

nlohmann::json solution_envelope(const WarpSolution& s) {
  return {{"params", to_json(s.params())},
          {"step", s.step()},
          {"t_begin", s.t_begin()},
          {"t_end", s.t_end()},
          {"t_requested", s.t_requested()},
          {"samples", s.samples().size()},
          {"halt", to_string(s.halt())},
          {"max_drift", s.max_drift()}};
}

void write_csv(std::ostream& out, const WarpSolution& s) {
  out << "t,phi,dphi,d2phi,d3phi,first_integral_residual\n";
  const auto samples = s.samples();
  const auto drift = s.drift_log();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& w = samples[i];
    out << io::fmt17(w.t) << ',' << io::fmt17(w.phi) << ',' << io::fmt17(w.dphi) << ','
        << io::fmt17(w.d2phi) << ',' << io::fmt17(w.d3phi) << ',' << io::fmt17(drift[i]) << '\n';
  }
}

}  // namespace einwarp::warp
