#include "einwarp/error.hpp"

#include <cmath>

#include "einwarp/tolerances.hpp"

namespace einwarp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositivePhi: return "NonPositivePhi";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::DomainExhausted: return "DomainExhausted";
    case ErrorCode::WrongFamily: return "WrongFamily";
    case ErrorCode::WrongRegime: return "WrongRegime";
    case ErrorCode::InconsistentParams: return "InconsistentParams";
    case ErrorCode::SingularChartPoint: return "SingularChartPoint";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::MarginViolated: return "MarginViolated";
    case ErrorCode::NonPositiveWarp: return "NonPositiveWarp";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DegenerateDelta: return "DegenerateDelta";
    case ErrorCode::NotFlatNormal: return "NotFlatNormal";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::NotNormalForm: return "NotNormalForm";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

template <typename F>
void for_each_field(Tolerances& t, F&& f) {
  f("consistency_rel", t.consistency_rel);
  f("drift", t.drift);
  f("phi_floor", t.phi_floor);
  f("turning", t.turning);
  f("identity", t.identity);
  f("closed_form", t.closed_form);
  f("pole", t.pole);
  f("fd_step", t.fd_step);
  f("einstein", t.einstein);
  f("perturbed_min", t.perturbed_min);
  f("spread_const", t.spread_const);
  f("spread_nonconst", t.spread_nonconst);
  f("einstein_analytic", t.einstein_analytic);
  f("pullback_analytic", t.pullback_analytic);
  f("pullback_quadrature", t.pullback_quadrature);
  f("margin", t.margin);
  f("flat_normal", t.flat_normal);
  f("umbilic_group", t.umbilic_group);
  f("umbilic_identity", t.umbilic_identity);
  f("delta_check", t.delta_check);
  f("gauss_equation", t.gauss_equation);
  f("codazzi", t.codazzi);
  f("dupin", t.dupin);
  f("appendix", t.appendix);
  f("intrinsic_extrinsic", t.intrinsic_extrinsic);
}

}  // namespace

nlohmann::json to_json(const Tolerances& tol) {
  nlohmann::json j = nlohmann::json::object();
  auto copy = tol;
  for_each_field(copy, [&](const char* key, double& v) { j[key] = v; });
  return j;
}

void apply_overrides(Tolerances& tol, const nlohmann::json& overrides) {
  if (!overrides.is_object()) throw Error(ErrorCode::ConfigError, "tolerances must be an object");
  for (auto it = overrides.begin(); it != overrides.end(); ++it) {
    bool found = false;
    for_each_field(tol, [&](const char* key, double& v) {
      if (it.key() != key) return;
      found = true;
      if (!it.value().is_number())
        throw Error(ErrorCode::ConfigError, "tolerance " + it.key() + " must be a number");
      const double value = it.value().get<double>();
      if (!(value > 0) || !std::isfinite(value))
        throw Error(ErrorCode::ConfigError, "tolerance " + it.key() + " must be positive");
      v = value;
    });
    if (!found) throw Error(ErrorCode::ConfigError, "unknown tolerance key: " + it.key());
  }
}

}  // namespace einwarp
