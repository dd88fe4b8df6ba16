#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "einwarp/extrinsic.hpp"
#include "einwarp/geometry.hpp"
#include "einwarp/immersions.hpp"
#include "einwarp/tolerances.hpp"

namespace einwarp::suite {

enum class Cmp { LessEq, GreaterEq, Equal };
std::string to_string(Cmp cmp);

struct Check {
  std::string name;
  bool pass = false;
  double value = 0;
  double tolerance = 0;
  Cmp cmp = Cmp::LessEq;
  std::string provenance;  // the formula being checked
};

struct VerificationReport {
  std::string title;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json details = nlohmann::json::object();
  std::vector<Check> checks;
  Tolerances tolerances;

  // NaN values always fail
  void add(std::string name, double value, double tolerance, std::string provenance,
           Cmp cmp = Cmp::LessEq);
  bool pass() const;
  nlohmann::json to_json() const;
};

/// Fixture selector shared by the commands.
struct Selection {
  std::string family = "schwarzschild";  // clifford schwarzschild nonrot1 nonrot2 extra sine flat
  int n = 5;
  double rho = 0;
  int m = 2;
  int K = 1;
  double perturb = 0;  // relative radius/warp change (intrinsic) or map perturbation (extrinsic)
  bool induced = false;  // intrinsic checks on the pulled-back metric instead of the chart
  int points = 20;
  std::uint64_t seed = 42;
  double t_lo = 0.1;
  double t_hi = 3.0;
  double step = 1e-3;

  nlohmann::json to_json() const;
};

geom::ChartSpec chart_for(const Selection& sel);
imm::ImmersionSpec immersion_for(const Selection& sel);
/// Ricci constant of the family: rho for clifford/sine, n-1 for nonrot2 with K = 1, else 0.
double family_rho(const Selection& sel);

VerificationReport verify_intrinsic(const Selection& sel, const Tolerances& tol,
                                    std::vector<geom::CurvatureReport>* samples = nullptr);
VerificationReport verify_extrinsic(const Selection& sel, const Tolerances& tol,
                                    std::vector<ext::ExtrinsicPoint>* samples = nullptr);

/// Explicit diagonals when given, otherwise the Schwarzschild n = 4 operators at
/// `points` seeded points plus the (2,1,1,1) generic example.
VerificationReport classify_appendix(const std::optional<std::pair<geom::Vec, geom::Vec>>& diagonals,
                                     int points, std::uint64_t seed, const Tolerances& tol);

/// Pullback defect of every constructor against its chart metric.
VerificationReport pullback_suite(int points, std::uint64_t seed, const Tolerances& tol);

/// Warping-function checks: n=5 closed form, conservation and convergence,
/// the Schwarzschild identity and margin.
VerificationReport warp_suite(const Tolerances& tol);

/// Every report above on the standard fixtures; deterministic for a seed.
nlohmann::json full_report(std::uint64_t seed, const Tolerances& tol);

}  // namespace einwarp::suite
