#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "einwarp/immersions.hpp"
#include "einwarp/warpfunc.hpp"

namespace einwarp::ext {

using geom::Mat;
using geom::Vec;

/// Orthonormal tangent frame E = first * C (C upper triangular, from
/// Gram-Schmidt in chart-index order) and an orthonormal normal frame.
struct FrameData {
  Mat tangent;
  Mat normal;
  Mat C;
  double orthonormality_defect = 0;
};

/// Normals are completed greedily from seed axes (columns of `seed`, the
/// identity when absent): at each step the axis with the largest residual
/// against the span so far is orthonormalized.
FrameData frames(const imm::Jet2& jet, const std::optional<Mat>& seed = std::nullopt);

struct ShapeOperatorSet {
  std::vector<Mat> A;  // A[a](i, j) = <alpha(E_i, E_j), xi_a>
  Vec H;               // mean curvature, normal components
  double asymmetry = 0;  // max |A - A^T| before the exact symmetrization
  int dim() const { return A.empty() ? 0 : static_cast<int>(A.front().rows()); }
  int codim() const { return static_cast<int>(A.size()); }
  /// alpha(E_i, E_j) as a vector of normal components.
  Vec alpha(int i, int j) const;
};

ShapeOperatorSet second_fundamental_form(const imm::Jet2& jet, const FrameData& frame);

double flat_normal_bundle_residual(const ShapeOperatorSet& ops);

/// || A_delta - phi'' I || for delta = (-phi' h_t, 1 - phi'^2) on a profile
/// surface g = (h, phi) in R^4.
double profile_delta_check(const imm::Jet2& profile_jet, const warp::WarpSample& sample,
                           double tol = 1e-12);

struct UmbilicalReport {
  int umbilical_dim = 0;
  Vec eta;         // normal components
  Mat leaf_basis;  // columns, tangent-frame components
  Mat complement;  // orthonormal basis {e1, e2} of the complement (when 2-dimensional)
  double commutator = 0;
  // residuals of the structure equations on the complement; NaN when not applicable
  double ga1 = NAN;       // rho - K = (n-2) <alpha_ii, eta>
  double eqalpha = NAN;   // <alpha_11, eta> = <alpha_22, eta>
  double eqalpha2 = NAN;  // <alpha_12, eta> = 0
  double eqalpha1 = NAN;  // rho - (n-3) |eta|^2 = 2 <alpha_ii, eta>
  double K_complement = NAN;  // <alpha_11, alpha_22> - |alpha_12|^2
  double max_residual() const;
};

UmbilicalReport umbilical_structure(const ShapeOperatorSet& ops, double rho, double tol_group = 1e-5,
                                    double tol_flat = 1e-6);

/// max | C^T Ric C - (n <alpha, H> - sum <alpha(., E_k), alpha(., E_k)>) |, Ric in chart coordinates.
double gauss_equation_residual(const ShapeOperatorSet& ops, const Mat& ricci_chart,
                               const FrameData& frame);

/// Max Codazzi defect |(nabla_X alpha)(Y, Z) - (nabla_Y alpha)(X, Z)| over frame
/// triples; the normal-projected alpha_ij is differenced with step h and the
/// Christoffel symbols come from the jet.
double codazzi_residual(const imm::ImmersionSpec& spec, const Vec& x, double h);

/// Shape-operator field on a flat chart with trivial normal connection; the
/// Codazzi defect is max |d_i A_jk - d_j A_ik| by central differences.
using ShapeField = std::function<std::vector<Mat>(const Vec&)>;
double codazzi_residual_field(const ShapeField& field, const Vec& x, double h);

/// A1 = diag(a, a, b, b), A2 = diag(0, 0, p, q) with p q = -(a^2 - b^2) and
/// a, b, p varying with the point.
ShapeField synthetic_epsilon_minus_field();

/// Normal derivative of the principal normal along the last chart coordinate,
/// max over `samples` points of the circle through x, per unit speed.
double dupin_residual(const imm::ImmersionSpec& spec, const Vec& x, double rho, double h = 1e-4,
                      int samples = 8);

enum class AppendixForm { EpsilonForm, GenericForm, Unclassified };
std::string to_string(AppendixForm form);

struct AppendixRecord {
  AppendixForm form = AppendixForm::Unclassified;
  double rotation = 0;  // normal-frame angle used
  std::array<int, 4> order{0, 1, 2, 3};
  // EpsilonForm
  double a = 0, b = 0, p = 0, q = 0;
  int eps = 0;
  double eps_residual = NAN;
  // GenericForm
  std::array<double, 4> abcd{};
  std::array<double, 3> pqr{};
  std::array<double, 3> relation_residuals{NAN, NAN, NAN};
  double positivity_product = NAN;
  std::string search = "angle grid 1e4 + golden section";
};

/// A1, A2 diagonal in a shared frame (n = 4). Searches a normal rotation that
/// zeroes a diagonal entry of A2, then matches one of the two normal forms.
AppendixRecord appendix_classify(const Mat& A1, const Mat& A2, double tol = 1e-6);

/// Sign choices (p, q, r) with pq = ad - bc, pr = ac - bd, qr = ab - cd.
std::vector<std::array<double, 3>> solve_generic_relations(double a, double b, double c, double d,
                                                           double tol = 1e-12);

/// Common eigenbasis of a commuting pair: returns V (columns) and the diagonals.
struct Diagonalization {
  Mat V;
  std::vector<Vec> diagonals;
};
Diagonalization simultaneous_diagonalize(const std::vector<Mat>& ops);

/// Per-point extrinsic summary used by reports and scans.
struct ExtrinsicPoint {
  Vec x;
  double fnb = 0;
  UmbilicalReport umb;
  double gauss = NAN;
  double orthonormality = 0;
  double alpha_symmetry = 0;
};

ExtrinsicPoint analyze_point(const imm::ImmersionSpec& spec, const Vec& x, double rho,
                             double fd_step = 1e-3, double tol_group = 1e-5, double tol_flat = 1e-6,
                             const std::optional<Mat>& seed = std::nullopt);

nlohmann::json to_json(const ShapeOperatorSet& ops);
nlohmann::json to_json(const UmbilicalReport& r);
nlohmann::json to_json(const AppendixRecord& r);
nlohmann::json to_json(const ExtrinsicPoint& p);
/// `t,u,...,fnb_residual,umb_dim,ga1_res,eqalpha1_res,gauss_res`.
std::string extrinsic_csv(const std::vector<ExtrinsicPoint>& points);

}  // namespace einwarp::ext
