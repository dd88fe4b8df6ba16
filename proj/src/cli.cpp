#include "einwarp/cli.hpp"

#include <CLI11.hpp>

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "einwarp/error.hpp"
#include "einwarp/io.hpp"
#include "einwarp/suite.hpp"
#include "einwarp/tolerances.hpp"
#include "einwarp/warpfunc.hpp"

namespace einwarp::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

enum class Kind { Int, UInt, Real, Text, Bool };

struct Key {
  const char* name;  // config key; the flag is --name with '_' -> '-'
  Kind kind;
  const char* help;
};

const std::vector<Key>& keys() {
  static const std::vector<Key> k{
      {"family", Kind::Text, "fixture family"},
      {"n", Kind::Int, "manifold dimension"},
      {"rho", Kind::Real, "Ricci constant"},
      {"eps", Kind::Int, "fiber Ricci sign (-1, 0, 1)"},
      {"c", Kind::Real, "first-integral constant"},
      {"phi0", Kind::Real, "phi(0)"},
      {"dphi0", Kind::Real, "phi'(0)"},
      {"m", Kind::Int, "torus factor dimension"},
      {"k", Kind::Int, "base curvature of the second non-rotational example (0 or 1)"},
      {"t_lo", Kind::Real, "lower chart bound in t"},
      {"t_hi", Kind::Real, "upper chart bound in t"},
      {"t_end", Kind::Real, "integration end"},
      {"step", Kind::Real, "integration step"},
      {"points", Kind::Int, "number of seeded sample points"},
      {"seed", Kind::UInt, "sampling seed"},
      {"perturb", Kind::Real, "negative-control perturbation"},
      {"resolution", Kind::Int, "mesh vertices per direction"},
      {"a1", Kind::Text, "diagonal of A1, comma separated"},
      {"a2", Kind::Text, "diagonal of A2, comma separated"},
      {"out", Kind::Text, "output directory"},
      {"induced", Kind::Bool, "use the pulled-back metric"},
      {"compare_closed_form", Kind::Bool, "compare with sqrt(t^2 - c) (n = 5)"},
  };
  return k;
}

std::string flag_name(std::string key) {
  for (auto& ch : key)
    if (ch == '_') ch = '-';
  return "--" + key;
}

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

json convert(const Key& key, const std::string& text) {
  try {
    std::size_t used = 0;
    switch (key.kind) {
      case Kind::Int: {
        const int v = std::stoi(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case Kind::UInt: {
        const auto v = std::stoull(text, &used);
        if (used != text.size() || text.front() == '-') break;
        return v;
      }
      case Kind::Real: {
        const double v = std::stod(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case Kind::Text: return text;
      case Kind::Bool: return true;
    }
  } catch (const std::exception&) {
  }
  config_error("bad value '" + text + "' for " + flag_name(key.name));
}

// Values from the config file, overridden by flags given on the command line.
struct Layered {
  json values = json::object();
  json tolerances = json::object();
};

Layered load_config(const std::string& path) {
  Layered l;
  if (path.empty()) return l;
  std::ifstream in(path);
  if (!in) config_error("cannot read config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("config must be a JSON object");
  if (!j.contains("schema_version")) config_error("config lacks schema_version");
  if (j["schema_version"] != 1) config_error("unsupported schema_version");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "schema_version") continue;
    if (it.key() == "tolerances") {
      l.tolerances = it.value();
      continue;
    }
    const auto k = std::find_if(keys().begin(), keys().end(),
                                [&](const Key& key) { return it.key() == key.name; });
    if (k == keys().end()) config_error("unknown config key: " + it.key());
    const auto& v = it.value();
    const bool ok = (k->kind == Kind::Int && v.is_number_integer()) ||
                    (k->kind == Kind::UInt && v.is_number_unsigned()) ||
                    (k->kind == Kind::Real && v.is_number()) ||
                    (k->kind == Kind::Bool && v.is_boolean()) ||
                    (k->kind == Kind::Text && (v.is_string() || v.is_array()));
    if (!ok) config_error("wrong type for config key " + it.key());
    l.values[it.key()] = v;
  }
  return l;
}

struct RunConfig {
  json values;
  Tolerances tol;
  fs::path out = "einwarp_out";

  bool has(const char* key) const { return values.contains(key); }
  template <class T>
  T get(const char* key, T fallback) const {
    return has(key) ? values[key].get<T>() : fallback;
  }
  suite::Selection selection(std::string default_family) const {
    suite::Selection s;
    s.family = get<std::string>("family", default_family);
    s.n = get<int>("n", s.n);
    s.rho = get<double>("rho", s.family == "clifford" ? 1.0 : s.family == "sine" ? s.n - 1.0 : 0.0);
    s.m = get<int>("m", s.m);
    s.K = get<int>("k", s.K);
    s.perturb = get<double>("perturb", 0.0);
    s.induced = get<bool>("induced", false);
    s.points = get<int>("points", s.points);
    s.seed = get<std::uint64_t>("seed", s.seed);
    s.t_lo = get<double>("t_lo", s.t_lo);
    s.t_hi = get<double>("t_hi", s.t_hi);
    s.step = get<double>("step", s.step);
    if (s.points < 1) config_error("points must be positive");
    return s;
  }
};

void write(const fs::path& path, const std::string& content) {
  io::write_atomic(path, content);
  std::cout << "wrote " << path.string() << '\n';
}

void print_report(const suite::VerificationReport& r) {
  std::cout << r.title << ": " << (r.pass() ? "PASS" : "FAIL") << '\n';
  for (const auto& c : r.checks)
    std::cout << "  " << (c.pass ? "pass " : "FAIL ") << c.name << " = " << io::fmt17(c.value) << ' '
              << suite::to_string(c.cmp) << ' ' << io::fmt17(c.tolerance) << '\n';
}

int finish(const suite::VerificationReport& r, const fs::path& path) {
  write(path, io::dump(r.to_json()));
  print_report(r);
  return r.pass() ? kPass : kFail;
}

// phi0 with phi'(0) = 0 on the level c: root of eps - rho/(n-1) phi^2 + c phi^(3-n).
double turning_value(int n, int eps, double rho, double c) {
  const auto F = [&](double p) { return eps - rho / (n - 1) * p * p + c * std::pow(p, 3.0 - n); };
  double prev = 1e-6;
  for (double p = 1e-6 * 1.05; p < 1e6; p *= 1.05) {
    if (F(prev) == 0) return prev;
    if (std::signbit(F(prev)) != std::signbit(F(p))) {
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(
          F, prev, p, boost::math::tools::eps_tolerance<double>(52), iters);
      return 0.5 * (r.first + r.second);
    }
    prev = p;
  }
  config_error("no phi0 with phi'(0) = 0 on this level; pass --phi0");
}

int cmd_warp(const RunConfig& cfg) {
  const int n = cfg.get<int>("n", 5);
  warp::WarpParams params;
  const bool custom = cfg.has("c") || cfg.has("phi0") || cfg.has("rho") || cfg.has("eps");
  const auto family = cfg.get<std::string>("family", custom ? "custom" : "schwarzschild");
  if (family == "schwarzschild") {
    params = warp::schwarzschild_params(n);
  } else if (family == "custom") {
    const int eps = cfg.get<int>("eps", 1);
    const double rho = cfg.get<double>("rho", 0.0);
    const double dphi0 = cfg.get<double>("dphi0", 0.0);
    if (cfg.has("phi0")) {
      const double phi0 = cfg.get<double>("phi0", 1.0);
      params = cfg.has("c") ? warp::WarpParams::with_constant(n, eps, rho, cfg.get<double>("c", 0.0), 0,
                                                              phi0, dphi0, cfg.tol.consistency_rel)
                            : warp::WarpParams::from_initial_data(n, eps, rho, 0, phi0, dphi0);
    } else {
      if (!cfg.has("c")) config_error("custom warp needs --c or --phi0");
      if (cfg.has("dphi0")) config_error("--dphi0 needs --phi0");
      const double c = cfg.get<double>("c", 0.0);
      params = warp::WarpParams::with_constant(n, eps, rho, c, 0, turning_value(n, eps, rho, c), 0,
                                               cfg.tol.consistency_rel);
    }
  } else {
    config_error("warp family must be schwarzschild or custom");
  }
  const double t_end = cfg.get<double>("t_end", 5.0);
  const double step = cfg.get<double>("step", 1e-3);
  warp::IntegrateOptions opt;
  opt.tol_drift = HUGE_VAL;  // reported as a check below
  // RK4 loses the first integral as phi -> 0 (the singular end of the warp),
  // so the CLI stops well before it and reports the interval reached
  opt.phi_floor = std::max(cfg.tol.phi_floor, 1e-2 * params.phi0);
  opt.allow_truncation = true;
  const auto sol = warp::integrate(params, t_end, step, opt);

  suite::VerificationReport rep;
  rep.title = "warp";
  rep.tolerances = cfg.tol;
  rep.parameters = {{"t_end", t_end}, {"step", step}, {"family", family}};
  double kmin = HUGE_VAL, kmax = -HUGE_VAL;
  for (const auto& s : sol.samples()) {
    const double K = warp::gauss_curvature_L(params, s, cfg.tol.turning);
    kmin = std::min(kmin, K);
    kmax = std::max(kmax, K);
  }
  rep.details = warp::solution_envelope(sol);
  rep.details["K_min"] = kmin;
  rep.details["K_max"] = kmax;
  rep.details["K_constant"] = kmax - kmin <= cfg.tol.spread_const * (1 + std::abs(kmax));
  rep.add("max_drift", sol.max_drift(), cfg.tol.drift, "first-integral residual along RK4");
  if (cfg.get<bool>("compare_closed_form", false)) {
    if (n != 5 || params.eps != 1 || params.rho != 0)
      config_error("closed form needs n = 5, eps = 1, rho = 0");
    double err = 0;
    for (const auto& s : sol.samples())
      err = std::max(err, std::abs(s.phi - warp::closed_form_n5(params.c, s.t).phi));
    rep.details["closed_form_max_error"] = err;
    rep.add("closed_form", err, cfg.tol.closed_form, "phi = sqrt(t^2 - c)");
  }
  std::ostringstream csv;
  warp::write_csv(csv, sol);
  write(cfg.out / "warp.csv", csv.str());
  std::cout << "integrated t in [" << io::fmt17(sol.t_begin()) << ", " << io::fmt17(sol.t_end())
            << "], halt " << warp::to_string(sol.halt()) << ", max drift " << io::fmt17(sol.max_drift())
            << ", K in [" << io::fmt17(kmin) << ", " << io::fmt17(kmax) << "]\n";
  return finish(rep, cfg.out / "warp.json");
}

int cmd_verify_intrinsic(const RunConfig& cfg) {
  std::vector<geom::CurvatureReport> samples;
  const auto rep = suite::verify_intrinsic(cfg.selection("clifford"), cfg.tol, &samples);
  write(cfg.out / "curvature.csv", geom::curvature_csv(samples));
  return finish(rep, cfg.out / "intrinsic_report.json");
}

int cmd_build(const RunConfig& cfg) {
  const auto sel = cfg.selection("schwarzschild");
  auto spec = suite::immersion_for(sel);
  if (sel.perturb != 0) spec = imm::perturbed_immersion(spec, sel.perturb);
  const int res = cfg.get<int>("resolution", 40);
  if (res < 2) config_error("resolution must be at least 2");
  const geom::Vec centre = 0.5 * (spec.chart.lo + spec.chart.hi);
  const auto mesh = imm::build_mesh(spec, {0, 1}, {res, res}, centre);
  json j = imm::to_json(spec);
  j["pullback_defect"] = imm::pullback_defect(spec, geom::sample_points(spec.chart, sel.points, sel.seed));
  j["mesh"] = {{"vertices", mesh.vertices.size()},
               {"faces", mesh.faces.size()},
               {"degenerate_faces", mesh.degenerate_faces()}};
  const auto stem = cfg.out / spec.label;
  imm::export_mesh(mesh, stem);
  std::cout << "wrote " << stem.string() << ".obj\nwrote " << stem.string() << ".csv\n";
  write(cfg.out / (spec.label + ".json"), io::dump(j));
  std::cout << "scale " << io::fmt17(spec.scale) << ", pullback defect "
            << io::fmt17(j["pullback_defect"].get<double>()) << '\n';
  return kPass;
}

int cmd_verify_extrinsic(const RunConfig& cfg) {
  std::vector<ext::ExtrinsicPoint> samples;
  const auto rep = suite::verify_extrinsic(cfg.selection("schwarzschild"), cfg.tol, &samples);
  write(cfg.out / "extrinsic.csv", ext::extrinsic_csv(samples));
  return finish(rep, cfg.out / "extrinsic_report.json");
}

geom::Vec parse_diagonal(const json& v) {
  std::vector<double> d;
  if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) config_error("diagonal entries must be numbers");
      d.push_back(x.get<double>());
    }
  } else {
    std::stringstream ss(v.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) d.push_back(convert({"a1", Kind::Real, ""}, item).get<double>());
  }
  if (d.size() != 4) config_error("a diagonal needs 4 entries");
  return Eigen::Map<geom::Vec>(d.data(), 4);
}

int cmd_classify_appendix(const RunConfig& cfg) {
  std::optional<std::pair<geom::Vec, geom::Vec>> diag;
  if (cfg.has("a1") != cfg.has("a2")) config_error("--a1 and --a2 go together");
  if (cfg.has("a1")) diag = std::pair{parse_diagonal(cfg.values["a1"]), parse_diagonal(cfg.values["a2"])};
  const auto rep = suite::classify_appendix(diag, cfg.get<int>("points", 12),
                                            cfg.get<std::uint64_t>("seed", 42), cfg.tol);
  return finish(rep, cfg.out / "appendix_report.json");
}

int cmd_report(const RunConfig& cfg) {
  const auto j = suite::full_report(cfg.get<std::uint64_t>("seed", 42), cfg.tol);
  write(cfg.out / "report.json", io::dump(j));
  const auto show = [](const json& r) {
    std::cout << "  " << r["title"].get<std::string>() << ": " << r["status"].get<std::string>() << '\n';
  };
  show(j["warp"]);
  for (const auto& r : j["intrinsic"]) show(r);
  for (const auto& r : j["extrinsic"]) show(r);
  show(j["appendix"]);
  show(j["pullback"]);
  std::cout << "overall: " << j["status"].get<std::string>() << '\n';
  return j["status"] == "pass" ? kPass : kFail;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::BadDimension:
    case ErrorCode::BadRange:
    case ErrorCode::InconsistentParams:
    case ErrorCode::WrongFamily:
    case ErrorCode::WrongRegime:
      return kConfigError;
    default:
      return kComputationError;
  }
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Einstein warped products: warping functions, curvature, immersions"};
  app.require_subcommand(1);

  struct Bound {
    std::map<std::string, std::string> text;
    std::map<std::string, CLI::Option*> opts;
    std::map<std::string, std::string> tol_text;
    std::map<std::string, CLI::Option*> tol_opts;
    std::string config;
  };
  const std::vector<std::pair<std::string, std::string>> commands{
      {"warp", "integrate a warping function"},
      {"verify-intrinsic", "FD Einstein check of a chart"},
      {"build", "construct an immersion and export a mesh slice"},
      {"verify-extrinsic", "second fundamental form checks"},
      {"classify-appendix", "normal forms of a commuting pair"},
      {"report", "the full deterministic suite"}};
  std::map<std::string, std::unique_ptr<Bound>> bound;
  std::map<std::string, CLI::App*> subs;
  const auto tol_keys = to_json(Tolerances{});
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    auto b = std::make_unique<Bound>();
    sub->add_option("--config", b->config, "JSON config file (schema_version 1)");
    for (const auto& k : keys()) {
      if (k.kind == Kind::Bool)
        b->opts[k.name] = sub->add_flag(flag_name(k.name), k.help);
      else
        b->opts[k.name] = sub->add_option(flag_name(k.name), b->text[k.name], k.help);
    }
    for (auto it = tol_keys.begin(); it != tol_keys.end(); ++it)
      b->tol_opts[it.key()] = sub->add_option(flag_name("tol_" + it.key()), b->tol_text[it.key()],
                                              "tolerance override");
    subs[name] = sub;
    bound[name] = std::move(b);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  std::string name;
  for (const auto& [n, sub] : subs)
    if (sub->parsed()) name = n;
  const auto& b = *bound[name];

  try {
    RunConfig cfg;
    auto layered = load_config(b.config);
    for (const auto& k : keys()) {
      const auto* opt = b.opts.at(k.name);
      if (opt->count() == 0) continue;
      layered.values[k.name] = k.kind == Kind::Bool ? json(true) : convert(k, b.text.at(k.name));
    }
    for (const auto& [key, opt] : b.tol_opts) {
      if (opt->count() == 0) continue;
      layered.tolerances[key] = convert({"tol", Kind::Real, ""}, b.tol_text.at(key));
    }
    apply_overrides(cfg.tol, layered.tolerances);
    cfg.values = layered.values;
    cfg.out = cfg.get<std::string>("out", "einwarp_out");
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + cfg.out.string() + ": " + ec.message());

    if (name == "warp") return cmd_warp(cfg);
    if (name == "verify-intrinsic") return cmd_verify_intrinsic(cfg);
    if (name == "build") return cmd_build(cfg);
    if (name == "verify-extrinsic") return cmd_verify_extrinsic(cfg);
    if (name == "classify-appendix") return cmd_classify_appendix(cfg);
    return cmd_report(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace einwarp::cli
