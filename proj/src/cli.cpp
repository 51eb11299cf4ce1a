#include "nilstruct/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "nilstruct/builtin.hpp"
#include "nilstruct/curvature.hpp"
#include "nilstruct/curves.hpp"
#include "nilstruct/manifest.hpp"
#include "nilstruct/verify.hpp"

namespace nilstruct {

namespace {

using json = nlohmann::json;

struct CliContext {
  std::string manifest_path;
  std::string builtin_name;
  std::string out_path;
  std::string csv_path;
  Sampling sampling;
  bool seed_set = false, points_set = false, tol_set = false;
  std::uint64_t seed = 42;
  int points = 20;
  double tol = 1e-9;

  Manifest manifest;
  bool has_manifest = false;

  void finish_flags() {
    if (!manifest_path.empty()) {
      manifest = parse_manifest_file(manifest_path);
      has_manifest = true;
      sampling = manifest.sampling;
    }
    if (seed_set) sampling.seed = seed;
    if (points_set) sampling.points = points;
    if (tol_set) sampling.tolerance = tol;
  }

  // the chart to act on; single-manifold commands default to curved-B
  ChartManifold chart() {
    if (has_manifest) return manifest_to_chart(manifest);
    return builtin_manifold(builtin_name.empty() ? "curved-B" : builtin_name);
  }

  std::vector<ChartManifold> chart_list() {
    if (has_manifest || !builtin_name.empty()) return {chart()};
    return {};  // verify checks fall back to their default builtins
  }

  std::string digest() {
    if (has_manifest) return manifest.digest;
    std::string key = "builtin:" +
                      (builtin_name.empty() ? std::string("curved-B")
                                            : builtin_name);
    return fnv1a_hex(key);
  }

  Manifest::Curve curve_or_default(int dim, int n) {
    if (has_manifest && manifest.curve.has_value()) {
      Manifest::Curve c = *manifest.curve;
      if (c.z0.empty()) c.z0.assign(static_cast<std::size_t>(dim), 0.1);
      if (c.v0.empty()) {
        c.v0.assign(static_cast<std::size_t>(dim), 0.0);
        for (int i = 0; i < dim; ++i)
          c.v0[(std::size_t)i] = 0.7 - 0.2 * i;
      }
      if (c.w0.empty()) {
        c.w0.assign(static_cast<std::size_t>(dim), 0.0);
        c.w0[0] = 1.0;
      }
      return c;
    }
    (void)n;
    Manifest::Curve c;
    c.z0.assign(static_cast<std::size_t>(dim), 0.1);
    c.v0.assign(static_cast<std::size_t>(dim), 0.0);
    for (int i = 0; i < dim; ++i) c.v0[(std::size_t)i] = 0.7 - 0.2 * i;
    c.w0.assign(static_cast<std::size_t>(dim), 0.0);
    c.w0[0] = 1.0;
    return c;
  }
};

json envelope(const CliContext& ctx, const std::string& command,
              const std::string& check, const std::string& manifold,
              bool passed, double max_residual, json details) {
  return json{{"schema_version", kReportSchemaVersion},
              {"tool_version", kToolVersion},
              {"command", command},
              {"check", check},
              {"manifold", manifold},
              {"manifest_digest", const_cast<CliContext&>(ctx).digest()},
              {"seed", ctx.sampling.seed},
              {"points_sampled", ctx.sampling.points},
              {"tolerance", ctx.sampling.tolerance},
              {"passed", passed},
              {"max_residual", max_residual},
              {"details", std::move(details)}};
}

double body_max_residual(const json& body) {
  double m = 0.0;
  if (body.is_object()) {
    for (const auto& [k, v] : body.items()) {
      if (v.is_number() && k.find("residual") != std::string::npos)
        m = std::max(m, std::fabs(v.get<double>()));
      else
        m = std::max(m, body_max_residual(v));
    }
  } else if (body.is_array()) {
    for (const auto& v : body) m = std::max(m, body_max_residual(v));
  }
  return m;
}

PhForcing forcing_from(const Manifest::Curve& c) {
  auto t = make_vars({"t"});
  return PhForcing{parse_expression(c.a, t), parse_expression(c.b, t)};
}

void write_csv_file(const std::string& path,
                    const std::vector<CurveState>& traj,
                    const std::vector<std::vector<double>>* transported) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open CSV output '" + path + "'");
  if (transported == nullptr) {
    write_trajectory_csv(out, traj);
    return;
  }
  std::size_t dim = traj.front().z.size();
  out << "t";
  for (std::size_t i = 1; i <= dim; ++i) out << ",z" << i;
  for (std::size_t i = 1; i <= dim; ++i) out << ",zdot" << i;
  for (std::size_t i = 1; i <= dim; ++i) out << ",w" << i;
  out << "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    out << buf;
  };
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", traj[k].t);
    out << buf;
    for (double v : traj[k].z) put(v);
    for (double v : traj[k].zdot) put(v);
    for (double v : (*transported)[k]) put(v);
    out << "\n";
  }
}

json classification_json(const CurveClassification& rep) {
  return json{{"degenerate", rep.degenerate},
              {"is_ph", rep.is_ph},
              {"is_geodesic", rep.is_geodesic},
              {"is_pregeodesic", rep.is_pregeodesic},
              {"kernel_confined", rep.kernel_confined},
              {"special_plane", rep.special_plane},
              {"orth_residual", rep.max_orth_residual},
              {"dir_residual", rep.max_dir_residual},
              {"max_accel", rep.max_accel},
              {"base_drift", rep.base_drift},
              {"samples", rep.samples.size()}};
}

// --- subcommand bodies -----------------------------------------------------

json cmd_validate(CliContext& ctx, bool& passed, std::string& manifold) {
  std::vector<ChartManifold> charts;
  if (ctx.has_manifest || !ctx.builtin_name.empty())
    charts.push_back(ctx.chart());
  else
    for (const std::string& n : builtin_names())
      charts.push_back(builtin_manifold(n));

  passed = true;
  json list = json::array();
  for (const ChartManifold& c : charts) {
    ValidationReport rep = validate_chart(c, ctx.sampling);
    passed = passed && rep.passed;
    list.push_back({{"manifold", c.name},
                    {"metric_symmetry", rep.metric_symmetry},
                    {"min_abs_det", rep.min_abs_det},
                    {"f_square", rep.f_square},
                    {"f_rank", rep.f_rank},
                    {"f_constant", rep.f_constant},
                    {"passed", rep.passed}});
  }
  manifold = charts.size() == 1 ? charts.front().name : "all-builtins";
  return json{{"charts", std::move(list)}};
}

json cmd_christoffel(CliContext& ctx, bool& passed, std::string& manifold) {
  ChartManifold c = ctx.chart();
  manifold = c.name;
  ConnectionField gamma = christoffel(c.metric, ctx.sampling);
  double metricity = metricity_residual(gamma, c.metric, ctx.sampling);
  double symmetry = gamma.symmetry_residual(ctx.sampling);

  json comps = json::object();
  std::vector<int> idx(3, 0);
  do {
    const Expression& e = gamma.gamma.at(idx);
    if (!e.is_zero()) {
      std::string key = "Gamma^" + std::to_string(idx[0] + 1) + "_" +
                        std::to_string(idx[1] + 1) + std::to_string(idx[2] + 1);
      comps[key] = e.to_string();
    }
  } while (next_index(idx, c.dim()));

  passed = metricity <= 1e-9 && symmetry <= 1e-12;
  return json{{"metricity_residual", metricity},
              {"symmetry_residual", symmetry},
              {"nonzero_coefficients", std::move(comps)}};
}

json cmd_curvature(CliContext& ctx, bool& passed, std::string& manifold) {
  ChartManifold c = ctx.chart();
  manifold = c.name;
  ConnectionField gamma = christoffel(c.metric, ctx.sampling);
  CurvatureField r = riemann(gamma);
  CurvatureInvariants inv = curvature_invariants(r, c.metric, ctx.sampling);

  int nonzero = 0;
  for (const Expression& e : r.r.components())
    if (!e.is_zero()) ++nonzero;

  double max_r = 0.0;
  for (const auto& p : sample_points(ctx.sampling, c.dim()))
    max_r = std::max(max_r, max_abs(r.r.evaluate(p)));

  passed = inv.passed;
  return json{{"antisymmetry_residual", inv.antisymmetry},
              {"bianchi_residual", inv.bianchi},
              {"nonzero_components", nonzero},
              {"max_component_at_samples", max_r}};
}

json cmd_purity(CliContext& ctx, const std::string& target,
                const std::string& pair_text, bool& passed,
                std::string& manifold) {
  ChartManifold c = ctx.chart();
  manifold = c.name;

  int slot_a = 0, slot_b = 1;
  if (!pair_text.empty()) {
    auto comma = pair_text.find(',');
    char* end_a = nullptr;
    char* end_b = nullptr;
    if (comma != std::string::npos) {
      std::string a = pair_text.substr(0, comma);
      std::string b = pair_text.substr(comma + 1);
      slot_a = static_cast<int>(std::strtol(a.c_str(), &end_a, 10)) - 1;
      slot_b = static_cast<int>(std::strtol(b.c_str(), &end_b, 10)) - 1;
      if (end_a == a.c_str() || *end_a != '\0' || end_b == b.c_str() ||
          *end_b != '\0')
        comma = std::string::npos;
    }
    if (comma == std::string::npos)
      throw Error("--pair expects 'i,j' (1-based slots)");
  }

  if (target == "metric") {
    ResidualReport pure = is_pure(c.metric, slot_a, slot_b, c.f, ctx.sampling);
    ResidualReport hyb = is_hybrid(c.metric, slot_a, slot_b, c.f, ctx.sampling);
    passed = pure.passed;
    return json{{"target", target},
                {"pure", verify::to_json(pure)},
                {"hybrid", verify::to_json(hyb)}};
  }
  if (target == "connection") {
    ConnectionField gamma = christoffel(c.metric, ctx.sampling);
    ResidualReport rep = connection_purity(gamma, c.f, ctx.sampling);
    passed = rep.passed;
    return json{{"target", target}, {"purity", verify::to_json(rep)}};
  }
  if (target == "curvature") {
    ConnectionField gamma = christoffel(c.metric, ctx.sampling);
    PurityClassification rep =
        classify_purity(riemann(gamma), c.metric, c.f, ctx.sampling);
    passed = rep.passed;
    const char* cls = rep.metric_class == MetricClass::BType ? "B-type"
                      : rep.metric_class == MetricClass::KahlerType
                          ? "Kahler-type"
                          : "neither";
    return json{{"target", target},
                {"metric_class", cls},
                {"lower_pairs", verify::to_json(rep.lower_pairs)},
                {"hybrid_pair", verify::to_json(rep.hybrid_pair)},
                {"upper_lower", verify::to_json(rep.upper_lower)}};
  }
  throw Error("unknown purity target '" + target + "'");
}

json cmd_lift(CliContext& ctx, bool& passed, std::string& manifold) {
  json body = json::object();
  passed = true;
  bool did_something = false;

  ChartManifold c = ctx.chart();
  manifold = c.name;

  if (c.base.has_value()) {
    ConnectionField base_gamma = christoffel(c.base->metric, ctx.sampling);
    // fiber coordinates extend the base table with d<name> slots
    VarTable names = *c.base->coords;
    for (const std::string& n : *c.base->coords) {
      std::string fiber = "d" + n;
      while (var_index(names, fiber) >= 0) fiber += "_";
      names.push_back(fiber);
    }
    auto lifted_vars = make_vars(std::move(names));
    ConnectionField lift = complete_lift(base_gamma, lifted_vars);
    TensorField f = adapted_f(c.base->n, 0, lifted_vars);
    ResidualReport purity = connection_purity(lift, f, ctx.sampling);

    // the solution-family identities of the lifted coefficients
    double family = 0.0;
    int n = c.base->n;
    for (const auto& p : sample_points(ctx.sampling, 2 * n)) {
      TensorValue v = lift.evaluate(p);
      for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k) {
            family = std::max(family, std::fabs(v.at({h, i, k}) -
                                                v.at({n + h, i, n + k})));
            family = std::max(family, std::fabs(v.at({h, i, k}) -
                                                v.at({n + h, n + i, k})));
          }
    }
    passed = passed && purity.passed && family <= 1e-12;
    body["connection_lift"] = {{"purity", verify::to_json(purity)},
                               {"family_identity_residual", family}};
    did_something = true;
  }

  if (ctx.has_manifest && !ctx.manifest.phi.empty()) {
    TransitionMap t;
    t.n = ctx.manifest.n;
    t.m = ctx.manifest.m;
    t.vars = c.coords;
    for (const std::string& e : ctx.manifest.phi)
      t.phi.push_back(parse_expression(e, c.coords));
    for (const std::string& e : ctx.manifest.theta)
      t.theta.push_back(parse_expression(e, c.coords));
    LiftedTransition lt = lift_transition(t, ctx.sampling);
    passed = passed && lt.commutation.passed;
    json map = json::array();
    for (const Expression& e : lt.map) map.push_back(e.to_string());
    body["transition_lift"] = {{"commutation", verify::to_json(lt.commutation)},
                               {"map", std::move(map)}};
    did_something = true;
  }

  if (!did_something)
    throw Error("lift needs a [base] section or a [transition] section "
                "(or a built-in manifold that carries a base)");
  return body;
}

json cmd_curves(CliContext& ctx, const std::string& kind, bool& passed,
                std::string& manifold) {
  ChartManifold c = ctx.chart();
  manifold = c.name;
  ConnectionField gamma = christoffel(c.metric, ctx.sampling);
  Manifest::Curve cv = ctx.curve_or_default(c.dim(), c.n);

  std::vector<CurveState> traj;
  PhForcing forcing = forcing_from(cv);
  double local_error = 0.0;
  if (kind == "geodesic") {
    traj = integrate_geodesic(gamma, cv.z0, cv.v0, cv.t_end, cv.step);
    local_error = richardson_local_error(gamma, nullptr, nullptr, traj);
  } else {
    traj = integrate_ph_curve(gamma, c.f, cv.z0, cv.v0, forcing, cv.t_end,
                              cv.step);
    local_error = richardson_local_error(gamma, &c.f, &forcing, traj);
  }

  CurveClassification rep = classify_curve(gamma, c.f, c.n, traj);
  double drift = energy_drift(c.metric, traj);

  if (!ctx.csv_path.empty()) write_csv_file(ctx.csv_path, traj, nullptr);

  if (kind == "geodesic")
    passed = !rep.degenerate && rep.is_geodesic && drift <= 1e-6;
  else
    passed = !rep.degenerate && rep.is_ph;
  passed = passed && local_error <= 1e-9;

  json body = classification_json(rep);
  body["energy_drift"] = drift;
  body["richardson_local_error"] = local_error;
  body["steps"] = traj.size() - 1;
  body["t_end"] = cv.t_end;
  if (!rep.samples.empty()) {
    body["fitted_a_last"] = rep.samples.back().a;
    body["fitted_b_last"] = rep.samples.back().b;
  }
  return body;
}

json cmd_transport(CliContext& ctx, bool& passed, std::string& manifold) {
  ChartManifold c = ctx.chart();
  manifold = c.name;
  ConnectionField gamma = christoffel(c.metric, ctx.sampling);
  Manifest::Curve cv = ctx.curve_or_default(c.dim(), c.n);

  auto traj = integrate_geodesic(gamma, cv.z0, cv.v0, cv.t_end, cv.step);
  auto moved = parallel_transport(gamma, traj, cv.w0);

  double drift = 0.0;
  auto pair_g = [&](const std::vector<double>& z,
                    const std::vector<double>& w) {
    TensorValue gv = c.metric.evaluate(z);
    double e = 0.0;
    for (int a = 0; a < c.dim(); ++a)
      for (int b = 0; b < c.dim(); ++b)
        e += gv.at({a, b}) * w[(std::size_t)a] * w[(std::size_t)b];
    return e;
  };
  double e0 = pair_g(traj.front().z, moved.front());
  for (std::size_t k = 0; k < traj.size(); ++k)
    drift = std::max(drift, std::fabs(pair_g(traj[k].z, moved[k]) - e0));

  if (!ctx.csv_path.empty()) write_csv_file(ctx.csv_path, traj, &moved);

  passed = drift <= 1e-6;
  json final_w = json::array();
  for (double v : moved.back()) final_w.push_back(v);
  return json{{"metric_pairing_drift", drift},
              {"steps", traj.size() - 1},
              {"w_final", std::move(final_w)}};
}

json cmd_surface(CliContext& ctx, bool& passed, std::string& manifold) {
  if (!ctx.has_manifest || !ctx.manifest.surface.has_value())
    throw Error("surface needs a manifest with a [surface] section");
  manifold = ctx.manifest.name.empty() ? "manifest" : ctx.manifest.name;

  const Manifest::Surface& section = *ctx.manifest.surface;
  auto u = make_vars({"u"});
  std::vector<Expression> base;
  for (const std::string& e : section.base)
    base.push_back(parse_expression(e, u));
  HolomorphicSurface surf = build_surface(base);
  PairCheck pc = surface_pair_check(surf, ctx.sampling);

  json body{{"pair_du_dv", pc.du_dv_residual},
            {"pair_pv", pc.pv_residual},
            {"pair_passed", pc.passed}};
  passed = pc.passed;

  if (!section.reparam_h.empty()) {
    auto uv = surf.uv;
    Expression h = parse_expression(section.reparam_h, u);
    Expression t = parse_expression(section.reparam_t, uv);
    ReparamResult rr = reparametrize_surface(surf, h, t, ctx.sampling);
    body["reparam"] = {{"constraint_residual", rr.constraint_residual},
                       {"pair_du_dv", rr.pair.du_dv_residual},
                       {"pair_pv", rr.pair.pv_residual},
                       {"pair_passed", rr.pair.passed}};
    passed = passed && rr.pair.passed;
  }
  return body;
}

}  // namespace

RunResult run_cli(const std::vector<std::string>& args) {
  CLI::App app{"tensor calculus on charts with a nilpotent structure"};
  app.require_subcommand(1);

  CliContext ctx;
  std::string verify_check, purity_target = "metric", purity_pair, h_override;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--manifest", ctx.manifest_path, "manifest file");
    cmd->add_option("--builtin", ctx.builtin_name, "built-in manifold name");
    cmd->add_option("--seed", ctx.seed, "sampling seed")
        ->each([&](const std::string&) { ctx.seed_set = true; });
    cmd->add_option("--points", ctx.points, "sample point count")
        ->each([&](const std::string&) { ctx.points_set = true; });
    cmd->add_option("--tol", ctx.tol, "residual tolerance")
        ->each([&](const std::string&) { ctx.tol_set = true; });
    cmd->add_option("--out", ctx.out_path, "write the JSON report here");
    cmd->add_option("--csv", ctx.csv_path, "write trajectory CSV here");
  };

  CLI::App* c_validate = app.add_subcommand("validate", "check a manifest");
  CLI::App* c_christoffel =
      app.add_subcommand("christoffel", "Levi-Civita coefficients");
  CLI::App* c_curvature = app.add_subcommand("curvature", "Riemann tensor");
  CLI::App* c_purity = app.add_subcommand("purity", "purity residuals");
  c_purity->add_option("--target", purity_target,
                       "metric | connection | curvature");
  c_purity->add_option("--pair", purity_pair, "slot pair, 1-based 'i,j'");
  CLI::App* c_lift = app.add_subcommand("lift", "complete lift / transition");
  CLI::App* c_verify = app.add_subcommand("verify", "run a certificate");
  c_verify->set_help_flag("--help", "print help");  // frees -h for the flag below
  c_verify->add_option("check", verify_check, "which certificate")->required();
  c_verify->add_option("--h", h_override, "conformal factor expression");
  CLI::App* c_geodesic = app.add_subcommand("geodesic", "integrate a geodesic");
  CLI::App* c_ph = app.add_subcommand("ph-curve", "integrate a planar curve");
  CLI::App* c_transport = app.add_subcommand("transport", "parallel transport");
  CLI::App* c_surface = app.add_subcommand("surface", "holomorphic surface");

  for (CLI::App* cmd : {c_validate, c_christoffel, c_curvature, c_purity,
                        c_lift, c_verify, c_geodesic, c_ph, c_transport,
                        c_surface})
    add_common(cmd);

  std::vector<const char*> argv;
  argv.push_back("nilstruct");
  for (const std::string& a : args) argv.push_back(a.c_str());

  RunResult result;
  std::string command_line = "nilstruct";
  for (const std::string& a : args) command_line += " " + a;

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      std::ostringstream os;
      result.exit_code = 2;
      os << json{{"error", e.what()}, {"passed", false}}.dump(2) << "\n";
      result.output = os.str();
      return result;
    }
    ctx.finish_flags();

    bool passed = false;
    std::string check, manifold = "-";
    json details;

    if (c_validate->parsed()) {
      check = "validate";
      details = cmd_validate(ctx, passed, manifold);
    } else if (c_christoffel->parsed()) {
      check = "christoffel";
      details = cmd_christoffel(ctx, passed, manifold);
    } else if (c_curvature->parsed()) {
      check = "curvature";
      details = cmd_curvature(ctx, passed, manifold);
    } else if (c_purity->parsed()) {
      check = "purity-" + purity_target;
      details = cmd_purity(ctx, purity_target, purity_pair, passed, manifold);
    } else if (c_lift->parsed()) {
      check = "lift";
      details = cmd_lift(ctx, passed, manifold);
    } else if (c_verify->parsed()) {
      check = "verify-" + verify_check;
      verify::Outcome out =
          verify::dispatch(verify_check, ctx.chart_list(), ctx.sampling,
                           h_override);
      passed = out.passed;
      details = std::move(out.body);
      manifold = ctx.has_manifest || !ctx.builtin_name.empty()
                     ? ctx.chart().name
                     : "builtins";
    } else if (c_geodesic->parsed()) {
      check = "geodesic";
      details = cmd_curves(ctx, "geodesic", passed, manifold);
    } else if (c_ph->parsed()) {
      check = "ph-curve";
      details = cmd_curves(ctx, "ph-curve", passed, manifold);
    } else if (c_transport->parsed()) {
      check = "transport";
      details = cmd_transport(ctx, passed, manifold);
    } else if (c_surface->parsed()) {
      check = "surface";
      details = cmd_surface(ctx, passed, manifold);
    }

    json report = envelope(ctx, command_line, check, manifold, passed,
                           body_max_residual(details), std::move(details));
    result.output = report.dump(2) + "\n";
    result.exit_code = passed ? 0 : 1;
  } catch (const ManifestError& e) {
    result.exit_code = 2;
    result.output =
        json{{"error", e.what()}, {"passed", false}}.dump(2) + "\n";
  } catch (const ParseError& e) {
    result.exit_code = 2;
    result.output =
        json{{"error", e.what()}, {"passed", false}}.dump(2) + "\n";
  } catch (const SingularError& e) {
    result.exit_code = 3;
    result.output =
        json{{"error", e.what()}, {"passed", false}}.dump(2) + "\n";
  } catch (const EvalError& e) {
    result.exit_code = 3;
    result.output =
        json{{"error", e.what()}, {"passed", false}}.dump(2) + "\n";
  } catch (const Error& e) {
    result.exit_code = 2;
    result.output =
        json{{"error", e.what()}, {"passed", false}}.dump(2) + "\n";
  }

  if (!ctx.out_path.empty()) {
    std::ofstream out(ctx.out_path, std::ios::binary);
    if (out) out << result.output;
  }
  return result;
}

}  // namespace nilstruct
