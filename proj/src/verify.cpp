#include "nilstruct/verify.hpp"

#include <cmath>
#include <cstdio>

#include "nilstruct/builtin.hpp"
#include "nilstruct/curvature.hpp"
#include "nilstruct/curves.hpp"

namespace nilstruct::verify {

json to_json(const ResidualReport& r) {
  json j{{"max_residual", r.max_residual},
         {"scale", r.scale},
         {"tolerance", r.tolerance},
         {"points", r.points},
         {"passed", r.passed}};
  if (!r.parts.empty()) {
    json parts = json::object();
    for (const auto& [name, v] : r.parts) parts[name] = v;
    j["pairs"] = parts;
  }
  return j;
}

namespace {

std::vector<ChartManifold> builtins(std::initializer_list<const char*> names) {
  std::vector<ChartManifold> out;
  for (const char* n : names) out.push_back(builtin_manifold(n));
  return out;
}

std::vector<ChartManifold> charts_or(std::vector<ChartManifold> charts,
                                     std::initializer_list<const char*> names) {
  if (!charts.empty()) return charts;
  return builtins(names);
}

bool metric_is_pure(const ChartManifold& c, const Sampling& s) {
  return is_pure(c.metric, 0, 1, c.f, s).passed;
}

// keeps every per-chart json and folds the pass flags
struct Collector {
  Outcome out;
  Collector() {
    out.passed = true;
    out.body["charts"] = json::array();
  }
  void add(const std::string& name, bool passed, json detail) {
    detail["manifold"] = name;
    detail["passed"] = passed;
    out.body["charts"].push_back(std::move(detail));
    out.passed = out.passed && passed;
  }
};

PhForcing forcing_of(const std::string& a, const std::string& b) {
  auto t = make_vars({"t"});
  return PhForcing{parse_expression(a, t), parse_expression(b, t)};
}

// fuzz families shared by theorem2/theorem3: pure pattern
// [[p(z1), 1], [1, 0]] and non-pure pattern diag(1, 1 + c1 z1 + c2 z2)
TensorField fuzz_pure_metric(UniformSource& rng, const VarTablePtr& vars) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.6f + %.6f*z1 + %.6f*z1^2 + %.6f*z1^3",
                rng.next(-2, 2), rng.next(-2, 2), rng.next(-2, 2),
                rng.next(-2, 2));
  TensorField g(2, sig_of({Slot::Lower, Slot::Lower}), vars);
  g.at({0, 0}) = parse_expression(buf, vars);
  g.at({0, 1}) = Expression::number(1.0, vars);
  g.at({1, 0}) = Expression::number(1.0, vars);
  return g;
}

TensorField fuzz_nonpure_metric(UniformSource& rng, const VarTablePtr& vars) {
  double c1 = (rng.next() < 0.5 ? -1 : 1) * rng.next(0.15, 0.4);
  double c2 = (rng.next() < 0.5 ? -1 : 1) * rng.next(0.15, 0.4);
  char buf[120];
  std::snprintf(buf, sizeof buf, "1 + %.6f*z1 + %.6f*z2", c1, c2);
  TensorField g(2, sig_of({Slot::Lower, Slot::Lower}), vars);
  g.at({0, 0}) = Expression::number(1.0, vars);
  g.at({1, 1}) = parse_expression(buf, vars);
  return g;
}

double partials_purity(const TensorField& g, const TensorField& f,
                       const Sampling& s) {
  return purity_pairs(coordinate_partials(g), {{0, 1}, {0, 2}, {1, 2}}, f, s)
      .max_residual;
}

}  // namespace

Outcome lemma1(std::vector<ChartManifold> charts, const Sampling& s) {
  Collector col;
  for (const ChartManifold& c :
       charts_or(std::move(charts),
                 {"flat-B", "curved-B", "lifted-curved", "kahler-4"})) {
    ConnectionField gamma = christoffel(c.metric, s);
    NablaFReport rep = nabla_f_check(gamma, c.f, s);
    bool ok = rep.nabla_f <= 1e-10 * rep.scale &&
              rep.partial_f_syntactically_zero && rep.purity.passed &&
              rep.implication_holds;
    col.add(c.name, ok,
            {{"nabla_f", rep.nabla_f},
             {"partial_f", rep.partial_f},
             {"partial_f_syntactically_zero", rep.partial_f_syntactically_zero},
             {"purity", to_json(rep.purity)},
             {"implication_holds", rep.implication_holds}});
  }
  return col.out;
}

Outcome lemma2(std::vector<ChartManifold> charts, const Sampling& s) {
  Collector col;
  for (const ChartManifold& c :
       charts_or(std::move(charts),
                 {"flat-B", "curved-B", "lifted-curved", "kahler-4"})) {
    ConnectionField gamma = christoffel(c.metric, s);
    RicciIdentityReport rep = ricci_identity_residual(gamma, c.f, s);
    bool ok = rep.precondition_ok && rep.passed &&
              rep.upper_lower_purity.max_residual <= 1e-8;
    col.add(c.name, ok,
            {{"f_square", rep.f_square},
             {"nabla_f", rep.nabla_f},
             {"commutator", rep.commutator},
             {"upper_lower_purity", to_json(rep.upper_lower_purity)}});
  }
  return col.out;
}

Outcome assertion1(std::vector<ChartManifold> charts, const Sampling& s) {
  Collector col;
  for (const ChartManifold& c :
       charts_or(std::move(charts),
                 {"flat-B", "curved-B", "lifted-curved", "kahler-4"})) {
    ConnectionField gamma = christoffel(c.metric, s);
    PurityClassification rep = classify_purity(riemann(gamma), c.metric, c.f, s);
    const char* cls = rep.metric_class == MetricClass::BType ? "B-type"
                      : rep.metric_class == MetricClass::KahlerType
                          ? "Kahler-type"
                          : "neither";
    bool ok = rep.passed && (rep.metric_class != MetricClass::BType ||
                             rep.lower_pairs.max_residual <= 1e-8);
    col.add(c.name, ok,
            {{"metric_class", cls},
             {"lower_pairs", to_json(rep.lower_pairs)},
             {"hybrid_pair", to_json(rep.hybrid_pair)},
             {"upper_lower", to_json(rep.upper_lower)}});
  }
  return col.out;
}

Outcome theorem1(std::vector<ChartManifold> charts, const Sampling& s) {
  Collector col;
  for (const ChartManifold& c :
       charts_or(std::move(charts), {"flat-B", "curved-B", "lifted-curved"})) {
    if (!metric_is_pure(c, s)) continue;  // the statement is about B-type
    ConnectionField gamma = christoffel(c.metric, s);
    PurityClassification rep = classify_purity(riemann(gamma), c.metric, c.f, s);
    bool ok = rep.lower_pairs.passed && rep.one_pair_implies_all;
    col.add(c.name, ok,
            {{"lower_pairs", to_json(rep.lower_pairs)},
             {"one_pair_implies_all", rep.one_pair_implies_all}});
  }
  if (col.out.body["charts"].empty()) {
    col.out.passed = false;
    col.out.body["note"] = "no chart with a pure metric to certify";
  }
  return col.out;
}

Outcome theorem2(std::vector<ChartManifold> charts, const Sampling& s) {
  Collector col;
  bool had_user_charts = !charts.empty();
  // builtins: both purity residuals small together
  for (const ChartManifold& c :
       charts_or(std::move(charts), {"flat-B", "curved-B", "lifted-curved"})) {
    if (!metric_is_pure(c, s)) continue;
    double dg = partials_purity(c.metric, c.f, s);
    ConnectionField gamma = christoffel(c.metric, s);
    PurityClassification rep = classify_purity(riemann(gamma), c.metric, c.f, s);
    bool ok = dg <= 1e-9 && rep.lower_pairs.max_residual <= 1e-8;
    col.add(c.name, ok,
            {{"partials_purity", dg},
             {"lowered_curvature_purity", rep.lower_pairs.max_residual}});
  }

  // fuzzed families: the two residuals pass or fail together
  auto vars = default_coords(2);
  TensorField f = adapted_f(1, 0, vars);
  UniformSource rng(s.seed + 101);
  json fuzz = json::array();
  bool fuzz_ok = true;
  for (int trial = 0; trial < 5; ++trial) {
    TensorField pg = fuzz_pure_metric(rng, vars);
    double dg_p = partials_purity(pg, f, s);
    PurityClassification rp =
        classify_purity(riemann(christoffel(pg, s)), pg, f, s);
    bool pure_side = dg_p <= 1e-9 && rp.lower_pairs.max_residual <= 1e-8;

    TensorField ng = fuzz_nonpure_metric(rng, vars);
    double dg_n = partials_purity(ng, f, s);
    PurityClassification rn =
        classify_purity(riemann(christoffel(ng, s)), ng, f, s);
    bool nonpure_side = dg_n >= 0.1 && !rn.lower_pairs.passed;

    fuzz_ok = fuzz_ok && pure_side && nonpure_side;
    fuzz.push_back({{"pure_partials", dg_p},
                    {"pure_curvature", rp.lower_pairs.max_residual},
                    {"nonpure_partials", dg_n},
                    {"nonpure_curvature", rn.lower_pairs.max_residual}});
  }
  col.out.body["fuzz"] = std::move(fuzz);
  col.out.passed = col.out.passed && fuzz_ok;
  if (had_user_charts && col.out.body["charts"].empty())
    col.out.body["note"] =
        "supplied charts skipped (the statement needs a pure metric); "
        "equivalence certified on the fuzz families";
  return col.out;
}

Outcome theorem3(const Sampling& s) {
  auto vars = default_coords(2);
  TensorField f = adapted_f(1, 0, vars);
  UniformSource rng(s.seed + 202);

  Outcome out;
  out.passed = true;
  json members = json::array();
  for (int trial = 0; trial < 5; ++trial) {
    TensorField pg = fuzz_pure_metric(rng, vars);
    ResidualReport pure = connection_purity(christoffel(pg, s), f, s);
    bool ok_pure = pure.max_residual <= 1e-9 * pure.scale;

    TensorField ng = fuzz_nonpure_metric(rng, vars);
    ResidualReport fail = connection_purity(christoffel(ng, s), f, s);
    bool ok_nonpure = !fail.passed && fail.max_residual >= 1e-3;

    out.passed = out.passed && ok_pure && ok_nonpure;
    members.push_back({{"pure_residual", pure.max_residual},
                       {"nonpure_residual", fail.max_residual}});
  }
  out.body["members"] = std::move(members);
  return out;
}

Outcome theorem4(std::vector<ChartManifold> charts, const Sampling& s) {
  Collector col;
  for (const ChartManifold& c :
       charts_or(std::move(charts), {"flat-B", "curved-B", "lifted-curved"})) {
    if (!metric_is_pure(c, s)) continue;  // needs a B-metric
    ConnectionField g1 = christoffel(c.metric, s);
    ConnectionField g2 = christoffel(metric_plus_tilde(c.metric, c.f, &s), s);
    double worst = 0.0;
    for (const auto& p : sample_points(s, c.dim()))
      worst = std::max(worst, max_abs_diff(g1.evaluate(p), g2.evaluate(p)));
    col.add(c.name, worst <= 1e-9, {{"coefficient_residual", worst}});
  }
  if (col.out.body["charts"].empty()) {
    col.out.passed = false;
    col.out.body["note"] = "no chart with a pure metric to certify";
  }
  return col.out;
}

Outcome theorem5(std::vector<ChartManifold> charts, const Sampling& s,
                 const std::string& h_override) {
  Collector col;
  for (const ChartManifold& c : charts_or(std::move(charts), {"curved-B"})) {
    if (!h_override.empty()) {
      Expression h = parse_expression(h_override, c.coords);
      ConformalReport rep = conformal_purity_scan(c.metric, h, c.f, s);
      col.add(c.name, rep.purity.passed,
              {{"h", h_override},
               {"purity", to_json(rep.purity)},
               {"h_constant", rep.h_constant},
               {"h_gradient_max", rep.h_gradient_max}});
      continue;
    }
    // the two-sided statement: constant factors preserve purity of the
    // partials, a genuinely varying factor breaks it
    Expression h_const = parse_expression("7.5", c.coords);
    ConformalReport const_rep = conformal_purity_scan(c.metric, h_const, c.f, s);
    std::string ex = "exp(" + (*c.coords)[0] + ")";
    Expression h_exp = parse_expression(ex, c.coords);
    ConformalReport exp_rep = conformal_purity_scan(c.metric, h_exp, c.f, s);
    bool ok = const_rep.purity.max_residual <= 1e-10 &&
              exp_rep.purity.max_residual >= 1e-3;
    col.add(c.name, ok,
            {{"constant_h_residual", const_rep.purity.max_residual},
             {"exp_h_residual", exp_rep.purity.max_residual}});
  }
  return col.out;
}

Outcome theorem6(std::vector<ChartManifold> charts, const Sampling& s) {
  Collector col;
  for (const ChartManifold& c :
       charts_or(std::move(charts), {"lifted-curved"})) {
    if (!c.base.has_value()) {
      col.add(c.name, false, {{"error", "theorem6 requires a base chart"}});
      continue;
    }
    ConnectionField base_gamma = christoffel(c.base->metric, s);
    ConnectionField lift_gamma = complete_lift(base_gamma, c.coords);

    std::vector<double> z0(static_cast<std::size_t>(c.base->n), 0.0);
    std::vector<double> v0(static_cast<std::size_t>(c.base->n));
    for (int i = 0; i < c.base->n; ++i)
      v0[(std::size_t)i] = 0.8 - 0.3 * i;
    auto curve = integrate_geodesic(base_gamma, z0, v0, 1.0, 1e-3);
    std::vector<double> vs{-0.5, 0.25, 1.0};
    Theorem6Report rep = theorem6_check(base_gamma, lift_gamma, c.f, curve, vs);
    col.add(c.name, rep.passed,
            {{"base_geodesic_residual", rep.base_geodesic_residual},
             {"gamma_identity_residual", rep.gamma_identity_residual},
             {"transport_residual", rep.transport_residual},
             {"lines_checked", rep.lines_checked}});
  }
  return col.out;
}

Outcome theorem7(std::vector<ChartManifold> charts, const Sampling& s) {
  Collector col;
  for (const ChartManifold& c :
       charts_or(std::move(charts), {"flat-B", "curved-B"})) {
    ConnectionField gamma = christoffel(c.metric, s);

    std::vector<double> z0(static_cast<std::size_t>(c.dim()), 0.0);
    std::vector<double> v0(static_cast<std::size_t>(c.dim()), 0.0);
    v0[0] = 1.0;
    if (c.dim() > 2) v0[1] = 0.4;
    auto curve = integrate_ph_curve(gamma, c.f, z0, v0, forcing_of("0", "1"),
                                    1.0, 1e-3);

    OneForm q(c.dim(), sig_of({Slot::Lower}), c.coords);
    q.at({std::min(1, c.dim() - 1)}) = Expression::number(1.0, c.coords);
    q.at({0}) = parse_expression("0.25", c.coords);
    Theorem7Report rep = theorem7_ph_transform(gamma, q, c.f, c.n, curve);
    col.add(c.name, rep.passed,
            {{"a_shift_mismatch", rep.a_shift_mismatch},
             {"b_shift_mismatch", rep.b_shift_mismatch},
             {"orth_residual", rep.orth_residual},
             {"samples_used", rep.samples_used}});
  }
  return col.out;
}

Outcome corollary_g(std::vector<ChartManifold> charts, const Sampling& s) {
  Collector col;
  for (const ChartManifold& c :
       charts_or(std::move(charts),
                 {"flat-B", "curved-B", "lifted-curved", "kahler-4"})) {
    std::vector<double> p(static_cast<std::size_t>(c.dim()), 0.25);
    TensorValue g = c.metric.evaluate(p);
    TensorValue f = c.f.evaluate(p);
    bool pure = is_pure(c.metric, 0, 1, c.f, s).passed;

    UniformSource rng(s.seed + 303);
    double route_gap = 0.0, direction_gap = 0.0;
    bool branches_ok = true;
    for (int i = 0; i < 20; ++i) {
      std::vector<double> x, y, v, w;
      for (int d = 0; d < c.dim(); ++d) {
        x.push_back(rng.next(-1, 1));
        y.push_back(rng.next(-1, 1));
        v.push_back(rng.next(-1, 1));
        w.push_back(rng.next(-1, 1));
      }
      GStarResult gs = evaluate_G_star(g, f, x, y, v, w);
      route_gap = std::max(route_gap, std::fabs(gs.via_G - gs.direct));

      HolomorphicDirection hd = holomorphic_direction_value(g, f, x);
      if (hd.branch != HolomorphicBranch::Kernel) {
        std::vector<double> fx(static_cast<std::size_t>(c.dim()), 0.0);
        for (int a = 0; a < c.dim(); ++a)
          for (int b = 0; b < c.dim(); ++b)
            fx[(std::size_t)a] += f.at({a, b}) * x[(std::size_t)b];
        double gval = evaluate_G(g, x, fx, x, fx);
        direction_gap = std::max(direction_gap, std::fabs(gval - hd.value));
        if (!pure && hd.branch == HolomorphicBranch::BType) branches_ok = false;
      }
    }

    // kernel short-circuit on an exact kernel vector
    auto kernel = kernel_basis(f);
    bool kernel_ok = true;
    if (!kernel.empty())
      kernel_ok = holomorphic_direction_value(g, f, kernel.front()).branch ==
                  HolomorphicBranch::Kernel;

    bool ok = route_gap <= 1e-12 && direction_gap <= 1e-12 && kernel_ok &&
              branches_ok;
    col.add(c.name, ok,
            {{"gstar_route_gap", route_gap},
             {"direction_value_gap", direction_gap},
             {"kernel_short_circuit", kernel_ok}});
  }
  return col.out;
}

Outcome assertion2(std::vector<ChartManifold> charts, const Sampling& s) {
  Collector col;
  for (const ChartManifold& c :
       charts_or(std::move(charts), {"curved-B", "lifted-curved"})) {
    ConnectionField gamma = christoffel(c.metric, s);
    std::vector<double> z0(static_cast<std::size_t>(c.dim()), 0.1);
    std::vector<double> v0(static_cast<std::size_t>(c.dim()));
    for (int i = 0; i < c.dim(); ++i) v0[(std::size_t)i] = 0.7 - 0.2 * i;
    auto curve = integrate_geodesic(gamma, z0, v0, 1.0, 1e-3);
    CurveClassification rep = classify_curve(gamma, c.f, c.n, curve);
    bool ok = !rep.degenerate && !rep.kernel_confined && rep.is_ph &&
              rep.max_orth_residual <= 1e-6;
    col.add(c.name, ok,
            {{"orth_residual", rep.max_orth_residual},
             {"is_ph", rep.is_ph},
             {"kernel_confined", rep.kernel_confined}});
  }
  return col.out;
}

Outcome assertion3(std::vector<ChartManifold> charts, const Sampling& s) {
  Collector col;
  for (const ChartManifold& c : charts_or(std::move(charts), {"curved-B"})) {
    ConnectionField gamma = christoffel(c.metric, s);
    // start inside ker f: all velocity in the fiber block
    std::vector<double> z0(static_cast<std::size_t>(c.dim()), 0.2);
    std::vector<double> v0(static_cast<std::size_t>(c.dim()), 0.0);
    for (int i = c.n; i < c.dim(); ++i) v0[(std::size_t)i] = 1.0;
    auto curve = integrate_geodesic(gamma, z0, v0, 1.0, 1e-3);
    CurveClassification rep = classify_curve(gamma, c.f, c.n, curve);
    bool ok = rep.kernel_confined && rep.special_plane && rep.is_ph &&
              rep.is_geodesic;
    col.add(c.name, ok,
            {{"kernel_confined", rep.kernel_confined},
             {"special_plane", rep.special_plane},
             {"base_drift", rep.base_drift},
             {"orth_residual", rep.max_orth_residual}});
  }
  return col.out;
}

Outcome assertion4(std::vector<ChartManifold> charts, const Sampling& s) {
  Collector col;
  for (const ChartManifold& c : charts_or(std::move(charts), {"curved-B"})) {
    ConnectionField gamma = christoffel(c.metric, s);
    std::vector<double> z0(static_cast<std::size_t>(c.dim()), 0.2);
    std::vector<double> v0(static_cast<std::size_t>(c.dim()), 0.0);
    for (int i = c.n; i < c.dim(); ++i) v0[(std::size_t)i] = 1.0;
    auto curve = integrate_ph_curve(gamma, c.f, z0, v0, forcing_of("t", "1"),
                                    1.0, 1e-3);
    CurveClassification rep = classify_curve(gamma, c.f, c.n, curve);
    bool ok = rep.kernel_confined && rep.is_pregeodesic &&
              rep.max_dir_residual <= 1e-6 * (1.0 + rep.max_accel);
    col.add(c.name, ok,
            {{"kernel_confined", rep.kernel_confined},
             {"dir_residual", rep.max_dir_residual},
             {"is_pregeodesic", rep.is_pregeodesic}});
  }
  return col.out;
}

Outcome assertion5(const Sampling& s) {
  auto u = make_vars({"u"});
  auto uv = make_vars({"u", "v"});
  HolomorphicSurface surf = build_surface({parse_expression("u^2", u)});

  Outcome out;
  out.passed = true;
  json cases = json::array();
  auto run = [&](const char* name, const Expression& h, const Expression& t,
                 const Sampling& box) {
    ReparamResult r = reparametrize_surface(surf, h, t, box);
    out.passed = out.passed && r.pair.passed;
    cases.push_back({{"case", name},
                     {"constraint_residual", r.constraint_residual},
                     {"pair_du_dv", r.pair.du_dv_residual},
                     {"pair_pv", r.pair.pv_residual},
                     {"passed", r.pair.passed}});
  };

  run("identity", Expression::symbol("u", u), Expression::symbol("v", uv), s);
  run("scale-2", parse_expression("2*u", u), parse_expression("2*v", uv), s);
  Sampling pos = s;
  pos.lo = 0.2;
  pos.hi = 1.2;
  run("square", parse_expression("u^2", u), parse_expression("2*u*v", uv), pos);

  out.body["cases"] = std::move(cases);
  out.body["surface_pair_check"] = surface_pair_check(surf, s).passed;
  out.passed = out.passed && surface_pair_check(surf, s).passed;
  return out;
}

std::vector<std::string> check_names() {
  return {"lemma1",   "lemma2",   "assertion1", "theorem1",   "theorem2",
          "theorem3", "theorem4", "theorem5",   "theorem6",   "theorem7",
          "corollary-g", "assertion2", "assertion3", "assertion4",
          "assertion5", "all"};
}

Outcome dispatch(const std::string& name, std::vector<ChartManifold> charts,
                 const Sampling& s, const std::string& h_override) {
  // a non-constant structure field is accepted only by the lemma1
  // diagnostic; every other certificate assumes the adapted setting
  if (name != "lemma1")
    for (const ChartManifold& c : charts)
      if (!c.f_is_constant())
        throw Error("check '" + name + "' requires a constant structure "
                    "field; only lemma1 accepts a non-constant f");
  if (name == "lemma1") return lemma1(std::move(charts), s);
  if (name == "lemma2") return lemma2(std::move(charts), s);
  if (name == "assertion1") return assertion1(std::move(charts), s);
  if (name == "theorem1") return theorem1(std::move(charts), s);
  if (name == "theorem2") return theorem2(std::move(charts), s);
  if (name == "theorem3") return theorem3(s);
  if (name == "theorem4") return theorem4(std::move(charts), s);
  if (name == "theorem5") return theorem5(std::move(charts), s, h_override);
  if (name == "theorem6") return theorem6(std::move(charts), s);
  if (name == "theorem7") return theorem7(std::move(charts), s);
  if (name == "corollary-g") return corollary_g(std::move(charts), s);
  if (name == "assertion2") return assertion2(std::move(charts), s);
  if (name == "assertion3") return assertion3(std::move(charts), s);
  if (name == "assertion4") return assertion4(std::move(charts), s);
  if (name == "assertion5") return assertion5(s);
  if (name == "all") return all(std::move(charts), s);
  throw Error("unknown verify check '" + name + "'");
}

Outcome all(std::vector<ChartManifold> charts, const Sampling& s) {
  Outcome out;
  out.passed = true;
  out.body["checks"] = json::array();

  // statements a user chart cannot support fall back to the builtins so
  // that `verify all` always certifies the complete set
  bool any_pure = false, any_base = false;
  for (const ChartManifold& c : charts) {
    any_pure = any_pure || metric_is_pure(c, s);
    any_base = any_base || c.base.has_value();
  }

  for (const std::string& name : check_names()) {
    if (name == "all") continue;
    bool fallback = false;
    if (!charts.empty()) {
      if ((name == "theorem1" || name == "theorem4") && !any_pure)
        fallback = true;
      if (name == "theorem6" && !any_base) fallback = true;
    }
    Outcome one =
        dispatch(name, fallback ? std::vector<ChartManifold>{} : charts, s, "");
    json entry = std::move(one.body);
    entry["check"] = name;
    entry["passed"] = one.passed;
    if (fallback) entry["fallback_to_builtins"] = true;
    out.body["checks"].push_back(std::move(entry));
    out.passed = out.passed && one.passed;
  }
  return out;
}

}  // namespace nilstruct::verify
