// Acceptance suite: one pass/fail line per criterion, exit code = number
// of failed criteria. Tolerances are pinned here, not configurable.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "nilstruct/builtin.hpp"
#include "nilstruct/cli.hpp"
#include "nilstruct/curvature.hpp"
#include "nilstruct/curves.hpp"
#include "nilstruct/manifold.hpp"

using namespace nilstruct;

namespace {

int g_failures = 0;

void report(int number, const char* title, bool ok, const std::string& note) {
  std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", number,
              title, note.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

PhForcing forcing_of(const char* a, const char* b) {
  auto t = make_vars({"t"});
  return PhForcing{parse_expression(a, t), parse_expression(b, t)};
}

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

// 1. The complete lift of random polynomial base connections (n=1, n=2)
//    has pure coefficients, residual <= 1e-12 at 20 seeded points.
void criterion1() {
  Sampling s;  // 20 points, seed 42
  UniformSource rng(42);
  double worst = 0.0;
  for (int n : {1, 2}) {
    auto base_vars = default_coords(n);
    auto lifted_vars = default_coords(2 * n);
    TensorField f = adapted_f(n, 0, lifted_vars);
    for (int trial = 0; trial < 3; ++trial) {
      ConnectionField base(n, base_vars);
      for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i)
          for (int k = i; k < n; ++k) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%.5f + %.5f*z1 + %.5f*z%d^2",
                          rng.next(-1, 1), rng.next(-1, 1), rng.next(-1, 1), n);
            Expression e = parse_expression(buf, base_vars);
            base.at(h, i, k) = e;
            base.at(h, k, i) = e;
          }
      ResidualReport rep =
          connection_purity(complete_lift(base, lifted_vars), f, s);
      worst = std::max(worst, rep.max_residual);
    }
  }
  report(1, "complete lift solves the purity condition", worst <= 1e-12,
         "max residual " + fmt(worst));
}

// 2. Lemma 1 / corollary: nabla f <= 1e-10 and partial f exactly zero on
//    every builtin Levi-Civita connection with the adapted structure.
void criterion2() {
  Sampling s;
  double worst_nf = 0.0;
  bool df_zero = true;
  for (const std::string& name : builtin_names()) {
    ChartManifold c = builtin_manifold(name);
    ConnectionField gamma = christoffel(c.metric, s);
    NablaFReport rep = nabla_f_check(gamma, c.f, s);
    worst_nf = std::max(worst_nf, rep.nabla_f);
    df_zero = df_zero && rep.partial_f_syntactically_zero && rep.partial_f == 0.0;
  }
  report(2, "nabla f vanishes for pure connections, partial f exactly zero",
         worst_nf <= 1e-10 && df_zero, "max |nabla f| " + fmt(worst_nf));
}

// 3. Lemma 2: (upper, argument)-pair purity of the curvature <= 1e-8 on
//    the lifted curved manifold.
void criterion3() {
  Sampling s;
  ChartManifold c = builtin_manifold("lifted-curved");
  ConnectionField gamma = christoffel(c.metric, s);
  RicciIdentityReport rep = ricci_identity_residual(gamma, c.f, s);
  bool ok = rep.precondition_ok &&
            rep.upper_lower_purity.max_residual <= 1e-8 &&
            rep.commutator <= 1e-8 * rep.scale;
  report(3, "curvature pure in one upper and one lower index", ok,
         "purity residual " + fmt(rep.upper_lower_purity.max_residual) +
             ", ricci commutator " + fmt(rep.commutator));
}

// 4. Assertion 1 + Theorems 1-2 positive and negative sides.
void criterion4() {
  Sampling s;
  bool ok = true;
  std::string note;

  for (const char* name : {"curved-B", "lifted-curved"}) {
    ChartManifold c = builtin_manifold(name);
    double dg = partials_purity(c.metric, c.f, s);
    PurityClassification rep = classify_purity(
        riemann(christoffel(c.metric, s)), c.metric, c.f, s);
    double one_pair = rep.lower_pairs.parts.front().second;
    ok = ok && dg <= 1e-8 && one_pair <= 1e-8 &&
         rep.lower_pairs.max_residual <= 1e-8;
    if (std::string(name) == "lifted-curved")
      note = "lifted all-pairs residual " + fmt(rep.lower_pairs.max_residual);
  }

  // fuzzed non-pure family around the Euclidean identity (n = 1)
  auto vars = default_coords(2);
  TensorField f = adapted_f(1, 0, vars);
  UniformSource rng(4242);
  for (int trial = 0; trial < 5; ++trial) {
    TensorField g = fuzz_nonpure_metric(rng, vars);
    double dg = partials_purity(g, f, s);
    ResidualReport gp = connection_purity(christoffel(g, s), f, s);
    ok = ok && dg >= 0.1 && !gp.passed;
  }
  report(4, "curvature purity classification, positive and negative", ok,
         note);
}

// 5. Theorem 3 over fuzzed families.
void criterion5() {
  Sampling s;
  auto vars = default_coords(2);
  TensorField f = adapted_f(1, 0, vars);
  UniformSource rng(555);
  double worst_pure = 0.0, least_nonpure = 1e30;
  for (int trial = 0; trial < 5; ++trial) {
    ResidualReport pure =
        connection_purity(christoffel(fuzz_pure_metric(rng, vars), s), f, s);
    worst_pure = std::max(worst_pure, pure.max_residual / pure.scale);
    ResidualReport bad = connection_purity(
        christoffel(fuzz_nonpure_metric(rng, vars), s), f, s);
    least_nonpure = std::min(least_nonpure, bad.max_residual);
  }
  bool ok = worst_pure <= 1e-9 && least_nonpure >= 1e-3;
  report(5, "christoffel purity iff the metric partials are pure", ok,
         "pure side " + fmt(worst_pure) + ", non-pure side " +
             fmt(least_nonpure));
}

// 6. Theorem 4: g and g + g-tilde share the connection.
void criterion6() {
  Sampling s;
  double worst = 0.0;
  for (const char* name : {"curved-B", "lifted-curved"}) {
    ChartManifold c = builtin_manifold(name);
    ConnectionField g1 = christoffel(c.metric, s);
    ConnectionField g2 = christoffel(metric_plus_tilde(c.metric, c.f, &s), s);
    for (const auto& p : sample_points(s, c.dim()))
      worst = std::max(worst, max_abs_diff(g1.evaluate(p), g2.evaluate(p)));
  }
  report(6, "g and g+g~ originate the same connection", worst <= 1e-9,
         "max coefficient gap " + fmt(worst));
}

// 7. Theorem 5 branches.
void criterion7() {
  Sampling s;
  ChartManifold c = builtin_manifold("curved-B");
  ConformalReport cst = conformal_purity_scan(
      c.metric, parse_expression("7.5", c.coords), c.f, s);
  ConformalReport exp_rep = conformal_purity_scan(
      c.metric, parse_expression("exp(z1)", c.coords), c.f, s);
  bool ok = cst.purity.max_residual <= 1e-10 &&
            exp_rep.purity.max_residual >= 1e-3;
  report(7, "conformal change keeps purity only for constant factors", ok,
         "const " + fmt(cst.purity.max_residual) + ", exp " +
             fmt(exp_rep.purity.max_residual));
}

// 8. Corollary-G: route agreement, direction values, kernel guard.
void criterion8() {
  Sampling s;
  bool ok = true;
  double worst_gap = 0.0;
  for (const char* name : {"flat-B", "curved-B", "kahler-4"}) {
    ChartManifold c = builtin_manifold(name);
    std::vector<double> p(static_cast<std::size_t>(c.dim()), 0.25);
    TensorValue g = c.metric.evaluate(p);
    TensorValue f = c.f.evaluate(p);
    UniformSource rng(808);
    for (int i = 0; i < 20; ++i) {
      std::vector<double> x, y, v, w;
      for (int d = 0; d < c.dim(); ++d) {
        x.push_back(rng.next(-1, 1));
        y.push_back(rng.next(-1, 1));
        v.push_back(rng.next(-1, 1));
        w.push_back(rng.next(-1, 1));
      }
      GStarResult gs = evaluate_G_star(g, f, x, y, v, w);
      worst_gap = std::max(worst_gap, std::fabs(gs.via_G - gs.direct));

      HolomorphicDirection hd = holomorphic_direction_value(g, f, x);
      if (hd.branch != HolomorphicBranch::Kernel) {
        std::vector<double> fx(static_cast<std::size_t>(c.dim()), 0.0);
        for (int a = 0; a < c.dim(); ++a)
          for (int b = 0; b < c.dim(); ++b)
            fx[(std::size_t)a] += f.at({a, b}) * x[(std::size_t)b];
        ok = ok &&
             std::fabs(evaluate_G(g, x, fx, x, fx) - hd.value) <= 1e-12;
      }
    }
    auto kernel = kernel_basis(f);
    ok = ok && holomorphic_direction_value(g, f, kernel.front()).branch ==
                   HolomorphicBranch::Kernel;
  }
  ok = ok && worst_gap <= 1e-12;
  report(8, "G* routes agree and holomorphic directions short-circuit", ok,
         "route gap " + fmt(worst_gap));
}

// 9. Curve pipelines: stepper order, assertions 2 and 4, theorems 6 and 7.
void criterion9() {
  Sampling s;
  bool ok = true;
  std::string note;

  // 9a. the named closed form (t, t^2/2) is reproduced; the stepper order
  // is measured on the flat exponential case, where the truncation error
  // is nonzero
  {
    ChartManifold c = builtin_manifold("flat-B");
    ConnectionField zero(2, c.coords);
    auto traj = integrate_ph_curve(zero, c.f, std::vector<double>{0, 0},
                                   std::vector<double>{1, 0},
                                   forcing_of("0", "1"), 1.0, 1e-3);
    double named = 0.0;
    for (const CurveState& st : traj) {
      named = std::max(named, std::fabs(st.z[0] - st.t));
      named = std::max(named, std::fabs(st.z[1] - 0.5 * st.t * st.t));
    }
    ok = ok && named <= 1e-10;

    auto error_at = [&](double step) {
      auto t2 = integrate_ph_curve(zero, c.f, std::vector<double>{0, 0},
                                   std::vector<double>{1, 2},
                                   forcing_of("1", "0"), 1.0, step);
      double worst = 0.0;
      for (const CurveState& st : t2) {
        double fac = std::exp(st.t) - 1.0;
        worst = std::max(worst, std::fabs(st.z[0] - fac));
        worst = std::max(worst, std::fabs(st.z[1] - 2 * fac));
      }
      return worst;
    };
    double factor = error_at(0.1) / error_at(0.05);
    ok = ok && factor >= 8.0 * 0.8;
    note = "order factor " + fmt(factor);
  }

  // 9b. assertion 2 pipeline: geodesics off the kernel classify as planar
  {
    ChartManifold c = builtin_manifold("curved-B");
    ConnectionField gamma = christoffel(c.metric, s);
    auto traj = integrate_geodesic(gamma, std::vector<double>{0.0, 0.0},
                                   std::vector<double>{0.8, 0.3}, 1.0, 1e-3);
    CurveClassification rep = classify_curve(gamma, c.f, c.n, traj);
    ok = ok && rep.is_ph && !rep.kernel_confined &&
         rep.max_orth_residual <= 1e-6;
  }

  // assertion 4 pipeline: kernel planar curves are geodesic in direction
  {
    ChartManifold c = builtin_manifold("curved-B");
    ConnectionField gamma = christoffel(c.metric, s);
    auto traj = integrate_ph_curve(gamma, c.f, std::vector<double>{0.2, 0.0},
                                   std::vector<double>{0, 1},
                                   forcing_of("t", "1"), 1.0, 1e-3);
    CurveClassification rep = classify_curve(gamma, c.f, c.n, traj);
    ok = ok && rep.kernel_confined && rep.is_pregeodesic &&
         rep.max_dir_residual <= 1e-6 * (1.0 + rep.max_accel);
  }

  // 9c. theorem 6 on the lifted curved manifold
  {
    ChartManifold c = builtin_manifold("lifted-curved");
    ConnectionField base_gamma = christoffel(c.base->metric, s);
    ConnectionField lift_gamma = complete_lift(base_gamma, c.coords);
    auto curve = integrate_geodesic(base_gamma, std::vector<double>{0.0, 0.0},
                                    std::vector<double>{0.8, 0.5}, 1.0, 1e-3);
    std::vector<double> vs{-0.5, 0.25, 1.0};
    Theorem6Report rep = theorem6_check(base_gamma, lift_gamma, c.f, curve, vs);
    ok = ok && rep.transport_residual <= 1e-5 && rep.passed;
    note += ", theorem6 " + fmt(rep.transport_residual);
  }

  // 9d. theorem 7 coefficient shift
  {
    ChartManifold c = builtin_manifold("flat-B");
    ConnectionField zero(2, c.coords);
    auto traj = integrate_ph_curve(zero, c.f, std::vector<double>{0, 0},
                                   std::vector<double>{1, 0},
                                   forcing_of("0", "1"), 1.0, 1e-3);
    OneForm q(2, sig_of({Slot::Lower}), c.coords);
    q.at({1}) = Expression::number(1.0, c.coords);
    Theorem7Report rep = theorem7_ph_transform(zero, q, c.f, c.n, traj);
    ok = ok && rep.a_shift_mismatch <= 1e-4 && rep.b_shift_mismatch <= 1e-4;
    note += ", theorem7 shift " +
            fmt(std::max(rep.a_shift_mismatch, rep.b_shift_mismatch));
  }

  report(9, "curve pipelines (order, assertions 2/4, theorems 6/7)", ok, note);
}

// 10. Determinism of the full verification run.
void criterion10() {
  RunResult a = run_cli({"verify", "all", "--seed", "42"});
  RunResult b = run_cli({"verify", "all", "--seed", "42"});
  bool ok = a.exit_code == 0 && a.output == b.output;
  report(10, "verify all --seed 42 is byte-identical across runs", ok,
         ok ? "identical" : "outputs differ");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  if (g_failures == 0)
    std::printf("acceptance: all criteria passed\n");
  else
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return g_failures;
}
