#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "nilstruct/builtin.hpp"
#include "nilstruct/connection.hpp"
#include "nilstruct/manifold.hpp"

using namespace nilstruct;

namespace {

Sampling default_sampling() { return Sampling{}; }

// Random B-type metric [[p(z1), 1], [1, 0]] with a random polynomial p.
TensorField random_b_metric(UniformSource& rng, const VarTablePtr& vars) {
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

// Random non-pure metric diag(1, b(z1,z2)) with gradient bounded away from
// zero and b itself bounded away from zero on [-1,1]^2.
TensorField random_nonpure_metric(UniformSource& rng, const VarTablePtr& vars) {
  double c1 = (rng.next() < 0.5 ? -1 : 1) * rng.next(0.15, 0.4);
  double c2 = (rng.next() < 0.5 ? -1 : 1) * rng.next(0.15, 0.4);
  char buf[120];
  std::snprintf(buf, sizeof buf, "1 + %.6f*z1 + %.6f*z2", c1, c2);
  TensorField g(2, sig_of({Slot::Lower, Slot::Lower}), vars);
  g.at({0, 0}) = Expression::number(1.0, vars);
  g.at({1, 1}) = parse_expression(buf, vars);
  return g;
}

double max_partials_purity(const TensorField& g, const TensorField& f,
                           const Sampling& s) {
  return purity_pairs(coordinate_partials(g), {{0, 1}, {0, 2}, {1, 2}}, f, s)
      .max_residual;
}

}  // namespace

TEST_CASE("christoffel examples") {
  Sampling s = default_sampling();

  // constant metric: Gamma = 0
  ChartManifold flat = builtin_manifold("flat-B");
  ConnectionField g0 = christoffel(flat.metric, s);
  for (const Expression& e : g0.gamma.components()) CHECK(e.is_zero());

  // curved-B: the single nonzero coefficient is Gamma^2_{11} = z1
  ChartManifold curved = builtin_manifold("curved-B");
  ConnectionField gc = christoffel(curved.metric, s);
  UniformSource rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> p{rng.next(-1, 1), rng.next(-1, 1)};
    TensorValue v = gc.evaluate(p);
    for (int sig = 0; sig < 2; ++sig)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          double expect = (sig == 1 && a == 0 && b == 0) ? p[0] : 0.0;
          CHECK(v.at({sig, a, b}) == doctest::Approx(expect).epsilon(1e-12));
        }
  }

  // Euclidean diagonal: flat
  auto vars = default_coords(2);
  TensorField id(2, sig_of({Slot::Lower, Slot::Lower}), vars);
  id.at({0, 0}) = Expression::number(1.0, vars);
  id.at({1, 1}) = Expression::number(1.0, vars);
  ConnectionField ge = christoffel(id, s);
  for (const Expression& e : ge.gamma.components()) CHECK(e.is_zero());

  // singular metric raises with the point
  TensorField sing(2, sig_of({Slot::Lower, Slot::Lower}), vars);
  sing.at({0, 0}) = Expression::number(1.0, vars);
  CHECK_THROWS_AS(christoffel(sing, s), SingularError);
}

TEST_CASE("metric compatibility of christoffel") {
  Sampling s = default_sampling();
  for (const char* name : {"flat-B", "curved-B", "lifted-curved", "kahler-4"}) {
    ChartManifold c = builtin_manifold(name);
    ConnectionField gamma = christoffel(c.metric, s);
    CHECK(metricity_residual(gamma, c.metric, s) <= 1e-9);
    CHECK(gamma.symmetry_residual(s) <= 1e-12);
  }
}

TEST_CASE("connection_purity examples") {
  Sampling s = default_sampling();
  ChartManifold curved = builtin_manifold("curved-B");

  ConnectionField zero(2, curved.coords);
  CHECK(connection_purity(zero, curved.f, s).passed);

  ConnectionField gc = christoffel(curved.metric, s);
  ResidualReport pure = connection_purity(gc, curved.f, s);
  CHECK(pure.passed);
  CHECK(pure.max_residual <= 1e-12);

  // non-pure perturbation Gamma^1_{11} = 1
  ConnectionField bad = gc;
  bad.at(0, 0, 0) = bad.at(0, 0, 0) + Expression::number(1.0, curved.coords);
  ResidualReport fail = connection_purity(bad, curved.f, s);
  CHECK_FALSE(fail.passed);
  CHECK(fail.max_residual == doctest::Approx(1.0));
}

TEST_CASE("covariant_derivative") {
  Sampling s = default_sampling();
  ChartManifold curved = builtin_manifold("curved-B");
  ConnectionField gamma = christoffel(curved.metric, s);

  // constant scalar differentiates to the zero one-form
  TensorField scalar(2, Signature{}, curved.coords);
  scalar.components()[0] = Expression::number(3.5, curved.coords);
  TensorField ds = covariant_derivative(scalar, gamma);
  for (const Expression& e : ds.components()) CHECK(e.is_zero());

  // nabla g = 0 by construction
  TensorField ng = covariant_derivative(curved.metric, gamma);
  UniformSource rng(8);
  for (int i = 0; i < 10; ++i) {
    std::vector<double> p{rng.next(-1, 1), rng.next(-1, 1)};
    CHECK(max_abs(ng.evaluate(p)) <= 1e-9);
  }

  // nabla f = 0 for the adapted structure and a pure connection
  TensorField nf = covariant_derivative(curved.f, gamma);
  for (int i = 0; i < 10; ++i) {
    std::vector<double> p{rng.next(-1, 1), rng.next(-1, 1)};
    CHECK(max_abs(nf.evaluate(p)) <= 1e-12);
  }
}

TEST_CASE("nabla_f_check implements the lemma logic") {
  Sampling s = default_sampling();

  // pure connection, adapted f: everything vanishes
  ChartManifold curved = builtin_manifold("curved-B");
  ConnectionField gamma = christoffel(curved.metric, s);
  NablaFReport rep = nabla_f_check(gamma, curved.f, s);
  CHECK(rep.nabla_f <= 1e-12);
  CHECK(rep.partial_f == 0.0);
  CHECK(rep.partial_f_syntactically_zero);
  CHECK(rep.purity.passed);
  CHECK(rep.implication_holds);
  CHECK(rep.passed);

  // zero connection
  ConnectionField zero(2, curved.coords);
  NablaFReport rep0 = nabla_f_check(zero, curved.f, s);
  CHECK(rep0.nabla_f == 0.0);
  CHECK(rep0.partial_f == 0.0);
  CHECK(rep0.passed);

  // non-constant f with a zero connection: partials and nabla f both
  // nonzero, so the implication is not violated
  auto vars = default_coords(2);
  TensorField fvar(2, sig_of({Slot::Upper, Slot::Lower}), vars);
  fvar.at({1, 0}) = parse_expression("exp(z1)", vars);
  NablaFReport repv = nabla_f_check(zero, fvar, s);
  CHECK(repv.nabla_f > 0.1);
  CHECK(repv.partial_f > 0.1);
  CHECK(repv.implication_holds);
  CHECK_FALSE(repv.passed);
}

TEST_CASE("complete_lift: display formulas, hand-substituted") {
  auto base_vars = default_coords(1);
  auto lifted_vars = default_coords(2);

  // zero lifts to zero
  ConnectionField zero(1, base_vars);
  ConnectionField zlift = complete_lift(zero, lifted_vars);
  for (const Expression& e : zlift.gamma.components()) CHECK(e.is_zero());

  // n=1 with Gamma^1_{11} = u on the base (u = z1, y = z2)
  ConnectionField base(1, base_vars);
  base.at(0, 0, 0) = Expression::symbol("z1", base_vars);
  ConnectionField lift = complete_lift(base, lifted_vars);

  UniformSource rng(12);
  for (int i = 0; i < 10; ++i) {
    std::vector<double> p{rng.next(-1, 1), rng.next(-1, 1)};
    TensorValue v = lift.evaluate(p);
    CHECK(v.at({0, 0, 0}) == doctest::Approx(p[0]));          // Gamma^1_11 = u
    CHECK(v.at({1, 0, 0}) == doctest::Approx(p[1]));          // y * dGamma/du
    CHECK(v.at({1, 0, 1}) == doctest::Approx(p[0]));          // Gamma^2_12 = u
    CHECK(v.at({1, 1, 0}) == doctest::Approx(p[0]));          // Gamma^2_21 = u
    CHECK(v.at({0, 0, 1}) == 0.0);
    CHECK(v.at({0, 1, 1}) == 0.0);
    CHECK(v.at({1, 1, 1}) == 0.0);
  }
}

TEST_CASE("complete_lift of random polynomial connections is pure") {
  Sampling s = default_sampling();
  UniformSource rng(21);
  for (int n : {1, 2}) {
    auto base_vars = default_coords(n);
    auto lifted_vars = default_coords(2 * n);
    TensorField f = adapted_f(n, 0, lifted_vars);
    for (int trial = 0; trial < 5; ++trial) {
      ConnectionField base(n, base_vars);
      for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i)
          for (int k = i; k < n; ++k) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%.5f + %.5f*z1 + %.5f*z%d^2",
                          rng.next(-1, 1), rng.next(-1, 1), rng.next(-1, 1),
                          n);
            Expression e = parse_expression(buf, base_vars);
            base.at(h, i, k) = e;
            base.at(h, k, i) = e;
          }
      ConnectionField lift = complete_lift(base, lifted_vars);
      ResidualReport rep = connection_purity(lift, f, s);
      CHECK(rep.passed);
      CHECK(rep.max_residual <= 1e-12);

      // the solution-family identities, componentwise at samples
      for (const auto& p : sample_points(s, 2 * n)) {
        TensorValue v = lift.evaluate(p);
        for (int h = 0; h < n; ++h)
          for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
              CHECK(std::fabs(v.at({h, i, k}) - v.at({n + h, i, n + k})) <=
                    1e-12);
              CHECK(std::fabs(v.at({h, i, k}) - v.at({n + h, n + i, k})) <=
                    1e-12);
            }
      }
    }
  }
}

TEST_CASE("lifted metric and lifted connection are consistent") {
  // two routes to the same object: christoffel(complete_lift_metric(g))
  // versus complete_lift(christoffel(g))
  Sampling s = default_sampling();
  ChartManifold lifted = builtin_manifold("lifted-curved");
  REQUIRE(lifted.base.has_value());

  ConnectionField via_metric = christoffel(lifted.metric, s);
  ConnectionField base_conn = christoffel(lifted.base->metric, s);
  ConnectionField via_lift = complete_lift(base_conn, lifted.coords);

  for (const auto& p : sample_points(s, 4)) {
    TensorValue a = via_metric.evaluate(p);
    TensorValue b = via_lift.evaluate(p);
    CHECK(max_abs_diff(a, b) <= 1e-10);
  }
}

TEST_CASE("metric_plus_tilde") {
  Sampling s = default_sampling();

  // hand contraction on the flat pair metric: g-tilde = [[1,0],[0,0]]
  ChartManifold flat = builtin_manifold("flat-B");
  TensorField sum = metric_plus_tilde(flat.metric, flat.f, &s);
  TensorValue v = sum.evaluate(std::vector<double>{0.3, 0.4});
  CHECK(v.at({0, 0}) == 1.0);
  CHECK(v.at({0, 1}) == 1.0);
  CHECK(v.at({1, 0}) == 1.0);
  CHECK(v.at({1, 1}) == 0.0);

  // f = 0 leaves the metric alone
  TensorField zero_f(2, sig_of({Slot::Upper, Slot::Lower}), flat.coords);
  TensorField same = metric_plus_tilde(flat.metric, zero_f);
  CHECK(max_abs_diff(same.evaluate(std::vector<double>{0, 0}),
                     flat.metric.evaluate(std::vector<double>{0, 0})) == 0.0);

  // a degenerate sum is refused with the sample point
  TensorField dgn(2, sig_of({Slot::Lower, Slot::Lower}), flat.coords);
  dgn.at({0, 0}) = Expression::number(1.0, flat.coords);
  CHECK_THROWS_AS(metric_plus_tilde(dgn, zero_f, &s), SingularError);

  // the theorem: g and g + g-tilde share the Riemannian connection
  for (const char* name : {"curved-B", "lifted-curved"}) {
    ChartManifold c = builtin_manifold(name);
    ConnectionField g1 = christoffel(c.metric, s);
    ConnectionField g2 = christoffel(metric_plus_tilde(c.metric, c.f, &s), s);
    double worst = 0.0;
    for (const auto& p : sample_points(s, c.dim()))
      worst = std::max(worst, max_abs_diff(g1.evaluate(p), g2.evaluate(p)));
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("conformal_purity_scan") {
  Sampling s = default_sampling();
  ChartManifold curved = builtin_manifold("curved-B");
  auto run = [&](const char* h_text) {
    Expression h = parse_expression(h_text, curved.coords);
    return conformal_purity_scan(curved.metric, h, curved.f, s);
  };

  ConformalReport one = run("1");
  CHECK(one.purity.max_residual <= 1e-10);
  CHECK(one.h_constant);

  ConformalReport num = run("7.5");
  CHECK(num.purity.max_residual <= 1e-10);
  CHECK(num.h_constant);

  ConformalReport expf = run("exp(z1)");
  CHECK(expf.purity.max_residual >= 1e-3);
  CHECK_FALSE(expf.h_constant);
  CHECK(expf.h_gradient_max > 0.3);
}

TEST_CASE("deformation_tensor: the four-term expansion") {
  Sampling s = default_sampling();
  ChartManifold flat = builtin_manifold("flat-B");
  const auto& vars = flat.coords;

  // q = 0 gives T = 0
  OneForm zero_q(2, sig_of({Slot::Lower}), vars);
  TensorField t0 = deformation_tensor(zero_q, flat.f);
  for (const Expression& e : t0.components()) CHECK(e.is_zero());

  // constant q = (q1, q2), adapted f (n=1): qt = (q2, 0) and
  //   T^1_11 = 2 q2, T^2_11 = 2 q1, T^2_12 = T^2_21 = 2 q2, rest 0
  const double q1 = 0.7, q2 = -1.3;
  OneForm q(2, sig_of({Slot::Lower}), vars);
  q.at({0}) = Expression::number(q1, vars);
  q.at({1}) = Expression::number(q2, vars);
  TensorField t = deformation_tensor(q, flat.f);
  TensorValue v = t.evaluate(std::vector<double>{0.2, 0.9});
  CHECK(v.at({0, 0, 0}) == doctest::Approx(2 * q2));
  CHECK(v.at({1, 0, 0}) == doctest::Approx(2 * q1));
  CHECK(v.at({1, 0, 1}) == doctest::Approx(2 * q2));
  CHECK(v.at({1, 1, 0}) == doctest::Approx(2 * q2));
  CHECK(v.at({0, 0, 1}) == 0.0);
  CHECK(v.at({0, 1, 0}) == 0.0);
  CHECK(v.at({0, 1, 1}) == 0.0);
  CHECK(v.at({1, 1, 1}) == 0.0);

  // symmetric in the lower slots and pure with respect to every pair
  ResidualReport pure =
      purity_pairs(t, {{0, 1}, {0, 2}, {1, 2}}, flat.f, s, -1.0);
  CHECK(pure.passed);
  CHECK(pure.max_residual <= 1e-12);
}

TEST_CASE("deform keeps purity and nabla f") {
  Sampling s = default_sampling();
  ChartManifold curved = builtin_manifold("curved-B");
  const auto& vars = curved.coords;

  ConnectionField gamma = christoffel(curved.metric, s);

  // T = 0 keeps Gamma
  TensorField zero_t(2, sig_of({Slot::Upper, Slot::Lower, Slot::Lower}), vars);
  ConnectionField same = deform(gamma, zero_t);
  CHECK(max_abs_diff(same.evaluate(std::vector<double>{0.5, 0.5}),
                     gamma.evaluate(std::vector<double>{0.5, 0.5})) == 0.0);

  // Gamma = 0 deformed by q = (0,1) is pure
  OneForm q(2, sig_of({Slot::Lower}), vars);
  q.at({1}) = Expression::number(1.0, vars);
  ConnectionField zero(2, vars);
  ConnectionField t_only = deform(zero, deformation_tensor(q, curved.f));
  CHECK(connection_purity(t_only, curved.f, s).passed);

  // deformed lifted connection still has nabla f = 0
  ChartManifold lifted = builtin_manifold("lifted-curved");
  ConnectionField lift = christoffel(lifted.metric, s);
  OneForm q4(4, sig_of({Slot::Lower}), lifted.coords);
  q4.at({0}) = parse_expression("z2", lifted.coords);
  q4.at({1}) = Expression::number(0.5, lifted.coords);
  q4.at({2}) = parse_expression("z1", lifted.coords);
  q4.at({3}) = Expression::number(-1.0, lifted.coords);
  ConnectionField deformed =
      deform(lift, deformation_tensor(q4, lifted.f));
  NablaFReport rep = nabla_f_check(deformed, lifted.f, s);
  CHECK(rep.nabla_f <= 1e-9);
  CHECK(rep.purity.passed);
}

TEST_CASE("purity of christoffel tracks purity of the metric partials") {
  // the equivalence, over fuzzed families: pure partials <=> pure
  // coefficients; non-pure partials => the purity check fails
  Sampling s = default_sampling();
  auto vars = default_coords(2);
  TensorField f = adapted_f(1, 0, vars);
  UniformSource rng(77);

  for (int trial = 0; trial < 5; ++trial) {
    TensorField g = random_b_metric(rng, vars);
    CHECK(max_partials_purity(g, f, s) <= 1e-12);
    ConnectionField gamma = christoffel(g, s);
    ResidualReport rep = connection_purity(gamma, f, s);
    CHECK(rep.passed);
    CHECK(rep.max_residual <= 1e-9 * rep.scale);
  }

  for (int trial = 0; trial < 5; ++trial) {
    TensorField g = random_nonpure_metric(rng, vars);
    CHECK(max_partials_purity(g, f, s) >= 0.1);
    ConnectionField gamma = christoffel(g, s);
    ResidualReport rep = connection_purity(gamma, f, s);
    CHECK_FALSE(rep.passed);
    CHECK(rep.max_residual >= 1e-3);
  }
}
