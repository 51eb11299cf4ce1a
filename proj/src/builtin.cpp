#include "nilstruct/builtin.hpp"

#include "nilstruct/connection.hpp"
#include "nilstruct/error.hpp"

namespace nilstruct {

namespace {

ChartManifold make_flat_b() {
  ChartManifold c;
  c.name = "flat-B";
  c.n = 1;
  c.m = 0;
  c.coords = default_coords(2);
  c.metric = TensorField(2, sig_of({Slot::Lower, Slot::Lower}), c.coords);
  c.metric.at({0, 1}) = Expression::number(1.0, c.coords);
  c.metric.at({1, 0}) = Expression::number(1.0, c.coords);
  c.f = adapted_f(1, 0, c.coords);
  return c;
}

ChartManifold make_curved_b() {
  ChartManifold c;
  c.name = "curved-B";
  c.n = 1;
  c.m = 0;
  c.coords = default_coords(2);
  c.metric = TensorField(2, sig_of({Slot::Lower, Slot::Lower}), c.coords);
  c.metric.at({0, 0}) = parse_expression("z1^2 + 1", c.coords);
  c.metric.at({0, 1}) = Expression::number(1.0, c.coords);
  c.metric.at({1, 0}) = Expression::number(1.0, c.coords);
  c.f = adapted_f(1, 0, c.coords);
  return c;
}

ChartManifold make_lifted_curved() {
  ChartManifold c;
  c.name = "lifted-curved";
  c.n = 2;
  c.m = 0;
  c.coords = default_coords(4);

  ChartManifold::BaseChart base;
  base.n = 2;
  base.coords = default_coords(2);
  base.metric = TensorField(2, sig_of({Slot::Lower, Slot::Lower}), base.coords);
  base.metric.at({0, 0}) = Expression::number(1.0, base.coords);
  base.metric.at({1, 1}) = parse_expression("z1^2 + 1", base.coords);

  c.metric = complete_lift_metric(base.metric, c.coords);
  c.f = adapted_f(2, 0, c.coords);
  c.base = std::move(base);
  return c;
}

ChartManifold make_kahler_4() {
  // Solving the hybridity constraints g.f = -(g.f)^T for n=2 leaves the
  // base block free and couples the cross blocks antisymmetrically with
  // det = c^4. This member has unit coupling and a z2-dependent base
  // entry, which keeps the coefficients pure while the curvature is
  // nonzero, so the hybrid classification is exercised off the flat case.
  ChartManifold c;
  c.name = "kahler-4";
  c.n = 2;
  c.m = 0;
  c.coords = default_coords(4);
  c.metric = TensorField(4, sig_of({Slot::Lower, Slot::Lower}), c.coords);
  c.metric.at({0, 0}) = parse_expression("z2^2 + 2", c.coords);
  c.metric.at({1, 1}) = Expression::number(1.0, c.coords);
  c.metric.at({0, 3}) = Expression::number(1.0, c.coords);
  c.metric.at({3, 0}) = Expression::number(1.0, c.coords);
  c.metric.at({1, 2}) = Expression::number(-1.0, c.coords);
  c.metric.at({2, 1}) = Expression::number(-1.0, c.coords);
  c.f = adapted_f(2, 0, c.coords);
  return c;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"flat-B", "curved-B", "lifted-curved", "kahler-4"};
}

ChartManifold builtin_manifold(const std::string& name) {
  if (name == "flat-B") return make_flat_b();
  if (name == "curved-B") return make_curved_b();
  if (name == "lifted-curved") return make_lifted_curved();
  if (name == "kahler-4") return make_kahler_4();
  throw Error("unknown built-in manifold '" + name + "'");
}

}  // namespace nilstruct
