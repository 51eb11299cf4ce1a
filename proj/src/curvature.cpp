#include "nilstruct/curvature.hpp"

#include <cmath>

#include "nilstruct/error.hpp"

namespace nilstruct {

CurvatureField riemann(const ConnectionField& gamma) {
  int dim = gamma.dim();
  const VarTablePtr& vars = gamma.vars();
  TensorField dG = coordinate_partials(gamma.gamma);  // dG(s, rho, a, b)

  CurvatureField out;
  out.r = TensorField(
      dim, sig_of({Slot::Upper, Slot::Lower, Slot::Lower, Slot::Lower}), vars);

  for (int rho = 0; rho < dim; ++rho)
    for (int sig = 0; sig < dim; ++sig)
      for (int mu = 0; mu < dim; ++mu)
        for (int nu = mu + 1; nu < dim; ++nu) {
          Expression e = dG.at({mu, rho, nu, sig}) - dG.at({nu, rho, mu, sig});
          for (int lam = 0; lam < dim; ++lam) {
            e = e + gamma.at(rho, mu, lam) * gamma.at(lam, nu, sig);
            e = e - gamma.at(rho, nu, lam) * gamma.at(lam, mu, sig);
          }
          out.r.at({rho, sig, mu, nu}) = e;
          out.r.at({rho, sig, nu, mu}) = -e;
        }
  return out;
}

CurvatureInvariants curvature_invariants(const CurvatureField& r,
                                         const TensorField& g,
                                         const Sampling& s) {
  CurvatureInvariants inv;
  TensorField lowered = lower_index(r.r, g, 0);
  int dim = r.dim();
  double scale = 0.0;
  for (const auto& p : sample_points(s, dim)) {
    TensorValue rv = r.r.evaluate(p);
    TensorValue lv = lowered.evaluate(p);
    scale = std::max(scale, max_abs(rv));
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        for (int mu = 0; mu < dim; ++mu)
          for (int nu = 0; nu < dim; ++nu) {
            inv.antisymmetry =
                std::max(inv.antisymmetry, std::fabs(rv.at({a, b, mu, nu}) +
                                                     rv.at({a, b, nu, mu})));
            inv.bianchi = std::max(
                inv.bianchi, std::fabs(lv.at({a, b, mu, nu}) +
                                       lv.at({a, mu, nu, b}) +
                                       lv.at({a, nu, b, mu})));
          }
  }
  inv.passed = inv.antisymmetry <= 1e-9 * (1.0 + scale) &&
               inv.bianchi <= 1e-9 * (1.0 + scale);
  return inv;
}

RicciIdentityReport ricci_identity_residual(const ConnectionField& gamma,
                                            const TensorField& f,
                                            const Sampling& s) {
  RicciIdentityReport rep;
  rep.tolerance = s.tolerance;
  int dim = gamma.dim();

  // guard: f must square to zero before any claim is made
  for (const auto& p : sample_points(s, dim)) {
    TensorValue fv = f.evaluate(p);
    rep.f_square = std::max(rep.f_square, max_abs(apply_f_to_slot(fv, fv, 1)));
  }
  rep.precondition_ok = rep.f_square <= s.tolerance;
  if (!rep.precondition_ok) return rep;

  TensorField nf = covariant_derivative(f, gamma);   // (s; a; b)
  TensorField nnf = covariant_derivative(nf, gamma); // (m; s; a; b)
  CurvatureField r = riemann(gamma);

  double max_r = 0.0;
  for (const auto& p : sample_points(s, dim)) {
    TensorValue fv = f.evaluate(p);
    TensorValue nfv = nf.evaluate(p);
    TensorValue nnfv = nnf.evaluate(p);
    TensorValue rv = r.r.evaluate(p);
    rep.nabla_f = std::max(rep.nabla_f, max_abs(nfv));
    max_r = std::max(max_r, max_abs(rv));

    for (int mu = 0; mu < dim; ++mu)
      for (int nu = 0; nu < dim; ++nu)
        for (int a = 0; a < dim; ++a)
          for (int b = 0; b < dim; ++b) {
            double lhs = nnfv.at({mu, nu, a, b}) - nnfv.at({nu, mu, a, b});
            double rhs = 0.0;
            for (int lam = 0; lam < dim; ++lam)
              rhs += rv.at({a, lam, mu, nu}) * fv.at({lam, b}) -
                     rv.at({lam, b, mu, nu}) * fv.at({a, lam});
            rep.commutator = std::max(rep.commutator, std::fabs(lhs - rhs));
          }
  }

  rep.upper_lower_purity = purity_pairs(r.r, {{0, 1}}, f, s, -1.0);
  rep.upper_lower_purity.name = "curvature-upper-lower-purity";
  rep.scale = 1.0 + max_r;

  rep.passed = rep.nabla_f <= s.tolerance * rep.scale &&
               rep.commutator <= s.tolerance * rep.scale &&
               rep.upper_lower_purity.passed;
  return rep;
}

PurityClassification classify_purity(
    const CurvatureField& r, const TensorField& g, const TensorField& f,
    const Sampling& s, const std::vector<std::pair<int, int>>* lower_pair_list) {
  PurityClassification rep;
  rep.metric_purity = is_pure(g, 0, 1, f, s);
  rep.metric_hybridity = is_hybrid(g, 0, 1, f, s);
  if (rep.metric_purity.passed)
    rep.metric_class = MetricClass::BType;
  else if (rep.metric_hybridity.passed)
    rep.metric_class = MetricClass::KahlerType;

  TensorField lowered = lower_index(r.r, g, 0);
  static const std::vector<std::pair<int, int>> all_pairs = {
      {0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  const auto& pairs = lower_pair_list != nullptr ? *lower_pair_list : all_pairs;

  rep.lower_pairs = purity_pairs(lowered, pairs, f, s, -1.0);
  rep.lower_pairs.name = "lowered-curvature-purity";
  rep.upper_lower = purity_pairs(r.r, {{0, 1}}, f, s, -1.0);
  rep.upper_lower.name = "curvature-upper-lower-purity";
  rep.hybrid_pair = purity_pairs(lowered, {{0, 1}}, f, s, +1.0);
  rep.hybrid_pair.name = "lowered-curvature-hybridity";

  // one pure pair must force all pairs pure on a pure metric
  double min_part = rep.lower_pairs.max_residual;
  for (const auto& [name, v] : rep.lower_pairs.parts)
    min_part = std::min(min_part, v);
  rep.one_pair_implies_all =
      rep.lower_pairs.max_residual <= 10.0 * min_part + 1e-9;

  switch (rep.metric_class) {
    case MetricClass::BType:
      rep.passed = rep.lower_pairs.passed && rep.one_pair_implies_all &&
                   rep.upper_lower.passed;
      break;
    case MetricClass::KahlerType:
      rep.passed = rep.hybrid_pair.passed && rep.upper_lower.passed;
      break;
    case MetricClass::Neither:
      rep.passed = false;
      break;
  }
  return rep;
}

namespace {

double pairing(const TensorValue& g, std::span<const double> x,
               std::span<const double> y) {
  double sum = 0.0;
  for (int a = 0; a < g.dim; ++a)
    for (int b = 0; b < g.dim; ++b)
      sum += g.at({a, b}) * x[(std::size_t)a] * y[(std::size_t)b];
  return sum;
}

std::vector<double> apply_structure(const TensorValue& f,
                                    std::span<const double> x) {
  std::vector<double> out(static_cast<std::size_t>(f.dim), 0.0);
  for (int a = 0; a < f.dim; ++a)
    for (int b = 0; b < f.dim; ++b)
      out[(std::size_t)a] += f.at({a, b}) * x[(std::size_t)b];
  return out;
}

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace

double evaluate_G(const TensorValue& g, std::span<const double> x,
                  std::span<const double> y, std::span<const double> v,
                  std::span<const double> w) {
  return pairing(g, x, v) * pairing(g, y, w) -
         pairing(g, x, w) * pairing(g, y, v);
}

GStarResult evaluate_G_star(const TensorValue& g, const TensorValue& f,
                            std::span<const double> x,
                            std::span<const double> y,
                            std::span<const double> v,
                            std::span<const double> w) {
  GStarResult out;
  std::vector<double> fy = apply_structure(f, y);
  std::vector<double> fw = apply_structure(f, w);
  out.via_G = evaluate_G(g, x, fy, v, fw);
  out.direct = -pairing(g, x, fw) * pairing(g, fy, v);
  out.value = out.direct;
  return out;
}

HolomorphicDirection holomorphic_direction_value(const TensorValue& g,
                                                 const TensorValue& f,
                                                 std::span<const double> x,
                                                 double tol) {
  HolomorphicDirection out;
  std::vector<double> fx = apply_structure(f, x);
  double xs = norm_inf(x);
  if (norm_inf(fx) <= tol * (1.0 + xs)) {
    out.branch = HolomorphicBranch::Kernel;
    return out;
  }
  out.g_x_fx = pairing(g, x, fx);
  double scale = 1.0 + max_abs(g) * xs * xs;
  if (std::fabs(out.g_x_fx) <= tol * scale) {
    out.branch = HolomorphicBranch::Indefinite;
    out.value = 0.0;
  } else {
    out.branch = HolomorphicBranch::BType;
    out.value = -out.g_x_fx * out.g_x_fx;
  }
  return out;
}

}  // namespace nilstruct
