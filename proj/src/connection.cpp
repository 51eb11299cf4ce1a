#include "nilstruct/connection.hpp"

#include <cmath>

#include "nilstruct/error.hpp"
#include "nilstruct/linalg.hpp"

namespace nilstruct {

double ConnectionField::symmetry_residual(const Sampling& s) const {
  double r = 0.0;
  for (const auto& p : sample_points(s, dim())) {
    TensorValue v = gamma.evaluate(p);
    for (int sig = 0; sig < dim(); ++sig)
      for (int a = 0; a < dim(); ++a)
        for (int b = a + 1; b < dim(); ++b)
          r = std::max(r, std::fabs(v.at({sig, a, b}) - v.at({sig, b, a})));
  }
  return r;
}

ConnectionField christoffel(const TensorField& g, const Sampling& s) {
  if (g.sig() != sig_of({Slot::Lower, Slot::Lower}))
    throw ShapeError("christoffel expects a (0,2) metric");
  int dim = g.dim();

  Expression det = determinant_field(g);
  for (const auto& p : sample_points(s, dim)) {
    if (std::fabs(det.evaluate(p)) < 1e-12)
      throw SingularError("metric determinant below 1e-12", p);
  }

  TensorField adj = adjugate_field(g);
  TensorField dg = coordinate_partials(g);  // dg(s, a, b) = d_s g_{ab}

  ConnectionField gamma(dim, g.vars());
  Expression two_det = Expression::number(2.0, g.vars()) * det;
  for (int sig = 0; sig < dim; ++sig)
    for (int a = 0; a < dim; ++a)
      for (int b = a; b < dim; ++b) {
        Expression num = Expression::number(0.0, g.vars());
        for (int l = 0; l < dim; ++l) {
          Expression bracket =
              dg.at({a, b, l}) + dg.at({b, l, a}) - dg.at({l, a, b});
          num = num + adj.at({sig, l}) * bracket;
        }
        Expression value = num / two_det;
        gamma.at(sig, a, b) = value;
        gamma.at(sig, b, a) = value;
      }
  return gamma;
}

ResidualReport connection_purity(const ConnectionField& gamma,
                                 const TensorField& f, const Sampling& s) {
  ResidualReport rep = purity_pairs(
      gamma.gamma, {{0, 1}, {0, 2}, {1, 2}}, f, s, -1.0);
  rep.name = "connection-purity";
  rep.parts[0].first = "upper-lower1";
  rep.parts[1].first = "upper-lower2";
  rep.parts[2].first = "lower1-lower2";
  return rep;
}

TensorField covariant_derivative(const TensorField& t,
                                 const ConnectionField& gamma) {
  if (t.dim() != gamma.dim())
    throw ShapeError("covariant_derivative dimension mismatch");
  int dim = t.dim();

  TensorField out = coordinate_partials(t);
  if (t.rank() == 0) return out;

  std::vector<int> oidx(t.rank() + 1, 0);
  std::vector<int> tidx(t.rank(), 0);
  do {
    int sig = oidx[0];
    Expression sum = out.at(oidx);
    for (std::size_t j = 0; j < t.rank(); ++j) {
      for (std::size_t k = 0; k < t.rank(); ++k) tidx[k] = oidx[k + 1];
      int idx_j = oidx[j + 1];
      Expression term = Expression::number(0.0, t.vars());
      for (int lam = 0; lam < dim; ++lam) {
        tidx[j] = lam;
        if (t.sig()[j] == Slot::Upper)
          term = term + gamma.at(idx_j, sig, lam) * t.at(tidx);
        else
          term = term + gamma.at(lam, sig, idx_j) * t.at(tidx);
      }
      sum = t.sig()[j] == Slot::Upper ? sum + term : sum - term;
    }
    out.at(oidx) = sum;
  } while (next_index(oidx, dim));
  return out;
}

double metricity_residual(const ConnectionField& gamma, const TensorField& g,
                          const Sampling& s) {
  TensorField nabla_g = covariant_derivative(g, gamma);
  double r = 0.0;
  for (const auto& p : sample_points(s, g.dim()))
    r = std::max(r, max_abs(nabla_g.evaluate(p)));
  return r;
}

NablaFReport nabla_f_check(const ConnectionField& gamma, const TensorField& f,
                           const Sampling& s) {
  NablaFReport rep;
  rep.tolerance = s.tolerance;
  rep.purity = connection_purity(gamma, f, s);

  TensorField nf = covariant_derivative(f, gamma);
  TensorField df = coordinate_partials(f);
  rep.partial_f_syntactically_zero = true;
  for (const Expression& e : df.components())
    if (!e.is_zero()) rep.partial_f_syntactically_zero = false;

  double max_f = 0.0;
  for (const auto& p : sample_points(s, f.dim())) {
    rep.nabla_f = std::max(rep.nabla_f, max_abs(nf.evaluate(p)));
    rep.partial_f = std::max(rep.partial_f, max_abs(df.evaluate(p)));
    max_f = std::max(max_f, max_abs(f.evaluate(p)));
  }
  rep.scale = 1.0 + max_f;

  double tol = rep.tolerance * rep.scale;
  bool premise = rep.nabla_f <= tol && rep.purity.passed;
  bool conclusion = rep.partial_f <= tol;
  rep.implication_holds = !premise || conclusion;
  rep.passed = premise && conclusion;
  return rep;
}

ConnectionField complete_lift(const ConnectionField& base,
                              VarTablePtr lifted_vars) {
  int n = base.dim();
  if (static_cast<int>(lifted_vars->size()) != 2 * n)
    throw ShapeError("complete_lift target table must have 2n entries");

  ConnectionField lift(2 * n, lifted_vars);
  const VarTable& base_vars = *base.vars();
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        Expression g_hik = base.at(h, i, k).rehosted(lifted_vars);
        lift.at(h, i, k) = g_hik;
        lift.at(n + h, i, n + k) = g_hik;
        lift.at(n + h, n + i, k) = g_hik;

        Expression spray = Expression::number(0.0, lifted_vars);
        for (int s = 0; s < n; ++s) {
          Expression d =
              base.at(h, i, k).derivative(base_vars[(std::size_t)s]);
          spray = spray + Expression::symbol((*lifted_vars)[(std::size_t)(n + s)],
                                             lifted_vars) *
                              d.rehosted(lifted_vars);
        }
        lift.at(n + h, i, k) = spray;
      }
  lift.symmetric = base.symmetric;
  return lift;
}

TensorField complete_lift_metric(const TensorField& base_g,
                                 VarTablePtr lifted_vars) {
  int n = base_g.dim();
  if (base_g.sig() != sig_of({Slot::Lower, Slot::Lower}))
    throw ShapeError("complete_lift_metric expects a (0,2) metric");
  if (static_cast<int>(lifted_vars->size()) != 2 * n)
    throw ShapeError("complete_lift_metric target table must have 2n entries");

  const VarTable& base_vars = *base_g.vars();
  TensorField out(2 * n, sig_of({Slot::Lower, Slot::Lower}), lifted_vars);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      Expression g_ik = base_g.at({i, k}).rehosted(lifted_vars);
      out.at({i, n + k}) = g_ik;
      out.at({n + i, k}) = g_ik;

      Expression spray = Expression::number(0.0, lifted_vars);
      for (int s = 0; s < n; ++s) {
        Expression d = base_g.at({i, k}).derivative(base_vars[(std::size_t)s]);
        spray = spray + Expression::symbol((*lifted_vars)[(std::size_t)(n + s)],
                                           lifted_vars) *
                            d.rehosted(lifted_vars);
      }
      out.at({i, k}) = spray;
    }
  return out;
}

TensorField metric_plus_tilde(const TensorField& g, const TensorField& f,
                              const Sampling* check) {
  TensorField tilde = metric_tilde(g, f);
  TensorField sum(g.dim(), g.sig(), g.vars());
  for (std::size_t i = 0; i < sum.components().size(); ++i)
    sum.components()[i] = g.components()[i] + tilde.components()[i];

  if (check != nullptr) {
    Expression det = determinant_field(sum);
    for (const auto& p : sample_points(*check, g.dim()))
      if (std::fabs(det.evaluate(p)) < 1e-12)
        throw SingularError("det(g + g-tilde) below 1e-12", p);
  }
  return sum;
}

ConformalReport conformal_purity_scan(const TensorField& g,
                                      const Expression& h,
                                      const TensorField& f, const Sampling& s) {
  TensorField hg(g.dim(), g.sig(), g.vars());
  Expression hh = h.variables()->empty() ? h.rehosted(g.vars()) : h;
  for (std::size_t i = 0; i < hg.components().size(); ++i)
    hg.components()[i] = hh * g.components()[i];

  ConformalReport rep;
  rep.purity = purity_pairs(coordinate_partials(hg),
                            {{0, 1}, {0, 2}, {1, 2}}, f, s, -1.0);
  rep.purity.name = "conformal-partials-purity";

  const VarTable& vars = *g.vars();
  for (const auto& p : sample_points(s, g.dim()))
    for (const std::string& v : vars)
      rep.h_gradient_max =
          std::max(rep.h_gradient_max, std::fabs(hh.derivative(v).evaluate(p)));
  rep.h_constant = rep.h_gradient_max <= s.tolerance;
  return rep;
}

TensorField deformation_tensor(const OneForm& q, const TensorField& f) {
  if (q.sig() != sig_of({Slot::Lower}))
    throw ShapeError("deformation_tensor expects a (0,1) form");
  if (q.dim() != f.dim()) throw ShapeError("form/structure dimension mismatch");
  int dim = q.dim();
  const VarTablePtr& vars = q.vars();

  // qt_i = q_s f^s_i
  std::vector<Expression> qt(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    Expression sum = Expression::number(0.0, vars);
    for (int s = 0; s < dim; ++s)
      sum = sum + q.at({s}) * f.at({s, i});
    qt[(std::size_t)i] = sum;
  }

  TensorField t(dim, sig_of({Slot::Upper, Slot::Lower, Slot::Lower}), vars);
  for (int a = 0; a < dim; ++a)
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < dim; ++k) {
        Expression e = Expression::number(0.0, vars);
        if (a == i) e = e + qt[(std::size_t)k];
        e = e + f.at({a, i}) * q.at({k});
        if (a == k) e = e + qt[(std::size_t)i];
        e = e + f.at({a, k}) * q.at({i});
        t.at({a, i, k}) = e;
      }
  return t;
}

ConnectionField deform(const ConnectionField& gamma, const TensorField& t) {
  if (t.sig() != sig_of({Slot::Upper, Slot::Lower, Slot::Lower}) ||
      t.dim() != gamma.dim())
    throw ShapeError("deform expects a (1,2) tensor of matching dimension");
  ConnectionField out = gamma;
  for (std::size_t i = 0; i < out.gamma.components().size(); ++i)
    out.gamma.components()[i] =
        gamma.gamma.components()[i] + t.components()[i];
  return out;
}

}  // namespace nilstruct
