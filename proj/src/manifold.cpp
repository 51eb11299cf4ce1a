#include "nilstruct/manifold.hpp"

#include <cmath>
#include <limits>

#include "nilstruct/error.hpp"
#include "nilstruct/linalg.hpp"

namespace nilstruct {

TensorField adapted_f(int n, int m, VarTablePtr vars) {
  if (n < 1 || m < 0) throw ShapeError("adapted_f requires n >= 1, m >= 0");
  int dim = 2 * n + m;
  if (static_cast<int>(vars->size()) != dim)
    throw ShapeError("coordinate table size does not match 2n+m");
  TensorField f(dim, sig_of({Slot::Upper, Slot::Lower}), vars);
  for (int i = 0; i < n; ++i)
    f.at({n + i, i}) = Expression::number(1.0, vars);
  return f;
}

std::vector<std::vector<double>> kernel_basis(const TensorValue& f) {
  if (f.rank() != 2) throw ShapeError("kernel_basis expects a (1,1) value");
  return null_space(f.comp, f.dim, f.dim);
}

int matrix_rank(const TensorValue& f, double tol) {
  if (f.rank() != 2) throw ShapeError("matrix_rank expects a (1,1) value");
  return f.dim - static_cast<int>(null_space(f.comp, f.dim, f.dim, tol).size());
}

ValidationReport validate_chart(const ChartManifold& chart, const Sampling& s) {
  ValidationReport rep;
  rep.f_constant = chart.f_is_constant();
  rep.min_abs_det = std::numeric_limits<double>::infinity();
  rep.f_rank = -1;

  for (const auto& p : sample_points(s, chart.dim())) {
    TensorValue g = chart.metric.evaluate(p);
    rep.metric_symmetry = std::max(rep.metric_symmetry, symmetry_residual(g));

    double det = determinant(g.comp, chart.dim());
    if (std::fabs(det) < 1e-12)
      throw SingularError("metric determinant below 1e-12", p);
    rep.min_abs_det = std::min(rep.min_abs_det, std::fabs(det));

    TensorValue fv = chart.f.evaluate(p);
    TensorValue ff = apply_f_to_slot(fv, fv, 1);
    rep.f_square = std::max(rep.f_square, max_abs(ff));
    int rank = matrix_rank(fv);
    if (rep.f_rank < 0) rep.f_rank = rank;
    else if (rank != rep.f_rank) rep.f_rank = -2;  // rank not constant
  }

  rep.passed = rep.metric_symmetry <= 1e-12 && rep.f_square <= 1e-12 &&
               rep.f_rank == chart.n;
  return rep;
}

LiftedTransition lift_transition(const TransitionMap& t, const Sampling& s) {
  int n = t.n, m = t.m;
  int dim = 2 * n + m;
  if (static_cast<int>(t.phi.size()) != n ||
      static_cast<int>(t.theta.size()) != m)
    throw ShapeError("transition map block sizes do not match (n, m)");
  const VarTablePtr& vars = t.vars;
  if (static_cast<int>(vars->size()) != dim)
    throw ShapeError("transition table size does not match 2n+m");

  LiftedTransition out;
  out.map.reserve(static_cast<std::size_t>(dim));

  // base block: z^i = phi^i(zbar)
  for (int i = 0; i < n; ++i) out.map.push_back(t.phi[(std::size_t)i]);

  // tangent-fiber block: z^{n+i} = sum_k (d phi^i / d zbar^k) zbar^{n+k}
  for (int i = 0; i < n; ++i) {
    Expression sum = Expression::number(0.0, vars);
    for (int k = 0; k < n; ++k) {
      Expression dphi = t.phi[(std::size_t)i].derivative((*vars)[(std::size_t)k]);
      sum = sum + dphi * Expression::symbol((*vars)[(std::size_t)(n + k)], vars);
    }
    out.map.push_back(sum);
  }

  // extra-fiber block: z^{2n+a} = Theta^a(zbar base, zbar extra)
  for (int a = 0; a < m; ++a) out.map.push_back(t.theta[(std::size_t)a]);

  // Jacobian of the full map
  out.jacobian = TensorField(dim, sig_of({Slot::Upper, Slot::Lower}), vars);
  for (int alpha = 0; alpha < dim; ++alpha)
    for (int beta = 0; beta < dim; ++beta)
      out.jacobian.at({alpha, beta}) =
          out.map[(std::size_t)alpha].derivative((*vars)[(std::size_t)beta]);

  // commutation with the adapted structure, plus the base-block
  // nonsingularity guard, both at the sample points
  TensorField f = adapted_f(n, m, vars);
  TensorValue fv = f.evaluate(std::vector<double>(static_cast<std::size_t>(dim), 0.0));

  ResidualReport& rep = out.commutation;
  rep.name = "transition-commutation";
  rep.tolerance = s.tolerance;
  double max_j = 0.0;
  auto points = sample_points(s, dim);
  for (const auto& p : points) {
    TensorValue jv = out.jacobian.evaluate(p);

    std::vector<double> base_block(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        base_block[(std::size_t)(i * n + k)] = jv.at({i, k});
    if (std::fabs(determinant(base_block, n)) < 1e-12)
      throw SingularError("transition base Jacobian is singular", p);

    double r = 0.0;
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        double jf = 0.0, fj = 0.0;
        for (int l = 0; l < dim; ++l) {
          jf += jv.at({a, l}) * fv.at({l, b});
          fj += fv.at({a, l}) * jv.at({l, b});
        }
        r = std::max(r, std::fabs(jf - fj));
      }
    rep.max_residual = std::max(rep.max_residual, r);
    max_j = std::max(max_j, max_abs(jv));
  }
  rep.points = static_cast<int>(points.size());
  rep.scale = 1.0 + max_j;
  rep.finalize();
  return out;
}

}  // namespace nilstruct
