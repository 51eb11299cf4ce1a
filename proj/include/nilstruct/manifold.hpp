#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nilstruct/tensor.hpp"

namespace nilstruct {

// One coordinate chart of dimension 2n+m together with its metric and the
// nilpotent structure f. Coordinates are ordered base block z^1..z^n,
// tangent-fiber block z^{n+1}..z^{2n}, extra-fiber block z^{2n+1}..z^{2n+m}.
struct ChartManifold {
  std::string name;
  int n = 1;
  int m = 0;
  VarTablePtr coords;
  TensorField metric;  // symmetric (0,2)
  TensorField f;       // (1,1), nilpotent of rank n

  int dim() const { return 2 * n + m; }
  bool f_is_constant() const { return f.is_constant(); }

  // Base-chart data carried by lifted manifolds (dim n, no structure).
  struct BaseChart {
    int n = 0;
    VarTablePtr coords;
    TensorField metric;
  };
  std::optional<BaseChart> base;
};

// The adapted structure: constant (1,1) field with f^{n+i}_i = 1 for
// i = 1..n and zero elsewhere; kernel = the 2n+1..2n+m and n+1..2n fiber
// directions.
TensorField adapted_f(int n, int m, VarTablePtr vars);

// Basis of the null space of a pointwise structure value, by row reduction
// with partial pivoting. For the adapted structure this returns exactly
// the unit vectors e_{n+1}..e_{2n+m}.
std::vector<std::vector<double>> kernel_basis(const TensorValue& f);

// Numeric rank of a (1,1) value.
int matrix_rank(const TensorValue& f, double tol = 1e-12);

// Validation summary of a chart: metric symmetry, nondegeneracy, f^2 = 0
// and rank(f) = n, all sampled. Degenerate metrics abort with
// SingularError carrying the point.
struct ValidationReport {
  double metric_symmetry = 0.0;
  double min_abs_det = 0.0;
  double f_square = 0.0;
  int f_rank = 0;
  bool f_constant = false;
  bool passed = false;
};

ValidationReport validate_chart(const ChartManifold& chart, const Sampling& s);

// Coordinate transition of the layered chart: base functions phi^i of the
// barred base coordinates and extra-fiber functions Theta^a of the barred
// base and extra-fiber coordinates. All expressions are bound to the full
// barred table (same names as the chart coordinates).
struct TransitionMap {
  int n = 1;
  int m = 0;
  VarTablePtr vars;
  std::vector<Expression> phi;    // n entries
  std::vector<Expression> theta;  // m entries
};

// The induced full-chart map: the tangent-fiber block transforms with the
// Jacobian of phi. Returns the dim coordinate functions, the Jacobian as a
// (1,1) field, and the certificate that the Jacobian commutes with the
// adapted structure at the sample points. A numerically singular base
// Jacobian raises SingularError with the point.
struct LiftedTransition {
  std::vector<Expression> map;  // dim expressions in the barred coordinates
  TensorField jacobian;
  ResidualReport commutation;
};

LiftedTransition lift_transition(const TransitionMap& t, const Sampling& s);

}  // namespace nilstruct
