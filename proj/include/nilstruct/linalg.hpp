#pragma once

#include <vector>

namespace nilstruct {

// Dense square matrix helpers for the tiny systems this library meets
// (dim <= ~8). Row-major storage, LU with partial pivoting throughout.

struct LuDecomposition {
  std::vector<double> lu;  // packed L\U factors
  std::vector<int> perm;
  int dim = 0;
  double det = 0.0;
  bool singular = true;
};

LuDecomposition lu_decompose(const std::vector<double>& a, int dim);

double determinant(const std::vector<double>& a, int dim);

// Inverts via LU; |det| below `min_abs_det` counts as singular and the
// caller is told through the return flag.
bool invert(const std::vector<double>& a, int dim, std::vector<double>& out,
            double min_abs_det = 1e-12);

// Null-space basis by Gauss-Jordan reduction with partial pivoting.
// Entries with magnitude below `tol` (relative to the largest entry) are
// treated as zero. Returns one vector per free column.
std::vector<std::vector<double>> null_space(const std::vector<double>& a,
                                            int rows, int cols,
                                            double tol = 1e-12);

// Least-squares solve of the normal equations for up to two basis vectors;
// used by the curve classifier. Returns false when the Gram matrix is
// numerically singular.
bool solve_2x2_sym(double a11, double a12, double a22, double b1, double b2,
                   double& x1, double& x2, double min_det = 1e-14);

}  // namespace nilstruct
