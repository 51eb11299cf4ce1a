#include "nilstruct/linalg.hpp"

#include <cmath>

#include "nilstruct/error.hpp"
#include "nilstruct/sampling.hpp"

namespace nilstruct {

LuDecomposition lu_decompose(const std::vector<double>& a, int dim) {
  LuDecomposition d;
  d.dim = dim;
  d.lu = a;
  d.perm.resize(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) d.perm[static_cast<std::size_t>(i)] = i;

  auto at = [&](int r, int c) -> double& {
    return d.lu[static_cast<std::size_t>(r * dim + c)];
  };

  double det = 1.0;
  for (int col = 0; col < dim; ++col) {
    int pivot = col;
    double best = std::fabs(at(col, col));
    for (int r = col + 1; r < dim; ++r) {
      double v = std::fabs(at(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) {
      d.det = 0.0;
      d.singular = true;
      return d;
    }
    if (pivot != col) {
      for (int c = 0; c < dim; ++c) std::swap(at(pivot, c), at(col, c));
      std::swap(d.perm[static_cast<std::size_t>(pivot)],
                d.perm[static_cast<std::size_t>(col)]);
      det = -det;
    }
    det *= at(col, col);
    for (int r = col + 1; r < dim; ++r) {
      double factor = at(r, col) / at(col, col);
      at(r, col) = factor;
      for (int c = col + 1; c < dim; ++c) at(r, c) -= factor * at(col, c);
    }
  }
  d.det = det;
  d.singular = false;
  return d;
}

double determinant(const std::vector<double>& a, int dim) {
  return lu_decompose(a, dim).det;
}

bool invert(const std::vector<double>& a, int dim, std::vector<double>& out,
            double min_abs_det) {
  LuDecomposition d = lu_decompose(a, dim);
  if (d.singular || std::fabs(d.det) < min_abs_det) return false;

  auto lu = [&](int r, int c) {
    return d.lu[static_cast<std::size_t>(r * dim + c)];
  };

  out.assign(static_cast<std::size_t>(dim * dim), 0.0);
  std::vector<double> col(static_cast<std::size_t>(dim));
  for (int rhs = 0; rhs < dim; ++rhs) {
    // forward substitution on the permuted unit column
    for (int r = 0; r < dim; ++r) {
      double v = d.perm[static_cast<std::size_t>(r)] == rhs ? 1.0 : 0.0;
      for (int c = 0; c < r; ++c) v -= lu(r, c) * col[static_cast<std::size_t>(c)];
      col[static_cast<std::size_t>(r)] = v;
    }
    for (int r = dim - 1; r >= 0; --r) {
      double v = col[static_cast<std::size_t>(r)];
      for (int c = r + 1; c < dim; ++c)
        v -= lu(r, c) * out[static_cast<std::size_t>(c * dim + rhs)];
      out[static_cast<std::size_t>(r * dim + rhs)] = v / lu(r, r);
    }
  }
  return true;
}

std::vector<std::vector<double>> null_space(const std::vector<double>& a,
                                            int rows, int cols, double tol) {
  std::vector<double> m = a;
  auto at = [&](int r, int c) -> double& {
    return m[static_cast<std::size_t>(r * cols + c)];
  };

  double scale = 0.0;
  for (double v : m) scale = std::max(scale, std::fabs(v));
  double eps = tol * (1.0 + scale);

  std::vector<int> pivot_col_of_row;
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int best_row = -1;
    double best = eps;
    for (int r = row; r < rows; ++r) {
      double v = std::fabs(at(r, col));
      if (v > best) {
        best = v;
        best_row = r;
      }
    }
    if (best_row < 0) continue;
    if (best_row != row)
      for (int c = 0; c < cols; ++c) std::swap(at(best_row, c), at(row, c));
    double p = at(row, col);
    for (int c = 0; c < cols; ++c) at(row, c) /= p;
    for (int r = 0; r < rows; ++r) {
      if (r == row) continue;
      double f = at(r, col);
      if (f == 0.0) continue;
      for (int c = 0; c < cols; ++c) at(r, c) -= f * at(row, c);
    }
    pivot_col_of_row.push_back(col);
    is_pivot[static_cast<std::size_t>(col)] = true;
    ++row;
  }

  std::vector<std::vector<double>> basis;
  for (int free = 0; free < cols; ++free) {
    if (is_pivot[static_cast<std::size_t>(free)]) continue;
    std::vector<double> v(static_cast<std::size_t>(cols), 0.0);
    v[static_cast<std::size_t>(free)] = 1.0;
    for (std::size_t r = 0; r < pivot_col_of_row.size(); ++r)
      v[static_cast<std::size_t>(pivot_col_of_row[r])] =
          -at(static_cast<int>(r), free);
    basis.push_back(std::move(v));
  }
  return basis;
}

bool solve_2x2_sym(double a11, double a12, double a22, double b1, double b2,
                   double& x1, double& x2, double min_det) {
  double det = a11 * a22 - a12 * a12;
  double scale = std::max({std::fabs(a11), std::fabs(a12), std::fabs(a22)});
  if (std::fabs(det) <= min_det * (1.0 + scale * scale)) return false;
  x1 = (b1 * a22 - b2 * a12) / det;
  x2 = (b2 * a11 - b1 * a12) / det;
  return true;
}

std::vector<std::vector<double>> sample_points(const Sampling& s, int dim) {
  if (s.points < 1)
    throw ShapeError("sampling needs at least one point");
  if (s.lo >= s.hi)
    throw ShapeError("sampling box needs lo < hi");
  UniformSource rng(s.seed);
  std::vector<std::vector<double>> pts;
  pts.reserve(static_cast<std::size_t>(s.points));
  for (int i = 0; i < s.points; ++i) {
    std::vector<double> p(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) p[static_cast<std::size_t>(d)] = rng.next(s.lo, s.hi);
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace nilstruct
