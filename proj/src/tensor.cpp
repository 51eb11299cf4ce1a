#include "nilstruct/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <optional>

#include "nilstruct/error.hpp"
#include "nilstruct/linalg.hpp"

namespace nilstruct {

std::size_t component_count(int dim, std::size_t rank) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < rank; ++i) n *= static_cast<std::size_t>(dim);
  return n;
}

std::size_t flat_index(int dim, std::span<const int> idx) {
  std::size_t flat = 0;
  for (int i : idx) flat = flat * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i);
  return flat;
}

bool next_index(std::vector<int>& idx, int dim) {
  for (std::size_t i = idx.size(); i-- > 0;) {
    if (++idx[i] < dim) return true;
    idx[i] = 0;
  }
  return false;
}

TensorValue::TensorValue(int dim_, Signature sig_)
    : dim(dim_), sig(std::move(sig_)),
      comp(component_count(dim_, sig.size()), 0.0) {}

double& TensorValue::at(std::span<const int> idx) {
  return comp[flat_index(dim, idx)];
}
double TensorValue::at(std::span<const int> idx) const {
  return comp[flat_index(dim, idx)];
}
double& TensorValue::at(std::initializer_list<int> idx) {
  return at(std::span<const int>(idx.begin(), idx.size()));
}
double TensorValue::at(std::initializer_list<int> idx) const {
  return at(std::span<const int>(idx.begin(), idx.size()));
}

double max_abs(const TensorValue& v) {
  double m = 0.0;
  for (double x : v.comp) m = std::max(m, std::fabs(x));
  return m;
}

double max_abs_diff(const TensorValue& a, const TensorValue& b) {
  if (a.comp.size() != b.comp.size())
    throw ShapeError("tensor shapes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.comp.size(); ++i)
    m = std::max(m, std::fabs(a.comp[i] - b.comp[i]));
  return m;
}

TensorField::TensorField(int dim, Signature sig, VarTablePtr vars)
    : dim_(dim), sig_(std::move(sig)),
      comp_(component_count(dim, sig_.size()),
            Expression::number(0.0, vars)),
      vars_(std::move(vars)) {}

Expression& TensorField::at(std::span<const int> idx) {
  return comp_[flat_index(dim_, idx)];
}
const Expression& TensorField::at(std::span<const int> idx) const {
  return comp_[flat_index(dim_, idx)];
}
Expression& TensorField::at(std::initializer_list<int> idx) {
  return at(std::span<const int>(idx.begin(), idx.size()));
}
const Expression& TensorField::at(std::initializer_list<int> idx) const {
  return at(std::span<const int>(idx.begin(), idx.size()));
}

TensorValue TensorField::evaluate(std::span<const double> point) const {
  TensorValue v(dim_, sig_);
  for (std::size_t i = 0; i < comp_.size(); ++i)
    v.comp[i] = comp_[i].evaluate(point);
  return v;
}

bool TensorField::is_constant() const {
  for (const Expression& e : comp_)
    if (!e.is_constant()) return false;
  return true;
}

TensorField coordinate_partials(const TensorField& t) {
  Signature sig;
  sig.reserve(t.rank() + 1);
  sig.push_back(Slot::Lower);
  sig.insert(sig.end(), t.sig().begin(), t.sig().end());
  TensorField out(t.dim(), std::move(sig), t.vars());

  const VarTable& vars = *t.vars();
  std::vector<int> idx(t.rank(), 0);
  if (t.rank() == 0) {
    for (int s = 0; s < t.dim(); ++s) {
      int oidx[1] = {s};
      out.at(std::span<const int>(oidx, 1)) =
          t.components()[0].derivative(vars[static_cast<std::size_t>(s)]);
    }
    return out;
  }
  do {
    for (int s = 0; s < t.dim(); ++s) {
      std::vector<int> oidx;
      oidx.reserve(idx.size() + 1);
      oidx.push_back(s);
      oidx.insert(oidx.end(), idx.begin(), idx.end());
      out.at(oidx) = t.at(idx).derivative(vars[static_cast<std::size_t>(s)]);
    }
  } while (next_index(idx, t.dim()));
  return out;
}

namespace {

void check_contraction_slots(const Signature& sig, int slot_a, int slot_b) {
  if (slot_a == slot_b || slot_a < 0 || slot_b < 0 ||
      static_cast<std::size_t>(slot_a) >= sig.size() ||
      static_cast<std::size_t>(slot_b) >= sig.size())
    throw ShapeError("contraction slots out of range");
  if (sig[static_cast<std::size_t>(slot_a)] ==
      sig[static_cast<std::size_t>(slot_b)])
    throw ShapeError("contraction requires one upper and one lower slot");
}

Signature drop_slots(const Signature& sig, int slot_a, int slot_b) {
  Signature out;
  for (std::size_t i = 0; i < sig.size(); ++i)
    if (static_cast<int>(i) != slot_a && static_cast<int>(i) != slot_b)
      out.push_back(sig[i]);
  return out;
}

}  // namespace

TensorValue contract(const TensorValue& t, int slot_a, int slot_b) {
  check_contraction_slots(t.sig, slot_a, slot_b);
  TensorValue out(t.dim, drop_slots(t.sig, slot_a, slot_b));

  std::vector<int> oidx(out.rank(), 0);
  std::vector<int> tidx(t.rank(), 0);
  bool more = true;
  while (more) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < t.rank(); ++i)
      if (static_cast<int>(i) != slot_a && static_cast<int>(i) != slot_b)
        tidx[i] = oidx[k++];
    double sum = 0.0;
    for (int lam = 0; lam < t.dim; ++lam) {
      tidx[static_cast<std::size_t>(slot_a)] = lam;
      tidx[static_cast<std::size_t>(slot_b)] = lam;
      sum += t.at(tidx);
    }
    out.at(oidx) = sum;
    more = out.rank() > 0 && next_index(oidx, t.dim);
    if (out.rank() == 0) break;
  }
  return out;
}

TensorField contract(const TensorField& t, int slot_a, int slot_b) {
  check_contraction_slots(t.sig(), slot_a, slot_b);
  TensorField out(t.dim(), drop_slots(t.sig(), slot_a, slot_b), t.vars());

  std::vector<int> oidx(out.rank(), 0);
  std::vector<int> tidx(t.rank(), 0);
  bool more = true;
  while (more) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < t.rank(); ++i)
      if (static_cast<int>(i) != slot_a && static_cast<int>(i) != slot_b)
        tidx[i] = oidx[k++];
    Expression sum = Expression::number(0.0, t.vars());
    for (int lam = 0; lam < t.dim(); ++lam) {
      tidx[static_cast<std::size_t>(slot_a)] = lam;
      tidx[static_cast<std::size_t>(slot_b)] = lam;
      sum = sum + t.at(tidx);
    }
    out.at(oidx) = sum;
    more = out.rank() > 0 && next_index(oidx, t.dim());
    if (out.rank() == 0) break;
  }
  return out;
}

TensorValue apply_f_to_slot(const TensorValue& t, const TensorValue& f,
                            int slot) {
  if (f.rank() != 2 || f.sig[0] != Slot::Upper || f.sig[1] != Slot::Lower)
    throw ShapeError("structure tensor must be a (1,1) value");
  if (f.dim != t.dim) throw ShapeError("structure tensor dimension mismatch");
  if (slot < 0 || static_cast<std::size_t>(slot) >= t.rank())
    throw ShapeError("slot out of range");

  TensorValue out(t.dim, t.sig);
  bool lower = t.sig[static_cast<std::size_t>(slot)] == Slot::Lower;

  std::vector<int> oidx(t.rank(), 0);
  std::vector<int> tidx(t.rank(), 0);
  do {
    tidx = oidx;
    double sum = 0.0;
    int a = oidx[static_cast<std::size_t>(slot)];
    for (int lam = 0; lam < t.dim; ++lam) {
      tidx[static_cast<std::size_t>(slot)] = lam;
      // lower slot: T_{...lam...} f^lam_a ; upper slot: T^{...lam...} f^a_lam
      double ff = lower ? f.at({lam, a}) : f.at({a, lam});
      sum += t.at(tidx) * ff;
    }
    out.at(oidx) = sum;
  } while (next_index(oidx, t.dim));
  return out;
}

namespace {

ResidualReport purity_residual(const TensorField& t, int slot_a, int slot_b,
                               const TensorField& f, const Sampling& s,
                               double sign, const char* name) {
  if (slot_a < 0 || slot_b < 0 ||
      static_cast<std::size_t>(slot_a) >= t.rank() ||
      static_cast<std::size_t>(slot_b) >= t.rank())
    throw ShapeError("slot pair out of range");

  ResidualReport rep;
  rep.name = name;
  rep.tolerance = s.tolerance;
  double max_t = 0.0;
  auto points = sample_points(s, t.dim());
  for (const auto& p : points) {
    TensorValue tv = t.evaluate(p);
    TensorValue fv = f.evaluate(p);
    TensorValue a = apply_f_to_slot(tv, fv, slot_a);
    TensorValue b = apply_f_to_slot(tv, fv, slot_b);
    double r = 0.0;
    for (std::size_t i = 0; i < a.comp.size(); ++i)
      r = std::max(r, std::fabs(a.comp[i] + sign * b.comp[i]));
    rep.max_residual = std::max(rep.max_residual, r);
    max_t = std::max(max_t, max_abs(tv));
  }
  rep.points = static_cast<int>(points.size());
  rep.scale = 1.0 + max_t;
  rep.finalize();
  return rep;
}

}  // namespace

ResidualReport is_pure(const TensorField& t, int slot_a, int slot_b,
                       const TensorField& f, const Sampling& s) {
  return purity_residual(t, slot_a, slot_b, f, s, -1.0, "pure");
}

ResidualReport is_hybrid(const TensorField& t, int slot_a, int slot_b,
                         const TensorField& f, const Sampling& s) {
  return purity_residual(t, slot_a, slot_b, f, s, +1.0, "hybrid");
}

ResidualReport purity_pairs(const TensorField& t,
                            const std::vector<std::pair<int, int>>& pairs,
                            const TensorField& f, const Sampling& s,
                            double sign) {
  ResidualReport rep;
  rep.name = sign < 0 ? "pure" : "hybrid";
  rep.tolerance = s.tolerance;
  for (const auto& [a, b] : pairs)
    rep.parts.emplace_back(std::to_string(a) + "-" + std::to_string(b), 0.0);

  double max_t = 0.0;
  auto points = sample_points(s, t.dim());
  for (const auto& p : points) {
    TensorValue tv = t.evaluate(p);
    TensorValue fv = f.evaluate(p);
    max_t = std::max(max_t, max_abs(tv));
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      TensorValue a = apply_f_to_slot(tv, fv, pairs[k].first);
      TensorValue b = apply_f_to_slot(tv, fv, pairs[k].second);
      double r = 0.0;
      for (std::size_t i = 0; i < a.comp.size(); ++i)
        r = std::max(r, std::fabs(a.comp[i] + sign * b.comp[i]));
      rep.parts[k].second = std::max(rep.parts[k].second, r);
      rep.max_residual = std::max(rep.max_residual, r);
    }
  }
  rep.points = static_cast<int>(points.size());
  rep.scale = 1.0 + max_t;
  rep.finalize();
  return rep;
}

TensorField metric_tilde(const TensorField& g, const TensorField& f) {
  if (g.rank() != 2 || f.rank() != 2)
    throw ShapeError("metric_tilde expects rank-2 fields");
  TensorField out(g.dim(), g.sig(), g.vars());
  for (int a = 0; a < g.dim(); ++a)
    for (int b = 0; b < g.dim(); ++b) {
      Expression sum = Expression::number(0.0, g.vars());
      for (int lam = 0; lam < g.dim(); ++lam)
        sum = sum + g.at({lam, b}) * f.at({lam, a});
      out.at({a, b}) = sum;
    }
  return out;
}

namespace {

TensorField metric_contract(const TensorField& t, const TensorField& metric,
                            int slot, Slot required, Slot produced,
                            const char* what) {
  if (slot < 0 || static_cast<std::size_t>(slot) >= t.rank())
    throw ShapeError("slot out of range");
  if (t.sig()[static_cast<std::size_t>(slot)] != required)
    throw ShapeError(std::string(what) + ": slot has the wrong kind");
  if (metric.dim() != t.dim() || metric.rank() != 2)
    throw ShapeError(std::string(what) + ": metric shape mismatch");

  Signature sig = t.sig();
  sig[static_cast<std::size_t>(slot)] = produced;
  TensorField out(t.dim(), sig, t.vars());

  std::vector<int> oidx(t.rank(), 0);
  std::vector<int> tidx(t.rank(), 0);
  do {
    tidx = oidx;
    Expression sum = Expression::number(0.0, t.vars());
    int a = oidx[static_cast<std::size_t>(slot)];
    for (int lam = 0; lam < t.dim(); ++lam) {
      tidx[static_cast<std::size_t>(slot)] = lam;
      sum = sum + metric.at({a, lam}) * t.at(tidx);
    }
    out.at(oidx) = sum;
  } while (next_index(oidx, t.dim()));
  return out;
}

}  // namespace

TensorField lower_index(const TensorField& t, const TensorField& metric,
                        int slot) {
  if (metric.sig() != sig_of({Slot::Lower, Slot::Lower}))
    throw ShapeError("lower_index needs the (0,2) metric");
  return metric_contract(t, metric, slot, Slot::Upper, Slot::Lower,
                         "lower_index");
}

TensorField raise_index(const TensorField& t, const TensorField& inverse_metric,
                        int slot) {
  if (inverse_metric.sig() != sig_of({Slot::Upper, Slot::Upper}))
    throw ShapeError("raise_index needs the (2,0) inverse metric");
  return metric_contract(t, inverse_metric, slot, Slot::Lower, Slot::Upper,
                         "raise_index");
}

namespace {

// Determinant of the square expression matrix by expansion along the first
// remaining row, memoized over the set of remaining columns.
Expression minor_det(const std::vector<Expression>& m, int dim,
                     std::uint32_t mask,
                     std::vector<std::optional<Expression>>& memo,
                     const VarTablePtr& vars) {
  if (mask == 0) return Expression::number(1.0, vars);
  if (memo[mask].has_value()) return *memo[mask];
  int row = dim - __builtin_popcount(mask);
  Expression sum = Expression::number(0.0, vars);
  int parity = 0;
  for (int c = 0; c < dim; ++c) {
    if (!(mask & (1u << c))) continue;
    const Expression& entry = m[static_cast<std::size_t>(row * dim + c)];
    if (!entry.is_zero()) {
      Expression sub = minor_det(m, dim, mask & ~(1u << c), memo, vars);
      Expression term = entry * sub;
      sum = (parity % 2 == 0) ? sum + term : sum - term;
    }
    ++parity;
  }
  memo[mask] = sum;
  return sum;
}

}  // namespace

Expression determinant_field(const TensorField& g) {
  if (g.rank() != 2) throw ShapeError("determinant of a rank-2 field only");
  int dim = g.dim();
  if (dim > 12) throw ShapeError("symbolic determinant limited to dim <= 12");
  std::vector<std::optional<Expression>> memo(1u << dim);
  std::uint32_t full = (dim == 32) ? ~0u : ((1u << dim) - 1u);
  return minor_det(g.components(), dim, full, memo, g.vars());
}

TensorField adjugate_field(const TensorField& g) {
  if (g.rank() != 2)
    throw ShapeError("adjugate_field expects a rank-2 field");
  int dim = g.dim();
  TensorField adj(dim, sig_of({Slot::Upper, Slot::Upper}), g.vars());
  // adj^{ji} = cofactor_{ij}; g symmetric makes adj symmetric too, the
  // transpose is kept for correctness on general input
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      TensorField sub(dim - 1, sig_of({Slot::Lower, Slot::Lower}), g.vars());
      for (int r = 0, rr = 0; r < dim; ++r) {
        if (r == i) continue;
        for (int c = 0, cc = 0; c < dim; ++c) {
          if (c == j) continue;
          sub.at({rr, cc}) = g.at({r, c});
          ++cc;
        }
        ++rr;
      }
      Expression cof = (dim == 1) ? Expression::number(1.0, g.vars())
                                  : determinant_field(sub);
      if ((i + j) % 2 == 1) cof = -cof;
      adj.at({j, i}) = cof;
    }
  }
  return adj;
}

TensorField inverse_metric_field(const TensorField& g, const Sampling* check) {
  if (g.rank() != 2 || g.sig() != sig_of({Slot::Lower, Slot::Lower}))
    throw ShapeError("inverse_metric_field expects a (0,2) metric");
  int dim = g.dim();
  Expression det = determinant_field(g);

  if (check != nullptr) {
    for (const auto& p : sample_points(*check, dim)) {
      double d = det.evaluate(p);
      if (std::fabs(d) < 1e-12)
        throw SingularError("metric determinant below 1e-12", p);
    }
  }

  TensorField inv = adjugate_field(g);
  for (Expression& e : inv.components()) e = e / det;
  return inv;
}

double symmetry_residual(const TensorValue& g) {
  if (g.rank() != 2) throw ShapeError("symmetry_residual expects rank 2");
  double r = 0.0;
  for (int a = 0; a < g.dim; ++a)
    for (int b = a + 1; b < g.dim; ++b)
      r = std::max(r, std::fabs(g.at({a, b}) - g.at({b, a})));
  return r;
}

}  // namespace nilstruct
