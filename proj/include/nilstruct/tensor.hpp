#pragma once

#include <span>
#include <string>
#include <vector>

#include "nilstruct/expr.hpp"
#include "nilstruct/sampling.hpp"

namespace nilstruct {

enum class Slot { Upper, Lower };

// Ordered variance signature; one entry per tensor slot.
using Signature = std::vector<Slot>;

inline Signature sig_of(std::initializer_list<Slot> s) { return Signature(s); }

// Number of components of a rank-`rank` tensor in dimension `dim`.
std::size_t component_count(int dim, std::size_t rank);

// Row-major flattening of a multi-index.
std::size_t flat_index(int dim, std::span<const int> idx);

// Odometer step over multi-indices; returns false after the last one.
bool next_index(std::vector<int>& idx, int dim);

// Pointwise (numeric) tensor.
struct TensorValue {
  int dim = 0;
  Signature sig;
  std::vector<double> comp;

  TensorValue() = default;
  TensorValue(int dim, Signature sig);

  double& at(std::span<const int> idx);
  double at(std::span<const int> idx) const;
  double& at(std::initializer_list<int> idx);
  double at(std::initializer_list<int> idx) const;

  std::size_t rank() const { return sig.size(); }
};

double max_abs(const TensorValue& v);
double max_abs_diff(const TensorValue& a, const TensorValue& b);

// Dense field of symbolic components over a chart.
class TensorField {
 public:
  TensorField() = default;
  TensorField(int dim, Signature sig, VarTablePtr vars);  // zero field

  int dim() const { return dim_; }
  const Signature& sig() const { return sig_; }
  std::size_t rank() const { return sig_.size(); }
  const VarTablePtr& vars() const { return vars_; }

  Expression& at(std::span<const int> idx);
  const Expression& at(std::span<const int> idx) const;
  Expression& at(std::initializer_list<int> idx);
  const Expression& at(std::initializer_list<int> idx) const;

  TensorValue evaluate(std::span<const double> point) const;

  // True when every component is syntactically constant (all coordinate
  // partials vanish identically).
  bool is_constant() const;

  const std::vector<Expression>& components() const { return comp_; }
  std::vector<Expression>& components() { return comp_; }

 private:
  int dim_ = 0;
  Signature sig_;
  std::vector<Expression> comp_;
  VarTablePtr vars_;
};

// d+1-rank field of coordinate partials; the derivative slot is prepended
// as a new lower slot.
TensorField coordinate_partials(const TensorField& t);

// Standard contraction of one upper against one lower slot.
TensorValue contract(const TensorValue& t, int slot_a, int slot_b);
TensorField contract(const TensorField& t, int slot_a, int slot_b);

// Contracts the structure tensor f (a (1,1) value) into one slot of T:
// for a lower slot the upper index of f is summed into it, for an upper
// slot the lower index of f. The signature of T is unchanged.
TensorValue apply_f_to_slot(const TensorValue& t, const TensorValue& f,
                            int slot);

// Residual summary for a sampled identity check. `passed` holds exactly
// when max_residual <= tolerance * scale with scale = 1 + max |T| over the
// samples (relative tolerance contract).
struct ResidualReport {
  std::string name;
  double max_residual = 0.0;
  double scale = 1.0;
  double tolerance = 1e-9;
  int points = 0;
  bool passed = false;
  std::vector<std::pair<std::string, double>> parts;

  void finalize() { passed = max_residual <= tolerance * scale; }
};

// Purity of T with respect to f in the slot pair (a, b): contracting f
// into either slot gives the same tensor. Certified by sampling.
ResidualReport is_pure(const TensorField& t, int slot_a, int slot_b,
                       const TensorField& f, const Sampling& s);

// Hybridity: the two contractions are opposite, their sum vanishes.
ResidualReport is_hybrid(const TensorField& t, int slot_a, int slot_b,
                         const TensorField& f, const Sampling& s);

// Purity (sign = -1) or hybridity (sign = +1) over several slot pairs at
// one shared set of sample points; one part entry per pair, max_residual
// across all of them.
ResidualReport purity_pairs(const TensorField& t,
                            const std::vector<std::pair<int, int>>& pairs,
                            const TensorField& f, const Sampling& s,
                            double sign = -1.0);

// g-tilde := g_{lambda beta} f^lambda_alpha, i.e. f applied to the first
// slot of the metric. Symmetric exactly when g is pure, antisymmetric
// exactly when g is hybrid.
TensorField metric_tilde(const TensorField& g, const TensorField& f);

// Contract the metric (or inverse metric) into `slot`, turning an upper
// slot into a lower one or vice versa. The caller passes g_{ab} to lower
// and g^{ab} to raise; mismatched kinds raise ShapeError.
TensorField lower_index(const TensorField& t, const TensorField& metric,
                        int slot);
TensorField raise_index(const TensorField& t, const TensorField& inverse_metric,
                        int slot);

// Symbolic determinant of a (0,2) or (2,0) field, by minor expansion.
Expression determinant_field(const TensorField& g);

// Adjugate of a (0,2) field as a (2,0) field: adj^{ab} g_{bc} = det * delta.
TensorField adjugate_field(const TensorField& g);

// Symbolic inverse of a symmetric (0,2) metric as a (2,0) field
// (adjugate over determinant). When `check` is given, |det g| >= 1e-12 is
// enforced at its sample points; failures raise SingularError with the
// offending point.
TensorField inverse_metric_field(const TensorField& g,
                                 const Sampling* check = nullptr);

// Numeric symmetry residual of a (0,2) value.
double symmetry_residual(const TensorValue& g);

}  // namespace nilstruct
