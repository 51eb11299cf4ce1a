#pragma once

#include <vector>

#include "nilstruct/tensor.hpp"

namespace nilstruct {

// Torsionless affine connection on a chart. Coefficients are stored as a
// symbolic (1,2) field Gamma^sigma_{alpha beta} (sigma slot first); they
// transform affinely, not tensorially, so this is deliberately not a
// TensorField alias at the API level.
struct ConnectionField {
  TensorField gamma;
  bool symmetric = true;

  ConnectionField() = default;
  explicit ConnectionField(int dim, VarTablePtr vars)
      : gamma(dim, sig_of({Slot::Upper, Slot::Lower, Slot::Lower}),
              std::move(vars)) {}

  int dim() const { return gamma.dim(); }
  const VarTablePtr& vars() const { return gamma.vars(); }
  Expression& at(int s, int a, int b) { return gamma.at({s, a, b}); }
  const Expression& at(int s, int a, int b) const { return gamma.at({s, a, b}); }
  TensorValue evaluate(std::span<const double> p) const {
    return gamma.evaluate(p);
  }

  // max |Gamma^s_{ab} - Gamma^s_{ba}| at the sample points
  double symmetry_residual(const Sampling& s) const;
};

// One-form q_i used by the affine deformation family.
using OneForm = TensorField;  // (0,1) field

// Levi-Civita coefficients of a symmetric nondegenerate metric,
// 2 Gamma^s_{ab} = g^{sl} (d_a g_{bl} + d_b g_{la} - d_l g_{ab}).
// Nondegeneracy is enforced at the sample points (SingularError).
ConnectionField christoffel(const TensorField& g, const Sampling& s);

// Purity of the coefficients toward f: contracting f into the upper slot,
// the first lower slot or the second lower slot must agree. Three pairwise
// residuals are reported; the check passes only when all three do.
ResidualReport connection_purity(const ConnectionField& gamma,
                                 const TensorField& f, const Sampling& s);

// Covariant derivative; the derivative slot is prepended as a new lower
// slot. Sign convention: +Gamma for every upper slot of T, -Gamma for
// every lower slot.
TensorField covariant_derivative(const TensorField& t,
                                 const ConnectionField& gamma);

// max |nabla g| at the sample points (metric-compatibility diagnostic).
double metricity_residual(const ConnectionField& gamma, const TensorField& g,
                          const Sampling& s);

// Certificate for the integrability lemma: reports the residuals of
// (a) nabla f, (b) coefficient purity, (c) the coordinate partials of f,
// and whether the implication (a) and (b) => (c) held on the samples.
struct NablaFReport {
  double nabla_f = 0.0;
  ResidualReport purity;
  double partial_f = 0.0;
  bool partial_f_syntactically_zero = false;
  double scale = 1.0;
  double tolerance = 1e-9;
  bool implication_holds = true;
  bool passed = false;  // all three residuals small
};

NablaFReport nabla_f_check(const ConnectionField& gamma, const TensorField& f,
                           const Sampling& s);

// Complete lift of a base connection (dim n) to the tangent-like chart of
// dim 2n:
//   hat^h_{ik}        = Gamma^h_{ik}
//   hat^{n+h}_{ik}    = z^{n+s} d_s Gamma^h_{ik}
//   hat^{n+h}_{i,n+k} = hat^{n+h}_{n+i,k} = Gamma^h_{ik}
// and every other coefficient zero. `lifted_vars` must extend the base
// coordinate table.
ConnectionField complete_lift(const ConnectionField& base,
                              VarTablePtr lifted_vars);

// Complete lift of a base metric to the dim-2n chart:
//   G_{ik} = z^{n+s} d_s g_{ik},  G_{i,n+k} = G_{n+i,k} = g_{ik},
//   G_{n+i,n+k} = 0.
// Its Levi-Civita connection coincides with complete_lift(christoffel(g)).
TensorField complete_lift_metric(const TensorField& base_g,
                                 VarTablePtr lifted_vars);

// g + g-tilde; symmetric whenever g is pure. With a sampling argument the
// sum's determinant is checked at the sample points.
TensorField metric_plus_tilde(const TensorField& g, const TensorField& f,
                              const Sampling* check = nullptr);

// Purity scan of d(h g) toward f over the slot pairs (0,1), (0,2), (1,2)
// of the (0,3) partials tensor; the derivative slot is slot 0. Reports the
// gradient of the conformal factor alongside.
struct ConformalReport {
  ResidualReport purity;          // of d(h g)
  double h_gradient_max = 0.0;    // max |d_s h| at the samples
  bool h_constant = false;        // gradient below tolerance everywhere
};

ConformalReport conformal_purity_scan(const TensorField& g,
                                      const Expression& h,
                                      const TensorField& f, const Sampling& s);

// Affine deformation tensor of the one-form q:
//   T^a_{ik} = delta^a_i qt_k + f^a_i q_k + delta^a_k qt_i + f^a_k q_i
// with qt_i = q_s f^s_i. Symmetric in the lower slots and pure toward f.
TensorField deformation_tensor(const OneForm& q, const TensorField& f);

// Gamma + T, componentwise.
ConnectionField deform(const ConnectionField& gamma, const TensorField& t);

}  // namespace nilstruct
