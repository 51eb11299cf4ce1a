#pragma once

#include <span>
#include <vector>

#include "nilstruct/connection.hpp"

namespace nilstruct {

// Riemann tensor R^rho_{sigma mu nu}: rho the upper slot, sigma the
// argument slot, (mu, nu) the antisymmetric derivative pair,
//   R^rho_{sigma mu nu} = d_mu Gamma^rho_{nu sigma}
//                       - d_nu Gamma^rho_{mu sigma}
//                       + Gamma^rho_{mu lam} Gamma^lam_{nu sigma}
//                       - Gamma^rho_{nu lam} Gamma^lam_{mu sigma}.
struct CurvatureField {
  TensorField r;  // signature (Upper, Lower, Lower, Lower)
  int dim() const { return r.dim(); }
};

CurvatureField riemann(const ConnectionField& gamma);

// Structural residuals of a curvature field: antisymmetry in the
// derivative pair and the first Bianchi identity of the lowered tensor
// (cyclic sum over its three last slots).
struct CurvatureInvariants {
  double antisymmetry = 0.0;
  double bianchi = 0.0;
  bool passed = false;
};

CurvatureInvariants curvature_invariants(const CurvatureField& r,
                                         const TensorField& g,
                                         const Sampling& s);

// The Ricci-identity diagnostic: with f nilpotent and nabla f = 0, the
// commutator of second covariant derivatives of f must equal the standard
// curvature contraction, and R must be pure in the (upper, argument) pair.
struct RicciIdentityReport {
  bool precondition_ok = false;  // f^2 = 0 within tolerance at the samples
  double f_square = 0.0;
  double nabla_f = 0.0;
  double commutator = 0.0;  // |(nabla nabla f - swap) - (R.f - R.f)|
  ResidualReport upper_lower_purity;
  double scale = 1.0;
  double tolerance = 1e-9;
  bool passed = false;
};

RicciIdentityReport ricci_identity_residual(const ConnectionField& gamma,
                                            const TensorField& f,
                                            const Sampling& s);

enum class MetricClass { BType, KahlerType, Neither };

// Purity/hybridity classification of the curvature of a metric connection.
// For a pure metric every lower pair of the lowered tensor must be pure
// (with the one-pair-implies-all consistency rule); for a hybrid metric
// the lowered tensor is hybrid in the (lowered-upper, argument) pair while
// the mixed tensor stays pure in (upper, argument).
struct PurityClassification {
  MetricClass metric_class = MetricClass::Neither;
  ResidualReport metric_purity;
  ResidualReport metric_hybridity;
  ResidualReport lower_pairs;        // per-pair parts, purity
  ResidualReport hybrid_pair;        // Kahler branch, hybridity in (0,1)
  ResidualReport upper_lower;        // purity of R^._. in (0,1)
  bool one_pair_implies_all = true;  // B branch consistency
  bool passed = false;
};

PurityClassification classify_purity(
    const CurvatureField& r, const TensorField& g, const TensorField& f,
    const Sampling& s,
    const std::vector<std::pair<int, int>>* lower_pair_list = nullptr);

// G(x,y,v,w) = g(x,v) g(y,w) - g(x,w) g(y,v) at one point.
double evaluate_G(const TensorValue& g, std::span<const double> x,
                  std::span<const double> y, std::span<const double> v,
                  std::span<const double> w);

// G*(x,y,v,w) = G(x, fy, v, fw) = -g(x,fw) g(fy,v); both routes reported.
struct GStarResult {
  double via_G = 0.0;
  double direct = 0.0;
  double value = 0.0;
};

GStarResult evaluate_G_star(const TensorValue& g, const TensorValue& f,
                            std::span<const double> x,
                            std::span<const double> y,
                            std::span<const double> v,
                            std::span<const double> w);

// Holomorphic curvature direction {x, fx}: the G(x,fx,x,fx) value is
// -[g(x,fx)]^2; kernel vectors short-circuit, and a vanishing g(x,fx)
// marks the indefinite (hybrid-metric) branch.
enum class HolomorphicBranch { Kernel, BType, Indefinite };

struct HolomorphicDirection {
  HolomorphicBranch branch = HolomorphicBranch::Kernel;
  double g_x_fx = 0.0;
  double value = 0.0;
};

HolomorphicDirection holomorphic_direction_value(const TensorValue& g,
                                                 const TensorValue& f,
                                                 std::span<const double> x,
                                                 double tol = 1e-9);

}  // namespace nilstruct
