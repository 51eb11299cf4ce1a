#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "nilstruct/connection.hpp"

namespace nilstruct {

// One trajectory sample of the second-order systems integrated here.
struct CurveState {
  double t = 0.0;
  std::vector<double> z;
  std::vector<double> zdot;
};

// Scalar coefficients a(t), b(t) of the holomorphically-planar forcing;
// expressions in the single variable t.
struct PhForcing {
  Expression a;
  Expression b;
};

// Classical fixed-step 4th-order integration of
//   zddot^a = -Gamma^a_{lb} zdot^l zdot^b
// from (z0, v0) to t_end. The step is adjusted to divide t_end evenly.
std::vector<CurveState> integrate_geodesic(const ConnectionField& gamma,
                                           std::span<const double> z0,
                                           std::span<const double> v0,
                                           double t_end, double step);

// Same stepper with the planar forcing a(t) zdot + b(t) f(zdot) added;
// a = b = 0 reproduces integrate_geodesic bitwise.
std::vector<CurveState> integrate_ph_curve(const ConnectionField& gamma,
                                           const TensorField& f,
                                           std::span<const double> z0,
                                           std::span<const double> v0,
                                           const PhForcing& forcing,
                                           double t_end, double step);

// Parallel transport of w0 along the sampled curve (one RK4 step per
// sample interval, cubic Hermite reconstruction between nodes). Returns
// one vector per input sample.
std::vector<std::vector<double>> parallel_transport(
    const ConnectionField& gamma, const std::vector<CurveState>& curve,
    std::span<const double> w0);

// max |g(zdot, zdot)(t) - g(zdot, zdot)(0)| along the samples.
double energy_drift(const TensorField& g, const std::vector<CurveState>& c);

// Step-halving Richardson estimate of the local error: re-steps from
// every `stride`-th stored sample once with h and twice with h/2 and
// returns the largest state gap. Pass the forcing used to produce the
// trajectory (or nullptr for a geodesic).
double richardson_local_error(const ConnectionField& gamma,
                              const TensorField* f, const PhForcing* forcing,
                              const std::vector<CurveState>& curve,
                              std::size_t stride = 100);

// t, z1..zdim, zdot1..zdotdim per row.
void write_trajectory_csv(std::ostream& os, const std::vector<CurveState>& c);

struct ClassifyOptions {
  double fit_tol = 1e-6;     // orthogonal residual threshold (relative)
  double kernel_tol = 1e-8;  // |f zdot| threshold (relative)
};

// Per-sample least-squares fit of the covariant acceleration onto
// span{zdot, f zdot}. Acceleration is reconstructed from the stored
// velocities by 4th-order central differences, so the report is
// independent of the integrator's right-hand side.
struct SampleFit {
  double t = 0.0;
  double a = 0.0;
  double b = 0.0;
  double orth_residual = 0.0;  // distance to span{zdot, f zdot}
  double dir_residual = 0.0;   // distance to span{zdot} alone
  double accel_norm = 0.0;
  bool kernel = false;         // f zdot below threshold
};

struct CurveClassification {
  std::vector<SampleFit> samples;
  double max_orth_residual = 0.0;
  double max_dir_residual = 0.0;
  double max_accel = 0.0;
  double velocity_scale = 0.0;  // max |zdot|
  double base_drift = 0.0;      // drift of the first n coordinates
  bool degenerate = false;      // zdot vanished at a sample; no claims made
  bool is_ph = false;
  bool is_geodesic = false;     // value-level: covariant acceleration ~ 0
  bool is_pregeodesic = false;  // direction-level: acceleration parallel zdot
  bool kernel_confined = false;
  bool special_plane = false;   // kernel confined and base block frozen
};

CurveClassification classify_curve(const ConnectionField& gamma,
                                   const TensorField& f, int n_base,
                                   const std::vector<CurveState>& curve,
                                   const ClassifyOptions& opt = {});

// Two-parameter holomorphic surface: base functions z^i(u) and fiber
// functions z^{n+i}(u,v); the canonical construction uses v dz^i/du.
struct HolomorphicSurface {
  int n = 0;
  VarTablePtr uv;  // {u, v}
  std::vector<Expression> base;
  std::vector<Expression> fiber;
};

HolomorphicSurface build_surface(const std::vector<Expression>& base_of_u);

// Residuals of the holomorphic-pair conditions dp/du = dq/dv, dp/dv = 0
// over a (u,v) sample box.
struct PairCheck {
  double du_dv_residual = 0.0;
  double pv_residual = 0.0;
  bool passed = false;
};

PairCheck holomorphic_pair_check(const Expression& p, const Expression& q,
                                 const Sampling& s);
PairCheck surface_pair_check(const HolomorphicSurface& surf, const Sampling& s);

// Substitutes u = h(u), v = t(u,v) subject to dh/du = dt/dv; the result
// must still pass the pair check. A violated constraint or a vanishing
// dh/du raises Error/SingularError.
struct ReparamResult {
  HolomorphicSurface surface;
  double constraint_residual = 0.0;
  double min_dh_du = 0.0;
  PairCheck pair;
};

ReparamResult reparametrize_surface(const HolomorphicSurface& surf,
                                    const Expression& h, const Expression& t,
                                    const Sampling& s);

// Certificate that the u-lines of the canonical surface over a geodesic
// base curve are PH-curves for the lifted connection: their f-image
// velocity is parallel-transported, delta(f beta-dot)/du = 0.
struct Theorem6Report {
  double base_geodesic_residual = 0.0;  // precondition
  double gamma_identity_residual = 0.0; // f beta-dot vs direct fiber velocity
  double transport_residual = 0.0;      // delta gamma-dot / du
  int lines_checked = 0;
  bool passed = false;
  double tolerance = 1e-5;
};

Theorem6Report theorem6_check(const ConnectionField& base_gamma,
                              const ConnectionField& lifted_gamma,
                              const TensorField& lifted_f,
                              const std::vector<CurveState>& base_curve,
                              std::span<const double> v_values,
                              double tolerance = 1e-5);

// Re-classifies a PH trajectory against the deformed connection
// Gamma + T(q) and compares the fitted coefficients with the predicted
// shift a + 2 qt(zdot), b + 2 q(zdot).
struct Theorem7Report {
  double a_shift_mismatch = 0.0;
  double b_shift_mismatch = 0.0;
  double orth_residual = 0.0;  // under the deformed connection
  int samples_used = 0;
  bool passed = false;
  double tolerance = 1e-4;
};

Theorem7Report theorem7_ph_transform(const ConnectionField& gamma,
                                     const OneForm& q, const TensorField& f,
                                     int n_base,
                                     const std::vector<CurveState>& curve,
                                     double tolerance = 1e-4);

}  // namespace nilstruct
