#include "nilstruct/curves.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>

#include "nilstruct/error.hpp"
#include "nilstruct/linalg.hpp"

namespace nilstruct {

namespace {

// Evaluation cache for connection coefficients: syntactic zeros are
// skipped, which matters inside the stepper loops.
class ConnectionEvaluator {
 public:
  explicit ConnectionEvaluator(const ConnectionField& gamma)
      : dim_(gamma.dim()) {
    const auto& comp = gamma.gamma.components();
    for (std::size_t i = 0; i < comp.size(); ++i)
      if (!comp[i].is_zero()) nonzero_.emplace_back(i, comp[i]);
  }

  int dim() const { return dim_; }

  // buffer is dim^3, flat (sigma, a, b) row-major
  void eval_into(std::span<const double> z, std::vector<double>& buf) const {
    buf.assign(static_cast<std::size_t>(dim_ * dim_ * dim_), 0.0);
    for (const auto& [idx, e] : nonzero_) buf[idx] = e.evaluate(z);
  }

  // contraction -Gamma^a(x, y) into out
  void quadratic_into(std::span<const double> gamma_buf,
                      std::span<const double> x, std::span<const double> y,
                      std::span<double> out) const {
    for (int a = 0; a < dim_; ++a) {
      double sum = 0.0;
      const double* row =
          gamma_buf.data() + static_cast<std::size_t>(a * dim_ * dim_);
      for (int l = 0; l < dim_; ++l) {
        double xl = x[(std::size_t)l];
        if (xl == 0.0) continue;
        for (int b = 0; b < dim_; ++b)
          sum += row[l * dim_ + b] * xl * y[(std::size_t)b];
      }
      out[(std::size_t)a] = -sum;
    }
  }

 private:
  int dim_;
  std::vector<std::pair<std::size_t, Expression>> nonzero_;
};

using Rhs = std::function<void(double, std::span<const double>,
                               std::span<double>)>;

void rk4_step(const Rhs& rhs, double t, double h, std::vector<double>& y,
              std::vector<double>& k1, std::vector<double>& k2,
              std::vector<double>& k3, std::vector<double>& k4,
              std::vector<double>& tmp) {
  std::size_t n = y.size();
  rhs(t, y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  rhs(t + 0.5 * h, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  rhs(t + 0.5 * h, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  rhs(t + h, tmp, k4);
  for (std::size_t i = 0; i < n; ++i)
    y[i] += h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
}

// The z'' = -Gamma(z', z') (+ optional planar forcing) system in first-
// order form, shared by the integrators and the Richardson estimator.
class SecondOrderOde {
 public:
  SecondOrderOde(const ConnectionField& gamma, const TensorField* f,
                 const PhForcing* forcing)
      : ev_(gamma), dim_(gamma.dim()), f_(f), forcing_(forcing),
        accel_(static_cast<std::size_t>(gamma.dim())) {
    forced_ = forcing != nullptr &&
              !(forcing->a.is_zero() && forcing->b.is_zero());
    f_const_ = f != nullptr && f->is_constant();
    if (forced_ && f_const_)
      f_cached_ = f->evaluate(
          std::vector<double>(static_cast<std::size_t>(dim_), 0.0));
  }

  void rhs(double t, std::span<const double> y, std::span<double> dy) {
    std::span<const double> z = y.subspan(0, (std::size_t)dim_);
    std::span<const double> v = y.subspan((std::size_t)dim_, (std::size_t)dim_);
    try {
      ev_.eval_into(z, gbuf_);
      ev_.quadratic_into(gbuf_, v, v, accel_);
      if (forced_) {
        double at = forcing_->a.evaluate(std::span<const double>(&t, 1));
        double bt = forcing_->b.evaluate(std::span<const double>(&t, 1));
        const TensorValue& fv = f_const_ ? f_cached_ : f_->evaluate(z);
        for (int a = 0; a < dim_; ++a) {
          double fz = 0.0;
          for (int b = 0; b < dim_; ++b)
            fz += fv.at({a, b}) * v[(std::size_t)b];
          accel_[(std::size_t)a] += at * v[(std::size_t)a] + bt * fz;
        }
      }
    } catch (const EvalError& e) {
      throw EvalError(std::string(e.what()) + " while integrating at t = " +
                          std::to_string(t),
                      e.subexpression());
    }
    for (int i = 0; i < dim_; ++i) {
      dy[(std::size_t)i] = v[(std::size_t)i];
      dy[(std::size_t)(dim_ + i)] = accel_[(std::size_t)i];
    }
  }

  Rhs as_rhs() {
    return [this](double t, std::span<const double> y, std::span<double> dy) {
      rhs(t, y, dy);
    };
  }

 private:
  ConnectionEvaluator ev_;
  int dim_;
  const TensorField* f_;
  const PhForcing* forcing_;
  bool forced_ = false;
  bool f_const_ = false;
  TensorValue f_cached_;
  std::vector<double> gbuf_;
  std::vector<double> accel_;
};

std::vector<CurveState> integrate_second_order(
    const ConnectionField& gamma, const TensorField* f,
    std::span<const double> z0, std::span<const double> v0,
    const PhForcing* forcing, double t_end, double step) {
  int dim = gamma.dim();
  if (static_cast<int>(z0.size()) != dim || static_cast<int>(v0.size()) != dim)
    throw ShapeError("initial state does not match the chart dimension");
  if (step <= 0.0 || t_end <= 0.0)
    throw ShapeError("integration requires positive step and t_end");

  SecondOrderOde ode(gamma, f, forcing);
  Rhs rhs = ode.as_rhs();

  long steps = std::lround(t_end / step);
  if (steps < 1) steps = 1;
  double h = t_end / static_cast<double>(steps);

  std::vector<double> y;
  y.insert(y.end(), z0.begin(), z0.end());
  y.insert(y.end(), v0.begin(), v0.end());

  std::vector<CurveState> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  auto record = [&](double t) {
    CurveState st;
    st.t = t;
    st.z.assign(y.begin(), y.begin() + dim);
    st.zdot.assign(y.begin() + dim, y.end());
    out.push_back(std::move(st));
  };
  record(0.0);

  std::vector<double> k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()),
      tmp(y.size());
  for (long i = 0; i < steps; ++i) {
    double t = static_cast<double>(i) * h;
    rk4_step(rhs, t, h, y, k1, k2, k3, k4, tmp);
    for (double v : y)
      if (!std::isfinite(v))
        throw Error("integration produced a non-finite state at t = " +
                    std::to_string(t + h));
    record(static_cast<double>(i + 1) * h);
  }
  return out;
}

}  // namespace

std::vector<CurveState> integrate_geodesic(const ConnectionField& gamma,
                                           std::span<const double> z0,
                                           std::span<const double> v0,
                                           double t_end, double step) {
  return integrate_second_order(gamma, nullptr, z0, v0, nullptr, t_end, step);
}

std::vector<CurveState> integrate_ph_curve(const ConnectionField& gamma,
                                           const TensorField& f,
                                           std::span<const double> z0,
                                           std::span<const double> v0,
                                           const PhForcing& forcing,
                                           double t_end, double step) {
  return integrate_second_order(gamma, &f, z0, v0, &forcing, t_end, step);
}

std::vector<std::vector<double>> parallel_transport(
    const ConnectionField& gamma, const std::vector<CurveState>& curve,
    std::span<const double> w0) {
  int dim = gamma.dim();
  if (curve.size() < 2) throw ShapeError("transport needs at least 2 samples");
  if (static_cast<int>(w0.size()) != dim)
    throw ShapeError("transport vector dimension mismatch");

  ConnectionEvaluator ev(gamma);
  std::vector<double> gbuf;

  std::vector<std::vector<double>> out;
  out.reserve(curve.size());
  std::vector<double> w(w0.begin(), w0.end());
  out.push_back(w);

  std::vector<double> z(static_cast<std::size_t>(dim));
  std::vector<double> zd(static_cast<std::size_t>(dim));
  std::vector<double> k1(w.size()), k2(w.size()), k3(w.size()), k4(w.size()),
      tmp(w.size());

  for (std::size_t seg = 0; seg + 1 < curve.size(); ++seg) {
    const CurveState& a = curve[seg];
    const CurveState& b = curve[seg + 1];
    double h = b.t - a.t;

    // cubic Hermite reconstruction of z(t) (and its derivative) inside
    // the interval, from the stored endpoint states
    auto interpolate = [&](double t) {
      double s = (t - a.t) / h;
      double s2 = s * s, s3 = s2 * s;
      double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
      double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
      double d00 = (6 * s2 - 6 * s) / h, d10 = (3 * s2 - 4 * s + 1);
      double d01 = (-6 * s2 + 6 * s) / h, d11 = (3 * s2 - 2 * s);
      for (int i = 0; i < dim; ++i) {
        z[(std::size_t)i] = h00 * a.z[(std::size_t)i] +
                            h10 * h * a.zdot[(std::size_t)i] +
                            h01 * b.z[(std::size_t)i] +
                            h11 * h * b.zdot[(std::size_t)i];
        zd[(std::size_t)i] = d00 * a.z[(std::size_t)i] +
                             d10 * a.zdot[(std::size_t)i] +
                             d01 * b.z[(std::size_t)i] +
                             d11 * b.zdot[(std::size_t)i];
      }
    };

    Rhs rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
      interpolate(t);
      ev.eval_into(z, gbuf);
      for (int alpha = 0; alpha < dim; ++alpha) {
        double sum = 0.0;
        const double* row =
            gbuf.data() + static_cast<std::size_t>(alpha * dim * dim);
        for (int l = 0; l < dim; ++l)
          for (int c = 0; c < dim; ++c)
            sum += row[l * dim + c] * zd[(std::size_t)l] * y[(std::size_t)c];
        dy[(std::size_t)alpha] = -sum;
      }
    };

    rk4_step(rhs, a.t, h, w, k1, k2, k3, k4, tmp);
    out.push_back(w);
  }
  return out;
}

double richardson_local_error(const ConnectionField& gamma,
                              const TensorField* f, const PhForcing* forcing,
                              const std::vector<CurveState>& curve,
                              std::size_t stride) {
  if (curve.size() < 2) return 0.0;
  SecondOrderOde ode(gamma, f, forcing);
  Rhs rhs = ode.as_rhs();
  double h = curve[1].t - curve[0].t;
  if (stride == 0) stride = 1;

  std::size_t n = curve.front().z.size() * 2;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < curve.size(); k += stride) {
    std::vector<double> full;
    full.insert(full.end(), curve[k].z.begin(), curve[k].z.end());
    full.insert(full.end(), curve[k].zdot.begin(), curve[k].zdot.end());
    std::vector<double> halves = full;

    rk4_step(rhs, curve[k].t, h, full, k1, k2, k3, k4, tmp);
    rk4_step(rhs, curve[k].t, h / 2, halves, k1, k2, k3, k4, tmp);
    rk4_step(rhs, curve[k].t + h / 2, h / 2, halves, k1, k2, k3, k4, tmp);

    for (std::size_t i = 0; i < n; ++i)
      worst = std::max(worst, std::fabs(full[i] - halves[i]));
  }
  return worst;
}

double energy_drift(const TensorField& g, const std::vector<CurveState>& c) {
  if (c.empty()) return 0.0;
  auto energy = [&](const CurveState& st) {
    TensorValue gv = g.evaluate(st.z);
    double e = 0.0;
    for (int a = 0; a < gv.dim; ++a)
      for (int b = 0; b < gv.dim; ++b)
        e += gv.at({a, b}) * st.zdot[(std::size_t)a] * st.zdot[(std::size_t)b];
    return e;
  };
  double e0 = energy(c.front());
  double drift = 0.0;
  for (const CurveState& st : c)
    drift = std::max(drift, std::fabs(energy(st) - e0));
  return drift;
}

void write_trajectory_csv(std::ostream& os, const std::vector<CurveState>& c) {
  if (c.empty()) return;
  std::size_t dim = c.front().z.size();
  os << "t";
  for (std::size_t i = 1; i <= dim; ++i) os << ",z" << i;
  for (std::size_t i = 1; i <= dim; ++i) os << ",zdot" << i;
  os << "\n";
  char buf[32];
  for (const CurveState& st : c) {
    std::snprintf(buf, sizeof buf, "%.17g", st.t);
    os << buf;
    for (double v : st.z) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << "," << buf;
    }
    for (double v : st.zdot) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << "," << buf;
    }
    os << "\n";
  }
}

namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

// 4th-order central difference of the velocity samples at index k.
std::vector<double> accel_fd(const std::vector<CurveState>& c, std::size_t k,
                             double h) {
  std::size_t dim = c.front().zdot.size();
  std::vector<double> a(dim);
  for (std::size_t i = 0; i < dim; ++i)
    a[i] = (-c[k + 2].zdot[i] + 8.0 * c[k + 1].zdot[i] -
            8.0 * c[k - 1].zdot[i] + c[k - 2].zdot[i]) /
           (12.0 * h);
  return a;
}

}  // namespace

CurveClassification classify_curve(const ConnectionField& gamma,
                                   const TensorField& f, int n_base,
                                   const std::vector<CurveState>& curve,
                                   const ClassifyOptions& opt) {
  CurveClassification rep;
  int dim = gamma.dim();
  if (curve.size() < 7)
    throw ShapeError("classification needs at least 7 samples");
  double h = curve[1].t - curve[0].t;

  ConnectionEvaluator ev(gamma);
  bool f_const = f.is_constant();
  TensorValue f_cached;
  if (f_const)
    f_cached = f.evaluate(std::vector<double>(static_cast<std::size_t>(dim), 0.0));

  std::vector<double> gbuf;
  std::vector<double> gamma_vv(static_cast<std::size_t>(dim));
  bool all_kernel = true;

  for (const CurveState& st : curve)
    rep.velocity_scale = std::max(rep.velocity_scale, norm2(st.zdot));
  for (std::size_t k = 0; k < curve.size(); ++k)
    for (int i = 0; i < n_base; ++i)
      rep.base_drift = std::max(
          rep.base_drift, std::fabs(curve[k].z[(std::size_t)i] -
                                    curve[0].z[(std::size_t)i]));

  for (std::size_t k = 2; k + 2 < curve.size(); ++k) {
    const CurveState& st = curve[k];
    SampleFit fit;
    fit.t = st.t;

    std::vector<double> u = st.zdot;
    double u_norm = norm2(u);
    if (u_norm <= 1e-12) {
      rep.degenerate = true;
      rep.samples.push_back(fit);
      continue;
    }

    // covariant acceleration from differentiated samples
    std::vector<double> acc = accel_fd(curve, k, h);
    ev.eval_into(st.z, gbuf);
    ev.quadratic_into(gbuf, u, u, gamma_vv);
    for (int i = 0; i < dim; ++i)
      acc[(std::size_t)i] -= gamma_vv[(std::size_t)i];  // minus the -Gamma(v,v)
    fit.accel_norm = norm2(acc);

    const TensorValue& fv = f_const ? f_cached : f.evaluate(st.z);
    std::vector<double> w(static_cast<std::size_t>(dim), 0.0);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        w[(std::size_t)a] += fv.at({a, b}) * u[(std::size_t)b];

    fit.kernel = norm2(w) <= opt.kernel_tol * (1.0 + u_norm);
    if (!fit.kernel) all_kernel = false;

    double uu = dot(u, u), uw = dot(u, w), ww = dot(w, w);
    double au = dot(acc, u), aw = dot(acc, w);

    fit.a = au / uu;
    if (!fit.kernel) {
      double x1 = 0, x2 = 0;
      if (solve_2x2_sym(uu, uw, ww, au, aw, x1, x2)) {
        fit.a = x1;
        fit.b = x2;
      }
    }

    double orth2 = 0.0, dir2 = 0.0;
    double proj_a = au / uu;
    for (int i = 0; i < dim; ++i) {
      double r = acc[(std::size_t)i] - fit.a * u[(std::size_t)i] -
                 fit.b * w[(std::size_t)i];
      orth2 += r * r;
      double d = acc[(std::size_t)i] - proj_a * u[(std::size_t)i];
      dir2 += d * d;
    }
    fit.orth_residual = std::sqrt(orth2);
    fit.dir_residual = std::sqrt(dir2);

    rep.max_orth_residual = std::max(rep.max_orth_residual, fit.orth_residual);
    rep.max_dir_residual = std::max(rep.max_dir_residual, fit.dir_residual);
    rep.max_accel = std::max(rep.max_accel, fit.accel_norm);
    rep.samples.push_back(fit);
  }

  if (rep.degenerate) return rep;

  double scale = 1.0 + rep.max_accel;
  rep.is_ph = rep.max_orth_residual <= opt.fit_tol * scale;
  rep.is_pregeodesic = rep.max_dir_residual <= opt.fit_tol * scale;
  rep.is_geodesic =
      rep.max_accel <= opt.fit_tol * (1.0 + rep.velocity_scale *
                                                rep.velocity_scale);
  rep.kernel_confined = all_kernel;
  rep.special_plane =
      all_kernel && rep.base_drift <= opt.fit_tol * (1.0 + rep.velocity_scale);
  return rep;
}

HolomorphicSurface build_surface(const std::vector<Expression>& base_of_u) {
  HolomorphicSurface s;
  s.n = static_cast<int>(base_of_u.size());
  s.uv = make_vars({"u", "v"});
  Expression v = Expression::symbol("v", s.uv);
  for (const Expression& zi : base_of_u) {
    Expression base = zi.rehosted(s.uv);
    s.base.push_back(base);
    s.fiber.push_back(v * base.derivative("u"));
  }
  return s;
}

PairCheck holomorphic_pair_check(const Expression& p, const Expression& q,
                                 const Sampling& s) {
  PairCheck out;
  Expression pu = p.derivative("u");
  Expression pv = p.derivative("v");
  Expression qv = q.derivative("v");
  double scale = 0.0;
  for (const auto& pt : sample_points(s, 2)) {
    double a = pu.evaluate(pt), b = qv.evaluate(pt), c = pv.evaluate(pt);
    out.du_dv_residual = std::max(out.du_dv_residual, std::fabs(a - b));
    out.pv_residual = std::max(out.pv_residual, std::fabs(c));
    scale = std::max(scale, std::max(std::fabs(a), std::fabs(b)));
  }
  double tol = s.tolerance * (1.0 + scale);
  out.passed = out.du_dv_residual <= tol && out.pv_residual <= tol;
  return out;
}

PairCheck surface_pair_check(const HolomorphicSurface& surf,
                             const Sampling& s) {
  PairCheck out;
  out.passed = true;
  for (int i = 0; i < surf.n; ++i) {
    PairCheck one = holomorphic_pair_check(surf.base[(std::size_t)i],
                                           surf.fiber[(std::size_t)i], s);
    out.du_dv_residual = std::max(out.du_dv_residual, one.du_dv_residual);
    out.pv_residual = std::max(out.pv_residual, one.pv_residual);
    out.passed = out.passed && one.passed;
  }
  return out;
}

ReparamResult reparametrize_surface(const HolomorphicSurface& surf,
                                    const Expression& h, const Expression& t,
                                    const Sampling& s) {
  ReparamResult out;
  Expression hh = h.rehosted(surf.uv);
  Expression tt = t.variables()->size() < 2 ? t.rehosted(surf.uv) : t;

  Expression dh = hh.derivative("u");
  Expression tv = tt.derivative("v");
  out.min_dh_du = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (const auto& pt : sample_points(s, 2)) {
    double a = dh.evaluate(pt), b = tv.evaluate(pt);
    out.constraint_residual =
        std::max(out.constraint_residual, std::fabs(a - b));
    out.min_dh_du = std::min(out.min_dh_du, std::fabs(a));
    scale = std::max(scale, std::fabs(a));
  }
  if (out.min_dh_du < 1e-9)
    throw SingularError("reparametrization has dh/du ~ 0 on the sample box");
  if (out.constraint_residual > s.tolerance * (1.0 + scale))
    throw Error("reparametrization constraint dh/du = dt/dv violated "
                "(residual " +
                std::to_string(out.constraint_residual) + ")");

  out.surface.n = surf.n;
  out.surface.uv = surf.uv;
  std::map<std::string, Expression> subst{{"u", hh}, {"v", tt}};
  for (int i = 0; i < surf.n; ++i) {
    out.surface.base.push_back(
        surf.base[(std::size_t)i].substitute({{"u", hh}}, surf.uv));
    out.surface.fiber.push_back(
        surf.fiber[(std::size_t)i].substitute(subst, surf.uv));
  }
  out.pair = surface_pair_check(out.surface, s);
  return out;
}

Theorem6Report theorem6_check(const ConnectionField& base_gamma,
                              const ConnectionField& lifted_gamma,
                              const TensorField& lifted_f,
                              const std::vector<CurveState>& base_curve,
                              std::span<const double> v_values,
                              double tolerance) {
  Theorem6Report rep;
  rep.tolerance = tolerance;
  int n = base_gamma.dim();
  int dim = lifted_gamma.dim();
  if (dim != 2 * n)
    throw ShapeError("theorem6_check expects the lift of the base chart");
  if (base_curve.size() < 7)
    throw ShapeError("theorem6_check needs at least 7 base samples");
  double h = base_curve[1].t - base_curve[0].t;

  ConnectionEvaluator base_ev(base_gamma);
  ConnectionEvaluator lift_ev(lifted_gamma);
  TensorValue fv = lifted_f.evaluate(
      std::vector<double>(static_cast<std::size_t>(dim), 0.0));

  std::vector<double> gbuf, lbuf;
  std::vector<double> gamma_vv(static_cast<std::size_t>(n));

  for (std::size_t k = 2; k + 2 < base_curve.size(); ++k) {
    const CurveState& st = base_curve[k];
    std::vector<double> zdd = accel_fd(base_curve, k, h);

    // precondition: the base curve is geodesic
    base_ev.eval_into(st.z, gbuf);
    base_ev.quadratic_into(gbuf, st.zdot, st.zdot, gamma_vv);
    for (int i = 0; i < n; ++i)
      rep.base_geodesic_residual =
          std::max(rep.base_geodesic_residual,
                   std::fabs(zdd[(std::size_t)i] - gamma_vv[(std::size_t)i]));

    for (double v : v_values) {
      // the u-line through fiber level v and its velocities
      std::vector<double> beta(static_cast<std::size_t>(dim));
      std::vector<double> beta_dot(static_cast<std::size_t>(dim));
      std::vector<double> gamma_dot(static_cast<std::size_t>(dim), 0.0);
      std::vector<double> dgamma_dot(static_cast<std::size_t>(dim), 0.0);
      for (int i = 0; i < n; ++i) {
        beta[(std::size_t)i] = st.z[(std::size_t)i];
        beta[(std::size_t)(n + i)] = v * st.zdot[(std::size_t)i];
        beta_dot[(std::size_t)i] = st.zdot[(std::size_t)i];
        beta_dot[(std::size_t)(n + i)] = v * zdd[(std::size_t)i];
        gamma_dot[(std::size_t)(n + i)] = st.zdot[(std::size_t)i];
        dgamma_dot[(std::size_t)(n + i)] = zdd[(std::size_t)i];
      }

      // gamma-dot must be exactly f beta-dot
      for (int a = 0; a < dim; ++a) {
        double fb = 0.0;
        for (int b = 0; b < dim; ++b)
          fb += fv.at({a, b}) * beta_dot[(std::size_t)b];
        rep.gamma_identity_residual =
            std::max(rep.gamma_identity_residual,
                     std::fabs(fb - gamma_dot[(std::size_t)a]));
      }

      // delta gamma-dot / du = d gamma-dot/du + Gamma-hat(beta-dot, gamma-dot)
      lift_ev.eval_into(beta, lbuf);
      for (int a = 0; a < dim; ++a) {
        double sum = dgamma_dot[(std::size_t)a];
        const double* row =
            lbuf.data() + static_cast<std::size_t>(a * dim * dim);
        for (int l = 0; l < dim; ++l)
          for (int c = 0; c < dim; ++c)
            sum += row[l * dim + c] * beta_dot[(std::size_t)l] *
                   gamma_dot[(std::size_t)c];
        rep.transport_residual =
            std::max(rep.transport_residual, std::fabs(sum));
      }
    }
  }

  rep.lines_checked = static_cast<int>(v_values.size());
  rep.passed = rep.base_geodesic_residual <= tolerance &&
               rep.gamma_identity_residual <= 1e-10 &&
               rep.transport_residual <= tolerance;
  return rep;
}

Theorem7Report theorem7_ph_transform(const ConnectionField& gamma,
                                     const OneForm& q, const TensorField& f,
                                     int n_base,
                                     const std::vector<CurveState>& curve,
                                     double tolerance) {
  Theorem7Report rep;
  rep.tolerance = tolerance;
  int dim = gamma.dim();

  TensorField t = deformation_tensor(q, f);
  ConnectionField deformed = deform(gamma, t);

  CurveClassification before = classify_curve(gamma, f, n_base, curve);
  CurveClassification after = classify_curve(deformed, f, n_base, curve);
  if (before.degenerate || after.degenerate)
    throw ShapeError("theorem7_ph_transform needs a non-degenerate curve");
  rep.orth_residual = after.max_orth_residual;

  bool f_const = f.is_constant();
  TensorValue f_cached;
  if (f_const)
    f_cached = f.evaluate(std::vector<double>(static_cast<std::size_t>(dim), 0.0));

  for (std::size_t k = 0; k < before.samples.size(); ++k) {
    const SampleFit& b0 = before.samples[k];
    const SampleFit& b1 = after.samples[k];
    const CurveState& st = curve[k + 2];  // classifier skips two samples

    TensorValue qv = q.evaluate(st.z);
    const TensorValue& fv = f_const ? f_cached : f.evaluate(st.z);
    double q_zdot = 0.0, qt_zdot = 0.0;
    for (int i = 0; i < dim; ++i) {
      q_zdot += qv.at({i}) * st.zdot[(std::size_t)i];
      for (int s = 0; s < dim; ++s)
        qt_zdot += qv.at({s}) * fv.at({s, i}) * st.zdot[(std::size_t)i];
    }

    rep.a_shift_mismatch = std::max(
        rep.a_shift_mismatch, std::fabs(b1.a - (b0.a + 2.0 * qt_zdot)));
    if (!b0.kernel)
      rep.b_shift_mismatch = std::max(
          rep.b_shift_mismatch, std::fabs(b1.b - (b0.b + 2.0 * q_zdot)));
    ++rep.samples_used;
  }

  double scale = 1.0 + after.max_accel;
  rep.passed = rep.a_shift_mismatch <= tolerance &&
               rep.b_shift_mismatch <= tolerance &&
               rep.orth_residual <= 1e-6 * scale;
  return rep;
}

}  // namespace nilstruct
