#include "ymh/geometry.hpp"

#include <algorithm>
#include <limits>

namespace ymh {

ConeWeight cone_weights(const SpacetimePoint& q, const SpacetimePoint& p,
                        double tau, double gamma, double R) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("cone_weights: gamma must lie in (0,1)");
  if (tau < -1.0 || tau > 1.0)
    throw std::invalid_argument("cone_weights: tau must lie in [-1,1]");
  if (p.t < 0.0 || p.t + p.r > R + 1e-12)
    throw std::domain_error("cone_weights: p outside J^+(B_R)");

  ConeWeight w;
  w.gamma = gamma;
  w.u_star = R - p.t + p.r;
  w.v_star = R - p.t - p.r;
  // degenerate radii: the tau = 1 limit of the Lemma proof
  w.tau = (p.r == 0.0 || q.r == 0.0) ? 1.0 : tau;
  w.r_q = std::min(p.r, q.r);

  double ug = std::pow(w.u_star, gamma);
  double vg = std::pow(w.v_star, gamma);
  double den = (1.0 - w.tau) * ug + (1.0 + w.tau) * vg;
  w.w_q = den > 0.0 ? 2.0 * ug * vg / den : 0.0;
  return w;
}

ConeWeightBound cone_weight_bound(const ConeWeight& w, const SpacetimePoint& p,
                                  double R) {
  ConeWeightBound b;
  b.lhs = w.w_q > 0.0 ? 1.0 / w.w_q : std::numeric_limits<double>::infinity();
  b.rhs = 3.0 * std::pow(R - p.t - w.r_q, -w.gamma);
  b.pass = b.lhs <= b.rhs * (1.0 + 1e-12);
  if (!b.pass) {
    // re-check in extended precision before declaring a violation
    long double ug = powl((long double)w.u_star, (long double)w.gamma);
    long double vg = powl((long double)w.v_star, (long double)w.gamma);
    long double den = (1.0L - (long double)w.tau) * ug + (1.0L + (long double)w.tau) * vg;
    long double lhs = den / (2.0L * ug * vg);
    long double rhs = 3.0L * powl((long double)(R - p.t - w.r_q), -(long double)w.gamma);
    b.pass = lhs <= rhs * (1.0L + 1e-12L);
  }
  return b;
}

ConePoint cone_point(const SpacetimePoint& q, double r_tilde, double mu) {
  if (r_tilde < 0.0 || r_tilde > q.t + 1e-12)
    throw std::domain_error("cone_point: r_tilde must lie in [0, t0]");
  ConePoint c;
  c.r_tilde = r_tilde;
  c.p.t = q.t - r_tilde;
  c.p.r = sphere_radius(q.r, r_tilde, mu);
  // tau = omega . omega~ = (r0 mu + r~) / r, with the degenerate convention
  c.tau = (c.p.r > 0.0 && q.r > 0.0 && r_tilde > 0.0)
              ? std::clamp((q.r * mu + r_tilde) / c.p.r, -1.0, 1.0)
              : 1.0;
  return c;
}

ConformalImage ConformalChart::forward(const SpacetimePoint& p) const {
  double ts = t_star(p.t);
  double lam = ts * ts - p.r * p.r;
  if (lam <= 0.0)
    throw std::domain_error("conformal_forward: Lambda <= 0");
  return {R - ts / lam, p.r / lam};
}

SpacetimePoint ConformalChart::inverse(const ConformalImage& q) const {
  double a = R - q.t_tilde;
  double lam_t = a * a - q.r_tilde * q.r_tilde;  // = 1 / Lambda
  if (lam_t <= 0.0)
    throw std::domain_error("conformal_inverse: image point outside cone");
  double ts = a / lam_t;
  return {t_from_star(ts), q.r_tilde / lam_t};
}

FrameScales ConformalChart::frame_scale_factors(const SpacetimePoint& p) const {
  double ts = t_star(p.t);
  FrameScales f;
  f.lambda = ts * ts - p.r * p.r;
  if (f.lambda <= 0.0)
    throw std::domain_error("frame_scale_factors: Lambda <= 0");
  f.sq_plus = (ts + p.r) * (ts + p.r);
  f.sq_minus = (ts - p.r) * (ts - p.r);
  return f;
}

}  // namespace ymh
