/* geometry.hpp
 *
 * Flat-space double-null geometry for the spherically symmetric
 * Maxwell-Klein-Gordon / Yang-Mills lab: null coordinates, backward-cone
 * weight functions, the hyperboloidal slice and the conformal chart that
 * maps its future onto a truncated backward light cone.
 *
 * Everything here is a pure function of coordinates; no field data.
 */
#ifndef YMH_GEOMETRY_HPP
#define YMH_GEOMETRY_HPP

#include <cmath>
#include <stdexcept>

namespace ymh {

struct SpacetimePoint {
  double t = 0.0;
  double r = 0.0;  // >= 0
};

struct NullCoords {
  double u = 0.0;  // (t - r) / 2
  double v = 0.0;  // (t + r) / 2
};

inline NullCoords null_coords(const SpacetimePoint& p) {
  return {0.5 * (p.t - p.r), 0.5 * (p.t + p.r)};
}

inline SpacetimePoint from_null(const NullCoords& n) {
  return {n.u + n.v, n.v - n.u};
}

// Radius of the point x0 + r_tilde * omega_tilde when |x0| = r0 and
// cos(angle(x0, omega_tilde)) = mu.  Law of cosines on the cone sphere.
inline double sphere_radius(double r0, double r_tilde, double mu) {
  double s2 = r0 * r0 + r_tilde * r_tilde + 2.0 * r0 * r_tilde * mu;
  return s2 > 0.0 ? std::sqrt(s2) : 0.0;
}

// Weight function attached to a vertex q and a field point p.
//
//   u_* = R - t + r,  v_* = R - t - r,
//   W_q = 2 u_*^g v_*^g / ((1 - tau) u_*^g + (1 + tau) v_*^g),
//   r_q = min(r, r0).
//
// tau is the cosine between x and x - x0; it is passed explicitly because
// (r0, r_tilde, tau) is a complete chart of the cone geometry in spherical
// symmetry.  By convention tau = 1 when either radius degenerates.
struct ConeWeight {
  double u_star = 0.0;
  double v_star = 0.0;
  double tau = 1.0;
  double w_q = 0.0;
  double r_q = 0.0;
  double gamma = 0.0;
};

ConeWeight cone_weights(const SpacetimePoint& q, const SpacetimePoint& p,
                        double tau, double gamma, double R);

// Lemma-style lower-bound data: W_q^{-1} <= 3 (R - t - r_q)^{-gamma}.
// Returns the pair (lhs, rhs) of that inequality for a computed weight.
struct ConeWeightBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};
ConeWeightBound cone_weight_bound(const ConeWeight& w, const SpacetimePoint& p,
                                  double R);

// A point of the backward cone N^-(q) parameterised by (r_tilde, mu) where
// mu is the cosine between omega_tilde and x0.  Returns the field point and
// the tau entering W_q at that point.
struct ConePoint {
  SpacetimePoint p;
  double r_tilde = 0.0;
  double tau = 1.0;
};
ConePoint cone_point(const SpacetimePoint& q, double r_tilde, double mu);

// Conformal chart of section-6 type.  t^* = t + R + 1, Lambda = (t^*)^2 - r^2,
//   t~ = R - t^*/Lambda,   r~ = r / Lambda.
// The chart maps the future D of the hyperboloid
//   H = { (t^*)^2 - r^2 = t^*/R }
// onto the truncated backward cone { t~ + r~ < R, t~ >= 0 }.
struct ConformalImage {
  double t_tilde = 0.0;
  double r_tilde = 0.0;
};

struct FrameScales {
  double lambda = 0.0;    // (t^*)^2 - r^2
  double sq_plus = 0.0;   // (t^* + r)^2 ; L = sq_plus^{-1} * L~
  double sq_minus = 0.0;  // (t^* - r)^2
};

struct ConformalChart {
  double R = 2.0;  // > 1

  explicit ConformalChart(double R_) : R(R_) {
    if (!(R > 1.0)) throw std::invalid_argument("conformal chart requires R > 1");
  }

  double t_star(double t) const { return t + R + 1.0; }
  double t_from_star(double ts) const { return ts - R - 1.0; }
  double lambda(const SpacetimePoint& p) const {
    double ts = t_star(p.t);
    return ts * ts - p.r * p.r;
  }
  // true if p lies in D, the future of the hyperboloid
  bool in_domain(const SpacetimePoint& p) const {
    double ts = t_star(p.t);
    double lam = ts * ts - p.r * p.r;
    return lam * ts > 0.0 && lam >= ts / R;
  }

  ConformalImage forward(const SpacetimePoint& p) const;
  SpacetimePoint inverse(const ConformalImage& q) const;
  FrameScales frame_scale_factors(const SpacetimePoint& p) const;

  // radius of the image of the t = 0 part of H; Phi(H_-) = { r~ < R_* }
  double r_star_inner() const { return std::sqrt(R * R - R / (R + 1.0)); }
};

// Hyperboloidal slice (t^*)^2 - r^2 = t^*/R_surf, viewed as a graph over r.
// R_chart enters only through t^* = t + R_chart + 1; the pullbacks of
// constant-t~ slices of the image cone are slices with R_surf = R - t~.
struct HyperboloidSlice {
  double R_chart = 2.0;
  double R_surf = 2.0;

  HyperboloidSlice(double R_chart_, double R_surf_)
      : R_chart(R_chart_), R_surf(R_surf_) {
    if (!(R_chart > 1.0) || !(R_surf > 0.0))
      throw std::invalid_argument("hyperboloid slice requires R_chart > 1, R_surf > 0");
  }
  explicit HyperboloidSlice(double R_) : HyperboloidSlice(R_, R_) {}

  double t_star(double r) const {
    double c = 0.5 / R_surf;
    return c + std::sqrt(r * r + c * c);
  }
  double t(double r) const { return t_star(r) - R_chart - 1.0; }
  // dt/dr along the graph (= dt^*/dr)
  double dt_dr(double r) const {
    double c = 0.5 / R_surf;
    return r / std::sqrt(r * r + c * c);
  }
  // radius at which the slice crosses t = 0 (splits H_- from H_+)
  double r_split() const {
    double ts = R_chart + 1.0;
    double s2 = ts * ts - ts / R_surf;
    return s2 > 0.0 ? std::sqrt(s2) : 0.0;
  }
  // energy-flux weights of the slice:  (2R(t^* -+ r) - 1) / (2R t^* - 1).
  // The ingoing one degenerates to 0 as r -> infinity; it stays nonnegative.
  double flux_weight_in(double r) const {
    double ts = t_star(r);
    return (2.0 * R_surf * (ts - r) - 1.0) / (2.0 * R_surf * ts - 1.0);
  }
  double flux_weight_out(double r) const {
    double ts = t_star(r);
    return (2.0 * R_surf * (ts + r) - 1.0) / (2.0 * R_surf * ts - 1.0);
  }
};

}  // namespace ymh

#endif
