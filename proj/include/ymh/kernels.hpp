/* kernels.hpp
 *
 * Numerical checks of the stand-alone analytic lemmas: the weakly singular
 * Volterra-Gronwall inequality, the weighted Hardy and Sobolev inequalities
 * on a ball, and two explicit integral bounds.
 *
 * "Verification" here means: solve the extremal integral equation, or sweep
 * a family of test functions, and report ratios against the stated bounds.
 * The suite can falsify or corroborate a lemma, never prove it.
 */
#ifndef YMH_KERNELS_HPP
#define YMH_KERNELS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ymh/geometry.hpp"
#include "ymh/quadrature.hpp"

namespace ymh {

// ---------------------------------------------------------------------------
// Volterra-Gronwall:  f(t) = A + B int_0^t s^{-gamma} f(t-s) ds.
// ---------------------------------------------------------------------------
struct VolterraProblem {
  double A = 1.0;     // >= 0
  double B = 1.0;     // >= 0
  double gamma = 0.5; // in (0,1)
  double t0 = 1.0;    // > 0
  int n = 2048;       // grid cells
};

struct GronwallSolution {
  std::vector<double> t;
  std::vector<double> f;
  double equality_residual = 0.0;  // max |f - (A + B*int)| after solve
};

// Extremal (equality-case) solution by product integration: the weight
// moments of s^{-gamma} are integrated exactly against the linear
// interpolant of f, which restores second-order convergence at s = 0.
GronwallSolution gronwall_extremal(const VolterraProblem& prob);

double gronwall_epsilon0(double B, double gamma);  // ((1-gamma)/(2B))^{1/(1-gamma)}
double gronwall_bound_constant(double B, double gamma, double t0);  // 2^{floor(t0/eps0)+1}

// ---------------------------------------------------------------------------
// Radial test functions on the ball B_{R0}.
// ---------------------------------------------------------------------------
struct RadialFn {
  std::string name;
  RealFn f;    // value
  RealFn df;   // d/dr
  RealFn d2f;  // d^2/dr^2
  // boundary behaviour ~ (R0 - r)^{sing_exponent}; 0 for smooth members.
  // The derivative-squared integrands behave like (R0-r)^{2s-2}, so a member
  // has finite weighted RHS norm iff 2s - 2 + gamma > -1.
  double sing_exponent = 0.0;
};

inline bool finite_rhs_member(const RadialFn& fn, double gamma) {
  return fn.sing_exponent == 0.0 ||
         2.0 * fn.sing_exponent - 2.0 + gamma > -0.95;
}

enum class FamilyKind { polynomial_bump, boundary_singular, random_fourier };

// Deterministic family of radial test functions; `count` members per kind.
std::vector<RadialFn> test_function_family(FamilyKind kind, double R0,
                                           int count, std::uint64_t seed);
std::vector<RadialFn> default_family(double R0, int count_per_kind,
                                     std::uint64_t seed);

// ---------------------------------------------------------------------------
// Lemma checks.  All integrals are volume integrals over the ball, reduced
// to radial quadrature (4 pi r^2 dr) with the boundary weight handled by
// product integration.
// ---------------------------------------------------------------------------
struct RatioCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs, 0 when both vanish
};

// Hardy:  int |phi|^2 (R0-r)^{eps-1}  vs  R0^{eps-gamma+1} int (|phi|^2/R0^2
//         + |phi'|^2) (R0-r)^gamma.
RatioCheck hardy_ratio(const RadialFn& phi, double gamma, double eps, double R0);

// Sobolev:  sup |phi|^2 (at sampled radii)  vs
//   R0^{-1-gamma} ( E_gamma[phi'](B_R0) + int |phi|^2 (R0-r)^gamma / R0^2 ),
// where E_gamma[w] = int |w|^2 (R0-r)^gamma + |w'|^2 (R0-r)^{2+gamma}
// (+ angular Hessian terms); rotational derivatives vanish in the radial
// reduction and are omitted.
RatioCheck sobolev_ratio(const RadialFn& phi, double gamma, double R0);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

//  int_{r~}^{R0} (R0-s)^{-gamma} s^{-2} ds  <=  2^{1+gamma}/(1-gamma) R0^{-gamma} / r~.
BoundCheck lemma_bd4Rss2(double r_tilde, double R0, double gamma);
double lemma_bd4Rss2_lhs_closed_form(double r_tilde, double R0);  // gamma = 1/2 only

// Sphere integral of the cone weight (section-5 lemma):
//   value  = int_{S_q(r~)} (R - t - r)^{-gamma} domega~
//          = 2 pi int_{-1}^{1} (R - t - r(mu))^{-gamma} dmu,  t = t0 - r~,
//   bound  = 4 pi (R - t)^{gamma} (R - t0 + r0)^{-gamma} r~^{-gamma}.
struct SphereWeightCheck {
  double value = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};
SphereWeightCheck sphere_weight_integral(const SpacetimePoint& q,
                                         double r_tilde, double gamma,
                                         double R);
// closed form of the same integral (used as the quadrature oracle)
double sphere_weight_integral_closed_form(const SpacetimePoint& q,
                                          double r_tilde, double gamma,
                                          double R);

// ---------------------------------------------------------------------------
// CSV suite: one row per check, columns
//   lemma,param1,param2,param3,lhs,rhs,pass
// ---------------------------------------------------------------------------
struct KernelCheckRow {
  std::string lemma;
  double p1 = 0, p2 = 0, p3 = 0;
  double lhs = 0, rhs = 0;
  bool pass = false;
};
std::vector<KernelCheckRow> verify_kernels_suite(std::uint64_t seed,
                                                 int family_count = 6);

}  // namespace ymh

#endif
