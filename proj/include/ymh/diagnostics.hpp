/* diagnostics.hpp
 *
 * Weighted norms, cone fluxes, sphere integrals, decay-rate fits and the
 * conformal-identity checks, evaluated on initial data closures, evolved
 * trajectories (kept at stride 1), or hyperboloidal surface samples.
 *
 * Conventions for pointwise norms in the spherical reduction:
 *   |F|^2      = alpha^2 + alpha_bar^2 + 2 rho^2 + 2 sigma^2,
 *   |D phi|^2  = |D_t phi|^2 + |D_r phi|^2         (angular parts vanish),
 *   |DF|^2     = (d_t rho)^2 + (d_r rho)^2 + 2 rho^2/r^2   (+ radial MKG),
 *   |D^2 phi|^2 = |D_t D_t|^2 + 2 |D_t D_r|^2 + |D_r D_r|^2 + 2 |D_r/r|^2.
 * Third-order and |D^2 F| terms use radial derivatives of the second-order
 * component functions with the same angular-connection completion; they
 * enter stability checks only, never oracle equalities.
 */
#ifndef YMH_DIAGNOSTICS_HPP
#define YMH_DIAGNOSTICS_HPP

#include <string>
#include <vector>

#include "ymh/fields.hpp"
#include "ymh/geometry.hpp"
#include "ymh/solver.hpp"

namespace ymh {

struct WeightedNorm {
  std::string surface;   // ball | hyperboloid | minkowski | minkowski_ym
  double exponent = 0.0; // gamma or gamma1
  int order = 0;         // k
  double value = 0.0;
  double boundary_share = 0.0;  // fraction contributed by the last cell
};

// ---------------------------------------------------------------------------
// Ball norms E_{k,gamma}^R of MKG initial data (closure-based).
// ---------------------------------------------------------------------------
WeightedNorm norm_ball_mkg(const MkgCauchyData& data, double R, double gamma,
                           int k);

// Minkowski-slice norms of the chargeless part, E_{l,gamma1}^M; the charge
// tail q0 r^{-2} (r >= 1) is subtracted internally from the electric field.
WeightedNorm norm_minkowski_mkg(const MkgCauchyData& data, double gamma1,
                                int l, double r_max);
WeightedNorm norm_minkowski_su2(const Su2CauchyData& data, double gamma1,
                                int l, double r_max);

// ---------------------------------------------------------------------------
// Hyperboloid norms from sampled states.
// ---------------------------------------------------------------------------
// energy flux E[phi, F](H) of the base fields (spherical reduction)
double hyperboloid_flux(const MkgHyperState& state);
// E_{k,gamma1}^H with the commutators Z in {d_t, S}; k in {0, 1}
WeightedNorm norm_hyperboloid(const MkgHyperState& state, double gamma1,
                              int k);

struct Prop61Result {
  double num = 0.0;   // E_{k, 2-gamma1}^{R*} of the transported state
  double den = 0.0;   // E_{k, gamma1}^H
  double ratio = 0.0;
  double tail_deficit = 0.0;
};
Prop61Result prop61_ratio(const MkgHyperState& state,
                          const ConformalChart& chart, double gamma1, int k);

// ---------------------------------------------------------------------------
// Trajectory point sampling (requires keep_stride == 1).
// ---------------------------------------------------------------------------
struct MkgPoint {
  cplx psi, dt_psi, dr_psi;  // covariant, psi-level
  double Q = 0.0, rho = 0.0;
  bool ok = false;
};
MkgPoint sample_mkg_point(const Trajectory& tr, double t, double r);

// ---------------------------------------------------------------------------
// Backward-cone diagnostics on a B_R trajectory.
// ---------------------------------------------------------------------------
struct ConeFluxResult {
  double cone_term = 0.0;   // weighted flux integral over N^-(q)
  double slice_term = 0.0;  // weighted ball integral at t_slice
  double total = 0.0;
  double ratio = 0.0;       // total / E0
};
ConeFluxResult cone_flux(const Trajectory& tr, const SpacetimePoint& q,
                         double gamma, double R, double e0, double t_slice);

struct SliceEnergyResult {
  double value = 0.0;  // int_{B_{(t,x0)}(t0 - t)} |Dphi|^2 + |F|^2
  double ratio = 0.0;  // value * (R - t0 - r0)^gamma / e0
};
SliceEnergyResult slice_energy_check(const Trajectory& tr,
                                     const SpacetimePoint& q, double t,
                                     double gamma, double R, double e0);

// Sphere L^2 bounds: the three fitted constants, maximised over a probe set.
struct SphereChecks {
  double c_bd4rphi2 = 0.0;   // r int_{S_(t,0)(r)} |phi|^2 dw * (R-t)^g / E0
  double c_bd4phi_need = 0.0;  // r~ int |phi|^2 dw~ * r~^{g+eps} / E0
  double c_bd4phi_phir = 0.0;  // r~ int |phi|/r dw~ * r~^{(1+g+e)/2} / sqrt(E0)
};
SphereChecks sphere_l2_checks(const Trajectory& tr, double gamma, double eps,
                              double R, double e0,
                              const std::vector<SpacetimePoint>& probes);

// ---------------------------------------------------------------------------
// Decay fits and envelopes.
// ---------------------------------------------------------------------------
struct DecayFitResult {
  std::string quantity;
  std::string ray;
  double exponent = 0.0;
  double residual = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  int n_used = 0;
  bool ok = false;
};

// least-squares slope of log|y| vs log x inside the dyadic window (first and
// last octave excluded, then the middle 80 %); y-floor 1e-14
DecayFitResult decay_fit_series(const std::vector<double>& x,
                                const std::vector<double>& y,
                                const std::string& quantity,
                                const std::string& ray);
// from a probe series: x = x_col (plus offset), y = y_col
DecayFitResult decay_fit(const ProbeSeries& series, const std::string& x_col,
                         const std::string& y_col, double x_offset,
                         const std::string& quantity);

struct EnvelopeResult {
  double C_phi = 0.0;   // sup |phi|^2 (R-t)^{1+gamma} / E1
  double C_dphi = 0.0;  // sup (|Dphi|+|F|)^2 weight^2 / E2
  double e1 = 0.0, e2 = 0.0;
};
EnvelopeResult theorem11_envelope(const Trajectory& tr, double R, double gamma,
                                  double eps, double e1, double e2);

// envelope of |phi| alone against the trajectory (cross-path oracle for the
// linear-evolution constant)
double phi_envelope_constant(const Trajectory& tr, double R, double gamma,
                             double e1);

// ---------------------------------------------------------------------------
// Conformal round trip (evolve-then-transport vs transport-then-evolve).
// ---------------------------------------------------------------------------
struct RoundtripResult {
  double sup_abs_diff = 0.0;
  double sup_field = 0.0;
  double sup_rel_diff = 0.0;
  int n_compared = 0;
};
RoundtripResult conformal_roundtrip(const InitialDataFamily& fam, double R,
                                    double h, double t_tilde_compare,
                                    double r_max_hyper);

// Cauchy data on the image slice from a transported state (chargeless MKG).
MkgCauchyData cauchy_from_image_slice(const MkgImageSlice& img);

}  // namespace ymh

#endif
