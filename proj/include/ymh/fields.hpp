/* fields.hpp
 *
 * The two exact symmetry reductions of the Yang-Mills-Higgs system evolved
 * by this lab, in double-null coordinates u = (t-r)/2, v = (t+r)/2 on flat
 * space (metric -4 du dv + r^2 dOmega^2, r = v - u):
 *
 * 1) Spherical Maxwell-Klein-Gordon (G = U(1), V = C) in the gauge
 *    A_v = 0, A_u = 0 at the axis and on the initial slice.  With
 *    psi = r phi, a = A_u and the charge aspect Q = r^2 rho,
 *
 *       d_u d_v psi = -i a d_v psi + i Q psi / r^2
 *       d_v Q       = -Im( conj(psi) d_v psi )
 *       d_v a       = -2 Q / r^2
 *
 *    The normalisation makes rho = Q / r^2 the electric null component, so
 *    Q at the outer boundary is the total charge q0 with
 *    q0 = (1/4pi) int Im(phi0 conj(phi1)) dx.
 *
 * 2) Spherical purely magnetic SU(2) Yang-Mills via the standard ansatz
 *    function w:
 *
 *       d_u d_v w = w (1 - w^2) / r^2
 *
 *    with null curvature magnitudes |alpha| = sqrt(2) |d_v w| / r,
 *    |alpha_bar| = sqrt(2) |d_u w| / r, |sigma| = |1 - w^2| / r^2, rho = 0.
 *
 * Both reductions are validated by conservation oracles in the tests: the
 * component constants are fixed by matching the null-frame energy density
 * (1/4)(|alpha|^2+|alpha_bar|^2) + (1/2)(|rho|^2+|sigma|^2) + scalar terms
 * against the Lagrangian-derived density.
 */
#ifndef YMH_FIELDS_HPP
#define YMH_FIELDS_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ymh/geometry.hpp"
#include "ymh/quadrature.hpp"

namespace ymh {

using cplx = std::complex<double>;
using CplxFn = std::function<cplx(double)>;

enum class Model { mkg, su2 };

// ---------------------------------------------------------------------------
// Cell residuals / updates.  A diamond cell has corners
//   S = (u, v), W = (u+h, v), E = (u, v+h), N = (u+h, v+h),
// all with the same r on the S-N diagonal (r_c = v - u).
// ---------------------------------------------------------------------------
struct MkgCell {
  cplx psi_s, psi_w, psi_e, psi_n;
  double a_c;  // gauge potential at the cell centre (average of W, E)
  double q_c;  // charge aspect at the cell centre
  double r_c;  // radius of the S-N diagonal
  double h;
};

// residual of the psi equation on the cell: (psi_n - psi_w - psi_e + psi_s)/h^2
// minus the centred right-hand side
cplx mkg_cell_residual(const MkgCell& cell);
// solve the (linear) cell equation for psi_n
cplx mkg_cell_solve(const MkgCell& cell);

struct Su2Cell {
  double w_s, w_w, w_e, w_n;
  double r_c;
  double h;
};
double su2_cell_residual(const Su2Cell& cell);
double su2_cell_solve(const Su2Cell& cell);  // fixed-point on the cubic term

// charge-aspect increment along a v-cell of one u-row (exact midpoint rule)
inline double mkg_charge_increment(const cplx& psi0, const cplx& psi1) {
  return -std::imag(std::conj(psi0) * psi1);
}

// ---------------------------------------------------------------------------
// Cauchy data on a constant-t slice, at the psi = r phi level.
// ---------------------------------------------------------------------------
struct MkgCauchyData {
  CplxFn psi0;      // r phi0
  CplxFn psi1;      // r D_t phi (gauge a = 0 on the slice, so = r phi1)
  CplxFn psi0_r;    // d/dr of psi0
  CplxFn psi0_rr;   // d^2/dr^2 of psi0 (for the second initialisation row)
  RealFn Q0;        // constraint-integrated charge aspect
  double q_total = 0.0;
  double r_data_max = 0.0;  // radius beyond which the closures are not valid
};

struct Su2CauchyData {
  RealFn w0;
  RealFn w1;
  RealFn w0_r;
  RealFn w0_rr;
  double w_axis = 1.0;
  double r_data_max = 0.0;
};

// ---------------------------------------------------------------------------
// Initial data families.
// ---------------------------------------------------------------------------
struct InitialDataFamily {
  std::string profile;  // bump | charged_lump | boundary_singular | weighted
                        // | su2_kink | su2_annulus | su2_weighted
  double amplitude = 1.0;
  double support = 1.0;    // bump width / annulus radius scale
  double sigma = -0.5;     // boundary-singular exponent of D_L phi
  double delta = 0.1;      // weighted-family margin above the critical tail
  double gamma1 = 1.5;     // tail parameter of the weighted families
  double R = 1.0;          // ball radius for boundary_singular
  double charge = 0.0;     // strength of the charge-generating part
  std::uint64_t seed = 0;
};

// Build MKG Cauchy data; the Gauss constraint is integrated to quadrature
// tolerance and q_total recorded.  Throws on non-integrable profiles.
MkgCauchyData mkg_initial_data(const InitialDataFamily& fam, double r_max,
                               double dr_table);
Su2CauchyData su2_initial_data(const InitialDataFamily& fam, double r_max);

// total charge of MKG data by direct volume quadrature (oracle for Q0 tail)
double charge_total_volume_integral(const CplxFn& phi0, const CplxFn& phi1,
                                    double r_max);

// ---------------------------------------------------------------------------
// Null decomposition at a point.
// ---------------------------------------------------------------------------
struct NullDecomposition {
  double alpha = 0.0;      // |F(L, e)| total over sphere frame
  double alpha_bar = 0.0;  // |F(Lbar, e)|
  double rho = 0.0;        // (1/2) F(Lbar, L), signed for U(1)
  double sigma = 0.0;      // |F(e1, e2)|
};

// MKG: rho = Q / r^2 (finite axis limit 0); SU(2): from (d_u w, d_v w, w).
NullDecomposition mkg_null_components(double Q, double r);
NullDecomposition su2_null_components(double w, double dw_du, double dw_dv,
                                      double r);

// null-frame energy density  (1/4)(a^2+ab^2) + (1/2)(rho^2+sigma^2) [+ scalar]
double null_energy_density(const NullDecomposition& n);

// ---------------------------------------------------------------------------
// Sampled state on a hyperboloidal slice and its conformal transport.
// ---------------------------------------------------------------------------
struct HyperSampleMkg {
  double r = 0.0;       // radius of the sample point (slice is a graph over r)
  cplx phi, d_t_phi, d_r_phi;      // gauge-covariant first derivatives
  cplx d_tt_phi, d_tr_phi, d_rr_phi;  // second derivatives (for k = 1 norms)
  double rho = 0.0, d_t_rho = 0.0, d_r_rho = 0.0;
  double a_u = 0.0;     // gauge potential (A_v = 0 gauge) at the sample
};

struct MkgHyperState {
  HyperboloidSlice slice{2.0};
  std::vector<HyperSampleMkg> pts;  // increasing r
  bool has_second_derivatives = false;
};

// state transported to the image slice { t~ = R - R_surf } of the chart;
// uniform grid in r~ obtained by monotone cubic resampling
struct MkgImageSlice {
  double R = 2.0;
  double t_tilde = 0.0;          // the slice sits at t~ = R - R_surf
  std::vector<double> r_tilde;
  std::vector<cplx> phi_t;       // Lambda phi
  std::vector<cplx> d_ttilde;    // D_{t~} (Lambda phi)
  std::vector<cplx> d_rtilde;    // D_{r~} (Lambda phi)
  std::vector<double> rho_t;     // Lambda^2 rho
  std::vector<double> a_rtilde;  // pulled-back radial gauge potential
  double r_tilde_max = 0.0;      // image of the truncation radius
  double tail_deficit = 0.0;     // |integrand| at the truncation edge
};

MkgImageSlice conformal_transport(const MkgHyperState& state,
                                  const ConformalChart& chart, int n_target);

// inverse direction: image-slice data back to samples on the hyperboloid
MkgHyperState conformal_transport_inverse(const MkgImageSlice& img,
                                          const ConformalChart& chart);

// SU(2) curvature components under the chart at one point:
//   alpha~ = Lambda (t*+r)^2 alpha, alpha_bar~ = Lambda (t*-r)^2 alpha_bar,
//   sigma~ = Lambda^2 sigma, rho~ = Lambda^2 rho.
NullDecomposition transport_components(const NullDecomposition& n,
                                       const FrameScales& s);

}  // namespace ymh

#endif
