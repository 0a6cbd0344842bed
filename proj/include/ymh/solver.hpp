/* solver.hpp
 *
 * Double-null characteristic integration of the reduced models on the
 * triangle { t >= t_origin, r >= 0, v <= v_max }.  Lattice points are
 * (a, b) with u = a h, v = b h (relative to t_origin); a diagonal of
 * constant t = (a + b) h holds radii r_m = (2m + parity) h.  The marching
 * window is three diagonals: the diamond
 *
 *        N = (a+1, b+1)          psi_N = psi_W + psi_E - psi_S
 *      W = (a+1, b)  E = (a, b+1)        + h^2 * rhs(cell centre)
 *        S = (a, b)
 *
 * is solved cell by cell (the MKG cell is linear in psi_N, the SU(2) cell
 * is a contraction); the charge aspect Q and the gauge potential A_u are
 * then advanced along each u-row by midpoint increments.  The scheme is
 * exactly causal and second-order accurate.
 *
 * Axis closure: psi = 0, Q = 0, A_u = 0 (MKG) and w = w_axis (SU(2)) are
 * imposed strongly at r = 0; axis points only occur on even diagonals so
 * the Taylor-filled second row never divides by r = 0.
 */
#ifndef YMH_SOLVER_HPP
#define YMH_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ymh/fields.hpp"

namespace ymh {

struct NullGrid {
  double h = 1.0 / 256.0;
  int n_v = 256;            // v_max = n_v * h
  double t_origin = 0.0;

  double v_max() const { return n_v * h; }
  // number of points on diagonal d (d = 0 .. 2 n_v)
  int points_on(int d) const { return n_v - (d + 1) / 2 + 1; }
  double t_of(int d) const { return t_origin + d * h; }
  double r_of(int d, int m) const { return (2 * m + (d & 1)) * h; }
};

struct ProbeSet {
  std::vector<double> u_rays;   // record along u = const (grid-aligned)
  std::vector<double> v_rays;   // record along v = const (ingoing cones)
  std::vector<double> r_lines;  // record along r = const (timelike lines)
  bool boundary_charge = false; // outermost Q per diagonal (MKG)
  int energy_stride = 0;        // slice energy every k diagonals (0 = off)
};

// Request to sample the fields (with first and second covariant derivatives)
// on a hyperboloidal graph t = t_surf(r) during an MKG evolution.  Values at
// each sample radius come from radial cubic interpolation on four bracketing
// even diagonals followed by cubic interpolation in t.
struct HyperSurfaceRequest {
  double R_chart = 2.0;
  double R_surf = 2.0;
  int r_stride = 2;      // sample radii r = 2h * r_stride * k
  double r_max = 1e300;  // stop sampling beyond this radius
};

struct ProbeSeries {
  std::string name;
  std::vector<std::string> cols;
  std::vector<std::vector<double>> rows;
};

struct MkgSliceData {
  double t = 0.0;
  int parity = 0;
  std::vector<cplx> psi;
  std::vector<double> a_u, Q;
  // covariant derivatives D_u psi = (d_u + i a) psi and d_v psi, filled when
  // the slice passed through the middle of the marching window
  std::vector<cplx> du_psi, dv_psi;
  bool has_derivatives = false;
};

struct Su2SliceData {
  double t = 0.0;
  int parity = 0;
  std::vector<double> w;
  std::vector<double> dw_du, dw_dv;
  bool has_derivatives = false;
};

struct Trajectory {
  Model model = Model::mkg;
  NullGrid grid;
  std::uint64_t config_hash = 0;
  int keep_stride = 0;
  std::vector<MkgSliceData> mkg;
  std::vector<Su2SliceData> su2;
  std::vector<ProbeSeries> probes;
  std::vector<MkgHyperState> hyper;  // one per HyperSurfaceRequest
  bool blew_up = false;
  int blow_diag = -1;
  double blow_value = 0.0;

  const ProbeSeries* find_probe(const std::string& name) const;
  // slice index with t closest below/at t (kept slices only)
  int slice_index_at(double t) const;
};

struct EvolveOptions {
  int keep_stride = 0;        // 0 keeps only the first and last diagonals
  double ceiling = 1e8;
  ProbeSet probes;
  std::vector<HyperSurfaceRequest> hyper_surfaces;  // MKG only
  std::string checkpoint_path;  // write a checkpoint every checkpoint_stride
  int checkpoint_stride = 0;    // incompatible with hyper_surfaces
  int stop_after_diagonal = -1;  // stop early (resume from checkpoint later)
};

Trajectory evolve_mkg(const MkgCauchyData& data, const NullGrid& grid,
                      const EvolveOptions& opt);
Trajectory evolve_su2(const Su2CauchyData& data, const NullGrid& grid,
                      const EvolveOptions& opt);

// Continue a checkpointed run; stops after new_stop_after when positive.
Trajectory resume_evolution(const std::string& checkpoint_path,
                            int new_stop_after = -1);

// ---------------------------------------------------------------------------
// Exact free-wave oracles (spherical d'Alembert).  With M(x) = int_0^x s
// w1(s) ds and data w(0) = 0, d_t w(0) = w1:
//   r w(t, r) = (M(t + r) - M(|t - r|)) / 2.
// ---------------------------------------------------------------------------
class DalembertExact {
 public:
  DalembertExact(RealFn w1, double r_support_max, double tol = 1e-12);
  double psi(double t, double r) const;   // r * w
  double w(double t, double r) const;     // value (axis limit handled)
  double dpsi_dv(double t, double r) const { return 2.0 * vv(t, r) * w1_(2.0 * vv(t, r)); }
  double dpsi_du(double t, double r) const {
    double u = 0.5 * (t - r);
    return -2.0 * u * w1_(2.0 * std::abs(u));
  }

 private:
  double vv(double t, double r) const { return 0.5 * (t + r); }
  double M(double x) const;
  RealFn w1_;
  MonotoneCubic m_table_;
  double x_max_;
};

// Kirchhoff point evaluation of the same wave:
//   w(t0, x0) = (t0 / 2) int_{-1}^{1} w1(sphere_radius(r0, t0, mu)) dmu.
double kirchhoff_eval(const RealFn& w1, const SpacetimePoint& q,
                      double tol = 1e-12);

// Single-point d'Alembert value by direct adaptive quadrature (no table);
// the high-accuracy oracle for kirchhoff_eval.
double dalembert_point(const RealFn& w1, double t, double r,
                       double tol = 1e-13);

// Fitted envelope constant of the linear decay estimate:
//   C = max over samples of |w|^2 (R - t)^{1+gamma} / E_gamma[w1](B_R).
struct EnvelopeFit {
  double C = 0.0;
  double energy = 0.0;  // E_gamma[w1](B_R)
  SpacetimePoint argmax;
};
EnvelopeFit prop41_envelope(const RealFn& w1, const RealFn& dw1, double gamma,
                            double R, int n_samples);
// the weighted data energy itself (radial reduction of E_gamma[w])
double linear_weighted_energy(const RealFn& w1, const RealFn& dw1, double gamma,
                              double R);

// Observed convergence order from three co-located runs.
struct RichardsonResult {
  double order = 0.0;
  double coarse_diff = 0.0;
  double fine_diff = 0.0;
  bool sub_noise = false;
};
RichardsonResult richardson_order(double f_h, double f_h2, double f_h4,
                                  double noise_floor = 1e-13);

// ---------------------------------------------------------------------------
// Slice functionals used by probes and diagnostics.
// ---------------------------------------------------------------------------
double mkg_slice_energy(const MkgSliceData& s, double h, double r_max = -1.0);
double su2_slice_energy(const Su2SliceData& s, double h, double r_max = -1.0);

// Fill a trajectory with the exact free wave (for cross-module oracles).
Trajectory exact_free_wave_trajectory(const DalembertExact& ex,
                                      const NullGrid& grid, int keep_stride);

}  // namespace ymh

#endif
