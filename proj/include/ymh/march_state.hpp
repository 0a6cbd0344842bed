/* march_state.hpp
 *
 * Internal marching window of the double-null evolution; also the payload
 * of the crash-safe checkpoint files (serialised in io.cpp).
 */
#ifndef YMH_MARCH_STATE_HPP
#define YMH_MARCH_STATE_HPP

#include <deque>

#include "ymh/solver.hpp"

namespace ymh {

struct Diag {
  std::vector<cplx> psi;
  std::vector<double> a, q;  // MKG
  std::vector<double> w;     // SU(2)
  void resize_mkg(int n) {
    psi.assign(n, cplx{});
    a.assign(n, 0.0);
    q.assign(n, 0.0);
  }
  void resize_su2(int n) { w.assign(n, 0.0); }
};

// phi-level node arrays of one even diagonal, kept while a hyperboloidal
// surface passes through the marching window
struct HyperNode {
  int d = 0;
  std::vector<cplx> phi, dtphi, drphi;
  std::vector<double> rho, a;
};

struct HyperWork {
  HyperSurfaceRequest spec;
  int next_k = 1;  // next sample radius index (r = 2h * r_stride * k)
  bool done = false;
  MkgHyperState out;
};

struct MarchState {
  Model model = Model::mkg;
  NullGrid grid;
  EvolveOptions opt;
  double w_axis = 1.0;
  int next_diag = 2;  // diagonal to compute next
  Diag d0, d1;        // diagonals next_diag-2 and next_diag-1
  std::deque<HyperNode> band;
  std::vector<HyperWork> hyper_work;
  Trajectory out;     // kept slices and probe rows so far
};

void write_march_checkpoint(const std::string& path, const MarchState& st);
MarchState read_march_checkpoint(const std::string& path);

}  // namespace ymh

#endif
