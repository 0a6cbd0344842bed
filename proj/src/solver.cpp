#include "ymh/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ymh/io.hpp"
#include "ymh/march_state.hpp"

namespace ymh {

const ProbeSeries* Trajectory::find_probe(const std::string& name) const {
  for (const auto& p : probes)
    if (p.name == name) return &p;
  return nullptr;
}

int Trajectory::slice_index_at(double t) const {
  int best = -1;
  double best_t = -1e300;
  auto scan = [&](double ts, int idx) {
    if (ts <= t + 1e-12 && ts > best_t) {
      best_t = ts;
      best = idx;
    }
  };
  if (model == Model::mkg)
    for (size_t i = 0; i < mkg.size(); ++i) scan(mkg[i].t, int(i));
  else
    for (size_t i = 0; i < su2.size(); ++i) scan(su2[i].t, int(i));
  return best;
}

namespace {

// ---- probe helpers ---------------------------------------------------------

void init_probe_series(MarchState& st) {
  auto& probes = st.out.probes;
  const bool mkg = st.model == Model::mkg;
  auto add = [&](const std::string& name, std::vector<std::string> cols) {
    ProbeSeries s;
    s.name = name;
    s.cols = std::move(cols);
    probes.push_back(std::move(s));
  };
  std::vector<std::string> ray_cols =
      mkg ? std::vector<std::string>{"v", "r", "abs_phi", "abs_dv_psi",
                                     "abs_du_psi", "rho", "Q"}
          : std::vector<std::string>{"v", "r", "w", "alpha", "alpha_bar",
                                     "sigma"};
  std::vector<std::string> line_cols =
      mkg ? std::vector<std::string>{"t", "r", "abs_phi", "abs_dv_psi",
                                     "abs_du_psi", "rho", "Q"}
          : std::vector<std::string>{"t", "r", "w", "alpha", "alpha_bar",
                                     "sigma"};
  std::vector<std::string> vray_cols =
      mkg ? std::vector<std::string>{"t", "r", "abs_phi", "abs_r_du_phi",
                                     "abs_r_dv_phi", "rho", "Q"}
          : std::vector<std::string>{"t", "r", "w", "alpha", "alpha_bar",
                                     "sigma"};
  for (double u : st.opt.probes.u_rays)
    add("uray_" + format_double(u), ray_cols);
  for (double v : st.opt.probes.v_rays)
    add("vray_" + format_double(v), vray_cols);
  for (double r : st.opt.probes.r_lines)
    add("rline_" + format_double(r), line_cols);
  if (st.opt.probes.boundary_charge && mkg)
    add("boundary_charge", {"t", "Q"});
  if (st.opt.probes.energy_stride > 0)
    add("energy", {"t", "energy"});
}

// stencil derivatives of the middle diagonal d1 at index m (point (a,b));
// one-sided at the axis and the outer v-boundary
struct PointDerivs {
  cplx du_psi, dv_psi;  // MKG (covariant d_u)
  double dw_du = 0.0, dw_dv = 0.0;
};

struct Window {
  const Diag* D0;
  const Diag* D1;
  const Diag* D2;
  int d1;  // index of the middle diagonal
};

// derivatives at point m of the middle diagonal; one-sided at the edges
PointDerivs derivs_at(const MarchState& st, const Window& w, int m) {
  const NullGrid& g = st.grid;
  const int d1 = w.d1, d0 = d1 - 1, d2 = d1 + 1;
  const int a = d1 / 2 - m, b = d1 - a;
  const int M0 = g.points_on(d0) - 1, M2 = g.points_on(d2) - 1;
  const double h = g.h;
  PointDerivs out;

  const bool mkg = st.model == Model::mkg;

  // v-neighbours
  int m_vp = d2 / 2 - a;      // (a, b+1)
  int m_vm = d0 / 2 - a;      // (a, b-1)
  bool vp_ok = (b + 1) <= g.n_v && m_vp >= 0 && m_vp <= M2;
  bool vm_ok = (b - 1) >= std::abs(a) && m_vm >= 0 && m_vm <= M0;
  // u-neighbours
  int m_up = d2 / 2 - (a + 1);  // (a+1, b)
  int m_um = d0 / 2 - (a - 1);  // (a-1, b)
  bool up_ok = b >= (a + 1) && m_up >= 0 && m_up <= M2;
  bool um_ok = (a - 1) + b >= 0 && m_um >= 0 && m_um <= M0;

  if (mkg) {
    cplx here = w.D1->psi[m];
    cplx dv{}, du{};
    if (vp_ok && vm_ok)
      dv = (w.D2->psi[m_vp] - w.D0->psi[m_vm]) / (2.0 * h);
    else if (vp_ok)
      dv = (w.D2->psi[m_vp] - here) / h;
    else if (vm_ok)
      dv = (here - w.D0->psi[m_vm]) / h;
    if (up_ok && um_ok)
      du = (w.D2->psi[m_up] - w.D0->psi[m_um]) / (2.0 * h);
    else if (up_ok)
      du = (w.D2->psi[m_up] - here) / h;
    else if (um_ok)
      du = (here - w.D0->psi[m_um]) / h;
    out.dv_psi = dv;
    out.du_psi = du + cplx{0.0, 1.0} * w.D1->a[m] * here;
  } else {
    double here = w.D1->w[m];
    double dv = 0.0, du = 0.0;
    if (vp_ok && vm_ok)
      dv = (w.D2->w[m_vp] - w.D0->w[m_vm]) / (2.0 * h);
    else if (vp_ok)
      dv = (w.D2->w[m_vp] - here) / h;
    else if (vm_ok)
      dv = (here - w.D0->w[m_vm]) / h;
    if (up_ok && um_ok)
      du = (w.D2->w[m_up] - w.D0->w[m_um]) / (2.0 * h);
    else if (up_ok)
      du = (w.D2->w[m_up] - here) / h;
    else if (um_ok)
      du = (here - w.D0->w[m_um]) / h;
    out.dw_dv = dv;
    out.dw_du = du;
  }
  return out;
}

void record_middle(MarchState& st, const Window& w) {
  const NullGrid& g = st.grid;
  const int d1 = w.d1;
  const double t = g.t_of(d1);
  const double h = g.h;
  const int M1 = g.points_on(d1) - 1;
  const bool mkg = st.model == Model::mkg;
  auto& probes = st.out.probes;
  size_t pi = 0;

  auto row_for = [&](int m) {
    PointDerivs pd = derivs_at(st, w, m);
    double r = g.r_of(d1, m);  // > 0 (callers skip the axis)
    std::vector<double> vals;
    if (mkg) {
      cplx psi = w.D1->psi[m];
      double rho = w.D1->q[m] / (r * r);
      vals = {0.0, r, std::abs(psi) / r, std::abs(pd.dv_psi),
              std::abs(pd.du_psi), rho, w.D1->q[m]};
    } else {
      auto n = su2_null_components(w.D1->w[m], pd.dw_du, pd.dw_dv, r);
      vals = {0.0, r, w.D1->w[m], n.alpha, n.alpha_bar, n.sigma};
    }
    return vals;
  };

  for (double u : st.opt.probes.u_rays) {
    auto& series = probes[pi++];
    int a = int(std::llround(u / h));
    int m = d1 / 2 - a;
    if (m >= 1 && m < M1) {  // skip axis and outer edge for clean stencils
      auto vals = row_for(m);
      vals[0] = 0.5 * (t + g.r_of(d1, m));  // v
      series.rows.push_back(std::move(vals));
    }
  }
  for (double v : st.opt.probes.v_rays) {
    auto& series = probes[pi++];
    int b = int(std::llround(v / h));
    int m = b - (d1 + 1) / 2;
    if (m >= 1 && m < M1) {
      // columns for the flux along the ingoing cone: t, r, |phi|,
      // |r D_u phi| = |du_psi + psi/r|, |r D_v phi| = |dv_psi - psi/r|
      PointDerivs pd = derivs_at(st, w, m);
      double r = g.r_of(d1, m);
      if (mkg) {
        cplx psi = w.D1->psi[m];
        double rho = w.D1->q[m] / (r * r);
        cplx rdu = pd.du_psi + psi / r;
        cplx rdv = pd.dv_psi - psi / r;
        series.rows.push_back({t, r, std::abs(psi) / r, std::abs(rdu),
                               std::abs(rdv), rho, w.D1->q[m]});
      } else {
        auto n = su2_null_components(w.D1->w[m], pd.dw_du, pd.dw_dv, r);
        series.rows.push_back({t, r, w.D1->w[m], n.alpha, n.alpha_bar, n.sigma});
      }
    }
  }
  for (double rl : st.opt.probes.r_lines) {
    auto& series = probes[pi++];
    int par = d1 & 1;
    double mm = (rl / h - par) / 2.0;
    int m = int(std::llround(mm));
    if (std::abs(mm - m) < 1e-9 && m >= 1 && m < M1) {
      auto vals = row_for(m);
      vals[0] = t;
      series.rows.push_back(std::move(vals));
    }
  }
  if (st.opt.probes.boundary_charge && mkg) {
    auto& series = probes[pi++];
    series.rows.push_back({t, w.D1->q[M1]});
  }
  if (st.opt.probes.energy_stride > 0) {
    auto& series = probes[pi++];
    if (d1 % st.opt.probes.energy_stride == 0) {
      // build a temporary slice with derivatives for the energy integral
      if (mkg) {
        MkgSliceData s;
        s.t = t;
        s.parity = d1 & 1;
        s.psi = w.D1->psi;
        s.psi.resize(M1 + 1);
        s.a_u = w.D1->a;
        s.a_u.resize(M1 + 1);
        s.Q = w.D1->q;
        s.Q.resize(M1 + 1);
        s.du_psi.resize(M1 + 1);
        s.dv_psi.resize(M1 + 1);
        for (int m = 0; m <= M1; ++m) {
          PointDerivs pd = derivs_at(st, w, m);
          s.du_psi[m] = pd.du_psi;
          s.dv_psi[m] = pd.dv_psi;
        }
        s.has_derivatives = true;
        series.rows.push_back({t, mkg_slice_energy(s, h)});
      } else {
        Su2SliceData s;
        s.t = t;
        s.parity = d1 & 1;
        s.w = w.D1->w;
        s.w.resize(M1 + 1);
        s.dw_du.resize(M1 + 1);
        s.dw_dv.resize(M1 + 1);
        for (int m = 0; m <= M1; ++m) {
          PointDerivs pd = derivs_at(st, w, m);
          s.dw_du[m] = pd.dw_du;
          s.dw_dv[m] = pd.dw_dv;
        }
        s.has_derivatives = true;
        series.rows.push_back({t, su2_slice_energy(s, h)});
      }
    }
  }

  // keep the middle diagonal as a slice
  if (st.opt.keep_stride > 0 && d1 % st.opt.keep_stride == 0) {
    if (mkg) {
      MkgSliceData s;
      s.t = t;
      s.parity = d1 & 1;
      s.psi.assign(w.D1->psi.begin(), w.D1->psi.begin() + (M1 + 1));
      s.a_u.assign(w.D1->a.begin(), w.D1->a.begin() + (M1 + 1));
      s.Q.assign(w.D1->q.begin(), w.D1->q.begin() + (M1 + 1));
      s.du_psi.resize(M1 + 1);
      s.dv_psi.resize(M1 + 1);
      for (int m = 0; m <= M1; ++m) {
        PointDerivs pd = derivs_at(st, w, m);
        s.du_psi[m] = pd.du_psi;
        s.dv_psi[m] = pd.dv_psi;
      }
      s.has_derivatives = true;
      st.out.mkg.push_back(std::move(s));
    } else {
      Su2SliceData s;
      s.t = t;
      s.parity = d1 & 1;
      s.w.assign(w.D1->w.begin(), w.D1->w.begin() + (M1 + 1));
      s.dw_du.resize(M1 + 1);
      s.dw_dv.resize(M1 + 1);
      for (int m = 0; m <= M1; ++m) {
        PointDerivs pd = derivs_at(st, w, m);
        s.dw_du[m] = pd.dw_du;
        s.dw_dv[m] = pd.dw_dv;
      }
      s.has_derivatives = true;
      st.out.su2.push_back(std::move(s));
    }
  }
}

// ---- hyperboloidal surface recording ---------------------------------------

// cubic Lagrange on four nodes spaced 2h; s = (t - t_node0) / (2h) in [0, 3]
template <class T>
T lagrange4(const T* x, double s) {
  double l0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
  double l1 = s * (s - 2.0) * (s - 3.0) / 2.0;
  double l2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
  double l3 = s * (s - 1.0) * (s - 2.0) / 6.0;
  return x[0] * l0 + x[1] * l1 + x[2] * l2 + x[3] * l3;
}

template <class T>
T lagrange4_deriv(const T* x, double s, double spacing) {
  double d0 = -((s - 2.0) * (s - 3.0) + (s - 1.0) * (s - 3.0) +
                (s - 1.0) * (s - 2.0)) /
              6.0;
  double d1 =
      ((s - 2.0) * (s - 3.0) + s * (s - 3.0) + s * (s - 2.0)) / 2.0;
  double d2 =
      -((s - 1.0) * (s - 3.0) + s * (s - 3.0) + s * (s - 1.0)) / 2.0;
  double d3 =
      ((s - 1.0) * (s - 2.0) + s * (s - 2.0) + s * (s - 1.0)) / 6.0;
  return (x[0] * d0 + x[1] * d1 + x[2] * d2 + x[3] * d3) / spacing;
}

void push_hyper_node(MarchState& st, const Window& w) {
  const NullGrid& g = st.grid;
  const int d1 = w.d1;
  const int M1 = g.points_on(d1) - 1;
  HyperNode node;
  node.d = d1;
  node.phi.resize(M1 + 1);
  node.dtphi.resize(M1 + 1);
  node.drphi.resize(M1 + 1);
  node.rho.resize(M1 + 1);
  node.a.resize(M1 + 1);
  for (int m = 0; m <= M1; ++m) {
    double r = g.r_of(d1, m);
    PointDerivs pd = derivs_at(st, w, m);
    cplx dtpsi = 0.5 * (pd.du_psi + pd.dv_psi);
    cplx drpsi = 0.5 * (pd.dv_psi - pd.du_psi);
    if (m == 0) {
      // axis limits: phi(0) = d_r psi(0), D_r phi(0) = 0 by parity
      double r1 = g.r_of(d1, 1);
      node.phi[0] = w.D1->psi[1] / r1;
      node.dtphi[0] = cplx{0.0, 0.0};
      node.drphi[0] = cplx{0.0, 0.0};
      node.rho[0] = 0.0;
      node.a[0] = 0.0;
      continue;
    }
    node.phi[m] = w.D1->psi[m] / r;
    node.dtphi[m] = dtpsi / r;
    node.drphi[m] = drpsi / r - w.D1->psi[m] / (r * r);
    node.rho[m] = w.D1->q[m] / (r * r);
    node.a[m] = w.D1->a[m];
  }
  st.band.push_back(std::move(node));
  while (st.band.size() > 6) st.band.pop_front();
}

void finalize_hyper_samples(MarchState& st) {
  const NullGrid& g = st.grid;
  const double h = g.h;
  if (st.band.empty()) return;
  const int newest = st.band.back().d;

  for (auto& work : st.hyper_work) {
    if (work.done) continue;
    HyperboloidSlice surf(work.spec.R_chart, work.spec.R_surf);
    for (;;) {
      int m = work.spec.r_stride * work.next_k;  // radial lattice index
      double r = 2.0 * m * h;
      if (r > work.spec.r_max) {
        work.done = true;
        break;
      }
      double t_rel = surf.t(r) - g.t_origin;
      int j = int(std::floor(t_rel / (2.0 * h)));
      if (j < 1) {  // surface below the second node; skip this radius
        work.next_k += 1;
        continue;
      }
      int d_top = 2 * (j + 2);
      if (d_top > 2 * g.n_v || m + 1 > g.points_on(d_top) - 1) {
        work.done = true;  // surface exits the grid
        break;
      }
      if (newest < d_top) break;  // wait for more diagonals

      // locate the four nodes 2(j-1) .. 2(j+2) in the band
      const HyperNode* nodes[4] = {nullptr, nullptr, nullptr, nullptr};
      for (const auto& bn : st.band)
        for (int i = 0; i < 4; ++i)
          if (bn.d == 2 * (j - 1 + i)) nodes[i] = &bn;
      if (!nodes[0] || !nodes[1] || !nodes[2] || !nodes[3]) {
        work.next_k += 1;  // band already moved past; should not happen
        continue;
      }

      double s = (t_rel - 2.0 * (j - 1) * h) / (2.0 * h);
      auto gather_c = [&](auto member, int mm) {
        cplx x[4];
        for (int i = 0; i < 4; ++i) x[i] = ((*nodes[i]).*member)[mm];
        return std::pair<cplx, cplx>(lagrange4(x, s),
                                     lagrange4_deriv(x, s, 2.0 * h));
      };
      auto gather_r = [&](auto member, int mm) {
        double x[4];
        for (int i = 0; i < 4; ++i) x[i] = ((*nodes[i]).*member)[mm];
        return std::pair<double, double>(lagrange4(x, s),
                                         lagrange4_deriv(x, s, 2.0 * h));
      };
      // radial derivative arrays on each node (central, spacing 2h)
      auto radial_c = [&](auto member, int i, int mm) {
        const auto& v = (*nodes[i]).*member;
        return (v[mm + 1] - v[mm - 1]) / (4.0 * h);
      };
      auto radial_r = [&](auto member, int i, int mm) {
        const auto& v = (*nodes[i]).*member;
        return (v[mm + 1] - v[mm - 1]) / (4.0 * h);
      };

      HyperSampleMkg smp;
      smp.r = r;
      auto [phi, dt_phi_plain] = gather_c(&HyperNode::phi, m);
      auto [dtphi, dtt_plain] = gather_c(&HyperNode::dtphi, m);
      auto [drphi, dtr_plain] = gather_c(&HyperNode::drphi, m);
      auto [rho, dt_rho] = gather_r(&HyperNode::rho, m);
      auto [a_u, a_unused] = gather_r(&HyperNode::a, m);
      (void)dt_phi_plain;
      (void)a_unused;
      double a_t = 0.5 * a_u, a_r = -0.5 * a_u;
      smp.phi = phi;
      smp.d_t_phi = dtphi;
      smp.d_r_phi = drphi;
      smp.rho = rho;
      smp.d_t_rho = dt_rho;
      smp.a_u = a_u;
      // covariant second derivatives
      smp.d_tt_phi = dtt_plain + cplx{0.0, 1.0} * a_t * dtphi;
      smp.d_tr_phi = dtr_plain + cplx{0.0, 1.0} * a_t * drphi;
      {
        cplx ddr[4];
        double drho[4];
        for (int i = 0; i < 4; ++i) {
          ddr[i] = radial_c(&HyperNode::drphi, i, m) +
                   cplx{0.0, 1.0} * (-0.5 * (*nodes[i]).a[m]) *
                       (*nodes[i]).drphi[m];
          drho[i] = radial_r(&HyperNode::rho, i, m);
        }
        smp.d_rr_phi = lagrange4(ddr, s);
        smp.d_r_rho = lagrange4(drho, s);
        (void)a_r;
      }
      work.out.pts.push_back(smp);
      work.next_k += 1;
    }
  }
}

bool compute_next_diagonal(MarchState& st, Diag& d2) {
  const NullGrid& g = st.grid;
  const int d = st.next_diag;  // diagonal to compute
  const int n2 = g.points_on(d);
  const int n1 = g.points_on(d - 1);
  const int n0 = g.points_on(d - 2);
  (void)n0;
  const int p = d & 1;
  const double h = g.h;
  const bool mkg = st.model == Model::mkg;

  if (mkg)
    d2.resize_mkg(n2);
  else
    d2.resize_su2(n2);

  const int m_start = (p == 0) ? 1 : 0;
  if (p == 0) {
    // axis point
    if (mkg) {
      d2.psi[0] = 0.0;
      d2.a[0] = 0.0;
      d2.q[0] = 0.0;
    } else {
      d2.w[0] = st.w_axis;
    }
  }

  double worst = 0.0;
  for (int m = m_start; m < n2; ++m) {
    const double r_c = (2 * m + p) * h;
    const int mw = m - 1 + p;
    const int me = m + p;
    if (mw < 0 || me >= n1) continue;  // cannot happen on interior cells
    if (mkg) {
      MkgCell cell;
      cell.psi_s = st.d0.psi[m];
      cell.psi_w = st.d1.psi[mw];
      cell.psi_e = st.d1.psi[me];
      cell.a_c = 0.5 * (st.d1.a[mw] + st.d1.a[me]);
      cell.q_c = 0.5 * (st.d1.q[mw] + st.d1.q[me]);
      cell.r_c = r_c;
      cell.h = h;
      d2.psi[m] = mkg_cell_solve(cell);
      worst = std::max(worst, std::abs(d2.psi[m]));
    } else {
      Su2Cell cell;
      cell.w_s = st.d0.w[m];
      cell.w_w = st.d1.w[mw];
      cell.w_e = st.d1.w[me];
      cell.r_c = r_c;
      cell.h = h;
      d2.w[m] = su2_cell_solve(cell);
      worst = std::max(worst, std::abs(d2.w[m]));
    }
  }

  if (mkg) {
    // advance Q and a along each u-row (v-predecessor is the W corner)
    for (int m = m_start; m < n2; ++m) {
      const int mw = m - 1 + p;
      const double r_hi = (2 * m + p) * h;
      const double r_mid = r_hi - 0.5 * h;
      double dq = mkg_charge_increment(st.d1.psi[mw], d2.psi[m]);
      d2.q[m] = st.d1.q[mw] + dq;
      double q_mid = 0.5 * (st.d1.q[mw] + d2.q[m]);
      d2.a[m] = st.d1.a[mw] - 2.0 * q_mid / (r_mid * r_mid) * h;
    }
  }

  if (worst > st.opt.ceiling) {
    st.out.blew_up = true;
    st.out.blow_diag = d;
    st.out.blow_value = worst;
    return false;
  }
  return true;
}

Trajectory run_march(MarchState& st) {
  const NullGrid& g = st.grid;
  Diag d2;
  const int d_max = 2 * g.n_v;
  while (st.next_diag <= d_max) {
    if (!compute_next_diagonal(st, d2)) break;
    Window w{&st.d0, &st.d1, &d2, st.next_diag - 1};
    record_middle(st, w);
    if (st.model == Model::mkg && !st.hyper_work.empty() &&
        ((st.next_diag - 1) & 1) == 0) {
      push_hyper_node(st, w);
      finalize_hyper_samples(st);
    }
    // shift the window
    std::swap(st.d0, st.d1);
    std::swap(st.d1, d2);
    st.next_diag += 1;
    if (st.opt.checkpoint_stride > 0 && !st.opt.checkpoint_path.empty() &&
        (st.next_diag % st.opt.checkpoint_stride == 0))
      write_march_checkpoint(st.opt.checkpoint_path, st);
    if (st.opt.stop_after_diagonal > 0 &&
        st.next_diag - 1 >= st.opt.stop_after_diagonal) {
      if (!st.opt.checkpoint_path.empty())
        write_march_checkpoint(st.opt.checkpoint_path, st);
      break;
    }
  }
  for (auto& hw : st.hyper_work) st.out.hyper.push_back(std::move(hw.out));
  return std::move(st.out);
}

void keep_initial_slice_mkg(MarchState& st, const MkgCauchyData& data) {
  const NullGrid& g = st.grid;
  const int n = g.points_on(0);
  MkgSliceData s;
  s.t = g.t_origin;
  s.parity = 0;
  s.psi.resize(n);
  s.a_u.assign(n, 0.0);
  s.Q.resize(n);
  s.du_psi.resize(n);
  s.dv_psi.resize(n);
  for (int m = 0; m < n; ++m) {
    double r = 2.0 * m * g.h;
    s.psi[m] = st.d0.psi[m];
    s.Q[m] = st.d0.q[m];
    cplx psi1 = data.psi1(r);
    cplx psi0r = data.psi0_r(r);
    s.du_psi[m] = psi1 - psi0r;  // a = 0 on the initial slice
    s.dv_psi[m] = psi1 + psi0r;
  }
  s.has_derivatives = true;
  st.out.mkg.push_back(std::move(s));
}

void keep_initial_slice_su2(MarchState& st, const Su2CauchyData& data) {
  const NullGrid& g = st.grid;
  const int n = g.points_on(0);
  Su2SliceData s;
  s.t = g.t_origin;
  s.parity = 0;
  s.w.resize(n);
  s.dw_du.resize(n);
  s.dw_dv.resize(n);
  for (int m = 0; m < n; ++m) {
    double r = 2.0 * m * g.h;
    s.w[m] = st.d0.w[m];
    double w1 = data.w1(r), w0r = data.w0_r(r);
    s.dw_du[m] = w1 - w0r;
    s.dw_dv[m] = w1 + w0r;
  }
  s.has_derivatives = true;
  st.out.su2.push_back(std::move(s));
}

}  // namespace

Trajectory evolve_mkg(const MkgCauchyData& data, const NullGrid& grid,
                      const EvolveOptions& opt) {
  if (!opt.hyper_surfaces.empty() && opt.checkpoint_stride > 0)
    throw std::invalid_argument(
        "evolve_mkg: hyperboloid recording and checkpointing are exclusive");
  MarchState st;
  st.model = Model::mkg;
  st.grid = grid;
  st.opt = opt;
  st.out.model = Model::mkg;
  st.out.grid = grid;
  st.out.keep_stride = opt.keep_stride;
  for (const auto& spec : opt.hyper_surfaces) {
    HyperWork hw;
    hw.spec = spec;
    hw.out.slice = HyperboloidSlice(spec.R_chart, spec.R_surf);
    hw.out.has_second_derivatives = true;
    st.hyper_work.push_back(std::move(hw));
  }

  const double h = grid.h;
  const int n0 = grid.points_on(0), n1 = grid.points_on(1);
  st.d0.resize_mkg(n0);
  st.d1.resize_mkg(n1);

  // diagonal 0: the Cauchy slice, radii 2 m h; gauge a = 0
  for (int m = 0; m < n0; ++m) {
    double r = 2.0 * m * h;
    st.d0.psi[m] = data.psi0(r);
    st.d0.q[m] = data.Q0(r);
  }
  st.d0.psi[0] = 0.0;
  st.d0.q[0] = 0.0;

  // diagonal 1 (t = t0 + h, radii (2m+1) h) by Taylor expansion:
  //   psi_tt = psi_rr + G,  G = -i a dv_psi + i Q psi / r^2, a = 0 at t0
  for (int m = 0; m < n1; ++m) {
    double r = (2.0 * m + 1.0) * h;
    cplx psi0 = data.psi0(r);
    cplx g = cplx{0.0, 1.0} * data.Q0(r) * psi0 / (r * r);
    st.d1.psi[m] = psi0 + h * data.psi1(r) + 0.5 * h * h * (data.psi0_rr(r) + g);
  }
  // Q and a on diagonal 1 by one v-step along each row from diagonal 0
  for (int m = 0; m < n1; ++m) {
    // point (a, b) = (-m, m+1); predecessor (-m, m) is index m on diagonal 0
    double dq = mkg_charge_increment(st.d0.psi[m], st.d1.psi[m]);
    st.d1.q[m] = st.d0.q[m] + dq;
    double r_mid = (2.0 * m + 0.5) * h;
    double q_mid = 0.5 * (st.d0.q[m] + st.d1.q[m]);
    st.d1.a[m] = st.d0.a[m] - 2.0 * q_mid / (r_mid * r_mid) * h;
  }

  init_probe_series(st);
  if (opt.keep_stride > 0) keep_initial_slice_mkg(st, data);
  return run_march(st);
}

Trajectory evolve_su2(const Su2CauchyData& data, const NullGrid& grid,
                      const EvolveOptions& opt) {
  MarchState st;
  st.model = Model::su2;
  st.grid = grid;
  st.opt = opt;
  st.w_axis = data.w_axis;
  st.out.model = Model::su2;
  st.out.grid = grid;
  st.out.keep_stride = opt.keep_stride;

  const double h = grid.h;
  const int n0 = grid.points_on(0), n1 = grid.points_on(1);
  st.d0.resize_su2(n0);
  st.d1.resize_su2(n1);
  for (int m = 0; m < n0; ++m) st.d0.w[m] = data.w0(2.0 * m * h);
  st.d0.w[0] = data.w_axis;
  for (int m = 0; m < n1; ++m) {
    double r = (2.0 * m + 1.0) * h;
    double w0 = data.w0(r);
    double g = w0 * (1.0 - w0 * w0) / (r * r);
    st.d1.w[m] = w0 + h * data.w1(r) + 0.5 * h * h * (data.w0_rr(r) + g);
  }
  init_probe_series(st);
  if (opt.keep_stride > 0) keep_initial_slice_su2(st, data);
  return run_march(st);
}

Trajectory resume_evolution(const std::string& checkpoint_path,
                            int new_stop_after) {
  MarchState st = read_march_checkpoint(checkpoint_path);
  st.opt.stop_after_diagonal = new_stop_after;
  return run_march(st);
}

// ---------------------------------------------------------------------------
// Slice energies
// ---------------------------------------------------------------------------

double mkg_slice_energy(const MkgSliceData& s, double h, double r_max) {
  if (!s.has_derivatives)
    throw std::invalid_argument("mkg_slice_energy: slice lacks derivatives");
  const int n = int(s.psi.size());
  std::vector<double> e(n, 0.0);
  for (int m = 0; m < n; ++m) {
    double r = (2.0 * m + s.parity) * h;
    if (r == 0.0) continue;
    cplx rdu = s.du_psi[m] + s.psi[m] / r;
    cplx rdv = s.dv_psi[m] - s.psi[m] / r;
    e[m] = 0.5 * s.Q[m] * s.Q[m] / (r * r) +
           0.5 * (std::norm(rdu) + std::norm(rdv));
  }
  if (s.parity == 0 && n > 1) e[0] = e[1];  // axis limit
  double dr = 2.0 * h;
  double total = (s.parity == 1) ? e[0] * h : 0.0;  // axis sliver [0, h)
  for (int m = 0; m + 1 < n; ++m) {
    double r_hi = (2.0 * (m + 1) + s.parity) * h;
    if (r_max >= 0.0 && r_hi > r_max + 1e-12) break;
    total += 0.5 * (e[m] + e[m + 1]) * dr;
  }
  return 4.0 * M_PI * total;
}

double su2_slice_energy(const Su2SliceData& s, double h, double r_max) {
  if (!s.has_derivatives)
    throw std::invalid_argument("su2_slice_energy: slice lacks derivatives");
  const int n = int(s.w.size());
  std::vector<double> e(n, 0.0);
  for (int m = 0; m < n; ++m) {
    double r = (2.0 * m + s.parity) * h;
    double grad = 0.5 * (s.dw_du[m] * s.dw_du[m] + s.dw_dv[m] * s.dw_dv[m]);
    double pot = 0.0;
    if (r > 0.0) {
      double z = 1.0 - s.w[m] * s.w[m];
      pot = 0.5 * z * z / (r * r);
    }
    e[m] = grad + pot;
  }
  double dr = 2.0 * h;
  double total = (s.parity == 1) ? e[0] * h : 0.0;  // axis sliver [0, h)
  for (int m = 0; m + 1 < n; ++m) {
    double r_hi = (2.0 * (m + 1) + s.parity) * h;
    if (r_max >= 0.0 && r_hi > r_max + 1e-12) break;
    total += 0.5 * (e[m] + e[m + 1]) * dr;
  }
  return 4.0 * M_PI * total;
}

// ---------------------------------------------------------------------------
// Exact oracles
// ---------------------------------------------------------------------------

DalembertExact::DalembertExact(RealFn w1, double r_support_max, double tol)
    : w1_(std::move(w1)), x_max_(r_support_max) {
  // table of M(x) = int_0^x s w1(s) ds on [0, x_max]
  int n = 4096;
  std::vector<double> xs(n + 1), ms(n + 1);
  xs[0] = 0.0;
  ms[0] = 0.0;
  for (int k = 1; k <= n; ++k) {
    double lo = (k - 1) * x_max_ / n, hi = k * x_max_ / n;
    xs[k] = hi;
    auto f = [&](double s) { return s * w1_(s); };
    ms[k] = ms[k - 1] + adaptive_simpson(f, lo, hi, tol / n);
  }
  m_table_ = MonotoneCubic(std::move(xs), std::move(ms));
}

double DalembertExact::M(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= x_max_) return m_table_(x_max_);
  return m_table_(x);
}

double DalembertExact::psi(double t, double r) const {
  return 0.5 * (M(t + r) - M(std::abs(t - r)));
}

double DalembertExact::w(double t, double r) const {
  if (r > 1e-4 * (1.0 + t)) return psi(t, r) / r;
  return t * w1_(t);  // axis limit
}

double kirchhoff_eval(const RealFn& w1, const SpacetimePoint& q, double tol) {
  if (!(q.t > 0.0)) throw std::invalid_argument("kirchhoff_eval: need t0 > 0");
  auto f = [&](double mu) { return w1(sphere_radius(q.r, q.t, mu)); };
  return 0.5 * q.t * adaptive_simpson(f, -1.0, 1.0, tol);
}

double dalembert_point(const RealFn& w1, double t, double r, double tol) {
  auto f = [&](double s) { return s * w1(s); };
  if (r < 1e-4 * (1.0 + t)) return t * w1(t);
  double lo = std::abs(t - r), hi = t + r;
  return 0.5 * adaptive_simpson(f, lo, hi, tol) / r;
}

double linear_weighted_energy(const RealFn& w1, const RealFn& dw1, double gamma,
                              double R) {
  auto f2 = [&](double r) { return w1(r) * w1(r) * r * r; };
  auto df2 = [&](double r) { return dw1(r) * dw1(r) * r * r; };
  return 4.0 * M_PI * (integrate_weight_pow(f2, gamma, 0.0, R, R) +
                       integrate_weight_pow(df2, gamma + 2.0, 0.0, R, R));
}

EnvelopeFit prop41_envelope(const RealFn& w1, const RealFn& dw1, double gamma,
                            double R, int n_samples) {
  EnvelopeFit fit;
  fit.energy = linear_weighted_energy(w1, dw1, gamma, R);
  if (fit.energy <= 0.0) return fit;
  DalembertExact ex(w1, R);
  // deterministic sample sweep of J^+(B_R)
  int nt = n_samples, nr = n_samples;
  for (int i = 1; i < nt; ++i) {
    double t = R * i / double(nt);
    for (int j = 0; j < nr; ++j) {
      double r = (R - t) * (j + 0.5) / double(nr);
      double wv = ex.w(t, r);
      double c = wv * wv * std::pow(R - t, 1.0 + gamma) / fit.energy;
      if (c > fit.C) {
        fit.C = c;
        fit.argmax = {t, r};
      }
    }
  }
  return fit;
}

RichardsonResult richardson_order(double f_h, double f_h2, double f_h4,
                                  double noise_floor) {
  RichardsonResult r;
  r.coarse_diff = std::abs(f_h - f_h2);
  r.fine_diff = std::abs(f_h2 - f_h4);
  double scale = std::max({std::abs(f_h), std::abs(f_h2), std::abs(f_h4), 1.0});
  if (r.coarse_diff < noise_floor * scale || r.fine_diff < noise_floor * scale) {
    r.sub_noise = true;
    return r;
  }
  r.order = std::log2(r.coarse_diff / r.fine_diff);
  return r;
}

Trajectory exact_free_wave_trajectory(const DalembertExact& ex,
                                      const NullGrid& grid, int keep_stride) {
  Trajectory tr;
  tr.model = Model::mkg;
  tr.grid = grid;
  tr.keep_stride = keep_stride;
  for (int d = 0; d <= 2 * grid.n_v; d += keep_stride) {
    MkgSliceData s;
    s.t = grid.t_of(d);
    s.parity = d & 1;
    int n = grid.points_on(d);
    s.psi.resize(n);
    s.a_u.assign(n, 0.0);
    s.Q.assign(n, 0.0);
    s.du_psi.resize(n);
    s.dv_psi.resize(n);
    for (int m = 0; m < n; ++m) {
      double r = grid.r_of(d, m);
      s.psi[m] = ex.psi(s.t, r);
      s.du_psi[m] = ex.dpsi_du(s.t, r);
      s.dv_psi[m] = ex.dpsi_dv(s.t, r);
    }
    s.has_derivatives = true;
    tr.mkg.push_back(std::move(s));
  }
  return tr;
}

}  // namespace ymh
