#include "ymh/fields.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace ymh {

namespace {

constexpr cplx kI{0.0, 1.0};

// smooth compactly supported bump, B(0) = 1, support |x| < 1
struct Bump {
  double val(double x) const {
    double z = 1.0 - x * x;
    return z > 0.0 ? std::exp(1.0 - 1.0 / z) : 0.0;
  }
  double d1(double x) const {
    double z = 1.0 - x * x;
    if (z <= 0.0) return 0.0;
    return val(x) * (-2.0 * x / (z * z));
  }
  double d2(double x) const {
    double z = 1.0 - x * x;
    if (z <= 0.0) return 0.0;
    double a = -2.0 * x / (z * z);
    double da = -2.0 / (z * z) - 8.0 * x * x / (z * z * z);
    return val(x) * (a * a + da);
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Cell updates
// ---------------------------------------------------------------------------

cplx mkg_cell_residual(const MkgCell& c) {
  cplx dv = (c.psi_n - c.psi_w + c.psi_e - c.psi_s) / (2.0 * c.h);
  cplx psi_c = 0.25 * (c.psi_n + c.psi_w + c.psi_e + c.psi_s);
  cplx rhs = -kI * c.a_c * dv + kI * c.q_c * psi_c / (c.r_c * c.r_c);
  return (c.psi_n - c.psi_w - c.psi_e + c.psi_s) / (c.h * c.h) - rhs;
}

cplx mkg_cell_solve(const MkgCell& c) {
  double r2 = c.r_c * c.r_c;
  cplx ah = kI * (0.5 * c.a_c * c.h);
  cplx qh = kI * (0.25 * c.q_c * c.h * c.h / r2);
  cplx num = c.psi_w + c.psi_e - c.psi_s + ah * (c.psi_w - c.psi_e + c.psi_s) +
             qh * (c.psi_w + c.psi_e + c.psi_s);
  cplx den = 1.0 + ah - qh;
  return num / den;
}

double su2_cell_residual(const Su2Cell& c) {
  double wc = 0.25 * (c.w_n + c.w_w + c.w_e + c.w_s);
  double rhs = wc * (1.0 - wc * wc) / (c.r_c * c.r_c);
  return (c.w_n - c.w_w - c.w_e + c.w_s) / (c.h * c.h) - rhs;
}

double su2_cell_solve(const Su2Cell& c) {
  double base = c.w_w + c.w_e - c.w_s;
  double wn = base;
  double h2r2 = c.h * c.h / (c.r_c * c.r_c);
  for (int it = 0; it < 3; ++it) {
    double wc = 0.25 * (wn + c.w_w + c.w_e + c.w_s);
    wn = base + h2r2 * wc * (1.0 - wc * wc);
  }
  return wn;
}

// ---------------------------------------------------------------------------
// Null components and energy densities
// ---------------------------------------------------------------------------

NullDecomposition mkg_null_components(double Q, double r) {
  NullDecomposition n;
  n.rho = (r > 0.0) ? Q / (r * r) : 0.0;
  return n;
}

NullDecomposition su2_null_components(double w, double dw_du, double dw_dv,
                                      double r) {
  NullDecomposition n;
  if (r > 0.0) {
    n.alpha = std::sqrt(2.0) * std::abs(dw_dv) / r;
    n.alpha_bar = std::sqrt(2.0) * std::abs(dw_du) / r;
    n.sigma = std::abs(1.0 - w * w) / (r * r);
  }
  return n;
}

double null_energy_density(const NullDecomposition& n) {
  return 0.25 * (n.alpha * n.alpha + n.alpha_bar * n.alpha_bar) +
         0.5 * (n.rho * n.rho + n.sigma * n.sigma);
}

// ---------------------------------------------------------------------------
// Initial data families
// ---------------------------------------------------------------------------

namespace {

struct Profile {
  CplxFn phi0, phi1;
  RealFn dphi0, d2phi0;
  double r_data_max = 0.0;
};

Profile make_mkg_profile(const InitialDataFamily& fam) {
  Profile p;
  Bump bump;
  const double a = fam.amplitude;

  if (fam.profile == "bump") {
    // the linear data class: phi0 = 0, phi1 = compact bump (free-wave probe)
    double s = fam.support, c = 2.0 * fam.support;
    p.phi0 = [](double) { return cplx{0.0, 0.0}; };
    p.dphi0 = [](double) { return 0.0; };
    p.d2phi0 = [](double) { return 0.0; };
    p.phi1 = [=](double r) { return cplx{a * bump.val((r - c) / s), 0.0}; };
    p.r_data_max = c + s;
  } else if (fam.profile == "charged_lump") {
    double s = fam.support;
    p.phi0 = [=](double r) { return cplx{a * bump.val(r / s), 0.0}; };
    p.dphi0 = [=](double r) { return a * bump.d1(r / s) / s; };
    p.d2phi0 = [=](double r) { return a * bump.d2(r / s) / (s * s); };
    // phi1 = -i c phi0 gives q0 = c int |phi0|^2 r^2 dr; c fixed afterwards
    p.phi1 = [=](double r) { return -kI * cplx{a * bump.val(r / s), 0.0}; };
    p.r_data_max = s;
  } else if (fam.profile == "boundary_singular") {
    // odd-extended power: phi0 = a[(R-r)^{s+1} - (R+r)^{s+1}], s = sigma,
    // phi1 = d_r phi0 (+ i charge bump phi0): D_Lbar phi regular,
    // D_L phi ~ (R-r)^{sigma}
    double R = fam.R, s1 = fam.sigma + 1.0;
    p.phi0 = [=](double r) {
      return cplx{a * (std::pow(R - r, s1) - std::pow(R + r, s1)), 0.0};
    };
    p.dphi0 = [=](double r) {
      return -a * s1 * (std::pow(R - r, s1 - 1.0) + std::pow(R + r, s1 - 1.0));
    };
    p.d2phi0 = [=](double r) {
      return a * s1 * (s1 - 1.0) *
             (std::pow(R - r, s1 - 2.0) - std::pow(R + r, s1 - 2.0));
    };
    double cs = 0.5 * R;  // charge bump support, away from the boundary
    bool charged = fam.charge != 0.0;
    p.phi1 = [=, dphi0 = p.dphi0, phi0 = p.phi0](double r) {
      cplx v = dphi0(r);
      if (charged) v += -kI * bump.val(r / cs) * phi0(r);
      return v;
    };
    p.r_data_max = R;
  } else if (fam.profile == "weighted") {
    // tail (1+r^2)^{-kappa/2}, kappa = (gamma1+1)/2 + delta; charge from a
    // compact bump against phi0
    double kap = 0.5 * (fam.gamma1 + 1.0) + fam.delta;
    double s = fam.support;
    auto f = [=](double r) { return a * std::pow(1.0 + r * r, -0.5 * kap); };
    p.phi0 = [=](double r) { return cplx{f(r), 0.0}; };
    p.dphi0 = [=](double r) {
      return -a * kap * r * std::pow(1.0 + r * r, -0.5 * kap - 1.0);
    };
    p.d2phi0 = [=](double r) {
      return -a * kap * std::pow(1.0 + r * r, -0.5 * kap - 2.0) *
             ((1.0 + r * r) - (kap + 2.0) * r * r);
    };
    p.phi1 = [=, dphi0 = p.dphi0](double r) {
      cplx v = dphi0(r);
      if (fam.charge != 0.0) v += -kI * bump.val(r / s) * f(r);
      return v;
    };
    p.r_data_max = std::numeric_limits<double>::infinity();
  } else {
    throw std::invalid_argument("unknown MKG data profile: " + fam.profile);
  }
  return p;
}

}  // namespace

double charge_total_volume_integral(const CplxFn& phi0, const CplxFn& phi1,
                                    double r_max) {
  auto j0 = [&](double r) {
    return r * r * std::imag(phi0(r) * std::conj(phi1(r)));
  };
  // panelise so compactly supported integrands cannot hide from the
  // adaptive rule's initial samples
  const int panels = 32;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    double lo = r_max * k / panels, hi = r_max * (k + 1) / panels;
    total += adaptive_simpson(j0, lo, hi, 1e-12 / panels);
  }
  return total;
}

MkgCauchyData mkg_initial_data(const InitialDataFamily& fam, double r_max,
                               double dr_table) {
  Profile p = make_mkg_profile(fam);

  // rescale the charge-generating part so Q(infinity) hits fam.charge
  if (fam.charge != 0.0) {
    double q_unit = charge_total_volume_integral(p.phi0, p.phi1,
                                                 std::min(r_max, p.r_data_max));
    if (std::abs(q_unit) < 1e-300)
      throw std::invalid_argument("mkg_initial_data: profile carries no charge");
    double scale = fam.charge / q_unit;
    // the charge part of phi1 is the imaginary (bump) piece; rescale it
    CplxFn phi1_old = p.phi1;
    RealFn dphi0 = p.dphi0;
    bool pure_lump = fam.profile == "charged_lump";
    p.phi1 = [=](double r) {
      cplx v = phi1_old(r);
      if (pure_lump) return v * scale;
      cplx out = dphi0(r);
      return out + (v - out) * scale;
    };
  }

  MkgCauchyData d;
  d.r_data_max = p.r_data_max;
  CplxFn phi0 = p.phi0, phi1 = p.phi1;
  RealFn dphi0 = p.dphi0, d2phi0 = p.d2phi0;
  d.psi0 = [phi0](double r) { return r * phi0(r); };
  d.psi1 = [phi1](double r) { return r * phi1(r); };
  d.psi0_r = [phi0, dphi0](double r) { return phi0(r) + r * dphi0(r); };
  d.psi0_rr = [d2phi0, dphi0](double r) {
    return cplx{r * d2phi0(r) + 2.0 * dphi0(r), 0.0};
  };

  // Gauss constraint: Q(r) = int_0^r s^2 Im(phi0 conj(phi1)) ds
  int n = std::max(8, int(std::ceil(r_max / dr_table)));
  std::vector<double> rt(n + 1), qt(n + 1);
  rt[0] = 0.0;
  qt[0] = 0.0;
  for (int k = 1; k <= n; ++k) {
    double lo = (k - 1) * r_max / n, hi = k * r_max / n;
    rt[k] = hi;
    auto j0 = [&](double r) {
      return r * r * std::imag(phi0(r) * std::conj(phi1(r)));
    };
    qt[k] = qt[k - 1] + gauss_integrate(j0, lo, hi, 8);
  }
  d.q_total = qt[n];
  auto table = std::make_shared<MonotoneCubic>(std::move(rt), std::move(qt));
  d.Q0 = [table](double r) { return (*table)(r); };
  if (!std::isfinite(d.q_total))
    throw std::invalid_argument("mkg_initial_data: non-integrable charge profile");
  return d;
}

Su2CauchyData su2_initial_data(const InitialDataFamily& fam, double r_max) {
  Su2CauchyData d;
  d.r_data_max = r_max;
  Bump bump;
  const double a = fam.amplitude;

  if (fam.profile == "su2_kink") {
    // w0 = 1 - 2a r^4/(b^4 + r^4); a = 1 connects the two vacua
    double b4 = std::pow(fam.support, 4);
    d.w0 = [=](double r) {
      double r4 = r * r * r * r;
      return 1.0 - 2.0 * a * r4 / (b4 + r4);
    };
    d.w0_r = [=](double r) {
      double r4 = r * r * r * r;
      double den = b4 + r4;
      return -8.0 * a * b4 * r * r * r / (den * den);
    };
    d.w0_rr = [=](double r) {
      double r4 = r * r * r * r;
      double den = b4 + r4;
      return -8.0 * a * b4 * r * r * (3.0 * den - 8.0 * r4) / (den * den * den);
    };
    d.w1 = [](double) { return 0.0; };
  } else if (fam.profile == "su2_annulus") {
    double s = fam.support, c = 2.0 * fam.support;
    d.w0 = [=](double r) { return 1.0 - a * bump.val((r - c) / s); };
    d.w0_r = [=](double r) { return -a * bump.d1((r - c) / s) / s; };
    d.w0_rr = [=](double r) { return -a * bump.d2((r - c) / s) / (s * s); };
    d.w1 = [](double) { return 0.0; };
  } else if (fam.profile == "su2_weighted") {
    // w0 - 1 ~ -a r^{-kappa}, kappa = (gamma1 - 1)/2 + delta
    double kap = 0.5 * (fam.gamma1 - 1.0) + fam.delta;
    double pexp = kap + 2.0, q2 = fam.support * fam.support;
    auto g = [=](double r) { return std::pow(q2 + r * r, -0.5 * pexp); };
    auto dg = [=](double r) {
      return -pexp * r * std::pow(q2 + r * r, -0.5 * pexp - 1.0);
    };
    auto d2g = [=](double r) {
      return -pexp * std::pow(q2 + r * r, -0.5 * pexp - 2.0) *
             ((q2 + r * r) - (pexp + 2.0) * r * r);
    };
    d.w0 = [=](double r) { return 1.0 - a * r * r * g(r); };
    d.w0_r = [=](double r) { return -a * (2.0 * r * g(r) + r * r * dg(r)); };
    d.w0_rr = [=](double r) {
      return -a * (2.0 * g(r) + 4.0 * r * dg(r) + r * r * d2g(r));
    };
    d.w1 = [](double) { return 0.0; };
  } else {
    throw std::invalid_argument("unknown SU(2) data profile: " + fam.profile);
  }
  d.w_axis = d.w0(0.0);
  return d;
}

// ---------------------------------------------------------------------------
// Conformal transport
// ---------------------------------------------------------------------------

MkgImageSlice conformal_transport(const MkgHyperState& state,
                                  const ConformalChart& chart, int n_target) {
  if (state.pts.size() < 4)
    throw std::invalid_argument("conformal_transport: too few samples");
  const auto& surf = state.slice;

  size_t n = state.pts.size();
  std::vector<double> rt(n);
  std::vector<double> re_phi(n), im_phi(n), re_dt(n), im_dt(n), re_dr(n),
      im_dr(n), rho_t(n), a_rt(n);
  const double t_tilde = chart.R - surf.R_surf;
  for (size_t k = 0; k < n; ++k) {
    const auto& s = state.pts[k];
    SpacetimePoint p{surf.t(s.r), s.r};
    FrameScales fs = chart.frame_scale_factors(p);
    double ts = chart.t_star(p.t);
    rt[k] = s.r / fs.lambda;

    cplx phi_t = fs.lambda * s.phi;
    // D_{L~}(Lambda phi) = (t*+r)^2 (2(t*-r) phi + Lambda (D_t + D_r) phi)
    cplx dl = fs.sq_plus * (2.0 * (ts - s.r) * s.phi +
                            fs.lambda * (s.d_t_phi + s.d_r_phi));
    cplx dlb = fs.sq_minus * (2.0 * (ts + s.r) * s.phi +
                              fs.lambda * (s.d_t_phi - s.d_r_phi));
    re_phi[k] = phi_t.real();
    im_phi[k] = phi_t.imag();
    cplx dtt = 0.5 * (dl + dlb), drt = 0.5 * (dl - dlb);
    re_dt[k] = dtt.real();
    im_dt[k] = dtt.imag();
    re_dr[k] = drt.real();
    im_dr[k] = drt.imag();
    rho_t[k] = fs.lambda * fs.lambda * s.rho;
    // pullback of A = a_u du:  A~_r~ = -a_u ((R - t~) - r~)^2 / (2 Lam~^2)
    double lam_t = 1.0 / fs.lambda;  // (R - t~)^2 - r~^2
    double d = (chart.R - t_tilde) - rt[k];
    a_rt[k] = -s.a_u * d * d / (2.0 * lam_t * lam_t);
  }

  MkgImageSlice img;
  img.R = chart.R;
  img.t_tilde = t_tilde;
  img.r_tilde_max = rt.back();
  // crude energy-deficit estimate of the truncated annulus [r~max, R)
  img.tail_deficit = (re_phi.back() * re_phi.back() +
                      im_phi.back() * im_phi.back()) *
                     std::max(0.0, chart.R - rt.back());

  MonotoneCubic c_re(rt, re_phi), c_im(rt, im_phi), c_rdt(rt, re_dt),
      c_idt(rt, im_dt), c_rdr(rt, re_dr), c_idr(rt, im_dr), c_rho(rt, rho_t),
      c_art(rt, a_rt);

  img.r_tilde.resize(n_target);
  img.phi_t.resize(n_target);
  img.d_ttilde.resize(n_target);
  img.d_rtilde.resize(n_target);
  img.rho_t.resize(n_target);
  img.a_rtilde.resize(n_target);
  for (int k = 0; k < n_target; ++k) {
    double x = rt.front() + (rt.back() - rt.front()) * k / (n_target - 1);
    img.r_tilde[k] = x;
    img.phi_t[k] = {c_re(x), c_im(x)};
    img.d_ttilde[k] = {c_rdt(x), c_idt(x)};
    img.d_rtilde[k] = {c_rdr(x), c_idr(x)};
    img.rho_t[k] = c_rho(x);
    img.a_rtilde[k] = c_art(x);
  }
  return img;
}

MkgHyperState conformal_transport_inverse(const MkgImageSlice& img,
                                          const ConformalChart& chart) {
  MkgHyperState st;
  st.slice = HyperboloidSlice(chart.R, chart.R - img.t_tilde);
  st.pts.resize(img.r_tilde.size());
  for (size_t k = 0; k < img.r_tilde.size(); ++k) {
    SpacetimePoint p = chart.inverse({img.t_tilde, img.r_tilde[k]});
    FrameScales fs = chart.frame_scale_factors(p);
    double ts = chart.t_star(p.t);
    auto& s = st.pts[k];
    s.r = p.r;
    s.phi = img.phi_t[k] / fs.lambda;
    cplx dl_t = img.d_ttilde[k] + img.d_rtilde[k];
    cplx dlb_t = img.d_ttilde[k] - img.d_rtilde[k];
    // Lambda D_L phi = (t*+r)^{-2} D_{L~}(Lambda phi) - 2 (t*-r) phi
    cplx dl = (dl_t / fs.sq_plus - 2.0 * (ts - p.r) * s.phi) / fs.lambda;
    cplx dlb = (dlb_t / fs.sq_minus - 2.0 * (ts + p.r) * s.phi) / fs.lambda;
    s.d_t_phi = 0.5 * (dl + dlb);
    s.d_r_phi = 0.5 * (dl - dlb);
    s.rho = img.rho_t[k] / (fs.lambda * fs.lambda);
    double lam_t = 1.0 / fs.lambda;
    double d = (chart.R - img.t_tilde) - img.r_tilde[k];
    s.a_u = (d > 0.0 && k < img.a_rtilde.size())
                ? -2.0 * lam_t * lam_t * img.a_rtilde[k] / (d * d)
                : 0.0;
  }
  return st;
}

NullDecomposition transport_components(const NullDecomposition& n,
                                       const FrameScales& s) {
  NullDecomposition t;
  t.alpha = s.lambda * s.sq_plus * n.alpha;
  t.alpha_bar = s.lambda * s.sq_minus * n.alpha_bar;
  t.rho = s.lambda * s.lambda * n.rho;
  t.sigma = s.lambda * s.lambda * n.sigma;
  return t;
}

}  // namespace ymh
