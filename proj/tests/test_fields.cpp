#include <cmath>
#include <random>

#include "doctest.h"
#include "ymh/fields.hpp"

using namespace ymh;

TEST_CASE("mkg cell residual: vacuum and decoupled free wave are exact") {
  MkgCell c;
  c.psi_s = c.psi_w = c.psi_e = c.psi_n = 0.0;
  c.a_c = 0.0;
  c.q_c = 0.0;
  c.r_c = 0.5;
  c.h = 0.01;
  CHECK(std::abs(mkg_cell_residual(c)) == 0.0);

  // psi = f(u) + g(v) solves d_u d_v psi = 0 exactly on the corners
  auto f = [](double u) { return std::sin(3.0 * u); };
  auto g = [](double v) { return std::exp(-v); };
  double u = 0.2, v = 0.7, h = 0.01;
  c.psi_s = f(u) + g(v);
  c.psi_w = f(u + h) + g(v);
  c.psi_e = f(u) + g(v + h);
  c.psi_n = f(u + h) + g(v + h);
  c.h = h;
  c.r_c = v - u;
  CHECK(std::abs(mkg_cell_residual(c)) < 1e-11);
  // and the solve reproduces the north corner
  cplx psi_n = c.psi_n;
  c.psi_n = 0.0;
  CHECK(std::abs(mkg_cell_solve(c) - psi_n) < 1e-11);
}

TEST_CASE("mkg cell solve matches the residual equation") {
  MkgCell c;
  c.psi_s = {0.3, -0.1};
  c.psi_w = {0.25, 0.05};
  c.psi_e = {0.33, 0.02};
  c.a_c = 0.4;
  c.q_c = 0.2;
  c.r_c = 0.8;
  c.h = 1.0 / 128.0;
  c.psi_n = mkg_cell_solve(c);
  CHECK(std::abs(mkg_cell_residual(c)) < 1e-11);
}

TEST_CASE("su2 cell: vacuum and static point") {
  Su2Cell c{1.0, 1.0, 1.0, 1.0, 0.5, 0.01};
  CHECK(su2_cell_residual(c) == 0.0);
  CHECK(su2_cell_solve(c) == doctest::Approx(1.0));
  // w = 0 is a static (unstable) solution: residual vanishes there too
  Su2Cell z{0.0, 0.0, 0.0, 0.0, 0.5, 0.01};
  CHECK(su2_cell_residual(z) == 0.0);
  // generic cell: the solve satisfies the residual equation
  Su2Cell g{0.9, 0.85, 0.88, 0.0, 0.3, 1.0 / 256.0};
  g.w_n = su2_cell_solve(g);
  CHECK(std::abs(su2_cell_residual(g)) < 1e-11);
}

TEST_CASE("null components match the Lagrangian energy density") {
  // MKG: (1/4)(a^2 + ab^2) + (1/2)(rho^2 + sigma^2) must equal (1/2) E_r^2
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    double Q = unif(rng), r = 0.5 + 0.5 * std::abs(unif(rng));
    auto n = mkg_null_components(Q, r);
    CHECK(n.alpha == 0.0);
    CHECK(n.sigma == 0.0);
    double lhs = null_energy_density(n);
    double rhs = 0.5 * (Q / (r * r)) * (Q / (r * r));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
  }

  // SU(2): (1/4)(|a|^2+|ab|^2) + (1/2)|sigma|^2 must equal
  //   (w_t^2 + w_r^2)/r^2 + (1-w^2)^2/(2 r^4)
  for (int i = 0; i < 100; ++i) {
    double w = unif(rng), wu = unif(rng), wv = unif(rng);
    double r = 0.5 + std::abs(unif(rng));
    auto n = su2_null_components(w, wu, wv, r);
    double wt = 0.5 * (wu + wv), wr = 0.5 * (wv - wu);
    double z = 1.0 - w * w;
    double lag = (wt * wt + wr * wr) / (r * r) + 0.5 * z * z / (r * r * r * r);
    CHECK(null_energy_density(n) == doctest::Approx(lag).epsilon(1e-13));
  }
}

TEST_CASE("initial data: vacuum charge and trivial profiles") {
  InitialDataFamily fam;
  fam.profile = "bump";
  fam.amplitude = 0.0;
  fam.support = 0.25;
  auto d = mkg_initial_data(fam, 4.0, 1.0 / 64.0);
  CHECK(d.q_total == 0.0);
  for (double r : {0.1, 0.5, 2.0}) CHECK(d.Q0(r) == 0.0);
}

TEST_CASE("initial data: real data carry no charge") {
  InitialDataFamily fam;
  fam.profile = "bump";
  fam.amplitude = 1.0;
  fam.support = 0.25;
  auto d = mkg_initial_data(fam, 4.0, 1.0 / 64.0);
  CHECK(std::abs(d.q_total) < 1e-14);
}

TEST_CASE("initial data: charged lump hits the prescribed total charge") {
  InitialDataFamily fam;
  fam.profile = "charged_lump";
  fam.amplitude = 0.7;
  fam.support = 0.8;
  fam.charge = 1.0;
  auto d = mkg_initial_data(fam, 4.0, 1.0 / 256.0);
  CHECK(d.q_total == doctest::Approx(1.0).epsilon(1e-8));
  // Q saturates at q0 beyond the support
  CHECK(d.Q0(3.9) == doctest::Approx(1.0).epsilon(1e-8));
  // and matches the direct volume integral
  auto phi0 = [&](double r) { return d.psi0(r) / std::max(r, 1e-12); };
  auto phi1 = [&](double r) { return d.psi1(r) / std::max(r, 1e-12); };
  double q_vol = charge_total_volume_integral(phi0, phi1, 4.0);
  CHECK(q_vol == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("initial data: charge scales bilinearly with amplitude") {
  double q[3];
  int k = 0;
  for (double a : {0.5, 1.0, 2.0}) {
    InitialDataFamily fam;
    fam.profile = "charged_lump";
    fam.amplitude = a;
    fam.support = 0.8;
    fam.charge = 0.0;  // leave un-normalised
    auto d = mkg_initial_data(fam, 4.0, 1.0 / 256.0);
    q[k++] = d.q_total;
  }
  CHECK(q[1] / q[0] == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(q[2] / q[1] == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("boundary-singular family: derivative closures are consistent") {
  InitialDataFamily fam;
  fam.profile = "boundary_singular";
  fam.amplitude = 1.0;
  fam.sigma = -0.6;
  fam.R = 1.0;
  auto d = mkg_initial_data(fam, 1.0, 1.0 / 512.0);
  for (double r : {0.1, 0.4, 0.8, 0.95}) {
    double hfd = 1e-6;
    cplx fd = (d.psi0(r + hfd) - d.psi0(r - hfd)) / (2.0 * hfd);
    CHECK(std::abs(fd - d.psi0_r(r)) < 1e-6 * (1.0 + std::abs(fd)));
    cplx fd2 = (d.psi0_r(r + hfd) - d.psi0_r(r - hfd)) / (2.0 * hfd);
    CHECK(std::abs(fd2 - d.psi0_rr(r)) < 1e-4 * (1.0 + std::abs(fd2)));
    // D_Lbar phi vanishes at t = 0 by construction (chargeless variant)
    cplx dlbar = d.psi1(r) - d.psi0_r(r) + d.psi0(r) / r;
    cplx dl = d.psi1(r) + d.psi0_r(r) - d.psi0(r) / r;
    CHECK(std::abs(dlbar) < 1e-12 * (1.0 + std::abs(dl)));
  }
}

TEST_CASE("su2 families: axis regularity and derivative closures") {
  for (const char* prof : {"su2_kink", "su2_annulus", "su2_weighted"}) {
    InitialDataFamily fam;
    fam.profile = prof;
    fam.amplitude = prof == std::string("su2_kink") ? 1.0 : 0.5;
    fam.support = 1.0;
    fam.gamma1 = 1.5;
    fam.delta = 0.1;
    auto d = su2_initial_data(fam, 50.0);
    CHECK(d.w0(0.0) == doctest::Approx(d.w_axis));
    // energy density finite at the axis needs w - w_axis = O(r^2)
    CHECK(std::abs(d.w0(1e-4) - d.w_axis) < 1e-6);
    for (double r : {0.3, 1.0, 3.0}) {
      double hfd = 1e-6;
      double fd = (d.w0(r + hfd) - d.w0(r - hfd)) / (2.0 * hfd);
      CHECK(fd == doctest::Approx(d.w0_r(r)).epsilon(1e-6));
      double fd2 = (d.w0_r(r + hfd) - d.w0_r(r - hfd)) / (2.0 * hfd);
      CHECK(fd2 == doctest::Approx(d.w0_rr(r)).epsilon(1e-4));
    }
  }
  // kink with full amplitude connects the two vacua
  InitialDataFamily fam;
  fam.profile = "su2_kink";
  fam.amplitude = 1.0;
  fam.support = 2.0;
  auto d = su2_initial_data(fam, 100.0);
  CHECK(d.w0(0.0) == doctest::Approx(1.0));
  CHECK(d.w0(1e4) == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("transport components follow the conformal scalings") {
  FrameScales f;
  f.lambda = 3.0;
  f.sq_plus = 16.0;
  f.sq_minus = 0.25;
  NullDecomposition n{0.5, 0.2, -0.1, 0.3};
  auto t = transport_components(n, f);
  CHECK(t.alpha == doctest::Approx(3.0 * 16.0 * 0.5));
  CHECK(t.alpha_bar == doctest::Approx(3.0 * 0.25 * 0.2));
  CHECK(t.rho == doctest::Approx(9.0 * -0.1));
  CHECK(t.sigma == doctest::Approx(9.0 * 0.3));
}

TEST_CASE("conformal transport: zero state maps to zero state") {
  MkgHyperState st;
  st.slice = HyperboloidSlice(2.0);
  for (int i = 0; i <= 32; ++i) {
    HyperSampleMkg s;
    s.r = 0.25 * i;
    st.pts.push_back(s);
  }
  ConformalChart chart(2.0);
  auto img = conformal_transport(st, chart, 64);
  for (auto v : img.phi_t) CHECK(std::abs(v) == 0.0);
  for (auto v : img.rho_t) CHECK(v == 0.0);
}

TEST_CASE("conformal transport inverse recovers a smooth state") {
  double R = 2.0;
  ConformalChart chart(R);
  HyperboloidSlice hyp(R);
  auto mk_state = [&](int n) {
    MkgHyperState st;
    st.slice = hyp;
    for (int i = 0; i <= n; ++i) {
      double r = 12.0 * i / n;
      HyperSampleMkg s;
      s.r = r;
      double t = hyp.t(r);
      auto f = [](double tt, double rr) {
        return std::exp(-0.1 * rr * rr) * std::cos(0.3 * tt);
      };
      s.phi = f(t, r);
      s.d_t_phi = -0.3 * std::exp(-0.1 * r * r) * std::sin(0.3 * t);
      s.d_r_phi = -0.2 * r * f(t, r);
      s.rho = 0.0;
      st.pts.push_back(s);
    }
    return st;
  };

  double err[2];
  int k = 0;
  for (int n : {128, 256}) {
    auto st = mk_state(n);
    auto img = conformal_transport(st, chart, 2 * n);
    auto back = conformal_transport_inverse(img, chart);
    double e = 0.0;
    for (const auto& s : back.pts) {
      if (s.r > 11.0) continue;
      double t = hyp.t(s.r);
      double ref = std::exp(-0.1 * s.r * s.r) * std::cos(0.3 * t);
      e = std::max(e, std::abs(s.phi.real() - ref));
    }
    err[k++] = e;
  }
  CHECK(err[0] < 1e-2);
  // monotone-cubic resampling: the Fritsch-Carlson limiter caps the rate
  // at second order near extrema of the transported arrays
  CHECK(err[0] / std::max(err[1], 1e-16) > 3.5);
}

TEST_CASE("transport of an exterior pure-charge state: rho~ r~^2 = q0") {
  // rho = q0 / r^2 transports to rho~ = Lambda^2 rho with r~ = r / Lambda,
  // so rho~ r~^2 = q0 pointwise
  double R = 1.5, q0 = 0.7;
  ConformalChart chart(R);
  HyperboloidSlice hyp(R);
  MkgHyperState st;
  st.slice = hyp;
  for (int i = 1; i <= 200; ++i) {
    HyperSampleMkg s;
    s.r = 0.5 + 0.1 * i;
    s.rho = q0 / (s.r * s.r);
    st.pts.push_back(s);
  }
  // pointwise algebraic oracle at the source samples: no interpolation
  for (const auto& s : st.pts) {
    FrameScales fs = chart.frame_scale_factors({hyp.t(s.r), s.r});
    double rho_t = fs.lambda * fs.lambda * s.rho;
    double rt = s.r / fs.lambda;
    CHECK(rho_t * rt * rt == doctest::Approx(q0).epsilon(1e-12));
  }
  // resampled image arrays carry interpolation error only
  auto img = conformal_transport(st, chart, 128);
  for (size_t i = 10; i + 10 < img.r_tilde.size(); ++i) {
    double lhs = img.rho_t[i] * img.r_tilde[i] * img.r_tilde[i];
    CHECK(lhs == doctest::Approx(q0).epsilon(2e-3));
  }
}
