#include <cmath>
#include <random>

#include "doctest.h"
#include "ymh/geometry.hpp"

using namespace ymh;

TEST_CASE("null coordinates round trip") {
  CHECK(null_coords({0.0, 0.0}).u == 0.0);
  CHECK(null_coords({0.0, 0.0}).v == 0.0);
  CHECK(null_coords({2.0, 2.0}).u == 0.0);
  CHECK(null_coords({2.0, 2.0}).v == 2.0);
  CHECK(null_coords({1.0, 3.0}).u == -1.0);
  CHECK(null_coords({1.0, 3.0}).v == 2.0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    SpacetimePoint p{unif(rng) - 5.0, unif(rng)};
    SpacetimePoint q = from_null(null_coords(p));
    CHECK(q.t == doctest::Approx(p.t).epsilon(1e-15));
    CHECK(q.r == doctest::Approx(p.r).epsilon(1e-15));
  }
}

TEST_CASE("sphere radius degenerate and Pythagorean cases") {
  CHECK(sphere_radius(0.0, 5.0, 0.3) == doctest::Approx(5.0));
  CHECK(sphere_radius(3.0, 4.0, 0.0) == doctest::Approx(5.0));
  CHECK(sphere_radius(1.0, 1.0, -1.0) == doctest::Approx(0.0));
}

TEST_CASE("cone weight collapses to u_star^gamma at tau = 1") {
  double R = 1.0, gamma = 0.6;
  SpacetimePoint q{0.5, 0.2};
  SpacetimePoint p{0.3, 0.4};
  ConeWeight w = cone_weights(q, p, 1.0, gamma, R);
  CHECK(w.w_q == doctest::Approx(std::pow(w.u_star, gamma)).epsilon(1e-14));

  // centered vertex: tau = 1 at every cone point regardless of input tau
  SpacetimePoint q0{0.5, 0.0};
  ConeWeight w0 = cone_weights(q0, p, -0.3, gamma, R);
  CHECK(w0.tau == 1.0);
  CHECK(w0.w_q == doctest::Approx(std::pow(w0.u_star, gamma)).epsilon(1e-14));
}

TEST_CASE("cone weight invariants and the lower-bound lemma") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double R = 1.0;
  int violations = 0;
  for (int i = 0; i < 20000; ++i) {
    double t0 = 0.95 * R * unif(rng);
    double r0 = (R - t0) * unif(rng) * 0.999;
    SpacetimePoint q{t0, r0};
    double rt = t0 * unif(rng);
    double mu = 2.0 * unif(rng) - 1.0;
    ConePoint cp = cone_point(q, rt, mu);
    double gamma = 0.05 + 0.9 * unif(rng);
    ConeWeight w = cone_weights(q, cp.p, cp.tau, gamma, R);
    // trivial lower bound W_q >= v_*^gamma
    CHECK(w.w_q >= std::pow(w.v_star, gamma) * (1.0 - 1e-12));
    if (!cone_weight_bound(w, cp.p, R).pass) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("cone weight monotone in v_star at fixed vertex geometry") {
  double R = 1.0, gamma = 0.5, tau = 0.2;
  // along a fixed u_star, W_q grows with v_star
  double prev = -1.0;
  for (double vs = 0.05; vs <= 0.5; vs += 0.05) {
    double us = 0.8;
    double t = R - 0.5 * (us + vs), r = 0.5 * (us - vs);
    ConeWeight w = cone_weights({0.9, 0.05}, {t, r}, tau, gamma, R);
    CHECK(w.w_q > prev);
    prev = w.w_q;
  }
}

TEST_CASE("cone weight rejects points outside the cone") {
  CHECK_THROWS_AS(cone_weights({0.5, 0.1}, {0.9, 0.5}, 0.0, 0.5, 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(cone_weights({0.5, 0.1}, {0.3, 0.2}, 0.0, 1.5, 1.0),
                  std::invalid_argument);
}

TEST_CASE("conformal chart maps the hyperboloid to the initial ball") {
  double R = 1.5;
  ConformalChart chart(R);
  HyperboloidSlice hyp(R);

  // any p on H has t~ = 0
  for (double r : {0.0, 0.3, 1.0, 4.0, 20.0}) {
    SpacetimePoint p{hyp.t(r), r};
    ConformalImage q = chart.forward(p);
    CHECK(std::abs(q.t_tilde) < 1e-12);
    CHECK(q.r_tilde < R);
  }
  // axis point of H maps to the origin
  ConformalImage o = chart.forward({hyp.t(0.0), 0.0});
  CHECK(std::abs(o.t_tilde) < 1e-14);
  CHECK(std::abs(o.r_tilde) < 1e-14);
  // vertex limit: r = 0, t* -> infinity gives t~ -> R
  for (double ts : {1e3, 1e6}) {
    ConformalImage v = chart.forward({chart.t_from_star(ts), 0.0});
    CHECK(v.t_tilde == doctest::Approx(R - 1.0 / ts).epsilon(1e-12));
  }
}

TEST_CASE("conformal inverse composes to the identity on the domain") {
  double R = 2.0;
  ConformalChart chart(R);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int tested = 0;
  for (int i = 0; i < 100000; ++i) {
    SpacetimePoint p{40.0 * unif(rng) - 3.0, 40.0 * unif(rng)};
    if (!chart.in_domain(p)) continue;
    ++tested;
    SpacetimePoint q = chart.inverse(chart.forward(p));
    double scale = 1.0 + std::abs(p.t) + p.r;
    CHECK(std::abs(q.t - p.t) <= 1e-12 * scale);
    CHECK(std::abs(q.r - p.r) <= 1e-12 * scale);
    // image constraints
    ConformalImage im = chart.forward(p);
    CHECK(im.t_tilde + im.r_tilde < R + 1e-12);
    CHECK(im.t_tilde > -1e-12);
  }
  CHECK(tested > 10000);
}

TEST_CASE("frame scale factors satisfy the algebraic identity") {
  double R = 2.0;
  ConformalChart chart(R);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    SpacetimePoint p{20.0 * unif(rng) - 2.0, 20.0 * unif(rng)};
    if (!chart.in_domain(p)) continue;
    FrameScales f = chart.frame_scale_factors(p);
    double prod = std::sqrt(f.sq_plus) * std::sqrt(f.sq_minus);
    CHECK(std::abs(f.lambda - prod) <= 1e-12 * f.lambda);
  }
  // r = 0: both factors equal (t*)^2
  FrameScales f0 = chart.frame_scale_factors({1.0, 0.0});
  CHECK(f0.sq_plus == f0.sq_minus);
  CHECK(f0.lambda == doctest::Approx(f0.sq_plus));
}

TEST_CASE("hyperboloid graph satisfies its defining relation") {
  for (double R : {1.2, 1.5, 3.0}) {
    HyperboloidSlice hyp(R);
    for (double r = 0.0; r < 50.0; r += 0.37) {
      double ts = hyp.t_star(r);
      CHECK(std::abs(ts * ts - r * r - ts / R) <= 1e-13 * (ts * ts + 1.0));
      // 0 <= t* - r <= 1/R, so the ingoing conformal factor stays bounded
      CHECK(ts - r >= 0.0);
      CHECK(ts - r <= 1.0 / R + 1e-14);
    }
    // flux weights are 1 at the axis and nonnegative
    CHECK(hyp.flux_weight_in(0.0) == doctest::Approx(1.0));
    CHECK(hyp.flux_weight_out(0.0) == doctest::Approx(1.0));
    for (double r = 0.0; r < 100.0; r += 1.0)
      CHECK(hyp.flux_weight_in(r) >= 0.0);
  }
}

TEST_CASE("on the hyperboloid the ingoing frame factor is below 1/R^2") {
  double R = 1.5;
  ConformalChart chart(R);
  HyperboloidSlice hyp(R);
  for (double r : {0.0, 0.5, 2.0, 10.0}) {
    FrameScales f = chart.frame_scale_factors({hyp.t(r), r});
    CHECK(f.sq_minus <= 1.0 / (R * R) + 1e-12);
  }
}
