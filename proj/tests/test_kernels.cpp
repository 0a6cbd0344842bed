#include <cmath>
#include <random>

#include "doctest.h"
#include "ymh/kernels.hpp"

using namespace ymh;

TEST_CASE("gronwall extremal: B = 0 gives constant A") {
  VolterraProblem p{2.5, 0.0, 0.5, 1.0, 256};
  auto sol = gronwall_extremal(p);
  for (double f : sol.f) CHECK(f == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("gronwall extremal: gamma -> 0 limit matches A e^{Bt}") {
  VolterraProblem p{1.0, 1.0, 1e-6, 1.0, 4096};
  auto sol = gronwall_extremal(p);
  double expect = std::exp(1.0);
  CHECK(sol.f.back() == doctest::Approx(expect).epsilon(1e-4));
}

TEST_CASE("gronwall extremal agrees with the Mittag-Leffler closed form") {
  // for gamma = 1/2 the equality solution is
  //   f(t) = A E_{1/2}(B sqrt(pi t)) = A e^{B^2 pi t} erfc(-B sqrt(pi t))
  const double A = 1.0, B = 1.0, g = 0.5, t0 = 1.0;
  double z = B * std::sqrt(M_PI * t0);
  double exact = A * std::exp(z * z) * std::erfc(-z);

  VolterraProblem p{A, B, g, t0, 4096};
  auto sol = gronwall_extremal(p);
  CHECK(sol.f.back() == doctest::Approx(exact).epsilon(1e-5));
  CHECK(sol.equality_residual < 1e-8);
  // monotone non-decreasing
  for (size_t i = 1; i < sol.f.size(); ++i) CHECK(sol.f[i] >= sol.f[i - 1]);
}

TEST_CASE("gronwall extremal: fixed-point iteration on a 10x finer grid") {
  // brute-force Picard iteration from f = A, same product-integration
  // moments, 10x finer grid; an independent solution path to the same
  // integral equation
  const double A = 1.0, B = 1.0, g = 0.5, t0 = 1.0;
  const int n = 10240;
  const double dt = t0 / n;
  std::vector<double> M0(n + 1), M1(n + 1);
  const double dg1 = std::pow(dt, 1.0 - g);
  for (int j = 1; j <= n; ++j) {
    double a = j - 1.0, b = j;
    double i0 = (std::pow(b, 1.0 - g) - std::pow(a, 1.0 - g)) / (1.0 - g);
    double i1 = (std::pow(b, 2.0 - g) - std::pow(a, 2.0 - g)) / (2.0 - g);
    M0[j] = dg1 * i0;
    M1[j] = dg1 * (b * i0 - i1);
  }
  std::vector<double> f(n + 1, A), fn(n + 1, A);
  for (int it = 0; it < 60; ++it) {
    double change = 0.0;
    for (int m = 1; m <= n; ++m) {
      double acc = A;
      for (int k = 0; k < m; ++k) {
        int j = m - k;
        acc += B * (f[k] * (M0[j] - M1[j]) + f[k + 1] * M1[j]);
      }
      fn[m] = acc;
      change = std::max(change, std::abs(fn[m] - f[m]));
    }
    f.swap(fn);
    if (change < 1e-11) break;
  }

  VolterraProblem p{A, B, g, t0, 1024};
  auto sol = gronwall_extremal(p);
  CHECK(sol.f.back() == doctest::Approx(f.back()).epsilon(5e-5));
}

TEST_CASE("gronwall proof constants") {
  // epsilon_0 = ((1-gamma)/(2B))^{1/(1-gamma)}
  CHECK(gronwall_epsilon0(1.0, 0.5) == doctest::Approx(1.0 / 16.0));
  // t0 <= eps0 gives C = 2
  double eps0 = gronwall_epsilon0(1.0, 0.5);
  CHECK(gronwall_bound_constant(1.0, 0.5, 0.9 * eps0) == doctest::Approx(2.0));
  // extremal solution obeys f(t0) <= C A on a parameter grid
  for (double B : {0.5, 1.0, 1.5})
    for (double g : {0.3, 0.5, 0.7})
      for (double t0 : {0.25, 1.0, 2.0}) {
        VolterraProblem p{1.0, B, g, t0, 2048};
        auto sol = gronwall_extremal(p);
        CHECK(sol.f.back() <= gronwall_bound_constant(B, g, t0) * p.A);
      }
}

TEST_CASE("hardy ratio: zero function reports 0") {
  RadialFn z{"zero", [](double) { return 0.0; }, [](double) { return 0.0; },
             [](double) { return 0.0; }, 0.0};
  auto c = hardy_ratio(z, 0.5, 0.5, 1.0);
  CHECK(c.ratio == 0.0);
}

TEST_CASE("hardy ratio: constant function against the Beta-function oracle") {
  // phi = 1, R0 = 1, gamma = 1/2, eps = 1/2:
  //   lhs = 4 pi B(3, 1/2),  rhs = 4 pi B(3, 3/2),  ratio = 7
  RadialFn one{"one", [](double) { return 1.0; }, [](double) { return 0.0; },
               [](double) { return 0.0; }, 0.0};
  auto c = hardy_ratio(one, 0.5, 0.5, 1.0);
  double lhs = 4.0 * M_PI * std::beta(3.0, 0.5);
  double rhs = 4.0 * M_PI * std::beta(3.0, 1.5);
  CHECK(c.lhs == doctest::Approx(lhs).epsilon(1e-9));
  CHECK(c.rhs == doctest::Approx(rhs).epsilon(1e-9));
  CHECK(c.ratio == doctest::Approx(7.0).epsilon(1e-9));
}

TEST_CASE("hardy ratio: boundary-singular member, stable under doubling") {
  double g = 0.5, eps = 0.2, R0 = 1.0;
  double s = 0.3;
  RadialFn phi{"pow",
               [=](double r) { return std::pow(R0 - r, s); },
               [=](double r) { return -s * std::pow(R0 - r, s - 1.0); },
               [=](double r) { return s * (s - 1.0) * std::pow(R0 - r, s - 2.0); },
               s};
  auto c = hardy_ratio(phi, g, eps, R0);
  CHECK(std::isfinite(c.ratio));
  CHECK(c.ratio > 0.0);

  // family supremum stays within 10% when the family doubles
  auto fam1 = default_family(R0, 4, 77);
  auto fam2 = default_family(R0, 8, 77);
  double w1 = 0.0, w2 = 0.0;
  for (const auto& f : fam1)
    if (finite_rhs_member(f, g)) w1 = std::max(w1, hardy_ratio(f, g, eps, R0).ratio);
  for (const auto& f : fam2)
    if (finite_rhs_member(f, g)) w2 = std::max(w2, hardy_ratio(f, g, eps, R0).ratio);
  CHECK(w2 >= w1 * (1.0 - 1e-12));  // supremum can only grow
  CHECK(w2 <= w1 * 1.10 + 1e-12);   // but not by more than 10%
}

TEST_CASE("sobolev ratio: constant function closed form") {
  double g = 0.5, R0 = 1.0, cv = 2.0;
  RadialFn phi{"const", [=](double) { return cv; }, [](double) { return 0.0; },
               [](double) { return 0.0; }, 0.0};
  auto c = sobolev_ratio(phi, g, R0);
  // rhs = R0^{-1-g} * (0 + 4 pi c^2 / R0^2 * int (R0-r)^g r^2 dr)
  double integral = std::beta(3.0, g + 1.0);  // R0 = 1
  double rhs = 4.0 * M_PI * cv * cv * integral;
  CHECK(c.lhs == doctest::Approx(cv * cv));
  CHECK(c.rhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("sobolev ratio: finite on the default family") {
  double R0 = 1.0;
  auto fam = default_family(R0, 4, 5);
  for (double g : {0.3, 0.6}) {
    for (const auto& f : fam) {
      if (!finite_rhs_member(f, g)) continue;
      auto c = sobolev_ratio(f, g, R0);
      CHECK(std::isfinite(c.ratio));
    }
  }
  // the borderline growing member: ratio still evaluates finite
  double g = 0.5, s = -(1.0 - g) / 4.0;
  RadialFn phi{"grow",
               [=](double r) { return std::pow(R0 - r, s); },
               [=](double r) { return -s * std::pow(R0 - r, s - 1.0); },
               [=](double r) { return s * (s - 1.0) * std::pow(R0 - r, s - 2.0); },
               s};
  auto c = sobolev_ratio(phi, g, R0);
  CHECK(std::isfinite(c.ratio));
}

TEST_CASE("lemma bd4Rss2: endpoint, closed form, and random sweep") {
  // r~ = R0 gives lhs = 0
  auto b0 = lemma_bd4Rss2(1.0, 1.0, 0.5);
  CHECK(b0.lhs == doctest::Approx(0.0));
  CHECK(b0.pass);

  // closed form at gamma = 1/2, r~ = R0/2
  for (double R0 : {1.0, 2.5}) {
    auto b = lemma_bd4Rss2(0.5 * R0, R0, 0.5);
    double exact = lemma_bd4Rss2_lhs_closed_form(0.5 * R0, R0);
    CHECK(b.lhs == doctest::Approx(exact).epsilon(1e-10));
  }

  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int fail = 0;
  double best_ratio = 0.0;
  for (int i = 0; i < 10000; ++i) {
    double R0 = 0.5 + 3.0 * unif(rng);
    double rt = R0 * (0.001 + 0.999 * unif(rng));
    double g = 0.02 + 0.96 * unif(rng);
    auto b = lemma_bd4Rss2(rt, R0, g);
    if (!b.pass) ++fail;
    best_ratio = std::max(best_ratio, b.lhs / b.rhs);
  }
  CHECK(fail == 0);
  // the bound is approached somewhere: not vacuously slack
  CHECK(best_ratio >= 0.2);
}

TEST_CASE("sphere weight integral: centered, flat-gamma, and oracle cases") {
  double R = 1.0;
  // centered vertex: r(mu) = r~ and value = 4 pi (R - t - r~)^{-gamma}
  SpacetimePoint q{0.5, 0.0};
  auto c = sphere_weight_integral(q, 0.3, 0.5, R);
  double t = q.t - 0.3;
  CHECK(c.value ==
        doctest::Approx(4.0 * M_PI * std::pow(R - t - 0.3, -0.5)).epsilon(1e-9));

  // gamma -> 0 limit: value -> 4 pi
  SpacetimePoint q2{0.4, 0.2};
  auto c2 = sphere_weight_integral(q2, 0.25, 1e-9, R);
  CHECK(c2.value == doctest::Approx(4.0 * M_PI).epsilon(1e-6));

  // closed-form oracle across a random sweep
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    double t0 = 0.7 * unif(rng) + 0.05;
    double r0 = (R - t0) * 0.9 * unif(rng) + 1e-3;
    double rt = t0 * (0.1 + 0.8 * unif(rng));
    double g = 0.15 + 0.7 * unif(rng);
    SpacetimePoint qq{t0, r0};
    auto cc = sphere_weight_integral(qq, rt, g, R);
    double exact = sphere_weight_integral_closed_form(qq, rt, g, R);
    CHECK(cc.value == doctest::Approx(exact).epsilon(1e-8));
  }
}

TEST_CASE("sphere weight fitted constant stable under quadrature refinement") {
  // the adaptive quadrature agrees with the closed form, so stability is
  // checked by comparing two independent evaluation routes over a sweep
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double R = 1.0, c_a = 0.0, c_b = 0.0;
  for (int i = 0; i < 100; ++i) {
    double t0 = 0.6 * unif(rng) + 0.1;
    double r0 = (R - t0) * 0.8 * unif(rng) + 1e-3;
    double rt = t0 * (0.2 + 0.7 * unif(rng));
    double g = 0.5;
    SpacetimePoint q{t0, r0};
    auto cc = sphere_weight_integral(q, rt, g, R);
    c_a = std::max(c_a, cc.ratio);
    c_b = std::max(c_b,
                   sphere_weight_integral_closed_form(q, rt, g, R) / cc.bound);
  }
  CHECK(c_a == doctest::Approx(c_b).epsilon(1e-7));
}

TEST_CASE("verify_kernels_suite: all rows pass") {
  auto rows = verify_kernels_suite(1234, 4);
  CHECK(rows.size() > 10);
  for (const auto& r : rows) CHECK(r.pass);
}
