#include "ymh/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace ymh {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const RealFn& f, double a, double fa, double b, double fb,
                     double m, double fm, double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const RealFn& f, double a, double b, double tol,
                        int max_depth) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = simpson(a, fa, b, fb, fm);
  return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double weight_pow_m0(double p, double a, double b, double c) {
  // int_a^b (c-r)^p dr = ((c-a)^{p+1} - (c-b)^{p+1}) / (p+1)
  return (std::pow(c - a, p + 1.0) - std::pow(c - b, p + 1.0)) / (p + 1.0);
}

double weight_pow_m1(double p, double a, double b, double c) {
  // int_a^b (c-r)^p (r-a)/(b-a) dr, via r - a = (c-a) - (c-r)
  double h = b - a;
  if (h == 0.0) return 0.0;
  double ca = c - a, cb = c - b;
  double i1 = (std::pow(ca, p + 1.0) - std::pow(cb, p + 1.0)) / (p + 1.0);
  double i2 = (std::pow(ca, p + 2.0) - std::pow(cb, p + 2.0)) / (p + 2.0);
  return (ca * i1 - i2) / h;
}

double integrate_weight_pow(const RealFn& g, double p, double a, double b,
                            double c, double tol) {
  if (!(p > -1.0)) throw std::invalid_argument("integrate_weight_pow: p <= -1");
  if (b <= a) return 0.0;
  if (b > c + 1e-14 * std::max(1.0, std::abs(c)))
    throw std::invalid_argument("integrate_weight_pow: b > c");

  // Split [a,b] into cells bisected toward the weight endpoint r = c.  The
  // integrand g may itself carry an integrable power singularity at r = c;
  // the innermost sliver is closed by a local power-law fit rather than by
  // evaluating g at the endpoint.
  const bool touches = std::abs(b - c) < 1e-14 * std::max(1.0, std::abs(c));
  std::vector<std::pair<double, double>> cells;
  double tail = 0.0;
  if (touches) {
    const int levels = 34;
    double lo = a;
    for (int l = 0; l < levels; ++l) {
      double hi = c - (c - lo) * 0.5;
      if (hi <= lo) break;
      cells.push_back({lo, hi});
      lo = hi;
    }
    // sliver [lo, c): fit g ~ g0 (c-r)^alpha from two interior samples
    double d = c - lo;
    if (d > 0.0) {
      double g1 = g(c - 0.75 * d);
      double g2 = g(c - 0.375 * d);
      double alpha = 0.0;
      if (g1 != 0.0 && g2 != 0.0 && g1 * g2 > 0.0)
        alpha = std::log(std::abs(g2 / g1)) / std::log(0.5);
      if (alpha + p > -0.999) {
        double g0 = g2 / std::pow(0.375 * d, alpha);
        tail = g0 * std::pow(d, alpha + p + 1.0) / (alpha + p + 1.0);
      }
    }
  } else {
    cells.push_back({a, b});
  }

  // On the graded cells both g and the weight are smooth, so a fixed
  // Gauss-Legendre rule per cell converges spectrally; refine once by
  // bisection when the two estimates disagree.
  const GaussRule& rule = gauss_rule(16);
  auto cell_gl = [&](double lo, double hi) {
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (size_t i = 0; i < rule.x.size(); ++i) {
      double r = mid + half * rule.x[i];
      s += rule.w[i] * g(r) * std::pow(c - r, p);
    }
    return s * half;
  };
  double total = tail;
  for (auto [lo, hi] : cells) {
    double whole = cell_gl(lo, hi);
    double mid = 0.5 * (lo + hi);
    double split = cell_gl(lo, mid) + cell_gl(mid, hi);
    if (std::abs(split - whole) <= tol * std::max(1.0, std::abs(split))) {
      total += split;
    } else {
      double q1 = cell_gl(lo, 0.5 * (lo + mid)) + cell_gl(0.5 * (lo + mid), mid);
      double q2 = cell_gl(mid, 0.5 * (mid + hi)) + cell_gl(0.5 * (mid + hi), hi);
      total += q1 + q2;
    }
  }
  return total;
}

const GaussRule& gauss_rule(int n) {
  static std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // Newton iteration on Legendre polynomials
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    rule.w[i] = rule.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double gauss_integrate(const RealFn& f, double a, double b, int n) {
  const GaussRule& g = gauss_rule(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += g.w[i] * f(mid + half * g.x[i]);
  return sum * half;
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  size_t n = x_.size();
  if (n != y_.size() || n < 2)
    throw std::invalid_argument("MonotoneCubic: need >= 2 matched nodes");
  d_.assign(n, 0.0);
  std::vector<double> delta(n - 1);
  for (size_t k = 0; k + 1 < n; ++k) {
    double h = x_[k + 1] - x_[k];
    if (h <= 0.0) throw std::invalid_argument("MonotoneCubic: x not increasing");
    delta[k] = (y_[k + 1] - y_[k]) / h;
  }
  d_[0] = delta[0];
  d_[n - 1] = delta[n - 2];
  for (size_t k = 1; k + 1 < n; ++k)
    d_[k] = (delta[k - 1] * delta[k] > 0.0)
                ? 2.0 * delta[k - 1] * delta[k] / (delta[k - 1] + delta[k])
                : 0.0;
  // Fritsch-Carlson limiter
  for (size_t k = 0; k + 1 < n; ++k) {
    if (delta[k] == 0.0) {
      d_[k] = d_[k + 1] = 0.0;
    } else {
      double alpha = d_[k] / delta[k];
      double beta = d_[k + 1] / delta[k];
      double s = alpha * alpha + beta * beta;
      if (s > 9.0) {
        double tau = 3.0 / std::sqrt(s);
        d_[k] = tau * alpha * delta[k];
        d_[k + 1] = tau * beta * delta[k];
      }
    }
  }
}

int MonotoneCubic::cell(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  int k = int(it - x_.begin()) - 1;
  return std::clamp(k, 0, int(x_.size()) - 2);
}

double MonotoneCubic::operator()(double x) const {
  int k = cell(x);
  double h = x_[k + 1] - x_[k];
  double s = (x - x_[k]) / h;
  double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  double h10 = s * (1.0 - s) * (1.0 - s);
  double h01 = s * s * (3.0 - 2.0 * s);
  double h11 = s * s * (s - 1.0);
  return h00 * y_[k] + h * h10 * d_[k] + h01 * y_[k + 1] + h * h11 * d_[k + 1];
}

double MonotoneCubic::derivative(double x) const {
  int k = cell(x);
  double h = x_[k + 1] - x_[k];
  double s = (x - x_[k]) / h;
  double g00 = 6.0 * s * (s - 1.0) / h;
  double g10 = (3.0 * s - 1.0) * (s - 1.0);
  double g01 = -g00;
  double g11 = s * (3.0 * s - 2.0);
  return g00 * y_[k] + g10 * d_[k] + g01 * y_[k + 1] + g11 * d_[k + 1];
}

PowerFit fit_power_law(const std::vector<double>& x,
                       const std::vector<double>& y) {
  PowerFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] > 0.0 && std::abs(y[i]) > 0.0)
      pts.push_back({std::log(x[i]), std::log(std::abs(y[i]))});
  }
  fit.n_used = int(pts.size());
  if (pts.size() < 2) return fit;
  for (auto [lx, ly] : pts) {
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double n = double(pts.size());
  double det = n * sxx - sx * sx;
  if (det == 0.0) return fit;
  fit.exponent = (n * sxy - sx * sy) / det;
  fit.log_amplitude = (sy - fit.exponent * sx) / n;
  double rss = 0.0;
  for (auto [lx, ly] : pts) {
    double e = ly - (fit.exponent * lx + fit.log_amplitude);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

}  // namespace ymh
