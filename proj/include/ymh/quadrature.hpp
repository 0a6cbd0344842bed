/* quadrature.hpp
 *
 * Small numerical toolbox shared by the lemma suites and the diagnostics:
 *  - adaptive Simpson integration,
 *  - endpoint-weighted integrals  int g(r) (c - r)^p dr  by product
 *    integration (exact moments of the weight against a linear interpolant,
 *    cells bisected toward the weight endpoint),
 *  - fixed-order Gauss-Legendre rules,
 *  - monotone cubic (Fritsch-Carlson) interpolation,
 *  - least-squares slope of log|y| vs log x.
 */
#ifndef YMH_QUADRATURE_HPP
#define YMH_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace ymh {

using RealFn = std::function<double(double)>;

// Adaptive Simpson on [a, b] to absolute tolerance tol.
double adaptive_simpson(const RealFn& f, double a, double b, double tol,
                        int max_depth = 48);

// int_a^b g(r) (c - r)^p dr with g smooth, p > -1, a <= b <= c.
// Cells geometrically refined toward r = c; on each cell the weight moments
// are integrated exactly against the linear interpolant of g.
double integrate_weight_pow(const RealFn& g, double p, double a, double b,
                            double c, double tol = 1e-10);

// Exact moments of the weight over one cell:
//   m0 = int_a^b (c - r)^p dr
//   m1 = int_a^b (c - r)^p (r - a)/(b - a) dr
double weight_pow_m0(double p, double a, double b, double c);
double weight_pow_m1(double p, double a, double b, double c);

// n-point Gauss-Legendre nodes/weights on [-1, 1], n in {8, 16, 32, 64}.
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_rule(int n);
double gauss_integrate(const RealFn& f, double a, double b, int n);

// Monotone cubic interpolant (Fritsch-Carlson) of tabulated data.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  double operator()(double x) const;
  double derivative(double x) const;
  bool empty() const { return x_.empty(); }
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, d_;  // nodes, values, node slopes
  int cell(double x) const;
};

// Least-squares fit of log|y| = p log x + log C over samples with y != 0.
struct PowerFit {
  double exponent = 0.0;
  double log_amplitude = 0.0;
  double residual = 0.0;  // rms of log residuals
  int n_used = 0;
};
PowerFit fit_power_law(const std::vector<double>& x,
                       const std::vector<double>& y);

}  // namespace ymh

#endif
