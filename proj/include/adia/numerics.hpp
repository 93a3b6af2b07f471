#pragma once
// Shared numerical kernels: norms, finite differences on uniform grids,
// 4th-order quadrature, phase unwrapping, small matrix exponentials, and a
// natural cubic spline used by tabulated models.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <type_traits>
#include <vector>

namespace adia {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr cxd iu{0.0, 1.0};
inline constexpr double pi = 3.14159265358979323846;

// ---- norms -----------------------------------------------------------------

enum class MatrixNorm { spectral, one };

double spectral_norm(const Mat& m);        // largest singular value
double hermitian_norm(const Mat& h);       // largest |eigenvalue|; h Hermitian
double min_abs_eigenvalue(const Mat& h);   // smallest |eigenvalue|; h Hermitian
double induced_one_norm(const Mat& m);     // max column abs-sum
double matrix_norm(const Mat& m, MatrixNorm kind);

// ---- finite differences ----------------------------------------------------
// 4th-order stencils on a uniform grid; one-sided variants within two samples
// of an edge. T must support +, -, double*.

template <class T>
T series_derivative(const std::vector<T>& f, double h, std::ptrdiff_t k) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
  auto fd5 = [&](std::ptrdiff_t i0, double w0, double w1, double w2, double w3,
                 double w4) -> T {
    return (w0 * f[i0] + w1 * f[i0 + 1] + w2 * f[i0 + 2] + w3 * f[i0 + 3] +
            w4 * f[i0 + 4]) *
           (1.0 / (12.0 * h));
  };
  if (n >= 5) {
    if (k >= 2 && k <= n - 3)
      return fd5(k - 2, 1.0, -8.0, 0.0, 8.0, -1.0);
    if (k == 0) return fd5(0, -25.0, 48.0, -36.0, 16.0, -3.0);
    if (k == 1) return fd5(0, -3.0, -10.0, 18.0, -6.0, 1.0);
    if (k == n - 2) return fd5(n - 5, -1.0, 6.0, -18.0, 10.0, 3.0);
    return fd5(n - 5, 3.0, -16.0, 36.0, -48.0, 25.0);
  }
  if (n >= 3) {  // 2nd order fallback for very short series
    if (k == 0) return (-3.0 * f[0] + 4.0 * f[1] - 1.0 * f[2]) * (1.0 / (2.0 * h));
    if (k == n - 1)
      return (3.0 * f[n - 1] - 4.0 * f[n - 2] + 1.0 * f[n - 3]) * (1.0 / (2.0 * h));
    return (f[k + 1] - f[k - 1]) * (1.0 / (2.0 * h));
  }
  return (f[1] - f[0]) * (1.0 / h);
}

template <class T>
std::vector<T> series_derivative_all(const std::vector<T>& f, double h) {
  std::vector<T> out;
  out.reserve(f.size());
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(f.size()); ++k)
    out.push_back(series_derivative(f, h, k));
  return out;
}

// 4th-order central differences of a matrix-valued function of t. The result
// is materialized before returning so Eigen expressions never outlive their
// operands.
template <class F>
auto fd_derivative1(F&& f, double t, double h) {
  using R = std::decay_t<decltype(f(t))>;
  return R((f(t - 2 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2 * h)) *
           (1.0 / (12.0 * h)));
}

template <class F>
auto fd_derivative2(F&& f, double t, double h) {
  using R = std::decay_t<decltype(f(t))>;
  return R((-f(t - 2 * h) + 16.0 * f(t - h) - 30.0 * f(t) + 16.0 * f(t + h) -
            f(t + 2 * h)) *
           (1.0 / (12.0 * h * h)));
}

// ---- quadrature ------------------------------------------------------------
// Cumulative integral on a uniform grid via the 4-point interpolatory rule
// (cubic through the interval's neighbours), globally 4th order. out[0] = 0.

std::vector<double> cumulative_integral(const std::vector<double>& y, double h);
double integrate(const std::vector<double>& y, double h);

// Doubles the sample count until two successive estimates agree to rel_tol;
// returns the last estimate. eval(k) must evaluate with k samples.
double refine_to_tolerance(const std::function<double(int)>& eval, int k0,
                           double rel_tol, int max_doublings);

// ---- angles and series -----------------------------------------------------

// Removes jumps of (near-)multiples of `period` so the series is continuous.
// period = 2*pi for plain unwrapping; pi also removes sign-flip artifacts of
// real quantities passing through zero.
std::vector<double> unwrap_angles(std::vector<double> a, double period = 2.0 * pi);

// Strict sign changes of the first difference; differences smaller than
// noise_floor_rel * (max - min) count as plateaus and are skipped.
int monotonicity_changes(const std::vector<double>& y, double noise_floor_rel);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---- matrix exponential ----------------------------------------------------

// exp(-i * s * h) for Hermitian h (closed form at N = 2, eigensolve otherwise)
Mat unitary_exp(const Mat& h, double s);

// ---- cubic spline ----------------------------------------------------------
// Natural cubic spline through (x_k, y_k), x ascending. Evaluation outside the
// node range extrapolates the boundary cubic; domain policing is the caller's.

class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);
  double eval(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;

 private:
  std::size_t interval(double x) const;
  std::vector<double> x_, y_, b_, c_, d_;  // y + spline coefficients per node
};

}  // namespace adia
