#include "adia/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adia {

// ---- norms -----------------------------------------------------------------

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Mat>(m).singularValues()(0);
}

double hermitian_norm(const Mat& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double min_abs_eigenvalue(const Mat& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().minCoeff();
}

double induced_one_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

double matrix_norm(const Mat& m, MatrixNorm kind) {
  return kind == MatrixNorm::spectral ? spectral_norm(m) : induced_one_norm(m);
}

// ---- quadrature ------------------------------------------------------------

std::vector<double> cumulative_integral(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n == 2) {
    out[1] = 0.5 * h * (y[0] + y[1]);
    return out;
  }
  if (n == 3) {  // parabola through the three points
    out[1] = h * (5.0 * y[0] + 8.0 * y[1] - y[2]) / 12.0;
    out[2] = out[1] + h * (-y[0] + 8.0 * y[1] + 5.0 * y[2]) / 12.0;
    return out;
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double seg;
    if (k == 0)
      seg = h * (9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3]) / 24.0;
    else if (k + 2 == n)
      seg = h * (y[n - 4] - 5.0 * y[n - 3] + 19.0 * y[n - 2] + 9.0 * y[n - 1]) / 24.0;
    else
      seg = h * (-y[k - 1] + 13.0 * y[k] + 13.0 * y[k + 1] - y[k + 2]) / 24.0;
    out[k + 1] = out[k] + seg;
  }
  return out;
}

double integrate(const std::vector<double>& y, double h) {
  return cumulative_integral(y, h).back();
}

double refine_to_tolerance(const std::function<double(int)>& eval, int k0,
                           double rel_tol, int max_doublings) {
  int k = k0;
  double prev = eval(k);
  for (int d = 0; d < max_doublings; ++d) {
    k = 2 * k - 1;  // double the interval count
    const double cur = eval(k);
    const double scale = std::max(std::abs(prev), std::abs(cur));
    if (std::abs(cur - prev) <= rel_tol * scale + 1e-300) return cur;
    prev = cur;
  }
  return prev;
}

// ---- angles and series -----------------------------------------------------

std::vector<double> unwrap_angles(std::vector<double> a, double period) {
  double offset = 0.0;
  for (std::size_t k = 1; k < a.size(); ++k) {
    const double d = a[k] + offset - a[k - 1];
    offset -= std::round(d / period) * period;
    a[k] += offset;
  }
  return a;
}

int monotonicity_changes(const std::vector<double>& y, double noise_floor_rel) {
  if (y.size() < 3) return 0;
  const double range =
      *std::max_element(y.begin(), y.end()) - *std::min_element(y.begin(), y.end());
  if (range <= 0.0) return 0;
  const double floor = noise_floor_rel * range;
  int count = 0, last = 0;
  for (std::size_t k = 1; k < y.size(); ++k) {
    const double d = y[k] - y[k - 1];
    if (std::abs(d) <= floor) continue;  // plateau
    const int s = d > 0 ? 1 : -1;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope: need two equal-length series");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---- matrix exponential ----------------------------------------------------

Mat unitary_exp(const Mat& h, double s) {
  const Eigen::Index n = h.rows();
  if (n == 2) {
    const double a = 0.5 * std::real(h(0, 0) + h(1, 1));
    const double vz = 0.5 * std::real(h(0, 0) - h(1, 1));
    const cxd r = h(0, 1);
    const double v = std::sqrt(std::norm(r) + vz * vz);
    const cxd ph = std::exp(-iu * s * a);
    Mat u(2, 2);
    if (v < 1e-300) {
      u.setIdentity();
      return ph * u;
    }
    const double c = std::cos(s * v);
    const double sn = std::sin(s * v) / v;
    u(0, 0) = c - iu * sn * vz;
    u(0, 1) = -iu * sn * r;
    u(1, 0) = -iu * sn * std::conj(r);
    u(1, 1) = c + iu * sn * vz;
    return ph * u;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const auto& lam = es.eigenvalues();
  Vec phases(n);
  for (Eigen::Index j = 0; j < n; ++j) phases(j) = std::exp(-iu * s * lam(j));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// ---- cubic spline ----------------------------------------------------------

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n != y_.size() || n < 2)
    throw std::invalid_argument("CubicSpline: need >= 2 ascending nodes");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1]))
      throw std::invalid_argument("CubicSpline: nodes must ascend strictly");
  b_.assign(n, 0.0);
  c_.assign(n, 0.0);
  d_.assign(n, 0.0);
  if (n == 2) {
    b_[0] = b_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
    return;
  }
  // natural spline: tridiagonal solve for the c coefficients
  std::vector<double> h(n - 1), mu(n, 0.0), z(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double alpha =
        3.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
    const double l = 2.0 * (x_[i + 1] - x_[i - 1]) - h[i - 1] * mu[i - 1];
    mu[i] = h[i] / l;
    z[i] = (alpha - h[i - 1] * z[i - 1]) / l;
  }
  for (std::size_t j = n - 1; j-- > 0;) {
    c_[j] = z[j] - mu[j] * c_[j + 1];
    b_[j] = (y_[j + 1] - y_[j]) / h[j] - h[j] * (c_[j + 1] + 2.0 * c_[j]) / 3.0;
    d_[j] = (c_[j + 1] - c_[j]) / (3.0 * h[j]);
  }
}

std::size_t CubicSpline::interval(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::ptrdiff_t i = std::distance(x_.begin(), it) - 1;
  return static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(x_.size()) - 2));
}

double CubicSpline::eval(double x) const {
  const std::size_t i = interval(x);
  const double dx = x - x_[i];
  return y_[i] + dx * (b_[i] + dx * (c_[i] + dx * d_[i]));
}

double CubicSpline::deriv(double x) const {
  const std::size_t i = interval(x);
  const double dx = x - x_[i];
  return b_[i] + dx * (2.0 * c_[i] + dx * 3.0 * d_[i]);
}

double CubicSpline::deriv2(double x) const {
  const std::size_t i = interval(x);
  const double dx = x - x_[i];
  return 2.0 * c_[i] + 6.0 * d_[i] * dx;
}

}  // namespace adia
