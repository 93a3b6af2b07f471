#pragma once
// Time-dependent Hermitian models H(t) with first/second derivative access,
// parametric families, tabulated (spline) models, and smooth random models.

#include "adia/defaults.hpp"
#include "adia/errors.hpp"
#include "adia/numerics.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace adia {

struct TimeDomain {
  double t0 = 0.0;
  double t1 = 1.0;
  bool bounded = true;  // false: evaluable at any t
  double length() const { return t1 - t0; }
};

// Closed-form field angles for a two-level model
//   H(t) = (omega0/2) [[cos th, sin th e^{-i ph}], [sin th e^{i ph}, -cos th]].
// First derivatives are required for the analytic eigencurve path; the second
// derivatives are optional (finite differences of the first otherwise).
struct TwoLevelAngles {
  std::function<double(double)> omega0, theta, phi;
  std::function<double(double)> omega0_dot, theta_dot, phi_dot;
  std::function<double(double)> omega0_ddot, theta_ddot, phi_ddot;  // optional
};

class HamiltonianModel {
 public:
  using MatrixFn = std::function<Mat(double)>;

  HamiltonianModel(Eigen::Index dim, TimeDomain domain, MatrixFn h,
                   MatrixFn dh = nullptr, MatrixFn d2h = nullptr,
                   bool real_valued = false);

  Eigen::Index dim() const { return dim_; }
  const TimeDomain& domain() const { return domain_; }
  bool real_valued() const { return real_; }
  bool analytic_first() const { return static_cast<bool>(dh_); }
  bool analytic_second() const { return static_cast<bool>(d2h_); }

  double fd_step() const { return fd_step_; }
  void set_fd_step(double h);

  const std::optional<TwoLevelAngles>& angles() const { return angles_; }
  void set_angles(TwoLevelAngles a) { angles_ = std::move(a); }

  // H(t); domain and hermiticity checked
  Mat eval(double t) const;
  Mat operator()(double t) const { return eval(t); }

  // dH/dt and d2H/dt2; analytic when provided, else 4th-order central
  // differences (which require the stencil to fit inside the domain)
  Mat derivative(double t) const;
  Mat second_derivative(double t) const;

 private:
  void check_domain(double t, double margin) const;

  Eigen::Index dim_;
  TimeDomain domain_;
  MatrixFn h_, dh_, d2h_;
  bool real_ = false;
  double fd_step_ = 1e-5;
  std::optional<TwoLevelAngles> angles_;
};

// ---- families ----------------------------------------------------------------

// H = (omega0/2) [[cos th, sin th e^{-i ph}], [sin th e^{i ph}, -cos th]] from
// closed-form angle functions; unbounded domain unless one is given.
HamiltonianModel make_two_level(TwoLevelAngles angles,
                                std::optional<TimeDomain> domain = std::nullopt);

// constant omega0 and theta, phi(t) = omega * t
HamiltonianModel make_schwinger(double omega0, double theta, double omega);

// real H = (1/2) [[delta, Omega], [Omega, -delta]], delta(t) = alpha cos(varpi t)
HamiltonianModel make_cycling_lz(double alpha, double varpi, double Omega);

// H(t) = H_in (1 - t/T) + H_fin (t/T) on [0, T]
HamiltonianModel make_interpolating(const Mat& h_in, const Mat& h_fin, double T);

// constant model (unbounded domain)
HamiltonianModel make_constant(const Mat& h0);

// cubic-spline interpolation of sampled matrices; times strictly ascending
HamiltonianModel make_tabulated(const std::vector<double>& times,
                                const std::vector<Mat>& samples);

// CSV with header `t, re(H[0][0]), im(H[0][0]), ...` (row-major entries)
HamiltonianModel load_tabulated_csv(const std::string& path);

// H(t) = diag(0, gap, 2 gap, ...) + Sum_j [cos(w_j t + p_j) C_j] with random
// Hermitian C_j of scale `strength`; smooth, well-gapped for strength << gap.
HamiltonianModel make_random_smooth(Eigen::Index dim, std::uint64_t seed,
                                    double t_end, double gap = 1.0,
                                    double strength = 0.05, int harmonics = 3);

}  // namespace adia
