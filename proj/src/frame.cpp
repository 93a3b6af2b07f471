#include "adia/frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adia {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

std::pair<std::size_t, std::size_t> stencil_window(std::size_t k, std::size_t n) {
  if (n < 5) return {0, n - 1};
  if (k <= 1) return {0, 4};
  if (k + 2 >= n) return {n - 5, n - 1};
  return {k - 2, k + 2};
}

// unwrapped argument of a complex series with pi snapping, its finite-difference
// derivative, and a validity mask (samples whose magnitude sat below the floor,
// plus any sample whose stencil touched one)
struct ArgDerivative {
  std::vector<double> arg, arg_dot, aligned_phase;
  std::vector<std::uint8_t> ok;
};

ArgDerivative masked_arg_derivative(const std::vector<cxd>& z,
                                    const std::vector<double>& floor, double dt) {
  const std::size_t kk = z.size();
  ArgDerivative out;
  out.arg.assign(kk, 0.0);
  out.ok.assign(kk, 1);
  std::vector<std::uint8_t> raw_ok(kk, 1);
  for (std::size_t k = 0; k < kk; ++k) {
    if (std::abs(z[k]) <= floor[k]) {
      raw_ok[k] = 0;
      out.arg[k] = k > 0 ? out.arg[k - 1] : 0.0;
    } else {
      out.arg[k] = std::arg(z[k]);
    }
  }
  std::size_t first_ok = 0;
  while (first_ok < kk && !raw_ok[first_ok]) ++first_ok;
  for (std::size_t j = 0; first_ok < kk && j < first_ok; ++j) out.arg[j] = out.arg[first_ok];
  out.arg = unwrap_angles(std::move(out.arg), pi);
  out.aligned_phase = out.arg;
  out.arg_dot = series_derivative_all(out.arg, dt);
  for (std::size_t k = 0; k < kk; ++k) {
    const auto [lo, hi] = stencil_window(k, kk);
    for (std::size_t j = lo; j <= hi; ++j)
      if (!raw_ok[j]) out.ok[k] = 0;
  }
  return out;
}

// delta'^-1 through its eigendecomposition; throws when numerically singular
struct BlockInverse {
  Mat inv;
  double inv_norm;  // 1 / sigma_min
};

BlockInverse invert_block(const Mat& delta, double hnorm, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(delta);
  const auto& lam = es.eigenvalues();
  const double sigma_min = lam.cwiseAbs().minCoeff();
  if (sigma_min <= Defaults::inversion_rel_floor * std::max(hnorm, 1e-300))
    throw SingularBlockError("detuning block singular at t=" + std::to_string(t) +
                             " (sigma_min=" + std::to_string(sigma_min) + ")");
  Vec ilam(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) ilam(i) = 1.0 / lam(i);
  return {Mat(es.eigenvectors() * ilam.asDiagonal() * es.eigenvectors().adjoint()),
          1.0 / sigma_min};
}

}  // namespace

std::size_t AdiabaticFrame::index_of(double t) const {
  if (grid.empty()) throw std::invalid_argument("index_of: empty frame");
  const auto k = static_cast<std::ptrdiff_t>(std::lround((t - grid.front()) / dt));
  const auto kc = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(samples()) - 1);
  const auto idx = static_cast<std::size_t>(kc);
  if (std::abs(grid[idx] - t) > 1e-6 * dt)
    throw std::invalid_argument("time " + std::to_string(t) + " is not on the frame grid");
  return idx;
}

AdiabaticFrame build_frame(const EigenCurve& curve, Eigen::Index n) {
  const Eigen::Index nn = curve.dim;
  if (n < 0 || n >= nn) throw std::invalid_argument("build_frame: level out of range");
  AdiabaticFrame f;
  f.grid = curve.grid;
  f.dt = curve.dt;
  f.dim = nn;
  f.tracked = n;
  f.gauge = curve.gauge;
  const std::size_t kk = curve.samples();
  f.hprime.resize(kk);
  f.delta_prime.resize(kk);
  f.omega_prime.resize(kk);
  f.hnn.resize(kk);
  f.hnorm.resize(kk);
  f.asym.resize(kk);
  f.valid.assign(kk, 1);

  std::vector<Eigen::Index> renum(static_cast<std::size_t>(nn));
  renum[0] = n;
  for (Eigen::Index m = 0, pos = 1; m < nn; ++m)
    if (m != n) renum[static_cast<std::size_t>(pos++)] = m;

  for (std::size_t k = 0; k < kk; ++k) {
    Mat raw(nn, nn);
    for (Eigen::Index a = 0; a < nn; ++a) {
      const Eigen::Index la = renum[static_cast<std::size_t>(a)];
      for (Eigen::Index b = 0; b < nn; ++b) {
        const Eigen::Index lb = renum[static_cast<std::size_t>(b)];
        if (la == lb) {
          raw(a, b) = curve.energies[k](la) + curve.theta_dot[k](la) +
                      std::real(-iu * curve.couplings[k](la, la));
        } else {
          raw(a, b) = -iu * std::exp(iu * (curve.theta[k](lb) - curve.theta[k](la))) *
                      curve.couplings[k](la, lb);
        }
      }
      if (!curve.valid[k][static_cast<std::size_t>(la)]) f.valid[k] = 0;
    }
    f.asym[k] = (raw - raw.adjoint()).norm();
    Mat hp = 0.5 * (raw + raw.adjoint());
    f.hnn[k] = std::real(hp(0, 0));
    f.delta_prime[k] =
        f.hnn[k] * Mat::Identity(nn - 1, nn - 1) - hp.block(1, 1, nn - 1, nn - 1);
    f.omega_prime[k] = 2.0 * hp.block(1, 0, nn - 1, 1);
    f.hnorm[k] = hermitian_norm(hp);
    f.hprime[k] = std::move(hp);
  }
  return f;
}

CriteriaSeries criteria_series(const EigenCurve& curve, const AdiabaticFrame& frame) {
  const std::size_t kk = curve.samples();
  const Eigen::Index nn = curve.dim, n = frame.tracked;
  CriteriaSeries out;
  out.standard.assign(kk, 0.0);
  out.generalized.assign(kk, 0.0);
  out.generalized_ok.assign(kk, 1);
  out.cond13.assign(kk, 0.0);
  out.cond14_integrand.assign(kk, 0.0);

  // standard: sum over m of 2 |<m|dn/dt>| / |E_n - E_m|, couplings being the
  // gap quotients of <m|dH/dt|n>
  for (std::size_t k = 0; k < kk; ++k)
    for (Eigen::Index m = 0; m < nn; ++m) {
      if (m == n) continue;
      const double gap = std::abs(curve.energies[k](n) - curve.energies[k](m));
      out.standard[k] += 2.0 * std::abs(curve.couplings[k](m, n)) / gap;
    }

  // generalized: the denominator acquires the diagonal coupling shift and the
  // rotation rate of the coupling's argument
  for (Eigen::Index m = 0; m < nn; ++m) {
    if (m == n) continue;
    std::vector<cxd> z(kk);
    std::vector<double> floor(kk);
    for (std::size_t k = 0; k < kk; ++k) {
      z[k] = curve.couplings[k](m, n);
      const double gap = std::abs(curve.energies[k](n) - curve.energies[k](m));
      floor[k] = Defaults::arg_rel_floor * curve.hdot_norm[k] / std::max(gap, 1e-300);
    }
    const ArgDerivative ad = masked_arg_derivative(z, floor, curve.dt);
    for (std::size_t k = 0; k < kk; ++k) {
      if (!ad.ok[k]) out.generalized_ok[k] = 0;
      const double den = (curve.energies[k](n) - curve.energies[k](m)) +
                         std::imag(curve.couplings[k](n, n)) -
                         std::imag(curve.couplings[k](m, m)) - ad.arg_dot[k];
      out.generalized[k] += 2.0 * std::abs(z[k]) / std::abs(den);
    }
  }
  for (std::size_t k = 0; k < kk; ++k)
    if (!out.generalized_ok[k]) {
      out.generalized[k] = nan_v;
      ++out.missing;
    }

  // block conditions
  std::vector<Mat> xinv(kk);
  std::vector<double> xnorm(kk);
  for (std::size_t k = 0; k < kk; ++k) {
    const BlockInverse bi =
        invert_block(frame.delta_prime[k], frame.hnorm[k], frame.grid[k]);
    xinv[k] = bi.inv;
    xnorm[k] = bi.inv_norm;
    out.cond13[k] = bi.inv_norm * frame.omega_prime[k].norm();
  }
  const auto ddot = series_derivative_all(frame.delta_prime, frame.dt);
  const auto odot = series_derivative_all(frame.omega_prime, frame.dt);
  for (std::size_t k = 0; k < kk; ++k) {
    const double dinv_dot = hermitian_norm(Mat(xinv[k] * ddot[k] * xinv[k]));
    out.cond14_integrand[k] =
        frame.omega_prime[k].norm() * dinv_dot + xnorm[k] * odot[k].norm();
  }
  out.cond14_integral = cumulative_integral(out.cond14_integrand, frame.dt);
  return out;
}

double standard_criterion(const EigenCurve& curve, Eigen::Index n, double t) {
  const std::size_t k = curve.index_of(t);
  double s = 0.0;
  for (Eigen::Index m = 0; m < curve.dim; ++m) {
    if (m == n) continue;
    const double gap = std::abs(curve.energies[k](n) - curve.energies[k](m));
    const double scale = curve.energies[k].cwiseAbs().maxCoeff();
    if (gap < Defaults::degeneracy_rel * std::max(scale, 1e-300))
      throw DegeneracyError("standard_criterion: gap below floor at t=" +
                            std::to_string(t));
    s += 2.0 * std::abs(curve.couplings[k](m, n)) / gap;
  }
  return s;
}

double generalized_criterion(const EigenCurve& curve, const AdiabaticFrame& frame,
                             double t) {
  const std::size_t k = curve.index_of(t);
  const CriteriaSeries cs = criteria_series(curve, frame);
  if (!cs.generalized_ok[k])
    throw UndefinedArgError("generalized criterion undefined at t=" + std::to_string(t) +
                            ": coupling argument below the validity floor");
  return cs.generalized[k];
}

double condition13(const AdiabaticFrame& frame, double t) {
  const std::size_t k = frame.index_of(t);
  const BlockInverse bi = invert_block(frame.delta_prime[k], frame.hnorm[k], t);
  return bi.inv_norm * frame.omega_prime[k].norm();
}

double condition14(const AdiabaticFrame& frame, double t_end) {
  const std::size_t k = frame.index_of(t_end);
  const std::size_t kk = frame.samples();
  std::vector<Mat> xinv(kk);
  std::vector<double> xnorm(kk);
  for (std::size_t j = 0; j < kk; ++j) {
    const BlockInverse bi =
        invert_block(frame.delta_prime[j], frame.hnorm[j], frame.grid[j]);
    xinv[j] = bi.inv;
    xnorm[j] = bi.inv_norm;
  }
  const auto ddot = series_derivative_all(frame.delta_prime, frame.dt);
  const auto odot = series_derivative_all(frame.omega_prime, frame.dt);
  std::vector<double> integrand(kk);
  for (std::size_t j = 0; j < kk; ++j)
    integrand[j] = frame.omega_prime[j].norm() *
                       hermitian_norm(Mat(xinv[j] * ddot[j] * xinv[j])) +
                   xnorm[j] * odot[j].norm();
  return cumulative_integral(integrand, frame.dt)[k];
}

double condition14_refined(const HamiltonianModel& model, double t0, double t1,
                           std::size_t k0, GaugeChoice gauge, Eigen::Index n,
                           double rel_tol) {
  auto eval = [&](int k) {
    const EigenCurve c = eigencurves(model, t0, t1, static_cast<std::size_t>(k), gauge);
    const AdiabaticFrame f = build_frame(c, n);
    return condition14(f, t1);
  };
  return refine_to_tolerance(eval, static_cast<int>(k0), rel_tol,
                             Defaults::max_quad_doublings);
}

TwoLevelConditionSeries two_level_conditions(const HamiltonianModel& model,
                                             const std::vector<double>& grid) {
  if (!model.angles())
    throw std::invalid_argument("two_level_conditions: model lacks angle functions");
  if (grid.size() < 5)
    throw std::invalid_argument("two_level_conditions: need >= 5 samples");
  const TwoLevelAngles& a = *model.angles();
  const std::size_t kk = grid.size();
  const double dt = grid[1] - grid[0];

  TwoLevelConditionSeries out;
  out.grid = grid;
  out.ratio15.assign(kk, 0.0);
  out.integrand16.assign(kk, 0.0);

  std::vector<cxd> coupling(kk);
  std::vector<double> detuning0(kk), floor(kk);
  for (std::size_t k = 0; k < kk; ++k) {
    const double t = grid[k];
    const double th = a.theta(t), thd = a.theta_dot(t), phd = a.phi_dot(t);
    const double w0 = a.omega0(t);
    coupling[k] = cxd(phd * std::sin(th), -thd);
    detuning0[k] = phd * std::cos(th) - w0;
    floor[k] = Defaults::arg_rel_floor * model.derivative(t).norm() /
               std::max(w0, 1e-300);
  }
  const ArgDerivative ad = masked_arg_derivative(coupling, floor, dt);
  out.ok = ad.ok;

  // the snapped phase rotates the coupling onto a fixed axis, so the ratio
  // series stays smooth through zeros of the coupling
  std::vector<cxd> ratio(kk);
  for (std::size_t k = 0; k < kk; ++k) {
    const double den = detuning0[k] - ad.arg_dot[k];
    out.ratio15[k] = std::abs(coupling[k]) / std::abs(den);
    ratio[k] = coupling[k] * std::exp(-iu * ad.aligned_phase[k]) / den;
  }
  const auto rdot = series_derivative_all(ratio, dt);
  for (std::size_t k = 0; k < kk; ++k) out.integrand16[k] = std::abs(rdot[k]);
  out.integral16 = cumulative_integral(out.integrand16, dt);
  return out;
}

std::pair<double, double> two_level_conditions_at(const HamiltonianModel& model,
                                                  double t) {
  double h = model.fd_step();
  double lo = t - 2.0 * h;
  if (model.domain().bounded) {
    const double len = model.domain().length();
    h = std::min(h, len / 4.0);
    lo = std::clamp(t - 2.0 * h, model.domain().t0, model.domain().t1 - 4.0 * h);
  }
  std::vector<double> g(5);
  for (int i = 0; i < 5; ++i) g[static_cast<std::size_t>(i)] = lo + h * i;
  const TwoLevelConditionSeries s = two_level_conditions(model, g);
  std::size_t k = 0;
  for (std::size_t i = 1; i < 5; ++i)
    if (std::abs(g[i] - t) < std::abs(g[k] - t)) k = i;
  if (!s.ok[k])
    throw UndefinedArgError("two_level_conditions: coupling argument undefined at t=" +
                            std::to_string(t));
  return {s.ratio15[k], s.integrand16[k]};
}

double integral16_refined(const HamiltonianModel& model, double t0, double t1,
                          std::size_t k0, double rel_tol) {
  auto eval = [&](int k) {
    std::vector<double> g(static_cast<std::size_t>(k));
    const double dt = (t1 - t0) / static_cast<double>(k - 1);
    for (int i = 0; i < k; ++i) g[static_cast<std::size_t>(i)] = t0 + dt * i;
    g.back() = t1;
    return two_level_conditions(model, g).integral16.back();
  };
  return refine_to_tolerance(eval, static_cast<int>(k0), rel_tol,
                             Defaults::max_quad_doublings);
}

}  // namespace adia
