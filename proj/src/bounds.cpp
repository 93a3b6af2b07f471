#include "adia/bounds.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adia/defaults.hpp"
#include "adia/errors.hpp"

namespace adia {

namespace {

// eigendecomposition of the decoupled block, shared by the fixed point
struct BlockEigen {
  Eigen::VectorXd lam;
  Mat vecs;
  double sigma_min = 0.0;
};

BlockEigen block_eigen(const AdiabaticFrame& frame, std::size_t k) {
  Eigen::SelfAdjointEigenSolver<Mat> es(frame.delta_prime[k]);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("block eigensolve failed at sample " + std::to_string(k));
  BlockEigen out;
  out.lam = es.eigenvalues();
  out.vecs = es.eigenvectors();
  out.sigma_min = out.lam.cwiseAbs().minCoeff();
  return out;
}

BWResult bw_at(const AdiabaticFrame& frame, std::size_t k) {
  const Eigen::Index nb = frame.dim - 1;
  const double scale = std::max(frame.hnorm[k], 1e-300);
  const BlockEigen be = block_eigen(frame, k);
  if (be.sigma_min <= Defaults::inversion_rel_floor * scale)
    throw SingularBlockError("decoupled block is singular at sample " + std::to_string(k));
  const double inv_norm = 1.0 / be.sigma_min;

  const Vec w = be.vecs.adjoint() * (0.5 * frame.omega_prime[k]);
  BWResult out;
  double shift = 0.0;
  double prev_res = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= Defaults::max_bw_iters; ++it) {
    double next = 0.0;
    for (Eigen::Index i = 0; i < nb; ++i) {
      const double d = be.lam(i) + shift;
      if (std::abs(d) <= Defaults::inversion_rel_floor * scale)
        throw ConvergenceError("resolvent pole in the level-shift iteration at sample " +
                               std::to_string(k));
      next += std::norm(w(i)) / d;
    }
    if (std::abs(next) * inv_norm >= 1.0)
      throw ConvergenceError("level shift left the contraction region at sample " +
                             std::to_string(k));
    const double res = std::abs(next - shift);
    if (res > prev_res)
      shift += Defaults::bw_damping * (next - shift);
    else
      shift = next;
    prev_res = res;
    out.iterations = it;
    if (res <= 1e-16 * std::max(scale, std::abs(shift))) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged)
    throw ConvergenceError("level-shift iteration did not settle in " +
                           std::to_string(Defaults::max_bw_iters) + " steps at sample " +
                           std::to_string(k));

  Vec y(nb);
  for (Eigen::Index i = 0; i < nb; ++i) y(i) = w(i) / (be.lam(i) + shift);
  out.n_bold = Vec(frame.dim);
  out.n_bold(0) = 1.0;
  out.n_bold.tail(nb) = be.vecs * y;
  out.n_prime = out.n_bold / out.n_bold.norm();
  out.shift = shift;
  out.e_prime = frame.hnn[k] + shift;

  const double resid = (frame.hprime[k] * out.n_prime - out.e_prime * out.n_prime).norm();
  if (resid > Defaults::bw_residual_rel * scale)
    throw ConvergenceError("level-shift fixed point settled on a non-eigenpair at sample " +
                           std::to_string(k));
  return out;
}

}  // namespace

BWResult brillouin_wigner(const AdiabaticFrame& frame, double t) {
  return bw_at(frame, frame.index_of(t));
}

std::vector<BWResult> bw_series(const AdiabaticFrame& frame) {
  std::vector<BWResult> out(frame.samples());
  for (std::size_t k = 0; k < frame.samples(); ++k) {
    try {
      out[k] = bw_at(frame, k);
    } catch (const ConvergenceError&) {
      out[k].converged = false;
      out[k].e_prime = std::numeric_limits<double>::quiet_NaN();
    } catch (const SingularBlockError&) {
      out[k].converged = false;
      out[k].e_prime = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

std::pair<double, Vec> perturbative_second_order(const AdiabaticFrame& frame, double t) {
  const std::size_t k = frame.index_of(t);
  const Mat& hp = frame.hprime[k];
  const double scale = std::max(frame.hnorm[k], 1e-300);
  const double h00 = hp(0, 0).real();
  double energy = h00;
  Vec v = Vec::Zero(frame.dim);
  v(0) = 1.0;
  for (Eigen::Index m = 1; m < frame.dim; ++m) {
    const double den = h00 - hp(m, m).real();
    if (std::abs(den) <= Defaults::inversion_rel_floor * scale)
      throw DegeneracyError("degenerate frame diagonal in the perturbative eigenpair at t = " +
                            std::to_string(t));
    energy += std::norm(hp(m, 0)) / den;
    v(m) = hp(m, 0) / den;
  }
  return {energy, v};
}

NPrimeSeries nprime_series(const AdiabaticFrame& frame) {
  NPrimeSeries out;
  out.vectors.resize(frame.samples());
  out.e_prime.resize(frame.samples());
  Vec prev = Vec::Zero(frame.dim);
  prev(0) = 1.0;
  for (std::size_t k = 0; k < frame.samples(); ++k) {
    Eigen::SelfAdjointEigenSolver<Mat> es(frame.hprime[k]);
    if (es.info() != Eigen::Success)
      throw ConvergenceError("frame eigensolve failed at sample " + std::to_string(k));
    Eigen::Index best = 0;
    double best_ov = -1.0;
    for (Eigen::Index j = 0; j < frame.dim; ++j) {
      const double ov = std::abs(prev.dot(es.eigenvectors().col(j)));
      if (ov > best_ov) {
        best_ov = ov;
        best = j;
      }
    }
    Vec v = es.eigenvectors().col(best);
    cxd lead = v(0);
    if (std::abs(lead) <= Defaults::normalization) lead = prev.dot(v);
    if (std::abs(lead) > 0.0) v *= std::conj(lead) / std::abs(lead);
    out.vectors[k] = v;
    out.e_prime[k] = es.eigenvalues()(best);
    prev = v;
  }
  return out;
}

namespace {

double ascending_gap(const Eigen::VectorXd& ev, Eigen::Index n) {
  double g = std::numeric_limits<double>::infinity();
  for (Eigen::Index m = 0; m < ev.size(); ++m)
    if (m != n) g = std::min(g, std::abs(ev(n) - ev(m)));
  return g;
}

}  // namespace

JrsBound jrs_bound(const HamiltonianModel& model, const EigenCurve& curve,
                   Eigen::Index n, double t_end) {
  if (n < 0 || n >= curve.dim) throw DomainError("tracked level out of range");
  const double a = curve.grid.front();
  const double b = curve.grid.back();
  const double slack = 1e-9 * std::max(1.0, b - a);
  if (t_end < a - slack || t_end > b + slack)
    throw DomainError("bound horizon outside the sampled window");
  t_end = std::clamp(t_end, a, b);

  JrsBound out;
  if (curve.level_order_stable) {
    auto gap_at = [&](double t) { return ascending_gap(eigenvalues_sorted(model.eval(t)), n); };
    auto term = [&](double t) {
      const double dn = spectral_norm(model.derivative(t));
      const double d2n = spectral_norm(model.second_derivative(t));
      const double g = gap_at(t);
      return 7.0 * dn * dn / (g * g * g) + d2n / (g * g);
    };
    const double g0 = gap_at(a);
    const double g1 = gap_at(t_end);
    out.boundary_start = spectral_norm(model.derivative(a)) / (g0 * g0);
    out.boundary_end = spectral_norm(model.derivative(t_end)) / (g1 * g1);
    if (t_end > a) {
      auto eval = [&](int k) {
        const double h = (t_end - a) / (k - 1);
        std::vector<double> vals(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) vals[static_cast<std::size_t>(i)] = term(a + i * h);
        return integrate(vals, h);
      };
      out.integral = refine_to_tolerance(eval, 129, Defaults::quad_rel,
                                         Defaults::max_quad_doublings);
    }
    return out;
  }

  // level crossings present: quadrature on the tracked grid only
  const std::vector<double> series = jrs_series(model, curve, n);
  const std::size_t k = curve.index_of(t_end);
  const GapSeries gs = gaps(curve, n);
  const double g0 = gs.local_gap.front();
  const double g1 = gs.local_gap[k];
  out.boundary_start = spectral_norm(model.derivative(a)) / (g0 * g0);
  out.boundary_end = spectral_norm(model.derivative(curve.grid[k])) / (g1 * g1);
  out.integral = series[k] - out.boundary_start - out.boundary_end;
  return out;
}

std::vector<double> jrs_series(const HamiltonianModel& model, const EigenCurve& curve,
                               Eigen::Index n) {
  if (n < 0 || n >= curve.dim) throw DomainError("tracked level out of range");
  const std::size_t ns = curve.samples();
  const GapSeries gs = gaps(curve, n);
  std::vector<double> dnorm(ns), term(ns), bterm(ns);
  for (std::size_t k = 0; k < ns; ++k) {
    const double t = curve.grid[k];
    const double g = gs.local_gap[k];
    dnorm[k] = spectral_norm(model.derivative(t));
    const double d2n = spectral_norm(model.second_derivative(t));
    term[k] = 7.0 * dnorm[k] * dnorm[k] / (g * g * g) + d2n / (g * g);
    bterm[k] = dnorm[k] / (g * g);
  }
  const std::vector<double> cum = cumulative_integral(term, curve.dt);
  std::vector<double> out(ns);
  for (std::size_t k = 0; k < ns; ++k) out[k] = bterm.front() + bterm[k] + cum[k];
  return out;
}

std::vector<double> key_bound_series(const AdiabaticFrame& frame,
                                     const std::vector<Vec>& vectors) {
  if (vectors.size() != frame.samples())
    throw DomainError("frame-vector series does not match the frame grid");
  const std::size_t ns = frame.samples();
  Vec e0 = Vec::Zero(frame.dim);
  e0(0) = 1.0;
  const std::vector<Vec> vdot = series_derivative_all(vectors, frame.dt);
  std::vector<double> speed(ns);
  for (std::size_t k = 0; k < ns; ++k) speed[k] = vdot[k].norm();
  const std::vector<double> path = cumulative_integral(speed, frame.dt);
  const double d0 = (vectors.front() - e0).norm();
  std::vector<double> out(ns);
  for (std::size_t k = 0; k < ns; ++k) out[k] = d0 + (vectors[k] - e0).norm() + path[k];
  return out;
}

double key_bound(const AdiabaticFrame& frame, const std::vector<BWResult>& bw,
                 double t_end) {
  if (bw.size() != frame.samples())
    throw DomainError("fixed-point series does not match the frame grid");
  const std::size_t k_end = frame.index_of(t_end);
  for (std::size_t k = 0; k < frame.samples(); ++k)
    if (!bw[k].converged)
      throw ConvergenceError("fixed point unconverged at sample " + std::to_string(k) +
                             "; path-length bound not evaluable");
  std::vector<Vec> vecs(frame.samples());
  for (std::size_t k = 0; k < frame.samples(); ++k) vecs[k] = bw[k].n_prime;
  return key_bound_series(frame, vecs)[k_end];
}

std::vector<ZenoBound> zeno_series(const AdiabaticFrame& frame) {
  const std::size_t ns = frame.samples();
  std::vector<double> half(ns);
  for (std::size_t k = 0; k < ns; ++k) half[k] = 0.5 * frame.omega_prime[k].norm();
  const std::vector<double> phase = cumulative_integral(half, frame.dt);
  std::vector<ZenoBound> out(ns);
  for (std::size_t k = 0; k < ns; ++k) {
    out[k].phase = phase[k];
    out[k].cos_form = 1.0 - std::cos(std::min(pi, phase[k]));
    out[k].quadratic_form = 0.5 * phase[k] * phase[k];
  }
  return out;
}

ZenoBound zeno_bound(const AdiabaticFrame& frame, double t) {
  return zeno_series(frame)[frame.index_of(t)];
}

double zeno_time(const AdiabaticFrame& frame, double target) {
  if (!(target > 0.0)) throw DomainError("leakage target must be positive");
  const double phase_star =
      target <= 2.0 ? std::acos(1.0 - target) : std::sqrt(2.0 * target);
  const std::vector<ZenoBound> zs = zeno_series(frame);
  for (std::size_t k = 0; k < zs.size(); ++k) {
    if (zs[k].phase >= phase_star) {
      if (k == 0) return frame.grid.front();
      const double p0 = zs[k - 1].phase;
      const double p1 = zs[k].phase;
      const double w = p1 > p0 ? (phase_star - p0) / (p1 - p0) : 1.0;
      return frame.grid[k - 1] + w * frame.dt;
    }
  }
  return std::numeric_limits<double>::infinity();
}

std::pair<double, double> bauer_fike(const AdiabaticFrame& frame, double e_prime,
                                     double t) {
  const std::size_t k = frame.index_of(t);
  const Mat& hp = frame.hprime[k];
  double lhs = std::numeric_limits<double>::infinity();
  for (Eigen::Index m = 0; m < frame.dim; ++m)
    lhs = std::min(lhs, std::abs(e_prime - hp(m, m).real()));
  Mat off = hp;
  off.diagonal().setZero();
  return {lhs, hermitian_norm(off)};
}

}  // namespace adia
