#include "adia/propagator.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "adia/bounds.hpp"
#include "adia/errors.hpp"

namespace adia {

Mat cf4_step(const HamiltonianModel& model, double t, double h) {
  static const double s3 = std::sqrt(3.0);
  const double c1 = 0.5 - s3 / 6.0;
  const double c2 = 0.5 + s3 / 6.0;
  const double a1 = 0.25 - s3 / 6.0;
  const double a2 = 0.25 + s3 / 6.0;
  const Mat h1 = model.eval(t + c1 * h);
  const Mat h2 = model.eval(t + c2 * h);
  const Mat left = a1 * h1 + a2 * h2;
  const Mat right = a2 * h1 + a1 * h2;
  return unitary_exp(left, h) * unitary_exp(right, h);
}

Mat evolve_fixed_step(const HamiltonianModel& model, double t0, double t1, long nsteps) {
  if (nsteps < 1) throw DomainError("need at least one step");
  const double h = (t1 - t0) / static_cast<double>(nsteps);
  Mat u = Mat::Identity(model.dim(), model.dim());
  for (long k = 0; k < nsteps; ++k) u = cf4_step(model, t0 + k * h, h) * u;
  return u;
}

namespace {

void reunitarize(Mat& u) {
  const Eigen::Index d = u.rows();
  Eigen::HouseholderQR<Mat> qr(u);
  Mat q = qr.householderQ() * Mat::Identity(d, d);
  const Mat r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    const cxd rjj = r(j, j);
    if (std::abs(rjj) > 0.0) q.col(j) *= rjj / std::abs(rjj);
  }
  u = q;
}

}  // namespace

EvolutionResult propagate(const HamiltonianModel& model, const EigenCurve& curve,
                          Eigen::Index n, double t_end, double tol) {
  if (n < 0 || n >= curve.dim) throw DomainError("tracked level out of range");
  if (!(tol > 0.0)) throw DomainError("integrator tolerance must be positive");
  const std::size_t k_end = curve.index_of(t_end);
  const Eigen::Index d = curve.dim;
  const double total = std::max(curve.grid[k_end] - curve.grid.front(), curve.dt);
  const double min_step = Defaults::min_step_rel * total;

  const AdiabaticFrame frame = build_frame(curve, n);
  const NPrimeSeries np = nprime_series(frame);
  const std::vector<double> phase = cumulative_integral(np.e_prime, curve.dt);

  EvolutionResult out;
  out.grid.assign(curve.grid.begin(), curve.grid.begin() + k_end + 1);
  out.unitaries.resize(k_end + 1);
  out.fidelity.resize(k_end + 1);
  out.phase_mismatch.resize(k_end + 1);
  out.projector_distance.resize(k_end + 1);
  out.e_prime.assign(np.e_prime.begin(), np.e_prime.begin() + k_end + 1);
  out.phase.assign(phase.begin(), phase.begin() + k_end + 1);

  const Vec q0 = curve.basis.front().col(n);
  auto record = [&](std::size_t k, const Mat& u) {
    const Vec psi = u * q0;
    const Vec qn = curve.basis[k].col(n);
    const double f = std::abs(qn.dot(psi));
    out.unitaries[k] = u;
    out.fidelity[k] = f;
    out.projector_distance[k] = std::sqrt(std::max(0.0, 1.0 - f * f));
    out.phase_mismatch[k] = (psi - std::exp(cxd(0.0, -phase[k])) * qn).norm();
  };

  Mat ucur = Mat::Identity(d, d);
  record(0, ucur);
  double h = curve.dt;
  long long since_qr = 0;
  for (std::size_t k = 1; k <= k_end; ++k) {
    const double target = curve.grid[k];
    double t = curve.grid[k - 1];
    while (target - t > 1e-12 * curve.dt) {
      const double hstep = std::min(h, target - t);
      const Mat u_full = cf4_step(model, t, hstep);
      const Mat u_fine =
          cf4_step(model, t + 0.5 * hstep, 0.5 * hstep) * cf4_step(model, t, 0.5 * hstep);
      const double err = (u_full - u_fine).norm();
      const double tol_loc = tol * (hstep / total);
      if (err <= tol_loc) {
        ucur = u_fine * ucur;
        t += hstep;
        ++out.steps_accepted;
        if (++since_qr >= 128) {
          reunitarize(ucur);
          since_qr = 0;
        }
        if (err < 0.02 * tol_loc && hstep == h) h = std::min(2.0 * h, total);
      } else {
        ++out.steps_rejected;
        h = 0.5 * hstep;
        if (h < min_step)
          throw StepUnderflowError("step size underflow at t = " + std::to_string(t));
      }
    }
    record(k, ucur);
  }

  out.min_fidelity = *std::min_element(out.fidelity.begin(), out.fidelity.end());
  out.final_fidelity = out.fidelity.back();
  out.max_phase_mismatch =
      *std::max_element(out.phase_mismatch.begin(), out.phase_mismatch.end());
  return out;
}

Mat schwinger_analytic(double omega0, double theta, double omega, double t) {
  Mat sx(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  const Mat h_rot =
      0.5 * omega0 * (std::sin(theta) * sx + std::cos(theta) * sz) - 0.5 * omega * sz;
  return unitary_exp(0.5 * omega * sz, t) * unitary_exp(h_rot, t);
}

MultipassageResult lz_multipassage(double alpha, double varpi, double Omega,
                                   const std::vector<int>& passages,
                                   int samples_per_passage, double tol) {
  if (passages.empty()) throw DomainError("no passage counts given");
  for (int m : passages)
    if (m < 1) throw DomainError("passage counts must be positive");
  if (!(alpha > 0.0) || !(varpi > 0.0) || !(Omega > 0.0))
    throw DomainError("cycling sweep parameters must be positive");
  if (samples_per_passage < 8) throw DomainError("too few samples per passage");

  const int mmax = *std::max_element(passages.begin(), passages.end());
  const double t_end = mmax * pi / varpi;
  const HamiltonianModel model = make_cycling_lz(alpha, varpi, Omega);
  const std::size_t ns = static_cast<std::size_t>(mmax) * samples_per_passage + 1;
  const EigenCurve curve =
      eigencurves(model, 0.0, t_end, ns, {GaugeTag::parallel_transport, 0});
  const EvolutionResult ev = propagate(model, curve, 0, t_end, tol);

  MultipassageResult out;
  out.p1_predicted = std::exp(-pi * Omega * Omega / (2.0 * alpha * varpi));
  out.passages = passages;
  for (int m : passages) {
    const double f = ev.fidelity[static_cast<std::size_t>(m) * samples_per_passage];
    out.leak.push_back(std::max(0.0, 1.0 - f * f));
  }
  std::vector<double> xs(passages.begin(), passages.end());
  out.exponent = loglog_slope(xs, out.leak);
  return out;
}

HamiltonianModel rescale_time(const HamiltonianModel& model, double eps) {
  if (!(eps > 0.0)) throw DomainError("time-scale factor must be positive");
  const TimeDomain d0 = model.domain();
  const TimeDomain dom{d0.t0 / eps, d0.t1 / eps, d0.bounded};
  auto base = std::make_shared<const HamiltonianModel>(model);

  HamiltonianModel::MatrixFn h = [base, eps](double t) { return Mat(base->eval(eps * t)); };
  HamiltonianModel::MatrixFn dh, d2h;
  if (model.analytic_first())
    dh = [base, eps](double t) { return Mat(eps * base->derivative(eps * t)); };
  if (model.analytic_second())
    d2h = [base, eps](double t) {
      return Mat(eps * eps * base->second_derivative(eps * t));
    };
  HamiltonianModel out(model.dim(), dom, std::move(h), std::move(dh), std::move(d2h),
                       model.real_valued());
  if (model.angles()) {
    const TwoLevelAngles& a = *model.angles();
    TwoLevelAngles b;
    auto stretch = [eps](const std::function<double(double)>& f, double power) {
      if (!f) return std::function<double(double)>();
      const double w = std::pow(eps, power);
      return std::function<double(double)>([f, eps, w](double t) { return w * f(eps * t); });
    };
    b.omega0 = stretch(a.omega0, 0);
    b.theta = stretch(a.theta, 0);
    b.phi = stretch(a.phi, 0);
    b.omega0_dot = stretch(a.omega0_dot, 1);
    b.theta_dot = stretch(a.theta_dot, 1);
    b.phi_dot = stretch(a.phi_dot, 1);
    b.omega0_ddot = stretch(a.omega0_ddot, 2);
    b.theta_ddot = stretch(a.theta_ddot, 2);
    b.phi_ddot = stretch(a.phi_ddot, 2);
    out.set_angles(std::move(b));
  }
  return out;
}

}  // namespace adia
