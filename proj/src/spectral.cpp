#include "adia/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

namespace adia {

std::string gauge_name(const GaugeChoice& g) {
  switch (g.tag) {
    case GaugeTag::parallel_transport:
      return "parallel_transport";
    case GaugeTag::berry_dynamical:
      return "berry_dynamical";
    case GaugeTag::pancharatnam_aligned:
      return "pancharatnam_aligned(" + std::to_string(g.aligned_level) + ")";
  }
  return "unknown";
}

Eigen::VectorXd eigenvalues_sorted(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

std::size_t EigenCurve::index_of(double t) const {
  if (grid.empty()) throw std::invalid_argument("index_of: empty curve");
  const auto k = static_cast<std::ptrdiff_t>(std::lround((t - grid.front()) / dt));
  const auto kc = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(samples()) - 1);
  const auto idx = static_cast<std::size_t>(kc);
  if (std::abs(grid[idx] - t) > 1e-6 * dt)
    throw std::invalid_argument("time " + std::to_string(t) + " is not on the curve grid");
  return idx;
}

cxd EigenCurve::gauged_coupling(Eigen::Index m, Eigen::Index n, std::size_t k) const {
  return std::exp(iu * (theta[k](n) - theta[k](m))) * couplings[k](m, n);
}

namespace {

// sample window used by the 5-point derivative stencil at index k
std::pair<std::size_t, std::size_t> stencil_window(std::size_t k, std::size_t n) {
  if (n < 5) return {0, n - 1};
  if (k <= 1) return {0, 4};
  if (k + 2 >= n) return {n - 5, n - 1};
  return {k - 2, k + 2};
}

void check_degeneracy(const Eigen::VectorXd& e, double t) {
  const double scale = std::max({std::abs(e(0)), std::abs(e(e.size() - 1)), 1e-300});
  for (Eigen::Index i = 0; i + 1 < e.size(); ++i)
    if (e(i + 1) - e(i) < Defaults::degeneracy_rel * scale)
      throw DegeneracyError("spectral gap " + std::to_string(e(i + 1) - e(i)) +
                            " below the degeneracy floor at t=" + std::to_string(t));
}

// rotate each column to be real with positive leading component
void force_real_columns(Mat& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index lead = 0;
    while (lead < v.rows() && std::abs(v(lead, c)) < 1e-6) ++lead;
    if (lead == v.rows()) continue;
    v.col(c) *= std::exp(-iu * std::arg(v(lead, c)));
    v.col(c) = v.col(c).real().cast<cxd>();
    v.col(c).normalize();
  }
}

struct BaseCurve {
  std::vector<Eigen::VectorXd> energies;
  std::vector<Mat> vectors;  // continuity-fixed, discretely transported columns
  bool order_stable = true;
  double min_overlap = 1.0;
};

BaseCurve raw_decomposition(const HamiltonianModel& model,
                            const std::vector<double>& grid) {
  BaseCurve out;
  out.energies.reserve(grid.size());
  out.vectors.reserve(grid.size());
  const bool real = model.real_valued();
  for (double t : grid) {
    Eigen::SelfAdjointEigenSolver<Mat> es(model.eval(t));
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eigendecomposition failed at t=" + std::to_string(t));
    Eigen::VectorXd e = es.eigenvalues();
    check_degeneracy(e, t);
    Mat v = es.eigenvectors();
    if (real) force_real_columns(v);
    out.energies.push_back(std::move(e));
    out.vectors.push_back(std::move(v));
  }
  // match levels to the previous sample by maximal overlap (previous levels
  // visited in ascending energy order so ties favour the energy ordering),
  // then align phases by discrete parallel transport
  const Eigen::Index n = model.dim();
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const Mat ov = out.vectors[k - 1].adjoint() * out.vectors[k];
    std::vector<Eigen::Index> assign(static_cast<std::size_t>(n));
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    bool identity = true;
    for (Eigen::Index m = 0; m < n; ++m) {
      Eigen::Index best = -1;
      double best_ov = -1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double a = std::abs(ov(m, j));
        if (a > best_ov) {
          best_ov = a;
          best = j;
        }
      }
      assign[static_cast<std::size_t>(m)] = best;
      used[static_cast<std::size_t>(best)] = true;
      if (best != m) identity = false;
      out.min_overlap = std::min(out.min_overlap, best_ov);
    }
    if (!identity) {
      out.order_stable = false;
      Mat pv(n, n);
      Eigen::VectorXd pe(n);
      for (Eigen::Index m = 0; m < n; ++m) {
        pv.col(m) = out.vectors[k].col(assign[static_cast<std::size_t>(m)]);
        pe(m) = out.energies[k](assign[static_cast<std::size_t>(m)]);
      }
      out.vectors[k] = std::move(pv);
      out.energies[k] = std::move(pe);
    }
    for (Eigen::Index m = 0; m < n; ++m) {
      const cxd lambda = ov(m, assign[static_cast<std::size_t>(m)]);
      if (std::abs(lambda) < 1e-300) continue;
      if (real) {
        if (std::real(lambda) < 0.0) out.vectors[k].col(m) *= -1.0;
      } else {
        out.vectors[k].col(m) *= std::conj(lambda) / std::abs(lambda);
      }
    }
  }
  return out;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t k) {
  std::vector<double> g(k);
  const double dt = (t1 - t0) / static_cast<double>(k - 1);
  for (std::size_t i = 0; i < k; ++i) g[i] = t0 + dt * static_cast<double>(i);
  g.back() = t1;
  return g;
}

// gauge phases theta/theta_dot from the ungauged curve, then the gauged basis
void apply_gauge(EigenCurve& c, const std::vector<Mat>& base,
                 const std::vector<Mat>& base_dot,
                 const std::vector<double>& hdot_scale) {
  const std::size_t kk = c.samples();
  const auto n = static_cast<std::size_t>(c.dim);
  c.theta.assign(kk, Eigen::VectorXd::Zero(c.dim));
  c.theta_dot.assign(kk, Eigen::VectorXd::Zero(c.dim));
  c.valid.assign(kk, std::vector<std::uint8_t>(n, 1));

  // transported phase rate for level m: cancels Im <m|d/dt m>
  auto transport_rate = [&](Eigen::Index m) {
    std::vector<double> r(kk);
    for (std::size_t k = 0; k < kk; ++k) r[k] = -std::imag(c.couplings[k](m, m));
    return r;
  };
  auto set_level = [&](Eigen::Index m, const std::vector<double>& rate,
                       const std::vector<double>& phase) {
    for (std::size_t k = 0; k < kk; ++k) {
      c.theta_dot[k](m) = rate[k];
      c.theta[k](m) = phase[k];
    }
  };

  switch (c.gauge.tag) {
    case GaugeTag::parallel_transport: {
      for (Eigen::Index m = 0; m < c.dim; ++m) {
        const auto rate = transport_rate(m);
        set_level(m, rate, cumulative_integral(rate, c.dt));
      }
      break;
    }
    case GaugeTag::berry_dynamical: {
      for (Eigen::Index m = 0; m < c.dim; ++m) {
        auto rate = transport_rate(m);
        for (std::size_t k = 0; k < kk; ++k) rate[k] -= c.energies[k](m);
        set_level(m, rate, cumulative_integral(rate, c.dt));
      }
      break;
    }
    case GaugeTag::pancharatnam_aligned: {
      const Eigen::Index nlev = c.gauge.aligned_level;
      const auto rate_n = transport_rate(nlev);
      const auto phase_n = cumulative_integral(rate_n, c.dt);
      set_level(nlev, rate_n, phase_n);
      for (Eigen::Index m = 0; m < c.dim; ++m) {
        if (m == nlev) continue;
        // alignment angle arg(-i <m|d/dt n>), held through samples where the
        // coupling is too small for its argument to mean anything
        std::vector<double> a(kk, 0.0);
        std::vector<std::uint8_t> argok(kk, 1);
        for (std::size_t k = 0; k < kk; ++k) {
          const cxd cmn = c.couplings[k](m, nlev);
          const double gap = std::abs(c.energies[k](nlev) - c.energies[k](m));
          const double floor =
              Defaults::arg_rel_floor * hdot_scale[k] / std::max(gap, 1e-300);
          if (std::abs(cmn) <= floor) {
            argok[k] = 0;
            a[k] = k > 0 ? a[k - 1] : 0.0;
          } else {
            a[k] = std::arg(-iu * cmn);
          }
        }
        std::size_t first_ok = 0;  // backfill a leading run of held samples
        while (first_ok < kk && !argok[first_ok]) ++first_ok;
        for (std::size_t j = 0; first_ok < kk && j < first_ok; ++j) a[j] = a[first_ok];
        a = unwrap_angles(std::move(a), pi);
        const auto adot = series_derivative_all(a, c.dt);
        for (std::size_t k = 0; k < kk; ++k) {
          c.theta[k](m) = phase_n[k] + a[k];
          c.theta_dot[k](m) = rate_n[k] + adot[k];
          const auto [lo, hi] = stencil_window(k, kk);
          for (std::size_t j = lo; j <= hi; ++j)
            if (!argok[j]) c.valid[k][static_cast<std::size_t>(m)] = 0;
        }
      }
      break;
    }
  }

  c.basis.resize(kk);
  c.basis_dot.resize(kk);
  for (std::size_t k = 0; k < kk; ++k) {
    c.basis[k].resize(c.dim, c.dim);
    c.basis_dot[k].resize(c.dim, c.dim);
    for (Eigen::Index m = 0; m < c.dim; ++m) {
      const cxd ph = std::exp(iu * c.theta[k](m));
      c.basis[k].col(m) = ph * base[k].col(m);
      c.basis_dot[k].col(m) =
          ph * (base_dot[k].col(m) + iu * c.theta_dot[k](m) * base[k].col(m));
    }
  }
}

EigenCurve analytic_two_level(const HamiltonianModel& model, double t0, double t1,
                              std::size_t kk, GaugeChoice gauge) {
  const TwoLevelAngles& a = *model.angles();
  EigenCurve c;
  c.grid = uniform_grid(t0, t1, kk);
  c.dt = (t1 - t0) / static_cast<double>(kk - 1);
  c.dim = 2;
  c.gauge = gauge;
  c.real_hamiltonian = model.real_valued();
  c.analytic = true;

  std::vector<double> w0(kk);
  double w0max = 0.0;
  for (std::size_t k = 0; k < kk; ++k) {
    w0[k] = a.omega0(c.grid[k]);
    w0max = std::max(w0max, std::abs(w0[k]));
  }
  std::vector<Mat> base(kk), base_dot(kk);
  std::vector<double> hdot_scale(kk);
  c.energies.resize(kk);
  c.couplings.resize(kk);
  for (std::size_t k = 0; k < kk; ++k) {
    const double t = c.grid[k];
    if (!(w0[k] > Defaults::degeneracy_rel * 0.5 * w0max))
      throw DegeneracyError("two-level gap vanishes at t=" + std::to_string(t));
    const double th = a.theta(t), ph = a.phi(t);
    const double thd = a.theta_dot(t), phd = a.phi_dot(t);
    const double c2 = std::cos(0.5 * th), s2 = std::sin(0.5 * th);
    const cxd em = std::exp(-0.5 * iu * ph), ep = std::conj(em);
    Eigen::VectorXd e(2);
    e << -0.5 * w0[k], 0.5 * w0[k];
    c.energies[k] = e;
    Mat v(2, 2), vd(2, 2);
    v(0, 0) = -s2 * em;  // lower level
    v(1, 0) = c2 * ep;
    v(0, 1) = c2 * em;  // upper level
    v(1, 1) = s2 * ep;
    vd(0, 0) = (-0.5 * thd * c2 + 0.5 * iu * phd * s2) * em;
    vd(1, 0) = (-0.5 * thd * s2 + 0.5 * iu * phd * c2) * ep;
    vd(0, 1) = (-0.5 * thd * s2 - 0.5 * iu * phd * c2) * em;
    vd(1, 1) = (0.5 * thd * c2 + 0.5 * iu * phd * s2) * ep;
    base[k] = std::move(v);
    base_dot[k] = std::move(vd);
    Mat cp(2, 2);
    const cxd c01 = 0.5 * (thd + iu * phd * std::sin(th));
    cp(0, 1) = c01;
    cp(1, 0) = -std::conj(c01);
    cp(0, 0) = 0.5 * iu * phd * std::cos(th);
    cp(1, 1) = -0.5 * iu * phd * std::cos(th);
    c.couplings[k] = std::move(cp);
    hdot_scale[k] = model.derivative(t).norm();  // scale for the arg validity floor
  }
  c.hdot_norm = hdot_scale;
  apply_gauge(c, base, base_dot, hdot_scale);
  return c;
}

}  // namespace

EigenCurve eigencurves(const HamiltonianModel& model, double t0, double t1,
                       std::size_t samples, GaugeChoice gauge) {
  if (!(t1 > t0)) throw std::invalid_argument("eigencurves: need t1 > t0");
  if (samples < 5) throw std::invalid_argument("eigencurves: need >= 5 samples");
  if (gauge.aligned_level < 0 || gauge.aligned_level >= model.dim())
    throw std::invalid_argument("eigencurves: aligned level out of range");

  if (model.angles()) return analytic_two_level(model, t0, t1, samples, gauge);

  std::size_t kk = samples;
  int refinements = 0;
  BaseCurve raw;
  for (;;) {
    raw = raw_decomposition(model, uniform_grid(t0, t1, kk));
    if (raw.min_overlap >= Defaults::continuity_floor) break;
    if (++refinements > Defaults::max_refinements)
      throw ContinuityError("level matching overlap " + std::to_string(raw.min_overlap) +
                            " still below floor after " +
                            std::to_string(Defaults::max_refinements) + " refinements");
    kk = 2 * kk - 1;
  }

  EigenCurve c;
  c.grid = uniform_grid(t0, t1, kk);
  c.dt = (t1 - t0) / static_cast<double>(kk - 1);
  c.dim = model.dim();
  c.gauge = gauge;
  c.real_hamiltonian = model.real_valued();
  c.level_order_stable = raw.order_stable;
  c.refinements = refinements;
  c.energies = std::move(raw.energies);

  const std::vector<Mat> base = std::move(raw.vectors);
  const std::vector<Mat> base_dot = series_derivative_all(base, c.dt);

  std::vector<double> hdot_scale(kk, 0.0);
  c.couplings.assign(kk, Mat::Zero(c.dim, c.dim));
  for (std::size_t k = 0; k < kk; ++k) {
    Mat cp(c.dim, c.dim);
    if (model.analytic_first()) {
      const Mat hd = model.derivative(c.grid[k]);
      hdot_scale[k] = hd.norm();
      for (Eigen::Index m = 0; m < c.dim; ++m)
        for (Eigen::Index j = 0; j < c.dim; ++j)
          if (m != j)
            cp(m, j) = (base[k].col(m).adjoint() * hd * base[k].col(j)).value() /
                       (c.energies[k](j) - c.energies[k](m));
    } else {
      for (Eigen::Index m = 0; m < c.dim; ++m)
        for (Eigen::Index j = 0; j < c.dim; ++j)
          if (m != j) cp(m, j) = base[k].col(m).dot(base_dot[k].col(j));
      hdot_scale[k] = cp.norm() * c.energies[k].cwiseAbs().maxCoeff();
    }
    for (Eigen::Index m = 0; m < c.dim; ++m) cp(m, m) = base[k].col(m).dot(base_dot[k].col(m));
    c.couplings[k] = std::move(cp);
  }
  c.hdot_norm = hdot_scale;
  apply_gauge(c, base, base_dot, hdot_scale);
  return c;
}

cxd coupling_matrix_element(const EigenCurve& curve, Eigen::Index m, Eigen::Index n,
                            double t) {
  if (m == n) throw std::invalid_argument("coupling_matrix_element: need m != n");
  const std::size_t k = curve.index_of(t);
  const double gap = std::abs(curve.energies[k](n) - curve.energies[k](m));
  const double scale = curve.energies[k].cwiseAbs().maxCoeff();
  if (gap < Defaults::degeneracy_rel * std::max(scale, 1e-300))
    throw DegeneracyError("coupling_matrix_element: gap below floor at t=" +
                          std::to_string(t));
  return curve.gauged_coupling(m, n, k);
}

GapSeries gaps(const EigenCurve& curve, Eigen::Index n) {
  if (n < 0 || n >= curve.dim) throw std::invalid_argument("gaps: level out of range");
  GapSeries g;
  g.local_gap.reserve(curve.samples());
  g.global_gap.reserve(curve.samples());
  for (const auto& e : curve.energies) {
    double local = std::numeric_limits<double>::infinity();
    double global = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < e.size(); ++i)
      for (Eigen::Index j = i + 1; j < e.size(); ++j) {
        const double d = std::abs(e(i) - e(j));
        global = std::min(global, d);
        if (i == n || j == n) local = std::min(local, d);
      }
    g.local_gap.push_back(local);
    g.global_gap.push_back(global);
  }
  return g;
}

}  // namespace adia
