#include "adia/hamiltonian.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <utility>

namespace adia {

namespace {

void require_hermitian(const Mat& m, double rel, const std::string& what) {
  const double scale = std::max(m.norm(), 1e-300);
  if ((m - m.adjoint()).norm() > rel * scale)
    throw HermiticityError(what + ": matrix is not Hermitian to tolerance");
}

}  // namespace

HamiltonianModel::HamiltonianModel(Eigen::Index dim, TimeDomain domain, MatrixFn h,
                                   MatrixFn dh, MatrixFn d2h, bool real_valued)
    : dim_(dim),
      domain_(domain),
      h_(std::move(h)),
      dh_(std::move(dh)),
      d2h_(std::move(d2h)),
      real_(real_valued) {
  if (dim_ < 2) throw std::invalid_argument("HamiltonianModel: dimension must be >= 2");
  if (!h_) throw std::invalid_argument("HamiltonianModel: evaluator required");
  if (domain_.bounded) {
    if (!(domain_.length() > 0.0))
      throw std::invalid_argument("HamiltonianModel: empty time domain");
    fd_step_ = Defaults::fd_step_frac * domain_.length();
  }
}

void HamiltonianModel::set_fd_step(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("set_fd_step: step must be positive");
  fd_step_ = h;
}

void HamiltonianModel::check_domain(double t, double margin) const {
  if (!domain_.bounded) return;
  const double slack = 1e-9 * std::max(1.0, std::abs(domain_.length()));
  if (t < domain_.t0 + margin - slack || t > domain_.t1 - margin + slack)
    throw DomainError("time " + std::to_string(t) + " outside model domain [" +
                      std::to_string(domain_.t0 + margin) + ", " +
                      std::to_string(domain_.t1 - margin) + "]");
}

Mat HamiltonianModel::eval(double t) const {
  check_domain(t, 0.0);
  Mat m = h_(t);
  if (m.rows() != dim_ || m.cols() != dim_)
    throw std::invalid_argument("HamiltonianModel: evaluator returned wrong shape");
  require_hermitian(m, Defaults::hermiticity_rel, "eval(t=" + std::to_string(t) + ")");
  return m;
}

Mat HamiltonianModel::derivative(double t) const {
  if (dh_) {
    check_domain(t, 0.0);
    return dh_(t);
  }
  check_domain(t, 2.0 * fd_step_);
  return fd_derivative1([this](double s) { return h_(s); }, t, fd_step_);
}

Mat HamiltonianModel::second_derivative(double t) const {
  if (d2h_) {
    check_domain(t, 0.0);
    return d2h_(t);
  }
  if (dh_) {
    check_domain(t, 2.0 * fd_step_);
    return fd_derivative1([this](double s) { return dh_(s); }, t, fd_step_);
  }
  check_domain(t, 2.0 * fd_step_);
  return fd_derivative2([this](double s) { return h_(s); }, t, fd_step_);
}

// ---- two-level family --------------------------------------------------------

namespace {

// H = (w/2) B(th, ph) with B = [[c, s e^{-i ph}], [s e^{i ph}, -c]]
Mat b_matrix(double th, double ph) {
  Mat b(2, 2);
  const cxd e = std::exp(iu * ph);
  b(0, 0) = std::cos(th);
  b(0, 1) = std::sin(th) / e;
  b(1, 0) = std::sin(th) * e;
  b(1, 1) = -std::cos(th);
  return b;
}

Mat b_theta(double th, double ph) {  // dB/dth
  Mat b(2, 2);
  const cxd e = std::exp(iu * ph);
  b(0, 0) = -std::sin(th);
  b(0, 1) = std::cos(th) / e;
  b(1, 0) = std::cos(th) * e;
  b(1, 1) = std::sin(th);
  return b;
}

Mat b_phi(double th, double ph) {  // dB/dph
  Mat b = Mat::Zero(2, 2);
  const cxd e = std::exp(iu * ph);
  b(0, 1) = -iu * std::sin(th) / e;
  b(1, 0) = iu * std::sin(th) * e;
  return b;
}

Mat b_theta_phi(double th, double ph) {
  Mat b = Mat::Zero(2, 2);
  const cxd e = std::exp(iu * ph);
  b(0, 1) = -iu * std::cos(th) / e;
  b(1, 0) = iu * std::cos(th) * e;
  return b;
}

Mat b_phi_phi(double th, double ph) {
  Mat b = Mat::Zero(2, 2);
  const cxd e = std::exp(iu * ph);
  b(0, 1) = -std::sin(th) / e;
  b(1, 0) = -std::sin(th) * e;
  return b;
}

}  // namespace

HamiltonianModel make_two_level(TwoLevelAngles a, std::optional<TimeDomain> domain) {
  if (!a.omega0 || !a.theta || !a.phi || !a.omega0_dot || !a.theta_dot || !a.phi_dot)
    throw std::invalid_argument("make_two_level: angle functions and first derivatives required");
  auto h = [a](double t) {
    return Mat(0.5 * a.omega0(t) * b_matrix(a.theta(t), a.phi(t)));
  };
  auto dh = [a](double t) {
    const double th = a.theta(t), ph = a.phi(t), w = a.omega0(t);
    return Mat(0.5 * a.omega0_dot(t) * b_matrix(th, ph) +
               0.5 * w * (a.theta_dot(t) * b_theta(th, ph) + a.phi_dot(t) * b_phi(th, ph)));
  };
  HamiltonianModel::MatrixFn d2h = nullptr;
  if (a.omega0_ddot && a.theta_ddot && a.phi_ddot) {
    d2h = [a](double t) {
      const double th = a.theta(t), ph = a.phi(t), w = a.omega0(t);
      const double td = a.theta_dot(t), pd = a.phi_dot(t), wd = a.omega0_dot(t);
      const Mat bd = td * b_theta(th, ph) + pd * b_phi(th, ph);
      const Mat bdd = a.theta_ddot(t) * b_theta(th, ph) + a.phi_ddot(t) * b_phi(th, ph) -
                      td * td * b_matrix(th, ph) + 2.0 * td * pd * b_theta_phi(th, ph) +
                      pd * pd * b_phi_phi(th, ph);
      return Mat(0.5 * a.omega0_ddot(t) * b_matrix(th, ph) + wd * bd + 0.5 * w * bdd);
    };
  }
  TimeDomain dom = domain.value_or(TimeDomain{0.0, 1.0, false});
  HamiltonianModel m(2, dom, std::move(h), std::move(dh), std::move(d2h));
  m.set_angles(std::move(a));
  return m;
}

HamiltonianModel make_schwinger(double omega0, double theta, double omega) {
  auto cf = [](double v) { return [v](double) { return v; }; };
  TwoLevelAngles a;
  a.omega0 = cf(omega0);
  a.theta = cf(theta);
  a.phi = [omega](double t) { return omega * t; };
  a.omega0_dot = cf(0.0);
  a.theta_dot = cf(0.0);
  a.phi_dot = cf(omega);
  a.omega0_ddot = cf(0.0);
  a.theta_ddot = cf(0.0);
  a.phi_ddot = cf(0.0);
  return make_two_level(std::move(a));
}

HamiltonianModel make_cycling_lz(double alpha, double varpi, double Omega) {
  if (!(alpha > 0.0) || !(varpi > 0.0) || !(Omega > 0.0))
    throw std::invalid_argument("make_cycling_lz: alpha, varpi, Omega must be positive");
  auto delta = [=](double t) { return alpha * std::cos(varpi * t); };
  auto delta_d = [=](double t) { return -alpha * varpi * std::sin(varpi * t); };
  auto delta_dd = [=](double t) { return -alpha * varpi * varpi * std::cos(varpi * t); };
  auto h = [=](double t) {
    Mat m(2, 2);
    const double d = delta(t);
    m << cxd(0.5 * d), cxd(0.5 * Omega), cxd(0.5 * Omega), cxd(-0.5 * d);
    return m;
  };
  auto dh = [=](double t) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 0.5 * delta_d(t);
    m(1, 1) = -0.5 * delta_d(t);
    return m;
  };
  auto d2h = [=](double t) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 0.5 * delta_dd(t);
    m(1, 1) = -0.5 * delta_dd(t);
    return m;
  };
  HamiltonianModel m(2, TimeDomain{0.0, 1.0, false}, std::move(h), std::move(dh),
                     std::move(d2h), /*real_valued=*/true);
  TwoLevelAngles a;
  a.omega0 = [=](double t) { return std::hypot(delta(t), Omega); };
  a.theta = [=](double t) { return std::atan2(Omega, delta(t)); };
  a.phi = [](double) { return 0.0; };
  a.omega0_dot = [=](double t) {
    const double d = delta(t);
    return d * delta_d(t) / std::hypot(d, Omega);
  };
  a.theta_dot = [=](double t) {
    const double d = delta(t);
    return -Omega * delta_d(t) / (d * d + Omega * Omega);
  };
  a.phi_dot = [](double) { return 0.0; };
  a.omega0_ddot = [=](double t) {
    const double d = delta(t), dd = delta_d(t), w = std::hypot(d, Omega);
    return (dd * dd + d * delta_dd(t)) / w - (d * dd) * (d * dd) / (w * w * w);
  };
  a.theta_ddot = [=](double t) {
    const double d = delta(t), dd = delta_d(t), w2 = d * d + Omega * Omega;
    return -Omega * (delta_dd(t) * w2 - 2.0 * d * dd * dd) / (w2 * w2);
  };
  a.phi_ddot = [](double) { return 0.0; };
  m.set_angles(std::move(a));
  return m;
}

HamiltonianModel make_interpolating(const Mat& h_in, const Mat& h_fin, double T) {
  if (h_in.rows() != h_in.cols() || h_fin.rows() != h_in.rows() ||
      h_fin.cols() != h_in.cols())
    throw std::invalid_argument("make_interpolating: endpoint shapes must match");
  if (!(T > 0.0)) throw std::invalid_argument("make_interpolating: T must be positive");
  require_hermitian(h_in, Defaults::hermiticity_rel, "make_interpolating: H_in");
  require_hermitian(h_fin, Defaults::hermiticity_rel, "make_interpolating: H_fin");
  const bool real = h_in.imag().isZero(0.0) && h_fin.imag().isZero(0.0);
  auto a = std::make_shared<Mat>(h_in);
  auto b = std::make_shared<Mat>(h_fin);
  auto h = [a, b, T](double t) { return Mat(*a * (1.0 - t / T) + *b * (t / T)); };
  auto slope = std::make_shared<Mat>(Mat((h_fin - h_in) / T));
  auto dh = [slope](double) { return *slope; };
  const Eigen::Index n = h_in.rows();
  auto d2h = [n](double) { return Mat(Mat::Zero(n, n)); };
  return HamiltonianModel(n, TimeDomain{0.0, T, true}, std::move(h), std::move(dh),
                          std::move(d2h), real);
}

HamiltonianModel make_constant(const Mat& h0) {
  if (h0.rows() != h0.cols())
    throw std::invalid_argument("make_constant: matrix must be square");
  require_hermitian(h0, Defaults::hermiticity_rel, "make_constant");
  const bool real = h0.imag().isZero(0.0);
  auto m0 = std::make_shared<Mat>(h0);
  const Eigen::Index n = h0.rows();
  auto zero = [n](double) { return Mat(Mat::Zero(n, n)); };
  return HamiltonianModel(n, TimeDomain{0.0, 1.0, false},
                          [m0](double) { return *m0; }, zero, zero, real);
}

// ---- tabulated models ----------------------------------------------------------

HamiltonianModel make_tabulated(const std::vector<double>& times,
                                const std::vector<Mat>& samples) {
  if (times.size() != samples.size() || times.size() < 2)
    throw std::invalid_argument("make_tabulated: need >= 2 samples with matching times");
  const Eigen::Index n = samples.front().rows();
  if (n < 2 || samples.front().cols() != n)
    throw std::invalid_argument("make_tabulated: samples must be square, dim >= 2");
  bool real = true;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k].rows() != n || samples[k].cols() != n)
      throw std::invalid_argument("make_tabulated: inconsistent sample shapes");
    require_hermitian(samples[k], Defaults::hermiticity_rel,
                      "make_tabulated: sample at t=" + std::to_string(times[k]));
    if (!samples[k].imag().isZero(0.0)) real = false;
  }
  // spline the diagonal (real) and the strict upper triangle (re + im); the
  // lower triangle is reconstructed by conjugation so H(t) stays Hermitian
  struct Splines {
    Eigen::Index n;
    std::vector<CubicSpline> diag, up_re, up_im;
  };
  auto sp = std::make_shared<Splines>();
  sp->n = n;
  std::vector<double> buf(times.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < times.size(); ++k) buf[k] = std::real(samples[k](i, i));
    sp->diag.emplace_back(times, buf);
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      for (std::size_t k = 0; k < times.size(); ++k) buf[k] = std::real(samples[k](i, j));
      sp->up_re.emplace_back(times, buf);
      for (std::size_t k = 0; k < times.size(); ++k) buf[k] = std::imag(samples[k](i, j));
      sp->up_im.emplace_back(times, buf);
    }
  auto assemble = [sp](double t, int order) {
    auto get = [&](const CubicSpline& s) {
      return order == 0 ? s.eval(t) : order == 1 ? s.deriv(t) : s.deriv2(t);
    };
    Mat m(sp->n, sp->n);
    std::size_t u = 0;
    for (Eigen::Index i = 0; i < sp->n; ++i) {
      m(i, i) = get(sp->diag[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = i + 1; j < sp->n; ++j, ++u) {
        const cxd v(get(sp->up_re[u]), get(sp->up_im[u]));
        m(i, j) = v;
        m(j, i) = std::conj(v);
      }
    }
    return m;
  };
  TimeDomain dom{times.front(), times.back(), true};
  return HamiltonianModel(
      n, dom, [assemble](double t) { return assemble(t, 0); },
      [assemble](double t) { return assemble(t, 1); },
      [assemble](double t) { return assemble(t, 2); }, real);
}

HamiltonianModel load_tabulated_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tabulated model file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != 't')
    throw ConfigError(path + ": expected header starting with `t`");
  std::vector<double> times;
  std::vector<Mat> samples;
  Eigen::Index n = -1;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": bad number `" + cell + "`");
      }
    }
    if (n < 0) {
      const double fields = static_cast<double>(row.size()) - 1.0;
      const auto guess = static_cast<Eigen::Index>(std::lround(std::sqrt(fields / 2.0)));
      if (guess < 2 || 2 * guess * guess + 1 != static_cast<Eigen::Index>(row.size()))
        throw ConfigError(path + ": row width " + std::to_string(row.size()) +
                          " does not match 1 + 2*N*N for any N >= 2");
      n = guess;
    } else if (static_cast<Eigen::Index>(row.size()) != 2 * n * n + 1) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": inconsistent row width");
    }
    times.push_back(row[0]);
    Mat m(n, n);
    std::size_t c = 1;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        m(i, j) = cxd(row[c], row[c + 1]);
        c += 2;
      }
    samples.push_back(std::move(m));
  }
  if (times.size() < 2) throw ConfigError(path + ": need at least two samples");
  return make_tabulated(times, samples);
}

// ---- random smooth models -------------------------------------------------------

HamiltonianModel make_random_smooth(Eigen::Index dim, std::uint64_t seed, double t_end,
                                    double gap, double strength, int harmonics) {
  if (dim < 2) throw std::invalid_argument("make_random_smooth: dim must be >= 2");
  if (!(t_end > 0.0) || !(gap > 0.0) || !(strength > 0.0) || harmonics < 1)
    throw std::invalid_argument("make_random_smooth: bad parameters");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  struct Terms {
    Mat base;
    std::vector<Mat> coeff;
    std::vector<double> freq, phase;
  };
  auto terms = std::make_shared<Terms>();
  terms->base = Mat::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) terms->base(i, i) = gap * static_cast<double>(i);
  for (int j = 0; j < harmonics; ++j) {
    Mat a(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
      for (Eigen::Index c = 0; c < dim; ++c) a(r, c) = cxd(gauss(rng), gauss(rng));
    Mat herm = 0.5 * (a + a.adjoint());
    herm *= strength / std::max(spectral_norm(herm), 1e-300);
    terms->coeff.push_back(std::move(herm));
    terms->freq.push_back((0.5 + 2.0 * unif(rng)) * 2.0 * pi / t_end);
    terms->phase.push_back(2.0 * pi * unif(rng));
  }
  auto sum = [terms, dim](double t, int order) {
    Mat m = order == 0 ? Mat(terms->base) : Mat(Mat::Zero(dim, dim));
    for (std::size_t j = 0; j < terms->coeff.size(); ++j) {
      const double w = terms->freq[j], arg = w * t + terms->phase[j];
      const double f = order == 0 ? std::cos(arg)
                       : order == 1 ? -w * std::sin(arg)
                                    : -w * w * std::cos(arg);
      m += f * terms->coeff[j];
    }
    return m;
  };
  return HamiltonianModel(
      dim, TimeDomain{0.0, t_end, true}, [sum](double t) { return sum(t, 0); },
      [sum](double t) { return sum(t, 1); }, [sum](double t) { return sum(t, 2); });
}

}  // namespace adia
