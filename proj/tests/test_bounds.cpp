#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "adia/bounds.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace adia;

namespace {

constexpr GaugeChoice kPT{GaugeTag::parallel_transport, 0};

// frame assembled directly from generator samples; tracked level at index 0
AdiabaticFrame frame_from(const std::vector<Mat>& hp, double dt) {
  AdiabaticFrame f;
  const Eigen::Index nn = hp.front().rows();
  f.dim = nn;
  f.dt = dt;
  f.tracked = 0;
  const std::size_t ns = hp.size();
  f.grid.resize(ns);
  f.hprime.resize(ns);
  f.delta_prime.resize(ns);
  f.omega_prime.resize(ns);
  f.hnn.resize(ns);
  f.hnorm.resize(ns);
  f.asym.assign(ns, 0.0);
  f.valid.assign(ns, 1);
  for (std::size_t k = 0; k < ns; ++k) {
    f.grid[k] = dt * static_cast<double>(k);
    Mat h = 0.5 * (hp[k] + hp[k].adjoint());
    f.hnn[k] = std::real(h(0, 0));
    f.delta_prime[k] =
        f.hnn[k] * Mat::Identity(nn - 1, nn - 1) - h.block(1, 1, nn - 1, nn - 1);
    f.omega_prime[k] = 2.0 * h.block(1, 0, nn - 1, 1);
    f.hnorm[k] = hermitian_norm(h);
    f.hprime[k] = std::move(h);
  }
  return f;
}

AdiabaticFrame constant_frame(const Mat& hp, std::size_t ns, double dt) {
  return frame_from(std::vector<Mat>(ns, hp), dt);
}

Mat two_level_hprime(double hnn, double delta, cxd omega) {
  Mat h(2, 2);
  h(0, 0) = hnn;
  h(1, 1) = hnn - delta;
  h(1, 0) = 0.5 * omega;
  h(0, 1) = 0.5 * std::conj(omega);
  return h;
}

// random generator sample with ||delta'^-1|| ||Omega'|| == u and unit detuning floor
Mat random_hprime(Eigen::Index nn, double u, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.5, 2.0);
  const Eigen::Index nb = nn - 1;
  Mat a(nb, nb);
  for (Eigen::Index i = 0; i < nb; ++i)
    for (Eigen::Index j = 0; j < nb; ++j) a(i, j) = cxd(gauss(rng), gauss(rng));
  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (a + a.adjoint())));
  Eigen::VectorXd lam(nb);
  for (Eigen::Index i = 0; i < nb; ++i)
    lam(i) = (gauss(rng) > 0 ? 1.0 : -1.0) * unif(rng);  // |eigenvalue| in [0.5, 2]
  const Mat delta = es.eigenvectors() * lam.asDiagonal() *
                    es.eigenvectors().adjoint();
  Vec omega(nb);
  for (Eigen::Index i = 0; i < nb; ++i) omega(i) = cxd(gauss(rng), gauss(rng));
  omega *= u * lam.cwiseAbs().minCoeff() / omega.norm();
  const double hnn = gauss(rng);
  Mat h(nn, nn);
  h(0, 0) = hnn;
  h.block(1, 0, nb, 1) = 0.5 * omega;
  h.block(0, 1, 1, nb) = 0.5 * omega.adjoint();
  h.block(1, 1, nb, nb) = hnn * Mat::Identity(nb, nb) - delta;
  return h;
}

}  // namespace

TEST_CASE("level shift matches the two-level closed form for both detuning signs") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif(0.5, 2.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * pi);
  for (int rep = 0; rep < 50; ++rep) {
    const double delta = (rep % 2 == 0 ? 1.0 : -1.0) * unif(rng);
    const double u = 0.29 * unif(rng) / 2.0;  // keep well inside contraction
    const cxd omega = u * std::abs(delta) * std::exp(iu * ang(rng));
    const AdiabaticFrame f =
        constant_frame(two_level_hprime(0.3, delta, omega), 5, 0.1);
    const BWResult r = brillouin_wigner(f, 0.2);
    CHECK(r.converged);
    const double disc = std::sqrt(delta * delta + std::norm(omega));
    const double want = 0.5 * ((delta > 0 ? disc : -disc) - delta);
    CHECK(std::abs(r.shift - want) <= 1e-13 * std::max(1.0, std::abs(want)));
    CHECK(r.e_prime == doctest::Approx(0.3 + want).epsilon(1e-12));
    CHECK(std::abs(r.n_bold(0) - 1.0) == 0.0);
    CHECK(r.n_prime(0).real() > 0.0);
  }
}

TEST_CASE("fixed-point eigenpairs match a dense eigensolve on random frames") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u01(0.01, 0.3);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index nn = 2 + rep % 5;
    const Mat hp = random_hprime(nn, u01(rng), rng);
    const AdiabaticFrame f = constant_frame(hp, 5, 0.1);
    const BWResult r = brillouin_wigner(f, 0.0);
    REQUIRE(r.converged);
    CHECK((f.hprime[0] * r.n_prime - r.e_prime * r.n_prime).norm() <=
          Defaults::bw_residual_rel * f.hnorm[0]);

    Eigen::SelfAdjointEigenSolver<Mat> es(f.hprime[0]);
    Eigen::Index best = 0;
    double best_ov = -1.0;
    for (Eigen::Index j = 0; j < nn; ++j) {
      const double ov = std::abs(r.n_prime.dot(es.eigenvectors().col(j)));
      if (ov > best_ov) {
        best_ov = ov;
        best = j;
      }
    }
    CHECK(best_ov >= 1.0 - 1e-10);
    CHECK(std::abs(r.e_prime - es.eigenvalues()(best)) <= 1e-10 * f.hnorm[0]);
  }
}

TEST_CASE("fixed point refuses couplings outside the contraction region") {
  const AdiabaticFrame f =
      constant_frame(two_level_hprime(0.0, 1.0, cxd(4.0, 0.0)), 5, 0.1);
  CHECK_THROWS_AS(brillouin_wigner(f, 0.0), ConvergenceError);
  const auto series = bw_series(f);
  for (const auto& r : series) {
    CHECK(!r.converged);
    CHECK(std::isnan(r.e_prime));
  }
}

TEST_CASE("singular detuning blocks are reported, not inverted") {
  Mat h(3, 3);
  h.setZero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0 - 1e-13;  // detuning eigenvalue 1e-13, far below the floor
  h(2, 2) = -1.0;
  h(1, 0) = h(0, 1) = 0.01;
  const AdiabaticFrame f = constant_frame(h, 5, 0.1);
  CHECK_THROWS_AS(brillouin_wigner(f, 0.0), SingularBlockError);
  const auto series = bw_series(f);
  CHECK(!series[0].converged);
}

TEST_CASE("second-order eigenpair approaches the fixed point at weak coupling") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  Mat h(4, 4);
  h.setZero();
  h(0, 0) = 0.2;
  h(1, 1) = -1.0;
  h(2, 2) = 1.4;
  h(3, 3) = 2.3;
  const double eps = 1e-3;
  for (Eigen::Index m = 1; m < 4; ++m) {
    h(m, 0) = eps * cxd(gauss(rng), gauss(rng));
    h(0, m) = std::conj(h(m, 0));
  }
  const AdiabaticFrame f = constant_frame(h, 5, 0.1);
  const auto [e2, v2] = perturbative_second_order(f, 0.0);
  const BWResult r = brillouin_wigner(f, 0.0);
  CHECK(std::abs(e2 - r.e_prime) <= 10.0 * std::pow(eps, 4));
  CHECK((v2 - r.n_bold).norm() <= 10.0 * std::pow(eps, 3));
  CHECK(v2(0) == cxd(1.0, 0.0));

  Mat deg = h;
  deg(1, 1) = deg(0, 0).real();  // shared diagonal entry
  const AdiabaticFrame fd = constant_frame(deg, 5, 0.1);
  CHECK_THROWS_AS(perturbative_second_order(fd, 0.0), DegeneracyError);
}

TEST_CASE("dense-eigensolve vector series tracks continuously with fixed phase") {
  const HamiltonianModel m = make_schwinger(10.0, 0.01, 1.0);
  const GaugeChoice g{GaugeTag::pancharatnam_aligned, 1};
  const EigenCurve c = eigencurves(m, 0.0, 10.0, 801, g);
  const AdiabaticFrame f = build_frame(c, 1);
  const NPrimeSeries np = nprime_series(f);
  REQUIRE(np.vectors.size() == f.samples());
  const auto bw = bw_series(f);
  for (std::size_t k = 0; k < f.samples(); k += 40) {
    const Vec& v = np.vectors[k];
    CHECK(v(0).imag() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(v(0).real() >= 0.0);
    CHECK((f.hprime[k] * v - np.e_prime[k] * v).norm() <= 1e-12 * f.hnorm[k]);
    REQUIRE(bw[k].converged);
    CHECK(std::abs(bw[k].n_prime.dot(v)) >= 1.0 - 1e-12);
    CHECK(std::abs(bw[k].e_prime - np.e_prime[k]) <= 1e-12 * f.hnorm[k]);
  }
  for (std::size_t k = 1; k < f.samples(); ++k)
    CHECK(std::abs(np.vectors[k - 1].dot(np.vectors[k])) >= 0.999);
}

TEST_CASE("gap-derivative bound closed form on the driven two-level model") {
  const double w0 = 10.0, th = 0.01, w = 1.0, T = 10.0;
  const HamiltonianModel m = make_schwinger(w0, th, w);
  const EigenCurve c = eigencurves(m, 0.0, T, 2001, kPT);
  const double hd = 0.5 * w0 * std::sin(th) * w;   // ||dH/dt||, constant
  const double hdd = hd * w;                       // ||d2H/dt2||
  const double rate = 7.0 * hd * hd / (w0 * w0 * w0) + hdd / (w0 * w0);
  const JrsBound jb = jrs_bound(m, c, 1, T);
  CHECK(jb.boundary_start == doctest::Approx(hd / (w0 * w0)).epsilon(1e-10));
  CHECK(jb.boundary_end == doctest::Approx(hd / (w0 * w0)).epsilon(1e-10));
  CHECK(jb.integral == doctest::Approx(rate * T).epsilon(1e-8));
  CHECK(jb.total() ==
        doctest::Approx(2.0 * hd / (w0 * w0) + rate * T).epsilon(1e-8));

  const std::vector<double> series = jrs_series(m, c, 1);
  CHECK(series.front() == doctest::Approx(2.0 * hd / (w0 * w0)).epsilon(1e-10));
  CHECK(series.back() == doctest::Approx(jb.total()).epsilon(1e-6));
  for (std::size_t k = 1; k < series.size(); ++k) CHECK(series[k] >= series[k - 1]);

  CHECK_THROWS_AS(jrs_bound(m, c, 5, T), DomainError);
  CHECK_THROWS_AS(jrs_bound(m, c, 1, T + 1.0), DomainError);
}

TEST_CASE("gap-derivative bound falls back to grid quadrature across level swaps") {
  Mat h_in(2, 2), h_fin(2, 2);
  const double eps = 1e-3;
  h_in << -5.03, 0.5 * eps, 0.5 * eps, 5.03;
  h_fin << 4.97, 0.5 * eps, 0.5 * eps, -4.97;
  const HamiltonianModel m = make_interpolating(h_in, h_fin, 10.0);
  const EigenCurve c = eigencurves(m, 0.0, 10.0, 101, kPT);
  REQUIRE(!c.level_order_stable);
  const JrsBound jb = jrs_bound(m, c, 0, 10.0);
  const std::vector<double> series = jrs_series(m, c, 0);
  CHECK(jb.total() == doctest::Approx(series.back()).epsilon(1e-12));
}

TEST_CASE("path-length bound is flat when the frame eigenvector is constant") {
  const double w0 = 10.0, th = 0.01, w = 1.0;
  const HamiltonianModel m = make_schwinger(w0, th, w);
  const GaugeChoice g{GaugeTag::pancharatnam_aligned, 1};
  const EigenCurve c = eigencurves(m, 0.0, 10.0, 801, g);
  const AdiabaticFrame f = build_frame(c, 1);

  const double delta = w0 - w * std::cos(th);
  const double om = w * std::sin(th);
  const double shift = 0.5 * (std::sqrt(delta * delta + om * om) - delta);
  const double x = 0.5 * om / (delta + shift);
  const double want = 2.0 * std::sqrt(2.0 - 2.0 / std::sqrt(1.0 + x * x));

  const NPrimeSeries np = nprime_series(f);
  const std::vector<double> key = key_bound_series(f, np.vectors);
  for (std::size_t k = 0; k < key.size(); k += 80)
    CHECK(std::abs(key[k] - want) <= 1e-6 * want);

  const auto bw = bw_series(f);
  CHECK(key_bound(f, bw, 10.0) == doctest::Approx(key.back()).epsilon(1e-10));
  CHECK_THROWS_AS(key_bound_series(f, std::vector<Vec>(3)), DomainError);
}

TEST_CASE("path-length bound from the fixed point refuses unconverged samples") {
  const AdiabaticFrame f =
      constant_frame(two_level_hprime(0.0, 0.1, cxd(1.0, 0.0)), 7, 0.1);
  const auto bw = bw_series(f);
  CHECK(!bw[3].converged);
  CHECK_THROWS_AS(key_bound(f, bw, 0.6), ConvergenceError);
  AdiabaticFrame other =
      constant_frame(two_level_hprime(0.0, 1.0, cxd(0.1, 0.0)), 5, 0.1);
  CHECK_THROWS_AS(key_bound(other, bw, 0.4), DomainError);
}

TEST_CASE("short-time coupling bound: exact forms for a constant coupling") {
  const double om = 0.4;  // ||Omega'|| held constant -> phase = 0.2 t
  const std::size_t ns = 201;
  const double dt = 0.1;
  const AdiabaticFrame f =
      constant_frame(two_level_hprime(0.5, 3.0, cxd(0.0, om)), ns, dt);
  const auto zs = zeno_series(f);
  REQUIRE(zs.size() == ns);
  for (std::size_t k = 0; k < ns; k += 20) {
    const double phase = 0.5 * om * f.grid[k];
    CHECK(zs[k].phase == doctest::Approx(phase).epsilon(1e-12));
    CHECK(zs[k].cos_form ==
          doctest::Approx(1.0 - std::cos(std::min(pi, phase))).epsilon(1e-12));
    CHECK(zs[k].quadratic_form == doctest::Approx(0.5 * phase * phase).epsilon(1e-12));
    CHECK(zs[k].value() == std::min(zs[k].cos_form, zs[k].quadratic_form));
  }
  const ZenoBound zb = zeno_bound(f, f.grid[100]);
  CHECK(zb.phase == doctest::Approx(zs[100].phase));

  // linear phase makes the first-crossing time exact
  const double target = 0.5;
  const double tstar = std::acos(1.0 - target) / (0.5 * om);
  CHECK(zeno_time(f, target) == doctest::Approx(tstar).epsilon(1e-9));
  const double t25 = std::sqrt(2.0 * 2.5) / (0.5 * om);
  CHECK(zeno_time(f, 2.5) == doctest::Approx(t25).epsilon(1e-9));
  CHECK(zeno_time(f, 1e9) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(zeno_time(f, 0.0), DomainError);
  CHECK_THROWS_AS(zeno_time(f, -1.0), DomainError);
}

TEST_CASE("diagonal-distance inequality on a hand value and at random") {
  Mat h(2, 2);
  h << 1.0, 0.3, 0.3, 2.0;
  const AdiabaticFrame f = constant_frame(h, 5, 0.1);
  const double e = 1.5 - std::sqrt(0.25 + 0.09);
  const auto [lhs, rhs] = bauer_fike(f, e, 0.2);
  CHECK(lhs == doctest::Approx(std::abs(e - 1.0)).epsilon(1e-12));
  CHECK(rhs == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(lhs <= rhs);

  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss;
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index nn = 2 + rep % 5;
    Mat a(nn, nn);
    for (Eigen::Index i = 0; i < nn; ++i)
      for (Eigen::Index j = 0; j < nn; ++j) a(i, j) = cxd(gauss(rng), gauss(rng));
    const Mat hh = 0.5 * (a + a.adjoint());
    const AdiabaticFrame fr = constant_frame(hh, 5, 0.1);
    const Eigen::VectorXd lam = eigenvalues_sorted(hh);
    for (Eigen::Index j = 0; j < nn; ++j) {
      const auto [l, r] = bauer_fike(fr, lam(j), 0.0);
      CHECK(l <= r + 1e-12 * hermitian_norm(hh));
    }
  }
}
