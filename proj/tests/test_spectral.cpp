#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "adia/spectral.hpp"

#include <cmath>
#include <vector>

using namespace adia;

namespace {

constexpr GaugeChoice kPT{GaugeTag::parallel_transport, 0};
constexpr GaugeChoice kBerry{GaugeTag::berry_dynamical, 0};

// every sample must hold an orthonormal eigenbasis of H(t)
void check_eigen_invariants(const HamiltonianModel& model, const EigenCurve& c) {
  for (std::size_t k = 0; k < c.samples(); k += c.samples() / 16 + 1) {
    const Mat h = model.eval(c.grid[k]);
    const double scale = h.norm();
    for (Eigen::Index m = 0; m < c.dim; ++m) {
      const Vec q = c.basis[k].col(m);
      CHECK(std::abs(q.norm() - 1.0) <= Defaults::normalization);
      CHECK((h * q - c.energies[k](m) * q).norm() <= Defaults::eig_residual * scale);
    }
    for (Eigen::Index m = 0; m + 1 < c.dim; ++m)
      CHECK(c.energies[k](m) < c.energies[k](m + 1));  // ascending level ids
  }
  for (std::size_t k = 1; k < c.samples(); ++k)
    for (Eigen::Index m = 0; m < c.dim; ++m)
      CHECK(std::abs(c.basis[k - 1].col(m).dot(c.basis[k].col(m))) >= 0.9);
}

}  // namespace

TEST_CASE("eigenvalues_sorted returns ascending values") {
  Mat h(3, 3);
  h << 2.0, 0.5, 0.0, 0.5, -1.0, cxd(0, 0.3), 0.0, cxd(0, -0.3), 0.7;
  const Eigen::VectorXd e = eigenvalues_sorted(h);
  CHECK(e.size() == 3);
  CHECK(e(0) <= e(1));
  CHECK(e(1) <= e(2));
  CHECK(e.sum() == doctest::Approx(1.7).epsilon(1e-12));  // trace preserved
}

TEST_CASE("closed-form two-level curve satisfies the eigenpair invariants") {
  const HamiltonianModel m = make_schwinger(10.0, 0.01, 1.0);
  const EigenCurve c = eigencurves(m, 0.0, 10.0, 801, kPT);
  CHECK(c.analytic);
  CHECK(c.level_order_stable);
  CHECK(c.refinements == 0);
  CHECK(c.samples() == 801);
  check_eigen_invariants(m, c);
  for (std::size_t k = 0; k < c.samples(); k += 100) {
    CHECK(c.energies[k](0) == doctest::Approx(-5.0).epsilon(1e-14));
    CHECK(c.energies[k](1) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(c.hdot_norm[k] > 0.0);
  }
}

TEST_CASE("numeric curve on a smooth random model satisfies the same invariants") {
  const HamiltonianModel m = make_random_smooth(4, 7, 12.0, 1.0, 0.05, 3);
  const EigenCurve c = eigencurves(m, 0.0, 12.0, 601, kPT);
  CHECK(!c.analytic);
  CHECK(c.level_order_stable);
  check_eigen_invariants(m, c);

  // couplings are anti-Hermitian off the diagonal: <m|dn> = -conj(<n|dm>)
  for (std::size_t k = 0; k < c.samples(); k += 60)
    for (Eigen::Index a = 0; a < 4; ++a)
      for (Eigen::Index b = a + 1; b < 4; ++b)
        CHECK(std::abs(c.couplings[k](a, b) + std::conj(c.couplings[k](b, a))) <=
              1e-10);
}

TEST_CASE("derivative-quotient couplings match finite-difference couplings") {
  const HamiltonianModel m = make_random_smooth(3, 5, 6.0, 1.0, 0.05, 3);
  auto eval_only = [&m](double t) { return m.eval(t); };
  const HamiltonianModel fd(3, m.domain(), eval_only);
  CHECK(m.analytic_first());
  CHECK(!fd.analytic_first());

  const EigenCurve ca = eigencurves(m, 0.0, 6.0, 601, kPT);
  const EigenCurve cb = eigencurves(fd, 0.0, 6.0, 601, kPT);
  for (std::size_t k = 5; k + 5 < ca.samples(); k += 40)
    for (Eigen::Index a = 0; a < 3; ++a)
      for (Eigen::Index b = 0; b < 3; ++b) {
        if (a == b) continue;
        const double va = std::abs(ca.couplings[k](a, b));
        const double vb = std::abs(cb.couplings[k](a, b));
        CHECK(std::abs(va - vb) <= Defaults::cross_check * std::max(1.0, va));
      }
}

TEST_CASE("parallel transport kills the diagonal of <q|dq>") {
  const HamiltonianModel m = make_schwinger(10.0, 0.3, 1.0);
  const EigenCurve c = eigencurves(m, 0.0, 5.0, 401, kPT);
  for (std::size_t k = 0; k < c.samples(); k += 25)
    for (Eigen::Index lev = 0; lev < 2; ++lev) {
      const cxd d = c.basis[k].col(lev).dot(c.basis_dot[k].col(lev));
      CHECK(std::abs(d) <= Defaults::gauge_tol);
    }
}

TEST_CASE("dynamical-geometric gauge rotates at rate -Im<q|dq> - E") {
  const HamiltonianModel m = make_schwinger(10.0, 0.3, 1.0);
  const EigenCurve c = eigencurves(m, 0.0, 5.0, 401, kBerry);
  for (std::size_t k = 0; k < c.samples(); k += 25)
    for (Eigen::Index lev = 0; lev < 2; ++lev) {
      // <q|dq> = <v|dv> + i thdot = -i E for this gauge
      const cxd d = c.basis[k].col(lev).dot(c.basis_dot[k].col(lev));
      CHECK(std::abs(d - (-iu * c.energies[k](lev))) <= 1e-10);
    }
}

TEST_CASE("aligned gauge makes -i <q_m|d q_n> real and nonnegative") {
  const HamiltonianModel m = make_schwinger(10.0, 0.01, 1.0);
  const GaugeChoice g{GaugeTag::pancharatnam_aligned, 1};
  const EigenCurve c = eigencurves(m, 0.0, 10.0, 801, g);
  for (std::size_t k = 3; k + 3 < c.samples(); k += 40) {
    REQUIRE(c.valid[k][0] == 1);
    const cxd gc = -iu * c.gauged_coupling(0, 1, k);
    CHECK(std::abs(gc.imag()) <= 1e-8 * std::abs(gc));
    CHECK(gc.real() >= 0.0);
    // definition check: gauged = exp(i(theta_n - theta_m)) couplings(m, n)
    const cxd want = std::exp(iu * (c.theta[k](1) - c.theta[k](0))) * c.couplings[k](0, 1);
    CHECK(std::abs(c.gauged_coupling(0, 1, k) - want) <= 1e-15);
  }
}

TEST_CASE("aligned gauge flags samples where the coupling argument is undefined") {
  // theta_dot(0) = 0 for this sweep and phi = 0, so the coupling vanishes at
  // t = 0 and its argument is held rather than trusted
  const HamiltonianModel m = make_cycling_lz(20.0, 1.0, 4.0);
  const GaugeChoice g{GaugeTag::pancharatnam_aligned, 0};
  const EigenCurve c = eigencurves(m, 0.0, 2.0 * pi, 257, g);
  CHECK(c.valid[0][1] == 0);
  int held = 0;
  for (std::size_t k = 0; k < c.samples(); ++k) held += c.valid[k][1] == 0 ? 1 : 0;
  CHECK(held >= 1);
  CHECK(held <= 24);  // isolated zeros of theta_dot, stencil-widened

  const EigenCurve pt = eigencurves(m, 0.0, 2.0 * pi, 257, kPT);
  for (std::size_t k = 0; k < pt.samples(); ++k) {
    CHECK(pt.valid[k][0] == 1);
    CHECK(pt.valid[k][1] == 1);
  }
}

TEST_CASE("real models get a real transported basis on the numeric path") {
  Mat h_in(2, 2), h_fin(2, 2);
  const double eps = 0.5;
  h_in << -2.5, 0.5 * eps, 0.5 * eps, 2.5;
  h_fin << 2.5, 0.5 * eps, 0.5 * eps, -2.5;
  const HamiltonianModel m = make_interpolating(h_in, h_fin, 10.0);
  const EigenCurve c = eigencurves(m, 0.0, 10.0, 401, kPT);
  CHECK(c.real_hamiltonian);
  for (std::size_t k = 0; k < c.samples(); k += 20)
    CHECK(c.basis[k].imag().norm() == 0.0);
  check_eigen_invariants(m, c);
}

TEST_CASE("grid refinement heals an avoided crossing narrower than the grid") {
  Mat h_in(2, 2), h_fin(2, 2);
  const double eps = 0.02;  // crossing width ~ eps, well under the initial dt = 0.1
  h_in << -5.0, 0.5 * eps, 0.5 * eps, 5.0;
  h_fin << 5.0, 0.5 * eps, 0.5 * eps, -5.0;
  const HamiltonianModel m = make_interpolating(h_in, h_fin, 10.0);
  const EigenCurve c = eigencurves(m, 0.0, 10.0, 101, kPT);
  CHECK(c.refinements >= 1);
  CHECK(c.refinements <= Defaults::max_refinements);
  CHECK(c.samples() > 101);
  CHECK(c.level_order_stable);
  check_eigen_invariants(m, c);
}

TEST_CASE("levels that trade places without losing continuity are flagged") {
  // near-diabatic sweep: off the symmetric grid the dressed levels swap their
  // ascending positions between two adjacent samples
  Mat h_in(2, 2), h_fin(2, 2);
  const double eps = 1e-3;
  h_in << -5.03, 0.5 * eps, 0.5 * eps, 5.03;
  h_fin << 4.97, 0.5 * eps, 0.5 * eps, -4.97;
  const HamiltonianModel m = make_interpolating(h_in, h_fin, 10.0);
  const EigenCurve c = eigencurves(m, 0.0, 10.0, 101, kPT);
  CHECK(!c.level_order_stable);
  CHECK(c.refinements == 0);
  for (std::size_t k = 1; k < c.samples(); ++k)
    for (Eigen::Index lev = 0; lev < 2; ++lev)
      CHECK(std::abs(c.basis[k - 1].col(lev).dot(c.basis[k].col(lev))) >= 0.9);
}

TEST_CASE("a genuine discontinuity exhausts refinement") {
  Mat a(2, 2), b(2, 2);
  a << 1.0, 0.0, 0.0, -1.0;  // eigenbasis rotated 45 degrees across the jump
  b << 0.0, 1.0, 1.0, 0.0;
  auto h = [a, b](double t) { return t < 0.5 ? a : b; };
  const HamiltonianModel m(2, TimeDomain{0.0, 1.0, true}, h);
  CHECK_THROWS_AS(eigencurves(m, 0.0, 1.0, 5, kPT), ContinuityError);
}

TEST_CASE("degenerate spectra are rejected on both paths") {
  Mat h0 = Mat::Zero(3, 3);
  h0(0, 0) = 1.0;
  h0(1, 1) = 1.0 + 1e-13;
  h0(2, 2) = 2.0;
  CHECK_THROWS_AS(eigencurves(make_constant(h0), 0.0, 1.0, 17, kPT), DegeneracyError);

  TwoLevelAngles a;
  a.omega0 = [](double t) { return 1.0 - t; };  // gap closes at t = 1
  a.theta = [](double) { return 0.3; };
  a.phi = [](double) { return 0.0; };
  a.omega0_dot = [](double) { return -1.0; };
  a.theta_dot = [](double) { return 0.0; };
  a.phi_dot = [](double) { return 0.0; };
  const HamiltonianModel two = make_two_level(std::move(a), TimeDomain{0.0, 2.0, true});
  CHECK_THROWS_AS(eigencurves(two, 0.0, 2.0, 33, kPT), DegeneracyError);
}

TEST_CASE("curve construction rejects malformed requests") {
  const HamiltonianModel m = make_schwinger(10.0, 0.01, 1.0);
  CHECK_THROWS_AS(eigencurves(m, 1.0, 1.0, 101, kPT), std::invalid_argument);
  CHECK_THROWS_AS(eigencurves(m, 0.0, 1.0, 4, kPT), std::invalid_argument);
  CHECK_THROWS_AS(eigencurves(m, 0.0, 1.0, 101, GaugeChoice{GaugeTag::pancharatnam_aligned, 5}),
                  std::invalid_argument);
}

TEST_CASE("grid index lookup accepts grid times only") {
  const HamiltonianModel m = make_schwinger(10.0, 0.01, 1.0);
  const EigenCurve c = eigencurves(m, 0.0, 1.0, 101, kPT);
  CHECK(c.index_of(0.0) == 0);
  CHECK(c.index_of(0.5) == 50);
  CHECK(c.index_of(1.0) == 100);
  CHECK_THROWS_AS(c.index_of(0.5037), std::invalid_argument);
}

TEST_CASE("coupling matrix element against the two-level closed form") {
  const double w0 = 10.0, th = 0.01, w = 1.0;
  const HamiltonianModel m = make_schwinger(w0, th, w);
  const EigenCurve c = eigencurves(m, 0.0, 1.0, 101, kPT);
  const cxd cme = coupling_matrix_element(c, 0, 1, 0.5);
  CHECK(std::abs(std::abs(cme) - 0.5 * w * std::sin(th)) <= 1e-12);
  CHECK_THROWS_AS(coupling_matrix_element(c, 1, 1, 0.5), std::invalid_argument);
}

TEST_CASE("gap series: level gap dominates the global gap") {
  const HamiltonianModel m = make_random_smooth(4, 11, 8.0, 1.0, 0.05, 3);
  const EigenCurve c = eigencurves(m, 0.0, 8.0, 401, kPT);
  const GapSeries g = gaps(c, 1);
  REQUIRE(g.local_gap.size() == c.samples());
  for (std::size_t k = 0; k < c.samples(); ++k) {
    CHECK(g.local_gap[k] >= g.global_gap[k]);
    CHECK(g.global_gap[k] > 0.0);
  }
  CHECK_THROWS_AS(gaps(c, 9), std::invalid_argument);

  const HamiltonianModel two = make_schwinger(10.0, 0.01, 1.0);
  const EigenCurve c2 = eigencurves(two, 0.0, 1.0, 101, kPT);
  const GapSeries g2 = gaps(c2, 1);
  CHECK(g2.local_gap[50] == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(g2.global_gap[50] == doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("gauge names render stably") {
  CHECK(gauge_name(kPT) == "parallel_transport");
  CHECK(gauge_name(kBerry) == "berry_dynamical");
  CHECK(gauge_name(GaugeChoice{GaugeTag::pancharatnam_aligned, 1}) ==
        "pancharatnam_aligned(1)");
}
