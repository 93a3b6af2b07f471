#pragma once
// Instantaneous eigendecomposition over a time grid: continuity-tracked level
// ordering, explicit gauge fixing, eigenvector time derivatives, couplings
// <m|d/dt n>, and spectral gap series.

#include "adia/hamiltonian.hpp"

#include <cstdint>
#include <vector>

namespace adia {

enum class GaugeTag { parallel_transport, berry_dynamical, pancharatnam_aligned };

struct GaugeChoice {
  GaugeTag tag = GaugeTag::parallel_transport;
  Eigen::Index aligned_level = 0;  // reference level for pancharatnam_aligned
};

std::string gauge_name(const GaugeChoice& g);

struct EigenCurve {
  std::vector<double> grid;  // uniform time samples
  double dt = 0.0;
  Eigen::Index dim = 0;
  GaugeChoice gauge;
  bool real_hamiltonian = false;
  bool analytic = false;           // closed-form two-level path
  bool level_order_stable = true;  // ascending energy order never permuted
  int refinements = 0;             // grid halvings needed for continuity

  // per sample k; level index m = position in the initial ascending order
  std::vector<Eigen::VectorXd> energies;           // E_m(t_k)
  std::vector<Mat> basis;                          // columns q_m = e^{i theta_m} |m>
  std::vector<Mat> basis_dot;                      // d/dt of the gauged columns
  std::vector<Mat> couplings;                      // ungauged <m|d/dt n>, diag <m|d/dt m>
  std::vector<double> hdot_norm;                   // ||dH/dt|| scale per sample
  std::vector<Eigen::VectorXd> theta, theta_dot;   // applied gauge phases
  std::vector<std::vector<std::uint8_t>> valid;    // 0 where the gauge is undefined

  std::size_t samples() const { return grid.size(); }
  std::size_t index_of(double t) const;  // nearest grid sample; throws if off-grid

  // e^{i(theta_n - theta_m)} <m|d/dt n> at sample k, i.e. <q_m|d/dt q_n> for m != n
  cxd gauged_coupling(Eigen::Index m, Eigen::Index n, std::size_t k) const;
};

// Ascending eigenvalues of a Hermitian matrix (no tracking).
Eigen::VectorXd eigenvalues_sorted(const Mat& h);

EigenCurve eigencurves(const HamiltonianModel& model, double t0, double t1,
                       std::size_t samples, GaugeChoice gauge);

// <m|dH/dt|n> / (E_n - E_m) in the curve's gauge at the grid sample nearest t
cxd coupling_matrix_element(const EigenCurve& curve, Eigen::Index m, Eigen::Index n,
                            double t);

struct GapSeries {
  std::vector<double> local_gap;   // min_{m != n} |E_m - E_n|
  std::vector<double> global_gap;  // min over all pairs
};

GapSeries gaps(const EigenCurve& curve, Eigen::Index n);

}  // namespace adia
