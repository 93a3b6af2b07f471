#pragma once
// Adiabatic-frame generator H'(t) built from a gauge-fixed eigencurve, its
// block split around a tracked level, and the adiabaticity criteria.

#include "adia/spectral.hpp"

#include <utility>

namespace adia {

struct AdiabaticFrame {
  std::vector<double> grid;
  double dt = 0.0;
  Eigen::Index dim = 0;
  Eigen::Index tracked = 0;  // level id in curve ordering
  GaugeChoice gauge;

  // per sample; levels renumbered so the tracked level sits at index 0
  std::vector<Mat> hprime;       // Hermitized H'
  std::vector<Mat> delta_prime;  // H'_00 I - H'[1:,1:]  ((N-1) x (N-1))
  std::vector<Vec> omega_prime;  // 2 H'[1:,0]
  std::vector<double> hnn;       // H'_00
  std::vector<double> hnorm;     // ||H'||
  std::vector<double> asym;      // hermiticity defect of the raw construction
  std::vector<std::uint8_t> valid;  // 0 where the gauge left samples undefined

  std::size_t samples() const { return grid.size(); }
  std::size_t index_of(double t) const;
};

AdiabaticFrame build_frame(const EigenCurve& curve, Eigen::Index n);

struct CriteriaSeries {
  std::vector<double> standard;          // sum 2|<m|dH/dt|n>| / (E_n - E_m)^2
  std::vector<double> generalized;       // shifted-denominator variant
  std::vector<double> cond13;            // ||delta'^-1|| ||Omega'||
  std::vector<double> cond14_integrand;  // ||Omega'|| ||d(delta'^-1)|| + ||delta'^-1|| ||dOmega'||
  std::vector<double> cond14_integral;   // cumulative
  std::vector<std::uint8_t> generalized_ok;  // 0 where a coupling arg was undefined
  int missing = 0;                           // count of masked generalized samples
};

CriteriaSeries criteria_series(const EigenCurve& curve, const AdiabaticFrame& frame);

// point evaluations at a grid sample (t must lie on the grid)
double standard_criterion(const EigenCurve& curve, Eigen::Index n, double t);
double generalized_criterion(const EigenCurve& curve, const AdiabaticFrame& frame,
                             double t);
double condition13(const AdiabaticFrame& frame, double t);
double condition14(const AdiabaticFrame& frame, double t_end);

// rebuilds the curve and frame on doubled grids until the condition-14 total
// stabilizes to rel_tol
double condition14_refined(const HamiltonianModel& model, double t0, double t1,
                           std::size_t k0, GaugeChoice gauge, Eigen::Index n,
                           double rel_tol = Defaults::quad_rel);

// two-level closed-form conditions from the model's angle functions
struct TwoLevelConditionSeries {
  std::vector<double> grid;
  std::vector<double> ratio15;      // |phidot sin th - i thdot| / |detuning|
  std::vector<double> integrand16;  // |d/dt (coupling / detuning)|
  std::vector<double> integral16;   // cumulative
  std::vector<std::uint8_t> ok;     // 0 where the coupling arg was undefined
};

TwoLevelConditionSeries two_level_conditions(const HamiltonianModel& model,
                                             const std::vector<double>& grid);
// (ratio15, integrand16) at one time, via a local five-point stencil
std::pair<double, double> two_level_conditions_at(const HamiltonianModel& model,
                                                  double t);

double integral16_refined(const HamiltonianModel& model, double t0, double t1,
                          std::size_t k0, double rel_tol = Defaults::quad_rel);

// strict sign changes of the first difference, plateau-suppressed
inline int count_monotonicity_changes(const std::vector<double>& series) {
  return monotonicity_changes(series, Defaults::mono_noise_floor);
}

}  // namespace adia
