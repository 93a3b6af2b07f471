#pragma once
// Rigorous bounds and perturbative eigenpairs built on the adiabatic frame:
// the gap/derivative fidelity bound, the frame-vector path-length bound, the
// short-time coupling bound, Bauer-Fike, and the Brillouin-Wigner fixed point.

#include "adia/frame.hpp"

namespace adia {

// ---- Brillouin-Wigner fixed point ------------------------------------------

struct BWResult {
  Vec n_bold;     // unnormalized eigenvector, first (tracked) component = 1
  Vec n_prime;    // normalized, nonnegative overlap with the tracked basis state
  double e_prime = 0.0;      // eigenvalue of H'
  double shift = 0.0;        // e_prime - H'_00
  int iterations = 0;
  bool converged = false;
};

// damped fixed point for the level-shift scalar at one grid sample
BWResult brillouin_wigner(const AdiabaticFrame& frame, double t);
// per-sample results; failures are flagged (converged = false), not thrown
std::vector<BWResult> bw_series(const AdiabaticFrame& frame);

// second-order perturbative eigenpair (unnormalized vector)
std::pair<double, Vec> perturbative_second_order(const AdiabaticFrame& frame, double t);

// ---- tracked eigenpair of H' by dense eigensolve -----------------------------

struct NPrimeSeries {
  std::vector<Vec> vectors;     // continuity-tracked, <e_0|v> >= 0
  std::vector<double> e_prime;  // matching eigenvalue
};

NPrimeSeries nprime_series(const AdiabaticFrame& frame);

// ---- bounds -------------------------------------------------------------------

struct JrsBound {
  double boundary_start = 0.0;  // ||dH(0)|| / gap(0)^2
  double boundary_end = 0.0;    // ||dH(t)|| / gap(t)^2
  double integral = 0.0;        // int 7 ||dH||^2/gap^3 + ||d2H||/gap^2
  double total() const { return boundary_start + boundary_end + integral; }
};

// refined quadrature when the level order is stable; grid quadrature otherwise
JrsBound jrs_bound(const HamiltonianModel& model, const EigenCurve& curve,
                   Eigen::Index n, double t_end);
// cumulative total per grid sample (grid quadrature)
std::vector<double> jrs_series(const HamiltonianModel& model, const EigenCurve& curve,
                               Eigen::Index n);

// ||v(0) - e_0|| + ||v(t) - e_0|| + int ||dv/dt|| from a frame-eigenvector series
std::vector<double> key_bound_series(const AdiabaticFrame& frame,
                                     const std::vector<Vec>& vectors);
// same bound from converged Brillouin-Wigner samples; throws if any diverged
double key_bound(const AdiabaticFrame& frame, const std::vector<BWResult>& bw,
                 double t_end);

struct ZenoBound {
  double cos_form = 0.0;        // 1 - cos(min(pi, phase))
  double quadratic_form = 0.0;  // phase^2 / 2
  double phase = 0.0;           // int ||Omega'||/2
  double value() const { return std::min(cos_form, quadratic_form); }
};

ZenoBound zeno_bound(const AdiabaticFrame& frame, double t);
std::vector<ZenoBound> zeno_series(const AdiabaticFrame& frame);
// time at which the coupling phase alone could drive 1-|U_nn| to `target`
double zeno_time(const AdiabaticFrame& frame, double target);

// (min_m |e - H'_mm|, ||offdiag H'||) at one sample
std::pair<double, double> bauer_fike(const AdiabaticFrame& frame, double e_prime,
                                     double t);

}  // namespace adia
