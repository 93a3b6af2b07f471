#pragma once
// Shared numerical policy. Constants suffixed _rel scale with the norm of the
// object they guard; absolute ones are stated in the problem's natural units
// (hbar = 1 throughout the library, so energies are angular frequencies).

namespace adia {

struct Defaults {
  // hamiltonian evaluation
  static constexpr double hermiticity_rel = 1e-12;   // ||H - H^dag|| <= this * ||H||
  static constexpr double fd_step_frac = 1e-5;       // finite-difference step / domain length

  // eigencurve construction
  static constexpr double degeneracy_rel = 1e-10;    // min gap floor, relative to ||H||
  static constexpr double continuity_floor = 0.9;    // min |<m(t_k)|m(t_k+1)>| before refining
  static constexpr int max_refinements = 12;         // global grid halvings
  static constexpr double eig_residual = 1e-12;      // ||H v - E v|| <= this * ||H||
  static constexpr double normalization = 1e-12;     // | ||v|| - 1 |
  static constexpr double gauge_tol = 1e-8;          // residual <m|mdot> in the transported gauge
  static constexpr double cross_check = 1e-6;        // FD couplings vs gap-quotient identity
  static constexpr double arg_rel_floor = 1e-12;     // coupling-arg validity, x ||Hdot||/gap

  // frame and criteria
  static constexpr double frame_tol = 1e-6;          // the two frame constructions must agree
  static constexpr double criteria_tol = 1e-8;       // closed-form vs pipeline criteria
  static constexpr double inversion_rel_floor = 1e-12;  // sigma_min(delta') floor, x ||H'||
  static constexpr double mono_noise_floor = 1e-9;   // diffs below this * range are plateaus

  // quadrature
  static constexpr double quad_rel = 1e-8;           // refinement target, relative
  static constexpr int max_quad_doublings = 8;

  // bounds / fixed point
  static constexpr int max_bw_iters = 200;
  static constexpr double bw_damping = 0.5;
  static constexpr double bw_residual_rel = 1e-11;   // eigenpair residual, x ||H'||
  static constexpr double bound_slack = 1e-6;        // dominance checks allow this much slack

  // propagation
  static constexpr double fidelity_tol = 1e-8;
  static constexpr double unitarity_tol = 1e-10;
  static constexpr double min_step_rel = 1e-12;      // x t_end
  static constexpr double default_integrator_tol = 1e-9;

  // report verdicts
  static constexpr double criteria_threshold = 0.1;
  static constexpr double infidelity_threshold = 0.01;
  static constexpr int min_samples = 16;
  static constexpr int mono_flag_limit = 3;          // advisory flag when changes exceed this
};

}  // namespace adia
