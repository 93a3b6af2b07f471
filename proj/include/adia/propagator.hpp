#pragma once
// Exact unitary evolution by a fourth-order commutator-free exponential
// integrator, plus tracking diagnostics against a gauged eigenbasis.

#include "adia/defaults.hpp"
#include "adia/spectral.hpp"

namespace adia {

// one commutator-free step U(t+h, t) from two Gauss-point evaluations
Mat cf4_step(const HamiltonianModel& model, double t, double h);
// fixed uniform substeps, no adaptivity (convergence studies)
Mat evolve_fixed_step(const HamiltonianModel& model, double t0, double t1, long nsteps);

struct EvolutionResult {
  std::vector<double> grid;
  std::vector<Mat> unitaries;              // U(t_k, t_0)
  std::vector<double> fidelity;            // |<q_n(t)|psi(t)>|
  std::vector<double> phase_mismatch;      // ||psi - exp(-i phase) q_n||
  std::vector<double> projector_distance;  // spectral distance of rank-1 projectors
  std::vector<double> e_prime;             // tracked frame eigenvalue
  std::vector<double> phase;               // cumulative integral of e_prime
  long long steps_accepted = 0;
  long long steps_rejected = 0;
  double min_fidelity = 0.0;
  double final_fidelity = 0.0;
  double max_phase_mismatch = 0.0;
};

// evolve |q_n(t_0)> across the curve grid up to t_end with adaptive steps
EvolutionResult propagate(const HamiltonianModel& model, const EigenCurve& curve,
                          Eigen::Index n, double t_end,
                          double tol = Defaults::default_integrator_tol);

// closed-form U(t, 0) for the circularly driven two-level family
Mat schwinger_analytic(double omega0, double theta, double omega, double t);

struct MultipassageResult {
  double p1_predicted = 0.0;     // single-passage Landau-Zener leak
  std::vector<int> passages;
  std::vector<double> leak;      // measured 1 - fidelity^2 after each passage count
  double exponent = 0.0;         // log-log slope of leak vs passages
};

MultipassageResult lz_multipassage(double alpha, double varpi, double Omega,
                                   const std::vector<int>& passages,
                                   int samples_per_passage = 512,
                                   double tol = Defaults::default_integrator_tol);

// H_eps(t) = H(eps t) on the stretched domain; derivatives pick up powers of eps
HamiltonianModel rescale_time(const HamiltonianModel& model, double eps);

}  // namespace adia
