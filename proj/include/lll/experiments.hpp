#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "lll/dynamics.hpp"
#include "lll/fit.hpp"
#include "lll/operators.hpp"
#include "lll/waves.hpp"

namespace lll {

/// Residuals below this are indistinguishable from integrator error.
inline constexpr double kResidualFloor = 1e-12;

struct MultiSolitonOptions {
  std::size_t samples = 60;    // uniform residual grid on [0, M]
  std::vector<double> kappas;  // weighted residual series to record
  double dt = 0.0;             // 0 picks default_time_step of the data at t = M
};

struct MultiSolitonRun {
  SolitonEnsemble ensemble;
  double M = 0.0;
  std::size_t n_modes = 0;
  double dt = 0.0;
  double alpha_sharp = 0.0;
  std::vector<double> times;  // ascending, times.front() == 0, times.back() == M
  std::vector<double> eta;    // ‖r₁(t)‖ + ‖r₂(t)‖
  std::vector<double> kappas;
  std::vector<std::vector<double>> eta_weighted;  // [kappa][time]
  SimState initial;                                // constructed state at t = 0
  ConservedQuantities conserved;                   // of `initial`
};

/// Starts from the exact profile sum at t = M, integrates backward to 0 and
/// records r = numeric − Σ_j closed-form profiles on a uniform time grid.
MultiSolitonRun build_multisoliton(const SolitonEnsemble& ensemble, double M,
                                   std::size_t n_modes, const TrilinearKernelTable& table,
                                   const MultiSolitonOptions& options = {});

struct DecayFit {
  double slope = 0.0;      // d ln η / d(t²)
  double intercept = 0.0;
  double r2 = 0.0;
  double c_fit = 0.0;      // −slope / α_♯²
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::size_t points = 0;
};

inline constexpr std::size_t kUnweighted = std::numeric_limits<std::size_t>::max();

/// Fits ln η against t² on [0.2M, 0.8M], dropping points at the numerical
/// floor. Throws FitError when fewer than 3 usable points remain.
DecayFit fit_residual_decay(const MultiSolitonRun& run, std::size_t kappa_index = kUnweighted);

struct CauchyReport {
  std::vector<double> M;
  std::vector<double> gaps;  // gaps[i] between the t = 0 states for M[i+1] and M[i]
  bool fit_valid = false;    // false for a single speed or gaps at the floor
  LineFit fit;               // ln gap_i against M_i²
  double alpha_sharp = 0.0;
  bool strictly_decreasing = false;
};

CauchyReport cauchy_in_M(const SolitonEnsemble& ensemble, const std::vector<double>& M_list,
                         std::size_t n_modes, const TrilinearKernelTable& table, double dt = 0.0);

struct SuperpositionRun {
  double separation = 0.0;  // min |γ_j − γ_ℓ|
  std::vector<double> times;
  std::vector<double> eta;  // ‖u − ΣX_j‖ + ‖v − ΣY_j‖
  /// Smallest c with η(t) <= η(t₁) sqrt(t/t₁) e^{c n²K² (t − t₁)} on the run.
  double growth_c = 0.0;
  /// Least-squares slope of ln(η/√t) in t over t >= t₁.
  double growth_exponent = 0.0;
};

SuperpositionRun superposition_run(const SolitonEnsemble& ensemble, double t_final,
                                   std::size_t n_modes, const TrilinearKernelTable& table,
                                   double dt = 0.0, std::size_t samples = 20);

struct SeparationSweep {
  std::vector<double> separations;
  std::vector<SuperpositionRun> runs;
  std::vector<double> eta_final;  // η(t_final) per separation
  bool decreasing = false;
  LineFit fit;                    // ln η(t_final) against d²
};

/// Rescales every γ_j radially so the minimum separation equals each d.
SeparationSweep superposition_sweep(const SolitonEnsemble& base,
                                    const std::vector<double>& separations, double t_final,
                                    std::size_t n_modes, const TrilinearKernelTable& table,
                                    double dt = 0.0, std::size_t samples = 20);

struct LiftSample {
  double t = 0.0;
  double v_sup = 0.0;           // ‖V(t)‖_∞
  double psi_norm = 0.0;        // ‖ψ̃(t)‖₂
  double psi_weighted = 0.0;    // ‖⟨z⟩ψ̃(t)‖₂
  double residual = 0.0;        // ‖i∂_tψ̃ − Hψ̃ + Vψ̃‖ on the grid
};

struct LiftReport {
  std::vector<LiftSample> samples;
  bool v_sup_decreasing = false;
  LineFit weighted_vs_log;      // ‖⟨z⟩ψ̃‖ against ln t
  LineFit residual_trend;       // ln residual against ln t
};

/// ψ̃(t) = e^{−itH} u(ln t) with V(t) = |e^{−itH} v(ln t)|² / (π² t), built
/// from the run's t = 0 state. Needs 1 < t and ln t <= M for every t.
LiftReport harmonic_lift(const MultiSolitonRun& run, const std::vector<double>& t_list,
                         const TrilinearKernelTable& table, double fd_step = 1e-3);

/// Limits of the conserved quantities for a decoupled sum of waves.
struct AsymptoticInvariants {
  double mass = 0.0;              // Σ K_j²
  double p_minus = 0.0;           // √3 Σ Im(γ_j e^{−iθ_j}) K_j²
  cplx q_minus = 0.0;             // −(√3/2) i Σ e^{−iθ_j} K_j²
  double hamiltonian_quartic = 0.0;  // (11/64π) Σ K_j⁴
  double hamiltonian_quadratic = 0.0;  // (11/64π) Σ K_j², as printed in the literature
};

AsymptoticInvariants asymptotic_invariants(const SolitonEnsemble& ensemble);

}  // namespace lll
