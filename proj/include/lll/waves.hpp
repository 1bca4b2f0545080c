#pragma once

// Explicit traveling waves of the coupled system (σ = −1):
//   U = K e^{ia} (½ φ_0^γ + (√3/2) i e^{iθ} φ_1^γ)
//   V = K e^{ib} (½ φ_0^γ − (√3/2) i e^{iθ} φ_1^γ)
// moving as X(t) = e^{−iλt} R_{αt} U, Y(t) = e^{−iμt} R_{αt} V.

#include <cstddef>
#include <utility>
#include <vector>

#include "lll/fock.hpp"
#include "lll/operators.hpp"

namespace lll {

struct WaveSpec {
  double K = 0.0;
  double a = 0.0;
  double b = 0.0;
  double theta = 0.0;
  cplx gamma = 0.0;

  friend bool operator==(const WaveSpec&, const WaveSpec&) = default;
};

struct DerivedParams {
  double lambda = 0.0;
  double mu = 0.0;
  cplx alpha = 0.0;
};

DerivedParams derive_params(const WaveSpec& w);

/// Amplitude giving speed |α| = speed: K² = 32π |α| / √3.
double amplitude_for_speed(double speed);

struct WavePair {
  FockVector u;
  FockVector v;
};

/// φ_n^γ = R_{−γ̄} φ_n in the Fock basis.
FockVector shifted_basis(std::size_t n_modes, std::size_t index, cplx gamma,
                         double tail_tol = kDefaultTailTolerance);

/// (U, V) for the wave. Throws PreconditionError for K < 0 and
/// ResolutionError when N cannot hold the shift γ.
WavePair build_wave_pair(const WaveSpec& w, std::size_t n_modes,
                         double tail_tol = kDefaultTailTolerance);

/// Closed-form (X(t), Y(t)). The translation R_{αt} R_{−γ̄} is applied as a
/// single shift by αt − γ̄ with the composition phase.
WavePair soliton_profile(const WaveSpec& w, double t, std::size_t n_modes,
                         double tail_tol = kDefaultTailTolerance);

/// ‖i ∂_t X − Π(|Y|²X)‖ + ‖i ∂_t Y + Π(|X|²Y)‖ with central differences.
double ansatz_residual(const WaveSpec& w, double t, double dt_fd, std::size_t n_modes,
                       const TrilinearKernelTable& table);

struct StationaryFit {
  double lambda = 0.0;
  double mu = 0.0;
  double residual = 0.0;  // ‖Π(|V|²U) − λU‖ + ‖σΠ(|U|²V) − μV‖
};

/// Rayleigh-quotient fit of λU = Π(|V|²U), μV = σΠ(|U|²V).
StationaryFit stationary_check(const FockVector& U, const FockVector& V, int sigma,
                               const TrilinearKernelTable& table);

enum class EnsembleMode { DistinctSpeeds, CommonSpeed };

/// A validated list of waves. Distinct-speeds ensembles need pairwise
/// different α (so at most one at rest); common-speed ensembles need equal
/// (K, θ) and pairwise different γ.
class SolitonEnsemble {
 public:
  SolitonEnsemble(std::vector<WaveSpec> specs, EnsembleMode mode);

  const std::vector<WaveSpec>& specs() const { return specs_; }
  EnsembleMode mode() const { return mode_; }
  std::size_t size() const { return specs_.size(); }

  /// min_{j≠ℓ} |α_j − α_ℓ| (0 for a single wave).
  double alpha_sharp() const;
  /// min_{j≠ℓ} |γ_j − γ_ℓ| (0 for a single wave).
  double min_center_separation() const;
  double max_speed() const;
  double total_mass() const;  // Σ K_j²

  /// Σ_j closed-form profiles at time t.
  WavePair profile_sum(double t, std::size_t n_modes,
                       double tail_tol = kDefaultTailTolerance) const;

  /// Same ensemble with every a_j, b_j shifted by the given phases.
  SolitonEnsemble with_phase_shift(double da, double db) const;

 private:
  std::vector<WaveSpec> specs_;
  EnsembleMode mode_;
};

}  // namespace lll
