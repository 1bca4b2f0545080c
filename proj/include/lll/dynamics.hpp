#pragma once

// Fixed-step RK4 for the coupled system
//   i ∂_t u = Π(|v|² u),   i ∂_t v = σ Π(|u|² v),
// forward or backward in time, with conservation and X^κ monitors.

#include <cstddef>
#include <functional>
#include <vector>

#include "lll/fock.hpp"
#include "lll/operators.hpp"

namespace lll {

struct SimState {
  FockVector u;
  FockVector v;
  double t = 0.0;
  int sigma = -1;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double mass_u = 0.0;
  double mass_v = 0.0;
  double hamiltonian = 0.0;
  double p_minus = 0.0;
  cplx q_minus = 0.0;
  std::vector<double> xk_u;  // ‖e^{κ|z|} u‖ per configured κ
  std::vector<double> xk_v;
  double tail_u = 0.0;
  double tail_v = 0.0;
};

/// Throws DimensionError / PreconditionError / NumericalError for a malformed state.
void validate(const SimState& state);

struct Derivative {
  FockVector du;
  FockVector dv;
};

/// du = −i Π(|v|²u), dv = −iσ Π(|u|²v).
Derivative rhs(const SimState& state, const TrilinearKernelTable& table);

/// One classical RK4 step of signed size h.
SimState rk4_step(const SimState& state, double h, const TrilinearKernelTable& table);

/// 0.005 · 2π / max(M_u, M_v, 1).
double default_time_step(const SimState& state);

struct Monitors {
  std::vector<double> kappas;        // X^κ norms to record
  double sample_interval = 0.0;      // 0: record only the endpoints
  double drift_limit = 1e-4;         // relative mass drift that aborts the run
  /// Called with every sampled state (including both endpoints).
  std::function<void(const SimState&)> observer;
};

class DiagnosticsProbe {
 public:
  DiagnosticsProbe(std::size_t n_modes, const std::vector<double>& kappas);
  DiagnosticsRecord operator()(const SimState& state, const TrilinearKernelTable& table) const;

 private:
  std::vector<RadialWeightTable> tables_;
};

struct IntegrationResult {
  SimState state;
  std::vector<DiagnosticsRecord> records;
};

/// RK4 with steps of size dt towards t_target (which may lie before state.t),
/// then one partial step to land exactly. Throws NumericalError on NaN or when
/// |M_u(t) − M_u(0)| / M_u(0) exceeds monitors.drift_limit.
IntegrationResult integrate(const SimState& state, double t_target, double dt,
                            const TrilinearKernelTable& table, const Monitors& monitors = {});

/// Least-squares slope of ln ‖e^{κ|z|}u(t)‖ against t for the κ at kappa_index.
double growth_monitor(const std::vector<DiagnosticsRecord>& records, std::size_t kappa_index);

struct DivergenceReport {
  std::vector<double> times;
  std::vector<double> distance;  // D(t) = sqrt(‖u−ũ‖² + ‖v−ṽ‖²)
  double c_plus = 0.0;           // smallest c with D(t) <= D(0) e^{ct}
  double c_minus = 0.0;          // smallest c with D(t) >= D(0) e^{−ct}
  double mass_sum = 0.0;         // ‖u₀‖² + ‖ũ₀‖² + ‖v₀‖² + ‖ṽ₀‖²
  double bound = 0.0;            // (2/π) · mass_sum
  bool upper_ok = false;
  bool lower_ok = false;
};

/// Evolves both states to t_final and brackets their distance between
/// D(0) e^{∓ct}. The admissible rate (2/π)·mass_sum follows from Carlen's
/// ‖w‖_∞² ≤ ‖w‖²/π applied to the difference equations.
DivergenceReport divergence_bounds(const SimState& a, const SimState& b, double t_final,
                                   double dt, const TrilinearKernelTable& table,
                                   std::size_t samples = 50);

}  // namespace lll
