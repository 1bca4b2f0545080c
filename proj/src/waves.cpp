#include "lll/waves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lll/errors.hpp"

namespace lll {

namespace {

const double kSqrt3 = std::sqrt(3.0);
constexpr double kDistinctTol = 1e-12;

// K e^{iφ} (½ A ± (√3/2) i e^{iθ} B)
FockVector combine(double K, double phase, double theta, double sign, const FockVector& a,
                   const FockVector& b) {
  const cplx outer = std::polar(K, phase);
  const cplx second = sign * 0.5 * kSqrt3 * cplx(0.0, 1.0) * std::polar(1.0, theta);
  return outer * (cplx(0.5) * a + second * b);
}

}  // namespace

DerivedParams derive_params(const WaveSpec& w) {
  const double k2 = w.K * w.K;
  const double scale = k2 / (32.0 * std::numbers::pi);
  const double tilt = 2.0 * kSqrt3 * std::imag(w.gamma * std::polar(1.0, -w.theta));
  DerivedParams d;
  d.lambda = scale * (7.0 + tilt);
  d.mu = scale * (-7.0 + tilt);
  d.alpha = kSqrt3 * scale * std::polar(1.0, -w.theta);
  return d;
}

double amplitude_for_speed(double speed) {
  if (!(speed >= 0.0)) throw PreconditionError("amplitude_for_speed: speed must be >= 0");
  return std::sqrt(32.0 * std::numbers::pi * speed / kSqrt3);
}

FockVector shifted_basis(std::size_t n_modes, std::size_t index, cplx gamma, double tail_tol) {
  return magnetic_translate(FockVector::basis(n_modes, index), -std::conj(gamma), tail_tol);
}

WavePair build_wave_pair(const WaveSpec& w, std::size_t n_modes, double tail_tol) {
  if (!(w.K >= 0.0)) throw PreconditionError("build_wave_pair: K must be >= 0");
  if (n_modes < 2) throw DimensionError("build_wave_pair: need at least two modes");
  const FockVector p0 = shifted_basis(n_modes, 0, w.gamma, tail_tol);
  const FockVector p1 = shifted_basis(n_modes, 1, w.gamma, tail_tol);
  return {combine(w.K, w.a, w.theta, +1.0, p0, p1), combine(w.K, w.b, w.theta, -1.0, p0, p1)};
}

WavePair soliton_profile(const WaveSpec& w, double t, std::size_t n_modes, double tail_tol) {
  if (!(w.K >= 0.0)) throw PreconditionError("soliton_profile: K must be >= 0");
  if (n_modes < 2) throw DimensionError("soliton_profile: need at least two modes");
  const DerivedParams d = derive_params(w);
  const cplx drift = d.alpha * t;
  const cplx center = -std::conj(w.gamma);
  const cplx phase = translation_composition_phase(drift, center);
  const cplx shift = drift + center;
  const FockVector p0 = magnetic_translate(FockVector::basis(n_modes, 0), shift, tail_tol);
  const FockVector p1 = magnetic_translate(FockVector::basis(n_modes, 1), shift, tail_tol);
  return {phase * std::polar(1.0, -d.lambda * t) * combine(w.K, w.a, w.theta, +1.0, p0, p1),
          phase * std::polar(1.0, -d.mu * t) * combine(w.K, w.b, w.theta, -1.0, p0, p1)};
}

double ansatz_residual(const WaveSpec& w, double t, double dt_fd, std::size_t n_modes,
                       const TrilinearKernelTable& table) {
  if (!(dt_fd > 0.0)) throw PreconditionError("ansatz_residual: dt_fd must be positive");
  const WavePair now = soliton_profile(w, t, n_modes);
  const WavePair fwd = soliton_profile(w, t + dt_fd, n_modes);
  const WavePair bwd = soliton_profile(w, t - dt_fd, n_modes);
  const cplx i_over = cplx(0.0, 1.0 / (2.0 * dt_fd));
  const FockVector res_u = i_over * (fwd.u - bwd.u) - coupling(now.v, now.u, table);
  const FockVector res_v = i_over * (fwd.v - bwd.v) + coupling(now.u, now.v, table);
  return l2_norm(res_u) + l2_norm(res_v);
}

StationaryFit stationary_check(const FockVector& U, const FockVector& V, int sigma,
                               const TrilinearKernelTable& table) {
  if (sigma != 1 && sigma != -1) throw PreconditionError("stationary_check: sigma must be ±1");
  const double mu_mass = U.mass();
  const double mv_mass = V.mass();
  if (mu_mass == 0.0 || mv_mass == 0.0) throw PreconditionError("stationary_check: zero input");
  const FockVector fu = coupling(V, U, table);
  const FockVector fv = static_cast<double>(sigma) * coupling(U, V, table);
  StationaryFit fit;
  fit.lambda = std::real(inner(fu, U)) / mu_mass;
  fit.mu = std::real(inner(fv, V)) / mv_mass;
  fit.residual = l2_norm(fu - fit.lambda * U) + l2_norm(fv - fit.mu * V);
  return fit;
}

// ---------------------------------------------------------------------------

SolitonEnsemble::SolitonEnsemble(std::vector<WaveSpec> specs, EnsembleMode mode)
    : specs_(std::move(specs)), mode_(mode) {
  if (specs_.empty()) throw PreconditionError("SolitonEnsemble: no waves");
  for (const auto& w : specs_)
    if (!(w.K >= 0.0)) throw PreconditionError("SolitonEnsemble: K must be >= 0");
  for (std::size_t j = 0; j < specs_.size(); ++j)
    for (std::size_t l = j + 1; l < specs_.size(); ++l) {
      const auto& a = specs_[j];
      const auto& b = specs_[l];
      if (mode_ == EnsembleMode::DistinctSpeeds) {
        if (std::abs(derive_params(a).alpha - derive_params(b).alpha) <= kDistinctTol)
          throw PreconditionError("SolitonEnsemble: waves " + std::to_string(j) + " and " +
                                  std::to_string(l) + " share the same speed");
      } else {
        if (std::abs(a.K - b.K) > kDistinctTol || std::abs(a.theta - b.theta) > kDistinctTol)
          throw PreconditionError("SolitonEnsemble: common-speed mode needs equal (K, theta)");
        if (std::abs(a.gamma - b.gamma) <= kDistinctTol)
          throw PreconditionError("SolitonEnsemble: waves " + std::to_string(j) + " and " +
                                  std::to_string(l) + " share the same center");
      }
    }
}

double SolitonEnsemble::alpha_sharp() const {
  if (specs_.size() < 2) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < specs_.size(); ++j)
    for (std::size_t l = j + 1; l < specs_.size(); ++l)
      best = std::min(best, std::abs(derive_params(specs_[j]).alpha -
                                     derive_params(specs_[l]).alpha));
  return best;
}

double SolitonEnsemble::min_center_separation() const {
  if (specs_.size() < 2) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < specs_.size(); ++j)
    for (std::size_t l = j + 1; l < specs_.size(); ++l)
      best = std::min(best, std::abs(specs_[j].gamma - specs_[l].gamma));
  return best;
}

double SolitonEnsemble::max_speed() const {
  double best = 0.0;
  for (const auto& w : specs_) best = std::max(best, std::abs(derive_params(w).alpha));
  return best;
}

double SolitonEnsemble::total_mass() const {
  double m = 0.0;
  for (const auto& w : specs_) m += w.K * w.K;
  return m;
}

WavePair SolitonEnsemble::profile_sum(double t, std::size_t n_modes, double tail_tol) const {
  WavePair sum{FockVector(n_modes), FockVector(n_modes)};
  for (const auto& w : specs_) {
    const WavePair p = soliton_profile(w, t, n_modes, tail_tol);
    sum.u += p.u;
    sum.v += p.v;
  }
  return sum;
}

SolitonEnsemble SolitonEnsemble::with_phase_shift(double da, double db) const {
  auto shifted = specs_;
  for (auto& w : shifted) {
    w.a += da;
    w.b += db;
  }
  return SolitonEnsemble(std::move(shifted), mode_);
}

}  // namespace lll
