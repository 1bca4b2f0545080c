#include "lll/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lll/errors.hpp"
#include "lll/quadrature.hpp"

namespace lll {

namespace {

const double kSqrt3 = std::sqrt(3.0);
const cplx kI(0.0, 1.0);

double pair_residual(const FockVector& u, const FockVector& v, const WavePair& ref) {
  return l2_norm(u - ref.u) + l2_norm(v - ref.v);
}

SimState profile_state(const SolitonEnsemble& e, double t, std::size_t n_modes) {
  WavePair p = e.profile_sum(t, n_modes);
  return {std::move(p.u), std::move(p.v), t, -1};
}

double pick_dt(double dt, const SimState& s) { return dt > 0.0 ? dt : default_time_step(s); }

// Backward construction from the profile sum at t = M to t = 0.
SimState construct_initial(const SolitonEnsemble& e, double M, std::size_t n_modes,
                           const TrilinearKernelTable& table, double dt) {
  const SimState start = profile_state(e, M, n_modes);
  return integrate(start, 0.0, pick_dt(dt, start), table).state;
}

}  // namespace

MultiSolitonRun build_multisoliton(const SolitonEnsemble& ensemble, double M,
                                   std::size_t n_modes, const TrilinearKernelTable& table,
                                   const MultiSolitonOptions& options) {
  if (ensemble.mode() != EnsembleMode::DistinctSpeeds)
    throw PreconditionError("build_multisoliton: needs a distinct-speeds ensemble");
  if (!(M > 0.0)) throw PreconditionError("build_multisoliton: M must be positive");
  if (options.samples < 2) throw PreconditionError("build_multisoliton: need >= 2 samples");
  if (table.size() != n_modes) throw DimensionError("build_multisoliton: table size mismatch");

  SimState state = profile_state(ensemble, M, n_modes);
  const double dt = pick_dt(options.dt, state);

  MultiSolitonRun run{ensemble, M, n_modes, dt, ensemble.alpha_sharp(), {}, {}, options.kappas,
                      {},       state, {}};
  std::vector<RadialWeightTable> weights;
  for (double k : options.kappas) weights.emplace_back(WeightSpec::exponential(k), n_modes);
  const std::size_t count = options.samples + 1;
  run.times.resize(count);
  run.eta.resize(count);
  run.eta_weighted.assign(weights.size(), std::vector<double>(count));

  for (std::size_t back = 0; back < count; ++back) {
    const std::size_t i = count - 1 - back;
    const double t = M * static_cast<double>(i) / static_cast<double>(options.samples);
    if (back > 0) state = integrate(state, t, dt, table).state;
    const WavePair ref = ensemble.profile_sum(t, n_modes);
    const FockVector r1 = state.u - ref.u;
    const FockVector r2 = state.v - ref.v;
    run.times[i] = t;
    run.eta[i] = l2_norm(r1) + l2_norm(r2);
    for (std::size_t k = 0; k < weights.size(); ++k)
      run.eta_weighted[k][i] = weighted_l2_norm(r1, weights[k]) + weighted_l2_norm(r2, weights[k]);
  }
  run.initial = state;
  run.conserved = conserved_quantities(state.u, state.v, table);
  return run;
}

DecayFit fit_residual_decay(const MultiSolitonRun& run, std::size_t kappa_index) {
  if (!(run.alpha_sharp > 0.0)) throw FitError("fit_residual_decay: single wave, eta at floor");
  const std::vector<double>* series = &run.eta;
  if (kappa_index != kUnweighted) {
    if (kappa_index >= run.eta_weighted.size())
      throw PreconditionError("fit_residual_decay: no such kappa");
    series = &run.eta_weighted[kappa_index];
  }
  DecayFit fit;
  fit.window_lo = 0.2 * run.M;
  fit.window_hi = 0.8 * run.M;
  std::vector<double> x, y;
  double lo = fit.window_hi, hi = fit.window_lo;
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const double t = run.times[i];
    const double e = (*series)[i];
    if (t < fit.window_lo - 1e-12 || t > fit.window_hi + 1e-12 || !(e > kResidualFloor)) continue;
    x.push_back(t * t);
    y.push_back(std::log(e));
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  if (x.size() < 3) throw FitError("fit_residual_decay: eta at numerical floor on the window");
  fit.window_lo = lo;
  fit.window_hi = hi;
  const LineFit line = fit_line(x, y);
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.r2 = line.r2;
  fit.points = x.size();
  fit.c_fit = -line.slope / (run.alpha_sharp * run.alpha_sharp);
  return fit;
}

CauchyReport cauchy_in_M(const SolitonEnsemble& ensemble, const std::vector<double>& M_list,
                         std::size_t n_modes, const TrilinearKernelTable& table, double dt) {
  if (ensemble.mode() != EnsembleMode::DistinctSpeeds)
    throw PreconditionError("cauchy_in_M: needs a distinct-speeds ensemble");
  if (M_list.size() < 3) throw PreconditionError("cauchy_in_M: need at least 3 values of M");
  for (std::size_t i = 0; i < M_list.size(); ++i) {
    if (!(M_list[i] > 0.0)) throw PreconditionError("cauchy_in_M: M must be positive");
    if (i > 0 && !(M_list[i] > M_list[i - 1]))
      throw PreconditionError("cauchy_in_M: M_list must be strictly ascending");
  }
  // One step size for every M.
  if (!(dt > 0.0)) dt = default_time_step(profile_state(ensemble, M_list.back(), n_modes));

  CauchyReport rep;
  rep.M = M_list;
  rep.alpha_sharp = ensemble.alpha_sharp();
  std::vector<SimState> starts;
  for (double M : M_list) starts.push_back(construct_initial(ensemble, M, n_modes, table, dt));
  for (std::size_t i = 0; i + 1 < starts.size(); ++i)
    rep.gaps.push_back(l2_norm(starts[i + 1].u - starts[i].u) +
                       l2_norm(starts[i + 1].v - starts[i].v));

  rep.strictly_decreasing = true;
  for (std::size_t i = 1; i < rep.gaps.size(); ++i)
    if (!(rep.gaps[i] < rep.gaps[i - 1])) rep.strictly_decreasing = false;

  std::vector<double> x, y;
  for (std::size_t i = 0; i < rep.gaps.size(); ++i) {
    if (!(rep.gaps[i] > kResidualFloor)) continue;
    x.push_back(M_list[i] * M_list[i]);
    y.push_back(std::log(rep.gaps[i]));
  }
  // No fit for a single speed.
  if (x.size() >= 2 && rep.alpha_sharp > 0.0) {
    rep.fit = fit_line(x, y);
    rep.fit_valid = true;
  }
  return rep;
}

SuperpositionRun superposition_run(const SolitonEnsemble& ensemble, double t_final,
                                   std::size_t n_modes, const TrilinearKernelTable& table,
                                   double dt, std::size_t samples) {
  if (ensemble.mode() != EnsembleMode::CommonSpeed)
    throw PreconditionError("superposition_run: needs a common-speed ensemble");
  if (!(t_final > 0.0)) throw PreconditionError("superposition_run: t_final must be positive");
  if (samples < 2) throw PreconditionError("superposition_run: need >= 2 samples");
  if (table.size() != n_modes) throw DimensionError("superposition_run: table size mismatch");

  SimState state = profile_state(ensemble, 0.0, n_modes);
  dt = pick_dt(dt, state);
  SuperpositionRun run;
  run.separation = ensemble.min_center_separation();
  for (std::size_t i = 0; i <= samples; ++i) {
    const double t = t_final * static_cast<double>(i) / static_cast<double>(samples);
    if (i > 0) state = integrate(state, t, dt, table).state;
    run.times.push_back(t);
    run.eta.push_back(pair_residual(state.u, state.v, ensemble.profile_sum(t, n_modes)));
  }

  // η(t) <= η(t₁) sqrt(t/t₁) e^{c n²K²(t − t₁)}, solved for the smallest c.
  const double n = static_cast<double>(ensemble.size());
  const double k2 = ensemble.specs().front().K * ensemble.specs().front().K;
  const double scale = n * n * k2;
  const double t1 = run.times[1];
  const double e1 = run.eta[1];
  if (e1 > 0.0 && scale > 0.0) {
    for (std::size_t i = 2; i < run.times.size(); ++i) {
      if (!(run.eta[i] > 0.0)) continue;
      const double t = run.times[i];
      const double c = (std::log(run.eta[i] / e1) - 0.5 * std::log(t / t1)) / (scale * (t - t1));
      run.growth_c = std::max(run.growth_c, c);
    }
  }
  std::vector<double> x, y;
  for (std::size_t i = 1; i < run.times.size(); ++i) {
    if (!(run.eta[i] > 0.0)) continue;
    x.push_back(run.times[i]);
    y.push_back(std::log(run.eta[i]) - 0.5 * std::log(run.times[i]));
  }
  if (x.size() >= 2) run.growth_exponent = fit_line(x, y).slope;
  return run;
}

SeparationSweep superposition_sweep(const SolitonEnsemble& base,
                                    const std::vector<double>& separations, double t_final,
                                    std::size_t n_modes, const TrilinearKernelTable& table,
                                    double dt, std::size_t samples) {
  if (separations.empty()) throw PreconditionError("superposition_sweep: no separations");
  const double d0 = base.min_center_separation();
  if (!(d0 > 0.0)) throw PreconditionError("superposition_sweep: needs at least two waves");

  SeparationSweep sweep;
  sweep.separations = separations;
  for (double d : separations) {
    if (!(d > 0.0)) throw PreconditionError("superposition_sweep: separations must be positive");
    auto specs = base.specs();
    for (auto& w : specs) w.gamma *= d / d0;
    const SolitonEnsemble scaled(std::move(specs), EnsembleMode::CommonSpeed);
    sweep.runs.push_back(superposition_run(scaled, t_final, n_modes, table, dt, samples));
    sweep.eta_final.push_back(sweep.runs.back().eta.back());
  }
  sweep.decreasing = true;
  for (std::size_t i = 1; i < sweep.eta_final.size(); ++i)
    if (!(sweep.eta_final[i] < sweep.eta_final[i - 1])) sweep.decreasing = false;

  std::vector<double> x, y;
  for (std::size_t i = 0; i < separations.size(); ++i) {
    if (!(sweep.eta_final[i] > 0.0)) continue;
    x.push_back(separations[i] * separations[i]);
    y.push_back(std::log(sweep.eta_final[i]));
  }
  if (x.size() >= 2) sweep.fit = fit_line(x, y);
  return sweep;
}

LiftReport harmonic_lift(const MultiSolitonRun& run, const std::vector<double>& t_list,
                         const TrilinearKernelTable& table, double fd_step) {
  if (t_list.size() < 2) throw PreconditionError("harmonic_lift: need at least 2 times");
  if (!(fd_step > 0.0)) throw PreconditionError("harmonic_lift: fd_step must be positive");
  std::vector<double> ts = t_list;
  std::sort(ts.begin(), ts.end());
  for (double t : ts) {
    if (!(t > 1.0)) throw PreconditionError("harmonic_lift: needs t > 1");
    if (std::log(t) + fd_step > run.M)
      throw PreconditionError("harmonic_lift: ln t beyond the run's time span");
    if (std::log(t) - fd_step < 0.0)
      throw PreconditionError("harmonic_lift: ln t too close to 0 for the stencil");
  }

  const std::size_t n = run.n_modes;
  const RadialWeightTable bracket(WeightSpec::polynomial(1.0), n);
  const PolarGrid grid =
      PolarGrid::for_truncation(n, run.ensemble.max_speed() * run.M);
  const double pi2 = std::numbers::pi * std::numbers::pi;

  LiftReport rep;
  SimState state = run.initial;
  for (double t : ts) {
    const double s = std::log(t);
    state = integrate(state, s, run.dt, table).state;
    const SimState fwd = integrate(state, s + fd_step, run.dt, table).state;
    const SimState bwd = integrate(state, s - fd_step, run.dt, table).state;
    // d/dt u(ln t) = u'(s) / t.
    const FockVector du_dt = cplx(1.0 / (2.0 * fd_step * t)) * (fwd.u - bwd.u);

    const FockVector psi = harmonic_propagate(state.u, t);
    const FockVector vt = harmonic_propagate(state.v, t);
    const FockVector drift = harmonic_propagate(kI * du_dt, t);

    const auto psi_z = evaluate_on_grid(psi, grid);
    const auto v_z = evaluate_on_grid(vt, grid);
    const auto drift_z = evaluate_on_grid(drift, grid);
    std::vector<double> res2(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double V = std::norm(v_z[i]) / (pi2 * t);
      res2[i] = std::norm(drift_z[i] + V * psi_z[i]);
    }

    LiftSample sample;
    sample.t = t;
    sample.v_sup = std::pow(sup_norm_estimate(vt, SupGrid::for_vector(vt)).value, 2) / (pi2 * t);
    sample.psi_norm = l2_norm(psi);
    sample.psi_weighted = weighted_l2_norm(psi, bracket);
    sample.residual = std::sqrt(std::max(0.0, grid.integrate(res2)));
    rep.samples.push_back(sample);
  }

  rep.v_sup_decreasing = true;
  for (std::size_t i = 1; i < rep.samples.size(); ++i)
    if (!(rep.samples[i].v_sup < rep.samples[i - 1].v_sup)) rep.v_sup_decreasing = false;

  std::vector<double> lt, w, lr;
  for (const auto& smp : rep.samples) {
    lt.push_back(std::log(smp.t));
    w.push_back(smp.psi_weighted);
    lr.push_back(std::log(std::max(smp.residual, 1e-300)));
  }
  rep.weighted_vs_log = fit_line(lt, w);
  rep.residual_trend = fit_line(lt, lr);
  return rep;
}

AsymptoticInvariants asymptotic_invariants(const SolitonEnsemble& ensemble) {
  AsymptoticInvariants a;
  const double h = 11.0 / (64.0 * std::numbers::pi);
  for (const auto& w : ensemble.specs()) {
    const double k2 = w.K * w.K;
    a.mass += k2;
    a.p_minus += kSqrt3 * std::imag(w.gamma * std::polar(1.0, -w.theta)) * k2;
    a.q_minus += -0.5 * kSqrt3 * kI * std::polar(1.0, -w.theta) * k2;
    a.hamiltonian_quartic += h * k2 * k2;
    a.hamiltonian_quadratic += h * k2;
  }
  return a;
}

}  // namespace lll
