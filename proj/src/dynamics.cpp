#include "lll/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lll/errors.hpp"
#include "lll/fit.hpp"

namespace lll {

namespace {

const cplx kI(0.0, 1.0);

double relative_drift(double now, double start) {
  return start > 0.0 ? std::abs(now - start) / start : std::abs(now - start);
}

}  // namespace

void validate(const SimState& state) {
  require_same_size(state.u, state.v, "SimState");
  if (state.sigma != 1 && state.sigma != -1)
    throw PreconditionError("SimState: sigma must be +1 or -1");
  if (!std::isfinite(state.t)) throw NumericalError("SimState: non-finite time");
}

Derivative rhs(const SimState& state, const TrilinearKernelTable& table) {
  return {-kI * coupling(state.v, state.u, table),
          (-kI * static_cast<double>(state.sigma)) * coupling(state.u, state.v, table)};
}

SimState rk4_step(const SimState& s, double h, const TrilinearKernelTable& table) {
  const cplx half(0.5 * h), full(h), sixth(h / 6.0);
  const Derivative k1 = rhs(s, table);
  const Derivative k2 = rhs({s.u + half * k1.du, s.v + half * k1.dv, s.t, s.sigma}, table);
  const Derivative k3 = rhs({s.u + half * k2.du, s.v + half * k2.dv, s.t, s.sigma}, table);
  const Derivative k4 = rhs({s.u + full * k3.du, s.v + full * k3.dv, s.t, s.sigma}, table);
  SimState out = s;
  out.u = s.u + sixth * (k1.du + cplx(2.0) * k2.du + cplx(2.0) * k3.du + k4.du);
  out.v = s.v + sixth * (k1.dv + cplx(2.0) * k2.dv + cplx(2.0) * k3.dv + k4.dv);
  out.t = s.t + h;
  return out;
}

double default_time_step(const SimState& state) {
  return 0.005 * 2.0 * std::numbers::pi / std::max({state.u.mass(), state.v.mass(), 1.0});
}

DiagnosticsProbe::DiagnosticsProbe(std::size_t n_modes, const std::vector<double>& kappas) {
  tables_.reserve(kappas.size());
  for (double k : kappas) tables_.emplace_back(WeightSpec::exponential(k), n_modes);
}

DiagnosticsRecord DiagnosticsProbe::operator()(const SimState& state,
                                               const TrilinearKernelTable& table) const {
  const ConservedQuantities c = conserved_quantities(state.u, state.v, table);
  DiagnosticsRecord r;
  r.t = state.t;
  r.mass_u = c.mass_u;
  r.mass_v = c.mass_v;
  r.hamiltonian = c.hamiltonian;
  r.p_minus = c.p_minus;
  r.q_minus = c.q_minus;
  for (const auto& tab : tables_) {
    r.xk_u.push_back(weighted_l2_norm(state.u, tab));
    r.xk_v.push_back(weighted_l2_norm(state.v, tab));
  }
  r.tail_u = state.u.tail_mass();
  r.tail_v = state.v.tail_mass();
  return r;
}

IntegrationResult integrate(const SimState& state, double t_target, double dt,
                            const TrilinearKernelTable& table, const Monitors& monitors) {
  validate(state);
  if (!(dt > 0.0)) throw PreconditionError("integrate: dt must be positive");
  if (!std::isfinite(t_target)) throw PreconditionError("integrate: non-finite target time");
  if (table.size() != state.u.size()) throw DimensionError("integrate: kernel table size mismatch");

  const DiagnosticsProbe probe(state.u.size(), monitors.kappas);
  IntegrationResult result{state, {}};
  auto record = [&](const SimState& s) {
    result.records.push_back(probe(s, table));
    if (monitors.observer) monitors.observer(s);
  };

  const double span = t_target - state.t;
  const double dir = span < 0.0 ? -1.0 : 1.0;
  const double length = std::abs(span);
  auto full_steps = static_cast<std::size_t>(std::floor(length / dt));
  double remainder = length - static_cast<double>(full_steps) * dt;
  if (remainder <= 1e-12 * dt) remainder = 0.0;
  const std::size_t stride =
      monitors.sample_interval > 0.0
          ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(monitors.sample_interval / dt)))
          : std::numeric_limits<std::size_t>::max();

  const double m_u0 = state.u.mass();
  const double m_v0 = state.v.mass();
  auto check_drift = [&](const SimState& s) {
    const double du = relative_drift(s.u.mass(), m_u0);
    const double dv = relative_drift(s.v.mass(), m_v0);
    if (!(du <= monitors.drift_limit) || !(dv <= monitors.drift_limit))
      throw NumericalError("integrate: mass drift " + std::to_string(std::max(du, dv)) +
                           " exceeds limit at t = " + std::to_string(s.t));
  };

  SimState& s = result.state;
  record(s);
  for (std::size_t step = 1; step <= full_steps; ++step) {
    s = rk4_step(s, dir * dt, table);
    s.t = state.t + dir * static_cast<double>(step) * dt;
    check_drift(s);
    const bool last = step == full_steps && remainder == 0.0;
    if (last) s.t = t_target;
    if (step % stride == 0 || last) record(s);
  }
  if (remainder > 0.0) {
    s = rk4_step(s, dir * remainder, table);
    s.t = t_target;
    check_drift(s);
    record(s);
  }
  return result;
}

double growth_monitor(const std::vector<DiagnosticsRecord>& records, std::size_t kappa_index) {
  if (records.size() < 3) throw FitError("growth_monitor: need at least 3 records");
  std::vector<double> t, y;
  for (const auto& r : records) {
    if (kappa_index >= r.xk_u.size()) throw PreconditionError("growth_monitor: no such kappa");
    if (!(r.xk_u[kappa_index] > 0.0)) continue;
    t.push_back(r.t);
    y.push_back(std::log(r.xk_u[kappa_index]));
  }
  if (t.size() < 3) {
    // u ≡ 0 has no growth at all.
    bool all_zero = std::all_of(records.begin(), records.end(),
                                [&](const auto& r) { return r.xk_u[kappa_index] == 0.0; });
    if (all_zero) return 0.0;
    throw FitError("growth_monitor: degenerate norm series");
  }
  return fit_line(t, y).slope;
}

DivergenceReport divergence_bounds(const SimState& a, const SimState& b, double t_final,
                                   double dt, const TrilinearKernelTable& table,
                                   std::size_t samples) {
  validate(a);
  validate(b);
  require_same_size(a.u, b.u, "divergence_bounds");
  if (a.sigma != b.sigma)
    throw PreconditionError("divergence_bounds: states evolve under different sigma");
  if (a.t != b.t) throw PreconditionError("divergence_bounds: states at different times");
  if (samples == 0) throw PreconditionError("divergence_bounds: need at least one sample");

  auto distance = [](const SimState& x, const SimState& y) {
    return std::sqrt((x.u - y.u).mass() + (x.v - y.v).mass());
  };
  DivergenceReport rep;
  rep.mass_sum = a.u.mass() + b.u.mass() + a.v.mass() + b.v.mass();
  rep.bound = 2.0 / std::numbers::pi * rep.mass_sum;
  SimState x = a, y = b;
  rep.times.push_back(0.0);
  rep.distance.push_back(distance(x, y));
  const double d0 = rep.distance.front();
  for (std::size_t i = 1; i <= samples; ++i) {
    const double target = a.t + t_final * static_cast<double>(i) / static_cast<double>(samples);
    x = integrate(x, target, dt, table).state;
    y = integrate(y, target, dt, table).state;
    const double elapsed = std::abs(target - a.t);
    const double d = distance(x, y);
    rep.times.push_back(elapsed);
    rep.distance.push_back(d);
    if (d0 > 0.0 && elapsed > 0.0) {
      const double rate = std::log(d / d0) / elapsed;
      rep.c_plus = std::max(rep.c_plus, rate);
      rep.c_minus = std::max(rep.c_minus, -rate);
    }
  }
  if (d0 == 0.0) {
    const bool all_zero =
        std::all_of(rep.distance.begin(), rep.distance.end(), [](double d) { return d == 0.0; });
    rep.upper_ok = all_zero;
    rep.lower_ok = true;  // nothing to bound from below
  } else {
    rep.upper_ok = rep.c_plus <= rep.bound;
    rep.lower_ok = rep.c_minus <= rep.bound;
  }
  return rep;
}

}  // namespace lll
