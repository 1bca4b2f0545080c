#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lll/errors.hpp"
#include "lll/experiments.hpp"

using namespace lll;
using std::numbers::pi;

namespace {

const double kK1 = amplitude_for_speed(1.0);  // |α| = 1

SolitonEnsemble opposing_pair() {
  return SolitonEnsemble({{kK1, 0, 0, 0, 0.0}, {kK1, 0, 0, pi, 0.0}}, EnsembleMode::DistinctSpeeds);
}

const TrilinearKernelTable& table96() {
  static const TrilinearKernelTable t(96);
  return t;
}

const MultiSolitonRun& pair_run() {
  static const MultiSolitonRun run = [] {
    MultiSolitonOptions o;
    o.kappas = {1.0};
    return build_multisoliton(opposing_pair(), 3.0, 96, table96(), o);
  }();
  return run;
}

}  // namespace

TEST_CASE("single wave: the backward construction is exact") {
  const TrilinearKernelTable t(48);
  const SolitonEnsemble one({{kK1, 0.2, 0.1, 0.4, cplx(0.1, 0.2)}}, EnsembleMode::DistinctSpeeds);
  MultiSolitonOptions o;
  o.samples = 10;
  const MultiSolitonRun run = build_multisoliton(one, 2.0, 48, t, o);
  for (double e : run.eta) CHECK(e <= 1e-6);
  CHECK(run.alpha_sharp == 0.0);
  CHECK_THROWS_AS(fit_residual_decay(run), FitError);
}

TEST_CASE("multisoliton preconditions") {
  const TrilinearKernelTable t(32);
  const SolitonEnsemble common({{1.0, 0, 0, 0, -0.5}, {1.0, 0, 0, 0, 0.5}}, EnsembleMode::CommonSpeed);
  CHECK_THROWS_AS(build_multisoliton(common, 1.0, 32, t), PreconditionError);
  CHECK_THROWS_AS(build_multisoliton(opposing_pair(), 0.0, 32, t), PreconditionError);
  CHECK_THROWS_AS(build_multisoliton(opposing_pair(), 1.0, 48, t), DimensionError);
  // Translations by M|α| = 6 do not fit in 32 modes.
  CHECK_THROWS_AS(build_multisoliton(opposing_pair(), 6.0, 32, t), ResolutionError);
}

TEST_CASE("two opposing waves: Gaussian-in-time residual") {
  const MultiSolitonRun& run = pair_run();
  CHECK(run.alpha_sharp == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(run.times.front() == 0.0);
  CHECK(run.times.back() == 3.0);
  CHECK(run.eta.back() == 0.0);
  // The waves overlap at t = 0 and separate afterwards.
  const std::size_t mid = run.times.size() / 2;
  CHECK(run.eta[0] > run.eta[mid]);
  for (std::size_t i = mid; i + 1 < run.eta.size(); ++i) CHECK(run.eta[i + 1] < run.eta[i]);

  const DecayFit fit = fit_residual_decay(run);
  CHECK(fit.window_lo >= 0.2 * run.M - 1e-12);
  CHECK(fit.window_hi <= 0.8 * run.M + 1e-12);
  CHECK(fit.c_fit >= 0.15);
  CHECK(fit.c_fit <= 0.5);
  CHECK(fit_residual_decay(run, 0).c_fit >= 0.1);
  CHECK_THROWS_AS(fit_residual_decay(run, 3), PreconditionError);
}

TEST_CASE("conserved values of the constructed solution") {
  const MultiSolitonRun& run = pair_run();
  const AsymptoticInvariants inv = asymptotic_invariants(run.ensemble);
  CHECK(std::abs(run.conserved.mass_u - inv.mass) / inv.mass <= 1e-4);
  CHECK(std::abs(run.conserved.mass_v - inv.mass) / inv.mass <= 1e-4);
  CHECK(std::abs(run.conserved.q_minus - inv.q_minus) / inv.mass <= 1e-3);
  // H of well separated waves is additive and quartic in K.
  CHECK(std::abs(run.conserved.hamiltonian - inv.hamiltonian_quartic) / inv.hamiltonian_quartic <= 1e-3);
}

TEST_CASE("single-wave invariants in closed form") {
  const std::size_t n = 64;
  const TrilinearKernelTable t(n);
  for (const WaveSpec& w : {WaveSpec{1.0, 0, 0, 0, 0.0}, WaveSpec{2.0, 0.3, 1.1, 0.7, cplx(0.4, -0.9)}}) {
    const WavePair p = build_wave_pair(w, n);
    const auto c = conserved_quantities(p.u, p.v, t);
    const AsymptoticInvariants inv = asymptotic_invariants(SolitonEnsemble({w}, EnsembleMode::DistinctSpeeds));
    const double k2 = w.K * w.K;
    CHECK(c.mass_u == doctest::Approx(k2).epsilon(1e-10));
    CHECK(std::abs(c.q_minus - inv.q_minus) <= 1e-10 * k2);
    CHECK(c.p_minus == doctest::Approx(inv.p_minus).epsilon(1e-10));
    CHECK(c.hamiltonian == doctest::Approx(11.0 * k2 * k2 / (64 * pi)).epsilon(1e-10));
  }
}

TEST_CASE("gauge covariance of the residual series") {
  const TrilinearKernelTable t(64);
  const SolitonEnsemble e({{amplitude_for_speed(0.5), 0, 0, 0, 0.0}, {amplitude_for_speed(0.5), 0, 0, pi, 0.0}},
                          EnsembleMode::DistinctSpeeds);
  MultiSolitonOptions o;
  o.samples = 8;
  const MultiSolitonRun a = build_multisoliton(e, 1.0, 64, t, o);
  const MultiSolitonRun b = build_multisoliton(e.with_phase_shift(0.7, -1.3), 1.0, 64, t, o);
  for (std::size_t i = 0; i < a.eta.size(); ++i) CHECK(std::abs(a.eta[i] - b.eta[i]) < 1e-10);
}

TEST_CASE("Cauchy in M") {
  const TrilinearKernelTable t(64);
  const SolitonEnsemble one({{kK1, 0, 0, 0, 0.0}}, EnsembleMode::DistinctSpeeds);
  const CauchyReport r1 = cauchy_in_M(one, {1.0, 1.5, 2.0}, 64, t);
  for (double g : r1.gaps) CHECK(g <= 1e-8);
  CHECK_FALSE(r1.fit_valid);

  CHECK_THROWS_AS(cauchy_in_M(one, {1.0, 2.0}, 64, t), PreconditionError);
  CHECK_THROWS_AS(cauchy_in_M(one, {1.0, 3.0, 2.0}, 64, t), PreconditionError);

  const SolitonEnsemble slow({{amplitude_for_speed(0.5), 0, 0, 0, 0.0}, {amplitude_for_speed(0.5), 0, 0, pi, 0.0}},
                             EnsembleMode::DistinctSpeeds);
  const CauchyReport a = cauchy_in_M(slow, {1.0, 1.5, 2.0}, 64, t);
  const CauchyReport b = cauchy_in_M(slow.with_phase_shift(0.4, 0.4), {1.0, 1.5, 2.0}, 64, t);
  REQUIRE(a.gaps.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(a.gaps[i] - b.gaps[i]) < 1e-10);
}

TEST_CASE("superposition") {
  const TrilinearKernelTable t(48);
  const SolitonEnsemble one({{kK1, 0, 0, 0, 0.0}}, EnsembleMode::CommonSpeed);
  const SuperpositionRun r1 = superposition_run(one, 0.2, 48, t);
  for (double e : r1.eta) CHECK(e <= 1e-8);

  CHECK_THROWS_AS(superposition_run(opposing_pair(), 0.2, 48, t), PreconditionError);

  const SolitonEnsemble pair({{kK1, 0, 0, 0, -0.5}, {kK1, 0, 0, 0, 0.5}}, EnsembleMode::CommonSpeed);
  const SeparationSweep sw = superposition_sweep(pair, {2.0, 3.0, 4.0}, 0.2, 48, t);
  CHECK(sw.decreasing);
  CHECK(sw.fit.slope <= -0.15);
  CHECK(sw.fit.slope >= -0.45);
  CHECK(sw.runs[1].separation == doctest::Approx(3.0));
  for (const auto& r : sw.runs) CHECK(r.growth_c > 0.0);
}

TEST_CASE("harmonic lift") {
  const MultiSolitonRun& run = pair_run();
  CHECK_THROWS_AS(harmonic_lift(run, {0.5, 2.0}, table96()), PreconditionError);
  CHECK_THROWS_AS(harmonic_lift(run, {4.0, 30.0}, table96()), PreconditionError);
  const LiftReport rep = harmonic_lift(run, {4.0, 6.0, 8.0, 12.0, 16.0}, table96());
  CHECK(rep.v_sup_decreasing);
  for (const auto& s : rep.samples) CHECK(std::abs(s.psi_norm - rep.samples[0].psi_norm) <= 1e-6);
  CHECK(rep.weighted_vs_log.slope > 0.0);
  CHECK(rep.weighted_vs_log.r2 >= 0.9);
  CHECK(rep.residual_trend.slope < 0.0);
}
