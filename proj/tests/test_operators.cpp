#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "lll/errors.hpp"
#include "lll/fit.hpp"
#include "lll/operators.hpp"

using namespace lll;
using std::numbers::pi;

namespace {

FockVector random_unit(std::mt19937_64& rng, std::size_t n, std::size_t support) {
  std::normal_distribution<double> g;
  std::vector<cplx> c(n);
  for (std::size_t i = 0; i < support; ++i) c[i] = {g(rng), g(rng)};
  FockVector u(std::move(c));
  return (1.0 / std::sqrt(u.mass())) * u;
}

// Π(p · conj(q) · r) by projecting grid samples.
FockVector triple_by_quadrature(const FockVector& p, const FockVector& q, const FockVector& r,
                                const PolarGrid& grid) {
  const auto pz = evaluate_on_grid(p, grid), qz = evaluate_on_grid(q, grid),
             rz = evaluate_on_grid(r, grid);
  std::vector<cplx> f(grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = pz[i] * std::conj(qz[i]) * rz[i];
  return projector_quadrature_oracle(f, grid, p.size());
}

// Columns m[j] = coefficients of R_α φ_j, expanded by hand.
std::vector<std::vector<cplx>> dense_translation(std::size_t rows, std::size_t cols, cplx alpha) {
  // R_α φ_j (z) = (z + α)^j / sqrt(π j!) e^{−zᾱ − |α|²/2} e^{−|z|²/2}; expand both factors.
  std::vector<std::vector<cplx>> m(cols, std::vector<cplx>(rows));
  const double pref = std::exp(-std::norm(alpha) / 2.0);
  for (std::size_t j = 0; j < cols; ++j) {
    // (z+α)^j / sqrt(j!) = Σ_i C(j,i) α^{j−i} z^i / sqrt(j!), then times Σ_l (−ᾱ)^l z^l / l!
    std::vector<cplx> poly(rows, 0.0);
    for (std::size_t i = 0; i <= j && i < rows; ++i)
      poly[i] = std::exp(std::lgamma(j + 1.0) - std::lgamma(i + 1.0) - std::lgamma(j - i + 1.0) -
                         0.5 * std::lgamma(j + 1.0)) *
                std::pow(alpha, static_cast<double>(j - i));
    std::vector<cplx> prod(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t l = 0; i + l < rows; ++l)
        prod[i + l] += poly[i] * std::pow(-std::conj(alpha), static_cast<double>(l)) /
                       std::exp(std::lgamma(l + 1.0));
    for (std::size_t k = 0; k < rows; ++k)
      m[j][k] = pref * prod[k] * std::exp(0.5 * std::lgamma(k + 1.0));
  }
  return m;
}

}  // namespace

TEST_CASE("kernel analytic values") {
  const TrilinearKernelTable t(32);
  const FockVector e0 = FockVector::basis(32, 0), e1 = FockVector::basis(32, 1);
  CHECK(l2_norm(projected_triple(e0, e0, e0, t) - (1.0 / (2 * pi)) * e0) < 1e-12);
  CHECK(l2_norm(projected_triple(e1, e1, e1, t) - (1.0 / (4 * pi)) * e1) < 1e-12);
  CHECK(l2_norm(projected_triple(e0, FockVector(32), e1, t)) == 0.0);
  // (k+ℓ)! / (2^{k+ℓ} sqrt(k!ℓ!m!n!)) at k=ℓ=m=n=1 is 1/2.
  CHECK(std::exp(t.log_coeff(1, 1, 1)) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("kernel table rejects bad sizes and round-trips to disk") {
  CHECK_THROWS_AS(TrilinearKernelTable(0), DimensionError);
  const TrilinearKernelTable t(12);
  const auto path = std::filesystem::temp_directory_path() / "lll_kernel_test.bin";
  t.save(path);
  const TrilinearKernelTable back = TrilinearKernelTable::load(path, 12);
  CHECK(back.log_coeff(5, 3, 4) == t.log_coeff(5, 3, 4));
  CHECK_THROWS(TrilinearKernelTable::load(path, 13));
  std::filesystem::remove(path);
  CHECK_THROWS(TrilinearKernelTable::load(path, 12));
}

TEST_CASE("projected_triple matches the quadrature oracle") {
  const std::size_t n = 16;
  const TrilinearKernelTable t(n);
  const PolarGrid grid = PolarGrid::for_truncation(n);
  const std::vector<FockVector> set = {FockVector::basis(n, 0), FockVector::basis(n, 1),
                                       FockVector::basis(n, 2), FockVector::coherent(n, 0.7)};
  double worst = 0.0;
  for (const auto& p : set)
    for (const auto& q : set)
      for (const auto& r : set)
        worst = std::max(worst, l2_norm(projected_triple(p, q, r, t) -
                                        triple_by_quadrature(p, q, r, grid)));
  CHECK(worst < 1e-8);
}

TEST_CASE("projector oracle examples") {
  const std::size_t n = 12;
  const PolarGrid grid = PolarGrid::for_truncation(n);
  const FockVector e0 = FockVector::basis(n, 0);
  const auto s0 = evaluate_on_grid(e0, grid);
  CHECK(l2_norm(projector_quadrature_oracle(s0, grid, n) - e0) < 1e-10);
  CHECK(l2_norm(triple_by_quadrature(e0, e0, e0, grid) - (1.0 / (2 * pi)) * e0) < 1e-8);
}

TEST_CASE("fast path equals the reference sum") {
  std::mt19937_64 rng(99);
  for (std::size_t n : {8u, 33u, 64u}) {
    const TrilinearKernelTable t(n);
    const FockVector p = random_unit(rng, n, n), q = random_unit(rng, n, n),
                     r = random_unit(rng, n, n);
    CHECK(l2_norm(projected_triple(p, q, r, t) - projected_triple_fast(p, q, r, t)) < 1e-13);
  }
}

TEST_CASE("selection rule k + l = m + n") {
  const std::size_t n = 20;
  const TrilinearKernelTable t(n);
  for (std::size_t m = 0; m < 6; ++m)
    for (std::size_t l = 0; l < 6; ++l)
      for (std::size_t r = 0; r < 6; ++r) {
        const FockVector out = projected_triple(FockVector::basis(n, m), FockVector::basis(n, l),
                                                FockVector::basis(n, r), t);
        for (std::size_t k = 0; k < n; ++k) {
          const bool allowed = k + l == m + r;
          if (!allowed) CHECK(out[k] == cplx(0.0));
          else CHECK(std::abs(out[k]) > 0.0);
        }
      }
}

TEST_CASE("projected_triple is deterministic across thread counts") {
  std::mt19937_64 rng(4);
  const std::size_t n = 64;
  const TrilinearKernelTable t(n);
  const FockVector p = random_unit(rng, n, n), q = random_unit(rng, n, n), r = random_unit(rng, n, n);
  set_thread_count(1);
  const FockVector a = projected_triple(p, q, r, t);
  set_thread_count(4);
  const FockVector b = projected_triple(p, q, r, t);
  set_thread_count(0);
  CHECK(a == b);
}

TEST_CASE("magnetic translation") {
  const std::size_t n = 64;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.4, 1.4);

  SUBCASE("identity and coherent state") {
    const FockVector v = random_unit(rng, n, 10);
    CHECK(magnetic_translate(v, 0.0) == v);
    const FockVector c = magnetic_translate(FockVector::basis(n, 0), -1.0);
    for (std::size_t m = 0; m < 20; ++m)
      CHECK(std::abs(c[m] - std::exp(-0.5 - 0.5 * std::lgamma(m + 1.0))) < 1e-14);
  }
  SUBCASE("unitarity and inner products") {
    for (int i = 0; i < 10; ++i) {
      const FockVector a = random_unit(rng, n, 10), b = random_unit(rng, n, 10);
      const cplx alpha(u(rng), u(rng));
      const FockVector ra = magnetic_translate(a, alpha), rb = magnetic_translate(b, alpha);
      CHECK(std::abs(l2_norm(ra) - 1.0) < 1e-8);
      CHECK(std::abs(std::abs(inner(ra, rb)) - std::abs(inner(a, b))) < 1e-8);
    }
  }
  SUBCASE("composition phase") {
    for (int i = 0; i < 10; ++i) {
      const FockVector a = random_unit(rng, n, 10);
      const cplx x(u(rng), u(rng)), y(u(rng), u(rng));
      const FockVector lhs = magnetic_translate(magnetic_translate(a, y), x);
      const FockVector rhs = translation_composition_phase(x, y) * magnetic_translate(a, x + y);
      CHECK(l2_norm(lhs - rhs) < 1e-10);
    }
  }
  SUBCASE("dense-matrix oracle") {
    const cplx alpha(0.8, -0.5);
    const auto m = dense_translation(n, 8, alpha);
    const FockVector a = random_unit(rng, n, 8);
    std::vector<cplx> expect(n, 0.0);
    for (std::size_t j = 0; j < 8; ++j)
      for (std::size_t k = 0; k < n; ++k) expect[k] += m[j][k] * a[j];
    CHECK(l2_norm(magnetic_translate(a, alpha) - FockVector(expect)) < 1e-12);
  }
  SUBCASE("pointwise definition") {
    const FockVector a = random_unit(rng, n, 6);
    const cplx alpha(0.6, 0.9);
    const FockVector ra = magnetic_translate(a, alpha);
    for (int i = 0; i < 6; ++i) {
      const cplx z(u(rng), u(rng));
      const cplx expect =
          evaluate(a, z + alpha) * std::exp((std::conj(z) * alpha - z * std::conj(alpha)) / 2.0);
      CHECK(std::abs(evaluate(ra, z) - expect) < 1e-12);
    }
  }
  SUBCASE("resolution failure") {
    CHECK_THROWS_AS(magnetic_translate(FockVector::basis(16, 0), 5.0), ResolutionError);
  }
}

TEST_CASE("rotation and harmonic propagator") {
  const std::size_t n = 24;
  std::mt19937_64 rng(12);
  const FockVector a = random_unit(rng, n, n);
  CHECK(rotate(a, 0.0) == a);
  CHECK(l2_norm(rotate(FockVector::basis(n, 1), pi) + FockVector::basis(n, 1)) < 1e-15);
  const cplx z(0.4, -0.7);
  CHECK(std::abs(evaluate(rotate(a, 0.9), z) - evaluate(a, std::polar(1.0, 0.9) * z)) < 1e-10);

  CHECK(harmonic_propagate(a, 0.0) == a);
  CHECK(std::abs(l2_norm(harmonic_propagate(a, 1.7)) - 1.0) < 1e-14);
  for (double tau : {0.3, 1.1, -2.5}) {
    // e^{iτH} = e^{2iτ} L_{2τ}
    const FockVector lhs = harmonic_propagate(a, -tau);
    const FockVector rhs = std::polar(1.0, 2.0 * tau) * rotate(a, 2.0 * tau);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(lhs[k] - rhs[k]) < 1e-12);
  }
}

TEST_CASE("conserved quantities") {
  const std::size_t n = 24;
  const TrilinearKernelTable t(n);
  const FockVector e0 = FockVector::basis(n, 0), zero(n);
  const auto c0 = conserved_quantities(e0, zero, t);
  CHECK(c0.mass_u == 1.0);
  CHECK(c0.mass_v == 0.0);
  CHECK(c0.hamiltonian == 0.0);
  CHECK(c0.p_minus == 0.0);
  CHECK(c0.q_minus == cplx(0.0));
  CHECK(conserved_quantities(FockVector::basis(n, 1), zero, t).p_minus == doctest::Approx(1.0));
  CHECK(conserved_quantities(e0, e0, t).hamiltonian == doctest::Approx(1.0 / (2 * pi)).epsilon(1e-13));

  // Coefficient formulas against 2D quadrature of their defining integrals.
  std::mt19937_64 rng(31);
  const PolarGrid grid = PolarGrid::for_truncation(n);
  for (int i = 0; i < 3; ++i) {
    const FockVector u = random_unit(rng, n, 10), v = random_unit(rng, n, 10);
    const auto uz = evaluate_on_grid(u, grid), vz = evaluate_on_grid(v, grid);
    std::vector<double> h(grid.size()), p(grid.size());
    std::vector<cplx> q(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const cplx z = grid.point(j);
      const double diff = std::norm(uz[j]) - std::norm(vz[j]);
      h[j] = std::norm(uz[j]) * std::norm(vz[j]);
      p[j] = (std::norm(z) - 1.0) * diff;
      q[j] = z * diff;
    }
    const auto c = conserved_quantities(u, v, t);
    CHECK(std::abs(c.hamiltonian - grid.integrate(h)) < 1e-10);
    CHECK(std::abs(c.p_minus - grid.integrate(p)) < 1e-10);
    CHECK(std::abs(c.q_minus - grid.integrate(q)) < 1e-10);
  }
}

TEST_CASE("interaction of translated Gaussians decays like e^{-d^2/4}") {
  const std::size_t n = 96;
  const PolarGrid grid = PolarGrid::for_truncation(n);
  std::vector<double> d2, logsup;
  for (double d : {1.0, 2.0, 3.0, 4.0}) {
    const FockVector a = magnetic_translate(FockVector::basis(n, 0), cplx(d / 2, 0));
    const FockVector b = magnetic_translate(FockVector::basis(n, 0), cplx(-d / 2, 0));
    const auto az = evaluate_on_grid(a, grid), bz = evaluate_on_grid(b, grid);
    double sup = 0.0;
    for (std::size_t i = 0; i < az.size(); ++i) sup = std::max(sup, std::abs(az[i] * bz[i]));
    d2.push_back(d * d);
    logsup.push_back(std::log(sup));
  }
  CHECK(-fit_line(d2, logsup).slope >= 0.24);
}

TEST_CASE("projector is bounded on exponentially weighted spaces") {
  const std::size_t n = 20;
  const TrilinearKernelTable t(n);
  const PolarGrid grid = PolarGrid::for_truncation(n, 6.0);
  std::mt19937_64 rng(2);
  for (double kappa : {0.5, 1.0}) {
    const RadialWeightTable w(WeightSpec::exponential(kappa), n);
    for (int i = 0; i < 4; ++i) {
      const FockVector p = random_unit(rng, n, 5), q = random_unit(rng, n, 5), r = random_unit(rng, n, 5);
      const auto pz = evaluate_on_grid(p, grid), qz = evaluate_on_grid(q, grid),
                 rz = evaluate_on_grid(r, grid);
      std::vector<double> f(grid.size());
      for (std::size_t j = 0; j < f.size(); ++j)
        f[j] = std::exp(2 * kappa * std::abs(grid.point(j))) * std::norm(pz[j] * std::conj(qz[j]) * rz[j]);
      const double lhs = weighted_l2_norm(projected_triple(p, q, r, t), w);
      CHECK(lhs <= 2.0 * std::exp(kappa * kappa / 2.0) * std::sqrt(grid.integrate(f)));
    }
  }
}
