#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lll/errors.hpp"
#include "lll/fock.hpp"
#include "lll/quadrature.hpp"

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

// 2D quadrature of ∫ weight(|z|) |u(z)|² dL, independent of the radial tables.
double grid_weighted_mass(const FockVector& u, const WeightSpec& w, const PolarGrid& grid) {
  const auto vals = evaluate_on_grid(u, grid);
  std::vector<double> f(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    f[i] = std::exp(w.log_squared_weight(std::abs(grid.point(i)))) * std::norm(vals[i]);
  return grid.integrate(f);
}

}  // namespace

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  const GaussRule g = gauss_legendre(8, -1.0, 2.0);
  double s = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], 15);
  CHECK(s == doctest::Approx((std::pow(2.0, 16) - 1.0) / 16.0).epsilon(1e-13));
}

TEST_CASE("FockVector construction and arithmetic") {
  CHECK_THROWS_AS(FockVector(std::vector<cplx>{1.0, cplx(NAN, 0)}), NumericalError);
  const FockVector a = FockVector::basis(4, 1);
  CHECK(a[1] == cplx(1.0));
  CHECK(a.mass() == 1.0);
  CHECK_THROWS_AS(FockVector::basis(4, 4), DimensionError);
  CHECK_THROWS_AS(a + FockVector(5), DimensionError);
  const FockVector r = a.resized(8);
  CHECK(r.size() == 8);
  CHECK(r[1] == cplx(1.0));
  CHECK(r.resized(4) == a);
}

TEST_CASE("l2_norm examples") {
  CHECK(l2_norm(FockVector::basis(16, 0)) == 1.0);
  CHECK(l2_norm(FockVector(16)) == 0.0);
  CHECK(l2_norm(FockVector(std::vector<cplx>{0.6, cplx(0, 0.8)})) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("tail mass certificate") {
  CHECK(FockVector(8).tail_mass() == 0.0);
  CHECK(FockVector::basis(8, 0).resolved());
  CHECK_FALSE(FockVector::basis(8, 7).resolved());
  CHECK(FockVector::coherent(64, 2.0).resolved());
  CHECK_FALSE(FockVector::coherent(16, 3.0).resolved());
}

TEST_CASE("coherent coefficients") {
  const FockVector c = FockVector::coherent(32, cplx(0.3, -0.4));
  CHECK(c.mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(c[0] - std::exp(-0.125)) < 1e-15);
  CHECK(std::abs(c[2] - std::exp(-0.125) * std::pow(cplx(0.3, -0.4), 2) / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("evaluate") {
  CHECK(std::abs(evaluate(FockVector::basis(8, 0), 0.0) - 1.0 / std::sqrt(pi)) < 1e-15);
  CHECK(std::abs(evaluate(FockVector::basis(8, 1), 0.0)) == 0.0);
  const FockVector c = FockVector::coherent(64, 1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    const cplx z(u(rng), u(rng));
    const cplx exact = std::exp(-std::norm(z) / 2.0 - 0.5 + z) / std::sqrt(pi);
    CHECK(std::abs(evaluate(c, z) - exact) < 1e-13);
  }
  // Far from the origin the Gaussian wins instead of overflowing.
  CHECK(std::abs(evaluate(FockVector::basis(64, 63), cplx(60.0, 0.0))) < 1e-300);
}

TEST_CASE("Parseval on the polar grid") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 5; ++i) {
    const FockVector u = random_unit(rng, 48, 40);
    const PolarGrid grid = PolarGrid::for_truncation(48);
    CHECK(std::abs(grid_weighted_mass(u, WeightSpec::trivial(), grid) - 1.0) < 1e-6);
  }
}

TEST_CASE("weighted norms") {
  SUBCASE("trivial weight is the L2 norm") {
    std::mt19937_64 rng(5);
    const FockVector u = random_unit(rng, 32, 32);
    const RadialWeightTable t(WeightSpec::trivial(), 32);
    CHECK(weighted_l2_norm(u, t) == doctest::Approx(l2_norm(u)).epsilon(1e-12));
  }
  SUBCASE("bracket weight has I_n = n + 2") {
    const RadialWeightTable t(WeightSpec::polynomial(1.0), 40);
    for (std::size_t n = 0; n < 40; ++n) CHECK(t[n] == doctest::Approx(n + 2.0).epsilon(1e-12));
    CHECK(weighted_l2_norm(FockVector::basis(40, 0), t) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("integer s closed form: I_n = Σ_j C(s,j) (n+j)!/n!") {
    const RadialWeightTable t(WeightSpec::polynomial(2.0), 20);
    for (std::size_t n = 0; n < 20; ++n) {
      const double x = static_cast<double>(n);
      CHECK(t[n] == doctest::Approx(1.0 + 2.0 * (x + 1.0) + (x + 1.0) * (x + 2.0)).epsilon(1e-12));
    }
  }
  SUBCASE("exponential weight on phi_0") {
    const RadialWeightTable t(WeightSpec::exponential(1.0), 16);
    const double exact = 1.0 + std::numbers::e * std::sqrt(pi) * (1.0 + std::erf(1.0));
    CHECK(t[0] == doctest::Approx(exact).epsilon(1e-12));
  }
  SUBCASE("radial reduction matches 2D quadrature") {
    std::mt19937_64 rng(8);
    for (const WeightSpec w : {WeightSpec::exponential(1.0), WeightSpec::polynomial(1.5)}) {
      const FockVector u = random_unit(rng, 32, 24);
      const RadialWeightTable t(w, 32);
      const PolarGrid grid = PolarGrid::for_truncation(32, 8.0);
      const double direct = std::sqrt(grid_weighted_mass(u, w, grid));
      CHECK(std::abs(weighted_l2_norm(u, w, t) - direct) / direct < 1e-6);
    }
  }
  SUBCASE("mismatched table") {
    const RadialWeightTable t(WeightSpec::exponential(1.0), 16);
    CHECK_THROWS_AS(weighted_l2_norm(FockVector(8), t), DimensionError);
    CHECK_THROWS_AS(weighted_l2_norm(FockVector(16), WeightSpec::polynomial(1.0), t), DimensionError);
  }
  SUBCASE("norm equivalence ratio stays in [0.1, 10]") {
    std::mt19937_64 rng(21);
    const RadialWeightTable t(WeightSpec::polynomial(1.0), 32);
    for (int i = 0; i < 20; ++i) {
      const double r = norm_equivalence_ratio(random_unit(rng, 32, 20), t);
      CHECK(r >= 0.1);
      CHECK(r <= 10.0);
    }
  }
}

TEST_CASE("sup norm and Carlen") {
  const FockVector p0 = FockVector::basis(32, 0);
  const SupEstimate e0 = sup_norm_estimate(p0, SupGrid::for_vector(p0));
  CHECK(std::abs(e0.value - 1.0 / std::sqrt(pi)) < 1e-8);
  CHECK_FALSE(e0.flagged);
  CHECK(sup_norm_estimate(FockVector(32), SupGrid::for_vector(FockVector(32))).value == 0.0);

  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const FockVector u = random_unit(rng, 32, 12);
    const SupEstimate e = sup_norm_estimate(u, SupGrid::for_vector(u));
    CHECK(e.value <= 1.0 / std::sqrt(pi) + 1e-6);
    CHECK_FALSE(e.flagged);
  }

  const CarlenCheck eq = carlen_check(p0, 2.0, INFINITY);
  CHECK(eq.holds);
  CHECK(std::abs(eq.lhs - eq.rhs) < 1e-8);
  CHECK(carlen_check(FockVector(32), 2.0, 4.0).holds);
  for (int i = 0; i < 5; ++i) {
    const FockVector u = random_unit(rng, 32, 12);
    CHECK(carlen_check(u, 2.0, 4.0).holds);
    CHECK(carlen_check(u, 2.0, 3.0).holds);
  }
  CHECK_THROWS_AS(carlen_check(p0, 4.0, 2.0), PreconditionError);
}

TEST_CASE("lp_norm of phi_0 matches the Gaussian closed form") {
  // ‖φ_0‖_p = (2π/p)^{1/p} π^{-1/2}
  const FockVector p0 = FockVector::basis(24, 0);
  for (double p : {1.0, 3.0, 4.0}) {
    const double exact = std::pow(pi, 1.0 / p - 0.5) * std::pow(2.0 / p, 1.0 / p);
    CHECK(lp_norm(p0, p) == doctest::Approx(exact).epsilon(1e-9));
  }
}
