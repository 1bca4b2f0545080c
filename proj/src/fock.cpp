#include "lll/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lll/errors.hpp"

namespace lll {

namespace {

constexpr double kLogSqrtPi = 0.57236494292470008707;  // ln sqrt(π)

void require_finite(const std::vector<cplx>& coeffs) {
  for (const auto& c : coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw NumericalError("FockVector: non-finite coefficient");
}

// e^{i k 2π/m} for k < m.
std::vector<cplx> roots_of_unity(std::size_t m) {
  std::vector<cplx> w(m);
  for (std::size_t k = 0; k < m; ++k)
    w[k] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) /
                               static_cast<double>(m));
  return w;
}

// Σ_n c_n ρ_n(r) e^{inθ_j} on one ring with equispaced angles.
void ring_values(const FockVector& u, double r, const std::vector<double>& lf,
                 const std::vector<cplx>& roots, std::vector<cplx>& radial,
                 cplx* out) {
  const std::size_t n_modes = u.size();
  const std::size_t m = roots.size();
  if (r == 0.0) {
    const cplx v = n_modes > 0 ? u[0] / std::sqrt(std::numbers::pi) : cplx{};
    std::fill(out, out + m, v);
    return;
  }
  const double log_r = std::log(r);
  for (std::size_t n = 0; n < n_modes; ++n) {
    const double nn = static_cast<double>(n);
    radial[n] = u[n] * std::exp(nn * log_r - 0.5 * r * r - 0.5 * lf[n] - kLogSqrtPi);
  }
  for (std::size_t j = 0; j < m; ++j) {
    cplx acc = 0.0;
    std::size_t idx = 0;
    for (std::size_t n = 0; n < n_modes; ++n) {
      acc += radial[n] * roots[idx];
      idx += j;
      if (idx >= m) idx %= m;
    }
    out[j] = acc;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

FockVector::FockVector(std::size_t n) : coeffs_(n, cplx{}) {}

FockVector::FockVector(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  require_finite(coeffs_);
}

FockVector FockVector::basis(std::size_t n, std::size_t index) {
  if (index >= n) throw DimensionError("FockVector::basis: index outside truncation");
  FockVector v(n);
  v.coeffs_[index] = 1.0;
  return v;
}

FockVector FockVector::coherent(std::size_t n, cplx gamma) {
  std::vector<cplx> c(n);
  const double g = std::abs(gamma);
  const double arg = std::arg(gamma);
  const auto lf = log_factorials(n);
  for (std::size_t m = 0; m < n; ++m) {
    if (g == 0.0) {
      c[m] = m == 0 ? 1.0 : 0.0;
      continue;
    }
    const double mm = static_cast<double>(m);
    c[m] = std::polar(std::exp(-0.5 * g * g + mm * std::log(g) - 0.5 * lf[m]), mm * arg);
  }
  return FockVector(std::move(c));
}

FockVector FockVector::resized(std::size_t n) const {
  std::vector<cplx> c(n, cplx{});
  std::copy_n(coeffs_.begin(), std::min(n, coeffs_.size()), c.begin());
  return FockVector(std::move(c));
}

double FockVector::mass() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m += std::norm(c);
  return m;
}

double FockVector::tail_mass() const {
  if (coeffs_.empty()) return 0.0;
  return std::norm(coeffs_.back()) / std::max(mass(), kMassEpsilon);
}

FockVector& FockVector::operator+=(const FockVector& other) {
  require_same_size(*this, other, "FockVector::operator+=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

FockVector& FockVector::operator-=(const FockVector& other) {
  require_same_size(*this, other, "FockVector::operator-=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

FockVector& FockVector::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

cplx inner(const FockVector& a, const FockVector& b) {
  require_same_size(a, b, "inner");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
  return acc;
}

double l2_norm(const FockVector& u) { return std::sqrt(u.mass()); }

void require_same_size(const FockVector& a, const FockVector& b, const char* where) {
  if (a.size() != b.size())
    throw DimensionError(std::string(where) + ": truncation mismatch (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

std::vector<double> log_factorials(std::size_t count) {
  std::vector<double> lf(count);
  for (std::size_t n = 0; n < count; ++n) lf[n] = std::lgamma(static_cast<double>(n) + 1.0);
  return lf;
}

// ---------------------------------------------------------------------------

WeightSpec WeightSpec::polynomial(double s) {
  if (!(s >= 0.0)) throw PreconditionError("WeightSpec: s must be >= 0");
  return {Kind::Polynomial, s};
}

WeightSpec WeightSpec::exponential(double kappa) {
  if (!(kappa >= 0.0)) throw PreconditionError("WeightSpec: kappa must be >= 0");
  return {Kind::Exponential, kappa};
}

double WeightSpec::log_squared_weight(double r) const {
  return kind == Kind::Polynomial ? value * std::log1p(r * r) : 2.0 * value * r;
}

RadialWeightTable::RadialWeightTable(WeightSpec weight, std::size_t n)
    : weight_(weight), values_(n, 1.0) {
  if (weight_.value < 0.0) throw PreconditionError("RadialWeightTable: negative weight");
  if (weight_.is_trivial()) return;
  const double kappa = weight_.kind == WeightSpec::Kind::Exponential ? weight_.value : 0.0;
  const double radius = std::sqrt(2.0 * static_cast<double>(n)) + 12.0 + 2.0 * kappa +
                        (weight_.kind == WeightSpec::Kind::Polynomial ? weight_.value : 0.0);
  const auto lf = log_factorials(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    auto integrand = [&](double r) {
      if (r <= 0.0) return 0.0;
      return std::exp(std::numbers::ln2 + (2.0 * kk + 1.0) * std::log(r) - r * r - lf[k] +
                      weight_.log_squared_weight(r));
    };
    // Split at the peak of r^{2k+1} e^{-r²} so the adaptive rule sees the bump.
    const double peak = std::min(radius, std::sqrt(kk + 0.5) + kappa);
    values_[k] = adaptive_integral(integrand, 0.0, peak) +
                 adaptive_integral(integrand, peak, radius);
  }
}

double weighted_l2_norm(const FockVector& u, const WeightSpec& w,
                        const RadialWeightTable& table) {
  if (!(table.weight() == w))
    throw DimensionError("weighted_l2_norm: table built for a different weight");
  return weighted_l2_norm(u, table);
}

double weighted_l2_norm(const FockVector& u, const RadialWeightTable& table) {
  if (table.size() != u.size())
    throw DimensionError("weighted_l2_norm: table built for a different truncation");
  double acc = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) acc += std::norm(u[n]) * table[n];
  return std::sqrt(acc);
}

double norm_equivalence_ratio(const FockVector& u, const RadialWeightTable& table) {
  if (!(table.weight() == WeightSpec::polynomial(1.0)))
    throw DimensionError("norm_equivalence_ratio: needs the s = 1 polynomial table");
  double sobolev = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n)
    sobolev += 2.0 * (static_cast<double>(n) + 1.0) * std::norm(u[n]);
  if (sobolev == 0.0) return 1.0;
  return weighted_l2_norm(u, table) / std::sqrt(sobolev);
}

// ---------------------------------------------------------------------------

cplx evaluate(const FockVector& u, cplx z) {
  const double r = std::abs(z);
  if (u.size() == 0) return 0.0;
  if (r == 0.0) return u[0] / std::sqrt(std::numbers::pi);
  const double log_r = std::log(r);
  const double theta = std::arg(z);
  const auto lf = log_factorials(u.size());
  cplx acc = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (u[n] == cplx{}) continue;
    const double nn = static_cast<double>(n);
    const double log_mag = nn * log_r - 0.5 * r * r - 0.5 * lf[n] - kLogSqrtPi;
    acc += u[n] * std::polar(std::exp(log_mag), nn * theta);
  }
  return acc;
}

std::vector<cplx> evaluate_on_grid(const FockVector& u, const PolarGrid& grid) {
  const auto lf = log_factorials(u.size());
  const auto roots = roots_of_unity(grid.angular_size());
  std::vector<cplx> out(grid.size());
  std::vector<cplx> radial(u.size());
  for (std::size_t ring = 0; ring < grid.radial_size(); ++ring)
    ring_values(u, grid.r(ring), lf, roots, radial, out.data() + ring * grid.angular_size());
  return out;
}

SupGrid SupGrid::for_vector(const FockVector& u, double tol) {
  SupGrid g;
  const double n = static_cast<double>(std::max<std::size_t>(u.size(), 1));
  const double norm = l2_norm(u);
  const double tail_radius = norm > tol ? std::sqrt(2.0 * std::log(norm / tol)) : 0.0;
  g.radius = std::max(std::sqrt(2.0 * n) + 6.0, tail_radius);
  g.rings = static_cast<std::size_t>(std::ceil(16.0 * g.radius)) + 1;
  g.angles = std::max<std::size_t>(64, 8 * u.size());
  return g;
}

SupEstimate sup_norm_estimate(const FockVector& u, const SupGrid& grid) {
  if (grid.rings < 2 || grid.angles == 0 || !(grid.radius > 0.0))
    throw PreconditionError("sup_norm_estimate: degenerate sampling grid");
  const auto lf = log_factorials(u.size());
  const auto roots = roots_of_unity(grid.angles);
  std::vector<cplx> radial(u.size());
  std::vector<cplx> ring(grid.angles);
  SupEstimate est;
  for (std::size_t i = 0; i < grid.rings; ++i) {
    const double r = grid.radius * static_cast<double>(i) / static_cast<double>(grid.rings - 1);
    ring_values(u, r, lf, roots, radial, ring.data());
    for (const auto& v : ring) est.value = std::max(est.value, std::abs(v));
  }
  est.carlen_bound = l2_norm(u) / std::sqrt(std::numbers::pi);
  est.flagged = est.value > est.carlen_bound * (1.0 + grid.tolerance) + 1e-300;
  return est;
}

namespace {

double lp_norm_on(const FockVector& u, double p, const PolarGrid& grid) {
  const auto values = evaluate_on_grid(u, grid);
  std::vector<double> integrand(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) integrand[i] = std::pow(std::abs(values[i]), p);
  return std::pow(grid.integrate(integrand), 1.0 / p);
}

}  // namespace

double lp_norm(const FockVector& u, double p) {
  if (!(p >= 1.0)) throw PreconditionError("lp_norm: p must be >= 1");
  if (std::isinf(p)) return sup_norm_estimate(u, SupGrid::for_vector(u)).value;
  const std::size_t n = std::max<std::size_t>(u.size(), 4);
  const PolarGrid coarse = PolarGrid::for_truncation(n);
  double prev = lp_norm_on(u, p, coarse);
  std::size_t radial = coarse.radial_size(), angular = coarse.angular_size();
  for (int level = 0; level < 5; ++level) {
    radial = radial * 3 / 2 + 20;
    angular *= 2;
    const double next = lp_norm_on(u, p, PolarGrid(coarse.radius() + 4.0, radial, angular));
    if (std::abs(next - prev) <= 1e-9 * std::max(next, 1e-300) + 1e-300) return next;
    prev = next;
  }
  throw NumericalError("lp_norm: polar quadrature not converged for p = " + std::to_string(p));
}

CarlenCheck carlen_check(const FockVector& u, double p, double q, double tol) {
  if (!(p >= 1.0) || !(q >= p)) throw PreconditionError("carlen_check: need 1 <= p <= q");
  auto factor = [](double x) {
    return std::isinf(x) ? 1.0 : std::pow(x / (2.0 * std::numbers::pi), 1.0 / x);
  };
  CarlenCheck out;
  out.lhs = factor(q) * lp_norm(u, q);
  out.rhs = factor(p) * lp_norm(u, p);
  out.holds = out.lhs <= out.rhs * (1.0 + tol) + 1e-300;
  return out;
}

}  // namespace lll
