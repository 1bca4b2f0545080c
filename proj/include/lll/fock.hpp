#pragma once

// Truncated Fock-basis representation of the Bargmann-Fock space:
// u(z) = Σ_{n<N} c_n φ_n(z),  φ_n(z) = z^n e^{-|z|²/2} / sqrt(π n!).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "lll/quadrature.hpp"

namespace lll {

using cplx = std::complex<double>;

/// Resolution threshold for the tail-mass certificate.
inline constexpr double kDefaultTailTolerance = 1e-10;
/// Guard for the tail-mass ratio of the zero vector.
inline constexpr double kMassEpsilon = 1e-30;

class FockVector {
 public:
  FockVector() = default;
  /// Zero vector with n modes.
  explicit FockVector(std::size_t n);
  /// Throws NumericalError on NaN/Inf entries.
  explicit FockVector(std::vector<cplx> coeffs);

  static FockVector basis(std::size_t n, std::size_t index);
  /// φ_0^γ: c_m = e^{-|γ|²/2} γ^m / sqrt(m!).
  static FockVector coherent(std::size_t n, cplx gamma);

  std::size_t size() const { return coeffs_.size(); }
  const cplx& operator[](std::size_t i) const { return coeffs_[i]; }
  std::span<const cplx> coeffs() const { return coeffs_; }

  /// Zero-padded (or truncated) copy with n modes.
  FockVector resized(std::size_t n) const;

  /// Σ|c_n|².
  double mass() const;
  /// |c_{N-1}|² / max(mass, ε_mass).
  double tail_mass() const;
  bool resolved(double tail_tol = kDefaultTailTolerance) const {
    return tail_mass() <= tail_tol;
  }

  FockVector& operator+=(const FockVector& other);
  FockVector& operator-=(const FockVector& other);
  FockVector& operator*=(cplx s);

  friend FockVector operator+(FockVector a, const FockVector& b) { return a += b; }
  friend FockVector operator-(FockVector a, const FockVector& b) { return a -= b; }
  friend FockVector operator*(cplx s, FockVector a) { return a *= s; }
  friend FockVector operator*(FockVector a, cplx s) { return a *= s; }
  friend bool operator==(const FockVector&, const FockVector&) = default;

 private:
  std::vector<cplx> coeffs_;
};

/// Σ a_n conj(b_n), i.e. ∫ a b̄ dL.
cplx inner(const FockVector& a, const FockVector& b);

double l2_norm(const FockVector& u);

/// Throws DimensionError when sizes differ.
void require_same_size(const FockVector& a, const FockVector& b, const char* where);

/// ln n!, tabulated for n < count.
std::vector<double> log_factorials(std::size_t count);

// ---------------------------------------------------------------------------
// Radial weights

struct WeightSpec {
  enum class Kind { Polynomial, Exponential };
  Kind kind = Kind::Exponential;
  double value = 0.0;  // s for ⟨z⟩^s, κ for e^{κ|z|}

  static WeightSpec trivial() { return {Kind::Exponential, 0.0}; }
  static WeightSpec polynomial(double s);
  static WeightSpec exponential(double kappa);

  /// The weight applied to |u|², e.g. (1+r²)^s or e^{2κr}, as a logarithm.
  double log_squared_weight(double r) const;
  bool is_trivial() const { return value == 0.0; }

  friend bool operator==(const WeightSpec&, const WeightSpec&) = default;
};

/// I_n = ∫ weight(|z|) |φ_n(z)|² dL for n < N. Radial weights keep the
/// weighted norm diagonal in the Fock basis.
class RadialWeightTable {
 public:
  RadialWeightTable(WeightSpec weight, std::size_t n);

  const WeightSpec& weight() const { return weight_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t n) const { return values_[n]; }

 private:
  WeightSpec weight_;
  std::vector<double> values_;
};

/// sqrt(Σ |c_n|² I_n). Throws DimensionError when the table does not match.
double weighted_l2_norm(const FockVector& u, const WeightSpec& w,
                        const RadialWeightTable& table);
double weighted_l2_norm(const FockVector& u, const RadialWeightTable& table);

/// ‖⟨z⟩u‖₂ / sqrt(Σ 2(n+1)|c_n|²): empirical ratio of the weighted-L² and
/// harmonic-Sobolev norms for s = 1. `table` must be built for polynomial s=1.
double norm_equivalence_ratio(const FockVector& u, const RadialWeightTable& table);

// ---------------------------------------------------------------------------
// Pointwise values and L^p norms

/// u(z), with per-term magnitudes formed in log space so large |z| underflows
/// gracefully instead of overflowing.
cplx evaluate(const FockVector& u, cplx z);

/// Values of u on every point of a polar grid, ring-major.
std::vector<cplx> evaluate_on_grid(const FockVector& u, const PolarGrid& grid);

struct SupGrid {
  double radius = 0.0;
  std::size_t rings = 0;   // uniform radii in [0, radius], origin included
  std::size_t angles = 0;
  double tolerance = 1e-9;  // relative slack allowed over the Carlen bound

  /// Disk covering R²/2 ≥ ln(‖u‖/tol) plus the bulk of N modes.
  static SupGrid for_vector(const FockVector& u, double tol = 1e-16);
};

struct SupEstimate {
  double value = 0.0;
  double carlen_bound = 0.0;  // π^{-1/2} ‖u‖₂
  bool flagged = false;       // grid sup exceeded the bound beyond tolerance
};

SupEstimate sup_norm_estimate(const FockVector& u, const SupGrid& grid);

/// L^p norm by polar quadrature (p = +inf uses sup_norm_estimate). Throws
/// NumericalError when two grid resolutions disagree.
double lp_norm(const FockVector& u, double p);

struct CarlenCheck {
  double lhs = 0.0;  // (q/2π)^{1/q} ‖u‖_q
  double rhs = 0.0;  // (p/2π)^{1/p} ‖u‖_p
  bool holds = false;
  explicit operator bool() const { return holds; }
};

/// Hypercontractivity comparison for 1 ≤ p ≤ q ≤ ∞.
CarlenCheck carlen_check(const FockVector& u, double p, double q, double tol = 1e-8);

}  // namespace lll
