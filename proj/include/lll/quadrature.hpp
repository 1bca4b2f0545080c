#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace lll {

/// Gauss-Legendre nodes and weights mapped to [a, b].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(std::size_t points, double a, double b);

/// Tensor grid on the disk |z| <= radius: Gauss-Legendre in r, equispaced in
/// angle. `weight(i)` already includes the polar Jacobian r dr dθ, so
/// Σ weight(i) f(z_i) approximates ∫ f dL.
class PolarGrid {
 public:
  PolarGrid(double radius, std::size_t radial_points, std::size_t angular_points);

  /// Grid sized for functions of the truncated space with N modes.
  static PolarGrid for_truncation(std::size_t n, double extra_radius = 0.0);

  std::size_t size() const { return radial_.size() * n_theta_; }
  std::size_t radial_size() const { return radial_.size(); }
  std::size_t angular_size() const { return n_theta_; }
  double radius() const { return radius_; }

  double r(std::size_t ring) const { return radial_[ring]; }
  double theta(std::size_t j) const;
  std::complex<double> point(std::size_t i) const;
  double weight(std::size_t i) const;

  /// Samples f at every grid point, ring-major.
  std::vector<std::complex<double>> sample(
      const std::function<std::complex<double>(std::complex<double>)>& f) const;

  /// ∫ f dL for samples laid out as by sample().
  std::complex<double> integrate(const std::vector<std::complex<double>>& samples) const;
  double integrate(const std::vector<double>& samples) const;

 private:
  double radius_;
  std::size_t n_theta_;
  std::vector<double> radial_;
  std::vector<double> radial_weights_;  // includes r
};

/// Adaptive Gauss-Kronrod integral of f on [a, b] to relative tolerance.
double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                         double rel_tol = 1e-12);

}  // namespace lll
