#include "lll/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "lll/errors.hpp"

namespace lll {

GaussRule gauss_legendre(std::size_t points, double a, double b) {
  if (points == 0) throw PreconditionError("gauss_legendre: need at least one point");
  GaussRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  const std::size_t n = points;
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

PolarGrid::PolarGrid(double radius, std::size_t radial_points, std::size_t angular_points)
    : radius_(radius), n_theta_(angular_points) {
  if (!(radius > 0.0) || radial_points == 0 || angular_points == 0)
    throw PreconditionError("PolarGrid: radius and point counts must be positive");
  auto rule = gauss_legendre(radial_points, 0.0, radius);
  radial_ = std::move(rule.nodes);
  radial_weights_.resize(radial_.size());
  for (std::size_t i = 0; i < radial_.size(); ++i)
    radial_weights_[i] = rule.weights[i] * radial_[i];
}

PolarGrid PolarGrid::for_truncation(std::size_t n, double extra_radius) {
  const double radius = std::sqrt(2.0 * static_cast<double>(n)) + 12.0 + extra_radius;
  const std::size_t radial = 2 * n + 80 + static_cast<std::size_t>(4.0 * extra_radius);
  return PolarGrid(radius, radial, 4 * n);
}

double PolarGrid::theta(std::size_t j) const {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_theta_);
}

std::complex<double> PolarGrid::point(std::size_t i) const {
  return std::polar(radial_[i / n_theta_], theta(i % n_theta_));
}

double PolarGrid::weight(std::size_t i) const {
  return radial_weights_[i / n_theta_] * 2.0 * std::numbers::pi /
         static_cast<double>(n_theta_);
}

std::vector<std::complex<double>> PolarGrid::sample(
    const std::function<std::complex<double>(std::complex<double>)>& f) const {
  std::vector<std::complex<double>> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(point(i));
  return out;
}

std::complex<double> PolarGrid::integrate(
    const std::vector<std::complex<double>>& samples) const {
  if (samples.size() != size()) throw DimensionError("PolarGrid: sample count mismatch");
  std::complex<double> total = 0.0;
  for (std::size_t ring = 0; ring < radial_.size(); ++ring) {
    std::complex<double> ring_sum = 0.0;
    for (std::size_t j = 0; j < n_theta_; ++j) ring_sum += samples[ring * n_theta_ + j];
    total += ring_sum * radial_weights_[ring];
  }
  return total * (2.0 * std::numbers::pi / static_cast<double>(n_theta_));
}

double PolarGrid::integrate(const std::vector<double>& samples) const {
  if (samples.size() != size()) throw DimensionError("PolarGrid: sample count mismatch");
  double total = 0.0;
  for (std::size_t ring = 0; ring < radial_.size(); ++ring) {
    double ring_sum = 0.0;
    for (std::size_t j = 0; j < n_theta_; ++j) ring_sum += samples[ring * n_theta_ + j];
    total += ring_sum * radial_weights_[ring];
  }
  return total * (2.0 * std::numbers::pi / static_cast<double>(n_theta_));
}

double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                         double rel_tol) {
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, rel_tol,
                                                                    &error);
  if (!std::isfinite(value) || error > 1e3 * rel_tol * std::abs(value) + 1e-300)
    throw NumericalError("adaptive_integral: quadrature did not converge");
  return value;
}

}  // namespace lll
