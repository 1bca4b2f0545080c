#include "lll/operators.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "lll/errors.hpp"

namespace lll {

namespace {

constexpr char kCacheMagic[8] = {'L', 'L', 'L', 'K', 'E', 'R', 'N', '1'};
constexpr std::size_t kParallelThreshold = 48;

void require_finite_output(const std::vector<cplx>& out, const char* where) {
  for (const auto& c : out)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw NumericalError(std::string(where) + ": NaN/Inf in output");
}

}  // namespace

TrilinearKernelTable::TrilinearKernelTable(std::size_t n) : TrilinearKernelTable(n, true) {}

TrilinearKernelTable::TrilinearKernelTable(std::size_t n, bool fill_dense)
    : n_(n), log_factorial_(log_factorials(2 * n + 1)) {
  if (n == 0) throw DimensionError("TrilinearKernelTable: truncation must be positive");
  fill_binomials();
  log_coeffs_.assign(n_ * n_ * n_, std::numeric_limits<double>::quiet_NaN());
  if (!fill_dense) return;
  for (std::size_t k = 0; k < n_; ++k)
    for (std::size_t m = 0; m < n_; ++m)
      for (std::size_t nn = 0; nn < n_; ++nn) {
        if (m + nn < k || m + nn - k >= n_) continue;
        log_coeffs_[(k * n_ + m) * n_ + nn] = recompute(k, m, nn);
      }
}

void TrilinearKernelTable::fill_binomials() {
  const std::size_t s_count = 2 * n_ - 1;
  binom_root_.assign(s_count * n_, 0.0);
  for (std::size_t s = 0; s < s_count; ++s)
    for (std::size_t j = 0; j <= s && j < n_; ++j) {
      const double log_b = log_factorial_[s] - log_factorial_[j] - log_factorial_[s - j] -
                           static_cast<double>(s) * std::numbers::ln2;
      binom_root_[s * n_ + j] = std::exp(0.5 * log_b);
    }
}

double TrilinearKernelTable::recompute(std::size_t k, std::size_t m, std::size_t n) const {
  const std::size_t s = m + n;
  const std::size_t l = s - k;
  return log_factorial_[s] - static_cast<double>(s) * std::numbers::ln2 -
         0.5 * (log_factorial_[k] + log_factorial_[l] + log_factorial_[m] + log_factorial_[n]);
}

void TrilinearKernelTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("TrilinearKernelTable::save: cannot open " + path.string());
  const std::uint64_t n = n_;
  out.write(kCacheMagic, sizeof kCacheMagic);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(log_coeffs_.data()),
            static_cast<std::streamsize>(log_coeffs_.size() * sizeof(double)));
  if (!out) throw Error("TrilinearKernelTable::save: write failed");
}

TrilinearKernelTable TrilinearKernelTable::load(const std::filesystem::path& path,
                                                std::size_t n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("TrilinearKernelTable::load: cannot open " + path.string());
  char magic[sizeof kCacheMagic];
  std::uint64_t stored = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&stored), sizeof stored);
  if (!in || !std::equal(magic, magic + sizeof magic, kCacheMagic) || stored != n)
    throw NumericalError("TrilinearKernelTable::load: header does not match N = " +
                         std::to_string(n));
  TrilinearKernelTable table(n, false);
  in.read(reinterpret_cast<char*>(table.log_coeffs_.data()),
          static_cast<std::streamsize>(table.log_coeffs_.size() * sizeof(double)));
  if (!in) throw NumericalError("TrilinearKernelTable::load: truncated file");

  std::mt19937_64 rng(n);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int checked = 0; checked < 8;) {
    const std::size_t k = pick(rng), m = pick(rng), nn = pick(rng);
    if (m + nn < k || m + nn - k >= n) continue;
    const double want = table.recompute(k, m, nn);
    if (!(std::abs(table.log_coeff(k, m, nn) - want) <= 1e-12 * std::max(1.0, std::abs(want))))
      throw NumericalError("TrilinearKernelTable::load: integrity check failed");
    ++checked;
  }
  return table;
}

// ---------------------------------------------------------------------------

FockVector projected_triple(const FockVector& p, const FockVector& q, const FockVector& r,
                            const TrilinearKernelTable& table) {
  require_same_size(p, q, "projected_triple");
  require_same_size(p, r, "projected_triple");
  const std::size_t n = p.size();
  if (table.size() != n) throw DimensionError("projected_triple: kernel table size mismatch");

  std::vector<cplx> out(n);
  const auto N = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::ptrdiff_t ks = 0; ks < N; ++ks) {
    const auto k = static_cast<std::size_t>(ks);
    cplx acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      if (p[m] == cplx{}) continue;
      const std::size_t n_lo = k > m ? k - m : 0;
      const std::size_t n_hi = std::min(n, n + k - m);  // ℓ = m + nn − k < N
      for (std::size_t nn = n_lo; nn < n_hi; ++nn) {
        const std::size_t l = m + nn - k;
        acc += std::exp(table.log_coeff(k, m, nn)) * std::conj(q[l]) * p[m] * r[nn];
      }
    }
    out[k] = acc / (2.0 * std::numbers::pi);
  }
  require_finite_output(out, "projected_triple");
  return FockVector(std::move(out));
}

FockVector projected_triple_fast(const FockVector& p, const FockVector& q, const FockVector& r,
                                 const TrilinearKernelTable& table) {
  require_same_size(p, q, "projected_triple_fast");
  require_same_size(p, r, "projected_triple_fast");
  const std::size_t n = p.size();
  if (table.size() != n) throw DimensionError("projected_triple_fast: kernel table size mismatch");

  const std::size_t s_count = 2 * n - 1;
  std::vector<cplx> pair_sums(s_count);
  for (std::size_t s = 0; s < s_count; ++s) {
    const std::size_t m_lo = s >= n ? s - n + 1 : 0;
    const std::size_t m_hi = std::min(s, n - 1);
    cplx acc = 0.0;
    for (std::size_t m = m_lo; m <= m_hi; ++m) acc += table.binomial_root(s, m) * p[m] * r[s - m];
    pair_sums[s] = acc;
  }
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t l = 0; l < n; ++l)
      acc += table.binomial_root(k + l, k) * std::conj(q[l]) * pair_sums[k + l];
    out[k] = acc / (2.0 * std::numbers::pi);
  }
  require_finite_output(out, "projected_triple_fast");
  return FockVector(std::move(out));
}

FockVector projector_quadrature_oracle(const std::vector<cplx>& samples, const PolarGrid& grid,
                                       std::size_t modes) {
  if (samples.size() != grid.size())
    throw DimensionError("projector_quadrature_oracle: sample count mismatch");
  const auto lf = log_factorials(modes);
  const std::size_t m_theta = grid.angular_size();
  std::vector<cplx> out(modes);
  std::vector<cplx> harmonics(modes);
  for (std::size_t ring = 0; ring < grid.radial_size(); ++ring) {
    // Angular Fourier coefficients Σ_j f(r, θ_j) e^{−inθ_j} of this ring.
    std::fill(harmonics.begin(), harmonics.end(), cplx{});
    for (std::size_t j = 0; j < m_theta; ++j) {
      const cplx f = samples[ring * m_theta + j];
      if (f == cplx{}) continue;
      for (std::size_t k = 0; k < modes; ++k)
        harmonics[k] += f * std::polar(1.0, -static_cast<double>(k) * grid.theta(j));
    }
    const double r = grid.r(ring);
    // grid.weight() of any point on this ring; ring weights share the angle factor.
    const double w = grid.weight(ring * m_theta);
    for (std::size_t k = 0; k < modes; ++k) {
      const double kk = static_cast<double>(k);
      const double radial =
          std::exp(kk * std::log(r) - 0.5 * r * r - 0.5 * lf[k] - 0.5 * std::log(std::numbers::pi));
      out[k] += w * radial * harmonics[k];
    }
  }
  return FockVector(std::move(out));
}

// ---------------------------------------------------------------------------

FockVector magnetic_translate(const FockVector& u, cplx alpha, double tail_tol) {
  const std::size_t n = u.size();
  if (alpha == cplx{} || n == 0) return u;
  const double a = std::abs(alpha);
  const double log_a = std::log(a);
  const double quarter = 0.25 * a * a;  // e^{−|α|²/2} split over both passes
  const auto lf = log_factorials(n);

  // shift_mag[d] = d ln|α|; phases for α^d and (−ᾱ)^d.
  std::vector<cplx> fwd(n), bwd(n);
  const double arg = std::arg(alpha);
  for (std::size_t d = 0; d < n; ++d) {
    fwd[d] = std::polar(1.0, static_cast<double>(d) * arg);
    bwd[d] = std::polar(1.0, static_cast<double>(d) * (std::numbers::pi - arg));
  }
  auto weight = [&](std::size_t hi, std::size_t lo) {
    const std::size_t d = hi - lo;
    return std::exp(0.5 * (lf[hi] - lf[lo]) - lf[d] + static_cast<double>(d) * log_a - quarter);
  };

  // Taylor shift: f(z+α) in the scaled monomial basis z^j / sqrt(π j!).
  std::vector<cplx> shifted(n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx acc = 0.0;
    for (std::size_t m = j; m < n; ++m)
      if (u[m] != cplx{}) acc += u[m] * weight(m, j) * fwd[m - j];
    shifted[j] = acc;
  }
  // Cauchy product with e^{−ᾱz}, truncated at N.
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j <= k; ++j)
      if (shifted[j] != cplx{}) acc += shifted[j] * weight(k, j) * bwd[k - j];
    out[k] = acc;
  }
  require_finite_output(out, "magnetic_translate");
  FockVector result(std::move(out));
  if (result.tail_mass() > tail_tol) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "magnetic_translate: |alpha| = %g not resolved with N = %zu (tail mass %.3g)",
                  a, n, result.tail_mass());
    throw ResolutionError(msg);
  }
  return result;
}

cplx translation_composition_phase(cplx alpha, cplx beta) {
  return std::polar(1.0, std::imag(std::conj(alpha) * beta));
}

FockVector rotate(const FockVector& u, double theta) {
  std::vector<cplx> out(u.size());
  for (std::size_t n = 0; n < u.size(); ++n)
    out[n] = u[n] * std::polar(1.0, static_cast<double>(n) * theta);
  return FockVector(std::move(out));
}

FockVector harmonic_propagate(const FockVector& u, double tau) {
  std::vector<cplx> out(u.size());
  for (std::size_t n = 0; n < u.size(); ++n)
    out[n] = u[n] * std::polar(1.0, -2.0 * (static_cast<double>(n) + 1.0) * tau);
  return FockVector(std::move(out));
}

ConservedQuantities conserved_quantities(const FockVector& u, const FockVector& v,
                                         const TrilinearKernelTable& table) {
  require_same_size(u, v, "conserved_quantities");
  ConservedQuantities c;
  c.mass_u = u.mass();
  c.mass_v = v.mass();
  c.hamiltonian = std::real(inner(coupling(v, u, table), u));
  for (std::size_t n = 0; n < u.size(); ++n) {
    c.p_minus += static_cast<double>(n) * (std::norm(u[n]) - std::norm(v[n]));
    if (n + 1 < u.size())
      c.q_minus += std::sqrt(static_cast<double>(n) + 1.0) *
                   (std::conj(u[n + 1]) * u[n] - std::conj(v[n + 1]) * v[n]);
  }
  return c;
}

void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace lll
