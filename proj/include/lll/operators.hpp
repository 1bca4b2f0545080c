#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "lll/fock.hpp"
#include "lll/quadrature.hpp"

namespace lll {

/// Coefficients of the projected cubic term Π(p q̄ r) in the Fock basis.
///
/// With s = k + ℓ = m + n the kernel is
///   (1/2π) s! / (2^s sqrt(k! ℓ! m! n!))  =  (1/2π) sqrt(B(s,k)) sqrt(B(s,m)),
/// where B(s,j) = C(s,j) / 2^s. The table keeps both views: the dense log
/// coefficients L(k, m, n) (ℓ = m + n − k) used by the reference sum, and the
/// sqrt(B(s,j)) factors used by the O(N²) evaluation.
class TrilinearKernelTable {
 public:
  explicit TrilinearKernelTable(std::size_t n);

  std::size_t size() const { return n_; }

  /// ln[(k+ℓ)! / (2^{k+ℓ} sqrt(k! ℓ! m! n!))] with ℓ = m + n − k. Only
  /// meaningful when 0 <= ℓ < N.
  double log_coeff(std::size_t k, std::size_t m, std::size_t n) const {
    return log_coeffs_[(k * n_ + m) * n_ + n];
  }
  /// sqrt(C(s, j) / 2^s) for s < 2N − 1, j <= s, j < N.
  double binomial_root(std::size_t s, std::size_t j) const { return binom_root_[s * n_ + j]; }

  /// Writes the log coefficients to `path` (raw doubles after a small header).
  void save(const std::filesystem::path& path) const;
  /// Loads a cached table for truncation n; recomputes 8 pseudo-random
  /// entries and throws NumericalError if any disagrees.
  static TrilinearKernelTable load(const std::filesystem::path& path, std::size_t n);

 private:
  TrilinearKernelTable(std::size_t n, bool fill_dense);
  void fill_binomials();
  double recompute(std::size_t k, std::size_t m, std::size_t n) const;

  std::size_t n_;
  std::vector<double> log_factorial_;
  std::vector<double> log_coeffs_;
  std::vector<double> binom_root_;
};

/// Reference Π(p · conj(q) · r): the direct sum over (m, n) with ℓ = m+n−k,
/// accumulated in ascending (m, n) order for each output k.
FockVector projected_triple(const FockVector& p, const FockVector& q, const FockVector& r,
                            const TrilinearKernelTable& table);

/// Same operator evaluated through the binomial factorisation in O(N²):
/// A_s = Σ_{m+n=s} sqrt(B(s,m)) p_m r_n, out_k = (1/2π) Σ_ℓ sqrt(B(s,k)) q̄_ℓ A_s.
FockVector projected_triple_fast(const FockVector& p, const FockVector& q, const FockVector& r,
                                 const TrilinearKernelTable& table);

/// Π(|v|² u), the coupling term of the system.
inline FockVector coupling(const FockVector& v, const FockVector& u,
                           const TrilinearKernelTable& table) {
  return projected_triple_fast(v, v, u, table);
}

/// ⟨f, φ_n⟩ for n < modes, by quadrature of grid samples. Test oracle only.
FockVector projector_quadrature_oracle(const std::vector<cplx>& samples, const PolarGrid& grid,
                                       std::size_t modes);

/// R_α u (z) = u(z + α) e^{(z̄α − zᾱ)/2}. On analytic parts this is
/// f(z) ↦ f(z + α) e^{−zᾱ} e^{−|α|²/2}, computed as a Taylor shift followed
/// by a Cauchy product with the series of e^{−ᾱz}. Throws ResolutionError
/// when the result's tail mass exceeds `tail_tol`.
FockVector magnetic_translate(const FockVector& u, cplx alpha,
                              double tail_tol = kDefaultTailTolerance);

/// Phase relating the composition to a single translation:
/// R_α R_β = e^{i Im(ᾱβ)} R_{α+β}.
cplx translation_composition_phase(cplx alpha, cplx beta);

/// L_θ u (z) = u(e^{iθ} z): c_n ↦ e^{inθ} c_n.
FockVector rotate(const FockVector& u, double theta);

/// e^{−iτH} with H φ_n = 2(n+1) φ_n.
FockVector harmonic_propagate(const FockVector& u, double tau);

struct ConservedQuantities {
  double mass_u = 0.0;   // M(u)
  double mass_v = 0.0;   // M(v)
  double hamiltonian = 0.0;  // ∫|u|²|v|² dL
  double p_minus = 0.0;  // ∫(|z|²−1)(|u|²−|v|²) dL = Σ n(|c_n|² − |d_n|²)
  cplx q_minus = 0.0;    // ∫ z(|u|²−|v|²) dL = Σ sqrt(n+1)(c̄_{n+1}c_n − d̄_{n+1}d_n)
};

ConservedQuantities conserved_quantities(const FockVector& u, const FockVector& v,
                                         const TrilinearKernelTable& table);

/// Number of threads used by the parallel kernels (0 keeps the runtime default).
void set_thread_count(int threads);

}  // namespace lll
