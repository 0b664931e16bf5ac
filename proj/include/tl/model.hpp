#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tl/types.hpp"

namespace tl {

/// Parses "1/2", "3/2", "1", "0.5", "1.5" into twice the spin.
int parse_twice_spin(std::string_view text);

/// Inverse of parse_twice_spin: 1 -> "1/2", 2 -> "1", 3 -> "3/2".
std::string format_spin(int twice_spin);

/// Chain length, spin, deformation parameters and inhomogeneities.
///
/// q is the primary parameter. big_q solves [2s+1]_Q = -(q + 1/q) and is
/// chosen by solve_big_q; thetas default to 1.
struct ModelParams {
  int n_sites = 2;
  int twice_spin = 1;
  Complex q{0.5, 0.0};
  Complex big_q{-2.0, 0.0};
  std::vector<Complex> thetas;

  /// Builds a consistent parameter set with homogeneous thetas.
  static ModelParams make(int n_sites, int twice_spin, Complex q, int q_branch = 0);

  int site_dim() const { return twice_spin + 1; }
  Index quantum_dim() const;
  double spin() const { return 0.5 * twice_spin; }
  bool homogeneous() const;

  /// Throws DomainError if Q is inconsistent with q or a theta vanishes.
  void validate() const;

  ModelParams with_thetas(std::vector<Complex> new_thetas) const;
};

Complex coupling_c(Complex q);

/// Roots of sum_{k=-s}^{s} Q^{2k} = c(q), largest modulus first, ties
/// broken by smallest principal argument.
std::vector<Complex> big_q_roots(Complex q, int twice_spin);

/// One root of the Q-polynomial; branch 0 is the default rule above.
Complex solve_big_q(Complex q, int twice_spin, int branch = 0);

/// sum_{k=-s}^{s} Q^{2k}, i.e. the q-number [2s+1]_Q.
Complex q_number(Complex big_q, int twice_spin);

Complex omega(Complex u);
Complex zeta(Complex u, Complex q);

/// (-1)^x on the principal branch, e^{i pi x}.
Complex signed_power(double exponent);

/// g(u) = (-1)^{2s+1} omega(u/q).
Complex fusion_g(Complex u, const ModelParams& params);

/// Product of quantum determinants f(u) for the open chain.
Complex fusion_f(Complex u, const ModelParams& params);

/// F(u) of the open-chain functional relations, closed form.
Complex fusion_F(Complex u, const ModelParams& params);

/// F(u) of the closed-chain functional relations.
Complex closed_fusion_F(Complex u, const ModelParams& params);

/// Random inhomogeneities with modulus in [0.8, 1.25], rejecting ratios
/// close to q^k for |k| <= 2.
std::vector<Complex> random_generic_thetas(int n_sites, Complex q, std::mt19937_64& rng);

/// Seed for all randomness; TL_LAB_SEED overrides the fallback.
std::uint64_t default_seed(std::uint64_t fallback = 20160601);

}  // namespace tl
