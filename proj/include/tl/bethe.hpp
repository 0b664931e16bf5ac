#pragma once

#include <optional>
#include <vector>

#include "tl/model.hpp"

namespace tl {

using Roots = std::vector<Complex>;

/// Bethe roots plus, for the closed chain, the twist and its Z_N label.
struct BetheSolution {
  Roots roots;
  ChainKind kind = ChainKind::open;
  Complex kappa{1.0, 0.0};
  int sector = 0;
  double residual_norm = 0.0;

  int size() const { return static_cast<int>(roots.size()); }
};

struct LambdaSample {
  Complex u;
  Complex value;
};

/// One distinct eigenvalue of the transfer matrix.
struct SpectralLine {
  BetheSolution solution;
  std::vector<LambdaSample> lambda_samples;
  std::optional<Complex> energy;
  std::optional<int> degeneracy_predicted;
  int degeneracy_measured = 0;
  bool degeneracy_ambiguous = false;
  std::optional<Complex> shift_eigenvalue;
};

struct ADPair {
  Complex a;
  Complex d;
};

/// a(u), d(u) with the inhomogeneities of params. kappa is ignored for the
/// open chain.
ADPair eval_a_d(Complex u, const ModelParams& params, ChainKind kind, Complex kappa = {1.0, 0.0});

/// Open: prod omega(u/u_k) omega(u q u_k). Closed: prod omega(u/u_k).
Complex eval_q_function(Complex u, const Roots& roots, ChainKind kind, Complex q);

/// a(u) Q(u/q)/Q(u) + d(u) Q(uq)/Q(u). Throws DomainError within 1e-8 of
/// a pole.
Complex eval_lambda(Complex u, const BetheSolution& solution, const ModelParams& params);

/// Convenience for the homogeneous open chain.
Complex eval_lambda_open(Complex u, const Roots& roots, const ModelParams& params);

/// Both sides of the denominator-cleared Bethe equation for root k.
struct ResidualTerms {
  Complex lhs;
  Complex rhs;
};

std::vector<ResidualTerms> bethe_residual_terms(const BetheSolution& solution, const ModelParams& params);

/// lhs - rhs per root. Open chain: cleared form of the homogeneous Bethe
/// equations. Closed chain: cleared form with the solution's kappa.
std::vector<Complex> bethe_residuals(const BetheSolution& solution, const ModelParams& params);

/// Same residuals computed from the rescaled roots u q^{1/2}.
std::vector<Complex> bethe_residuals_rescaled(const BetheSolution& solution, const ModelParams& params);

/// max_k |lhs - rhs| / (|lhs| + |rhs|).
double scaled_residual_norm(const BetheSolution& solution, const ModelParams& params);

/// Energy of the open-chain Hamiltonian on the Bethe state.
Complex energy(const BetheSolution& solution, const ModelParams& params);

/// d Lambda(v; roots) / d u_i for the homogeneous open chain, by
/// forward-mode differentiation.
Complex lambda_partial(Complex v, const Roots& roots, int i, const ModelParams& params);

/// Coefficient of |..., u at slot k, ...> in the off-shell action.
Complex offshell_coefficient(Complex u, const Roots& values, int k, const ModelParams& params);

/// e^{2 pi i l/N} (-1)^{-sN} prod omega(u_j)/omega(q u_j).
Complex twist_from_roots(const Roots& roots, int l, const ModelParams& params);

/// kappa (-1)^{sN} prod omega(q u_j)/omega(u_j).
Complex shift_eigenvalue(const Roots& roots, Complex kappa, const ModelParams& params);

}  // namespace tl
