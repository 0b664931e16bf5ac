#pragma once

#include <vector>

#include "tl/transfer.hpp"

namespace tl {

inline constexpr Complex kDefaultProbe{0.93, 0.41};
inline constexpr Complex kSecondProbe{0.71, -0.52};

/// T^pm_0 = R^pm_{0N} ... R^pm_{01} as a program on the given layout.
FactorProgram asymptotic_program(Asymptote sign, const ModelParams& params, const ChainLayout& layout);

/// Dense T^pm_0 on aux (x) quantum.
Matrix build_t_asymptotic(Asymptote sign, const ModelParams& params);

/// Auxiliary block (i, j), 0-based, of an operator on aux (x) quantum.
Matrix aux_block(const Matrix& op, int i, int j, Index quantum_dim);

struct SymmetryReport {
  double commutator = 0.0;
  double lemma1 = 0.0;
  double lemma2 = 0.0;
  /// max_{i>j} ||T+_ij psi|| / ||psi||; filled by the highest-weight check.
  double lower_triangular = 0.0;
  /// max_i ||T+_ii psi - h_i psi|| / ||psi||.
  double diagonal = 0.0;
  std::vector<Complex> weights;
  double tolerance = 1e-9;

  double worst() const;
  bool pass() const { return worst() <= tolerance; }
};

/// max_{i,j,u} |[T^pm_ij, t(u)]| / (|T^pm| |t(u)|) for both signs, plus
/// the two lemmas, evaluated on random vectors where dense matrices would be
/// large.
SymmetryReport check_symmetry(const ModelParams& params, const std::vector<Complex>& probes, std::uint64_t seed,
                              double tolerance = 1e-9);

/// Residual of [R^pm_12 T^pm_1, T_2(u) T^_2(u)] on random vectors.
double lemma1_residual(Asymptote sign, Complex u, const ModelParams& params, std::uint64_t seed);

/// max |M_1^{-1} ((R^pm)^{-1})^{t_2} M_1 (R^pm)^{t_2} - I|.
double lemma2_residual(Asymptote sign, const ModelParams& params);

/// Connected components of the nonzero pattern of a square matrix. The
/// transfer matrices conserve the total magnetisation, so these are small.
std::vector<std::vector<Index>> sparsity_blocks(const Matrix& op);

struct DegeneracyResult {
  int nullity = 0;
  bool ambiguous = false;
};

/// Nullity of t - lambda I by blockwise full-pivot LU with threshold
/// rank_tol * max(largest pivot, |lambda|).
DegeneracyResult measure_degeneracy_detail(const Matrix& t, Complex lambda, double rank_tol = 1e-8);

int measure_degeneracy(const TransferEval& t_eval, Complex lambda, double rank_tol = 1e-8);

/// Eigenvalues of a transfer matrix, computed blockwise.
std::vector<Complex> transfer_eigenvalues(const Matrix& t);

struct EigenCluster {
  Complex value;
  int count;
};

/// Groups eigenvalues within rel_tol * max|lambda| of each other.
std::vector<EigenCluster> cluster_eigenvalues(const std::vector<Complex>& values, double rel_tol = 1e-7);

/// Spectrum of t at two probe points, used to pin down Bethe roots in
/// sectors where the Bethe equations alone leave a continuous family.
struct SpectralAnchor {
  Complex u0;
  Complex u1;
  std::vector<EigenCluster> at_u0;
  std::vector<Complex> at_u1;

  bool is_eigenvalue_at_u1(Complex lambda, double rel_tol = 1e-7) const;
};

SpectralAnchor make_spectral_anchor(ChainKind kind, const ModelParams& params, Complex u0 = kDefaultProbe,
                                    Complex u1 = kSecondProbe);

}  // namespace tl
