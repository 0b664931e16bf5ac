#pragma once

#include <vector>

#include "tl/operators.hpp"

namespace tl {

/// Where the auxiliary space and the chain sit inside a tensor product.
/// The default layout is aux = factor 0, sites 1..N.
struct ChainLayout {
  int n_factors;
  int aux;
  int first_site;

  static ChainLayout standard(const ModelParams& params) { return {params.n_sites + 1, 0, 1}; }
};

/// T_0(u) = R_{0N}(u/theta_N) ... R_{01}(u/theta_1).
FactorProgram monodromy_program(Complex u, const ModelParams& params, const ChainLayout& layout);

/// T^_0(u) = R_{10}(u theta_1) ... R_{N0}(u theta_N).
FactorProgram dual_monodromy_program(Complex u, const ModelParams& params, const ChainLayout& layout);

/// T_0(u) T^_0(u).
FactorProgram double_row_program(Complex u, const ModelParams& params, const ChainLayout& layout);

struct Monodromy {
  Matrix T;
  Matrix T_hat;
};

/// Dense monodromy matrices on aux (x) quantum.
Monodromy build_monodromy(Complex u, const ModelParams& params);

struct TransferEval {
  Complex u;
  Matrix matrix;
  ChainKind kind;
  std::vector<Complex> thetas;
};

/// tr_0 M_0 T_0(u) T^_0(u).
TransferEval build_open_transfer(Complex u, const ModelParams& params);

/// tr_0 T_0(u).
TransferEval build_closed_transfer(Complex u, const ModelParams& params);

TransferEval build_transfer(ChainKind kind, Complex u, const ModelParams& params);

/// t(u) (or t(u)^T) applied to the columns of states.
Matrix apply_transfer(ChainKind kind, Complex u, const ModelParams& params, const Matrix& states,
                      bool transpose = false);

/// Partial trace over factor 0 with weights diag(weights): sum_a w_a <a|op|a>.
Matrix trace_aux(const Matrix& op, const Vector& weights, Index quantum_dim);

/// alpha and beta of H = alpha t'(1) + beta.
Complex hamiltonian_alpha(const ModelParams& params);
Complex hamiltonian_beta(const ModelParams& params);

/// alpha t'(1) + beta I with t'(1) from Richardson-extrapolated central
/// differences at step h.
Matrix hamiltonian_from_transfer(const ModelParams& params, double step = 1e-6);

}  // namespace tl
