#pragma once

#include <utility>
#include <vector>

#include "tl/model.hpp"

namespace tl {

/// Basis index j = 0..2s on one site carries magnetic label m = j - s.
struct SiteBasis {
  int twice_spin = 1;

  int dim() const { return twice_spin + 1; }
  double m_of(int index) const { return index - 0.5 * twice_spin; }
  /// Partner index with m_partner = -m.
  int partner(int index) const { return twice_spin - index; }
};

/// The TL generator X = x x^T on C^d (x) C^d, with x supported on the
/// pairs (j, 2s - j). Holds the d nonzero entries of x.
struct TlGenerator {
  int site_dim = 2;
  Vector x;

  static TlGenerator make(const ModelParams& params);
};

/// Dense X of size d^2 x d^2.
Matrix build_X(const ModelParams& params);

/// Permutation P on two factors of dimension d.
Matrix build_swap(int site_dim);

/// Identity on sites outside {i, i+1}; sites are 1-based, 1 <= i <= N-1.
Matrix embed_site_op(const Matrix& local, int site, const ModelParams& params);

/// Dense embedding of a two-factor operator acting on factors (first,
/// second) of an n_factors-fold product of C^d. Factor 0 is leftmost.
Matrix embed_two_factor(const Matrix& local, int first, int second, int n_factors, int site_dim);

/// Dense embedding of a one-factor operator.
Matrix embed_one_factor(const Matrix& local, int factor, int n_factors, int site_dim);

Matrix build_hamiltonian(const ModelParams& params);

/// R(u) = omega(uq) P + omega(u) P X.
Matrix build_R(Complex u, const ModelParams& params);

struct CrossingMatrices {
  Matrix V;
  Matrix M;
};

CrossingMatrices build_crossing_matrices(const ModelParams& params);

/// P^- = (-1)^{2s}/(2s+1) P X.
Matrix build_projector(const ModelParams& params);

enum class Asymptote { plus, minus };

/// R^+ = P(q + X), R^- = P(1/q + X).
Matrix build_R_asymptotic(Asymptote sign, const ModelParams& params);

/// Transpose on one factor (0 or 1) of a d^2 x d^2 matrix.
Matrix partial_transpose(const Matrix& op, int factor, int site_dim);

/// P op P for a d^2 x d^2 matrix: op_{21} from op_{12}.
Matrix swap_factors(const Matrix& op, int site_dim);

/// Sparse-in-structure program of Baxterized factors. Each step applies
/// P_{ab}(alpha + beta X_{ab}) on factors (a, b), in order. Applying a
/// step costs O(rows * cols), which keeps monodromy matrices out of GEMM.
class FactorProgram {
 public:
  struct Step {
    int first;
    int second;
    Complex alpha;
    Complex beta;
  };

  FactorProgram(TlGenerator generator, int n_factors);

  void push(int first, int second, Complex alpha, Complex beta);
  /// R_{ab}(u) = P_{ab}(omega(uq) + omega(u) X_{ab}).
  void push_R(int first, int second, Complex u, Complex q);
  void append(const FactorProgram& other);

  int n_factors() const { return n_factors_; }
  int site_dim() const { return generator_.site_dim; }
  Index dim() const;
  const std::vector<Step>& steps() const { return steps_; }

  /// state <- Op * state, columns treated independently.
  void apply(Eigen::Ref<Matrix> state) const;
  /// state <- Op^T * state.
  void apply_transpose(Eigen::Ref<Matrix> state) const;
  Matrix dense() const;

 private:
  void apply_step(const Step& step, Eigen::Ref<Matrix> state, bool transposed) const;

  TlGenerator generator_;
  int n_factors_;
  std::vector<Step> steps_;
};

}  // namespace tl
