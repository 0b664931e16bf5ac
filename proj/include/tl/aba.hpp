#pragma once

#include <vector>

#include "tl/bethe.hpp"
#include "tl/symmetry.hpp"

namespace tl {

/// Auxiliary-space blocks of the double-row monodromy T_0(u) T^_0(u).
struct DoubleRowOperators {
  int site_dim = 2;
  Index quantum_dim = 1;
  Matrix full;

  /// 0-based auxiliary indices.
  Matrix block(int i, int j) const;
  Matrix B() const { return block(0, site_dim - 1); }
  Matrix C() const { return block(site_dim - 1, 0); }
  /// Rebuilds the full operator from the grid of blocks.
  Matrix reassemble() const;
};

DoubleRowOperators extract_double_row(Complex u, const ModelParams& params);

/// e_1^{(x) N}. The dual state is the same vector read as a row.
Vector reference_state(const ModelParams& params);

/// B(u) v without forming B densely.
Vector apply_B(Complex u, const ModelParams& params, const Vector& v);

/// C(u)^T v, so that (C(u)^T v)^T = v^T C(u).
Vector apply_C_transpose(Complex u, const ModelParams& params, const Vector& v);

struct BetheVector {
  Roots values;
  Vector vector;
  bool dual = false;

  bool vanishes(double tol = 1e-12) const { return vector.norm() <= tol; }
};

/// B(u_1) ... B(u_M)|0>, or for dual = true the column w with
/// w^T = <0| C(u_1) ... C(u_M).
BetheVector build_bethe_vector(const Roots& values, const ModelParams& params, bool dual = false);

struct OffshellReport {
  double residual = 0.0;
  double dual_residual = 0.0;
  double max_unwanted = 0.0;
};

/// Relative residual of the off-shell action of t(u) on the Bethe vector
/// and on its dual.
OffshellReport offshell_residual(Complex u, const Roots& values, const ModelParams& params);

/// Lower-triangular and diagonal residuals of T^+ on an on-shell Bethe
/// vector; the weights h_i are Rayleigh quotients.
SymmetryReport check_highest_weight(const BetheSolution& solution, const ModelParams& params, double tolerance = 1e-8);

struct DeterminantValue {
  Complex value;
  double condition_numerator = 0.0;
  double condition_denominator = 0.0;
};

/// Determinant formula for <u_1..u_M | v_1..v_M> with u on shell.
DeterminantValue scalar_product_det(const Roots& on_shell, const Roots& off_shell, const ModelParams& params);

/// Gaudin-type formula for <u|u>.
DeterminantValue norm_squared(const BetheSolution& solution, const ModelParams& params);

/// <0| prod C(u) prod B(v) |0> by direct contraction.
Complex direct_scalar_product(const Roots& on_shell, const Roots& off_shell, const ModelParams& params);

struct LimitCheck {
  Complex extrapolated;
  Complex previous;
  double relative_change = 0.0;
};

/// Richardson extrapolation of scalar_product_det(u, u(1+eps)) over
/// eps = 1e-4, 1e-5, 1e-6.
LimitCheck extrapolate_norm(const Roots& on_shell, const ModelParams& params);

}  // namespace tl
