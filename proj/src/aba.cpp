#include "tl/aba.hpp"

#include <algorithm>
#include <limits>

namespace tl {

namespace {

Vector aux_apply(const FactorProgram& program, const ModelParams& params, int in_aux, int out_aux, const Vector& v,
                 bool transpose) {
  const Index qdim = params.quantum_dim();
  Matrix work = Matrix::Zero(params.site_dim() * qdim, 1);
  work.middleRows(in_aux * qdim, qdim) = v;
  if (transpose) {
    program.apply_transpose(work);
  } else {
    program.apply(work);
  }
  return work.middleRows(out_aux * qdim, qdim);
}

double condition(const Matrix& m) {
  if (m.size() == 0) return 1.0;
  const Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / s(s.size() - 1);
}

Complex big_q_power(const ModelParams& params) { return std::pow(params.big_q, params.twice_spin); }

}  // namespace

Matrix DoubleRowOperators::block(int i, int j) const {
  if (i < 0 || j < 0 || i >= site_dim || j >= site_dim) throw DomainError("DoubleRowOperators: block out of range");
  return full.block(i * quantum_dim, j * quantum_dim, quantum_dim, quantum_dim);
}

Matrix DoubleRowOperators::reassemble() const {
  Matrix out(site_dim * quantum_dim, site_dim * quantum_dim);
  for (int i = 0; i < site_dim; ++i) {
    for (int j = 0; j < site_dim; ++j) out.block(i * quantum_dim, j * quantum_dim, quantum_dim, quantum_dim) = block(i, j);
  }
  return out;
}

DoubleRowOperators extract_double_row(Complex u, const ModelParams& params) {
  return {params.site_dim(), params.quantum_dim(),
          double_row_program(u, params, ChainLayout::standard(params)).dense()};
}

Vector reference_state(const ModelParams& params) {
  Vector v = Vector::Zero(params.quantum_dim());
  v(0) = 1.0;
  return v;
}

Vector apply_B(Complex u, const ModelParams& params, const Vector& v) {
  const auto program = double_row_program(u, params, ChainLayout::standard(params));
  return aux_apply(program, params, params.site_dim() - 1, 0, v, false);
}

Vector apply_C_transpose(Complex u, const ModelParams& params, const Vector& v) {
  const auto program = double_row_program(u, params, ChainLayout::standard(params));
  return aux_apply(program, params, params.site_dim() - 1, 0, v, true);
}

BetheVector build_bethe_vector(const Roots& values, const ModelParams& params, bool dual) {
  Vector v = reference_state(params);
  if (dual) {
    for (const auto& u : values) v = apply_C_transpose(u, params, v);
  } else {
    for (auto it = values.rbegin(); it != values.rend(); ++it) v = apply_B(*it, params, v);
  }
  return {values, v, dual};
}

OffshellReport offshell_residual(Complex u, const Roots& values, const ModelParams& params) {
  for (const auto& v : values) {
    if (std::abs(u - v) < 1e-8 * std::max(1.0, std::abs(v))) throw DomainError("offshell_residual: u coincides with a value");
  }
  const Complex lambda = eval_lambda_open(u, values, params);
  std::vector<Complex> coeffs;
  for (int k = 0; k < static_cast<int>(values.size()); ++k) coeffs.push_back(offshell_coefficient(u, values, k, params));

  OffshellReport report;
  for (const auto& c : coeffs) report.max_unwanted = std::max(report.max_unwanted, std::abs(c));
  for (const bool dual : {false, true}) {
    const Vector v = build_bethe_vector(values, params, dual).vector;
    const Vector tv = apply_transfer(ChainKind::open, u, params, v, dual);
    Vector rhs = lambda * v;
    for (std::size_t k = 0; k < values.size(); ++k) {
      Roots swapped(values);
      swapped[k] = u;
      rhs += coeffs[k] * build_bethe_vector(swapped, params, dual).vector;
    }
    const double scale = tv.norm();
    const double residual = scale == 0.0 ? (tv - rhs).norm() : (tv - rhs).norm() / scale;
    (dual ? report.dual_residual : report.residual) = residual;
  }
  return report;
}

SymmetryReport check_highest_weight(const BetheSolution& solution, const ModelParams& params, double tolerance) {
  const Vector psi = build_bethe_vector(solution.roots, params).vector;
  const double psi_norm = psi.norm();
  if (psi_norm <= 1e-300) throw DomainError("check_highest_weight: Bethe vector vanishes");
  const auto program = asymptotic_program(Asymptote::plus, params, ChainLayout::standard(params));
  const int d = params.site_dim();
  SymmetryReport report;
  report.tolerance = tolerance;
  for (int j = 0; j < d; ++j) {
    const Vector column = [&] {
      const Index qdim = params.quantum_dim();
      Matrix work = Matrix::Zero(d * qdim, 1);
      work.middleRows(j * qdim, qdim) = psi;
      program.apply(work);
      return Vector(work.col(0));
    }();
    const Index qdim = params.quantum_dim();
    for (int i = j; i < d; ++i) {
      const Vector tij = column.segment(i * qdim, qdim);
      if (i > j) {
        report.lower_triangular = std::max(report.lower_triangular, tij.norm() / psi_norm);
      } else {
        const Complex h = psi.dot(tij) / psi.squaredNorm();
        report.weights.push_back(h);
        report.diagonal = std::max(report.diagonal, (tij - h * psi).norm() / (psi_norm * std::max(1.0, std::abs(h))));
      }
    }
  }
  return report;
}

DeterminantValue scalar_product_det(const Roots& on_shell, const Roots& off_shell, const ModelParams& params) {
  if (on_shell.size() != off_shell.size()) throw DomainError("scalar_product_det: need equal numbers of u and v");
  const Complex q = params.q;
  const int n = params.n_sites;
  const auto m = static_cast<Index>(on_shell.size());
  const auto& u = on_shell;
  const auto& v = off_shell;
  Complex pre = std::pow(1.0 / (2.0 * big_q_power(params)), static_cast<int>(m));
  for (Index i = 0; i < m; ++i) {
    const Complex ui = u[static_cast<std::size_t>(i)];
    const Complex vi = v[static_cast<std::size_t>(i)];
    pre *= std::pow(omega(ui), 2 * n) * ui * omega(ui * ui) / (omega(ui * ui * q) * omega(vi * vi * q * q));
    for (Index j = 0; j < i; ++j) {
      const Complex uj = u[static_cast<std::size_t>(j)];
      pre *= omega(ui * uj * q * q) / omega(ui * uj);
    }
  }
  Matrix numerator(m, m);
  Matrix cauchy(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      numerator(i, j) = lambda_partial(v[static_cast<std::size_t>(j)], u, static_cast<int>(i), params);
      const Complex den = omega(v[static_cast<std::size_t>(i)] / u[static_cast<std::size_t>(j)]) *
                          omega(v[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)] * q);
      if (std::abs(den) < 1e-14) throw DomainError("scalar_product_det: v_i coincides with u_j");
      cauchy(i, j) = 1.0 / den;
    }
  }
  const Complex den_det = m == 0 ? Complex{1.0, 0.0} : Eigen::FullPivLU<Matrix>(cauchy).determinant();
  if (std::abs(den_det) == 0.0) throw DomainError("scalar_product_det: singular Cauchy determinant");
  const Complex num_det = m == 0 ? Complex{1.0, 0.0} : Eigen::FullPivLU<Matrix>(numerator).determinant();
  return {pre * num_det / den_det, condition(numerator), condition(cauchy)};
}

DeterminantValue norm_squared(const BetheSolution& solution, const ModelParams& params) {
  const Complex q = params.q;
  const int n = params.n_sites;
  const auto& u = solution.roots;
  const auto m = static_cast<Index>(u.size());
  Complex pre = std::pow(omega(q) * omega(-q * q) / big_q_power(params), static_cast<int>(m));
  for (Index i = 0; i < m; ++i) {
    const Complex ui = u[static_cast<std::size_t>(i)];
    pre *= std::pow(omega(ui), 4 * n) * std::pow(omega(ui * ui), 2);
    for (Index j = 0; j < i; ++j) {
      const Complex uj = u[static_cast<std::size_t>(j)];
      pre *= omega(ui * uj * q * q) /
             (omega(uj / ui) * omega(ui / uj) * omega(ui * uj) * std::pow(omega(ui * uj * q), 2));
    }
  }
  Matrix g(m, m);
  for (Index i = 0; i < m; ++i) {
    const Complex ui = u[static_cast<std::size_t>(i)];
    for (Index j = 0; j < m; ++j) {
      const Complex uj = u[static_cast<std::size_t>(j)];
      Complex num{1.0, 0.0};
      for (Index k = 0; k < m; ++k) {
        if (k == i || k == j) continue;
        const Complex uk = u[static_cast<std::size_t>(k)];
        num *= omega(uj * q / uk) * omega(uj * uk * q * q);
      }
      Complex entry = num / (omega(uj / (ui * q)) * omega(ui * uj));
      if (i == j) {
        Complex sum{0.0, 0.0};
        for (Index k = 0; k < m; ++k) {
          if (k == i) continue;
          const Complex uk = u[static_cast<std::size_t>(k)];
          sum += 1.0 / (omega(ui / (q * uk)) * omega(ui * q / uk)) + 1.0 / (omega(ui * uk) * omega(ui * uk * q * q));
        }
        const Complex bracket = omega(q) * omega(ui * ui) / (omega(q * q) * std::pow(omega(ui * ui * q), 2)) *
                                (-2.0 * n * omega(q) / (omega(ui) * omega(ui * q)) + omega(q * q) * sum);
        entry *= bracket;
      }
      g(i, j) = entry;
    }
  }
  const Complex det = m == 0 ? Complex{1.0, 0.0} : Eigen::FullPivLU<Matrix>(g).determinant();
  return {pre * det, condition(g), 1.0};
}

Complex direct_scalar_product(const Roots& on_shell, const Roots& off_shell, const ModelParams& params) {
  const Vector left = build_bethe_vector(on_shell, params, true).vector;
  const Vector right = build_bethe_vector(off_shell, params, false).vector;
  return left.transpose() * right;
}

LimitCheck extrapolate_norm(const Roots& on_shell, const ModelParams& params) {
  auto at = [&](double eps) {
    Roots v(on_shell);
    for (auto& z : v) z *= 1.0 + eps;
    return scalar_product_det(on_shell, v, params).value;
  };
  const Complex f3 = at(1e-4);
  const Complex f4 = at(1e-5);
  const Complex f5 = at(1e-6);
  const Complex coarse = (10.0 * f4 - f3) / 9.0;
  const Complex fine = (10.0 * f5 - f4) / 9.0;
  return {fine, coarse, relative_error(fine, coarse)};
}

}  // namespace tl
