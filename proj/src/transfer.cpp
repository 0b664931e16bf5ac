#include "tl/transfer.hpp"

namespace tl {

namespace {

void require_domain(Complex u, const ModelParams& params) {
  if (u == Complex{0.0, 0.0}) throw DomainError("transfer: u = 0");
  if (static_cast<int>(params.thetas.size()) != params.n_sites) throw DomainError("transfer: thetas/n_sites mismatch");
}

Vector aux_weights(ChainKind kind, const ModelParams& params) {
  if (kind == ChainKind::closed) return Vector::Ones(params.site_dim());
  return build_crossing_matrices(params).M.diagonal();
}

}  // namespace

FactorProgram monodromy_program(Complex u, const ModelParams& params, const ChainLayout& layout) {
  require_domain(u, params);
  FactorProgram program(TlGenerator::make(params), layout.n_factors);
  for (int j = 1; j <= params.n_sites; ++j) {
    const Complex theta = params.thetas[static_cast<std::size_t>(j - 1)];
    program.push_R(layout.aux, layout.first_site + j - 1, u / theta, params.q);
  }
  return program;
}

FactorProgram dual_monodromy_program(Complex u, const ModelParams& params, const ChainLayout& layout) {
  require_domain(u, params);
  FactorProgram program(TlGenerator::make(params), layout.n_factors);
  for (int j = params.n_sites; j >= 1; --j) {
    const Complex theta = params.thetas[static_cast<std::size_t>(j - 1)];
    program.push_R(layout.first_site + j - 1, layout.aux, u * theta, params.q);
  }
  return program;
}

FactorProgram double_row_program(Complex u, const ModelParams& params, const ChainLayout& layout) {
  FactorProgram program = dual_monodromy_program(u, params, layout);
  program.append(monodromy_program(u, params, layout));
  return program;
}

Monodromy build_monodromy(Complex u, const ModelParams& params) {
  const auto layout = ChainLayout::standard(params);
  return {monodromy_program(u, params, layout).dense(), dual_monodromy_program(u, params, layout).dense()};
}

Matrix trace_aux(const Matrix& op, const Vector& weights, Index quantum_dim) {
  Matrix out = Matrix::Zero(quantum_dim, quantum_dim);
  for (Index a = 0; a < weights.size(); ++a) {
    out += weights(a) * op.block(a * quantum_dim, a * quantum_dim, quantum_dim, quantum_dim);
  }
  return out;
}

Matrix apply_transfer(ChainKind kind, Complex u, const ModelParams& params, const Matrix& states, bool transpose) {
  const Index qdim = params.quantum_dim();
  if (states.rows() != qdim) throw DomainError("apply_transfer: state dimension mismatch");
  const auto layout = ChainLayout::standard(params);
  const FactorProgram program =
      kind == ChainKind::open ? double_row_program(u, params, layout) : monodromy_program(u, params, layout);
  const Vector weights = aux_weights(kind, params);
  const int d = params.site_dim();

  Matrix result = Matrix::Zero(qdim, states.cols());
  Matrix work(d * qdim, states.cols());
  for (int a = 0; a < d; ++a) {
    work.setZero();
    work.middleRows(a * qdim, qdim) = states;
    if (transpose) {
      program.apply_transpose(work);
    } else {
      program.apply(work);
    }
    result += weights(a) * work.middleRows(a * qdim, qdim);
  }
  return result;
}

TransferEval build_transfer(ChainKind kind, Complex u, const ModelParams& params) {
  const Index qdim = params.quantum_dim();
  return TransferEval{u, apply_transfer(kind, u, params, Matrix::Identity(qdim, qdim)), kind, params.thetas};
}

TransferEval build_open_transfer(Complex u, const ModelParams& params) {
  return build_transfer(ChainKind::open, u, params);
}

TransferEval build_closed_transfer(Complex u, const ModelParams& params) {
  return build_transfer(ChainKind::closed, u, params);
}

Complex hamiltonian_alpha(const ModelParams& params) {
  const Complex q = params.q;
  return -1.0 / (4.0 * omega(q * q) * std::pow(omega(q), 2 * params.n_sites - 2));
}

Complex hamiltonian_beta(const ModelParams& params) {
  const Complex q = params.q;
  return omega(q) / omega(q * q) - 0.5 * params.n_sites * omega(q * q) / omega(q);
}

Matrix hamiltonian_from_transfer(const ModelParams& params, double step) {
  if (!params.homogeneous()) throw DomainError("hamiltonian_from_transfer: requires homogeneous thetas");
  auto central = [&](double h) {
    return ((build_open_transfer(1.0 + h, params).matrix - build_open_transfer(1.0 - h, params).matrix) /
            (2.0 * h))
        .eval();
  };
  const Matrix coarse = central(step);
  const Matrix fine = central(0.5 * step);
  const Matrix derivative = (4.0 * fine - coarse) / 3.0;
  const Index qdim = params.quantum_dim();
  return hamiltonian_alpha(params) * derivative + hamiltonian_beta(params) * Matrix::Identity(qdim, qdim);
}

}  // namespace tl
