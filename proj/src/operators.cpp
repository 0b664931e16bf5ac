#include "tl/operators.hpp"

#include <cmath>

namespace tl {

namespace {

Index int_pow(Index base, int exponent) {
  Index value = 1;
  for (int i = 0; i < exponent; ++i) value *= base;
  return value;
}

// Rows whose digits on both factors are zero; the d^2 rows of a pair
// block are base + j_first * stride_first + j_second * stride_second.
std::vector<Index> pair_bases(Index dim, Index stride_first, Index stride_second, int site_dim) {
  std::vector<Index> bases;
  bases.reserve(static_cast<std::size_t>(dim / (site_dim * site_dim)));
  for (Index row = 0; row < dim; ++row) {
    if ((row / stride_first) % site_dim == 0 && (row / stride_second) % site_dim == 0) bases.push_back(row);
  }
  return bases;
}

}  // namespace

TlGenerator TlGenerator::make(const ModelParams& params) {
  const SiteBasis basis{params.twice_spin};
  TlGenerator gen;
  gen.site_dim = basis.dim();
  gen.x.resize(gen.site_dim);
  const Complex log_q = std::log(params.big_q);
  for (int j = 0; j < gen.site_dim; ++j) {
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    gen.x(j) = sign * std::exp(basis.m_of(j) * log_q);
  }
  return gen;
}

Matrix build_X(const ModelParams& params) {
  const SiteBasis basis{params.twice_spin};
  const int d = basis.dim();
  Matrix x = Matrix::Zero(d * d, d * d);
  for (int j1 = 0; j1 < d; ++j1) {
    const int j2 = basis.partner(j1);
    for (int k1 = 0; k1 < d; ++k1) {
      const int k2 = basis.partner(k1);
      // m1 + m1' = j1 + k1 - 2s is an integer
      const double sign = (j1 - k1) % 2 == 0 ? 1.0 : -1.0;
      x(j1 * d + j2, k1 * d + k2) = sign * std::pow(params.big_q, j1 + k1 - params.twice_spin);
    }
  }
  return x;
}

Matrix build_swap(int site_dim) {
  const int d = site_dim;
  Matrix p = Matrix::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) p(a * d + b, b * d + a) = 1.0;
  }
  return p;
}

Matrix embed_two_factor(const Matrix& local, int first, int second, int n_factors, int site_dim) {
  const int d = site_dim;
  if (first == second || first < 0 || second < 0 || first >= n_factors || second >= n_factors) {
    throw DomainError("embed_two_factor: invalid factor pair");
  }
  if (local.rows() != d * d || local.cols() != d * d) throw DomainError("embed_two_factor: local operator must be d^2 x d^2");
  const Index dim = int_pow(d, n_factors);
  const Index sf = int_pow(d, n_factors - 1 - first);
  const Index ss = int_pow(d, n_factors - 1 - second);
  Matrix out = Matrix::Zero(dim, dim);
  for (Index col = 0; col < dim; ++col) {
    const int cf = static_cast<int>((col / sf) % d);
    const int cs = static_cast<int>((col / ss) % d);
    const Index base = col - cf * sf - cs * ss;
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        const Complex value = local(a * d + b, cf * d + cs);
        if (value != Complex{0.0, 0.0}) out(base + a * sf + b * ss, col) += value;
      }
    }
  }
  return out;
}

Matrix embed_one_factor(const Matrix& local, int factor, int n_factors, int site_dim) {
  const int d = site_dim;
  if (factor < 0 || factor >= n_factors) throw DomainError("embed_one_factor: invalid factor");
  const Index dim = int_pow(d, n_factors);
  const Index stride = int_pow(d, n_factors - 1 - factor);
  Matrix out = Matrix::Zero(dim, dim);
  for (Index col = 0; col < dim; ++col) {
    const int c = static_cast<int>((col / stride) % d);
    const Index base = col - c * stride;
    for (int a = 0; a < d; ++a) {
      const Complex value = local(a, c);
      if (value != Complex{0.0, 0.0}) out(base + a * stride, col) += value;
    }
  }
  return out;
}

Matrix embed_site_op(const Matrix& local, int site, const ModelParams& params) {
  if (site < 1 || site > params.n_sites - 1) throw DomainError("embed_site_op: site index out of range");
  return embed_two_factor(local, site - 1, site, params.n_sites, params.site_dim());
}

Matrix build_hamiltonian(const ModelParams& params) {
  if (params.n_sites < 2) throw DomainError("build_hamiltonian: need at least two sites");
  const Matrix x = build_X(params);
  Matrix h = Matrix::Zero(params.quantum_dim(), params.quantum_dim());
  for (int i = 1; i < params.n_sites; ++i) h += embed_site_op(x, i, params);
  return h;
}

Matrix build_R(Complex u, const ModelParams& params) {
  if (u == Complex{0.0, 0.0}) throw DomainError("build_R: u = 0");
  const Matrix p = build_swap(params.site_dim());
  return omega(u * params.q) * p + omega(u) * p * build_X(params);
}

CrossingMatrices build_crossing_matrices(const ModelParams& params) {
  const int d = params.site_dim();
  const double s = params.spin();
  const Complex log_q = std::log(params.big_q);
  CrossingMatrices out{Matrix::Zero(d, d), Matrix::Zero(d, d)};
  // 1-based: V_{jk} = (-1)^j Q^{s+1-j} delta_{j+k, 2s+2}
  for (int j = 1; j <= d; ++j) {
    const int k = params.twice_spin + 2 - j;
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    out.V(j - 1, k - 1) = sign * std::exp((s + 1.0 - j) * log_q);
  }
  const SiteBasis basis{params.twice_spin};
  for (int j = 0; j < d; ++j) out.M(j, j) = std::pow(params.big_q, static_cast<int>(std::lround(2.0 * basis.m_of(j))));
  return out;
}

Matrix build_projector(const ModelParams& params) {
  const double sign = params.twice_spin % 2 == 0 ? 1.0 : -1.0;
  return (sign / static_cast<double>(params.site_dim())) * build_swap(params.site_dim()) * build_X(params);
}

Matrix build_R_asymptotic(Asymptote sign, const ModelParams& params) {
  const int d = params.site_dim();
  const Complex shift = sign == Asymptote::plus ? params.q : 1.0 / params.q;
  return build_swap(d) * (shift * Matrix::Identity(d * d, d * d) + build_X(params));
}

Matrix partial_transpose(const Matrix& op, int factor, int site_dim) {
  const int d = site_dim;
  Matrix out(d * d, d * d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int c = 0; c < d; ++c) {
        for (int e = 0; e < d; ++e) {
          // (a b),(c e) -> swap the factor's row and column labels
          if (factor == 0) {
            out(c * d + b, a * d + e) = op(a * d + b, c * d + e);
          } else {
            out(a * d + e, c * d + b) = op(a * d + b, c * d + e);
          }
        }
      }
    }
  }
  return out;
}

Matrix swap_factors(const Matrix& op, int site_dim) {
  const Matrix p = build_swap(site_dim);
  return p * op * p;
}

FactorProgram::FactorProgram(TlGenerator generator, int n_factors)
    : generator_(std::move(generator)), n_factors_(n_factors) {
  if (n_factors_ < 2) throw DomainError("FactorProgram: need at least two factors");
}

void FactorProgram::push(int first, int second, Complex alpha, Complex beta) {
  if (first == second || first < 0 || second < 0 || first >= n_factors_ || second >= n_factors_) {
    throw DomainError("FactorProgram: invalid factor pair");
  }
  steps_.push_back(Step{first, second, alpha, beta});
}

void FactorProgram::push_R(int first, int second, Complex u, Complex q) {
  push(first, second, omega(u * q), omega(u));
}

void FactorProgram::append(const FactorProgram& other) {
  if (other.n_factors_ != n_factors_ || other.site_dim() != site_dim()) {
    throw DomainError("FactorProgram::append: incompatible programs");
  }
  steps_.insert(steps_.end(), other.steps_.begin(), other.steps_.end());
}

Index FactorProgram::dim() const { return int_pow(site_dim(), n_factors_); }

void FactorProgram::apply(Eigen::Ref<Matrix> state) const {
  if (state.rows() != dim()) throw DomainError("FactorProgram::apply: dimension mismatch");
  for (const auto& step : steps_) apply_step(step, state, false);
}

void FactorProgram::apply_transpose(Eigen::Ref<Matrix> state) const {
  if (state.rows() != dim()) throw DomainError("FactorProgram::apply_transpose: dimension mismatch");
  // (S_n ... S_1)^T = S_1^T ... S_n^T, so S_n^T acts first
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) apply_step(*it, state, true);
}

Matrix FactorProgram::dense() const {
  Matrix out = Matrix::Identity(dim(), dim());
  apply(out);
  return out;
}

void FactorProgram::apply_step(const Step& step, Eigen::Ref<Matrix> state, bool transposed) const {
  const int d = site_dim();
  const Index sf = int_pow(d, n_factors_ - 1 - step.first);
  const Index ss = int_pow(d, n_factors_ - 1 - step.second);
  const auto bases = pair_bases(dim(), sf, ss, d);
  const Vector& x = generator_.x;
  std::vector<Complex> block(static_cast<std::size_t>(d * d));

  for (Index col = 0; col < state.cols(); ++col) {
    for (const Index base : bases) {
      auto at = [&](int a, int b) -> Complex& { return state(base + a * sf + b * ss, col); };
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) block[static_cast<std::size_t>(a * d + b)] = at(a, b);
      }
      // in(a, b) = block[a * d + b]; partner(j) = d - 1 - j
      Complex proj{0.0, 0.0};
      for (int j = 0; j < d; ++j) {
        proj += transposed ? x(j) * block[static_cast<std::size_t>((d - 1 - j) * d + j)]
                           : x(j) * block[static_cast<std::size_t>(j * d + (d - 1 - j))];
      }
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          Complex value = step.alpha * block[static_cast<std::size_t>(b * d + a)];
          if (a == d - 1 - b) value += step.beta * (transposed ? x(a) : x(b)) * proj;
          at(a, b) = value;
        }
      }
    }
  }
}

}  // namespace tl
