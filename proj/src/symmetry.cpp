#include "tl/symmetry.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

namespace tl {

namespace {

Complex asymptotic_shift(Asymptote sign, Complex q) { return sign == Asymptote::plus ? q : 1.0 / q; }

Matrix random_block(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix out(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) out(r, c) = Complex{normal(rng), normal(rng)};
  }
  return out;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

double SymmetryReport::worst() const {
  return std::max({commutator, lemma1, lemma2, lower_triangular, diagonal});
}

FactorProgram asymptotic_program(Asymptote sign, const ModelParams& params, const ChainLayout& layout) {
  FactorProgram program(TlGenerator::make(params), layout.n_factors);
  const Complex shift = asymptotic_shift(sign, params.q);
  for (int j = 1; j <= params.n_sites; ++j) program.push(layout.aux, layout.first_site + j - 1, shift, 1.0);
  return program;
}

Matrix build_t_asymptotic(Asymptote sign, const ModelParams& params) {
  return asymptotic_program(sign, params, ChainLayout::standard(params)).dense();
}

Matrix aux_block(const Matrix& op, int i, int j, Index quantum_dim) {
  return op.block(i * quantum_dim, j * quantum_dim, quantum_dim, quantum_dim);
}

double lemma1_residual(Asymptote sign, Complex u, const ModelParams& params, std::uint64_t seed) {
  // factors: 0 and 1 auxiliary, sites 2..N+1
  const ChainLayout first{params.n_sites + 2, 0, 2};
  const ChainLayout second{params.n_sites + 2, 1, 2};
  FactorProgram lhs = asymptotic_program(sign, params, first);
  lhs.push(0, 1, asymptotic_shift(sign, params.q), 1.0);
  const FactorProgram rhs = double_row_program(u, params, second);

  const Matrix start = random_block(lhs.dim(), 4, seed);
  Matrix ab = start;
  rhs.apply(ab);
  lhs.apply(ab);
  Matrix ba = start;
  lhs.apply(ba);
  rhs.apply(ba);
  return max_abs(ab - ba) / std::max(max_abs(ab), max_abs(ba));
}

double lemma2_residual(Asymptote sign, const ModelParams& params) {
  const int d = params.site_dim();
  const Matrix r = build_R_asymptotic(sign, params);
  const Matrix m = build_crossing_matrices(params).M;
  const Matrix m1 = Eigen::kroneckerProduct(m, Matrix::Identity(d, d)).eval();
  const Matrix m1_inv = Eigen::kroneckerProduct(Matrix(m.inverse()), Matrix::Identity(d, d)).eval();
  const Matrix product =
      m1_inv * partial_transpose(r.inverse(), 1, d) * m1 * partial_transpose(r, 1, d);
  return max_abs(product - Matrix::Identity(d * d, d * d));
}

SymmetryReport check_symmetry(const ModelParams& params, const std::vector<Complex>& probes, std::uint64_t seed,
                              double tolerance) {
  SymmetryReport report;
  report.tolerance = tolerance;
  const Index qdim = params.quantum_dim();
  const int d = params.site_dim();
  for (const Asymptote sign : {Asymptote::plus, Asymptote::minus}) {
    const Matrix generators = build_t_asymptotic(sign, params);
    // Blocks that vanish up to roundoff would inflate a per-block ratio.
    const double g_norm = max_abs(generators);
    report.lemma2 = std::max(report.lemma2, lemma2_residual(sign, params));
    for (const Complex u : probes) {
      const Matrix t = build_open_transfer(u, params).matrix;
      const double t_norm = max_abs(t);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          const Matrix g = aux_block(generators, i, j, qdim);
          report.commutator = std::max(report.commutator, max_abs(g * t - t * g) / (g_norm * t_norm));
        }
      }
      report.lemma1 = std::max(report.lemma1, lemma1_residual(sign, u, params, seed++));
    }
  }
  return report;
}

std::vector<std::vector<Index>> sparsity_blocks(const Matrix& op) {
  const Index n = op.rows();
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      auto& p = parent[static_cast<std::size_t>(x)];
      p = parent[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  };
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < n; ++r) {
      if (op(r, c) != Complex{0.0, 0.0}) parent[static_cast<std::size_t>(find(r))] = find(c);
    }
  }
  std::vector<std::vector<Index>> blocks;
  std::vector<Index> slot(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const Index root = find(i);
    auto& s = slot[static_cast<std::size_t>(root)];
    if (s < 0) {
      s = static_cast<Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[static_cast<std::size_t>(s)].push_back(i);
  }
  return blocks;
}

namespace {

Matrix gather(const Matrix& op, const std::vector<Index>& idx) {
  const Index n = static_cast<Index>(idx.size());
  Matrix out(n, n);
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < n; ++r) out(r, c) = op(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
  }
  return out;
}

}  // namespace

DegeneracyResult measure_degeneracy_detail(const Matrix& t, Complex lambda, double rank_tol) {
  if (t.rows() != t.cols()) throw DomainError("measure_degeneracy: matrix must be square");
  std::vector<double> pivots;
  for (const auto& block : sparsity_blocks(t)) {
    Matrix shifted = gather(t, block);
    shifted.diagonal().array() -= lambda;
    const Eigen::FullPivLU<Matrix> lu(shifted);
    const auto diag = lu.matrixLU().diagonal();
    for (Index k = 0; k < diag.size(); ++k) pivots.push_back(std::abs(diag(k)));
  }
  // |lambda| floors the scale when t - lambda vanishes up to roundoff
  double largest = std::abs(lambda);
  for (const double p : pivots) largest = std::max(largest, p);
  const double threshold = rank_tol * largest;
  DegeneracyResult result;
  for (const double p : pivots) {
    if (p <= threshold) ++result.nullity;
    if (p > threshold / 10.0 && p < threshold * 10.0) result.ambiguous = true;
  }
  return result;
}

int measure_degeneracy(const TransferEval& t_eval, Complex lambda, double rank_tol) {
  return measure_degeneracy_detail(t_eval.matrix, lambda, rank_tol).nullity;
}

std::vector<Complex> transfer_eigenvalues(const Matrix& t) {
  std::vector<Complex> values;
  values.reserve(static_cast<std::size_t>(t.rows()));
  for (const auto& block : sparsity_blocks(t)) {
    const Eigen::ComplexEigenSolver<Matrix> solver(gather(t, block), false);
    if (solver.info() != Eigen::Success) throw SolverError("transfer_eigenvalues: eigensolver failed");
    for (Index k = 0; k < solver.eigenvalues().size(); ++k) values.push_back(solver.eigenvalues()(k));
  }
  return values;
}

std::vector<EigenCluster> cluster_eigenvalues(const std::vector<Complex>& values, double rel_tol) {
  double scale = 0.0;
  for (const auto& v : values) scale = std::max(scale, std::abs(v));
  const double tol = rel_tol * std::max(scale, 1e-300);
  std::vector<EigenCluster> clusters;
  for (const auto& v : values) {
    auto it = std::find_if(clusters.begin(), clusters.end(),
                           [&](const EigenCluster& c) { return std::abs(c.value - v) <= tol; });
    if (it == clusters.end()) {
      clusters.push_back({v, 1});
    } else {
      ++it->count;
    }
  }
  return clusters;
}

bool SpectralAnchor::is_eigenvalue_at_u1(Complex lambda, double rel_tol) const {
  double scale = 0.0;
  for (const auto& v : at_u1) scale = std::max(scale, std::abs(v));
  return std::any_of(at_u1.begin(), at_u1.end(),
                     [&](Complex v) { return std::abs(v - lambda) <= rel_tol * scale; });
}

SpectralAnchor make_spectral_anchor(ChainKind kind, const ModelParams& params, Complex u0, Complex u1) {
  SpectralAnchor anchor{u0, u1, {}, {}};
  anchor.at_u0 = cluster_eigenvalues(transfer_eigenvalues(build_transfer(kind, u0, params).matrix));
  anchor.at_u1 = transfer_eigenvalues(build_transfer(kind, u1, params).matrix);
  return anchor;
}

}  // namespace tl
