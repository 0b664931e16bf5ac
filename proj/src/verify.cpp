#include "tl/verify.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "tl/aba.hpp"
#include "tl/symmetry.hpp"

namespace tl {

namespace {

constexpr double kIdentityTol = 1e-9;
constexpr double kFunctionalTol = 1e-8;
constexpr double kHamiltonianTol = 1e-6;
constexpr double kAbaTol = 1e-8;
constexpr double kScalarTol = 1e-6;
constexpr double kLimitTol = 1e-4;

using Checks = std::vector<CheckResult>;

struct Context {
  const VerifyOptions& options;
  ModelParams params;
  std::mt19937_64 rng;
  Checks checks;
  std::string suite;

  void add(const std::string& name, double residual, double tolerance) {
    checks.push_back({suite, name, residual, tolerance});
  }

  Complex random_point(double rmin = 0.7, double rmax = 1.4) {
    std::uniform_real_distribution<double> radius(rmin, rmax);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    return std::polar(radius(rng), angle(rng));
  }

  Matrix random_block(Index rows, Index cols) {
    std::normal_distribution<double> g;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) m(i, j) = Complex{g(rng), g(rng)};
    }
    return m;
  }
};

Matrix identity(Index n) { return Matrix::Identity(n, n); }

ModelParams with_sites(const ModelParams& base, int n_sites, int q_branch) {
  return ModelParams::make(n_sites, base.twice_spin, base.q, q_branch);
}

void tl_algebra(Context& ctx) {
  const auto& p = ctx.params;
  const int branch = ctx.options.q_branch;
  const int d = p.site_dim();
  const Matrix x = build_X(p);
  ctx.add("X^2 = c X", relative_residual(x * x, coupling_c(p.q) * x), kIdentityTol);

  const auto p3 = with_sites(p, 3, branch);
  const Matrix x1 = embed_site_op(build_X(p3), 1, p3);
  const Matrix x2 = embed_site_op(build_X(p3), 2, p3);
  ctx.add("X1 X2 X1 = X1", relative_residual(x1 * x2 * x1, x1), kIdentityTol);
  ctx.add("X2 X1 X2 = X2", relative_residual(x2 * x1 * x2, x2), kIdentityTol);

  const auto p4 = with_sites(p, 4, branch);
  const Matrix y1 = embed_site_op(build_X(p4), 1, p4);
  const Matrix y3 = embed_site_op(build_X(p4), 3, p4);
  ctx.add("X1 X3 = X3 X1", relative_residual(y1 * y3, y3 * y1), kIdentityTol);

  const auto [v, m] = build_crossing_matrices(p);
  ctx.add("tr M = c", relative_error(m.trace(), coupling_c(p.q)), kIdentityTol);
  ctx.add("V^2 = (-1)^{2s}", relative_residual(v * v, signed_power(p.twice_spin) * identity(d)), kIdentityTol);
  ctx.add("M = V^t V", relative_residual(m, v.transpose() * v), kIdentityTol);

  const Matrix proj = build_projector(p);
  ctx.add("(P-)^2 = P-", relative_residual(proj * proj, proj), kIdentityTol);
  ctx.add("tr P- = 1", std::abs(proj.trace() - 1.0), kIdentityTol);
  ctx.add("R(1) = omega(q) P", relative_residual(build_R(1.0, p), omega(p.q) * build_swap(d)), kIdentityTol);
  ctx.add("R(1/q) ~ P-",
          relative_residual(build_R(1.0 / p.q, p),
                            (1.0 / p.q - p.q) * static_cast<double>(d) * signed_power(p.twice_spin) * proj),
          kIdentityTol);
}

void ybe(Context& ctx) {
  const auto& p = ctx.params;
  const int d = p.site_dim();
  const Complex q = p.q;
  auto r3 = [&](Complex u, int a, int b) { return embed_two_factor(build_R(u, p), a, b, 3, d); };
  double ybe_res = 0.0;
  double unitarity = 0.0;
  double crossing = 0.0;
  double bybe_minus = 0.0;
  double bybe_plus = 0.0;
  const auto [v, m] = build_crossing_matrices(p);
  const Matrix v1 = kroneckerProduct(v, identity(d)).eval();
  const Matrix m1 = kroneckerProduct(m, identity(d)).eval();
  const Matrix m2 = kroneckerProduct(identity(d), m).eval();
  const Matrix m1_inv = kroneckerProduct(Matrix(m.inverse()), identity(d)).eval();
  auto r21 = [&](Complex u) { return swap_factors(build_R(u, p), d); };
  for (int trial = 0; trial < 3; ++trial) {
    const Complex u1 = ctx.random_point();
    const Complex u2 = ctx.random_point();
    const Complex u3 = ctx.random_point();
    const Matrix lhs = r3(u1 / u2, 0, 1) * r3(u1 / u3, 0, 2) * r3(u2 / u3, 1, 2);
    const Matrix rhs = r3(u2 / u3, 1, 2) * r3(u1 / u3, 0, 2) * r3(u1 / u2, 0, 1);
    ybe_res = std::max(ybe_res, relative_residual(lhs, rhs));

    unitarity = std::max(unitarity, relative_residual(build_R(u1, p) * r21(1.0 / u1), zeta(u1, q) * identity(d * d)));
    crossing = std::max(crossing, relative_residual(build_R(u1, p),
                                                    v1 * partial_transpose(build_R(-1.0 / (u1 * q), p), 1, d) * v1));

    const Complex a = u1;
    const Complex b = u2;
    bybe_minus = std::max(bybe_minus, relative_residual(build_R(a / b, p) * r21(a * b), build_R(a * b, p) * r21(a / b)));
    const Complex w = 1.0 / (a * b * q * q);
    const Matrix plus_lhs = build_R(b / a, p) * m1 * m1_inv * r21(w) * m1 * m2;
    const Matrix plus_rhs = m2 * m1 * build_R(w, p) * m1_inv * m1 * r21(b / a);
    bybe_plus = std::max(bybe_plus, relative_residual(plus_lhs, plus_rhs));
  }
  ctx.add("Yang-Baxter", ybe_res, kIdentityTol);
  ctx.add("unitarity", unitarity, kIdentityTol);
  ctx.add("crossing", crossing, kIdentityTol);
  ctx.add("boundary YBE K-", bybe_minus, kIdentityTol);
  ctx.add("boundary YBE K+", bybe_plus, kIdentityTol);

  const Matrix mm = kroneckerProduct(m, m).eval();
  double comm = 0.0;
  for (const auto sign : {Asymptote::plus, Asymptote::minus}) {
    const Matrix ra = build_R_asymptotic(sign, p);
    comm = std::max(comm, relative_residual(mm * ra, ra * mm));
  }
  ctx.add("[M M, R+-] = 0", comm, kIdentityTol);
  const double big = 1e6;
  ctx.add("R(u)/u -> R+", relative_residual(build_R(big, p) / big, build_R_asymptotic(Asymptote::plus, p)), 1e-8);
  ctx.add("-u R(u) -> R-",
          relative_residual(-(1.0 / big) * build_R(1.0 / big, p), build_R_asymptotic(Asymptote::minus, p)), 1e-8);
}

void transfer_identities(Context& ctx) {
  const auto& p = ctx.params;
  const Complex q = p.q;
  const Index qdim = p.quantum_dim();
  double comm_open = 0.0;
  double comm_closed = 0.0;
  double cross = 0.0;
  double fundamental = 0.0;
  double inverse = 0.0;
  for (int trial = 0; trial < 2; ++trial) {
    const Complex u = ctx.random_point();
    const Complex v = ctx.random_point();
    for (const auto kind : {ChainKind::open, ChainKind::closed}) {
      const Matrix tu = build_transfer(kind, u, p).matrix;
      const Matrix tv = build_transfer(kind, v, p).matrix;
      double& slot = kind == ChainKind::open ? comm_open : comm_closed;
      slot = std::max(slot, relative_residual(tu * tv, tv * tu));
    }
    cross = std::max(cross, relative_residual(build_open_transfer(u, p).matrix,
                                              build_open_transfer(-1.0 / (u * q), p).matrix));

    const ChainLayout two_aux{p.n_sites + 2, 0, 2};
    const ChainLayout second_aux{p.n_sites + 2, 1, 2};
    const TlGenerator gen = TlGenerator::make(p);
    FactorProgram lhs(gen, two_aux.n_factors);
    lhs.append(monodromy_program(v, p, second_aux));
    lhs.append(monodromy_program(u, p, two_aux));
    lhs.push_R(0, 1, u / v, q);
    FactorProgram rhs(gen, two_aux.n_factors);
    rhs.push_R(0, 1, u / v, q);
    rhs.append(monodromy_program(u, p, two_aux));
    rhs.append(monodromy_program(v, p, second_aux));
    const Matrix block = ctx.random_block(lhs.dim(), 4);
    Matrix a = block;
    Matrix b = block;
    lhs.apply(a);
    rhs.apply(b);
    fundamental = std::max(fundamental, relative_residual(a, b));

    const auto layout = ChainLayout::standard(p);
    FactorProgram prod = dual_monodromy_program(1.0 / u, p, layout);
    prod.append(monodromy_program(u, p, layout));
    Complex expected{1.0, 0.0};
    for (const auto& theta : p.thetas) expected *= zeta(u / theta, q);
    Matrix c = ctx.random_block(prod.dim(), 4);
    const Matrix c0 = c;
    prod.apply(c);
    inverse = std::max(inverse, relative_residual(c, expected * c0));
  }
  ctx.add("[t(u), t(v)] = 0 open", comm_open, kIdentityTol);
  ctx.add("[t(u), t(v)] = 0 closed", comm_closed, kIdentityTol);
  ctx.add("t(u) = t(-1/(uq))", cross, kIdentityTol);
  ctx.add("fundamental relation", fundamental, kIdentityTol);
  ctx.add("T(u) T^(1/u) ~ I", inverse, kIdentityTol);

  if (p.homogeneous()) {
    const Complex c = coupling_c(q);
    ctx.add("t(1) = c omega(q)^{2N}",
            relative_residual(build_open_transfer(1.0, p).matrix,
                              c * std::pow(omega(q), 2 * p.n_sites) * identity(qdim)),
            kIdentityTol);
    const Matrix shift = build_closed_transfer(1.0, p).matrix / std::pow(omega(q), p.n_sites);
    Matrix power = identity(qdim);
    for (int i = 0; i < p.n_sites; ++i) power = power * shift;
    ctx.add("U^N = I", relative_residual(power, identity(qdim)), kIdentityTol);
    if (p.n_sites >= 2) {
      ctx.add("H from t'(1)", relative_residual(hamiltonian_from_transfer(p), build_hamiltonian(p)), kHamiltonianTol);
    }
  }
}

void functional_relations(Context& ctx) {
  const auto& p = ctx.params;
  const Index qdim = p.quantum_dim();
  double open_res = 0.0;
  double closed_res = 0.0;
  for (const auto& theta : p.thetas) {
    const Complex left = theta / p.q;
    const Matrix open_prod = build_open_transfer(left, p).matrix * build_open_transfer(theta, p).matrix;
    open_res = std::max(open_res, relative_residual(open_prod, fusion_F(left, p) * identity(qdim)));
    const Matrix closed_prod = build_closed_transfer(left, p).matrix * build_closed_transfer(theta, p).matrix;
    closed_res = std::max(closed_res, relative_residual(closed_prod, closed_fusion_F(left, p) * identity(qdim)));
  }
  ctx.add("open t(theta/q) t(theta) = F", open_res, kFunctionalTol);
  ctx.add("closed t(theta/q) t(theta) = F", closed_res, kFunctionalTol);
}

void symmetry(Context& ctx) {
  const std::vector<Complex> probes{kDefaultProbe, kSecondProbe, ctx.random_point()};
  const auto report = check_symmetry(ctx.params, probes, ctx.rng(), kIdentityTol);
  ctx.add("[T+-_ij, t(u)] = 0", report.commutator, kIdentityTol);
  ctx.add("lemma 1", report.lemma1, kIdentityTol);
  ctx.add("lemma 2", report.lemma2, kIdentityTol);
}

std::vector<int> default_m(const VerifyOptions& options, int cap) {
  if (!options.m_list.empty()) return options.m_list;
  std::vector<int> out;
  for (int m = 1; m <= cap; ++m) out.push_back(m);
  return out;
}

void offshell(Context& ctx) {
  const auto& p = ctx.params;
  for (const int m : default_m(ctx.options, std::min(3, p.n_sites))) {
    if (m < 0) throw UsageError("offshell: M must be >= 0");
    double res = 0.0;
    double dual = 0.0;
    for (int c = 0; c < ctx.options.configurations; ++c) {
      Roots values(static_cast<std::size_t>(m));
      for (auto& z : values) z = ctx.random_point();
      const auto report = offshell_residual(ctx.random_point(), values, p);
      res = std::max(res, report.residual);
      dual = std::max(dual, report.dual_residual);
    }
    ctx.add("off-shell action M=" + std::to_string(m), res, kAbaTol);
    ctx.add("dual off-shell action M=" + std::to_string(m), dual, kAbaTol);
  }
}

std::vector<BetheSolution> on_shell(const Context& ctx, int m) {
  return solve_sector_open(ctx.params, m, ctx.options.search).solutions;
}

void highest_weight(Context& ctx) {
  const auto& p = ctx.params;
  for (int m = 0; m <= p.n_sites / 2; ++m) {
    if (!ctx.options.m_list.empty() &&
        std::find(ctx.options.m_list.begin(), ctx.options.m_list.end(), m) == ctx.options.m_list.end()) {
      continue;
    }
    double lower = 0.0;
    double diagonal = 0.0;
    for (const auto& sol : on_shell(ctx, m)) {
      const auto report = check_highest_weight(sol, p, kAbaTol);
      lower = std::max(lower, report.lower_triangular);
      diagonal = std::max(diagonal, report.diagonal);
    }
    ctx.add("T+_ij psi = 0 (i>j) M=" + std::to_string(m), lower, kAbaTol);
    ctx.add("T+_ii psi ~ psi M=" + std::to_string(m), diagonal, kAbaTol);
  }
}

void scalar_products(Context& ctx) {
  const auto& p = ctx.params;
  for (const int m : default_m(ctx.options, std::min(2, p.n_sites / 2))) {
    double sp = 0.0;
    double norm = 0.0;
    double limit = 0.0;
    for (const auto& sol : on_shell(ctx, m)) {
      Roots v(static_cast<std::size_t>(m));
      for (auto& z : v) z = ctx.random_point();
      sp = std::max(sp, relative_error(scalar_product_det(sol.roots, v, p).value,
                                       direct_scalar_product(sol.roots, v, p)));
      const Complex n_det = norm_squared(sol, p).value;
      norm = std::max(norm, relative_error(n_det, direct_scalar_product(sol.roots, sol.roots, p)));
      const auto lim = extrapolate_norm(sol.roots, p);
      limit = std::max({limit, lim.relative_change, relative_error(lim.extrapolated, n_det)});
    }
    ctx.add("scalar product M=" + std::to_string(m), sp, kScalarTol);
    ctx.add("norm M=" + std::to_string(m), norm, kScalarTol);
    ctx.add("v -> u limit M=" + std::to_string(m), limit, kLimitTol);
  }
}

const std::map<std::string, std::function<void(Context&)>>& registry() {
  static const std::map<std::string, std::function<void(Context&)>> suites{
      {"tl-algebra", tl_algebra},
      {"ybe", ybe},
      {"transfer-identities", transfer_identities},
      {"functional-relations", functional_relations},
      {"symmetry", symmetry},
      {"offshell", offshell},
      {"highest-weight", highest_weight},
      {"scalar-products", scalar_products},
  };
  return suites;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"tl-algebra", "ybe",     "transfer-identities", "functional-relations",
                                              "symmetry",   "offshell", "highest-weight",     "scalar-products"};
  return names;
}

double relative_residual(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("relative_residual: shape mismatch");
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  const double diff = (a - b).cwiseAbs().maxCoeff();
  return scale == 0.0 ? diff : diff / scale;
}

std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& options) {
  const auto it = registry().find(suite);
  if (it == registry().end()) throw UsageError("unknown suite '" + suite + "'");
  if (options.n_sites < 1) throw UsageError("verify: N must be >= 1");
  if (options.configurations < 1) throw UsageError("verify: configurations must be >= 1");
  Context ctx{options, ModelParams::make(options.n_sites, options.twice_spin, options.q, options.q_branch),
              std::mt19937_64(options.seed), {}, suite};
  if (options.inhomogeneous) {
    ctx.params = ctx.params.with_thetas(random_generic_thetas(options.n_sites, options.q, ctx.rng));
  }
  it->second(ctx);
  return ctx.checks;
}

}  // namespace tl
