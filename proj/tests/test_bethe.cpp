#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "tl/bethe.hpp"
#include "tl/solver.hpp"
#include "tl/tables.hpp"
#include "tl/transfer.hpp"

using namespace tl;
using tl::test::rel;

namespace {

BetheSolution open_solution(Roots roots) {
  BetheSolution s;
  s.roots = std::move(roots);
  s.kind = ChainKind::open;
  return s;
}

BetheSolution closed_solution(Roots roots, Complex kappa) {
  BetheSolution s;
  s.roots = std::move(roots);
  s.kind = ChainKind::closed;
  s.kappa = kappa;
  return s;
}

bool is_eigenvalue(const Matrix& m, Complex lambda, double tol = 1e-8) {
  Eigen::ComplexEigenSolver<Matrix> es(m, false);
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (rel(es.eigenvalues()(i), lambda) < tol) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("a and d vanish at the inhomogeneities") {
  auto p = ModelParams::make(3, 1, Complex(0.5, 0.2));
  p = p.with_thetas({Complex(1.1, 0.2), Complex(0.9, -0.1), Complex(1.0, 0.25)});
  for (auto kind : {ChainKind::open, ChainKind::closed}) {
    for (const auto& theta : p.thetas) {
      CHECK(std::abs(eval_a_d(theta / p.q, p, kind).a) < 1e-12);
      CHECK(std::abs(eval_a_d(theta, p, kind).d) < 1e-12);
    }
  }
  for (const auto& theta : p.thetas) {
    const auto at = eval_a_d(theta, p, ChainKind::open);
    const auto below = eval_a_d(theta / p.q, p, ChainKind::open);
    CHECK(rel(at.a * below.d, fusion_F(theta / p.q, p)) < 1e-10);
    const auto cat = eval_a_d(theta, p, ChainKind::closed);
    const auto cbelow = eval_a_d(theta / p.q, p, ChainKind::closed);
    CHECK(rel(cat.a * cbelow.d, closed_fusion_F(theta / p.q, p)) < 1e-10);
  }
}

TEST_CASE("open a and d are related by crossing") {
  const auto p = ModelParams::make(3, 2, 0.5);
  for (int i = 0; i < 5; ++i) {
    const Complex u = tl::test::random_complex();
    CHECK(rel(eval_a_d(u, p, ChainKind::open).d, eval_a_d(-1.0 / (u * p.q), p, ChainKind::open).a) < 1e-12);
  }
}

TEST_CASE("Q function") {
  const Complex q = 0.5;
  const Roots roots{Complex(1.2, 0.3), Complex(0.8, -0.6)};
  for (const auto& r : roots) {
    CHECK(std::abs(eval_q_function(r, roots, ChainKind::open, q)) < 1e-14);
    CHECK(std::abs(eval_q_function(r, roots, ChainKind::closed, q)) < 1e-14);
  }
  const Complex u(0.7, 0.9);
  CHECK(rel(eval_q_function(u, roots, ChainKind::open, q), eval_q_function(1.0 / (u * q), roots, ChainKind::open, q)) <
        1e-12);
  CHECK(eval_q_function(u, {}, ChainKind::open, q) == Complex(1.0));
}

TEST_CASE("Lambda(1) = c omega(q)^{2N} for any roots") {
  const auto p = ModelParams::make(3, 1, 0.5);
  const Roots roots{Complex(1.3, 0.2), Complex(0.7, 0.5), Complex(-0.4, 1.1)};
  CHECK(rel(eval_lambda_open(1.0, roots, p), coupling_c(p.q) * std::pow(omega(p.q), 6)) < 1e-10);
}

TEST_CASE("table-1 root: residual, energy and eigenvalue") {
  const auto p = ModelParams::make(2, 1, 0.5);
  const auto sol = open_solution(open_table(1).rows[1].roots);
  CHECK(scaled_residual_norm(sol, p) < 1e-4);
  CHECK(rel(energy(sol, p), Complex(-2.5)) < 1e-5);
  const Complex u0 = kDefaultProbe;
  CHECK(is_eigenvalue(build_open_transfer(u0, p).matrix, eval_lambda(u0, sol, p), 1e-5));
  const Complex u(0.6, 0.4);
  CHECK(rel(eval_lambda(u, sol, p), eval_lambda(1.0 / (u * p.q), sol, p)) < 1e-10);
}

TEST_CASE("rescaled residuals agree") {
  const auto p = ModelParams::make(4, 1, 0.5);
  const auto sol = open_solution(open_table(3).rows[5].roots);
  const auto a = bethe_residuals(sol, p);
  const auto b = bethe_residuals_rescaled(sol, p);
  REQUIRE(a.size() == b.size());
  const auto terms = bethe_residual_terms(sol, p);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double scale = std::abs(terms[k].lhs) + std::abs(terms[k].rhs);
    CHECK(std::abs(a[k] - b[k]) / scale < 1e-10);
  }
  CHECK(scaled_residual_norm(sol, p) < 1e-4);
}

TEST_CASE("energies of the N=3 solutions are eigenvalues of H") {
  for (int ts = 1; ts <= 2; ++ts) {
    const auto p = ModelParams::make(3, ts, 0.5);
    const Matrix h = build_hamiltonian(p);
    CHECK(std::abs(energy(open_solution({}), p)) < 1e-12);
    for (const auto& row : open_table(2).rows) {
      if (row.m == 0) continue;
      CHECK(is_eigenvalue(h, energy(open_solution(row.roots), p), 1e-5));
    }
  }
}

TEST_CASE("Lambda does not depend on the spin") {
  const Roots roots = open_table(3).rows[4].roots;
  const Complex u(0.8, -0.3);
  const Complex ref = eval_lambda_open(u, roots, ModelParams::make(4, 1, 0.5));
  for (int ts = 2; ts <= 4; ++ts) CHECK(rel(eval_lambda_open(u, roots, ModelParams::make(4, ts, 0.5)), ref) < 1e-13);
}

TEST_CASE("lambda_partial matches finite differences") {
  const auto p = ModelParams::make(3, 1, Complex(0.5, 0.1));
  for (int m = 1; m <= 3; ++m) {
    Roots roots;
    for (int k = 0; k < m; ++k) roots.push_back(tl::test::random_complex(0.8, 1.4));
    const Complex v(0.9, 0.45);
    for (int i = 0; i < m; ++i) {
      const double h = 1e-6;
      Roots plus = roots;
      Roots minus = roots;
      plus[i] += h;
      minus[i] -= h;
      const Complex fd = (eval_lambda_open(v, plus, p) - eval_lambda_open(v, minus, p)) / (2.0 * h);
      CHECK(rel(lambda_partial(v, roots, i, p), fd) < 1e-6);
    }
  }
}

TEST_CASE("closed twist and shift eigenvalue") {
  const auto p2 = ModelParams::make(2, 1, 0.5);
  CHECK(rel(twist_from_roots({}, 0, p2), Complex(-1.0)) < 1e-14);
  const auto p3 = ModelParams::make(3, 1, 0.5);
  CHECK(rel(twist_from_roots({}, 0, p3), kI) < 1e-14);
  CHECK(rel(shift_eigenvalue({Complex(0.0, std::sqrt(2.0))}, 1.0, p2), Complex(-1.0)) < 1e-12);
  for (int s = 0; s < 3; ++s) {
    const int ts = kTableSpins[s];
    const auto p = ModelParams::make(3, ts, 0.5);
    for (const auto& row : closed_table(8).rows[s]) {
      const Complex shift = shift_eigenvalue(row.roots, row.kappa, p);
      CHECK(std::abs(std::pow(shift, 3) - Complex(1.0)) < 1e-10);
    }
  }
}

TEST_CASE("closed table-7 eigenvalues appear in the spectrum") {
  for (int s = 0; s < 3; ++s) {
    const auto p = ModelParams::make(2, kTableSpins[s], 0.5);
    const Matrix t = build_closed_transfer(kDefaultProbe, p).matrix;
    for (const auto& row : closed_table(7).rows[s]) {
      CHECK(is_eigenvalue(t, eval_lambda(kDefaultProbe, closed_solution(row.roots, row.kappa), p), 1e-5));
    }
  }
}

TEST_CASE("coinciding roots are rejected") {
  const auto p = ModelParams::make(2, 1, 0.5);
  CHECK_THROWS_AS(eval_lambda(Complex(1.2, 0.3), open_solution({Complex(1.2, 0.3)}), p), DomainError);
}
