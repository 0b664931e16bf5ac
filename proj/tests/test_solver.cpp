#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "tl/solver.hpp"
#include "tl/tables.hpp"

using namespace tl;

namespace {

SearchConfig quick_config() {
  SearchConfig cfg;
  cfg.seeds = 300;
  return cfg;
}

// Root sets agree up to order and the images u -> -u, 1/(qu), -1/(qu).
bool same_open_roots(const Roots& found, const Roots& expected, Complex q, double tol) {
  if (found.size() != expected.size()) return false;
  std::vector<int> order(found.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < order.size() && ok; ++i) {
      const Complex u = found[order[i]];
      const Complex e = expected[i];
      double best = 1e300;
      for (const Complex img : {u, -u, 1.0 / (q * u), -1.0 / (q * u)}) best = std::min(best, std::abs(img - e));
      ok = best < tol * std::abs(e);
    }
    if (ok) return true;
  } while (std::next_permutation(order.begin(), order.end()));
  return false;
}

int count_matches(const std::vector<BetheSolution>& sols, const Roots& expected, Complex q) {
  return static_cast<int>(std::count_if(sols.begin(), sols.end(), [&](const BetheSolution& s) {
    return same_open_roots(s.roots, expected, q, 1e-5);
  }));
}

}  // namespace

TEST_CASE("Chebyshev dimensions and multiplicities") {
  CHECK(chebyshev_dim(0, 2) == 1);
  CHECK(chebyshev_dim(1, 3) == 3);
  CHECK(chebyshev_dim(2, 4) == 15);
  CHECK(chebyshev_dim(3, 3) == 21);
  CHECK(chebyshev_dim(4, 4) == 209);
  CHECK(chebyshev_dim(4, 5) == 551);
  CHECK(multiplicity(2, 0) == 1);
  CHECK(multiplicity(2, 2) == 1);
  CHECK(multiplicity(3, 1) == 2);
  CHECK(multiplicity(4, 0) == 2);
  CHECK(multiplicity(4, 2) == 3);
  CHECK(multiplicity(6, 2) == 9);
  CHECK_THROWS(multiplicity(3, 0));
  CHECK_THROWS(multiplicity(2, 3));
}

TEST_CASE("sum rule sum_k nu_k p_k(d) = d^N") {
  for (int n = 1; n <= 8; ++n) {
    for (int d = 2; d <= 5; ++d) {
      long long total = 0;
      for (int k = n % 2; k <= n; k += 2) total += multiplicity(n, k) * chebyshev_dim(k, d);
      long long expected = 1;
      for (int i = 0; i < n; ++i) expected *= d;
      CHECK(total == expected);
    }
  }
}

TEST_CASE("expected census for N=4") {
  const auto census = expected_census(ModelParams::make(4, 2, 0.5));
  REQUIRE(census.size() == 3);
  CHECK(census[0].expected == 1);
  CHECK(census[0].expected_degeneracy == 55);
  CHECK(census[1].expected == 3);
  CHECK(census[1].expected_degeneracy == 8);
  CHECK(census[2].expected == 2);
  CHECK(census[2].expected_degeneracy == 1);
}

TEST_CASE("open solver reproduces the tabulated roots") {
  const auto cfg = quick_config();
  for (int table = 1; table <= 3; ++table) {
    const auto& tab = open_table(table);
    const auto p = ModelParams::make(tab.n_sites, 1, kTableQ);
    for (int m = 1; m <= tab.n_sites / 2; ++m) {
      const auto res = solve_sector_open(p, m, cfg);
      int expected = 0;
      for (const auto& row : tab.rows) {
        if (row.m != m) continue;
        ++expected;
        CHECK(count_matches(res.solutions, row.roots, p.q) == 1);
      }
      CHECK(static_cast<int>(res.solutions.size()) == expected);
      for (const auto& sol : res.solutions) CHECK(scaled_residual_norm(sol, p) < 1e-10);
    }
  }
}

TEST_CASE("open solver is deterministic for a fixed seed") {
  const auto p = ModelParams::make(4, 1, 0.5);
  const auto a = solve_sector_open(p, 2, quick_config());
  const auto b = solve_sector_open(p, 2, quick_config());
  REQUIRE(a.solutions.size() == b.solutions.size());
  for (std::size_t i = 0; i < a.solutions.size(); ++i) CHECK(a.solutions[i].roots == b.solutions[i].roots);
}

TEST_CASE("dedup merges images and permutations") {
  const auto p = ModelParams::make(4, 1, 0.5);
  const Roots roots = open_table(3).rows[5].roots;
  BetheSolution a;
  a.roots = roots;
  BetheSolution b;
  b.roots = {-1.0 / (p.q * roots[1]), roots[0]};
  BetheSolution c;
  c.roots = open_table(3).rows[4].roots;
  const auto merged = dedup_solutions({a, b, c}, p, quick_config());
  CHECK(merged.size() == 2);
}

TEST_CASE("canonical roots are sorted") {
  Roots r{Complex(2.0, 0.0), Complex(0.5, 0.5), Complex(1.0, 0.0)};
  sort_roots(r);
  CHECK(std::abs(r[0]) <= std::abs(r[1]));
  CHECK(std::abs(r[1]) <= std::abs(r[2]));
}

TEST_CASE("closed solver sector (1, l) at N=3 spin 1/2") {
  const auto p = ModelParams::make(3, 1, 0.5);
  const auto anchor = make_spectral_anchor(ChainKind::closed, p);
  std::vector<BetheSolution> all;
  for (int l = 0; l < 3; ++l) {
    const auto res = solve_sector_closed(p, 1, l, quick_config(), &anchor);
    all.insert(all.end(), res.solutions.begin(), res.solutions.end());
  }
  const auto sols = dedup_solutions(all, p, quick_config());
  for (const auto& row : closed_table(8).rows[0]) {
    if (row.m != 1) continue;
    bool found = false;
    for (const auto& s : sols) {
      if (s.roots.size() != 1) continue;
      const Complex u = s.roots[0];
      const Complex e = row.roots[0];
      if (std::min(std::abs(u - e), std::abs(-u - e)) < 1e-5 * std::abs(e) && std::abs(s.kappa - row.kappa) < 1e-5)
        found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("search configuration validation") {
  SearchConfig cfg;
  cfg.seeds = 0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.annulus_min = 2.0;
  cfg.annulus_max = 1.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  CHECK_NOTHROW(SearchConfig{}.validate());
}
