#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tl/bethe.hpp"
#include "tl/symmetry.hpp"

namespace tl {

struct SearchConfig {
  int seeds = 2000;
  double annulus_min = 0.3;
  double annulus_max = 3.0;
  int max_iterations = 80;
  /// On the scaled residual max_k |lhs - rhs| / (|lhs| + |rhs|).
  double tolerance = 1e-12;
  double dedup_tolerance = 1e-6;
  int max_halvings = 30;
  /// Distance to 0, coincidence or a pole below which a converged point is
  /// rejected.
  double proximity = 1e-6;
  /// Seeds per eigenvalue when a sector needs a spectral anchor.
  int anchor_seeds = 30;
  std::uint64_t seed = 20160601;

  void validate() const;
};

struct SectorCensus {
  int m = 0;
  std::optional<int> l;
  int found = 0;
  std::optional<int> expected;
  std::optional<long long> expected_degeneracy;
  int rejected = 0;
  int underdetermined = 0;

  bool complete() const { return expected.has_value() && found == *expected; }
};

struct SectorResult {
  std::vector<BetheSolution> solutions;
  SectorCensus census;
};

/// All open-chain solutions with M roots, deduplicated.
SectorResult solve_sector_open(const ModelParams& params, int m, const SearchConfig& cfg);

/// Closed-chain solutions in sector (M, l) with kappa eliminated. When the
/// equations leave a continuous family and an anchor is supplied, roots are
/// pinned by matching eigenvalues of t at the anchor probes.
SectorResult solve_sector_closed(const ModelParams& params, int m, int l, const SearchConfig& cfg,
                                 const SpectralAnchor* anchor = nullptr);

/// Canonical representative of a solution: per-root symmetry reduction,
/// then roots sorted by (modulus, argument).
BetheSolution canonicalize(const BetheSolution& solution, const ModelParams& params);

/// Merges solutions with equal Lambda at two probes; keeps the one with
/// fewer roots, then the smaller sum of |u_k|.
std::vector<BetheSolution> dedup_solutions(const std::vector<BetheSolution>& raw, const ModelParams& params,
                                           const SearchConfig& cfg);

/// Sorts roots by modulus, then principal argument.
void sort_roots(Roots& roots);

/// p_k(d) from p_{k+1} + p_{k-1} = d p_k.
long long chebyshev_dim(int k, int d);

/// nu_k for the TL algebra on N strands.
long long multiplicity(int n_sites, int k);

/// Per M = 0..N/2: expected number of solutions and their degeneracy.
std::vector<SectorCensus> expected_census(const ModelParams& params);

}  // namespace tl
