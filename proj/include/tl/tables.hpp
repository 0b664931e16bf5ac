#pragma once

#include <array>
#include <string>
#include <vector>

#include "tl/bethe.hpp"

namespace tl {

/// Reference spectra used by `reproduce`. All tables are at q = 0.5 and
/// list spins 1/2, 1, 3/2 in that order.
inline constexpr std::array<int, 3> kTableSpins{1, 2, 3};
inline constexpr double kTableQ = 0.5;

struct OpenTableRow {
  int m = 0;
  Roots roots;
  /// Degeneracy for twice_spin = 1, 2, 3.
  std::array<int, 3> degeneracy{};
};

struct OpenTable {
  int id = 0;
  int n_sites = 0;
  std::vector<OpenTableRow> rows;
  std::array<int, 3> totals{};
};

struct DimensionRow {
  int k = 0;
  long long nu = 0;
  std::array<long long, 3> dims{};
};

struct DimensionTable {
  int id = 0;
  int n_sites = 0;
  std::vector<DimensionRow> rows;
};

struct ClosedTableRow {
  int m = 0;
  Roots roots;
  Complex kappa;
  int degeneracy = 0;
};

struct ClosedTable {
  int id = 0;
  int n_sites = 0;
  /// Indexed like kTableSpins.
  std::array<std::vector<ClosedTableRow>, 3> rows;
  std::array<int, 3> totals{};
};

enum class TableKind { open_spectrum, dimensions, closed_spectrum };

TableKind table_kind(int table_id);

/// Throws UsageError for ids outside the matching range.
const OpenTable& open_table(int table_id);
const DimensionTable& dimension_table(int table_id);
const ClosedTable& closed_table(int table_id);

/// Chain length of any table 1..8.
int table_sites(int table_id);

}  // namespace tl
