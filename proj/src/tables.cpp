#include "tl/tables.hpp"

#include <cmath>
#include <string>

namespace tl {

namespace {

Complex c(double re, double im = 0.0) { return {re, im}; }

Complex polar_pi(double modulus, double fraction_of_pi) { return std::polar(modulus, fraction_of_pi * kPi); }

const double kSqrt2 = std::sqrt(2.0);

const std::vector<OpenTable>& open_tables() {
  static const std::vector<OpenTable> tables{
      {1, 2, {{0, {}, {3, 8, 15}}, {1, {c(1.34164, 0.447214)}, {1, 1, 1}}}, {4, 9, 16}},
      {2,
       3,
       {{0, {}, {4, 21, 56}},
        {1, {c(1.22474, 0.707107)}, {2, 3, 4}},
        {1, {c(1.38873, 0.267261)}, {2, 3, 4}}},
       {8, 27, 64}},
      {3,
       4,
       {{0, {}, {5, 55, 209}},
        {1, {c(1.10176, 0.886631)}, {3, 8, 15}},
        {1, {c(1.34164, 0.447214)}, {3, 8, 15}},
        {1, {c(1.40092, 0.193427)}, {3, 8, 15}},
        {2, {c(1.81555, -0.854196), c(1.81555, 0.854196)}, {1, 1, 1}},
        {2, {c(1.28401, 0.592723), c(1.3969, 0.220635)}, {1, 1, 1}}},
       {16, 81, 256}},
  };
  return tables;
}

const std::vector<DimensionTable>& dimension_tables() {
  static const std::vector<DimensionTable> tables{
      {4, 2, {{0, 1, {1, 1, 1}}, {2, 1, {3, 8, 15}}}},
      {5, 3, {{1, 2, {2, 3, 4}}, {3, 1, {4, 21, 56}}}},
      {6, 4, {{0, 2, {1, 1, 1}}, {2, 3, {3, 8, 15}}, {4, 1, {5, 55, 209}}}},
  };
  return tables;
}

const std::vector<ClosedTable>& closed_tables() {
  static const std::vector<ClosedTable> tables{
      {7,
       2,
       {{
           {{0, {}, c(-1), 2}, {1, {c(0, 1.41421)}, c(1), 1}, {1, {c(1.41421)}, c(1), 1}},
           {{0, {}, c(1), 5},
            {0, {}, c(-1), 2},
            {1, {c(0.540182)}, c(0.381966), 1},
            {1, {c(1.21699)}, c(0.381966), 1}},
           {{0, {}, c(-1), 9},
            {0, {}, c(1), 5},
            {1, {c(0.732051)}, c(0.267949), 1},
            {1, {c(1.1638)}, c(0.267949), 1}},
       }},
       {4, 9, 16}},
      {8,
       3,
       {{
           {{0, {}, kI, 2},
            {1, {kI * polar_pi(kSqrt2, -1.0 / 3.0)}, -kI, 2},
            {1, {-kI * polar_pi(kSqrt2, 1.0 / 3.0)}, -kI, 2},
            {1, {c(kSqrt2)}, -kI, 2}},
           {{0, {}, c(-1), 8},
            {0, {}, polar_pi(1.0, 1.0 / 3.0), 5},
            {0, {}, polar_pi(1.0, -1.0 / 3.0), 5},
            {1, {c(0, kSqrt2)}, c(-1), 3},
            {1, {c(3.0 * std::sqrt(3.0), 1.0) / std::sqrt(14.0)}, c(-1), 3},
            {1, {c(3.0 * std::sqrt(3.0), -1.0) / std::sqrt(14.0)}, c(-1), 3}},
           {{0, {}, -kI, 20},
            {0, {}, kI * polar_pi(1.0, 1.0 / 3.0), 16},
            {0, {}, kI * polar_pi(1.0, -1.0 / 3.0), 16},
            {1, {-kI * polar_pi(kSqrt2, 1.0 / 3.0)}, kI, 4},
            {1, {kI * polar_pi(kSqrt2, -1.0 / 3.0)}, kI, 4},
            {1, {c(kSqrt2)}, kI, 4}},
       }},
       {8, 27, 64}},
  };
  return tables;
}

template <typename Table>
const Table& find_table(const std::vector<Table>& tables, int table_id, const char* what) {
  for (const auto& t : tables) {
    if (t.id == table_id) return t;
  }
  throw UsageError(std::string("table ") + std::to_string(table_id) + " is not a " + what + " table");
}

}  // namespace

TableKind table_kind(int table_id) {
  if (table_id >= 1 && table_id <= 3) return TableKind::open_spectrum;
  if (table_id >= 4 && table_id <= 6) return TableKind::dimensions;
  if (table_id >= 7 && table_id <= 8) return TableKind::closed_spectrum;
  throw UsageError("table id must be in 1..8, got " + std::to_string(table_id));
}

const OpenTable& open_table(int table_id) { return find_table(open_tables(), table_id, "open-chain"); }

const DimensionTable& dimension_table(int table_id) { return find_table(dimension_tables(), table_id, "dimension"); }

const ClosedTable& closed_table(int table_id) { return find_table(closed_tables(), table_id, "closed-chain"); }

int table_sites(int table_id) {
  switch (table_kind(table_id)) {
    case TableKind::open_spectrum:
      return open_table(table_id).n_sites;
    case TableKind::dimensions:
      return dimension_table(table_id).n_sites;
    case TableKind::closed_spectrum:
      return closed_table(table_id).n_sites;
  }
  throw UsageError("unreachable table kind");
}

}  // namespace tl
