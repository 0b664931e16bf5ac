#include "tl/report.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tl {

using nlohmann::json;

namespace {

constexpr double kMergeTol = 1e-8;
constexpr double kKappaMatchTol = 1e-5;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

Complex complex_from_json(const json& j) {
  if (j.is_object()) return {j.at("re").get<double>(), j.at("im").get<double>()};
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) return parse_complex(j.get<std::string>());
  throw UsageError("expected a complex number, got " + j.dump());
}

template <typename T>
json optional_json(const std::optional<T>& value) {
  return value ? json(*value) : json(nullptr);
}

json optional_complex(const std::optional<Complex>& value) {
  return value ? complex_json(*value) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

std::optional<Complex> optional_complex_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return complex_from_json(j.at(key));
}

std::vector<int> all_sectors(int count) {
  std::vector<int> out(static_cast<std::size_t>(count));
  std::iota(out.begin(), out.end(), 0);
  return out;
}

long long int_pow(long long base, int exponent) {
  long long out = 1;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

bool line_less(const SpectralLine& a, const SpectralLine& b) {
  const auto& x = a.solution;
  const auto& y = b.solution;
  if (x.size() != y.size()) return x.size() < y.size();
  if (x.sector != y.sector) return x.sector < y.sector;
  for (std::size_t k = 0; k < x.roots.size(); ++k) {
    const double mx = std::abs(x.roots[k]);
    const double my = std::abs(y.roots[k]);
    if (std::abs(mx - my) > 1e-9 * std::max(mx, my)) return mx < my;
    const double ax = std::arg(x.roots[k]);
    const double ay = std::arg(y.roots[k]);
    if (std::abs(ax - ay) > 1e-9) return ax < ay;
  }
  return std::arg(x.kappa) < std::arg(y.kappa);
}

std::string roots_text(const Roots& roots, int digits) {
  if (roots.empty()) return "-";
  std::string out;
  for (std::size_t k = 0; k < roots.size(); ++k) {
    if (k > 0) out += "; ";
    out += format_complex(roots[k], digits);
  }
  return out;
}

std::string rational_text(long long num, long long den) {
  const long long g = std::gcd(num < 0 ? -num : num, den);
  num /= g;
  den /= g;
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

struct Rational {
  long long num;
  long long den;
};

std::optional<Rational> as_rational(double x, double tol) {
  for (long long den = 1; den <= 12; ++den) {
    const double num = std::round(x * static_cast<double>(den));
    if (std::abs(x - num / static_cast<double>(den)) <= tol) return Rational{static_cast<long long>(num), den};
  }
  return std::nullopt;
}

std::string exponent_text(const Rational& r) {
  const long long g = std::gcd(r.num < 0 ? -r.num : r.num, r.den);
  const long long num = r.num / g;
  const long long den = r.den / g;
  std::string out = "e^{";
  if (num < 0) out += "-";
  if (std::abs(num) != 1) out += std::to_string(std::abs(num));
  out += "iπ";
  if (den != 1) out += "/" + std::to_string(den);
  return out + "}";
}

// Expected line of a reference table.
struct ExpectedLine {
  int m;
  Roots roots;
  std::optional<Complex> kappa;
  long long degeneracy;
};

std::string describe(int m, const Roots& roots, const std::optional<Complex>& kappa) {
  std::string out = "M=" + std::to_string(m) + " roots {" + roots_text(roots, 6) + "}";
  if (kappa) out += " kappa " + format_kappa(*kappa);
  return out;
}

void match_lines(const SpinSpectrum& spectrum, const std::vector<ExpectedLine>& rows, long long expected_total,
                 std::vector<std::string>& mismatches) {
  const std::string label = std::string(to_string(spectrum.chain)) + " N=" + std::to_string(spectrum.n_sites) +
                            " s=" + format_spin(spectrum.twice_spin) + ": ";
  std::vector<bool> used(spectrum.lines.size(), false);
  for (const auto& row : rows) {
    bool found = false;
    for (std::size_t i = 0; i < spectrum.lines.size() && !found; ++i) {
      const auto& line = spectrum.lines[i];
      if (used[i] || line.solution.size() != row.m) continue;
      if (!roots_match(line.solution.roots, row.roots, spectrum.chain, spectrum.q)) continue;
      if (row.kappa && relative_error(line.solution.kappa, *row.kappa) > kKappaMatchTol) continue;
      used[i] = true;
      found = true;
      if (line.degeneracy_measured != row.degeneracy) {
        mismatches.push_back(label + describe(row.m, row.roots, row.kappa) + ": degeneracy " +
                             std::to_string(line.degeneracy_measured) + ", expected " +
                             std::to_string(row.degeneracy));
      }
    }
    if (!found) mismatches.push_back(label + "missing " + describe(row.m, row.roots, row.kappa));
  }
  for (std::size_t i = 0; i < spectrum.lines.size(); ++i) {
    if (used[i]) continue;
    const auto& s = spectrum.lines[i].solution;
    mismatches.push_back(label + "unexpected " +
                         describe(s.size(), s.roots, spectrum.chain == ChainKind::closed
                                                         ? std::optional<Complex>(s.kappa)
                                                         : std::nullopt));
  }
  if (spectrum.total_degeneracy != expected_total) {
    mismatches.push_back(label + "total degeneracy " + std::to_string(spectrum.total_degeneracy) + ", expected " +
                         std::to_string(expected_total));
  }
}

void spectrum_checks(const SpinSpectrum& sp, const RunConfig& cfg, bool complete, SpectrumReport& report) {
  const std::string label = std::string(to_string(sp.chain)) + " N=" + std::to_string(sp.n_sites) +
                            " s=" + format_spin(sp.twice_spin) + ": ";
  for (const auto& c : sp.census) {
    if (c.expected && c.found != *c.expected) {
      report.mismatches.push_back(label + "M=" + std::to_string(c.m) + " found " + std::to_string(c.found) +
                                  " solutions, expected " + std::to_string(*c.expected));
    }
  }
  for (const auto& line : sp.lines) {
    if (line.degeneracy_ambiguous) {
      report.warnings.push_back(label + "degeneracy of " + describe(line.solution.size(), line.solution.roots,
                                                                     std::nullopt) +
                                " is close to the rank threshold");
    }
    if (line.degeneracy_predicted && *line.degeneracy_predicted != line.degeneracy_measured) {
      report.mismatches.push_back(label + describe(line.solution.size(), line.solution.roots, std::nullopt) +
                                  ": measured degeneracy " + std::to_string(line.degeneracy_measured) +
                                  ", predicted " + std::to_string(*line.degeneracy_predicted));
    }
  }
  if (!complete) return;
  if (!sp.sum_rule()) {
    report.mismatches.push_back(label + "sum of degeneracies " + std::to_string(sp.total_degeneracy) +
                                ", expected " + std::to_string(sp.expected_total));
  }
  if (sp.trace_residual > cfg.trace_tolerance) {
    std::ostringstream msg;
    msg << label << "trace identity residual " << sp.trace_residual;
    report.mismatches.push_back(msg.str());
  }
}

// Lines that are identical across spins share one row in CSV and text.
struct MergedRow {
  ChainKind chain;
  const SpectralLine* line;
  std::map<int, int> degeneracy;
};

bool same_line(const SpectralLine& a, const SpectralLine& b) {
  const auto& x = a.solution;
  const auto& y = b.solution;
  if (x.kind != y.kind || x.size() != y.size()) return false;
  for (std::size_t k = 0; k < x.roots.size(); ++k) {
    if (std::abs(x.roots[k] - y.roots[k]) > kMergeTol * std::max(1.0, std::abs(y.roots[k]))) return false;
  }
  if (relative_error(x.kappa, y.kappa) > kMergeTol) return false;
  if (a.lambda_samples.empty() || b.lambda_samples.empty()) return false;
  return relative_error(a.lambda_samples.front().value, b.lambda_samples.front().value) <= kMergeTol;
}

std::vector<MergedRow> merge_rows(const SpectrumReport& report) {
  std::vector<MergedRow> rows;
  for (const auto& sp : report.spectra) {
    for (const auto& line : sp.lines) {
      auto it = std::find_if(rows.begin(), rows.end(), [&](const MergedRow& r) {
        return r.chain == sp.chain && !r.degeneracy.contains(sp.twice_spin) && same_line(*r.line, line);
      });
      if (it == rows.end()) {
        rows.push_back({sp.chain, &line, {}});
        it = std::prev(rows.end());
      }
      it->degeneracy[sp.twice_spin] = line.degeneracy_measured;
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const MergedRow& a, const MergedRow& b) { return a.line->solution.size() < b.line->solution.size(); });
  return rows;
}

std::vector<int> report_spins(const SpectrumReport& report) {
  std::vector<int> spins;
  for (const auto& sp : report.spectra) {
    if (std::find(spins.begin(), spins.end(), sp.twice_spin) == spins.end()) spins.push_back(sp.twice_spin);
  }
  return spins;
}

std::string title(const SpectrumReport& report) {
  const auto& c = report.config;
  std::ostringstream out;
  switch (c.mode) {
    case Mode::reproduce:
      out << "Table " << c.table;
      if (!report.spectra.empty()) {
        out << ": " << to_string(report.spectra.front().chain) << " chain, N = " << report.spectra.front().n_sites
            << ", q = " << format_complex(report.spectra.front().q);
      }
      break;
    case Mode::solve:
      out << to_string(c.chain) << " chain, N = " << c.n_sites << ", s = " << format_spin(c.twice_spin)
          << ", q = " << format_complex(c.q);
      break;
    case Mode::verify:
      out << "suite " << c.suite << ", N = " << c.n_sites << ", s = " << format_spin(c.twice_spin)
          << ", q = " << format_complex(c.q) << (c.inhomogeneous ? ", inhomogeneous" : "");
      break;
  }
  return out.str();
}

std::string pad(const std::string& s, std::size_t width) {
  // Column widths count code points so that "π" aligns.
  std::size_t length = 0;
  for (const unsigned char ch : s) {
    if ((ch & 0xC0) != 0x80) ++length;
  }
  return length >= width ? s + " " : s + std::string(width - length, ' ');
}

void render_table(std::ostream& out, const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> widths;
  for (const auto& row : cells) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::size_t length = 0;
      for (const unsigned char ch : row[c]) {
        if ((ch & 0xC0) != 0x80) ++length;
      }
      widths[c] = std::max(widths[c], length + 2);
    }
  }
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) line += c + 1 == row.size() ? row[c] : pad(row[c], widths[c]);
    out << line << "\n";
  }
}

}  // namespace

Mode parse_mode(const std::string& text) {
  if (text == "solve") return Mode::solve;
  if (text == "reproduce") return Mode::reproduce;
  if (text == "verify") return Mode::verify;
  throw UsageError("unknown mode '" + text + "'");
}

OutputFormat parse_format(const std::string& text) {
  if (text == "json") return OutputFormat::json;
  if (text == "csv") return OutputFormat::csv;
  if (text == "text") return OutputFormat::text;
  throw UsageError("unknown format '" + text + "' (expected json, csv or text)");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::solve:
      return "solve";
    case Mode::reproduce:
      return "reproduce";
    case Mode::verify:
      return "verify";
  }
  return "solve";
}

std::string to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::json:
      return "json";
    case OutputFormat::csv:
      return "csv";
    case OutputFormat::text:
      return "text";
  }
  return "json";
}

ChainKind parse_chain(const std::string& text) {
  if (text == "open") return ChainKind::open;
  if (text == "closed") return ChainKind::closed;
  throw UsageError("unknown chain '" + text + "' (expected open or closed)");
}

Complex parse_complex(const std::string& raw) {
  std::string text;
  for (const char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) text += ch;
  }
  if (text.empty()) throw UsageError("empty complex number");
  auto number = [&](const std::string& part, bool imaginary) -> double {
    if (imaginary && (part.empty() || part == "+")) return 1.0;
    if (imaginary && part == "-") return -1.0;
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(part, &used);
    } catch (const std::exception&) {
      throw UsageError("malformed complex number '" + raw + "'");
    }
    if (used != part.size()) throw UsageError("malformed complex number '" + raw + "'");
    return value;
  };
  if (text.back() != 'i' && text.back() != 'j') return {number(text, false), 0.0};
  const std::string body = text.substr(0, text.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, number(body, true)};
  return {number(body.substr(0, split), false), number(body.substr(split), true)};
}

void RunConfig::validate() const {
  search.validate();
  if (n_sites < 1) throw UsageError("N must be >= 1");
  if (twice_spin < 1) throw UsageError("spin must be a positive half-integer");
  if (q == Complex{0.0, 0.0}) throw UsageError("q must be nonzero");
  if (!(rank_tolerance > 0.0) || !(trace_tolerance > 0.0)) throw UsageError("tolerances must be positive");
  if (configurations < 1) throw UsageError("configurations must be >= 1");
  switch (mode) {
    case Mode::solve:
      for (const int m : m_list) {
        if (m < 0 || m > n_sites / 2) {
          throw UsageError("M = " + std::to_string(m) + " outside 0.." + std::to_string(n_sites / 2));
        }
      }
      for (const int l : l_list) {
        if (l < 0 || l >= n_sites) throw UsageError("l = " + std::to_string(l) + " outside 0.." + std::to_string(n_sites - 1));
      }
      if (chain == ChainKind::open && !l_list.empty()) throw UsageError("--l applies to the closed chain only");
      break;
    case Mode::reproduce:
      table_kind(table);
      break;
    case Mode::verify: {
      const auto& names = suite_names();
      if (std::find(names.begin(), names.end(), suite) == names.end()) throw UsageError("unknown suite '" + suite + "'");
      for (const int m : m_list) {
        if (m < 0) throw UsageError("M must be >= 0");
      }
      break;
    }
  }
}

json to_json(const SearchConfig& cfg) {
  return {{"seeds", cfg.seeds},
          {"annulus_min", cfg.annulus_min},
          {"annulus_max", cfg.annulus_max},
          {"max_iterations", cfg.max_iterations},
          {"tolerance", cfg.tolerance},
          {"dedup_tolerance", cfg.dedup_tolerance},
          {"max_halvings", cfg.max_halvings},
          {"proximity", cfg.proximity},
          {"anchor_seeds", cfg.anchor_seeds},
          {"seed", cfg.seed}};
}

SearchConfig search_config_from_json(const json& j, SearchConfig cfg) {
  if (!j.is_object()) throw UsageError("search config must be a JSON object");
  try {
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<int>();
    if (j.contains("annulus_min")) cfg.annulus_min = j.at("annulus_min").get<double>();
    if (j.contains("annulus_max")) cfg.annulus_max = j.at("annulus_max").get<double>();
    if (j.contains("max_iterations")) cfg.max_iterations = j.at("max_iterations").get<int>();
    if (j.contains("tolerance")) cfg.tolerance = j.at("tolerance").get<double>();
    if (j.contains("dedup_tolerance")) cfg.dedup_tolerance = j.at("dedup_tolerance").get<double>();
    if (j.contains("max_halvings")) cfg.max_halvings = j.at("max_halvings").get<int>();
    if (j.contains("proximity")) cfg.proximity = j.at("proximity").get<double>();
    if (j.contains("anchor_seeds")) cfg.anchor_seeds = j.at("anchor_seeds").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("search config: ") + e.what());
  }
  return cfg;
}

json to_json(const RunConfig& cfg) {
  return {{"mode", to_string(cfg.mode)},
          {"chain", to_string(cfg.chain)},
          {"N", cfg.n_sites},
          {"spin", format_spin(cfg.twice_spin)},
          {"q", complex_json(cfg.q)},
          {"q_branch", cfg.q_branch},
          {"M", cfg.m_list},
          {"l", cfg.l_list},
          {"search", to_json(cfg.search)},
          {"rank_tolerance", cfg.rank_tolerance},
          {"trace_tolerance", cfg.trace_tolerance},
          {"table", cfg.table},
          {"suite", cfg.suite},
          {"inhomogeneous", cfg.inhomogeneous},
          {"configurations", cfg.configurations},
          {"out", cfg.out_path},
          {"format", to_string(cfg.format)}};
}

RunConfig run_config_from_json(const json& j, RunConfig cfg) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  try {
    if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("chain")) cfg.chain = parse_chain(j.at("chain").get<std::string>());
    if (j.contains("N")) cfg.n_sites = j.at("N").get<int>();
    if (j.contains("spin")) {
      const auto& s = j.at("spin");
      cfg.twice_spin = parse_twice_spin(s.is_string() ? s.get<std::string>() : s.dump());
    }
    if (j.contains("twice_spin")) cfg.twice_spin = j.at("twice_spin").get<int>();
    if (j.contains("q")) cfg.q = complex_from_json(j.at("q"));
    if (j.contains("q_branch")) cfg.q_branch = j.at("q_branch").get<int>();
    if (j.contains("M")) cfg.m_list = j.at("M").get<std::vector<int>>();
    if (j.contains("l")) cfg.l_list = j.at("l").get<std::vector<int>>();
    if (j.contains("search")) cfg.search = search_config_from_json(j.at("search"), cfg.search);
    if (j.contains("rank_tolerance")) cfg.rank_tolerance = j.at("rank_tolerance").get<double>();
    if (j.contains("trace_tolerance")) cfg.trace_tolerance = j.at("trace_tolerance").get<double>();
    if (j.contains("table")) cfg.table = j.at("table").get<int>();
    if (j.contains("suite")) cfg.suite = j.at("suite").get<std::string>();
    if (j.contains("inhomogeneous")) cfg.inhomogeneous = j.at("inhomogeneous").get<bool>();
    if (j.contains("configurations")) cfg.configurations = j.at("configurations").get<int>();
    if (j.contains("out")) cfg.out_path = j.at("out").get<std::string>();
    if (j.contains("format")) cfg.format = parse_format(j.at("format").get<std::string>());
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return cfg;
}

SpinSpectrum compute_spectrum(const ModelParams& params, ChainKind chain, const std::vector<int>& m_list,
                              const std::vector<int>& l_list, const SearchConfig& search, double rank_tolerance) {
  SpinSpectrum out;
  out.chain = chain;
  out.n_sites = params.n_sites;
  out.twice_spin = params.twice_spin;
  out.q = params.q;
  out.expected_total = int_pow(params.site_dim(), params.n_sites);
  const auto ms = m_list.empty() ? all_sectors(params.n_sites / 2 + 1) : m_list;
  const auto ls = l_list.empty() ? all_sectors(params.n_sites) : l_list;

  std::vector<BetheSolution> solutions;
  if (chain == ChainKind::open) {
    const auto expected = expected_census(params);
    for (const int m : ms) {
      auto sector = solve_sector_open(params, m, search);
      if (m >= 0 && m < static_cast<int>(expected.size())) {
        sector.census.expected = expected[static_cast<std::size_t>(m)].expected;
        sector.census.expected_degeneracy = expected[static_cast<std::size_t>(m)].expected_degeneracy;
      }
      out.census.push_back(sector.census);
      solutions.insert(solutions.end(), sector.solutions.begin(), sector.solutions.end());
    }
  } else {
    const SpectralAnchor anchor = make_spectral_anchor(ChainKind::closed, params);
    std::vector<BetheSolution> raw;
    for (const int m : ms) {
      for (const int l : ls) {
        auto sector = solve_sector_closed(params, m, l, search, &anchor);
        out.census.push_back(sector.census);
        raw.insert(raw.end(), sector.solutions.begin(), sector.solutions.end());
      }
    }
    solutions = dedup_solutions(raw, params, search);
  }

  const Matrix t0 = build_transfer(chain, kDefaultProbe, params).matrix;
  for (const auto& sol : solutions) {
    SpectralLine line;
    line.solution = sol;
    for (const auto& u : kTraceProbes) line.lambda_samples.push_back({u, eval_lambda(u, sol, params)});
    const auto degeneracy = measure_degeneracy_detail(t0, line.lambda_samples.front().value, rank_tolerance);
    if (chain == ChainKind::closed && degeneracy.nullity == 0) continue;
    line.degeneracy_measured = degeneracy.nullity;
    line.degeneracy_ambiguous = degeneracy.ambiguous;
    if (chain == ChainKind::open) {
      line.energy = energy(sol, params);
      line.degeneracy_predicted =
          static_cast<int>(chebyshev_dim(params.n_sites - 2 * sol.size(), params.site_dim()));
    } else {
      line.shift_eigenvalue = shift_eigenvalue(sol.roots, sol.kappa, params);
    }
    out.total_degeneracy += line.degeneracy_measured;
    out.lines.push_back(std::move(line));
  }
  std::sort(out.lines.begin(), out.lines.end(), line_less);

  for (std::size_t p = 0; p < kTraceProbes.size(); ++p) {
    const Complex trace =
        p == 0 ? t0.trace() : build_transfer(chain, kTraceProbes[p], params).matrix.trace();
    Complex sum{0.0, 0.0};
    for (const auto& line : out.lines) sum += static_cast<double>(line.degeneracy_measured) * line.lambda_samples[p].value;
    out.trace_residual = std::max(out.trace_residual, relative_error(sum, trace));
  }
  return out;
}

SpectrumReport run_solve(const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  SpectrumReport report;
  report.config = cfg;
  const auto params = ModelParams::make(cfg.n_sites, cfg.twice_spin, cfg.q, cfg.q_branch);
  report.spectra.push_back(compute_spectrum(params, cfg.chain, cfg.m_list, cfg.l_list, cfg.search, cfg.rank_tolerance));
  const bool complete = cfg.m_list.empty() && cfg.l_list.empty();
  spectrum_checks(report.spectra.back(), cfg, complete, report);
  report.timings["total"] = seconds_since(start);
  return report;
}

SpectrumReport run_reproduce(const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  SpectrumReport report;
  report.config = cfg;
  const int id = cfg.table;
  const Complex q{kTableQ, 0.0};
  switch (table_kind(id)) {
    case TableKind::open_spectrum: {
      const auto& table = open_table(id);
      for (std::size_t s = 0; s < kTableSpins.size(); ++s) {
        const auto spin_start = std::chrono::steady_clock::now();
        const auto params = ModelParams::make(table.n_sites, kTableSpins[s], q);
        report.spectra.push_back(compute_spectrum(params, ChainKind::open, {}, {}, cfg.search, cfg.rank_tolerance));
        std::vector<ExpectedLine> rows;
        for (const auto& row : table.rows) rows.push_back({row.m, row.roots, std::nullopt, row.degeneracy[s]});
        spectrum_checks(report.spectra.back(), cfg, true, report);
        match_lines(report.spectra.back(), rows, table.totals[s], report.mismatches);
        report.timings["s=" + format_spin(kTableSpins[s])] = seconds_since(spin_start);
      }
      break;
    }
    case TableKind::dimensions: {
      const auto& table = dimension_table(id);
      const int n = table.n_sites;
      std::vector<int> ks;
      for (int k = n % 2; k <= n; k += 2) ks.push_back(k);
      std::array<long long, 3> sums{};
      for (const int k : ks) {
        DimensionRow row{k, multiplicity(n, k), {}};
        for (std::size_t s = 0; s < kTableSpins.size(); ++s) {
          row.dims[s] = chebyshev_dim(k, kTableSpins[s] + 1);
          sums[s] += row.nu * row.dims[s];
        }
        report.dimensions.push_back(row);
        const auto it = std::find_if(table.rows.begin(), table.rows.end(), [&](const DimensionRow& r) { return r.k == k; });
        if (it == table.rows.end()) {
          report.mismatches.push_back("k=" + std::to_string(k) + " missing from the reference table");
          continue;
        }
        if (it->nu != row.nu) {
          report.mismatches.push_back("k=" + std::to_string(k) + ": nu " + std::to_string(row.nu) + ", expected " +
                                      std::to_string(it->nu));
        }
        for (std::size_t s = 0; s < kTableSpins.size(); ++s) {
          if (it->dims[s] != row.dims[s]) {
            report.mismatches.push_back("k=" + std::to_string(k) + " s=" + format_spin(kTableSpins[s]) + ": dim " +
                                        std::to_string(row.dims[s]) + ", expected " + std::to_string(it->dims[s]));
          }
        }
      }
      if (table.rows.size() != ks.size()) report.mismatches.push_back("reference table has extra rows");
      for (std::size_t s = 0; s < kTableSpins.size(); ++s) {
        const long long expected = int_pow(kTableSpins[s] + 1, n);
        if (sums[s] != expected) {
          report.mismatches.push_back("s=" + format_spin(kTableSpins[s]) + ": sum nu p = " + std::to_string(sums[s]) +
                                      ", expected " + std::to_string(expected));
        }
      }
      break;
    }
    case TableKind::closed_spectrum: {
      const auto& table = closed_table(id);
      for (std::size_t s = 0; s < kTableSpins.size(); ++s) {
        const auto spin_start = std::chrono::steady_clock::now();
        const auto params = ModelParams::make(table.n_sites, kTableSpins[s], q);
        report.spectra.push_back(compute_spectrum(params, ChainKind::closed, {}, {}, cfg.search, cfg.rank_tolerance));
        std::vector<ExpectedLine> rows;
        for (const auto& row : table.rows[s]) rows.push_back({row.m, row.roots, row.kappa, row.degeneracy});
        spectrum_checks(report.spectra.back(), cfg, true, report);
        match_lines(report.spectra.back(), rows, table.totals[s], report.mismatches);
        report.timings["s=" + format_spin(kTableSpins[s])] = seconds_since(spin_start);
      }
      break;
    }
  }
  report.timings["total"] = seconds_since(start);
  return report;
}

SpectrumReport run_verify(const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  SpectrumReport report;
  report.config = cfg;
  VerifyOptions options;
  options.n_sites = cfg.n_sites;
  options.twice_spin = cfg.twice_spin;
  options.q = cfg.q;
  options.q_branch = cfg.q_branch;
  options.m_list = cfg.m_list;
  options.inhomogeneous = cfg.inhomogeneous;
  options.configurations = cfg.configurations;
  options.search = cfg.search;
  options.seed = cfg.search.seed;
  report.checks = run_suite(cfg.suite, options);
  for (const auto& c : report.checks) {
    if (!c.pass()) {
      std::ostringstream msg;
      msg << c.suite << ": " << c.name << " residual " << c.residual << " > " << c.tolerance;
      report.mismatches.push_back(msg.str());
    }
  }
  report.timings["total"] = seconds_since(start);
  return report;
}

SpectrumReport run(const RunConfig& cfg) {
  switch (cfg.mode) {
    case Mode::solve:
      return run_solve(cfg);
    case Mode::reproduce:
      return run_reproduce(cfg);
    case Mode::verify:
      return run_verify(cfg);
  }
  throw UsageError("unknown mode");
}

bool roots_match(const Roots& found, const Roots& expected, ChainKind chain, Complex q, double rel_tol) {
  if (found.size() != expected.size()) return false;
  std::vector<std::size_t> perm(found.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  auto close = [&](Complex u, Complex target) {
    std::vector<Complex> images{u, -u};
    if (chain == ChainKind::open) {
      images.push_back(1.0 / (q * u));
      images.push_back(-1.0 / (q * u));
    }
    return std::any_of(images.begin(), images.end(),
                       [&](Complex z) { return std::abs(z - target) <= rel_tol * std::abs(target); });
  };
  do {
    bool all = true;
    for (std::size_t k = 0; k < expected.size() && all; ++k) all = close(found[perm[k]], expected[k]);
    if (all) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

json to_json(const SpectrumReport& report) {
  json spectra = json::array();
  for (const auto& sp : report.spectra) {
    json census = json::array();
    for (const auto& c : sp.census) {
      census.push_back({{"m", c.m},
                        {"l", optional_json(c.l)},
                        {"found", c.found},
                        {"expected", optional_json(c.expected)},
                        {"expected_degeneracy", optional_json(c.expected_degeneracy)},
                        {"rejected", c.rejected},
                        {"underdetermined", c.underdetermined}});
    }
    json lines = json::array();
    for (const auto& line : sp.lines) {
      json roots = json::array();
      for (const auto& u : line.solution.roots) roots.push_back(complex_json(u));
      json samples = json::array();
      for (const auto& s : line.lambda_samples) samples.push_back({{"u", complex_json(s.u)}, {"value", complex_json(s.value)}});
      lines.push_back({{"m", line.solution.size()},
                       {"sector", line.solution.sector},
                       {"roots", roots},
                       {"kappa", complex_json(line.solution.kappa)},
                       {"residual_norm", line.solution.residual_norm},
                       {"lambda", samples},
                       {"energy", optional_complex(line.energy)},
                       {"degeneracy_measured", line.degeneracy_measured},
                       {"degeneracy_predicted", optional_json(line.degeneracy_predicted)},
                       {"degeneracy_ambiguous", line.degeneracy_ambiguous},
                       {"shift_eigenvalue", optional_complex(line.shift_eigenvalue)}});
    }
    spectra.push_back({{"chain", to_string(sp.chain)},
                       {"N", sp.n_sites},
                       {"spin", format_spin(sp.twice_spin)},
                       {"q", complex_json(sp.q)},
                       {"total_degeneracy", sp.total_degeneracy},
                       {"expected_total", sp.expected_total},
                       {"sum_rule", sp.sum_rule()},
                       {"trace_residual", sp.trace_residual},
                       {"census", census},
                       {"lines", lines}});
  }
  json dimensions = json::array();
  for (const auto& row : report.dimensions) {
    json dims = json::object();
    for (std::size_t s = 0; s < kTableSpins.size(); ++s) dims[format_spin(kTableSpins[s])] = row.dims[s];
    dimensions.push_back({{"k", row.k}, {"nu", row.nu}, {"dims", dims}});
  }
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"suite", c.suite}, {"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance},
                      {"pass", c.pass()}});
  }
  return {{"schema", "tl-lab/1"},
          {"config", to_json(report.config)},
          {"pass", report.pass()},
          {"spectra", spectra},
          {"dimensions", dimensions},
          {"checks", checks},
          {"mismatches", report.mismatches},
          {"warnings", report.warnings},
          {"timings", report.timings}};
}

SpectrumReport report_from_json(const json& j) {
  try {
    if (j.at("schema").get<std::string>() != "tl-lab/1") throw UsageError("unsupported report schema");
    SpectrumReport report;
    report.config = run_config_from_json(j.at("config"));
    for (const auto& js : j.at("spectra")) {
      SpinSpectrum sp;
      sp.chain = parse_chain(js.at("chain").get<std::string>());
      sp.n_sites = js.at("N").get<int>();
      sp.twice_spin = parse_twice_spin(js.at("spin").get<std::string>());
      sp.q = complex_from_json(js.at("q"));
      sp.total_degeneracy = js.at("total_degeneracy").get<long long>();
      sp.expected_total = js.at("expected_total").get<long long>();
      sp.trace_residual = js.at("trace_residual").get<double>();
      for (const auto& jc : js.at("census")) {
        SectorCensus c;
        c.m = jc.at("m").get<int>();
        c.l = optional_from<int>(jc, "l");
        c.found = jc.at("found").get<int>();
        c.expected = optional_from<int>(jc, "expected");
        c.expected_degeneracy = optional_from<long long>(jc, "expected_degeneracy");
        c.rejected = jc.at("rejected").get<int>();
        c.underdetermined = jc.at("underdetermined").get<int>();
        sp.census.push_back(c);
      }
      for (const auto& jl : js.at("lines")) {
        SpectralLine line;
        line.solution.kind = sp.chain;
        for (const auto& ju : jl.at("roots")) line.solution.roots.push_back(complex_from_json(ju));
        line.solution.sector = jl.at("sector").get<int>();
        line.solution.kappa = complex_from_json(jl.at("kappa"));
        line.solution.residual_norm = jl.at("residual_norm").get<double>();
        for (const auto& s : jl.at("lambda")) {
          line.lambda_samples.push_back({complex_from_json(s.at("u")), complex_from_json(s.at("value"))});
        }
        line.energy = optional_complex_from(jl, "energy");
        line.degeneracy_measured = jl.at("degeneracy_measured").get<int>();
        line.degeneracy_predicted = optional_from<int>(jl, "degeneracy_predicted");
        line.degeneracy_ambiguous = jl.at("degeneracy_ambiguous").get<bool>();
        line.shift_eigenvalue = optional_complex_from(jl, "shift_eigenvalue");
        sp.lines.push_back(std::move(line));
      }
      report.spectra.push_back(std::move(sp));
    }
    for (const auto& jd : j.at("dimensions")) {
      DimensionRow row{jd.at("k").get<int>(), jd.at("nu").get<long long>(), {}};
      for (std::size_t s = 0; s < kTableSpins.size(); ++s) {
        row.dims[s] = jd.at("dims").at(format_spin(kTableSpins[s])).get<long long>();
      }
      report.dimensions.push_back(row);
    }
    for (const auto& jc : j.at("checks")) {
      report.checks.push_back({jc.at("suite").get<std::string>(), jc.at("name").get<std::string>(),
                               jc.at("residual").get<double>(), jc.at("tolerance").get<double>()});
    }
    report.mismatches = j.at("mismatches").get<std::vector<std::string>>();
    report.warnings = j.at("warnings").get<std::vector<std::string>>();
    report.timings = j.at("timings").get<std::map<std::string, double>>();
    return report;
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed report: ") + e.what());
  }
}

std::string format_complex(Complex z, int digits) {
  const double modulus = std::abs(z);
  const double negligible = 0.5 * std::pow(10.0, -digits) * modulus;
  const double re = std::abs(z.real()) <= negligible ? 0.0 : z.real();
  const double im = std::abs(z.imag()) <= negligible ? 0.0 : z.imag();
  std::ostringstream out;
  out << std::setprecision(digits);
  if (im == 0.0) {
    out << re;
  } else if (re == 0.0) {
    out << im << "i";
  } else {
    out << re << (im < 0.0 ? "-" : "+") << std::abs(im) << "i";
  }
  return out.str();
}

std::optional<std::string> exact_complex(Complex z, double tol) {
  const double modulus = std::abs(z);
  if (modulus <= tol) return "0";
  const auto rho = as_rational(modulus, tol);
  const double angle = std::arg(z) / kPi;
  std::optional<Rational> phase;
  for (long long den = 1; den <= 12 && !phase; ++den) {
    const double num = std::round(angle * static_cast<double>(den));
    if (std::abs(angle - num / static_cast<double>(den)) * kPi * modulus <= tol) {
      phase = Rational{static_cast<long long>(num), den};
    }
  }
  if (rho && phase) {
    // Split the phase into a power of i and a remainder with the smallest
    // denominator, preferring the smaller remainder on ties.
    struct Base {
      double angle;
      const char* text;
    };
    static constexpr Base bases[] = {{0.0, ""}, {0.5, "i"}, {1.0, "-"}, {-0.5, "-i"}};
    const double a = static_cast<double>(phase->num) / static_cast<double>(phase->den);
    const Base* best = nullptr;
    Rational best_rem{0, 1};
    for (const auto& b : bases) {
      double rem = a - b.angle;
      while (rem > 1.0 + 1e-12) rem -= 2.0;
      while (rem <= -1.0 + 1e-12) rem += 2.0;
      std::optional<Rational> r;
      for (long long den = 1; den <= 24 && !r; ++den) {
        const double num = std::round(rem * static_cast<double>(den));
        if (std::abs(rem - num / static_cast<double>(den)) < 1e-9) r = Rational{static_cast<long long>(num), den};
      }
      if (!r) continue;
      const bool better = best == nullptr || r->den < best_rem.den ||
                          (r->den == best_rem.den && std::abs(r->num) < std::abs(best_rem.num));
      if (better) {
        best = &b;
        best_rem = *r;
      }
    }
    if (best != nullptr) {
      const bool unit = rho->num == rho->den;
      const std::string magnitude = unit ? "" : rational_text(rho->num, rho->den);
      const std::string base = best->text;
      if (best_rem.num == 0) {
        if (base.empty()) return unit ? "1" : magnitude;
        if (base == "-") return unit ? "-1" : "-" + magnitude;
        if (base == "i") return magnitude + "i";
        return "-" + magnitude + "i";
      }
      std::string prefix;
      if (base == "-") {
        prefix = "-" + magnitude;
      } else if (base == "i") {
        prefix = magnitude + "i";
      } else if (base == "-i") {
        prefix = "-" + magnitude + "i";
      } else {
        prefix = magnitude;
      }
      return prefix + exponent_text(best_rem);
    }
  }
  const auto re = as_rational(z.real(), tol);
  const auto im = as_rational(z.imag(), tol);
  if (re && im) {
    std::string out = re->num == 0 ? "" : rational_text(re->num, re->den);
    if (im->num != 0) {
      const std::string mag = std::abs(im->num) == im->den ? "" : rational_text(std::abs(im->num), im->den);
      if (im->num < 0) {
        out += "-";
      } else if (!out.empty()) {
        out += "+";
      }
      out += mag + "i";
    }
    return out.empty() ? "0" : out;
  }
  return std::nullopt;
}

std::string format_kappa(Complex kappa) {
  if (auto exact = exact_complex(kappa)) return *exact;
  return format_complex(kappa);
}

std::string format_csv(const SpectrumReport& report) {
  std::ostringstream out;
  out << std::setprecision(17);
  if (report.config.mode == Mode::verify) {
    out << "suite,name,residual,tolerance,pass\n";
    for (const auto& c : report.checks) {
      out << c.suite << ",\"" << c.name << "\"," << c.residual << "," << c.tolerance << "," << (c.pass() ? 1 : 0)
          << "\n";
    }
    return out.str();
  }
  if (!report.dimensions.empty()) {
    out << "k,nu";
    for (const int s : kTableSpins) out << ",dim_s=" << format_spin(s);
    out << "\n";
    for (const auto& row : report.dimensions) {
      out << row.k << "," << row.nu;
      for (const auto d : row.dims) out << "," << d;
      out << "\n";
    }
    return out.str();
  }
  const auto spins = report_spins(report);
  out << "chain,M,l,roots,kappa,lambda_u0,energy,residual_norm";
  for (const int s : spins) out << ",deg_s=" << format_spin(s);
  out << "\n";
  for (const auto& row : merge_rows(report)) {
    const auto& line = *row.line;
    std::string roots;
    for (std::size_t k = 0; k < line.solution.roots.size(); ++k) {
      if (k > 0) roots += ";";
      roots += format_complex(line.solution.roots[k], 12);
    }
    out << to_string(row.chain) << "," << line.solution.size() << ","
        << (row.chain == ChainKind::closed ? std::to_string(line.solution.sector) : "") << "," << roots << ","
        << format_complex(line.solution.kappa, 12) << "," << format_complex(line.lambda_samples.front().value, 12)
        << "," << (line.energy ? format_complex(*line.energy, 12) : "") << "," << line.solution.residual_norm;
    for (const int s : spins) {
      const auto it = row.degeneracy.find(s);
      out << ",";
      if (it != row.degeneracy.end()) out << it->second;
    }
    out << "\n";
  }
  out << "total,,,,,,,";
  for (const int s : spins) {
    const auto it = std::find_if(report.spectra.begin(), report.spectra.end(),
                                 [&](const SpinSpectrum& sp) { return sp.twice_spin == s; });
    out << "," << it->total_degeneracy;
  }
  out << "\n";
  return out.str();
}

std::string format_text(const SpectrumReport& report) {
  std::ostringstream out;
  out << title(report) << "\n\n";
  std::vector<std::vector<std::string>> cells;
  if (report.config.mode == Mode::verify) {
    cells.push_back({"check", "residual", "tolerance", "status"});
    for (const auto& c : report.checks) {
      std::ostringstream r;
      std::ostringstream t;
      r << std::setprecision(3) << c.residual;
      t << std::setprecision(3) << c.tolerance;
      cells.push_back({c.name, r.str(), t.str(), c.pass() ? "ok" : "FAIL"});
    }
  } else if (!report.dimensions.empty()) {
    std::vector<std::string> header{"k", "nu_k"};
    for (const int s : kTableSpins) header.push_back("dim s=" + format_spin(s));
    cells.push_back(header);
    for (const auto& row : report.dimensions) {
      std::vector<std::string> r{std::to_string(row.k), std::to_string(row.nu)};
      for (const auto d : row.dims) r.push_back(std::to_string(d));
      cells.push_back(r);
    }
  } else {
    const auto spins = report_spins(report);
    const bool closed = !report.spectra.empty() && report.spectra.front().chain == ChainKind::closed;
    std::vector<std::string> header{"M", "roots"};
    if (closed) header.push_back("kappa");
    for (const int s : spins) header.push_back("s=" + format_spin(s));
    cells.push_back(header);
    for (const auto& row : merge_rows(report)) {
      const auto& sol = row.line->solution;
      std::vector<std::string> r{std::to_string(sol.size()), roots_text(sol.roots, 6)};
      if (closed) r.push_back(format_kappa(sol.kappa));
      for (const int s : spins) {
        const auto it = row.degeneracy.find(s);
        r.push_back(it == row.degeneracy.end() ? "" : std::to_string(it->second));
      }
      cells.push_back(r);
    }
    std::vector<std::string> totals{"total", ""};
    if (closed) totals.push_back("");
    for (const int s : spins) {
      const auto it = std::find_if(report.spectra.begin(), report.spectra.end(),
                                   [&](const SpinSpectrum& sp) { return sp.twice_spin == s; });
      totals.push_back(std::to_string(it->total_degeneracy));
    }
    cells.push_back(totals);
  }
  render_table(out, cells);
  for (const auto& w : report.warnings) out << "\nwarning: " << w;
  if (!report.warnings.empty()) out << "\n";
  out << "\n";
  for (const auto& m : report.mismatches) out << "mismatch: " << m << "\n";
  out << (report.pass() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

std::string format_report(const SpectrumReport& report, OutputFormat format) {
  switch (format) {
    case OutputFormat::json:
      return to_json(report).dump(2) + "\n";
    case OutputFormat::csv:
      return format_csv(report);
    case OutputFormat::text:
      return format_text(report);
  }
  throw UsageError("unknown output format");
}

void emit_report(const SpectrumReport& report, OutputFormat format, const std::string& path) {
  const std::string body = format_report(report, format);
  if (path.empty() || path == "-") {
    std::cout << body;
    std::cout.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path + "': " + std::strerror(errno));
  file << body;
  file.close();
  if (!file) throw std::runtime_error("cannot write '" + path + "': " + std::strerror(errno));
}

}  // namespace tl
