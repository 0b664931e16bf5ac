#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tl/solver.hpp"
#include "tl/tables.hpp"
#include "tl/verify.hpp"

namespace tl {

enum class Mode { solve, reproduce, verify };
enum class OutputFormat { json, csv, text };

Mode parse_mode(const std::string& text);
OutputFormat parse_format(const std::string& text);
std::string to_string(Mode mode);
std::string to_string(OutputFormat format);
ChainKind parse_chain(const std::string& text);

/// Parses "0.5", "-1", "0.3+0.2i", "0.1-2i", "i", "-i".
Complex parse_complex(const std::string& text);

struct RunConfig {
  Mode mode = Mode::solve;
  ChainKind chain = ChainKind::open;
  int n_sites = 2;
  int twice_spin = 1;
  Complex q{0.5, 0.0};
  int q_branch = 0;
  /// Empty lists mean every sector.
  std::vector<int> m_list;
  std::vector<int> l_list;
  SearchConfig search;
  double rank_tolerance = 1e-8;
  /// Relative tolerance of the trace identity.
  double trace_tolerance = 1e-6;
  int table = 0;
  std::string suite;
  bool inhomogeneous = false;
  int configurations = 50;
  std::string out_path;
  OutputFormat format = OutputFormat::json;

  /// Throws UsageError when a mode-specific field is missing or invalid.
  void validate() const;
};

nlohmann::json to_json(const SearchConfig& cfg);
SearchConfig search_config_from_json(const nlohmann::json& j, SearchConfig base = {});
nlohmann::json to_json(const RunConfig& cfg);
/// Missing keys keep the values of base.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});

/// Spectrum of one (chain, N, s, q).
struct SpinSpectrum {
  ChainKind chain = ChainKind::open;
  int n_sites = 2;
  int twice_spin = 1;
  Complex q{0.5, 0.0};
  std::vector<SpectralLine> lines;
  std::vector<SectorCensus> census;
  long long total_degeneracy = 0;
  long long expected_total = 0;
  /// max over probes of |sum deg Lambda - tr t| / |tr t|.
  double trace_residual = 0.0;

  bool sum_rule() const { return total_degeneracy == expected_total; }
};

/// Solves every requested sector, measures degeneracies at the default
/// probe and runs the trace identity at three probes. For the closed chain,
/// solutions are deduplicated across sectors and lines whose eigenvalue is
/// absent from the spectrum are dropped.
SpinSpectrum compute_spectrum(const ModelParams& params, ChainKind chain, const std::vector<int>& m_list,
                              const std::vector<int>& l_list, const SearchConfig& search, double rank_tolerance);

inline constexpr std::array<Complex, 3> kTraceProbes{kDefaultProbe, kSecondProbe, Complex{1.17, 0.23}};

struct SpectrumReport {
  RunConfig config;
  std::vector<SpinSpectrum> spectra;
  std::vector<DimensionRow> dimensions;
  std::vector<CheckResult> checks;
  std::vector<std::string> mismatches;
  std::vector<std::string> warnings;
  std::map<std::string, double> timings;

  bool pass() const { return mismatches.empty(); }
  int exit_code() const { return pass() ? 0 : 1; }
};

SpectrumReport run_solve(const RunConfig& cfg);
SpectrumReport run_reproduce(const RunConfig& cfg);
SpectrumReport run_verify(const RunConfig& cfg);
/// Dispatches on cfg.mode.
SpectrumReport run(const RunConfig& cfg);

/// Roots equal up to ordering and the per-root images used for
/// canonicalisation, each within rel_tol of the expected modulus.
bool roots_match(const Roots& found, const Roots& expected, ChainKind chain, Complex q, double rel_tol = 1e-5);

nlohmann::json to_json(const SpectrumReport& report);
SpectrumReport report_from_json(const nlohmann::json& j);

std::string format_csv(const SpectrumReport& report);
std::string format_text(const SpectrumReport& report);
std::string format_report(const SpectrumReport& report, OutputFormat format);

/// Writes to path, or to stdout when path is empty or "-". I/O failures
/// throw std::runtime_error with the system message.
void emit_report(const SpectrumReport& report, OutputFormat format, const std::string& path);

/// Six significant digits, imaginary part dropped when negligible.
std::string format_complex(Complex z, int digits = 6);

/// Exact string such as "i", "-1", "e^{iπ/3}" or "ie^{-iπ/3}" when z is
/// within tol of a rational (denominator <= 12) times e^{iπ j/n} (n <= 12),
/// or a Gaussian rational; nullopt otherwise.
std::optional<std::string> exact_complex(Complex z, double tol = 1e-9);

/// exact_complex or format_complex.
std::string format_kappa(Complex kappa);

}  // namespace tl
