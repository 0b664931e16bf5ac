#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "tl/report.hpp"

using namespace tl;

namespace {

RunConfig reproduce_config(int table, OutputFormat format = OutputFormat::json) {
  RunConfig cfg;
  cfg.mode = Mode::reproduce;
  cfg.table = table;
  cfg.format = format;
  cfg.search.seeds = 400;
  return cfg;
}

int count_lines(const std::string& text) {
  int n = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++n;
  return n;
}

}  // namespace

TEST_CASE("complex parsing") {
  CHECK(parse_complex("0.5") == Complex(0.5));
  CHECK(parse_complex("-1") == Complex(-1.0));
  CHECK(parse_complex("0.3+0.2i") == Complex(0.3, 0.2));
  CHECK(parse_complex("0.1-2i") == Complex(0.1, -2.0));
  CHECK(parse_complex("i") == Complex(0.0, 1.0));
  CHECK(parse_complex("-i") == Complex(0.0, -1.0));
  CHECK(parse_complex("1e-1") == Complex(0.1));
  CHECK_THROWS_AS(parse_complex(""), UsageError);
  CHECK_THROWS_AS(parse_complex("abc"), UsageError);
  CHECK(parse_complex("1+2j") == Complex(1.0, 2.0));
  CHECK_THROWS_AS(parse_complex("1+2k"), UsageError);
}

TEST_CASE("enum parsing") {
  CHECK(parse_chain("open") == ChainKind::open);
  CHECK(parse_chain("closed") == ChainKind::closed);
  CHECK_THROWS_AS(parse_chain("periodic"), UsageError);
  CHECK(parse_format("csv") == OutputFormat::csv);
  CHECK_THROWS_AS(parse_format("xml"), UsageError);
  CHECK(parse_mode("verify") == Mode::verify);
  CHECK(to_string(Mode::reproduce) == "reproduce");
}

TEST_CASE("exact complex formatting") {
  CHECK(exact_complex(kI) == "i");
  CHECK(exact_complex(-kI) == "-i");
  CHECK(exact_complex(Complex(-1.0)) == "-1");
  CHECK(exact_complex(Complex(0.5)) == "1/2");
  CHECK(exact_complex(std::polar(1.0, kPi / 3.0)) == "e^{iπ/3}");
  CHECK(exact_complex(kI * std::polar(1.0, -kPi / 3.0)) == "ie^{-iπ/3}");
  CHECK(exact_complex(Complex(1.0, 2.0)) == "1+2i");
  CHECK_FALSE(exact_complex(Complex(0.381966)).has_value());
  CHECK(format_kappa(Complex(0.381966)) == "0.381966");
  CHECK(format_complex(Complex(1.34164, 0.447214)) == "1.34164+0.447214i");
  CHECK(format_complex(Complex(1.41421, 1e-14)) == "1.41421");
}

TEST_CASE("run configuration validation") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.n_sites = 0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = reproduce_config(9);
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.m_list = {5};
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.mode = Mode::verify;
  cfg.suite = "no-such-suite";
  CHECK_THROWS_AS(cfg.validate(), UsageError);
}

TEST_CASE("run configuration JSON round trip") {
  RunConfig cfg;
  cfg.chain = ChainKind::closed;
  cfg.n_sites = 3;
  cfg.twice_spin = 3;
  cfg.q = Complex(0.3, 0.2);
  cfg.m_list = {0, 1};
  cfg.search.seeds = 77;
  const auto j = to_json(cfg);
  CHECK(j["spin"] == "3/2");
  const auto back = run_config_from_json(j);
  CHECK(to_json(back) == j);
  const auto partial = run_config_from_json(nlohmann::json{{"N", 4}});
  CHECK(partial.n_sites == 4);
  CHECK(partial.twice_spin == 1);
}

TEST_CASE("table 1 reproduces and round-trips through JSON") {
  const auto report = run(reproduce_config(1));
  CHECK(report.pass());
  CHECK(report.exit_code() == 0);
  REQUIRE(report.spectra.size() == 3);
  CHECK(report.spectra[0].total_degeneracy == 4);
  CHECK(report.spectra[1].total_degeneracy == 9);
  CHECK(report.spectra[2].total_degeneracy == 16);
  const auto j = to_json(report);
  CHECK(j["schema"] == "tl-lab/1");
  CHECK(to_json(report_from_json(j)) == j);
  const std::string text = format_text(report);
  CHECK(text.find("PASS") != std::string::npos);
}

TEST_CASE("table 3 CSV has one row per line plus totals") {
  const auto report = run(reproduce_config(3, OutputFormat::csv));
  CHECK(report.pass());
  const std::string csv = format_csv(report);
  CHECK(count_lines(csv) == 1 + 6 + 1);
  CHECK(csv.find("deg_s=1/2") != std::string::npos);
}

TEST_CASE("dimension tables") {
  const auto report = run(reproduce_config(6));
  CHECK(report.pass());
  REQUIRE(report.dimensions.size() == 3);
  CHECK(report.dimensions[2].nu == 1);
  CHECK(report.dimensions[2].dims[2] == 209);
}

TEST_CASE("table 8 text shows exact twists") {
  auto cfg = reproduce_config(8, OutputFormat::text);
  const auto report = run(cfg);
  CHECK(report.pass());
  const std::string text = format_text(report);
  CHECK(text.find("ie^{iπ/3}") != std::string::npos);
  CHECK(text.find("-i") != std::string::npos);
}

TEST_CASE("verify mode") {
  RunConfig cfg;
  cfg.mode = Mode::verify;
  cfg.suite = "ybe";
  cfg.twice_spin = 2;
  const auto report = run(cfg);
  CHECK(report.exit_code() == 0);
  REQUIRE_FALSE(report.checks.empty());
  for (const auto& c : report.checks) CHECK(c.residual <= 1e-10);
}

TEST_CASE("solve mode with a restricted sector list skips completeness") {
  RunConfig cfg;
  cfg.n_sites = 3;
  cfg.m_list = {1};
  cfg.search.seeds = 300;
  const auto report = run(cfg);
  CHECK(report.pass());
  REQUIRE(report.spectra.size() == 1);
  CHECK(report.spectra[0].lines.size() == 2);
}

TEST_CASE("root matching uses the per-root images") {
  const Complex q = 0.5;
  const Roots r{Complex(1.2, 0.3), Complex(0.8, -0.5)};
  CHECK(roots_match({r[1], r[0]}, r, ChainKind::open, q));
  CHECK(roots_match({-1.0 / (q * r[0]), r[1]}, r, ChainKind::open, q));
  CHECK(roots_match({-r[0], r[1]}, r, ChainKind::closed, q));
  CHECK_FALSE(roots_match({1.0 / (q * r[0]), r[1]}, r, ChainKind::closed, q));
  CHECK_FALSE(roots_match({r[0]}, r, ChainKind::open, q));
}

TEST_CASE("emit_report reports I/O failures") {
  const auto report = run(reproduce_config(4));
  CHECK_THROWS_AS(emit_report(report, OutputFormat::json, "/nonexistent-dir/out.json"), std::runtime_error);
}
