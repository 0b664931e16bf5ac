#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tl/report.hpp"

namespace {

constexpr int kExitUsage = 2;

struct CommonFlags {
  std::optional<std::string> chain;
  std::optional<int> n_sites;
  std::optional<std::string> spin;
  std::optional<int> twice_spin;
  std::optional<std::string> q;
  std::optional<int> q_branch;
  std::vector<int> m_list;
  std::vector<int> l_list;
  std::optional<int> seeds;
  std::optional<double> tolerance;
  std::optional<double> rank_tolerance;
  std::optional<std::uint64_t> seed;
  std::optional<int> table;
  std::optional<std::string> suite;
  bool inhomogeneous = false;
  std::optional<int> configurations;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> config_file;
};

void add_model_options(CLI::App* app, CommonFlags& f) {
  app->add_option("--N", f.n_sites, "number of sites");
  app->add_option("--spin", f.spin, "spin as 1/2, 1, 3/2 or 0.5, 1.5");
  app->add_option("--twice-spin", f.twice_spin, "twice the spin");
  app->add_option("--q", f.q, "deformation parameter, e.g. 0.5 or 0.3+0.2i");
  app->add_option("--q-branch", f.q_branch, "index of the Q root");
}

void add_output_options(CLI::App* app, CommonFlags& f) {
  app->add_option("--out", f.out, "output path (stdout when omitted)");
  app->add_option("--format", f.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  app->add_option("--seeds", f.seeds, "Newton starting points per sector");
  app->add_option("--seed", f.seed, "RNG seed (TL_LAB_SEED overrides the default)");
  app->add_option("--config", f.config_file, "JSON file with RunConfig fields");
}

tl::RunConfig build_config(tl::Mode mode, const CommonFlags& f) {
  tl::RunConfig cfg;
  cfg.search.seed = tl::default_seed();
  if (f.config_file) {
    std::ifstream in(*f.config_file);
    if (!in) throw tl::UsageError("cannot read config file '" + *f.config_file + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw tl::UsageError(std::string("config file: ") + e.what());
    }
    cfg = tl::run_config_from_json(j, cfg);
  }
  cfg.mode = mode;
  if (f.chain) cfg.chain = tl::parse_chain(*f.chain);
  if (f.n_sites) cfg.n_sites = *f.n_sites;
  if (f.spin && f.twice_spin) throw tl::UsageError("give either --spin or --twice-spin");
  if (f.spin) cfg.twice_spin = tl::parse_twice_spin(*f.spin);
  if (f.twice_spin) cfg.twice_spin = *f.twice_spin;
  if (f.q) cfg.q = tl::parse_complex(*f.q);
  if (f.q_branch) cfg.q_branch = *f.q_branch;
  if (!f.m_list.empty()) cfg.m_list = f.m_list;
  if (!f.l_list.empty()) cfg.l_list = f.l_list;
  if (f.seeds) cfg.search.seeds = *f.seeds;
  if (f.tolerance) cfg.search.tolerance = *f.tolerance;
  if (f.rank_tolerance) cfg.rank_tolerance = *f.rank_tolerance;
  if (f.seed) cfg.search.seed = *f.seed;
  if (f.table) cfg.table = *f.table;
  if (f.suite) cfg.suite = *f.suite;
  if (f.inhomogeneous) cfg.inhomogeneous = true;
  if (f.configurations) cfg.configurations = *f.configurations;
  if (f.out) cfg.out_path = *f.out;
  if (f.format) cfg.format = tl::parse_format(*f.format);
  if (mode == tl::Mode::reproduce && cfg.table == 0) throw tl::UsageError("reproduce needs --table");
  if (mode == tl::Mode::verify && cfg.suite.empty()) throw tl::UsageError("verify needs --suite");
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temperley-Lieb spin-chain workbench"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto* solve = app.add_subcommand("solve", "solve the Bethe equations and measure degeneracies");
  solve->add_option("--chain", flags.chain, "open or closed")->check(CLI::IsMember({"open", "closed"}));
  add_model_options(solve, flags);
  solve->add_option("--M", flags.m_list, "sectors (number of roots)")->delimiter(',');
  solve->add_option("--l", flags.l_list, "closed-chain momentum labels")->delimiter(',');
  solve->add_option("--tol", flags.tolerance, "scaled Bethe residual tolerance");
  solve->add_option("--rank-tol", flags.rank_tolerance, "relative pivot threshold for degeneracies");
  add_output_options(solve, flags);

  auto* reproduce = app.add_subcommand("reproduce", "reproduce a reference table (1..8)");
  reproduce->add_option("--table", flags.table, "table id")->required();
  add_output_options(reproduce, flags);

  auto* verify = app.add_subcommand("verify", "run an invariant suite");
  verify->add_option("--suite", flags.suite, "suite name")->required();
  add_model_options(verify, flags);
  verify->add_option("--M", flags.m_list, "sectors")->delimiter(',');
  verify->add_flag("--inhomogeneous", flags.inhomogeneous, "random generic inhomogeneities");
  verify->add_option("--configs", flags.configurations, "random configurations per sector");
  add_output_options(verify, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    tl::Mode mode = tl::Mode::solve;
    if (reproduce->parsed()) mode = tl::Mode::reproduce;
    if (verify->parsed()) mode = tl::Mode::verify;
    const tl::RunConfig cfg = build_config(mode, flags);
    const tl::SpectrumReport report = tl::run(cfg);
    tl::emit_report(report, cfg.format, cfg.out_path);
    if (!report.pass()) {
      for (const auto& m : report.mismatches) std::cerr << "mismatch: " << m << "\n";
    }
    return report.exit_code();
  } catch (const tl::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tl::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
