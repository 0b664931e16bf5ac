#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "tl/aba.hpp"
#include "tl/report.hpp"

using namespace tl;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  if (o.pass) o.detail = why;
  o.pass = false;
}

std::string spin_label(int ts) { return "s=" + format_spin(ts); }

Outcome criterion_tables() {
  Outcome o;
  const auto start = Clock::now();
  for (int table = 1; table <= 8; ++table) {
    RunConfig cfg;
    cfg.mode = Mode::reproduce;
    cfg.table = table;
    cfg.search.seed = default_seed();
    const auto report = run(cfg);
    if (!report.pass()) fail(o, "table " + std::to_string(table) + ": " + report.mismatches.front());
  }
  const double elapsed = seconds_since(start);
  if (elapsed > 120.0) fail(o, "took " + std::to_string(elapsed) + " s");
  if (o.pass) o.detail = "tables 1-8 in " + std::to_string(elapsed) + " s";
  return o;
}

Outcome criterion_completeness() {
  Outcome o;
  SearchConfig search;
  search.seed = default_seed();
  for (int n = 1; n <= 5; ++n) {
    for (int ts = 1; ts <= 3; ++ts) {
      const auto p = ModelParams::make(n, ts, 0.5);
      const auto sp = compute_spectrum(p, ChainKind::open, {}, {}, search, 1e-8);
      const std::string tag = "open N=" + std::to_string(n) + " " + spin_label(ts);
      if (!sp.sum_rule()) fail(o, tag + ": total " + std::to_string(sp.total_degeneracy));
      for (const auto& c : sp.census)
        if (!c.complete()) fail(o, tag + ": sector M=" + std::to_string(c.m) + " incomplete");
      for (const auto& line : sp.lines)
        if (line.degeneracy_predicted && *line.degeneracy_predicted != line.degeneracy_measured)
          fail(o, tag + ": degeneracy mismatch");
      if (sp.trace_residual > 1e-6) fail(o, tag + ": trace identity");
    }
  }
  for (int n = 1; n <= 3; ++n) {
    for (int ts = 1; ts <= 3; ++ts) {
      const auto p = ModelParams::make(n, ts, 0.5);
      const auto sp = compute_spectrum(p, ChainKind::closed, {}, {}, search, 1e-8);
      const std::string tag = "closed N=" + std::to_string(n) + " " + spin_label(ts);
      if (sp.trace_residual > 1e-6) fail(o, tag + ": trace residual " + std::to_string(sp.trace_residual));
      if (!sp.sum_rule()) fail(o, tag + ": total " + std::to_string(sp.total_degeneracy));
    }
  }
  if (o.pass) o.detail = "open N<=5 and closed N<=3 for s=1/2,1,3/2";
  return o;
}

Outcome criterion_identities() {
  Outcome o;
  double worst = 0.0;
  const std::vector<std::string> suites{"tl-algebra", "ybe", "transfer-identities", "functional-relations", "symmetry"};
  for (int n = 1; n <= 3; ++n) {
    for (int ts = 1; ts <= 3; ++ts) {
      for (const auto& suite : suites) {
        for (bool inhom : {false, true}) {
          if (inhom && suite == "symmetry") continue;
          VerifyOptions opt;
          opt.n_sites = n;
          opt.twice_spin = ts;
          opt.inhomogeneous = inhom;
          opt.seed = default_seed();
          for (const auto& c : run_suite(suite, opt)) {
            // finite-difference and large-u limit checks keep their own tolerances
            const bool limit = c.name == "H from t'(1)" || c.name.find("->") != std::string::npos;
            const double tol = limit ? c.tolerance : 1e-9;
            if (c.residual > tol) {
              fail(o, suite + "/" + c.name + " N=" + std::to_string(n) + " " + spin_label(ts) + ": " +
                          std::to_string(c.residual));
            } else if (!limit) {
              worst = std::max(worst, c.residual);
            }
          }
        }
      }
    }
  }
  if (o.pass) o.detail = "worst residual " + std::to_string(worst);
  return o;
}

Outcome criterion_hamiltonian() {
  Outcome o;
  SearchConfig search;
  search.seed = default_seed();
  for (int n = 2; n <= 4; ++n) {
    for (int ts = 1; ts <= 2; ++ts) {
      const auto p = ModelParams::make(n, ts, 0.5);
      const Matrix h = build_hamiltonian(p);
      const double diff = (hamiltonian_from_transfer(p) - h).cwiseAbs().maxCoeff();
      const std::string tag = "N=" + std::to_string(n) + " " + spin_label(ts);
      if (diff > 1e-6) fail(o, tag + ": H from t'(1) differs by " + std::to_string(diff));
      Eigen::ComplexEigenSolver<Matrix> es(h, false);
      const auto sp = compute_spectrum(p, ChainKind::open, {}, {}, search, 1e-8);
      for (const auto& line : sp.lines) {
        const Complex e = energy(line.solution, p);
        double best = 1e300;
        for (Index i = 0; i < es.eigenvalues().size(); ++i) best = std::min(best, std::abs(es.eigenvalues()(i) - e));
        if (best > 1e-6 * std::max(1.0, std::abs(e))) fail(o, tag + ": energy not in spectrum of H");
      }
    }
  }
  if (o.pass) o.detail = "N<=4, s<=1";
  return o;
}

Outcome criterion_aba() {
  Outcome o;
  const auto start = Clock::now();
  for (int ts = 1; ts <= 3; ++ts) {
    const int n_max = ts == 1 ? 6 : 4;
    for (int n = 2; n <= n_max; ++n) {
      VerifyOptions opt;
      opt.n_sites = n;
      opt.twice_spin = ts;
      opt.m_list = {1, 2, 3};
      opt.configurations = 50;
      opt.seed = default_seed();
      opt.search.seed = default_seed();
      for (const auto& c : run_suite("offshell", opt))
        if (!c.pass()) fail(o, "offshell N=" + std::to_string(n) + " " + spin_label(ts) + " " + c.name);
    }
    for (int n = 2; n <= 4; ++n) {
      VerifyOptions opt;
      opt.n_sites = n;
      opt.twice_spin = ts;
      opt.seed = default_seed();
      opt.search.seed = default_seed();
      for (const auto* suite : {"highest-weight", "scalar-products"}) {
        for (const auto& c : run_suite(suite, opt))
          if (!c.pass())
            fail(o, std::string(suite) + " N=" + std::to_string(n) + " " + spin_label(ts) + " " + c.name);
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed > 600.0) fail(o, "took " + std::to_string(elapsed) + " s");
  if (o.pass) o.detail = "in " + std::to_string(elapsed) + " s";
  return o;
}

Outcome criterion_universality() {
  Outcome o;
  SearchConfig search;
  search.seed = default_seed();
  for (int n = 2; n <= 4; ++n) {
    std::vector<SpinSpectrum> spectra;
    for (int ts = 1; ts <= 3; ++ts)
      spectra.push_back(compute_spectrum(ModelParams::make(n, ts, 0.5), ChainKind::open, {}, {}, search, 1e-8));
    const auto& ref = spectra.front();
    for (std::size_t s = 1; s < spectra.size(); ++s) {
      const auto& other = spectra[s];
      if (other.lines.size() != ref.lines.size()) {
        fail(o, "N=" + std::to_string(n) + ": line counts differ across spins");
        continue;
      }
      for (const auto& line : ref.lines) {
        bool matched = false;
        for (const auto& cand : other.lines) {
          if (!roots_match(cand.solution.roots, line.solution.roots, ChainKind::open, 0.5, 1e-8)) continue;
          const auto p = ModelParams::make(n, other.twice_spin, 0.5);
          const Complex a = eval_lambda(kDefaultProbe, line.solution, p);
          const Complex b = eval_lambda(kDefaultProbe, cand.solution, p);
          if (std::abs(a - b) <= 1e-8 * std::abs(a)) matched = true;
        }
        if (!matched) fail(o, "N=" + std::to_string(n) + ": open roots depend on the spin");
      }
    }
  }
  auto closed_m1 = [&](int ts) {
    const auto sp = compute_spectrum(ModelParams::make(3, ts, 0.5), ChainKind::closed, {}, {}, search, 1e-8);
    std::vector<Complex> roots;
    for (const auto& line : sp.lines)
      if (line.solution.roots.size() == 1) roots.push_back(line.solution.roots[0]);
    return roots;
  };
  const auto half = closed_m1(1);
  const auto one = closed_m1(2);
  if (half.empty() || one.empty()) fail(o, "closed N=3 has no M=1 lines");
  double closest = 1e300;
  for (const auto& a : half)
    for (const auto& b : one) closest = std::min({closest, std::abs(a - b), std::abs(a + b)});
  if (closest < 1e-3) fail(o, "closed M=1 roots coincide across spins");
  if (o.pass) o.detail = "closed M=1 roots separated by " + std::to_string(closest);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 reference tables", criterion_tables},
      {"2 completeness", criterion_completeness},
      {"3 algebraic identities", criterion_identities},
      {"4 hamiltonian consistency", criterion_hamiltonian},
      {"5 algebraic bethe ansatz", criterion_aba},
      {"6 universality", criterion_universality},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
