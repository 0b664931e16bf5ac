#include "tl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "bethe_detail.hpp"

namespace tl {

namespace {

constexpr double kAnchorTolerance = 1e-10;
constexpr double kAnchorMinModulus = 1e-4;
constexpr int kAnchorPolishSteps = 40;
constexpr double kCrossingPoleRadius = 1e-3;
constexpr double kRankFloor = 1e-8;

struct Problem {
  ChainKind kind;
  Complex q;
  int n_sites;
  Complex phase;

  template <class S>
  detail::Terms<S> terms(const std::vector<S>& u) const {
    if (kind == ChainKind::open) return detail::open_terms(u, q, n_sites);
    return detail::closed_terms_eliminated(u, phase, q, n_sites);
  }
};

struct Evaluation {
  Vector f;
  Eigen::VectorXd scale;
  double merit = std::numeric_limits<double>::infinity();
};

bool finite(const Roots& x) {
  return std::all_of(x.begin(), x.end(), [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

std::optional<Evaluation> evaluate(const Problem& p, const Roots& x) {
  if (!finite(x)) return std::nullopt;
  try {
    const auto terms = p.terms(x);
    Evaluation e;
    const Index m = static_cast<Index>(terms.size());
    e.f.resize(m);
    e.scale.resize(m);
    e.merit = 0.0;
    for (Index k = 0; k < m; ++k) {
      const auto& [lhs, rhs] = terms[static_cast<std::size_t>(k)];
      e.f(k) = lhs - rhs;
      e.scale(k) = std::abs(lhs) + std::abs(rhs);
      const double r = e.scale(k) == 0.0 ? 0.0 : std::abs(e.f(k)) / e.scale(k);
      if (!std::isfinite(r)) return std::nullopt;
      e.merit = std::max(e.merit, r);
    }
    return e;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

std::vector<Jet> seed_jets(const Roots& x, std::size_t direction) {
  std::vector<Jet> jets;
  for (std::size_t k = 0; k < x.size(); ++k) jets.emplace_back(x[k], k == direction ? Complex{1.0, 0.0} : Complex{0.0, 0.0});
  return jets;
}

Matrix jacobian(const Problem& p, const Roots& x) {
  const Index m = static_cast<Index>(x.size());
  Matrix j(m, m);
  for (Index i = 0; i < m; ++i) {
    const auto terms = p.terms(seed_jets(x, static_cast<std::size_t>(i)));
    for (Index k = 0; k < m; ++k) {
      const auto& [lhs, rhs] = terms[static_cast<std::size_t>(k)];
      j(k, i) = lhs.d - rhs.d;
    }
  }
  return j;
}

Roots step(const Roots& x, const Vector& dx, double lambda) {
  Roots out(x);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += lambda * dx(static_cast<Index>(k));
  return out;
}

std::optional<Roots> newton(const Problem& p, Roots x, const SearchConfig& cfg) {
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const auto e = evaluate(p, x);
    if (!e) return std::nullopt;
    if (e->merit <= cfg.tolerance) return x;
    Matrix jac;
    try {
      jac = jacobian(p, x);
    } catch (const DomainError&) {
      return std::nullopt;
    }
    const Vector dx = Eigen::FullPivLU<Matrix>(jac).solve(-e->f);
    if (!dx.allFinite()) return std::nullopt;
    double lambda = 1.0;
    Roots trial = step(x, dx, lambda);
    for (int h = 0; h < cfg.max_halvings; ++h) {
      const auto te = evaluate(p, trial);
      if (te && te->merit < e->merit) break;
      lambda *= 0.5;
      trial = step(x, dx, lambda);
    }
    x = std::move(trial);
  }
  const auto e = evaluate(p, x);
  if (e && e->merit <= cfg.tolerance) return x;
  return std::nullopt;
}

// Smallest singular value of the row- and column-scaled Jacobian. Near
// zero means the equations do not isolate the point.
double scaled_rank_gap(const Problem& p, const Roots& x) {
  const auto e = evaluate(p, x);
  if (!e) return 0.0;
  Matrix jac = jacobian(p, x);
  for (Index k = 0; k < jac.rows(); ++k) {
    for (Index i = 0; i < jac.cols(); ++i) {
      jac(k, i) *= std::abs(x[static_cast<std::size_t>(i)]) / (e->scale(k) == 0.0 ? 1.0 : e->scale(k));
    }
  }
  const Eigen::JacobiSVD<Matrix> svd(jac);
  return svd.singularValues().minCoeff();
}

bool near_zero(Complex z, double tol) { return std::abs(z) < tol; }

bool rejected(ChainKind kind, Complex q, const Roots& x, double tol) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Complex u = x[i];
    if (std::abs(u) < 1e-6 || std::abs(u) > 1e6) return true;
    if (near_zero(omega(u), tol) || near_zero(omega(u * q), tol)) return true;
    // Newton stalls next to u^2 q = +-1 rather than landing on it, so this
    // locus gets a wider neighbourhood than the other singular points.
    if (kind == ChainKind::open && near_zero(omega(u * u * q), std::max(tol, kCrossingPoleRadius))) return true;
    for (std::size_t j = 0; j < i; ++j) {
      if (near_zero(omega(u / x[j]), tol)) return true;
      if (kind == ChainKind::open && near_zero(omega(u * x[j] * q), tol)) return true;
    }
  }
  return false;
}

Roots random_seed(int m, const SearchConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> log_mod(std::log(cfg.annulus_min), std::log(cfg.annulus_max));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  Roots x;
  for (int k = 0; k < m; ++k) x.push_back(std::polar(std::exp(log_mod(rng)), phase(rng)));
  return x;
}

std::mt19937_64 sector_rng(const SearchConfig& cfg, int m, int l, ChainKind kind) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(l),
                    static_cast<std::uint32_t>(kind == ChainKind::open ? 0 : 1)};
  return std::mt19937_64(seq);
}

Complex closed_phase(const ModelParams& params, int l) {
  return std::exp(kI * (2.0 * kPi * l / params.n_sites)) / signed_power(params.spin() * params.n_sites);
}

BetheSolution finish(const Roots& roots, ChainKind kind, int l, const ModelParams& params) {
  BetheSolution sol{roots, kind, {1.0, 0.0}, 0, 0.0};
  if (kind == ChainKind::closed) {
    sol.sector = l;
    sol.kappa = twist_from_roots(roots, l, params);
  }
  sol.residual_norm = sol.roots.empty() ? 0.0 : scaled_residual_norm(sol, params);
  return canonicalize(sol, params);
}

bool less_by_modulus(Complex a, Complex b) {
  const double ma = std::abs(a);
  const double mb = std::abs(b);
  if (std::abs(ma - mb) > 1e-9 * std::max(ma, mb)) return ma < mb;
  return std::arg(a) < std::arg(b);
}

std::optional<Complex> try_lambda(Complex u, const BetheSolution& sol, const ModelParams& params) {
  try {
    return eval_lambda(u, sol, params);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

std::vector<Complex> lambda_fingerprint(const BetheSolution& sol, const ModelParams& params) {
  static const Complex probes[] = {kDefaultProbe, kSecondProbe, {1.17, 0.23}, {0.61, 0.88}};
  std::vector<Complex> out;
  for (const auto& u : probes) {
    if (auto v = try_lambda(u, sol, params)) out.push_back(*v);
    if (out.size() == 2) break;
  }
  if (out.size() < 2) throw DomainError("dedup: no probe away from the poles of Lambda");
  return out;
}

double sum_modulus(const Roots& roots) {
  double s = 0.0;
  for (const auto& r : roots) s += std::abs(r);
  return s;
}

// Bethe rows plus (Lambda(u0) - E)/|E|, solved in least squares.
std::optional<Roots> anchored_solve(const Problem& p, const ModelParams& params, int l, Complex u0, Complex target,
                                    Roots x, const SearchConfig& cfg) {
  const Index m = static_cast<Index>(x.size());
  const Complex sign = signed_power(params.spin() * params.n_sites);
  const double target_scale = std::max(std::abs(target), 1e-300);
  auto residual = [&](const Roots& z, Vector& r, Eigen::VectorXd& scale) -> bool {
    const auto e = evaluate(p, z);
    if (!e) return false;
    r.resize(m + 1);
    scale = e->scale;
    for (Index k = 0; k < m; ++k) r(k) = scale(k) == 0.0 ? Complex{0.0, 0.0} : e->f(k) / scale(k);
    try {
      const Complex kappa = detail::twist_product(z, closed_phase(params, l), params.q);
      r(m) = (detail::lambda_closed(u0, z, kappa, params.q, params.n_sites, sign) - target) / target_scale;
    } catch (const DomainError&) {
      return false;
    }
    return r.allFinite();
  };
  Vector r;
  Eigen::VectorXd scale;
  if (!residual(x, r, scale)) return std::nullopt;
  // Anchored roots are often double roots of Lambda(u0) = E, where the
  // iteration only converges linearly, so keep polishing past the tolerance.
  int polish = 0;
  for (int it = 0; it < cfg.max_iterations + kAnchorPolishSteps; ++it) {
    const double merit = r.cwiseAbs().maxCoeff();
    if (merit <= kAnchorTolerance && ++polish > kAnchorPolishSteps) return x;
    if (merit <= kAnchorTolerance * 1e-6) return x;
    Matrix jac(m + 1, m);
    try {
      for (Index i = 0; i < m; ++i) {
        const auto jets = seed_jets(x, static_cast<std::size_t>(i));
        const auto terms = p.terms(jets);
        for (Index k = 0; k < m; ++k) {
          const auto& [lhs, rhs] = terms[static_cast<std::size_t>(k)];
          jac(k, i) = scale(k) == 0.0 ? Complex{0.0, 0.0} : (lhs.d - rhs.d) / scale(k);
        }
        const Jet kappa = detail::twist_product(jets, closed_phase(params, l), params.q);
        jac(m, i) = detail::lambda_closed(u0, jets, kappa, params.q, params.n_sites, sign).d / target_scale;
      }
    } catch (const DomainError&) {
      return std::nullopt;
    }
    const Vector dx = jac.colPivHouseholderQr().solve(-r);
    if (!dx.allFinite()) return std::nullopt;
    double lambda = 1.0;
    Roots trial = step(x, dx, lambda);
    Vector tr;
    Eigen::VectorXd ts;
    bool ok = false;
    for (int h = 0; h < cfg.max_halvings; ++h) {
      if (residual(trial, tr, ts) && tr.norm() < r.norm()) {
        ok = true;
        break;
      }
      lambda *= 0.5;
      trial = step(x, dx, lambda);
    }
    if (!ok) break;
    x = std::move(trial);
    r = std::move(tr);
    scale = std::move(ts);
  }
  if (r.cwiseAbs().maxCoeff() <= kAnchorTolerance) return x;
  return std::nullopt;
}

}  // namespace

void SearchConfig::validate() const {
  if (seeds < 1 || max_iterations < 1 || max_halvings < 0 || anchor_seeds < 0) {
    throw UsageError("SearchConfig: counts must be positive");
  }
  if (!(annulus_min > 0.0) || !(annulus_max > annulus_min)) throw UsageError("SearchConfig: invalid seed annulus");
  if (!(tolerance > 0.0) || !(dedup_tolerance > tolerance) || !(proximity > 0.0)) {
    throw UsageError("SearchConfig: need 0 < tolerance < dedup tolerance");
  }
}

void sort_roots(Roots& roots) { std::sort(roots.begin(), roots.end(), less_by_modulus); }

BetheSolution canonicalize(const BetheSolution& solution, const ModelParams& params) {
  const Complex q = params.q;
  constexpr double tie = 1e-9;
  auto better = [&](Complex a, Complex b) {
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    if (std::abs(ma - mb) > tie * std::max(ma, mb)) return ma > mb;
    const double scale = std::max(ma, 1.0);
    const bool ra = a.real() > tie * scale;
    const bool rb = b.real() > tie * scale;
    if (ra != rb) return ra;
    const bool ia = a.imag() >= -tie * scale;
    const bool ib = b.imag() >= -tie * scale;
    if (ia != ib) return ia;
    return false;
  };
  auto reduce = [&](bool allow_negation) {
    BetheSolution out = solution;
    for (auto& u : out.roots) {
      std::vector<Complex> candidates{u};
      if (allow_negation) candidates.push_back(-u);
      if (solution.kind == ChainKind::open) {
        candidates.push_back(1.0 / (q * u));
        if (allow_negation) candidates.push_back(-1.0 / (q * u));
      }
      Complex best = candidates.front();
      for (const auto& c : candidates) {
        if (better(c, best)) best = c;
      }
      u = best;
    }
    sort_roots(out.roots);
    return out;
  };
  if (solution.roots.empty()) return solution;

  BetheSolution reduced = reduce(true);
  // negation is only used when it leaves Lambda unchanged
  const auto before = try_lambda(kDefaultProbe, solution, params);
  const auto after = try_lambda(kDefaultProbe, reduced, params);
  if (before && after && relative_error(*before, *after) <= 1e-8) return reduced;
  BetheSolution fallback = reduce(false);
  if (solution.kind == ChainKind::closed) {
    fallback = solution;
    sort_roots(fallback.roots);
  }
  return fallback;
}

std::vector<BetheSolution> dedup_solutions(const std::vector<BetheSolution>& raw, const ModelParams& params,
                                           const SearchConfig& cfg) {
  struct Entry {
    BetheSolution sol;
    std::vector<Complex> fingerprint;
  };
  std::vector<Entry> kept;
  for (const auto& candidate : raw) {
    std::vector<Complex> fp;
    try {
      fp = lambda_fingerprint(candidate, params);
    } catch (const DomainError&) {
      continue;
    }
    auto same = [&](const Entry& e) {
      for (std::size_t i = 0; i < fp.size(); ++i) {
        if (relative_error(fp[i], e.fingerprint[i]) > cfg.dedup_tolerance) return false;
      }
      return true;
    };
    auto it = std::find_if(kept.begin(), kept.end(), same);
    if (it == kept.end()) {
      kept.push_back({candidate, fp});
      continue;
    }
    const bool fewer = candidate.size() < it->sol.size();
    const bool smaller = candidate.size() == it->sol.size() &&
                         sum_modulus(candidate.roots) < sum_modulus(it->sol.roots) - 1e-9;
    if (fewer || smaller) *it = {candidate, fp};
  }
  std::vector<BetheSolution> out;
  for (auto& e : kept) out.push_back(std::move(e.sol));
  std::stable_sort(out.begin(), out.end(), [](const BetheSolution& a, const BetheSolution& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    if (a.sector != b.sector) return a.sector < b.sector;
    for (std::size_t k = 0; k < a.roots.size(); ++k) {
      if (less_by_modulus(a.roots[k], b.roots[k])) return true;
      if (less_by_modulus(b.roots[k], a.roots[k])) return false;
    }
    return false;
  });
  return out;
}

SectorResult solve_sector_open(const ModelParams& params, int m, const SearchConfig& cfg) {
  cfg.validate();
  if (!params.homogeneous()) throw DomainError("solve_sector_open: requires homogeneous thetas");
  if (m < 0 || m > params.n_sites / 2) throw DomainError("solve_sector_open: need 0 <= M <= N/2");
  SectorResult result;
  result.census.m = m;
  const int k = params.n_sites - 2 * m;
  result.census.expected = static_cast<int>(multiplicity(params.n_sites, k));
  result.census.expected_degeneracy = chebyshev_dim(k, params.site_dim());
  if (m == 0) {
    result.solutions.push_back(finish({}, ChainKind::open, 0, params));
    result.census.found = 1;
    return result;
  }

  const Problem problem{ChainKind::open, params.q, params.n_sites, {1.0, 0.0}};
  const bool real_q = params.q.imag() == 0.0;
  auto rng = sector_rng(cfg, m, 0, ChainKind::open);
  std::vector<BetheSolution> raw;
  auto consider = [&](const Roots& seed_roots) -> std::optional<Roots> {
    const auto x = newton(problem, seed_roots, cfg);
    if (!x) return std::nullopt;
    if (rejected(ChainKind::open, params.q, *x, cfg.proximity)) {
      ++result.census.rejected;
      return std::nullopt;
    }
    if (scaled_rank_gap(problem, *x) < kRankFloor) {
      ++result.census.underdetermined;
      return std::nullopt;
    }
    raw.push_back(finish(*x, ChainKind::open, 0, params));
    return x;
  };
  for (int s = 0; s < cfg.seeds; ++s) {
    const auto x = consider(random_seed(m, cfg, rng));
    if (x && real_q) {
      Roots conj(*x);
      for (auto& z : conj) z = std::conj(z);
      consider(conj);
    }
  }
  result.solutions = dedup_solutions(raw, params, cfg);
  result.census.found = static_cast<int>(result.solutions.size());
  return result;
}

SectorResult solve_sector_closed(const ModelParams& params, int m, int l, const SearchConfig& cfg,
                                 const SpectralAnchor* anchor) {
  cfg.validate();
  if (!params.homogeneous()) throw DomainError("solve_sector_closed: requires homogeneous thetas");
  if (m < 0 || m > params.n_sites) throw DomainError("solve_sector_closed: need 0 <= M <= N");
  if (l < 0 || l >= params.n_sites) throw DomainError("solve_sector_closed: need 0 <= l < N");
  SectorResult result;
  result.census.m = m;
  result.census.l = l;
  if (m == 0) {
    result.solutions.push_back(finish({}, ChainKind::closed, l, params));
    result.census.found = 1;
    return result;
  }

  const Problem problem{ChainKind::closed, params.q, params.n_sites, closed_phase(params, l)};
  auto rng = sector_rng(cfg, m, l, ChainKind::closed);
  std::vector<BetheSolution> raw;
  for (int s = 0; s < cfg.seeds; ++s) {
    const auto x = newton(problem, random_seed(m, cfg, rng), cfg);
    if (!x) continue;
    if (rejected(ChainKind::closed, params.q, *x, cfg.proximity)) {
      ++result.census.rejected;
      continue;
    }
    if (scaled_rank_gap(problem, *x) < kRankFloor) {
      ++result.census.underdetermined;
      continue;
    }
    raw.push_back(finish(*x, ChainKind::closed, l, params));
  }

  if (result.census.underdetermined > 0 && anchor != nullptr) {
    for (const auto& cluster : anchor->at_u0) {
      for (int s = 0; s < cfg.anchor_seeds; ++s) {
        const auto x = anchored_solve(problem, params, l, anchor->u0, cluster.value, random_seed(m, cfg, rng), cfg);
        if (!x) continue;
        const bool tiny = std::any_of(x->begin(), x->end(), [](Complex z) { return std::abs(z) < kAnchorMinModulus; });
        if (tiny || rejected(ChainKind::closed, params.q, *x, cfg.proximity)) {
          ++result.census.rejected;
          continue;
        }
        BetheSolution sol = finish(*x, ChainKind::closed, l, params);
        const auto at_u1 = try_lambda(anchor->u1, sol, params);
        if (!at_u1 || !anchor->is_eigenvalue_at_u1(*at_u1)) continue;
        raw.push_back(std::move(sol));
      }
    }
  }
  result.solutions = dedup_solutions(raw, params, cfg);
  result.census.found = static_cast<int>(result.solutions.size());
  return result;
}

long long chebyshev_dim(int k, int d) {
  if (k < 0) throw DomainError("chebyshev_dim: k must be >= 0");
  if (d < 2) throw DomainError("chebyshev_dim: d must be >= 2");
  long long prev = 0;
  long long cur = 1;
  for (int i = 0; i < k; ++i) {
    const long long next = static_cast<long long>(d) * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long value = 1;
  for (int i = 1; i <= k; ++i) value = value * (n - k + i) / i;
  return value;
}

}  // namespace

long long multiplicity(int n_sites, int k) {
  if (k < 0 || k > n_sites) throw DomainError("multiplicity: need 0 <= k <= N");
  if ((n_sites - k) % 2 != 0) throw DomainError("multiplicity: k and N must have the same parity");
  if (k == n_sites) return 1;
  if (k == 0) return binomial(n_sites, n_sites / 2) / (n_sites / 2 + 1);
  return binomial(n_sites, (n_sites - k) / 2) - binomial(n_sites, (n_sites - k) / 2 - 1);
}

std::vector<SectorCensus> expected_census(const ModelParams& params) {
  std::vector<SectorCensus> out;
  for (int m = 0; m <= params.n_sites / 2; ++m) {
    SectorCensus c;
    c.m = m;
    const int k = params.n_sites - 2 * m;
    c.expected = static_cast<int>(multiplicity(params.n_sites, k));
    c.expected_degeneracy = chebyshev_dim(k, params.site_dim());
    out.push_back(c);
  }
  return out;
}

}  // namespace tl
