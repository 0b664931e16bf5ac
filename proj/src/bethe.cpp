#include "tl/bethe.hpp"

#include <algorithm>
#include <string>

#include "bethe_detail.hpp"

namespace tl {

namespace {

constexpr double kPoleGuard = 1e-8;

void require_homogeneous(const ModelParams& params, const char* where) {
  if (!params.homogeneous()) throw DomainError(std::string(where) + ": requires homogeneous thetas");
}

void require_distinct(const Roots& roots, const char* where) {
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (roots[i] == Complex{0.0, 0.0}) throw DomainError(std::string(where) + ": root at 0");
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(roots[i] - roots[j]) <= 1e-14 * std::abs(roots[i])) {
        throw DomainError(std::string(where) + ": coinciding roots (singular configuration)");
      }
    }
  }
}

Complex sign_sn(const ModelParams& params) {
  return signed_power(params.spin() * params.n_sites);
}

}  // namespace

ADPair eval_a_d(Complex u, const ModelParams& params, ChainKind kind, Complex kappa) {
  const Complex q = params.q;
  if (kind == ChainKind::closed) {
    if (kappa == Complex{0.0, 0.0}) throw DomainError("eval_a_d: kappa = 0");
    const Complex sign = signed_power(params.spin());
    Complex a = kappa;
    Complex d = 1.0 / kappa;
    for (const auto& theta : params.thetas) {
      a *= sign * omega(u * q / theta);
      d *= sign * omega(u / theta);
    }
    return {a, d};
  }
  const Complex den = omega(u * u * q);
  if (std::abs(den) < kPoleGuard) throw DomainError("eval_a_d: pole from omega(u^2 q) = 0");
  Complex a = -omega(u * u * q * q) / den;
  Complex d = -omega(u * u) / den;
  for (const auto& theta : params.thetas) {
    a *= omega(u * q / theta) * omega(u * q * theta);
    d *= omega(u / theta) * omega(u * theta);
  }
  return {a, d};
}

Complex eval_q_function(Complex u, const Roots& roots, ChainKind kind, Complex q) {
  Complex value{1.0, 0.0};
  for (const auto& r : roots) {
    value *= omega(u / r);
    if (kind == ChainKind::open) value *= omega(u * q * r);
  }
  return value;
}

Complex eval_lambda(Complex u, const BetheSolution& solution, const ModelParams& params) {
  const Complex q = params.q;
  const auto& roots = solution.roots;
  for (const auto& r : roots) {
    if (std::abs(omega(u / r)) < kPoleGuard) throw DomainError("eval_lambda: u at a Bethe root");
    if (solution.kind == ChainKind::open && std::abs(omega(u * q * r)) < kPoleGuard) {
      throw DomainError("eval_lambda: u at a crossed Bethe root -1/(q u_k)");
    }
  }
  const ADPair ad = eval_a_d(u, params, solution.kind, solution.kappa);
  // ratios factor by factor keep the magnitudes tame
  Complex down = ad.a;
  Complex up = ad.d;
  for (const auto& r : roots) {
    if (solution.kind == ChainKind::open) {
      const Complex base = omega(u / r) * omega(u * q * r);
      down *= omega(u / (q * r)) * omega(u * r) / base;
      up *= omega(u * q / r) * omega(u * q * q * r) / base;
    } else {
      const Complex base = omega(u / r);
      down *= omega(u / (q * r)) / base;
      up *= omega(u * q / r) / base;
    }
  }
  return down + up;
}

Complex eval_lambda_open(Complex u, const Roots& roots, const ModelParams& params) {
  return eval_lambda(u, BetheSolution{roots, ChainKind::open, {1.0, 0.0}, 0, 0.0}, params);
}

std::vector<ResidualTerms> bethe_residual_terms(const BetheSolution& solution, const ModelParams& params) {
  require_homogeneous(params, "bethe_residuals");
  require_distinct(solution.roots, "bethe_residuals");
  const auto terms = solution.kind == ChainKind::open
                         ? detail::open_terms(solution.roots, params.q, params.n_sites)
                         : detail::closed_terms(solution.roots, solution.kappa, params.q, params.n_sites);
  std::vector<ResidualTerms> out;
  out.reserve(terms.size());
  for (const auto& [lhs, rhs] : terms) out.push_back({lhs, rhs});
  return out;
}

std::vector<Complex> bethe_residuals(const BetheSolution& solution, const ModelParams& params) {
  std::vector<Complex> out;
  for (const auto& t : bethe_residual_terms(solution, params)) out.push_back(t.lhs - t.rhs);
  return out;
}

std::vector<Complex> bethe_residuals_rescaled(const BetheSolution& solution, const ModelParams& params) {
  if (solution.kind != ChainKind::open) throw DomainError("bethe_residuals_rescaled: open chain only");
  require_homogeneous(params, "bethe_residuals_rescaled");
  require_distinct(solution.roots, "bethe_residuals_rescaled");
  const Complex q = params.q;
  const Complex half = std::sqrt(q);
  const int n = params.n_sites;
  Roots t(solution.roots.size());
  std::transform(solution.roots.begin(), solution.roots.end(), t.begin(), [&](Complex u) { return u * half; });
  std::vector<Complex> out;
  for (std::size_t k = 0; k < t.size(); ++k) {
    Complex lhs = std::pow(omega(t[k] * half), 2 * n);
    Complex rhs = std::pow(omega(t[k] / half), 2 * n);
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (j == k) continue;
      lhs *= omega(t[k] / (t[j] * q)) * omega(t[k] * t[j] / q);
      rhs *= omega(t[k] * q / t[j]) * omega(t[k] * t[j] * q);
    }
    out.push_back(lhs - rhs);
  }
  return out;
}

double scaled_residual_norm(const BetheSolution& solution, const ModelParams& params) {
  double worst = 0.0;
  for (const auto& t : bethe_residual_terms(solution, params)) {
    const double scale = std::abs(t.lhs) + std::abs(t.rhs);
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(t.lhs - t.rhs) / scale);
  }
  return worst;
}

Complex energy(const BetheSolution& solution, const ModelParams& params) {
  if (solution.kind != ChainKind::open) throw DomainError("energy: open chain only");
  require_homogeneous(params, "energy");
  const Complex q = params.q;
  Complex sum{0.0, 0.0};
  for (const auto& u : solution.roots) {
    const Complex wu = omega(u);
    const Complex wuq = omega(u * q);
    if (std::abs(wu) < kPoleGuard || std::abs(wuq) < kPoleGuard) throw DomainError("energy: root at a pole");
    sum += omega(u * u) / (wu * wu) - omega(u * u * q * q) / (wuq * wuq);
  }
  return 0.5 * omega(q) * sum;
}

Complex lambda_partial(Complex v, const Roots& roots, int i, const ModelParams& params) {
  require_homogeneous(params, "lambda_partial");
  if (i < 0 || i >= static_cast<int>(roots.size())) throw DomainError("lambda_partial: index out of range");
  for (const auto& r : roots) {
    if (std::abs(omega(v / r)) < kPoleGuard || std::abs(omega(v * params.q * r)) < kPoleGuard) {
      throw DomainError("lambda_partial: v at a pole");
    }
  }
  std::vector<Jet> jets;
  for (std::size_t k = 0; k < roots.size(); ++k) {
    jets.emplace_back(roots[k], static_cast<int>(k) == i ? Complex{1.0, 0.0} : Complex{0.0, 0.0});
  }
  return detail::lambda_open(v, jets, params.q, params.n_sites).d;
}

Complex offshell_coefficient(Complex u, const Roots& values, int k, const ModelParams& params) {
  require_homogeneous(params, "offshell_coefficient");
  const Complex q = params.q;
  const int n = params.n_sites;
  const Complex uk = values.at(static_cast<std::size_t>(k));
  const Complex den = omega(u / uk) * omega(u * uk * q) * omega(uk * uk * q);
  if (std::abs(den) < kPoleGuard) throw DomainError("offshell_coefficient: pole");
  const Complex prefactor = -omega(q) * omega(u * u * q * q) * omega(uk * uk) / den;
  Complex first = std::pow(omega(uk * q), 2 * n);
  Complex second = std::pow(omega(uk), 2 * n);
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (static_cast<int>(j) == k) continue;
    const Complex uj = values[j];
    const Complex base = omega(uk / uj) * omega(uk * uj * q);
    first *= omega(uk / (uj * q)) * omega(uk * uj) / base;
    second *= omega(uk * q / uj) * omega(uk * uj * q * q) / base;
  }
  return prefactor * (first - second);
}

Complex twist_from_roots(const Roots& roots, int l, const ModelParams& params) {
  if (l < 0 || l >= params.n_sites) throw DomainError("twist_from_roots: l out of range");
  const Complex phase = std::exp(kI * (2.0 * kPi * l / params.n_sites)) / sign_sn(params);
  for (const auto& r : roots) {
    if (std::abs(omega(params.q * r)) < kPoleGuard) throw DomainError("twist_from_roots: omega(q u_j) = 0");
  }
  return detail::twist_product(roots, phase, params.q);
}

Complex shift_eigenvalue(const Roots& roots, Complex kappa, const ModelParams& params) {
  Complex value = kappa * sign_sn(params);
  for (const auto& r : roots) {
    const Complex den = omega(r);
    if (std::abs(den) < kPoleGuard) throw DomainError("shift_eigenvalue: omega(u_j) = 0");
    value *= omega(params.q * r) / den;
  }
  return value;
}

}  // namespace tl
