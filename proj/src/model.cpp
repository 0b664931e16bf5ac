#include "tl/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace tl {

namespace {

Complex eval_poly(std::span<const Complex> coeffs, Complex x) {
  // coeffs[k] multiplies x^k
  Complex acc{0.0, 0.0};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Complex eval_poly_derivative(std::span<const Complex> coeffs, Complex x) {
  Complex acc{0.0, 0.0};
  for (std::size_t k = coeffs.size() - 1; k >= 1; --k) acc = acc * x + static_cast<double>(k) * coeffs[k];
  return acc;
}

// Aberth-Ehrlich simultaneous iteration followed by a Newton polish.
std::vector<Complex> polynomial_roots(std::vector<Complex> coeffs) {
  while (coeffs.size() > 1 && std::abs(coeffs.back()) == 0.0) coeffs.pop_back();
  const std::size_t degree = coeffs.size() - 1;
  if (degree == 0) throw SolverError("polynomial_roots: constant polynomial has no roots");

  // Cauchy bound for the starting circle.
  double bound = 0.0;
  for (std::size_t k = 0; k < degree; ++k) bound = std::max(bound, std::abs(coeffs[k] / coeffs[degree]));
  const double radius = 0.5 * (1.0 + bound);

  std::vector<Complex> z(degree);
  for (std::size_t k = 0; k < degree; ++k) {
    const double angle = 2.0 * kPi * (static_cast<double>(k) + 0.25) / static_cast<double>(degree) + 0.4;
    z[k] = std::polar(radius, angle);
  }

  for (int iter = 0; iter < 500; ++iter) {
    double largest_step = 0.0;
    for (std::size_t k = 0; k < degree; ++k) {
      const Complex p = eval_poly(coeffs, z[k]);
      const Complex dp = eval_poly_derivative(coeffs, z[k]);
      if (p == Complex{0.0, 0.0}) continue;
      const Complex newton = p / dp;
      Complex repulsion{0.0, 0.0};
      for (std::size_t j = 0; j < degree; ++j) {
        if (j != k) repulsion += 1.0 / (z[k] - z[j]);
      }
      const Complex step = newton / (1.0 - newton * repulsion);
      z[k] -= step;
      largest_step = std::max(largest_step, std::abs(step) / std::max(1.0, std::abs(z[k])));
    }
    if (largest_step < 1e-15) break;
  }

  for (auto& root : z) {
    for (int iter = 0; iter < 5; ++iter) {
      const Complex dp = eval_poly_derivative(coeffs, root);
      if (std::abs(dp) == 0.0) break;
      root -= eval_poly(coeffs, root) / dp;
    }
  }
  return z;
}

}  // namespace

int parse_twice_spin(std::string_view text) {
  auto fail = [&] { return UsageError("invalid spin '" + std::string(text) + "': expected k/2, an integer, or a decimal"); };
  if (text.empty()) throw fail();
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    int num = 0;
    int den = 0;
    const auto lhs = text.substr(0, slash);
    const auto rhs = text.substr(slash + 1);
    if (std::from_chars(lhs.data(), lhs.data() + lhs.size(), num).ec != std::errc{} ||
        std::from_chars(rhs.data(), rhs.data() + rhs.size(), den).ec != std::errc{}) {
      throw fail();
    }
    if (den == 2 && num >= 1) return num;
    if (den == 1 && num >= 1) return 2 * num;
    throw fail();
  }
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(std::string(text), &used);
    if (used != text.size()) throw fail();
  } catch (const std::logic_error&) {
    throw fail();
  }
  const double twice = 2.0 * value;
  const long rounded = std::lround(twice);
  if (rounded < 1 || std::abs(twice - static_cast<double>(rounded)) > 1e-12) throw fail();
  return static_cast<int>(rounded);
}

std::string format_spin(int twice_spin) {
  if (twice_spin % 2 == 0) return std::to_string(twice_spin / 2);
  return std::to_string(twice_spin) + "/2";
}

ModelParams ModelParams::make(int n_sites, int twice_spin, Complex q, int q_branch) {
  if (n_sites < 1) throw UsageError("n_sites must be positive");
  if (twice_spin < 1) throw UsageError("twice_spin must be positive");
  ModelParams params;
  params.n_sites = n_sites;
  params.twice_spin = twice_spin;
  params.q = q;
  params.big_q = solve_big_q(q, twice_spin, q_branch);
  params.thetas.assign(static_cast<std::size_t>(n_sites), Complex{1.0, 0.0});
  return params;
}

Index ModelParams::quantum_dim() const {
  Index dim = 1;
  for (int i = 0; i < n_sites; ++i) dim *= site_dim();
  return dim;
}

bool ModelParams::homogeneous() const {
  return std::all_of(thetas.begin(), thetas.end(), [](Complex t) { return t == Complex{1.0, 0.0}; });
}

void ModelParams::validate() const {
  if (n_sites < 1 || twice_spin < 1) throw DomainError("ModelParams: n_sites and twice_spin must be positive");
  if (static_cast<int>(thetas.size()) != n_sites) throw DomainError("ModelParams: need one theta per site");
  if (q == Complex{0.0, 0.0}) throw DomainError("ModelParams: q = 0");
  for (const auto& t : thetas) {
    if (std::abs(t) == 0.0) throw DomainError("ModelParams: theta = 0");
  }
  const Complex mismatch = q_number(big_q, twice_spin) - coupling_c(q);
  if (std::abs(mismatch) > 1e-12 * (1.0 + std::abs(coupling_c(q)))) {
    throw DomainError("ModelParams: Q does not satisfy [2s+1]_Q = -(q + 1/q)");
  }
}

ModelParams ModelParams::with_thetas(std::vector<Complex> new_thetas) const {
  ModelParams copy = *this;
  copy.thetas = std::move(new_thetas);
  copy.validate();
  return copy;
}

Complex coupling_c(Complex q) {
  if (q == Complex{0.0, 0.0}) throw DomainError("coupling_c: q = 0");
  return -(q + 1.0 / q);
}

Complex q_number(Complex big_q, int twice_spin) {
  // exponents 2k for k = -s..s are -2s, -2s+2, ..., 2s
  Complex sum{0.0, 0.0};
  for (int j = 0; j <= twice_spin; ++j) sum += std::pow(big_q, 2 * j - twice_spin);
  return sum;
}

std::vector<Complex> big_q_roots(Complex q, int twice_spin) {
  if (twice_spin < 1) throw DomainError("solve_big_q: twice_spin must be >= 1");
  const Complex c = coupling_c(q);
  // Multiply by Q^{2s}: sum_j Q^{2j} - c Q^{2s} = 0, degree 4s in Q.
  std::vector<Complex> coeffs(static_cast<std::size_t>(2 * twice_spin + 1), Complex{0.0, 0.0});
  for (int j = 0; j <= twice_spin; ++j) coeffs[static_cast<std::size_t>(2 * j)] += 1.0;
  coeffs[static_cast<std::size_t>(twice_spin)] -= c;

  auto roots = polynomial_roots(coeffs);
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    if (std::abs(ma - mb) > 1e-9 * std::max(ma, mb)) return ma > mb;
    return std::arg(a) < std::arg(b);
  });
  return roots;
}

Complex solve_big_q(Complex q, int twice_spin, int branch) {
  const auto roots = big_q_roots(q, twice_spin);
  if (branch < 0 || branch >= static_cast<int>(roots.size())) {
    throw SolverError("solve_big_q: branch index out of range");
  }
  const Complex root = roots[static_cast<std::size_t>(branch)];
  const Complex residual = q_number(root, twice_spin) - coupling_c(q);
  if (!std::isfinite(root.real()) || std::abs(residual) > 1e-12 * (1.0 + std::abs(coupling_c(q)))) {
    throw SolverError("solve_big_q: root did not converge");
  }
  return root;
}

Complex omega(Complex u) {
  if (u == Complex{0.0, 0.0}) throw DomainError("omega: u = 0");
  return u - 1.0 / u;
}

Complex zeta(Complex u, Complex q) {
  if (q == Complex{0.0, 0.0}) throw DomainError("zeta: q = 0");
  return omega(u / q) * omega(1.0 / (u * q));
}

Complex signed_power(double exponent) {
  return std::exp(kI * (kPi * exponent));
}

Complex fusion_g(Complex u, const ModelParams& params) {
  const double sign = (params.twice_spin + 1) % 2 == 0 ? 1.0 : -1.0;
  return sign * omega(u / params.q);
}

Complex fusion_f(Complex u, const ModelParams& params) {
  const Complex q = params.q;
  Complex f = fusion_g(1.0 / (u * u * q * q * q), params) * fusion_g(u * u * q, params);
  for (const auto& theta : params.thetas) f *= zeta(u * q / theta, q) * zeta(u * q * theta, q);
  return f;
}

Complex fusion_F(Complex u, const ModelParams& params) {
  const Complex q = params.q;
  const Complex den_a = omega(u * u * q);
  const Complex den_b = omega(1.0 / (u * u * q * q * q));
  if (std::abs(den_a) < 1e-12) throw DomainError("fusion_F: pole from omega(u^2 q) = 0");
  if (std::abs(den_b) < 1e-12) throw DomainError("fusion_F: pole from omega(u^-2 q^-3) = 0");
  Complex value = -omega(u * u) * omega(u * u * q * q * q * q) / (den_a * den_b);
  for (const auto& theta : params.thetas) {
    value *= omega(u / theta) * omega(u * q * q / theta) * omega(u * theta) * omega(u * q * q * theta);
  }
  return value;
}

Complex closed_fusion_F(Complex u, const ModelParams& params) {
  const Complex q = params.q;
  const Complex sign = signed_power(static_cast<double>(params.twice_spin));
  Complex value{1.0, 0.0};
  for (const auto& theta : params.thetas) value *= sign * omega(u / theta) * omega(u * q * q / theta);
  return value;
}

std::vector<Complex> random_generic_thetas(int n_sites, Complex q, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> log_modulus(std::log(0.8), std::log(1.25));
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  std::vector<Complex> thetas;
  int attempts = 0;
  while (static_cast<int>(thetas.size()) < n_sites) {
    if (++attempts > 100000) throw SolverError("random_generic_thetas: could not draw generic values");
    const Complex candidate = std::polar(std::exp(log_modulus(rng)), phase(rng));
    bool generic = true;
    for (const auto& other : thetas) {
      for (int k = -2; k <= 2 && generic; ++k) {
        for (const Complex sign : {Complex{1.0, 0.0}, Complex{-1.0, 0.0}}) {
          // ratios near q^k, and products near q^k, give coinciding zeros of F
          if (std::abs(candidate / other - sign * std::pow(q, k)) < 0.05 ||
              std::abs(candidate * other - sign * std::pow(q, k)) < 0.05) {
            generic = false;
          }
        }
      }
    }
    for (int k = -2; k <= 2 && generic; ++k) {
      if (std::abs(candidate * candidate - std::pow(q, k)) < 0.05 ||
          std::abs(candidate * candidate + std::pow(q, k)) < 0.05) {
        generic = false;
      }
    }
    if (generic) thetas.push_back(candidate);
  }
  return thetas;
}

std::uint64_t default_seed(std::uint64_t fallback) {
  if (const char* env = std::getenv("TL_LAB_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t value = 0;
    const std::string_view text(env);
    if (std::from_chars(text.data(), text.data() + text.size(), value).ec == std::errc{}) return value;
    throw UsageError("TL_LAB_SEED must be an unsigned integer");
  }
  return fallback;
}

}  // namespace tl
