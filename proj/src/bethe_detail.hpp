#pragma once

#include <utility>
#include <vector>

#include "tl/jet.hpp"

namespace tl::detail {

template <class S>
using Terms = std::vector<std::pair<S, S>>;

// Homogeneous open chain, both sides multiplied by all denominators:
// omega(u_k q)^{2N} prod omega(u_k/(u_j q)) omega(u_k u_j)
//   = omega(u_k)^{2N} prod omega(u_k q/u_j) omega(u_k u_j q^2)
template <class S>
Terms<S> open_terms(const std::vector<S>& u, Complex q, int n_sites) {
  Terms<S> out;
  for (std::size_t k = 0; k < u.size(); ++k) {
    S lhs = ipow(omega_t(u[k] * q), 2 * n_sites);
    S rhs = ipow(omega_t(u[k]), 2 * n_sites);
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (j == k) continue;
      lhs = lhs * omega_t(u[k] / (u[j] * q)) * omega_t(u[k] * u[j]);
      rhs = rhs * omega_t(u[k] * q / u[j]) * omega_t(u[k] * u[j] * (q * q));
    }
    out.emplace_back(lhs, rhs);
  }
  return out;
}

template <class S>
S twist_product(const std::vector<S>& u, Complex phase, Complex q) {
  S kappa = S(phase);
  for (const auto& r : u) kappa = kappa * omega_t(r) / omega_t(r * q);
  return kappa;
}

// Closed chain with explicit twist:
// omega(u_k q)^N prod omega(u_k/(u_j q)) = kappa^{-2} omega(u_k)^N prod omega(u_k q/u_j)
template <class S>
Terms<S> closed_terms(const std::vector<S>& u, const S& kappa, Complex q, int n_sites) {
  Terms<S> out;
  const S inv_k2 = Complex{1.0, 0.0} / (kappa * kappa);
  for (std::size_t k = 0; k < u.size(); ++k) {
    S lhs = ipow(omega_t(u[k] * q), n_sites);
    S rhs = inv_k2 * ipow(omega_t(u[k]), n_sites);
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (j == k) continue;
      lhs = lhs * omega_t(u[k] / (u[j] * q));
      rhs = rhs * omega_t(u[k] * q / u[j]);
    }
    out.emplace_back(lhs, rhs);
  }
  return out;
}

// Closed chain with kappa = phase prod omega(u_j)/omega(q u_j) substituted
// and the kappa^{-2} denominators cleared.
template <class S>
Terms<S> closed_terms_eliminated(const std::vector<S>& u, Complex phase, Complex q, int n_sites) {
  S num = S(Complex{1.0, 0.0});
  S den = S(Complex{1.0, 0.0});
  for (const auto& r : u) {
    num = num * omega_t(r) * omega_t(r);
    den = den * omega_t(r * q) * omega_t(r * q);
  }
  const Complex inv_phase2 = 1.0 / (phase * phase);
  Terms<S> out;
  for (std::size_t k = 0; k < u.size(); ++k) {
    S lhs = ipow(omega_t(u[k] * q), n_sites) * num;
    S rhs = inv_phase2 * ipow(omega_t(u[k]), n_sites) * den;
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (j == k) continue;
      lhs = lhs * omega_t(u[k] / (u[j] * q));
      rhs = rhs * omega_t(u[k] * q / u[j]);
    }
    out.emplace_back(lhs, rhs);
  }
  return out;
}

// Homogeneous open eigenvalue.
template <class S>
S lambda_open(Complex v, const std::vector<S>& u, Complex q, int n_sites) {
  S t1 = S(omega_t(v * v * q * q) * ipow(omega_t(v * q), 2 * n_sites));
  S t2 = S(omega_t(v * v) * ipow(omega_t(v), 2 * n_sites));
  for (const auto& r : u) {
    const S common = omega_t(v / r) * omega_t(v * q * r);
    t1 = t1 * omega_t(v / (q * r)) * omega_t(v * r) / common;
    t2 = t2 * omega_t(v * q / r) * omega_t(v * q * q * r) / common;
  }
  return -(t1 + t2) / omega_t(v * v * q);
}

// Homogeneous closed eigenvalue; sign = (-1)^{sN}.
template <class S>
S lambda_closed(Complex v, const std::vector<S>& u, const S& kappa, Complex q, int n_sites, Complex sign) {
  S t1 = kappa * (sign * ipow(omega_t(v * q), n_sites));
  S t2 = (sign * ipow(omega_t(v), n_sites)) / kappa;
  for (const auto& r : u) {
    const S den = omega_t(v / r);
    t1 = t1 * omega_t(v / (q * r)) / den;
    t2 = t2 * omega_t(v * q / r) / den;
  }
  return t1 + t2;
}

}  // namespace tl::detail
