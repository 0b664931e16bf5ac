#pragma once

#include "tl/types.hpp"

namespace tl {

/// Value and first derivative along one complex direction. Everything in
/// the Bethe layer is holomorphic in the roots, so a single complex
/// derivative carries the full Jacobian column.
struct Jet {
  Complex v;
  Complex d;

  Jet(Complex value = {0.0, 0.0}, Complex deriv = {0.0, 0.0}) : v(value), d(deriv) {}
};

inline Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d + b.d}; }
inline Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.d - b.d}; }
inline Jet operator-(Jet a) { return {-a.v, -a.d}; }
inline Jet operator*(Jet a, Jet b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Jet operator/(Jet a, Jet b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }

inline Jet operator+(Jet a, Complex b) { return {a.v + b, a.d}; }
inline Jet operator+(Complex a, Jet b) { return {a + b.v, b.d}; }
inline Jet operator-(Jet a, Complex b) { return {a.v - b, a.d}; }
inline Jet operator-(Complex a, Jet b) { return {a - b.v, -b.d}; }
inline Jet operator*(Jet a, Complex b) { return {a.v * b, a.d * b}; }
inline Jet operator*(Complex a, Jet b) { return {a * b.v, a * b.d}; }
inline Jet operator/(Jet a, Complex b) { return {a.v / b, a.d / b}; }
inline Jet operator/(Complex a, Jet b) { return {a / b.v, -a * b.d / (b.v * b.v)}; }

inline Complex value_of(Complex z) { return z; }
inline Complex value_of(const Jet& z) { return z.v; }

/// omega(u) = u - 1/u for plain and dual arguments.
template <class S>
S omega_t(const S& u) {
  if (value_of(u) == Complex{0.0, 0.0}) throw DomainError("omega: u = 0");
  return u - Complex{1.0, 0.0} / u;
}

template <class S>
S ipow(S base, int exponent) {
  S out = S(Complex{1.0, 0.0});
  for (int i = 0; i < exponent; ++i) out = out * base;
  return out;
}

}  // namespace tl
