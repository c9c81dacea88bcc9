#pragma once

#include <boost/rational.hpp>

#include <compare>
#include <cstdint>
#include <string>

namespace emalg {

using Rational = boost::rational<std::int64_t>;

/// Exact scalar prefactor: rational * I^ipow * hbar^hbar * eps0^eps0.
///
/// Always kept normalized: ipow is 0 or 1 (I^2 = -1 is folded into the
/// rational), and the rational is in lowest terms (boost::rational keeps
/// that invariant for us).
struct Coefficient {
  Rational value{1};
  int hbar = 0;
  int eps0 = 0;
  int ipow = 0;

  Coefficient() = default;
  Coefficient(Rational v, int hbar_pow = 0, int eps0_pow = 0, int i_pow = 0);

  static Coefficient integer(std::int64_t v) { return Coefficient(Rational(v)); }

  [[nodiscard]] bool is_zero() const { return value.numerator() == 0; }
  [[nodiscard]] bool is_one() const { return value == Rational(1) && unitless(); }
  [[nodiscard]] bool unitless() const { return hbar == 0 && eps0 == 0 && ipow == 0; }
  [[nodiscard]] bool same_units(const Coefficient& o) const {
    return hbar == o.hbar && eps0 == o.eps0 && ipow == o.ipow;
  }
  /// Units only, e.g. "I*hbar*eps0^-1"; empty when unitless.
  [[nodiscard]] std::string units_key() const;

  Coefficient operator*(const Coefficient& o) const;
  Coefficient operator-() const;
  Coefficient& operator*=(const Coefficient& o) { return *this = *this * o; }

  friend bool operator==(const Coefficient&, const Coefficient&) = default;
};

/// Sign of the permutation that sorts three distinct values, 0 on repeats.
template <class T>
int levi_civita_sign(const T& a, const T& b, const T& c) {
  if (a == b || b == c || a == c) return 0;
  int inversions = int(b < a) + int(c < a) + int(c < b);
  return inversions % 2 == 0 ? 1 : -1;
}

}  // namespace emalg
