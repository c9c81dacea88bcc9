#include "expr/coefficient.hpp"

namespace emalg {

Coefficient::Coefficient(Rational v, int hbar_pow, int eps0_pow, int i_pow)
    : value(v), hbar(hbar_pow), eps0(eps0_pow) {
  int k = ((i_pow % 4) + 4) % 4;
  if (k >= 2) {
    value = -value;
    k -= 2;
  }
  ipow = k;
}

Coefficient Coefficient::operator*(const Coefficient& o) const {
  return Coefficient(value * o.value, hbar + o.hbar, eps0 + o.eps0, ipow + o.ipow);
}

Coefficient Coefficient::operator-() const {
  Coefficient r = *this;
  r.value = -r.value;
  return r;
}

std::string Coefficient::units_key() const {
  std::string out;
  auto add = [&out](const std::string& s) {
    if (!out.empty()) out += '*';
    out += s;
  };
  if (ipow == 1) add("I");
  if (hbar == 1) {
    add("hbar");
  } else if (hbar != 0) {
    add("hbar^" + std::to_string(hbar));
  }
  if (eps0 == 1) {
    add("eps0");
  } else if (eps0 != 0) {
    add("eps0^" + std::to_string(eps0));
  }
  return out;
}

}  // namespace emalg
