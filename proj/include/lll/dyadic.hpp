#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lll {

using u128 = unsigned __int128;

inline int bit_width_u128(u128 x) {
  int w = 0;
  while (x) {
    x >>= 1;
    ++w;
  }
  return w;
}

inline std::string u128_to_string(u128 x) {
  if (x == 0) return "0";
  std::string s;
  while (x) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(x % 10)));
    x /= 10;
  }
  return s;
}

// Exact nonnegative dyadic rational num / 2^exp. Probabilities of events over
// variables with dyadic distributions stay in this form, so the oracle can
// compare them with zero tolerance. Throws on overflow instead of losing
// precision; callers keep the per-variable exponent budget small enough that
// this never triggers in the shipped suites.
struct Dyadic {
  u128 num = 0;
  int exp = 0;

  Dyadic() = default;
  Dyadic(u128 n, int e) : num(n), exp(e) { normalize(); }

  static Dyadic zero() { return Dyadic(); }
  static Dyadic one() { return Dyadic(1, 0); }

  void normalize() {
    if (num == 0) {
      exp = 0;
      return;
    }
    while (exp > 0 && (num & 1) == 0) {
      num >>= 1;
      --exp;
    }
  }

  bool is_zero() const { return num == 0; }

  double to_double() const {
    const uint64_t hi = static_cast<uint64_t>(num >> 64);
    const uint64_t lo = static_cast<uint64_t>(num);
    const double v = std::ldexp(static_cast<double>(hi), 64) + static_cast<double>(lo);
    return std::ldexp(v, -exp);
  }

  std::string to_fraction_string() const {
    return u128_to_string(num) + "/2^" + std::to_string(exp);
  }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.num == 0) return b;
    if (b.num == 0) return a;
    const int e = a.exp > b.exp ? a.exp : b.exp;
    u128 na = shifted(a.num, e - a.exp);
    u128 nb = shifted(b.num, e - b.exp);
    u128 s = na + nb;
    if (s < na) throw std::overflow_error("dyadic add overflow");
    return Dyadic(s, e);
  }

  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) {
    const int e = a.exp > b.exp ? a.exp : b.exp;
    u128 na = shifted(a.num, e - a.exp);
    u128 nb = shifted(b.num, e - b.exp);
    if (nb > na) throw std::underflow_error("dyadic subtraction below zero");
    return Dyadic(na - nb, e);
  }

  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    if (a.num == 0 || b.num == 0) return Dyadic();
    if (bit_width_u128(a.num) + bit_width_u128(b.num) > 127)
      throw std::overflow_error("dyadic mul overflow");
    return Dyadic(a.num * b.num, a.exp + b.exp);
  }

  // this * k for a small integer factor (used for d^2-style comparisons).
  Dyadic times(uint64_t k) const {
    if (num == 0 || k == 0) return Dyadic();
    if (bit_width_u128(num) + bit_width_u128(k) > 127)
      throw std::overflow_error("dyadic scale overflow");
    return Dyadic(num * k, exp);
  }

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.num == b.num && a.exp == b.exp;  // both normalized
  }
  friend bool operator!=(const Dyadic& a, const Dyadic& b) { return !(a == b); }
  friend bool operator<(const Dyadic& a, const Dyadic& b) {
    const int e = a.exp > b.exp ? a.exp : b.exp;
    return shifted(a.num, e - a.exp) < shifted(b.num, e - b.exp);
  }
  friend bool operator<=(const Dyadic& a, const Dyadic& b) { return !(b < a); }
  friend bool operator>(const Dyadic& a, const Dyadic& b) { return b < a; }
  friend bool operator>=(const Dyadic& a, const Dyadic& b) { return !(a < b); }

 private:
  static u128 shifted(u128 x, int k) {
    if (k == 0) return x;
    if (k >= 128 || bit_width_u128(x) + k > 127)
      throw std::overflow_error("dyadic align overflow");
    return x << k;
  }
};

}  // namespace lll
