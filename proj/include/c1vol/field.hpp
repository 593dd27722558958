#pragma once

// Scalar types shared by the whole library: exact rationals (GMP), a prime
// field used for exact rank computations, and conversions between them.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace c1vol {

using Rational = mpq_class;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// num/den in lowest terms; GMP arithmetic requires canonical operands.
inline Rational ratio(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Parses "p/q", an integer, or a plain decimal such as "-0.125" exactly.
inline Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw ParseError("empty number");
  auto digits_ok = [](const std::string& d, bool allow_sign) {
    if (d.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (d[0] == '-' || d[0] == '+')) i = 1;
    if (i == d.size()) return false;
    for (; i < d.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(d[i]))) return false;
    return true;
  };
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!digits_ok(num, true) || !digits_ok(den, false))
      throw ParseError("malformed rational '" + text + "'");
    if (num[0] == '+') num.erase(0, 1);
    mpz_class d(den);
    if (d == 0) throw ParseError("zero denominator in '" + text + "'");
    Rational q{mpz_class(num), d};
    q.canonicalize();
    return q;
  }
  bool neg = false;
  std::string body = s;
  if (body[0] == '-' || body[0] == '+') {
    neg = body[0] == '-';
    body.erase(0, 1);
  }
  auto dot = body.find('.');
  std::string ip = dot == std::string::npos ? body : body.substr(0, dot);
  std::string fp = dot == std::string::npos ? "" : body.substr(dot + 1);
  if (ip.empty()) ip = "0";
  if (!digits_ok(ip, false) || (!fp.empty() && !digits_ok(fp, false)) ||
      (dot != std::string::npos && fp.empty() && body.size() == 1))
    throw ParseError("malformed number '" + text + "'");
  mpz_class scale = 1;
  for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
  Rational q{mpz_class(ip + fp), scale};
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Element of Z/PZ for a prime P < 2^62.
template <std::uint64_t P>
class Fp {
 public:
  static constexpr std::uint64_t modulus = P;
  constexpr Fp() = default;
  constexpr Fp(std::int64_t v) : v_(reduce_signed(v)) {}  // NOLINT(implicit)

  static Fp from_raw(std::uint64_t v) {
    Fp r;
    r.v_ = v;
    return r;
  }
  std::uint64_t raw() const { return v_; }
  bool is_zero() const { return v_ == 0; }

  Fp& operator+=(Fp o) {
    v_ += o.v_;
    if (v_ >= P) v_ -= P;
    return *this;
  }
  Fp& operator-=(Fp o) {
    v_ = v_ >= o.v_ ? v_ - o.v_ : v_ + P - o.v_;
    return *this;
  }
  Fp& operator*=(Fp o) {
    v_ = mulmod(v_, o.v_);
    return *this;
  }
  Fp& operator/=(Fp o) { return *this *= o.inverse(); }
  friend Fp operator+(Fp a, Fp b) { return a += b; }
  friend Fp operator-(Fp a, Fp b) { return a -= b; }
  friend Fp operator*(Fp a, Fp b) { return a *= b; }
  friend Fp operator/(Fp a, Fp b) { return a /= b; }
  Fp operator-() const { return Fp() - *this; }
  friend bool operator==(Fp a, Fp b) { return a.v_ == b.v_; }
  friend bool operator!=(Fp a, Fp b) { return a.v_ != b.v_; }

  Fp pow(std::uint64_t e) const {
    Fp base = *this, acc = from_raw(1);
    while (e) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  }
  Fp inverse() const {
    if (v_ == 0) throw std::domain_error("inverse of zero in prime field");
    return pow(P - 2);
  }

 private:
  static std::uint64_t reduce_signed(std::int64_t v) {
    std::int64_t m = v % static_cast<std::int64_t>(P);
    return static_cast<std::uint64_t>(m < 0 ? m + static_cast<std::int64_t>(P) : m);
  }
  static std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
    unsigned __int128 z = static_cast<unsigned __int128>(a) * b;
    if constexpr (P == (std::uint64_t(1) << 61) - 1) {
      std::uint64_t lo = static_cast<std::uint64_t>(z) & P;
      std::uint64_t hi = static_cast<std::uint64_t>(z >> 61);
      std::uint64_t r = lo + hi;
      return r >= P ? r - P : r;
    } else {
      return static_cast<std::uint64_t>(z % P);
    }
  }
  std::uint64_t v_ = 0;
};

using FpA = Fp<(std::uint64_t(1) << 61) - 1>;
using FpB = Fp<4611686018427387847ULL>;

template <class T>
struct is_prime_field : std::false_type {};
template <std::uint64_t P>
struct is_prime_field<Fp<P>> : std::true_type {};

/// Maps an exact rational into the scalar type T.
template <class T>
T to_scalar(const Rational& q) {
  if constexpr (std::is_same_v<T, double>) {
    return q.get_d();
  } else if constexpr (std::is_same_v<T, Rational>) {
    return q;
  } else {
    static_assert(is_prime_field<T>::value, "unsupported scalar type");
    const unsigned long m = T::modulus;
    mpz_class num = q.get_num(), den = q.get_den();
    std::uint64_t a = mpz_fdiv_ui(num.get_mpz_t(), m);
    std::uint64_t b = mpz_fdiv_ui(den.get_mpz_t(), m);
    if (b == 0) throw std::domain_error("denominator vanishes in prime field");
    return T::from_raw(a) / T::from_raw(b);
  }
}

/// Coordinates are either exact rationals or doubles; both convert to T.
template <class T>
T to_scalar(double x) {
  static_assert(std::is_same_v<T, double>, "double coordinates only feed double arithmetic");
  return x;
}

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

template <class T>
bool scalar_is_zero(const T& v) {
  if constexpr (std::is_same_v<T, double>)
    return v == 0.0;
  else if constexpr (std::is_same_v<T, Rational>)
    return sgn(v) == 0;
  else
    return v.is_zero();
}

}  // namespace c1vol
