#pragma once

// Store/retrieve of an n-bit value x = sum_i 2^-i b_i as a plane angle
// theta_x = 2 pi (x + 2^-(n+1)), i.e. the centre of the angular cell
// [2 pi x, 2 pi (x + 2^-n)). Angles live on the circle [0, 2 pi).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include "precray/precision.hpp"

namespace precray::angle {

inline constexpr unsigned kMaxBits = 20;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline void require_bits(unsigned n) {
  if (n < 1 || n > kMaxBits) throw std::invalid_argument("bit width must be in 1..20");
}

/// n bits, most significant (weight 1/2) first; `code` holds them as an integer.
class BitValue {
 public:
  BitValue(unsigned n, std::uint32_t code) : n_(n), code_(code) {
    require_bits(n);
    if (code >= (std::uint32_t{1} << n)) throw std::invalid_argument("code does not fit in n bits");
  }

  static BitValue from_string(std::string_view bits) {
    if (bits.empty() || bits.size() > kMaxBits) throw std::invalid_argument("bit string length must be in 1..20");
    std::uint32_t code = 0;
    for (char c : bits) {
      if (c != '0' && c != '1') throw std::invalid_argument("bit string must contain only 0 and 1");
      code = (code << 1) | static_cast<std::uint32_t>(c - '0');
    }
    return BitValue(static_cast<unsigned>(bits.size()), code);
  }

  unsigned width() const noexcept { return n_; }
  std::uint32_t code() const noexcept { return code_; }
  bool bit(unsigned i) const { return (code_ >> (n_ - 1 - i)) & 1u; }  // i = 0 is the 2^-1 digit

  /// Numeric value in [0, 1); exact in double for n <= 20.
  double value() const noexcept { return std::ldexp(static_cast<double>(code_), -static_cast<int>(n_)); }

  std::string to_string() const {
    std::string s(n_, '0');
    for (unsigned i = 0; i < n_; ++i) s[i] = bit(i) ? '1' : '0';
    return s;
  }

  friend bool operator==(const BitValue&, const BitValue&) = default;

 private:
  unsigned n_;
  std::uint32_t code_;
};

/// Representative of a point on the circle, kept in [0, 2 pi).
class Angle {
 public:
  explicit Angle(double radians) : theta_(normalize(radians)) {}

  double radians() const noexcept { return theta_; }

  static double normalize(double radians) {
    double t = std::fmod(radians, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
  }

 private:
  double theta_;
};

/// Shorter of the two arcs between a and b.
inline double circular_distance(double a, double b) {
  const double d = std::abs(Angle::normalize(a - b));
  return std::min(d, kTwoPi - d);
}

inline double encode_code(std::uint32_t code, unsigned n) {
  const double x = std::ldexp(static_cast<double>(code), -static_cast<int>(n));
  return Angle::normalize(kTwoPi * (x + std::ldexp(1.0, -static_cast<int>(n) - 1)));
}

/// Nearest cell centre to `theta`, ties toward the smaller code. Total on all reals.
inline std::uint32_t decode_code(double theta, unsigned n) {
  double y = theta / kTwoPi - std::ldexp(1.0, -static_cast<int>(n) - 1);
  y -= std::floor(y);
  const double scaled = std::ldexp(y, static_cast<int>(n));
  const auto k = static_cast<std::uint64_t>(std::ceil(scaled - 0.5));
  return static_cast<std::uint32_t>(k & ((std::uint64_t{1} << n) - 1));
}

inline Angle encode(const BitValue& v) { return Angle(encode_code(v.code(), v.width())); }

inline BitValue decode(double theta, unsigned n) {
  require_bits(n);
  return BitValue(n, decode_code(theta, n));
}
inline BitValue decode(Angle theta, unsigned n) { return decode(theta.radians(), n); }

/// Largest corrigible total error eps1 + eps2: 2^-n pi.
inline double threshold(unsigned n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return std::ldexp(std::numbers::pi, -static_cast<int>(n));
}

/// Area of the triangle eps1, eps2 >= 0, eps1 + eps2 <= threshold(n): 2^-(2n+1) pi^2.
inline double closed_form_area(unsigned n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return std::ldexp(std::numbers::pi * std::numbers::pi, -2 * static_cast<int>(n) - 1);
}

/// 2^(2n+1) / pi^2.
inline double closed_form_precision(unsigned n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return std::ldexp(1.0 / (std::numbers::pi * std::numbers::pi), 2 * static_cast<int>(n) + 1);
}

/// The store/retrieve pipeline as a channel under additive error; success
/// means all n bits come back unchanged.
inline precision::Channel as_channel(unsigned n) {
  require_bits(n);
  precision::Channel c;
  c.input_size = n;
  c.value_count = std::uint64_t{1} << n;
  c.error_kind = precision::ErrorKind::Additive;
  c.encode = [n](std::uint64_t code) { return encode_code(static_cast<std::uint32_t>(code), n); };
  c.decode = [n](double theta) { return static_cast<std::uint64_t>(decode_code(theta, n)); };
  // The success set of each input is one cell-wide arc, so endpoints decide
  // corrigibility as long as the measured interval is narrower than a cell and
  // cannot wrap back into the arc.
  c.corner_sufficient = true;
  c.corner_span_limit = 2.0 * threshold(n);
  c.threshold_hint = threshold(n);
  return c;
}

}  // namespace precray::angle
