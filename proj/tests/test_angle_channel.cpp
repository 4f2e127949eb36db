#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "precray/angle_channel.hpp"

using namespace precray::angle;
using precray::precision::corrigible;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(BitValue, StringAndNumericForms) {
  const auto v = BitValue::from_string("101");
  EXPECT_EQ(v.width(), 3u);
  EXPECT_EQ(v.code(), 5u);
  EXPECT_DOUBLE_EQ(v.value(), 0.625);
  EXPECT_EQ(v.to_string(), "101");
  EXPECT_TRUE(v.bit(0));
  EXPECT_FALSE(v.bit(1));
  EXPECT_THROW(BitValue::from_string(""), std::invalid_argument);
  EXPECT_THROW(BitValue::from_string("012"), std::invalid_argument);
  EXPECT_THROW(BitValue::from_string(std::string(21, '1')), std::invalid_argument);
  EXPECT_THROW(BitValue(2, 4), std::invalid_argument);
  EXPECT_THROW(BitValue(0, 0), std::invalid_argument);
}

TEST(BitValue, ValueRoundTripsThroughBits) {
  for (unsigned n = 1; n <= 12; ++n)
    for (std::uint32_t code = 0; code < (1u << n); code += 1 + (code >> 4)) {
      const BitValue v(n, code);
      EXPECT_EQ(BitValue::from_string(v.to_string()), v);
      EXPECT_EQ(std::ldexp(v.value(), static_cast<int>(n)), static_cast<double>(code));
    }
}

TEST(Angle, NormalizesIntoCircle) {
  EXPECT_DOUBLE_EQ(Angle(-kPi / 2).radians(), 1.5 * kPi);
  EXPECT_DOUBLE_EQ(Angle(5 * kPi).radians(), kPi);
  EXPECT_EQ(Angle(2 * kPi).radians(), 0.0);
  EXPECT_NEAR(circular_distance(0.1, 2 * kPi - 0.1), 0.2, 1e-12);
}

TEST(Encode, Examples) {
  EXPECT_DOUBLE_EQ(encode(BitValue::from_string("0")).radians(), kPi / 2);
  EXPECT_DOUBLE_EQ(encode(BitValue::from_string("1")).radians(), 1.5 * kPi);
  EXPECT_DOUBLE_EQ(encode(BitValue::from_string("101")).radians(), 1.375 * kPi);
  EXPECT_NEAR(encode(BitValue::from_string("101")).radians(), 4.31969, 1e-5);
}

TEST(Encode, CentralInItsCell) {
  for (unsigned n = 1; n <= 8; ++n)
    for (std::uint32_t c = 0; c < (1u << n); ++c) {
      const BitValue v(n, c);
      const double lo = 2 * kPi * v.value();
      const double hi = 2 * kPi * (v.value() + std::ldexp(1.0, -static_cast<int>(n)));
      EXPECT_NEAR(encode(v).radians(), 0.5 * (lo + hi), 1e-12);
    }
}

TEST(Decode, Examples) {
  EXPECT_EQ(decode(kPi / 2, 1).to_string(), "0");
  EXPECT_EQ(decode(kPi / 2 + 0.3 * (kPi / 2), 1).to_string(), "0");
  // 3pi/2 lies halfway between the centres of "10" (5pi/4) and "11" (7pi/4);
  // the tie goes to the smaller value.
  EXPECT_EQ(oracle::nearest_centre(1.5 * kPi, 2), 2u);
  EXPECT_EQ(decode(1.5 * kPi, 2).to_string(), "10");
  EXPECT_THROW(decode(0.0, 0), std::invalid_argument);
  EXPECT_THROW(decode(0.0, 21), std::invalid_argument);
}

TEST(Decode, AgreesWithNearestCentreOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-10.0, 20.0);
  for (int i = 0; i < 20000; ++i) {
    const unsigned n = 1 + static_cast<unsigned>(rng() % 8);
    const double theta = u(rng);
    EXPECT_EQ(decode_code(theta, n), oracle::nearest_centre(theta, n)) << "theta=" << theta << " n=" << n;
  }
}

TEST(Decode, RoundTripIdentity) {
  for (unsigned n = 1; n <= 12; ++n)
    for (std::uint32_t c = 0; c < (1u << n); ++c) {
      const BitValue v(n, c);
      ASSERT_EQ(decode(encode(v), n), v) << "n=" << n << " code=" << c;
    }
  for (std::uint32_t c : {0u, 1u, 12345u, (1u << 20) - 1}) {
    const BitValue v(20, c);
    EXPECT_EQ(decode(encode(v), 20), v);
  }
}

TEST(Decode, PerturbedRoundTripSoundAndSharp) {
  for (unsigned n = 1; n <= 10; ++n) {
    const double t = threshold(n);
    bool witness = false;
    for (std::uint32_t c = 0; c < (1u << n); ++c) {
      const double theta = encode_code(c, n);
      for (double frac : {-0.99, -0.5, 0.0, 0.5, 0.99}) ASSERT_EQ(decode_code(theta + frac * t, n), c);
      witness = witness || decode_code(theta + 1.01 * t, n) != c || decode_code(theta - 1.01 * t, n) != c;
    }
    EXPECT_TRUE(witness) << "n=" << n;
  }
}

TEST(Decode, WrapsAroundTheCircle) {
  for (unsigned n = 1; n <= 10; ++n) {
    const std::uint32_t last = (1u << n) - 1;
    const double t = threshold(n);
    // Value 0's cell starts at angle 0; perturbing below 0 wraps to 2 pi.
    EXPECT_EQ(decode_code(encode_code(0, n) - 0.99 * t, n), 0u);
    EXPECT_EQ(decode_code(encode_code(0, n) - 0.99 * t + 2 * kPi, n), 0u);
    EXPECT_EQ(decode_code(encode_code(last, n) + 0.99 * t, n), last);
    EXPECT_EQ(decode_code(encode_code(last, n) + 0.99 * t - 2 * kPi, n), last);
    EXPECT_EQ(decode_code(encode_code(last, n) + 1.01 * t, n), 0u);
    EXPECT_EQ(decode_code(encode_code(0, n) - 1.01 * t, n), last);
  }
}

TEST(Threshold, Values) {
  EXPECT_DOUBLE_EQ(threshold(1), kPi / 2);
  EXPECT_NEAR(threshold(4), 0.19635, 1e-5);
  for (unsigned n = 1; n < 20; ++n) EXPECT_EQ(threshold(n) / threshold(n + 1), 2.0);
}

TEST(ClosedForm, AreaAndPrecision) {
  EXPECT_NEAR(closed_form_area(1), 1.23370, 1e-5);
  EXPECT_NEAR(closed_form_precision(1), 0.81057, 1e-5);
  EXPECT_NEAR(closed_form_precision(3), 12.969112, 1e-5);
  for (unsigned n = 1; n <= 20; ++n) {
    EXPECT_DOUBLE_EQ(closed_form_area(n) * closed_form_precision(n), 1.0);
    if (n > 1) {
      EXPECT_EQ(std::log2(closed_form_precision(n) / closed_form_precision(n - 1)), 2.0);
    }
  }
}

TEST(AsChannel, CorrigibilityMatchesOracleNearThreshold) {
  const auto ch = as_channel(2);
  EXPECT_TRUE(oracle::angle_corrigible(2, 0.99 * kPi / 8, 0.0));
  EXPECT_TRUE(corrigible(ch, {0.99 * kPi / 8, 0.0}));
  EXPECT_FALSE(oracle::angle_corrigible(2, 0.0, 1.01 * kPi / 4));
  EXPECT_FALSE(corrigible(ch, {0.0, 1.01 * kPi / 4}));
}

TEST(AsChannel, CorrigibilityAgreesWithDenseOracle) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int i = 0; i < 400; ++i) {
    const unsigned n = 1 + static_cast<unsigned>(rng() % 4);
    const double t = threshold(n);
    const double e1 = u(rng) * t, e2 = u(rng) * t;
    // Stay off the measure-zero boundary.
    if (std::abs(e1 + e2 - t) < 0.01 * t) continue;
    EXPECT_EQ(corrigible(as_channel(n), {e1, e2}), oracle::angle_corrigible(n, e1, e2))
        << "n=" << n << " e1=" << e1 << " e2=" << e2;
  }
}

TEST(AsChannel, OneBitRegionMatchesTriangle) {
  const auto est = precray::precision::region_area(as_channel(1), {kPi, kPi}, kPi / 1000);
  EXPECT_LT(std::abs(est.area - kPi * kPi / 8) / (kPi * kPi / 8), 0.01);
}

TEST(AsChannel, RegionMatchesPredicateExceptOnBoundaryCells) {
  for (unsigned n : {1u, 3u, 6u}) {
    const double t = threshold(n);
    const auto scan = precray::precision::scan_region(as_channel(n), {2 * t, 2 * t}, 2 * t / 200);
    const double h = scan.resolution;
    for (std::size_t j = 0; j < scan.cells2; ++j)
      for (std::size_t i = 0; i < scan.cells1; ++i) {
        const double lo = static_cast<double>(i + j) * h;  // cell's smallest eps1 + eps2
        const double hi = lo + 2 * h;
        if (lo <= t && t <= hi) continue;  // the line crosses this cell
        EXPECT_EQ(scan.at(i, j), hi < t) << "n=" << n << " cell " << i << "," << j;
      }
  }
}
