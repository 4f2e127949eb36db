#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "precray/growth.hpp"

using namespace precray::growth;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

GrowthTerm precision_term() { return GrowthTerm(2.0 / kPi2, 4.0, 0.0, 0); }

GrowthTerm random_term(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coeff(0.01, 100.0);
  std::uniform_int_distribution<int> pick(0, 3);
  // Integer shape steps: close shapes (base 1.5 against n^3 log^2 n, say) only
  // separate beyond the n = 8..64 sample window.
  static constexpr double bases[] = {1.0, 1.0, 2.0, 4.0};
  const double base = bases[pick(rng)];
  const double poly = static_cast<double>(pick(rng));
  const int logexp = pick(rng) % 3;
  return GrowthTerm(coeff(rng), base, poly, logexp);
}

}  // namespace

TEST(GrowthTerm, RejectsInvalidFields) {
  EXPECT_THROW(GrowthTerm(0.0, 1.0, 0.0, 0), std::invalid_argument);
  EXPECT_THROW(GrowthTerm(1.0, 0.5, 0.0, 0), std::invalid_argument);
  EXPECT_THROW(GrowthTerm(1.0, 1.0, -1.0, 0), std::invalid_argument);
  EXPECT_THROW(GrowthTerm(1.0, 1.0, 0.0, -1), std::invalid_argument);
  EXPECT_THROW(GrowthTerm(std::nan(""), 1.0, 0.0, 0), std::invalid_argument);
}

TEST(GrowthEval, DirectSubstitution) {
  EXPECT_DOUBLE_EQ(eval(GrowthTerm(1, 2, 0, 0), 3).value, 8.0);
  EXPECT_DOUBLE_EQ(eval(GrowthTerm(1, 1, 2, 0), 5).value, 25.0);
  EXPECT_NEAR(eval(precision_term(), 3).value, 128.0 / kPi2, 1e-12);
  EXPECT_NEAR(eval(precision_term(), 3).value, 12.969112, 1e-5);
}

TEST(GrowthEval, LogFactorClampedAtTwo) {
  // log2(max(1, 2)) = 1, so the log factor does not annihilate the term at n = 1.
  EXPECT_DOUBLE_EQ(eval(GrowthTerm(3, 1, 1, 4), 1).value, 3.0);
  EXPECT_DOUBLE_EQ(eval(GrowthTerm(1, 1, 0, 2), 16).value, 16.0);
}

TEST(GrowthEval, OverflowSaturates) {
  const auto v = eval(GrowthTerm(1, 4, 0, 0), 2000);
  EXPECT_TRUE(v.saturated);
  EXPECT_EQ(v.value, std::numeric_limits<double>::max());
  EXPECT_FALSE(eval(GrowthTerm(1, 4, 0, 0), 500).saturated);
  // pow(base, n) alone overflows, the product does not.
  const auto tiny = eval(GrowthTerm(1e-300, 2, 0, 0), 1100);
  EXPECT_FALSE(tiny.saturated);
  EXPECT_TRUE(std::isfinite(tiny.value));
  EXPECT_THROW(eval(GrowthTerm(1, 1, 1, 0), 0), std::invalid_argument);
}

TEST(Lesssim, Examples) {
  EXPECT_TRUE(lesssim(GrowthTerm::polynomial(10), GrowthTerm::exponential(2)));
  EXPECT_FALSE(lesssim(GrowthTerm::exponential(2), GrowthTerm::polynomial(10)));
  EXPECT_TRUE(lesssim(GrowthTerm::polynomial(2, 3.0), GrowthTerm::polynomial(2)));
  EXPECT_TRUE(lesssim(GrowthTerm::polynomial(2), GrowthTerm::polynomial(2, 3.0)));
  EXPECT_FALSE(lesssim(GrowthTerm(1, 1, 1, 1), GrowthTerm::polynomial(1)));
}

TEST(Lesssim, PreorderProperties) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto f = random_term(rng), g = random_term(rng), h = random_term(rng);
    EXPECT_TRUE(lesssim(f, f));
    EXPECT_TRUE(lesssim(f, g) || lesssim(g, f));
    if (lesssim(f, g) && lesssim(g, h)) {
      EXPECT_TRUE(lesssim(f, h));
    }
  }
}

TEST(Lesssim, StrictOrderShowsInSampledRatios) {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    const auto f = random_term(rng), g = random_term(rng);
    if (!lesssim(f, g) || lesssim(g, f)) continue;
    ++checked;
    double prev = std::numeric_limits<double>::infinity();
    for (long long n : {8, 16, 32, 64}) {
      const double ratio = eval(f, n).value / eval(g, n).value;
      EXPECT_LE(ratio, prev) << to_string(f) << " vs " << to_string(g) << " at n=" << n;
      prev = ratio;
    }
  }
  EXPECT_GT(checked, 500);
}

TEST(Dominance, Examples) {
  const std::vector<ResourceProfile> a = {{"time", GrowthTerm::exponential(2)}, {"space", GrowthTerm::polynomial(1)}};
  auto d = dominant_set(a);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].name, "time");
  EXPECT_EQ(overall_complexity(a), GrowthTerm::exponential(2));

  const std::vector<ResourceProfile> b = {{"time", GrowthTerm::polynomial(1)}, {"space", GrowthTerm::polynomial(1)}};
  d = dominant_set(b);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(overall_complexity(b), GrowthTerm::polynomial(1, 2.0));
  EXPECT_EQ(to_string(overall_complexity(b)), "2*n");

  const std::vector<ResourceProfile> c = {
      {"time", GrowthTerm::polynomial(3)}, {"space", GrowthTerm::polynomial(2)}, {"precision", precision_term()}};
  d = dominant_set(c);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].name, "precision");
  EXPECT_EQ(overall_complexity(c), precision_term());
}

TEST(Dominance, EmptyAndDuplicateRejected) {
  std::vector<ResourceProfile> none;
  EXPECT_THROW(dominant_set(none), std::invalid_argument);
  EXPECT_THROW(overall_complexity(none), std::invalid_argument);
  const std::vector<ResourceProfile> dup = {{"t", GrowthTerm::polynomial(1)}, {"t", GrowthTerm::polynomial(2)}};
  EXPECT_THROW(dominant_set(dup), std::invalid_argument);
}

TEST(Dominance, RandomSetsSatisfyMaximality) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<ResourceProfile> rs;
    const int k = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < k; ++i) rs.push_back({"r" + std::to_string(i), random_term(rng)});
    const auto dom = dominant_set(rs);
    ASSERT_FALSE(dom.empty());
    for (const auto& m : dom) {
      bool member = false;
      for (const auto& r : rs) member = member || r.name == m.name;
      EXPECT_TRUE(member);
      for (const auto& b : rs)
        if (lesssim(m.complexity, b.complexity)) {
          EXPECT_TRUE(lesssim(b.complexity, m.complexity));
        }
    }
    const auto overall = overall_complexity(rs);
    for (const auto& m : dom) EXPECT_TRUE(equivalent(overall, m.complexity));
  }
}

TEST(GrowthSpec, ParsesLinesAndComments) {
  std::istringstream in("# resources\ntime 1 1 3 0\n\nspace 1 1 2 0  # quadratic\nprecision 0.2026 4 0 0\n");
  const auto rs = parse_spec(in);
  ASSERT_EQ(rs.size(), 3u);
  EXPECT_EQ(rs[2].name, "precision");
  EXPECT_DOUBLE_EQ(rs[2].complexity.coeff(), 0.2026);
  EXPECT_EQ(dominant_set(rs).front().name, "precision");
}

TEST(GrowthSpec, ReportsLineNumbers) {
  auto line_of = [](const std::string& s) {
    std::istringstream in(s);
    try {
      parse_spec(in);
    } catch (const precray::ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("time 1 1 3 0\nspace 1 1 x 0\n"), 2u);
  EXPECT_EQ(line_of("a 1 1 1 0\n# c\nb 1 1 1\n"), 3u);
  EXPECT_EQ(line_of("a 1 1 1 0.5\n"), 1u);
  EXPECT_EQ(line_of("a 1 0.5 1 0\n"), 1u);
  EXPECT_EQ(line_of("a 1 1 1 0\na 1 1 2 0\n"), 2u);
  EXPECT_EQ(line_of("# nothing\n"), 1u);
}
