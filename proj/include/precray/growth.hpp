#pragma once

// Canonical growth functions  n -> coeff * base^n * n^poly * (log2 n)^logexp,
// the big-O preorder on them, and the dominance / overall-complexity calculus
// over a finite set of resources.

#include <algorithm>
#include <cmath>
#include <compare>
#include <istream>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "precray/text.hpp"

namespace precray::growth {

class GrowthTerm {
 public:
  /// Throws std::invalid_argument unless coeff > 0, base >= 1, poly >= 0, logexp >= 0.
  GrowthTerm(double coeff, double base, double poly, int logexp)
      : coeff_(coeff), base_(base), poly_(poly), logexp_(logexp) {
    if (!(std::isfinite(coeff) && coeff > 0.0))
      throw std::invalid_argument("growth term: coefficient must be positive and finite");
    if (!(std::isfinite(base) && base >= 1.0))
      throw std::invalid_argument("growth term: base must be >= 1");
    if (!(std::isfinite(poly) && poly >= 0.0))
      throw std::invalid_argument("growth term: polynomial degree must be >= 0");
    if (logexp < 0) throw std::invalid_argument("growth term: log exponent must be >= 0");
  }

  static GrowthTerm polynomial(double degree, double coeff = 1.0) {
    return GrowthTerm(coeff, 1.0, degree, 0);
  }
  static GrowthTerm exponential(double base, double coeff = 1.0) {
    return GrowthTerm(coeff, base, 0.0, 0);
  }

  double coeff() const noexcept { return coeff_; }
  double base() const noexcept { return base_; }
  double poly() const noexcept { return poly_; }
  int logexp() const noexcept { return logexp_; }

  /// The part of the term that survives big-O: everything but the coefficient.
  std::tuple<double, double, int> shape() const noexcept { return {base_, poly_, logexp_}; }

  GrowthTerm with_coeff(double c) const { return GrowthTerm(c, base_, poly_, logexp_); }

  friend bool operator==(const GrowthTerm&, const GrowthTerm&) = default;

 private:
  double coeff_;
  double base_;
  double poly_;
  int logexp_;
};

/// Result of evaluating a term; `saturated` marks values beyond double range.
struct GrowthValue {
  double value;
  bool saturated;
};

inline GrowthValue eval(const GrowthTerm& f, long long n) {
  if (n < 1) throw std::invalid_argument("growth eval: n must be >= 1");
  const double nd = static_cast<double>(n);
  const double lg = std::log2(std::max(nd, 2.0));
  const double log2_value = std::log2(f.coeff()) + nd * std::log2(f.base()) +
                            f.poly() * std::log2(nd) + f.logexp() * std::log2(lg);
  constexpr double kMax = std::numeric_limits<double>::max();
  if (log2_value >= 1024.0) return {kMax, true};
  const double v = f.coeff() * std::pow(f.base(), nd) * std::pow(nd, f.poly()) *
                   std::pow(lg, f.logexp());
  if (std::isfinite(v)) return {v, false};
  // Intermediate overflow with a representable product.
  const double via_log = std::exp2(log2_value);
  if (!std::isfinite(via_log)) return {kMax, true};
  return {via_log, false};
}

/// f ≲ g, i.e. f ∈ O(g). Within this family that is lexicographic order on
/// (base, poly, logexp); coefficients do not matter.
inline bool lesssim(const GrowthTerm& f, const GrowthTerm& g) noexcept {
  return f.shape() <= g.shape();
}

inline bool equivalent(const GrowthTerm& f, const GrowthTerm& g) noexcept {
  return lesssim(f, g) && lesssim(g, f);
}

inline std::string to_string(const GrowthTerm& f) {
  std::string out;
  auto factor = [&](const std::string& s) {
    if (!out.empty()) out += '*';
    out += s;
  };
  if (f.coeff() != 1.0) factor(text::shortest(f.coeff()));
  if (f.base() != 1.0) factor(text::shortest(f.base()) + "^n");
  if (f.poly() == 1.0)
    factor("n");
  else if (f.poly() != 0.0)
    factor("n^" + text::shortest(f.poly()));
  if (f.logexp() == 1)
    factor("log(n)");
  else if (f.logexp() > 1)
    factor("log(n)^" + std::to_string(f.logexp()));
  return out.empty() ? "1" : out;
}

struct ResourceProfile {
  std::string name;
  GrowthTerm complexity;
};

namespace detail {
inline void require_resources(std::span<const ResourceProfile> resources) {
  if (resources.empty()) throw std::invalid_argument("resource set must be non-empty");
  std::unordered_set<std::string> seen;
  for (const auto& r : resources)
    if (!seen.insert(r.name).second)
      throw std::invalid_argument("duplicate resource name: " + r.name);
}
}  // namespace detail

/// Maximal elements of (resources, ≲): A is kept iff A ≲ B implies B ≲ A for every B.
/// Order of the input is preserved.
inline std::vector<ResourceProfile> dominant_set(std::span<const ResourceProfile> resources) {
  detail::require_resources(resources);
  std::vector<ResourceProfile> out;
  for (const auto& a : resources) {
    bool maximal = true;
    for (const auto& b : resources) {
      if (lesssim(a.complexity, b.complexity) && !lesssim(b.complexity, a.complexity)) {
        maximal = false;
        break;
      }
    }
    if (maximal) out.push_back(a);
  }
  return out;
}

/// Sum of the dominant complexity functions. Dominants share one shape, so the
/// sum is that shape with the coefficients added.
inline GrowthTerm overall_complexity(std::span<const ResourceProfile> resources) {
  const auto dominants = dominant_set(resources);
  double coeff = 0.0;
  for (const auto& d : dominants) coeff += d.complexity.coeff();
  return dominants.front().complexity.with_coeff(coeff);
}

/// Reads `name coeff base poly logexp` lines; `#` starts a comment.
inline std::vector<ResourceProfile> parse_spec(std::istream& in) {
  std::vector<ResourceProfile> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = text::tokenize(line);
    if (tok.empty()) continue;
    if (tok.size() != 5)
      throw ParseError(lineno, "expected 'name coeff base poly logexp', got " +
                                   std::to_string(tok.size()) + " fields");
    const auto coeff = text::parse_double(tok[1]);
    const auto base = text::parse_double(tok[2]);
    const auto poly = text::parse_double(tok[3]);
    const auto logexp = text::parse_int(tok[4]);
    if (!coeff || !base || !poly) throw ParseError(lineno, "malformed decimal literal");
    if (!logexp || *logexp < 0 || *logexp > std::numeric_limits<int>::max())
      throw ParseError(lineno, "log exponent must be a non-negative integer");
    std::string name(tok[0]);
    if (!seen.insert(name).second) throw ParseError(lineno, "duplicate resource '" + name + "'");
    try {
      out.push_back({std::move(name), GrowthTerm(*coeff, *base, *poly, static_cast<int>(*logexp))});
    } catch (const std::invalid_argument& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (out.empty()) throw ParseError(lineno, "no resources defined");
  return out;
}

}  // namespace precray::growth
