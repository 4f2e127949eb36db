#pragma once

// Error models, worst-case corrigibility of an encode/decode channel, and
// grid-scan estimation of the corrigible region in the (eps1, eps2) plane.
//
// Corrigibility is worst case over every input of the given size: a pair is
// corrigible only if the round trip succeeds for all inputs and all
// admissible perturbations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "precray/text.hpp"

namespace precray::precision {

enum class ErrorKind { Additive, Multiplicative };

/// The value at which an error magnitude means "no error".
constexpr double identity_error(ErrorKind kind) noexcept {
  return kind == ErrorKind::Additive ? 0.0 : 1.0;
}

inline bool legal_error(ErrorKind kind, double eps) noexcept {
  return std::isfinite(eps) && eps >= identity_error(kind);
}

struct Interval {
  double lo;
  double hi;

  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
  double width() const noexcept { return hi - lo; }
};

/// The set of values a true value `x` may be corrupted into.
inline Interval worst_case_interval(double x, ErrorKind kind, double eps) {
  if (!legal_error(kind, eps)) {
    throw std::invalid_argument(kind == ErrorKind::Additive
                                    ? "additive error must be >= 0"
                                    : "multiplicative error must be >= 1");
  }
  if (kind == ErrorKind::Additive) return {x - eps, x + eps};
  if (!(x > 0.0)) throw std::invalid_argument("multiplicative error needs a positive value");
  return {x / eps, eps * x};
}

struct ErrorPair {
  double eps1;  // input side
  double eps2;  // output side
};

/// Upper bound on enumerated inputs per corrigibility check (2^20).
inline constexpr std::uint64_t kMaxInputs = std::uint64_t{1} << 20;

/// An encode/perturb/measure/decode pipeline over inputs 0..value_count-1.
struct Channel {
  unsigned input_size = 1;  // n, in bits
  std::uint64_t value_count = 2;
  ErrorKind error_kind = ErrorKind::Additive;
  std::function<double(std::uint64_t)> encode;
  std::function<std::uint64_t(double)> decode;
  /// (intended, decoded) -> success. Defaults to equality when empty.
  std::function<bool(std::uint64_t, std::uint64_t)> success;
  /// True when checking interval endpoints is enough, i.e. the success set of
  /// every input is an interval in the measured value.
  bool corner_sufficient = true;
  /// When set, corners are trusted only while the composite measured interval
  /// is narrower than this (e.g. a circular encoding can wrap around).
  std::optional<double> corner_span_limit;
  /// Samples per error interval when corners do not suffice.
  unsigned dense_samples = 33;
  /// Analytic corrigible total-error threshold, when known; sizes default scan bounds.
  std::optional<double> threshold_hint;
};

namespace detail {

inline void validate(const Channel& c) {
  if (!c.encode || !c.decode) throw std::invalid_argument("channel needs encode and decode");
  if (c.value_count == 0) throw std::invalid_argument("channel has no inputs");
  if (c.value_count > kMaxInputs)
    throw std::invalid_argument("channel has more than 2^20 inputs; worst-case enumeration refused");
  if ((!c.corner_sufficient || c.corner_span_limit) && c.dense_samples < 2)
    throw std::invalid_argument("dense sampling needs at least 2 samples per interval");
}

inline std::vector<double> encode_all(const Channel& c) {
  std::vector<double> out(c.value_count);
  for (std::uint64_t x = 0; x < c.value_count; ++x) out[x] = c.encode(x);
  return out;
}

inline bool succeeds(const Channel& c, std::uint64_t x, double measured) {
  const std::uint64_t got = c.decode(measured);
  return c.success ? c.success(x, got) : got == x;
}

inline void sample_points(Interval iv, const Channel& c, bool corners, std::vector<double>& out) {
  out.clear();
  if (corners || iv.width() == 0.0) {
    out.push_back(iv.lo);
    if (iv.hi != iv.lo) out.push_back(iv.hi);
    return;
  }
  const unsigned k = c.dense_samples;
  for (unsigned i = 0; i < k; ++i) out.push_back(iv.lo + iv.width() * (static_cast<double>(i) / (k - 1)));
  out.back() = iv.hi;
}

inline bool corrigible_encoded(const Channel& c, const std::vector<double>& encoded, ErrorPair pair) {
  std::vector<double> outer;
  std::vector<double> inner;
  for (std::uint64_t x = 0; x < c.value_count; ++x) {
    const Interval implemented_range = worst_case_interval(encoded[x], c.error_kind, pair.eps1);
    bool corners = c.corner_sufficient;
    if (corners && c.corner_span_limit) {
      const double lo = worst_case_interval(implemented_range.lo, c.error_kind, pair.eps2).lo;
      const double hi = worst_case_interval(implemented_range.hi, c.error_kind, pair.eps2).hi;
      corners = hi - lo < *c.corner_span_limit;
    }
    sample_points(implemented_range, c, corners, outer);
    for (double implemented : outer) {
      sample_points(worst_case_interval(implemented, c.error_kind, pair.eps2), c, corners, inner);
      for (double measured : inner)
        if (!succeeds(c, x, measured)) return false;
    }
  }
  return true;
}

}  // namespace detail

inline bool corrigible(const Channel& channel, ErrorPair pair) {
  detail::validate(channel);
  if (!legal_error(channel.error_kind, pair.eps1) || !legal_error(channel.error_kind, pair.eps2))
    throw std::invalid_argument("error pair outside the error model's legal range");
  return detail::corrigible_encoded(channel, detail::encode_all(channel), pair);
}

/// Scan rectangle in error space. Each axis runs from the model's identity
/// error (0 additive, 1 multiplicative) up by the given extent.
struct Bounds {
  double extent1;
  double extent2;
};

/// Cell-by-cell corrigibility verdicts; cell (i, j) has centre
/// (origin + (i + 1/2) h, origin + (j + 1/2) h) with i along eps1.
struct RegionScan {
  double resolution = 0.0;
  double origin = 0.0;
  std::size_t cells1 = 0;
  std::size_t cells2 = 0;
  std::vector<std::uint8_t> mask;  // row-major in j, size cells1 * cells2

  bool at(std::size_t i, std::size_t j) const { return mask[j * cells1 + i] != 0; }
  double centre1(std::size_t i) const { return origin + (static_cast<double>(i) + 0.5) * resolution; }
  double centre2(std::size_t j) const { return origin + (static_cast<double>(j) + 0.5) * resolution; }
  std::size_t count() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1)); }
};

struct RegionEstimate {
  double area = 0.0;
  double resolution = 0.0;
  Bounds bounds{0.0, 0.0};
  std::size_t corrigible_cells = 0;
};

struct ScanOptions {
  unsigned threads = 0;  // 0: hardware concurrency
};

namespace detail {
inline std::size_t cells_along(double extent, double resolution) {
  if (extent == 0.0) return 0;
  if (resolution > extent) throw std::invalid_argument("resolution exceeds a side of the scan bounds");
  // The slack absorbs rounding when extent is an exact multiple of resolution.
  return static_cast<std::size_t>(std::floor(extent / resolution * (1.0 + 1e-12)));
}
}  // namespace detail

inline RegionScan scan_region(const Channel& channel, Bounds bounds, double resolution,
                              ScanOptions options = {}) {
  detail::validate(channel);
  if (!(std::isfinite(resolution) && resolution > 0.0))
    throw std::invalid_argument("resolution must be positive");
  if (!(bounds.extent1 >= 0.0 && bounds.extent2 >= 0.0 && std::isfinite(bounds.extent1) &&
        std::isfinite(bounds.extent2)))
    throw std::invalid_argument("scan bounds must be finite and inside the legal quadrant");

  RegionScan scan;
  scan.resolution = resolution;
  scan.origin = identity_error(channel.error_kind);
  scan.cells1 = detail::cells_along(bounds.extent1, resolution);
  scan.cells2 = detail::cells_along(bounds.extent2, resolution);
  scan.mask.assign(scan.cells1 * scan.cells2, 0);
  if (scan.mask.empty()) return scan;

  const auto encoded = detail::encode_all(channel);
  auto run_rows = [&](std::size_t first, std::size_t stride) {
    for (std::size_t j = first; j < scan.cells2; j += stride)
      for (std::size_t i = 0; i < scan.cells1; ++i)
        scan.mask[j * scan.cells1 + i] =
            detail::corrigible_encoded(channel, encoded, {scan.centre1(i), scan.centre2(j)}) ? 1 : 0;
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, scan.cells2));
  if (threads <= 1) {
    run_rows(0, 1);
  } else {
    // Rows write disjoint slices of the mask, so the result is order independent.
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(run_rows, t, threads);
    for (auto& th : pool) th.join();
  }
  return scan;
}

/// Centre-point grid estimate of the corrigible region's area.
inline RegionEstimate region_area(const Channel& channel, Bounds bounds, double resolution,
                                  ScanOptions options = {}) {
  const auto scan = scan_region(channel, bounds, resolution, options);
  RegionEstimate est;
  est.resolution = resolution;
  est.bounds = bounds;
  est.corrigible_cells = scan.count();
  est.area = static_cast<double>(est.corrigible_cells) * resolution * resolution;
  return est;
}

/// [0, 2 * threshold]^2 when the channel advertises a threshold, else [0, 1]^2.
inline Bounds default_bounds(const Channel& channel) {
  if (channel.threshold_hint) return {2.0 * *channel.threshold_hint, 2.0 * *channel.threshold_hint};
  return {1.0, 1.0};
}

inline bool is_unbounded(double precision) noexcept { return std::isinf(precision); }

/// Reciprocal of the corrigible area. An empty region gives +infinity, meaning
/// no finite precision suffices within the scanned bounds.
inline double precision_of(const RegionEstimate& estimate) {
  if (!(estimate.area > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / estimate.area;
}

struct SweepRow {
  unsigned n = 0;
  double area = 0.0;
  double precision = 0.0;
  double closed_form_precision = std::numeric_limits<double>::quiet_NaN();
  double rel_err = std::numeric_limits<double>::quiet_NaN();
};

struct SweepSettings {
  std::size_t cells = 500;  // per axis
  ScanOptions scan{};
};

/// Precision as a function of input size, for n = 1..n_max. Each n scans
/// default_bounds() at `cells` per axis. `closed_form`, if given, fills the
/// comparison columns.
inline std::vector<SweepRow> precision_complexity(
    const std::function<Channel(unsigned)>& family, unsigned n_max, SweepSettings settings = {},
    const std::function<double(unsigned)>& closed_form = {}) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (settings.cells < 1) throw std::invalid_argument("cells per axis must be >= 1");
  std::vector<SweepRow> rows;
  for (unsigned n = 1; n <= n_max; ++n) {
    const Channel channel = family(n);
    const Bounds b = default_bounds(channel);
    const double side = std::max(b.extent1, b.extent2);
    const auto est = region_area(channel, b, side / static_cast<double>(settings.cells), settings.scan);
    SweepRow row;
    row.n = n;
    row.area = est.area;
    row.precision = precision_of(est);
    if (closed_form) {
      row.closed_form_precision = closed_form(n);
      row.rel_err = std::abs(row.precision - row.closed_form_precision) / row.closed_form_precision;
    }
    rows.push_back(row);
  }
  return rows;
}

inline constexpr const char* kSweepHeader = "n,area,precision,closed_form_precision,rel_err";

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << text::full(r.area) << ',' << text::full(r.precision) << ','
        << text::full(r.closed_form_precision) << ',' << text::full(r.rel_err) << '\n';
  }
}

inline std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line != kSweepHeader) throw ParseError(1, "missing sweep CSV header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      fields.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    fields.push_back(rest);
    if (fields.size() != 5) throw ParseError(lineno, "expected 5 fields");
    const auto n = text::parse_int(fields[0]);
    if (!n || *n < 1) throw ParseError(lineno, "bad n");
    SweepRow r;
    r.n = static_cast<unsigned>(*n);
    double* targets[] = {&r.area, &r.precision, &r.closed_form_precision, &r.rel_err};
    for (std::size_t k = 0; k < 4; ++k) {
      auto v = text::parse_double(fields[k + 1]);
      if (!v) throw ParseError(lineno, "bad decimal in column " + std::to_string(k + 2));
      *targets[k] = *v;
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace precray::precision
