#pragma once

// The `precray` command line. Exit status: 0 success, 1 usage error,
// 2 input-data error (unreadable or malformed files, unwritable output).

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "precray/angle_channel.hpp"
#include "precray/growth.hpp"
#include "precray/optics.hpp"
#include "precray/precision.hpp"
#include "precray/scene_file.hpp"
#include "precray/text.hpp"

namespace precray::cli {

inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kData = 2;

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline optics::SceneTemplate load_scene(const std::string& path) {
  std::istringstream in(slurp(path));
  try {
    return optics::parse_scene(in);
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline optics::Scene instantiate(const optics::SceneTemplate& tpl, const std::string& path) {
  try {
    return tpl.instantiate();
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = std::min(csv.find(',', start), csv.size());
    const auto value = text::parse_double(std::string_view(csv).substr(start, comma - start));
    if (!value) throw UsageError("--values: malformed decimal in '" + csv + "'");
    out.push_back(*value);
    start = comma + 1;
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write '" + path + "'");
  f << content;
  f.flush();
  if (!f) throw DataError("failed writing '" + path + "'");
}

inline void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

}  // namespace detail

/// Runs one invocation; `argv[0]` is the program name.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Precision complexity and finite-precision ray tracing toolkit", "precray"};
  app.require_subcommand(1);

  // channel sweep / channel check
  auto* channel = app.add_subcommand("channel", "Angle store/retrieve channel experiments");
  channel->require_subcommand(1);
  auto* sweep = channel->add_subcommand("sweep", "Measured vs closed-form precision for n = 1..n-max (CSV)");
  unsigned n_max = 0;
  std::size_t cells = 500;
  std::string out_path;
  sweep->add_option("--n-max", n_max, "Largest bit width, 1..12")->required();
  sweep->add_option("--cells", cells, "Grid cells per axis")->capture_default_str();
  sweep->add_option("--out", out_path, "Output CSV path (stdout when omitted)");

  auto* check = channel->add_subcommand("check", "Worst-case corrigibility of one error pair");
  unsigned n_bits = 0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  check->add_option("--n", n_bits, "Bit width, 1..20")->required();
  check->add_option("--eps1", eps1, "Input-side additive error (radians)")->required();
  check->add_option("--eps2", eps2, "Output-side additive error (radians)")->required();

  auto* region = app.add_subcommand("region", "Grid estimate of the corrigible region of the angle channel");
  unsigned region_n = 0;
  std::size_t region_cells = 500;
  double region_bound = 0.0;
  region->add_option("--n", region_n, "Bit width, 1..20")->required();
  region->add_option("--cells", region_cells, "Grid cells per axis")->capture_default_str();
  region->add_option("--bound", region_bound, "Side of the scanned square (default: twice the threshold)");

  // Tracing
  std::string scene_path;
  std::size_t max_bounces = 10000;
  double max_path = 1e6;
  auto add_trace_flags = [&](CLI::App* cmd) {
    cmd->add_option("--scene", scene_path, "Scene file")->required();
    cmd->add_option("--max-bounces", max_bounces, "Bounce budget")->capture_default_str();
    cmd->add_option("--max-path", max_path, "Path-length budget (scene units)")->capture_default_str();
  };
  auto* trace = app.add_subcommand("trace", "Exact ray trace of a scene");
  add_trace_flags(trace);

  auto* trace_ball = app.add_subcommand("trace-ball", "Finite-precision (ball) trace of a scene");
  add_trace_flags(trace_ball);
  double eps_pos = 0.0;
  double eps_ang = 0.0;
  trace_ball->add_option("--eps-pos", eps_pos, "Initial positional radius")->capture_default_str();
  trace_ball->add_option("--eps-ang", eps_ang, "Initial angular radius (radians)")->capture_default_str();

  auto* sensitivity = app.add_subcommand("sensitivity", "Exact traces across approximations of one parameter");
  add_trace_flags(sensitivity);
  std::string param;
  std::string values_csv;
  sensitivity->add_option("--param", param, "Parameter name (without $)")->required();
  sensitivity->add_option("--values", values_csv, "Comma-separated approximations")->required();

  auto* dominance = app.add_subcommand("dominance", "Dominant resources and overall complexity");
  std::string spec_path;
  dominance->add_option("--spec", spec_path, "Growth spec file: name coeff base poly logexp")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  std::ostringstream result;
  try {
    if (sweep->parsed()) {
      detail::require(n_max >= 1 && n_max <= 12, "--n-max must be in 1..12");
      detail::require(cells >= 1, "--cells must be >= 1");
      const auto rows = precision::precision_complexity(angle::as_channel, n_max, {cells, {}},
                                                        angle::closed_form_precision);
      precision::write_sweep_csv(result, rows);
      if (!out_path.empty()) {
        detail::write_file(out_path, result.str());
        return kOk;
      }
    } else if (check->parsed()) {
      detail::require(n_bits >= 1 && n_bits <= angle::kMaxBits, "--n must be in 1..20");
      detail::require(eps1 >= 0.0 && eps2 >= 0.0, "additive errors must be >= 0");
      const bool ok = precision::corrigible(angle::as_channel(n_bits), {eps1, eps2});
      result << "corrigible " << (ok ? "true" : "false") << '\n';
    } else if (region->parsed()) {
      detail::require(region_n >= 1 && region_n <= angle::kMaxBits, "--n must be in 1..20");
      detail::require(region_cells >= 1, "--cells must be >= 1");
      detail::require(region_bound >= 0.0, "--bound must be >= 0");
      const auto ch = angle::as_channel(region_n);
      const double side = region_bound > 0.0 ? region_bound : precision::default_bounds(ch).extent1;
      const auto est = precision::region_area(ch, {side, side}, side / static_cast<double>(region_cells));
      const double p = precision::precision_of(est);
      result << "area " << text::full(est.area) << " resolution " << text::full(est.resolution)
             << " cells " << est.corrigible_cells << " precision "
             << (precision::is_unbounded(p) ? std::string("unbounded") : text::full(p))
             << " closed_form_area " << text::full(angle::closed_form_area(region_n)) << '\n';
    } else if (trace->parsed() || trace_ball->parsed() || sensitivity->parsed()) {
      detail::require(max_bounces >= 1, "--max-bounces must be >= 1");
      detail::require(max_path > 0.0, "--max-path must be > 0");
      const optics::Budget budget{max_bounces, max_path};
      if (sensitivity->parsed()) {
        const auto values = detail::parse_values(values_csv);
        const auto tpl = detail::load_scene(scene_path);
        if (!tpl.knows(param)) throw detail::DataError(scene_path + ": unknown parameter '" + param + "'");
        optics::SensitivityReport report;
        try {
          report = optics::manufacturing_sensitivity(tpl, param, values, budget);
        } catch (const ParseError& e) {
          throw detail::DataError(scene_path + ": " + e.what());
        }
        result << "value,verdict,bounces,path_length\n";
        for (const auto& e : report.entries)
          result << text::shortest(e.value) << ',' << optics::to_string(e.verdict.outcome) << ','
                 << e.verdict.bounces << ',' << text::full(e.verdict.path_length) << '\n';
        result << "flips " << report.flips << '\n';
      } else {
        detail::require(eps_pos >= 0.0 && eps_ang >= 0.0, "--eps-pos and --eps-ang must be >= 0");
        const auto scene = detail::instantiate(detail::load_scene(scene_path), scene_path);
        if (trace->parsed()) {
          optics::write_trace(result, optics::trace(scene, budget));
        } else {
          const auto ball = optics::trace_ball(scene, {eps_pos, eps_ang}, budget);
          optics::write_trace(result, ball.verdict);
          if (!ball.reason.empty()) result << "# reason: " << ball.reason << '\n';
        }
      }
    } else if (dominance->parsed()) {
      std::istringstream in(detail::slurp(spec_path));
      std::vector<growth::ResourceProfile> resources;
      try {
        resources = growth::parse_spec(in);
      } catch (const ParseError& e) {
        throw detail::DataError(spec_path + ": " + e.what());
      }
      const auto dominants = growth::dominant_set(resources);
      for (const auto& r : resources) {
        bool dom = false;
        for (const auto& d : dominants) dom = dom || d.name == r.name;
        result << "resource " << r.name << ' ' << growth::to_string(r.complexity)
               << (dom ? " dominant" : " dominated") << '\n';
      }
      result << "overall " << growth::to_string(growth::overall_complexity(resources)) << '\n';
    }
  } catch (const detail::UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const detail::DataError& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  out << result.str();
  return kOk;
}

}  // namespace precray::cli
