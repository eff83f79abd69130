#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cheaptalk/distributions.hpp"
#include "cheaptalk/errors.hpp"
#include "cheaptalk/game.hpp"

namespace cheaptalk::harness {

using nlohmann::json;

enum class Scenario { Pbe, LossCurve, Benchmark, Evolving, Compare, Simulate, Figure };

inline Scenario scenario_from_string(const std::string& s) {
  if (s == "pbe") return Scenario::Pbe;
  if (s == "loss_curve") return Scenario::LossCurve;
  if (s == "benchmark") return Scenario::Benchmark;
  if (s == "evolving") return Scenario::Evolving;
  if (s == "compare") return Scenario::Compare;
  if (s == "simulate") return Scenario::Simulate;
  if (s == "figure") return Scenario::Figure;
  throw InvalidConfig("unknown scenario '" + s + "'");
}

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Pbe: return "pbe";
    case Scenario::LossCurve: return "loss_curve";
    case Scenario::Benchmark: return "benchmark";
    case Scenario::Evolving: return "evolving";
    case Scenario::Compare: return "compare";
    case Scenario::Simulate: return "simulate";
    case Scenario::Figure: return "figure";
  }
  return "?";
}

// One state density as written in a config: family, location and either
// scale or variance.
struct DensitySpec {
  Family family = Family::Normal;
  double location = 0.0;
  double scale = 1.0;

  void set_variance(double v) {
    if (!(v > 0.0)) throw InvalidConfig("variance must be positive");
    switch (family) {
      case Family::Normal: scale = std::sqrt(v); break;
      case Family::Laplace: scale = std::sqrt(v / 2.0); break;
      case Family::Logistic: scale = std::sqrt(3.0 * v) / std::numbers::pi; break;
    }
  }

  StateDistribution build() const { return {family, location, scale}; }
};

// Every tunable quantity of a single evaluation point.
struct PointParams {
  int n_users = 1;
  double p_high = 0.3;
  double q_plus = 0.5;
  int horizon = 2;
  DensitySpec low{Family::Normal, -1.0, 1.0};
  DensitySpec high{Family::Normal, 1.0, 1.0};

  GameConfig game() const { return {n_users, p_high, q_plus, DistributionPair(low.build(), high.build())}; }
};

using AxisValue = std::variant<double, std::string>;

struct Axis {
  std::string name;
  std::vector<AxisValue> values;
};

inline const std::vector<std::string>& axis_names() {
  static const std::vector<std::string> names = {
      "n_users", "horizon", "count",    "p_high",     "q_plus",    "mu_low", "mu_high",
      "var_low", "var_high", "scale_low", "scale_high", "family"};
  return names;
}

inline int as_count(double v, const std::string& axis) {
  if (v != std::floor(v) || v < 1 || v > 1e6) throw InvalidConfig(axis + " values must be positive integers");
  return static_cast<int>(v);
}

inline void apply(PointParams& p, const std::string& axis, const AxisValue& value) {
  if (axis == "family") {
    const auto* name = std::get_if<std::string>(&value);
    if (!name) throw InvalidConfig("family axis takes names");
    p.low.family = p.high.family = family_from_string(*name);
    return;
  }
  const auto* num = std::get_if<double>(&value);
  if (!num) throw InvalidConfig("axis '" + axis + "' takes numbers");
  const double v = *num;
  if (axis == "n_users") p.n_users = as_count(v, axis);
  else if (axis == "horizon") p.horizon = as_count(v, axis);
  else if (axis == "count") p.n_users = p.horizon = as_count(v, axis);
  else if (axis == "p_high") p.p_high = v;
  else if (axis == "q_plus") p.q_plus = v;
  else if (axis == "mu_low") p.low.location = v;
  else if (axis == "mu_high") p.high.location = v;
  else if (axis == "var_low") p.low.set_variance(v);
  else if (axis == "var_high") p.high.set_variance(v);
  else if (axis == "scale_low") p.low.scale = v;
  else if (axis == "scale_high") p.high.scale = v;
  else throw InvalidConfig("unknown sweep axis '" + axis + "'");
}

struct ExperimentConfig {
  Scenario scenario = Scenario::LossCurve;
  int figure = 0;
  PointParams base;
  std::optional<Axis> sweep;
  std::optional<Axis> series;
  std::optional<StrategyProfile> profile;
  std::string mechanism = "game";  // simulate: "game" or "evolving"
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::string name;
  bool csv = true;
  bool svg = false;
};

namespace detail {

inline DensitySpec parse_density(const json& j, DensitySpec d) {
  if (!j.is_object()) throw InvalidConfig("density entry must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "family") d.family = family_from_string(value.get<std::string>());
    else if (key == "mean" || key == "location") d.location = value.get<double>();
    else if (key == "scale") d.scale = value.get<double>();
    else if (key != "variance") throw InvalidConfig("unknown density key '" + key + "'");
  }
  if (j.contains("variance")) {
    if (j.contains("scale")) throw InvalidConfig("give either scale or variance, not both");
    d.set_variance(j["variance"].get<double>());
  }
  return d;
}

inline Axis parse_axis(const json& j) {
  if (!j.is_object() || !j.contains("axis")) throw InvalidConfig("sweep needs an 'axis' key");
  Axis a;
  a.name = j["axis"].get<std::string>();
  if (std::find(axis_names().begin(), axis_names().end(), a.name) == axis_names().end()) {
    throw InvalidConfig("unknown sweep axis '" + a.name + "'");
  }
  if (j.contains("values")) {
    for (const auto& v : j["values"]) {
      if (v.is_string()) a.values.emplace_back(v.get<std::string>());
      else a.values.emplace_back(v.get<double>());
    }
  } else if (j.contains("from") && j.contains("to")) {
    const double from = j["from"].get<double>();
    const double to = j["to"].get<double>();
    const double step = j.value("step", 1.0);
    if (!(step > 0.0) || to < from) throw InvalidConfig("sweep range needs from <= to and step > 0");
    const auto n = static_cast<long long>(std::floor((to - from) / step + 1e-9)) + 1;
    if (n > 100000) throw InvalidConfig("sweep range is too long");
    for (long long i = 0; i < n; ++i) a.values.emplace_back(from + static_cast<double>(i) * step);
  } else {
    throw InvalidConfig("sweep needs 'values' or 'from'/'to'");
  }
  if (a.values.empty()) throw InvalidConfig("sweep has no values");
  return a;
}

inline StrategyProfile parse_profile(const json& j) {
  if (j.is_number_integer()) return profile_from_index(j.get<int>());
  const auto s = j.get<std::string>();
  const auto digits = s.substr(s.find_first_of("0123456789") == std::string::npos ? s.size()
                                                                                   : s.find_first_of("0123456789"));
  if (digits.empty()) throw InvalidConfig("profile must look like SC.<1..16>");
  return profile_from_index(std::stoi(digits));
}

}  // namespace detail

// Overlays the keys of `j` onto `cfg`. Unknown keys are rejected.
inline void merge_config(ExperimentConfig& cfg, const json& j) {
  if (!j.is_object()) throw InvalidConfig("config root must be an object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "scenario") {
        const auto s = scenario_from_string(value.get<std::string>());
        if (s != cfg.scenario) throw InvalidConfig("config scenario '" + value.get<std::string>() +
                                                   "' does not match the command line");
      } else if (key == "figure") {
        cfg.figure = value.get<int>();
      } else if (key == "game") {
        for (const auto& [g, gv] : value.items()) {
          if (g == "n_users") cfg.base.n_users = gv.get<int>();
          else if (g == "p_high") cfg.base.p_high = gv.get<double>();
          else if (g == "q_plus") cfg.base.q_plus = gv.get<double>();
          else if (g == "low") cfg.base.low = detail::parse_density(gv, cfg.base.low);
          else if (g == "high") cfg.base.high = detail::parse_density(gv, cfg.base.high);
          else throw InvalidConfig("unknown game key '" + g + "'");
        }
      } else if (key == "horizon") {
        cfg.base.horizon = value.get<int>();
      } else if (key == "sweep") {
        cfg.sweep = detail::parse_axis(value);
      } else if (key == "series") {
        if (value.is_null()) cfg.series.reset();
        else cfg.series = detail::parse_axis(value);
      } else if (key == "profile") {
        cfg.profile = detail::parse_profile(value);
      } else if (key == "mechanism") {
        cfg.mechanism = value.get<std::string>();
        if (cfg.mechanism != "game" && cfg.mechanism != "evolving") {
          throw InvalidConfig("mechanism must be 'game' or 'evolving'");
        }
      } else if (key == "samples") {
        const auto n = value.get<long long>();
        if (n < 1) throw InvalidConfig("samples must be at least 1");
        cfg.samples = static_cast<std::uint64_t>(n);
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "workers") {
        cfg.workers = value.get<unsigned>();
      } else if (key == "output") {
        for (const auto& [o, ov] : value.items()) {
          if (o == "name") {
            cfg.name = ov.get<std::string>();
          } else if (o == "format") {
            cfg.csv = cfg.svg = false;
            const auto list = ov.is_array() ? ov : json::array({ov});
            for (const auto& f : list) {
              const auto s = f.get<std::string>();
              if (s == "csv") cfg.csv = true;
              else if (s == "svg") cfg.svg = true;
              else throw InvalidConfig("unknown output format '" + s + "'");
            }
          } else {
            throw InvalidConfig("unknown output key '" + o + "'");
          }
        }
      } else {
        throw InvalidConfig("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("malformed config: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw InvalidConfig("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace cheaptalk::harness
