#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "cheaptalk/benchmarks.hpp"
#include "cheaptalk/equilibrium.hpp"
#include "cheaptalk/errors.hpp"
#include "cheaptalk/evolving.hpp"
#include "cheaptalk/game.hpp"
#include "cheaptalk/harness/config.hpp"
#include "cheaptalk/harness/table.hpp"
#include "cheaptalk/montecarlo.hpp"

namespace cheaptalk::harness {

namespace detail {

inline Axis numeric_axis(std::string name, std::vector<double> values) {
  Axis a{std::move(name), {}};
  for (double v : values) a.values.emplace_back(v);
  return a;
}

inline Axis range_axis(std::string name, double from, double to, double step) {
  std::vector<double> v;
  const auto n = static_cast<long long>(std::floor((to - from) / step + 1e-9)) + 1;
  for (long long i = 0; i < n; ++i) v.push_back(from + static_cast<double>(i) * step);
  return numeric_axis(std::move(name), std::move(v));
}

}  // namespace detail

// Default settings for the five reproduced figures.
inline ExperimentConfig figure_preset(int figure) {
  ExperimentConfig c;
  c.figure = figure;
  c.name = "figure" + std::to_string(figure);
  c.svg = true;
  c.base = PointParams{};
  c.base.p_high = 0.3;
  switch (figure) {
    case 2:
      c.scenario = Scenario::Evolving;
      c.sweep = detail::range_axis("mu_low", -3.0, 0.5, 0.25);
      c.series = detail::numeric_axis("horizon", {2, 3, 4, 5});
      break;
    case 3: {
      c.scenario = Scenario::Evolving;
      std::vector<double> v = {2.0 / 3.0};
      for (int i = 0; i <= 16; ++i) v.push_back(0.7 + 0.05 * i);
      c.sweep = detail::numeric_axis("var_high", v);
      c.series = detail::numeric_axis("horizon", {2, 3, 4, 5});
      break;
    }
    case 4:
      c.scenario = Scenario::Evolving;
      c.base.low = {Family::Logistic, -1.0, 1.0};
      c.base.high = {Family::Logistic, 1.0, 1.5};
      c.sweep = detail::range_axis("horizon", 2, 10, 1);
      c.series = Axis{"family", {std::string("logistic"), std::string("laplace")}};
      break;
    case 5:
      c.scenario = Scenario::Compare;
      c.base.high.set_variance(1.5);
      c.sweep = detail::range_axis("count", 1, 10, 1);
      break;
    case 6:
      c.scenario = Scenario::LossCurve;
      c.base.high.set_variance(1.5);
      c.sweep = detail::range_axis("n_users", 1, 8, 1);
      c.series = detail::numeric_axis("q_plus", {0.1, 0.5, 0.7});
      break;
    default:
      throw InvalidConfig("figure must be one of 2, 3, 4, 5, 6");
  }
  return c;
}

// Builds the effective experiment from the command-line scenario and the
// parsed config file. Figure runs start from the preset and take overrides.
inline ExperimentConfig load_experiment(Scenario scenario, json j) {
  ExperimentConfig cfg;
  if (!j.is_object()) throw InvalidConfig("config root must be an object");
  if (j.contains("scenario") && scenario_from_string(j["scenario"].get<std::string>()) != scenario) {
    throw InvalidConfig("config scenario does not match the command line");
  }
  j.erase("scenario");
  if (scenario == Scenario::Figure) {
    if (!j.contains("figure") || !j["figure"].is_number_integer()) {
      throw InvalidConfig("figure scenario needs an integer 'figure' key");
    }
    cfg = figure_preset(j["figure"].get<int>());
    j.erase("figure");
  } else {
    cfg.scenario = scenario;
    cfg.name = to_string(scenario);
  }
  merge_config(cfg, j);
  if (cfg.scenario == Scenario::Simulate && cfg.mechanism == "game" && !cfg.profile) {
    throw InvalidConfig("simulate scenario needs a 'profile' such as \"SC.1\"");
  }
  if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos) {
    throw InvalidConfig("output name must be a plain file stem");
  }
  if (!cfg.csv && !cfg.svg) throw InvalidConfig("no output format selected");
  return cfg;
}

struct Point {
  Cell x;
  Cell series;
  PointParams params;
};

inline Cell axis_cell(const AxisValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

// Series-major order: every sweep value for the first series value, then the next.
inline std::vector<Point> expand_points(const ExperimentConfig& cfg) {
  std::vector<Point> out;
  const std::vector<AxisValue> series_values =
      cfg.series ? cfg.series->values : std::vector<AxisValue>{AxisValue{0.0}};
  for (const auto& s : series_values) {
    PointParams with_series = cfg.base;
    if (cfg.series) apply(with_series, cfg.series->name, s);
    if (cfg.sweep) {
      for (const auto& v : cfg.sweep->values) {
        PointParams p = with_series;
        apply(p, cfg.sweep->name, v);
        out.push_back({axis_cell(v), cfg.series ? axis_cell(s) : Cell{}, p});
      }
    } else {
      out.push_back({static_cast<double>(with_series.n_users), cfg.series ? axis_cell(s) : Cell{}, with_series});
    }
  }
  // Validate every point before any work so a bad sweep fails fast.
  for (const auto& p : out) {
    (void)p.params.game();
    if (p.params.horizon < 1) throw InvalidConfig("horizon must be positive");
  }
  return out;
}

namespace detail {

inline std::string profile_set(const std::vector<StrategyProfile>& ps) {
  std::string s;
  for (const auto& p : ps) s += (s.empty() ? "" : " ") + label(p);
  return s.empty() ? "none" : s;
}

inline Cell optional_cell(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

inline Cell bayesian_cell(const GameConfig& g, std::string* worst = nullptr) {
  try {
    const auto w = worst_pbe(g);
    if (worst) *worst = label(w.profile);
    return w.loss;
  } catch (const NoEquilibrium&) {
    if (worst) *worst = "none";
    return Cell{};
  }
}

inline double evolving_or_babbling(const GameConfig& g, int horizon) {
  return evolving_loss(g.with_n_users(1), horizon);
}

}  // namespace detail

struct ScenarioOutput {
  Table table;
  std::vector<std::string> plot_columns;
  std::string series_column;
};

inline ScenarioOutput run_scenario(const ExperimentConfig& cfg) {
  const auto points = expand_points(cfg);
  ScenarioOutput out;
  out.table.columns.push_back(cfg.sweep ? cfg.sweep->name : "n_users");
  if (cfg.series) {
    out.table.columns.push_back(cfg.series->name);
    out.series_column = cfg.series->name;
  }
  auto add_columns = [&](std::initializer_list<const char*> names) {
    for (const char* n : names) out.table.columns.emplace_back(n);
  };
  switch (cfg.scenario) {
    case Scenario::Pbe:
      add_columns({"n_users", "p_high", "q_plus", "pbe_set", "worst_pbe", "bayesian_loss", "p1_high", "p1_low"});
      out.plot_columns = {"bayesian_loss"};
      break;
    case Scenario::LossCurve:
      add_columns({"bayesian_loss", "worst_pbe", "fair_split_loss", "majority_vote_loss",
                   "majority_vote_loss_biased", "abandon_loss"});
      out.plot_columns = {"bayesian_loss", "majority_vote_loss", "abandon_loss"};
      break;
    case Scenario::Benchmark:
      add_columns({"majority_vote_loss", "majority_vote_loss_biased", "abandon_action", "abandon_loss"});
      out.plot_columns = {"majority_vote_loss", "abandon_loss"};
      break;
    case Scenario::Evolving:
      add_columns({"horizon", "alpha", "beta", "lambda_low", "lambda_high", "evolving_loss", "normal_closed_form",
                   "abandon_loss"});
      out.plot_columns = {"evolving_loss"};
      break;
    case Scenario::Compare:
      add_columns({"bayesian_loss", "worst_pbe", "evolving_loss", "abandon_loss", "crossover_bound"});
      out.plot_columns = {"bayesian_loss", "evolving_loss"};
      break;
    case Scenario::Simulate:
      if (cfg.mechanism == "evolving") {
        add_columns({"horizon", "episodes", "seed", "cost_mean", "cost_stderr", "cost_exact", "ic1_mean",
                     "ic1_stderr", "ic2_mean", "ic2_stderr", "ic3_mean", "ic3_stderr", "ic4_mean", "ic4_stderr"});
      } else {
        add_columns({"profile", "samples", "seed", "cost_mean", "cost_stderr", "cost_exact", "util_neg_mean",
                     "util_neg_stderr", "util_neg_exact", "util_pos_mean", "util_pos_stderr", "util_pos_exact"});
      }
      out.plot_columns = {"cost_mean", "cost_exact"};
      break;
    case Scenario::Figure:
      throw InvalidConfig("figure scenario must be resolved to a preset first");
  }

  // A reported column that repeats the sweep or series axis is dropped.
  std::vector<bool> keep;
  {
    std::vector<std::string> unique;
    for (const auto& c : out.table.columns) {
      const bool fresh = std::find(unique.begin(), unique.end(), c) == unique.end();
      keep.push_back(fresh);
      if (fresh) unique.push_back(c);
    }
    out.table.columns = std::move(unique);
  }

  for (const auto& pt : points) {
    const GameConfig g = pt.params.game();
    std::vector<Cell> row{pt.x};
    if (cfg.series) row.push_back(pt.series);
    const double babble = abandon_scheme(g).loss;
    switch (cfg.scenario) {
      case Scenario::Pbe: {
        std::string worst;
        const auto eq = enumerate_pbe(g);
        const Cell loss = detail::bayesian_cell(g, &worst);
        const auto th = bias_thresholds(g.q_plus());
        row.insert(row.end(), {static_cast<long long>(g.n_users()), g.p_high(), g.q_plus(),
                               detail::profile_set(eq), worst, loss, detail::optional_cell(th.p1_high),
                               detail::optional_cell(th.p1_low)});
        break;
      }
      case Scenario::LossCurve: {
        std::string worst;
        const Cell loss = detail::bayesian_cell(g, &worst);
        const Cell t1 = g.q_plus() == 0.5 ? Cell{fair_split_loss(g.n_users(), g.p_high(), g.gap())} : Cell{};
        row.insert(row.end(), {loss, worst, t1, majority_vote_loss(g), majority_vote_loss_biased(g), babble});
        break;
      }
      case Scenario::Benchmark: {
        const auto ab = abandon_scheme(g);
        row.insert(row.end(), {majority_vote_loss(g), majority_vote_loss_biased(g), ab.action, ab.loss});
        break;
      }
      case Scenario::Evolving: {
        const int t = pt.params.horizon;
        const auto ab = alpha_beta(g.pair());
        Cell normal{};
        if (g.pair().equal_variance_normal()) normal = evolving_loss_normal(g, t);
        if (t == 1) {
          row.insert(row.end(), {static_cast<long long>(t), ab.alpha, ab.beta, Cell{}, Cell{}, babble, normal, babble});
        } else {
          const auto s = solve_schedule(g.with_n_users(1), t);
          row.insert(row.end(), {static_cast<long long>(t), ab.alpha, ab.beta, s.lambda_low(), s.lambda_high(),
                                 s.loss(), normal, babble});
        }
        break;
      }
      case Scenario::Compare: {
        std::string worst;
        const Cell loss = detail::bayesian_cell(g, &worst);
        const int t = pt.params.horizon;
        Cell bound{};
        if (g.pair().equal_variance_normal()) bound = crossover_bound(g, t);
        row.insert(row.end(), {loss, worst, detail::evolving_or_babbling(g, t), babble, bound});
        break;
      }
      case Scenario::Simulate: {
        SimulationOptions opts;
        opts.seed = cfg.seed;
        opts.workers = cfg.workers;
        if (cfg.mechanism == "evolving") {
          const int t = pt.params.horizon;
          const GameConfig one = g.with_n_users(1);
          EvolvingReport rep;
          double exact;
          if (t == 1) {
            rep = simulate_evolving(one, ConstantSchedule{1, g.prior_mean(), g.prior_mean()}, cfg.samples, opts);
            exact = min_expected_cost(one) + babble;
          } else {
            const auto s = solve_schedule(one, t);
            rep = simulate_evolving(one, s, cfg.samples, opts);
            exact = min_expected_cost(one) + s.loss();
          }
          row.insert(row.end(), {static_cast<long long>(t), static_cast<long long>(cfg.samples),
                                 static_cast<long long>(cfg.seed), rep.cost.mean, rep.cost.std_error, exact});
          for (const auto& e : rep.ic) row.insert(row.end(), {e.mean, e.std_error});
        } else {
          const auto prof = *cfg.profile;
          const auto rule = best_response_rule(prof, g);
          const auto rep = simulate_game(g, prof, rule, cfg.samples, opts);
          row.insert(row.end(),
                     {label(prof), static_cast<long long>(cfg.samples), static_cast<long long>(cfg.seed),
                      rep.cost.mean, rep.cost.std_error, expected_platform_cost(prof, rule, g),
                      rep.utility[0].mean, rep.utility[0].std_error,
                      expected_user_utility(prof, rule, Bias::Negative, g), rep.utility[1].mean,
                      rep.utility[1].std_error, expected_user_utility(prof, rule, Bias::Positive, g)});
        }
        break;
      }
      case Scenario::Figure:
        break;
    }
    std::vector<Cell> kept;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (keep[i]) kept.push_back(std::move(row[i]));
    }
    out.table.rows.push_back(std::move(kept));
  }
  return out;
}

// Writes the requested artifacts under `dir`. Any failure removes the files
// written so far and rethrows.
inline std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& cfg, const ScenarioOutput& result,
                                                        const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  try {
    fs::create_directories(dir);
    auto emit = [&](const std::string& ext, auto&& body) {
      const fs::path path = dir / (cfg.name + ext);
      written.push_back(path);
      std::ofstream os(path, std::ios::binary | std::ios::trunc);
      if (!os) throw InvalidConfig("cannot write '" + path.string() + "'");
      body(os);
      os.flush();
      if (!os) throw InvalidConfig("failed while writing '" + path.string() + "'");
    };
    if (cfg.csv) emit(".csv", [&](std::ostream& os) { write_csv(os, result.table); });
    if (cfg.svg) {
      emit(".svg", [&](std::ostream& os) { write_svg(os, result.table, result.plot_columns, result.series_column); });
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
  return written;
}

}  // namespace cheaptalk::harness
