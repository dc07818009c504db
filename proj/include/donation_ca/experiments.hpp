#pragma once

// Experiment drivers behind the command-line tool. Each command turns a
// RunConfig into a list of artifacts (file suffix + contents); writing them
// is a separate step so results can be compared in memory.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "donation_ca/engine.hpp"
#include "donation_ca/evolution.hpp"
#include "donation_ca/imagescore.hpp"
#include "donation_ca/io.hpp"
#include "donation_ca/metrics.hpp"
#include "donation_ca/parallel.hpp"
#include "donation_ca/random.hpp"
#include "donation_ca/rules.hpp"

namespace donation_ca {

inline constexpr std::string_view kVersion = "0.1.0";

/// Every parameter of every subcommand. Serialised verbatim into meta.json
/// and accepted back through --config.
struct RunConfig {
  std::string command = "run";
  std::uint64_t seed = 1;
  std::string out = "out";
  std::size_t replicates = 30;

  // Lattice.
  std::string rule = "IGB:both";
  int raw_rule = -1;  // >= 0 selects a raw Wolfram table
  std::size_t n = 100;
  std::size_t steps = 300;
  std::string init = "random";  // random | single | checker | file
  std::string init_states;      // 0/1 string for init == "file"
  std::size_t swap = 0;
  bool directed = false;
  double er = 0.0;
  double ea = 0.0;
  unsigned fatigue = 0;

  // Sweep.
  std::string axis = "swap";  // swap | er | ea
  std::vector<double> values;
  std::vector<std::string> rules;  // empty: the twelve curated rules

  // Evolution.
  double pm = 0.001;
  std::size_t generations = 100;
  std::size_t gen_iters = 300;
  std::string initial_rule;  // homogeneous start when set
  std::size_t spacetime_gens = 0;

  // Image score.
  std::size_t rounds = 10000;
  double benefit = 1.0;
  double cost = 0.1;
  std::vector<std::string> pairings{"local", "random"};
  std::vector<double> noise{0.0, 0.2};
  std::vector<std::size_t> swap_levels{0, 10};
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, command, seed, out, replicates, rule, raw_rule, n, steps,
                                                init, init_states, swap, directed, er, ea, fatigue, axis, values,
                                                rules, pm, generations, gen_iters, initial_rule, spacetime_gens,
                                                rounds, benefit, cost, pairings, noise, swap_levels)

struct Artifact {
  std::string suffix;  // appended to the output prefix
  std::string content;
};

// ---------------------------------------------------------------------------
// Parsing helpers

/// A curated rule number (or 255) maps to its descriptor, any other number
/// or "raw:N" to a raw table, everything else goes through parse_strategy.
inline Strategy parse_rule_token(std::string_view token) {
  std::string_view digits = token;
  bool raw = false;
  if (token.rfind("raw:", 0) == 0) {
    digits = token.substr(4);
    raw = true;
  }
  int number = -1;
  const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), number);
  if (res.ec == std::errc{} && res.ptr == digits.data() + digits.size()) {
    const auto table = rule_table_from_number(number);
    if (!raw) {
      if (number == 255) return kAltruist;
      for (const auto& d : kCurated) {
        if (derive_rule_table(d).number() == static_cast<unsigned>(number)) return d;
      }
    }
    return table;
  }
  if (raw) throw std::invalid_argument("invalid raw rule '" + std::string(token) + "'");
  return parse_strategy(token);
}

inline std::vector<std::string> split(std::string_view text, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(sep, start);
    const auto piece = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    if (!piece.empty()) out.emplace_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string_view text) {
  double value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("invalid number '" + std::string(text) + "'");
  }
  return value;
}

/// "0,5,10" or an inclusive range "start:stop:step".
inline std::vector<double> parse_values(std::string_view text) {
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:step");
    const double start = parse_double(parts[0]), stop = parse_double(parts[1]), step = parse_double(parts[2]);
    if (!(step > 0)) throw std::invalid_argument("range step must be positive");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  for (const auto& piece : split(text)) out.push_back(parse_double(piece));
  return out;
}

inline std::vector<Reputation> parse_states(std::string_view text) {
  std::vector<Reputation> states;
  for (char ch : text) {
    if (ch == '0') states.push_back(Reputation::Low);
    else if (ch == '1') states.push_back(Reputation::High);
    else if (ch == ' ' || ch == '\n' || ch == '\r' || ch == '\t' || ch == ',') continue;
    else throw std::invalid_argument(std::string("invalid state character '") + ch + "'");
  }
  return states;
}

inline InitSpec make_init(const RunConfig& config) {
  if (config.init == "random") return init::RandomUniform{};
  if (config.init == "single") return init::SingleHighCenter{};
  if (config.init == "checker") return init::Checkerboard{};
  if (config.init == "file") return init::Explicit{parse_states(config.init_states)};
  throw std::invalid_argument("unknown init '" + config.init + "'");
}

inline WorldParams make_world_params(const RunConfig& config) {
  WorldParams params;
  params.noise.perception = config.er;
  params.noise.action = config.ea;
  params.mobility.swap_pairs = config.swap;
  params.mobility.directed = config.directed;
  params.fatigue_limit = config.fatigue;
  return params;
}

inline Strategy selected_strategy(const RunConfig& config) {
  if (config.raw_rule >= 0) return rule_table_of(parse_rule_token("raw:" + std::to_string(config.raw_rule)));
  return parse_rule_token(config.rule);
}

inline RunSpec make_run_spec(const RunConfig& config) {
  RunSpec spec;
  spec.n = config.n;
  spec.steps = config.steps;
  spec.init = make_init(config);
  spec.strategies = {selected_strategy(config)};
  spec.params = make_world_params(config);
  if (spec.steps < 1) throw std::invalid_argument("steps must be at least 1");
  return spec;
}

inline std::string meta_json(const RunConfig& config, const nlohmann::json& extra = nlohmann::json::object()) {
  nlohmann::json meta;
  meta["version"] = kVersion;
  meta["command"] = config.command;
  meta["seed"] = config.seed;
  meta["config"] = config;
  for (const auto& [key, value] : extra.items()) meta[key] = value;
  return meta.dump(2) + "\n";
}

/// Accepts either a bare config object or a meta.json with a "config" key.
inline RunConfig config_from_json(const nlohmann::json& j) {
  if (j.contains("config")) return j.at("config").get<RunConfig>();
  return j.get<RunConfig>();
}

// ---------------------------------------------------------------------------
// Commands

/// Single lattice run: space-time bitmap, per-agent metrics, metadata.
inline std::vector<Artifact> cmd_run(const RunConfig& config) {
  const auto spec = make_run_spec(config);
  World world(spec.n, spec.init, spec.strategies, spec.params, config.seed);
  const auto history = world.run(spec.steps);

  std::ostringstream pbm;
  io::write_pbm(pbm, site_spacetime(history));

  const auto counts = agent_reputation_counts(history);
  const auto received = agent_donations_received(history);
  const auto made = agent_donations_made(history);
  std::ostringstream csv;
  io::CsvWriter w(csv);
  w.row("agent", "high_count", "donations_received", "donations_made");
  for (std::size_t id = 0; id < counts.size(); ++id) w.row(id, counts[id], received[id], made[id]);

  nlohmann::json extra;
  extra["strategy"] = to_string(spec.strategies[0]);
  extra["wolfram_rule"] = rule_table_of(spec.strategies[0]).number();
  extra["summary"] = {{"median_reputation", median(counts)}, {"median_donations", median(received)}};
  return {{".pbm", pbm.str()}, {".metrics.csv", csv.str()}, {".meta.json", meta_json(config, extra)}};
}

inline std::vector<Strategy> sweep_strategies(const RunConfig& config) {
  std::vector<Strategy> out;
  if (config.rules.empty()) {
    for (const auto& d : kCurated) out.emplace_back(d);
  } else {
    for (const auto& token : config.rules) out.push_back(parse_rule_token(token));
  }
  return out;
}

/// Rows (rule, axis_value, mean_median_reputation, mean_median_donations,
/// replicates, stddev), rules in the order given, values ascending in
/// input order. Replicate r of value index v uses seed mix64(seed, v, r),
/// shared across rules.
inline std::vector<Artifact> cmd_sweep(const RunConfig& config, std::size_t threads) {
  if (config.values.empty()) throw std::invalid_argument("sweep needs at least one axis value");
  if (config.axis != "swap" && config.axis != "er" && config.axis != "ea") {
    throw std::invalid_argument("sweep axis must be swap, er or ea");
  }
  const auto strategies = sweep_strategies(config);
  const auto base = make_run_spec(config);

  struct Job {
    std::size_t rule;
    std::size_t value;
    ReplicateStats stats;
  };
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < strategies.size(); ++r) {
    for (std::size_t v = 0; v < config.values.size(); ++v) jobs.push_back({r, v, {}});
  }

  // Validate every point before spending time on any of them.
  std::vector<RunSpec> specs(jobs.size(), base);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto& spec = specs[i];
    spec.strategies = {strategies[jobs[i].rule]};
    const double value = config.values[jobs[i].value];
    if (config.axis == "swap") {
      if (value < 0 || value != std::floor(value)) throw std::invalid_argument("swap values must be whole numbers");
      spec.params.mobility.swap_pairs = static_cast<std::size_t>(value);
    } else if (config.axis == "er") {
      spec.params.noise.perception = value;
    } else {
      spec.params.noise.action = value;
    }
    World probe(spec.n, spec.init, spec.strategies, spec.params, 0);
  }

  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    jobs[i].stats = replicate_stats(specs[i], config.replicates, config.seed, jobs[i].value, 1);
  });

  std::ostringstream csv;
  io::CsvWriter w(csv);
  w.row("rule", "axis_value", "mean_median_reputation", "mean_median_donations", "replicates", "stddev");
  for (const auto& job : jobs) {
    w.row(rule_table_of(strategies[job.rule]).number(), config.values[job.value], job.stats.mean_median_reputation,
          job.stats.mean_median_donations, job.stats.replicates, job.stats.stddev_median_reputation);
  }
  return {{".csv", csv.str()}, {".meta.json", meta_json(config)}};
}

inline EvolutionParams make_evolution_params(const RunConfig& config) {
  EvolutionParams params;
  params.population = config.n;
  params.generations = config.generations;
  params.iterations_per_generation = config.gen_iters;
  params.mutation_probability = config.pm;
  params.world = make_world_params(config);
  if (!config.initial_rule.empty()) {
    const auto strategy = parse_rule_token(config.initial_rule);
    const auto* desc = std::get_if<StrategyDescriptor>(&strategy);
    const auto index = desc ? curated_index(*desc) : std::nullopt;
    if (!index) throw std::invalid_argument("initial rule must be one of the twelve curated rules");
    params.initial_strategies = {*index};
  }
  return params;
}

/// Abundance CSV (generation, one count column per rule, mean_fitness),
/// per-rule mean fitness CSV, and optionally the concatenated site
/// space-time bitmap of the last `spacetime_gens` generations.
inline std::vector<Artifact> cmd_evolve(const RunConfig& config) {
  const auto params = make_evolution_params(config);
  Matrix<std::uint8_t> spacetime(0, params.population);
  GenerationObserver observer;
  if (config.spacetime_gens > 0) {
    const std::size_t first = config.generations + 1 > config.spacetime_gens
                                  ? config.generations + 1 - config.spacetime_gens
                                  : 0;
    observer = [first, &spacetime](std::size_t g, std::span<const std::size_t>, const History& h) {
      if (g < first) return;
      for (std::size_t t = 0; t < h.site_matrix.rows(); ++t) spacetime.push_row(h.site_matrix.row(t));
    };
  }
  const auto series = run_generations(params, config.seed, observer);

  std::vector<std::string> header{"generation"};
  for (auto rule : series.rules) header.push_back("r" + std::to_string(rule));
  std::ostringstream counts_csv, fitness_csv;
  io::CsvWriter counts_w(counts_csv), fitness_w(fitness_csv);
  auto counts_header = header;
  counts_header.push_back("mean_fitness");
  counts_w.row(counts_header);
  fitness_w.row(header);
  for (std::size_t g = 0; g < series.generations(); ++g) {
    std::vector<std::string> counts_row{io::format_number(g)}, fitness_row{io::format_number(g)};
    for (std::size_t s = 0; s < kStrategyCount; ++s) {
      counts_row.push_back(io::format_number(series.counts(g, s)));
      fitness_row.push_back(io::format_number(series.mean_fitness_by_rule(g, s)));
    }
    counts_row.push_back(io::format_number(series.mean_fitness[g]));
    counts_w.row(counts_row);
    fitness_w.row(fitness_row);
  }

  nlohmann::json extra;
  extra["final_modal_rule"] = series.modal_rule(series.generations() - 1);
  std::vector<Artifact> out{{".csv", counts_csv.str()}, {".fitness.csv", fitness_csv.str()}};
  if (config.spacetime_gens > 0) {
    std::ostringstream pbm;
    io::write_pbm(pbm, spacetime);
    out.push_back({".pbm", pbm.str()});
  }
  out.push_back({".meta.json", meta_json(config, extra)});
  return out;
}

/// Rows (pairing, a_p, a_e, swap, mean_payoff, replicates) over
/// pairings x noise levels x swap levels, with a_p = a_e = noise level.
/// Replicate r of grid point (noise i, swap j) uses seed
/// mix64(seed, i * |swap levels| + j, r) for every pairing, so pairings are
/// compared on identical strategy draws.
inline std::vector<Artifact> cmd_imagescore(const RunConfig& config, std::size_t threads) {
  if (config.pairings.empty() || config.noise.empty() || config.swap_levels.empty()) {
    throw std::invalid_argument("imagescore needs pairings, noise levels and swap levels");
  }
  if (config.replicates < 1) throw std::invalid_argument("need at least one replicate");

  struct Point {
    imagescore::ImageGameParams params;
    std::uint64_t axis;
    double mean = 0.0;
  };
  std::vector<Point> points;
  for (const auto& pairing : config.pairings) {
    for (std::size_t i = 0; i < config.noise.size(); ++i) {
      for (std::size_t j = 0; j < config.swap_levels.size(); ++j) {
        imagescore::ImageGameParams p;
        p.population = config.n;
        p.rounds = config.rounds;
        p.benefit = config.benefit;
        p.cost = config.cost;
        p.pairing = imagescore::parse_pairing(pairing);
        p.perception_noise = config.noise[i];
        p.action_noise = config.noise[i];
        p.swap_pairs = config.swap_levels[j];
        p.validate();
        points.push_back({p, i * config.swap_levels.size() + j});
      }
    }
  }

  const std::size_t reps = config.replicates;
  std::vector<double> payoffs(points.size() * reps);
  parallel_for(payoffs.size(), threads, [&](std::size_t k) {
    const auto& point = points[k / reps];
    payoffs[k] = imagescore::run_image_game(point.params, mix64(config.seed, point.axis, k % reps));
  });
  for (std::size_t i = 0; i < points.size(); ++i) {
    double sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) sum += payoffs[i * reps + r];
    points[i].mean = sum / static_cast<double>(reps);
  }

  std::ostringstream csv;
  io::CsvWriter w(csv);
  w.row("pairing", "a_p", "a_e", "swap", "mean_payoff", "replicates");
  for (const auto& point : points) {
    w.row(imagescore::to_string(point.params.pairing), point.params.perception_noise, point.params.action_noise,
          point.params.swap_pairs, point.mean, reps);
  }
  return {{".csv", csv.str()}, {".meta.json", meta_json(config)}};
}

inline std::vector<Artifact> execute(const RunConfig& config, std::size_t threads) {
  if (config.command == "run") return cmd_run(config);
  if (config.command == "sweep") return cmd_sweep(config, threads);
  if (config.command == "evolve") return cmd_evolve(config);
  if (config.command == "imagescore") return cmd_imagescore(config, threads);
  throw std::invalid_argument("unknown command '" + config.command + "'");
}

inline void write_artifacts(const std::string& prefix, const std::vector<Artifact>& artifacts) {
  for (const auto& a : artifacts) {
    const auto path = prefix + a.suffix;
    auto out = io::open_output(path);
    out << a.content;
    io::finish_output(out, path);
  }
}

}  // namespace donation_ca
