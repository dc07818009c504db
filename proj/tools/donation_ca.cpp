// donation_ca: command-line front end for the donation-game lattice.
//
//   donation_ca run        --rule RBA:both --n 50 --steps 50 --seed 7 --out fig3
//   donation_ca sweep      --axis swap --values 0:100:5 --replicates 30 --out fig4
//   donation_ca evolve     --generations 5000 --pm 0.001 --out evo
//   donation_ca imagescore --noise 0,0.2 --swap-levels 0,10 --out img
//
// Exit status: 0 on success, 2 on configuration errors, 1 on I/O failures.

#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "donation_ca/experiments.hpp"

namespace {

using donation_ca::RunConfig;

constexpr int kConfigError = 2;
constexpr int kIoError = 1;

/// Options land in `flags`; only the ones actually given are copied over the
/// base config, so command-line flags override --config files.
class OptionBinder {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& name, T RunConfig::*field, const std::string& desc) {
    auto* opt = app->add_option(name, flags_.*field, desc);
    appliers_.emplace_back(opt, [this, field](RunConfig& c) { c.*field = flags_.*field; });
    return opt;
  }

  CLI::Option* add_flag(CLI::App* app, const std::string& name, bool RunConfig::*field, const std::string& desc) {
    auto* opt = app->add_flag(name, flags_.*field, desc);
    appliers_.emplace_back(opt, [this, field](RunConfig& c) { c.*field = flags_.*field; });
    return opt;
  }

  /// String option converted by `apply` into the config when present.
  CLI::Option* add_custom(CLI::App* app, const std::string& name, const std::string& desc,
                          std::function<void(RunConfig&, const std::string&)> apply) {
    auto& storage = strings_.emplace_back(std::make_unique<std::string>());
    auto* opt = app->add_option(name, *storage, desc);
    appliers_.emplace_back(opt, [raw = storage.get(), apply = std::move(apply)](RunConfig& c) { apply(c, *raw); });
    return opt;
  }

  void apply(RunConfig& config) const {
    for (const auto& [opt, fn] : appliers_) {
      if (opt->count() > 0) fn(config);
    }
  }

 private:
  RunConfig flags_;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> appliers_;
  std::vector<std::unique_ptr<std::string>> strings_;
};

void add_lattice_options(CLI::App* app, OptionBinder& b) {
  b.add(app, "--rule", &RunConfig::rule, "Strategy FAMILY:DIRECTION[:h], e.g. IGB:both, FS:left, RBA:both:h");
  b.add(app, "--raw-rule", &RunConfig::raw_rule, "Raw Wolfram rule 0..255 (pattern mode)");
  b.add(app, "--n", &RunConfig::n, "Number of cells / agents");
  b.add(app, "--steps", &RunConfig::steps, "Iterations per run");
  b.add(app, "--swap", &RunConfig::swap, "Random pair swaps per iteration");
  b.add_flag(app, "--directed", &RunConfig::directed, "Shift even positions two cells right each iteration");
  b.add(app, "--er", &RunConfig::er, "Perception noise e_R");
  b.add(app, "--ea", &RunConfig::ea, "Action noise e_A");
  b.add(app, "--fatigue", &RunConfig::fatigue,
        "Forced abstention after N consecutive donations (0 disables; 3 when given without a value)")
      ->expected(0, 1)
      ->default_str(std::to_string(donation_ca::kDefaultFatigueLimit));
  b.add(app, "--init", &RunConfig::init, "Initial states: random, single, checker or file")
      ->check(CLI::IsMember({"random", "single", "checker", "file"}));
  b.add_custom(app, "--init-file", "File of 0/1 characters for --init file",
               [](RunConfig& c, const std::string& path) {
                 c.init = "file";
                 c.init_states.clear();
                 for (auto s : donation_ca::parse_states(donation_ca::io::read_file(path))) {
                   c.init_states.push_back(s == donation_ca::Reputation::High ? '1' : '0');
                 }
               });
  b.add(app, "--init-states", &RunConfig::init_states, "Inline 0/1 string for --init file");
}

void add_common_options(CLI::App* app, OptionBinder& b) {
  b.add(app, "--seed", &RunConfig::seed, "Base seed");
  b.add(app, "--out", &RunConfig::out, "Output prefix");
  b.add(app, "--replicates", &RunConfig::replicates, "Replicates per data point");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Donation game on a one-dimensional binary cellular automaton"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(donation_ca::kVersion));

  std::string config_path;
  OptionBinder binder;

  auto* run = app.add_subcommand("run", "Single run: space-time bitmap, per-agent metrics, metadata");
  auto* sweep = app.add_subcommand("sweep", "Averaged median reputation/donations across a parameter axis");
  auto* evolve = app.add_subcommand("evolve", "Generational evolution over the twelve curated rules");
  auto* image = app.add_subcommand("imagescore", "Image-score game: local vs random pairing");

  for (auto* sub : {run, sweep, evolve, image}) {
    sub->add_option("--config", config_path, "JSON config or meta.json to start from")->check(CLI::ExistingFile);
    add_common_options(sub, binder);
  }
  for (auto* sub : {run, sweep, evolve}) add_lattice_options(sub, binder);

  binder.add(sweep, "--axis", &RunConfig::axis, "Sweep axis: swap, er or ea")
      ->check(CLI::IsMember({"swap", "er", "ea"}));
  binder.add_custom(sweep, "--values", "Axis values: list a,b,c or range start:stop:step",
                    [](RunConfig& c, const std::string& text) { c.values = donation_ca::parse_values(text); });
  binder.add_custom(sweep, "--rules", "Comma-separated rules (numbers or specs); default: the twelve curated",
                    [](RunConfig& c, const std::string& text) { c.rules = donation_ca::split(text); });

  binder.add(evolve, "--pm", &RunConfig::pm, "Mutation probability p_m");
  binder.add(evolve, "--generations", &RunConfig::generations, "Number of generations");
  binder.add(evolve, "--gen-iters", &RunConfig::gen_iters, "Iterations per generation");
  binder.add(evolve, "--initial-rule", &RunConfig::initial_rule, "Start from a homogeneous population");
  binder.add(evolve, "--spacetime-gens", &RunConfig::spacetime_gens,
             "Write the site bitmap of the last K generations");

  binder.add(image, "--n", &RunConfig::n, "Population size");
  binder.add(image, "--rounds", &RunConfig::rounds, "Rounds (single donor-recipient interactions) per run");
  binder.add(image, "--b", &RunConfig::benefit, "Benefit to the recipient");
  binder.add(image, "--c", &RunConfig::cost, "Cost to the donor");
  binder.add_custom(image, "--pairings", "Pairings to compare: local, random",
                    [](RunConfig& c, const std::string& text) { c.pairings = donation_ca::split(text); });
  binder.add_custom(image, "--noise", "Noise levels, applied as a_p = a_e",
                    [](RunConfig& c, const std::string& text) { c.noise = donation_ca::parse_values(text); });
  binder.add_custom(image, "--swap-levels", "Swap pairs per round", [](RunConfig& c, const std::string& text) {
    c.swap_levels.clear();
    for (double v : donation_ca::parse_values(text)) {
      if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw std::invalid_argument("swap levels must be whole numbers");
      }
      c.swap_levels.push_back(static_cast<std::size_t>(v));
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) {
      config = donation_ca::config_from_json(nlohmann::json::parse(donation_ca::io::read_file(config_path)));
    }
    binder.apply(config);
    config.command = app.get_subcommands().front()->get_name();

    if (config.command == "run") {
      const auto strategy = donation_ca::selected_strategy(config);
      std::cout << "strategy " << donation_ca::to_string(strategy) << " (Wolfram rule "
                << donation_ca::rule_table_of(strategy).number() << ")\n";
    }

    const auto artifacts = donation_ca::execute(config, donation_ca::default_thread_count());
    donation_ca::write_artifacts(config.out, artifacts);
    for (const auto& a : artifacts) std::cout << "wrote " << config.out << a.suffix << '\n';
  } catch (const std::system_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return 0;
}
