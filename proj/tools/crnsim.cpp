// Copyright 2026 The crnsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crn/error.hpp"
#include "crn/harness.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> seeds;
  std::string out = "out";
  std::string format = "csv";
  unsigned jobs = 1;
  std::vector<double> grid;
  std::string scenario_in;
  std::string scenario_out;
  bool timing = false;
};

int fail(std::string_view kind, const std::string& message, const std::string& key = {}) {
  nlohmann::json record = {{"error", {{"kind", kind}, {"message", message}}}};
  if (!key.empty()) record["error"]["key"] = key;
  std::cerr << record.dump() << '\n';
  return 2;
}

int run(crn::Preset preset, const Options& o) {
  crn::SimConfig base = o.config.empty() ? crn::SimConfig{} : crn::load_config(o.config);
  if (o.seed) base.seed = *o.seed;
  base.validate();

  const std::size_t default_seeds = preset == crn::Preset::simulate ? 1 : 10;
  auto spec = crn::default_spec(preset, base, o.seeds.value_or(default_seeds));
  if (o.seeds && preset != crn::Preset::snapshot) {
    spec.seeds.clear();
    for (std::size_t i = 0; i < *o.seeds; ++i) spec.seeds.push_back(base.seed + i);
  }
  if (!o.grid.empty()) crn::override_grid(spec, o.grid);
  spec.out_dir = o.out;
  spec.jobs = o.jobs;
  spec.record_timing = o.timing;
  if (o.format == "csv") spec.format = crn::Format::csv;
  else if (o.format == "json") spec.format = crn::Format::json;
  else throw crn::Error(crn::ErrorKind::invalid_config, "format must be csv or json", "format");

  crn::ExperimentResult result;
  if (preset == crn::Preset::simulate && !o.scenario_in.empty()) {
    const auto scenario = crn::load_scenario(o.scenario_in);
    auto outcome = crn::simulate(base, scenario);
    if (!o.timing) outcome.row.runtime_ms.reset();
    result.preset = preset;
    result.rows.push_back(outcome.row);
    spec.seeds = {scenario.seed()};
  } else {
    if (!o.scenario_in.empty())
      throw crn::Error(crn::ErrorKind::invalid_config,
                       "--scenario-in only applies to simulate", "scenario-in");
    result = crn::run_experiment(spec);
  }
  if (!o.scenario_out.empty()) {
    const auto scenario = o.scenario_in.empty() ? crn::make_scenario(spec.base, spec.seeds.front())
                                                : crn::load_scenario(o.scenario_in);
    crn::save_scenario(scenario, o.scenario_out);
  }

  for (const auto& path : crn::emit(result, spec)) std::cout << path << '\n';
  if (preset == crn::Preset::oracle) {
    bool all = true;
    for (const auto& r : result.records) {
      const bool ok = r.at("passed").get<bool>();
      all = all && ok;
      std::cout << (ok ? "PASS " : "FAIL ") << r.at("suite").get<std::string>()
                << " max_error=" << crn::format_number(r.at("max_error").get<double>())
                << '\n';
    }
    if (!all) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coalition formation for cooperative spectrum sensing and access"};
  app.require_subcommand(1);
  Options o;

  const char* names[] = {"simulate", "sweep-n",  "sweep-alpha", "sweep-k", "sizes",
                         "traffic",  "mobility", "snapshot",    "oracle"};
  std::vector<std::pair<CLI::App*, crn::Preset>> commands;
  for (const char* name : names) {
    auto* sub = app.add_subcommand(name, "Run the " + std::string(name) + " preset");
    sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Base seed");
    sub->add_option("--seeds", o.seeds, "Number of seeds (base, base+1, ...)");
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--format", o.format, "csv or json")->capture_default_str();
    sub->add_option("--jobs", o.jobs, "Worker threads")->capture_default_str();
    sub->add_option("--grid", o.grid, "Values for the swept axis")->delimiter(',');
    sub->add_option("--scenario-in", o.scenario_in, "Load the world from a JSON dump");
    sub->add_option("--scenario-out", o.scenario_out, "Dump the (first) world as JSON");
    sub->add_flag("--timing", o.timing, "Fill the runtime_ms column");
    commands.emplace_back(sub, crn::preset_from_string(name));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("invalid_config", e.what());
  }

  try {
    for (const auto& [sub, preset] : commands)
      if (sub->parsed()) return run(preset, o);
  } catch (const crn::Error& e) {
    return fail(crn::to_string(e.kind()), e.what(), e.key());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return fail("invalid_config", "no subcommand");
}
