// Copyright 2026 The vibcoh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "vibcoh/errors.hpp"
#include "vibcoh/experiments.hpp"
#include "vibcoh/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitGuard = 3;

void print_catalogue(std::ostream& os) {
  for (const auto& e : vibcoh::experiments()) {
    os << e.name << "  " << e.description << "\n";
    for (const auto& s : e.schema) os << "    " << s.key << " = " << s.default_value << "    # " << s.help << "\n";
  }
  os << "sweep forwards every other key to the swept experiment\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vibcoh: coherent-state motional qubit simulations"};
  app.set_version_flag("--version", std::string(vibcoh::kVersion));
  std::string experiment, config, out = "out";
  std::uint64_t seed = 1;
  std::vector<std::string> overrides;
  bool list = false;
  app.add_option("experiment", experiment, "fig2 | fig3 | fig4 | transfer | table1 | gates | sweep");
  app.add_option("--config", config, "key = value parameter file");
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  app.add_option("--override", overrides, "key=value, applied after --config");
  app.add_flag("--list", list, "print experiments and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  if (list) {
    print_catalogue(std::cout);
    return kExitOk;
  }
  if (experiment.empty()) {
    std::cerr << "error: experiment name required (see --list)\n";
    return kExitConfig;
  }

  try {
    vibcoh::KeyValues given;
    if (!config.empty()) given = vibcoh::read_config_file(config);
    for (const auto& o : overrides) {
      const auto [k, v] = vibcoh::parse_override(o);
      vibcoh::set_value(given, k, v);
    }
    const auto run = vibcoh::run_named(experiment, given, seed, out);
    for (const auto& w : run.result.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& [k, v] : run.result.summary) std::cout << k << " = " << vibcoh::format_number(v) << "\n";
    return kExitOk;
  } catch (const vibcoh::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return kExitConfig;
  } catch (const vibcoh::GuardError& e) {
    std::cerr << "numerical guard: " << e.what() << "\n";
    return kExitGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
}
