/*
 * Copyright 2026 The emrates Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end over the C API.
//
//   emrates run <config> [--seed S] [--workers W] [--out DIR]
//   emrates validate <config>
//   emrates plot-data <report.json>
//
// Exit codes: 0 success, 1 acceptance threshold failed, 2 config or usage
// error, 3 runtime failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "emrates/emrates.h"

namespace {

int exit_code(emrates_status s) {
  switch (s) {
    case EMRATES_OK: return 0;
    case EMRATES_CRITERIA_FAILED: return 1;
    case EMRATES_CONFIG_ERROR:
    case EMRATES_INVALID_ARGUMENT: return 2;
    case EMRATES_RUNTIME_ERROR: return 3;
  }
  return 3;
}

struct ConfigHandle {
  emrates_config* ptr = nullptr;
  ~ConfigHandle() { emrates_config_free(ptr); }
};

struct ReportHandle {
  emrates_report* ptr = nullptr;
  ~ReportHandle() { emrates_report_free(ptr); }
};

std::string take(char* s) {
  std::string out(s ? s : "");
  emrates_string_free(s);
  return out;
}

void print_summary(const std::string& report_json) {
  const auto j = nlohmann::json::parse(report_json);
  for (const auto& suite : j["suites"]) {
    std::cout << "suite " << suite["name"].get<std::string>() << " (" << suite["kind"].get<std::string>()
              << ", " << suite["wall_seconds"].get<double>() << " s)\n";
    for (const auto& [name, fit] : suite["fits"].items()) {
      std::cout << "  fit " << name << ": ";
      if (fit["status"] == "exact_scheme") std::cout << "exact scheme\n";
      else
        std::cout << "slope " << fit["slope"].get<double>() << " +- " << fit["slope_stderr"].get<double>()
                  << " (" << fit["points_used"].get<int>() << " points)\n";
    }
    for (const auto& v : suite["verdicts"]) {
      std::cout << "  " << (v["passed"].get<bool>() ? "PASS " : "FAIL ") << v["quantity"].get<std::string>();
      if (v["relation"] != "n/a") {
        std::cout << ": " << v["observed"] << ' ' << v["relation"].get<std::string>();
        if (v["relation"] != "in") std::cout << ' ' << v["threshold"];
      }
      if (v.contains("note")) std::cout << " [" << v["note"].get<std::string>() << ']';
      std::cout << '\n';
    }
    for (const auto& note : suite["notes"]) std::cout << "  note: " << note.get<std::string>() << '\n';
  }
  std::cout << (j["passed"].get<bool>() ? "PASSED" : "FAILED") << '\n';
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, unsigned workers,
            const std::optional<std::string>& out_dir) {
  ConfigHandle cfg;
  if (auto s = emrates_config_load_file(path.c_str(), &cfg.ptr); s != EMRATES_OK) {
    std::cerr << "emrates: " << emrates_last_error() << '\n';
    return exit_code(s);
  }
  ReportHandle rep;
  const std::uint64_t seed_value = seed.value_or(0);
  const auto status = emrates_run(cfg.ptr, workers, seed ? &seed_value : nullptr,
                                  out_dir ? out_dir->c_str() : nullptr, &rep.ptr);
  if (!rep.ptr) {
    std::cerr << "emrates: " << emrates_last_error() << '\n';
    return exit_code(status);
  }
  char* json = nullptr;
  if (emrates_report_json(rep.ptr, &json) == EMRATES_OK) print_summary(take(json));
  std::cout << "output: " << emrates_report_output_directory(rep.ptr) << '\n';
  return exit_code(status);
}

int cmd_validate(const std::string& path) {
  ConfigHandle cfg;
  if (auto s = emrates_config_load_file(path.c_str(), &cfg.ptr); s != EMRATES_OK) {
    std::cerr << "emrates: " << emrates_last_error() << '\n';
    return exit_code(s);
  }
  std::size_t count = 0;
  if (auto s = emrates_config_validate(cfg.ptr, &count); s != EMRATES_OK) {
    std::cerr << "emrates: " << emrates_last_error() << '\n';
    return exit_code(s);
  }
  for (std::size_t i = 0; i < count; ++i) std::cout << emrates_config_violation(cfg.ptr, i) << '\n';
  if (count == 0) std::cout << "ok\n";
  return count == 0 ? 0 : 2;
}

int cmd_plot_data(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "emrates: cannot open '" << path << "'\n";
    return 2;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  char* out = nullptr;
  if (auto s = emrates_plot_data(buf.str().c_str(), &out); s != EMRATES_OK) {
    std::cerr << "emrates: " << emrates_last_error() << '\n';
    return exit_code(s);
  }
  std::cout << take(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Euler-Maruyama strong-rate experiments"};
  app.set_version_flag("--version", std::string(emrates_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::optional<std::string> out_dir;
  auto* run = app.add_subcommand("run", "run the experiments of a config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--seed", seed, "master seed (overrides the config)");
  run->add_option("--workers", workers, "worker threads (0 = all cores)");
  run->add_option("--out", out_dir, "output directory");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "list config violations");
  validate->add_option("config", validate_path, "config file")->required();

  std::string report_path;
  auto* plot = app.add_subcommand("plot-data", "gnuplot columns from a JSON report");
  plot->add_option("report", report_path, "report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(config_path, seed, workers, out_dir);
    if (*validate) return cmd_validate(validate_path);
    if (*plot) return cmd_plot_data(report_path);
  } catch (const std::exception& e) {
    std::cerr << "emrates: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
