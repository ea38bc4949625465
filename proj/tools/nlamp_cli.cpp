// Copyright 2026 The nlamp Authors
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

// Command-line front end: nlamp <command> [--config file] [--seed n] [--out dir] [--threads n]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nlamp/cli/commands.hpp"

namespace {

int write_files(const std::string& dir, const nlamp::cli::CommandOutput& out) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        std::cerr << "cannot create output directory " << dir << ": " << ec.message() << "\n";
        return nlamp::cli::kExitConfigError;
    }
    for (const auto& f : out.files) {
        std::ofstream os(std::filesystem::path(dir) / f.name, std::ios::binary);
        os << f.contents;
        if (!os) {
            std::cerr << "cannot write " << f.name << "\n";
            return nlamp::cli::kExitConfigError;
        }
    }
    return nlamp::cli::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace nlamp::cli;
    CLI::App app{"Simulate and verify nonlinear quantum amplifier models"};
    std::string command, config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    app.add_option("command", command, "verify | noise-sweep | povm | estimate | compare (overrides the config)");
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "RNG seed (overrides the config)");
    app.add_option("--out", out_dir, "directory for CSV/JSON outputs");
    app.add_option("--threads", threads, "worker threads (0 = all cores)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfigError;
    }

    RunConfig config;
    try {
        if (!config_path.empty()) config = load_config(config_path);
        if (!command.empty()) config.command = parse_command(command);
        if (config_path.empty() && command.empty()) throw ConfigError("command: give a command or a --config file");
        if (seed) config.seed = *seed;
        if (threads) config.threads = *threads;
        if (!out_dir.empty()) config.output = out_dir;
        check_ranges(config);
    } catch (const std::exception& e) {
        std::cerr << exception_name(e) << ": " << e.what() << "\n";
        return kExitConfigError;
    }

    const CommandOutput out = run_command(config);
    std::cout << out.text;
    std::cerr << out.error;
    if (!config.output.empty() && !out.files.empty()) {
        const int rc = write_files(config.output, out);
        if (rc != kExitOk) return rc;
    }
    return out.exit_code;
}
