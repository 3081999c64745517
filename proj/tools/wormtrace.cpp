// Copyright (C) 2026 The wormtrace Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// wormtrace: worm trace-pattern correlation over host and IDS logs.
//
//   wormtrace analyze <dir|file>... [--ruleset FILE] [--strict] [--json OUT] [--dot OUT]
//   wormtrace generate <A|B|C|random> --out DIR [--seed N] [--hosts N --attacks N]
//   wormtrace rules print
//
// Exit status: 0 analysis ran, 1 usage error, 2 unreadable corpus or
// strict-mode parse failure (and other input errors).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "wormtrace/error.hpp"
#include "wormtrace/report.hpp"
#include "wormtrace/scenario_gen.hpp"

namespace fs = std::filesystem;
using namespace wormtrace;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;

void write_output(const std::string& target, const std::string& text) {
    if (target == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw IoError(target, "cannot write file");
}

int analyze(const std::vector<std::string>& inputs, std::optional<std::string> ruleset, bool strict,
            const std::string& json_out, const std::string& dot_out) {
    if (!ruleset)
        if (const char* env = std::getenv("WORMTRACE_RULESET"); env && *env) ruleset = env;

    std::vector<fs::path> paths;
    for (const auto& input : inputs) {
        if (fs::is_directory(input)) {
            auto found = list_log_files(input);
            paths.insert(paths.end(), found.begin(), found.end());
        } else if (fs::exists(input)) {
            paths.emplace_back(input);
        } else {
            throw IoError(input, "no such file or directory");
        }
    }
    auto report = run_analysis(paths, ruleset ? std::optional<fs::path>(*ruleset) : std::nullopt,
                               strict ? ParseMode::Strict : ParseMode::Lenient);
    if (!json_out.empty()) write_output(json_out, report_json(report));
    if (!dot_out.empty()) write_output(dot_out, report_dot(report));
    if (json_out != "-" && dot_out != "-") std::cout << report_text(report);
    return 0;
}

int generate(const std::string& which, const std::string& out_dir, std::optional<std::uint64_t> seed,
             std::optional<int> hosts, std::optional<int> attacks) {
    ScenarioSpec spec;
    if (which == "random") {
        spec = random_scenario(hosts.value_or(6), attacks.value_or(8), seed.value_or(1));
    } else if (auto builtin = builtin_from_string(which)) {
        if (hosts || attacks) throw InvalidParams("--hosts/--attacks only apply to random scenarios");
        spec = builtin_scenario(*builtin);
        if (seed) spec.seed = *seed;
    } else {
        throw InvalidParams("scenario must be A, B, C or random, got '" + which + "'");
    }
    auto manifest = generate_logs(spec, out_dir);
    std::cout << "wrote " << manifest.files.size() << " log files and manifest.json to " << out_dir << "\n";
    for (const auto& [host, e] : manifest.expected)
        std::cout << "  " << host.ip() << " " << host.name().value_or("-") << " " << to_string(e.role) << " level "
                  << to_string(e.level) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Worm trace-pattern correlation over host and IDS logs"};
    app.require_subcommand(1);

    auto* analyze_cmd = app.add_subcommand("analyze", "Classify hosts and rebuild the attack chain");
    std::vector<std::string> inputs;
    std::optional<std::string> ruleset;
    bool strict = false;
    std::string json_out, dot_out;
    analyze_cmd->add_option("inputs", inputs, "Log directory or files")->required();
    analyze_cmd->add_option("--ruleset", ruleset, "Ruleset file (default: $WORMTRACE_RULESET or built-in)");
    analyze_cmd->add_flag("--strict", strict, "Fail on the first malformed line");
    analyze_cmd->add_option("--json", json_out, "Write the JSON report here ('-' for stdout)");
    analyze_cmd->add_option("--dot", dot_out, "Write the Graphviz chain here ('-' for stdout)");

    auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic scenario corpus");
    std::string which, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> hosts, attacks;
    generate_cmd->add_option("scenario", which, "A, B, C or random")->required();
    generate_cmd->add_option("--out", out_dir, "Output directory")->required();
    generate_cmd->add_option("--seed", seed, "Random seed");
    generate_cmd->add_option("--hosts", hosts, "Host count (random only)");
    generate_cmd->add_option("--attacks", attacks, "Attack count (random only)");

    auto* rules_cmd = app.add_subcommand("rules", "Ruleset utilities");
    rules_cmd->require_subcommand(1);
    auto* print_cmd = rules_cmd->add_subcommand("print", "Print the built-in ruleset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*analyze_cmd) return analyze(inputs, ruleset, strict, json_out, dot_out);
        if (*generate_cmd) return generate(which, out_dir, seed, hosts, attacks);
        if (*print_cmd) {
            std::cout << default_ruleset_text();
            return 0;
        }
    } catch (const InvalidParams& e) {
        std::cerr << "wormtrace: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "wormtrace: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "wormtrace: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}
