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

#pragma once

// End-to-end analysis and report rendering.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wormtrace/chain_builder.hpp"
#include "wormtrace/classifier.hpp"
#include "wormtrace/parsers.hpp"
#include "wormtrace/pattern_engine.hpp"

namespace wormtrace {

inline constexpr int kReportFormatVersion = 1;

struct RulesetSource {
    std::string id;    // "default" or the ruleset file name
    std::string text;  // exact bytes; hashed into the report

    static RulesetSource builtin();
    /// Throws IoError.
    static RulesetSource from_file(const std::filesystem::path& path);
};

struct AnalysisReport {
    Corpus corpus;
    std::string ruleset_id;
    std::string ruleset_sha256;
    RuleSet rules;
    EvidenceMap evidence;
    ClassificationMap classes;
    AttackChain chain;
};

/// load_corpus -> build_evidence -> classify_all -> extract_edges ->
/// build_attack_chain. Uses the built-in ruleset when `ruleset` is empty.
AnalysisReport run_analysis(const std::vector<std::filesystem::path>& paths,
                            const std::optional<std::filesystem::path>& ruleset = std::nullopt,
                            ParseMode mode = ParseMode::Lenient);
AnalysisReport run_analysis(const std::vector<CorpusFile>& files, const RulesetSource& ruleset,
                            ParseMode mode = ParseMode::Lenient);

/// Key-sorted JSON, see schema/report.schema.json. Byte-deterministic.
std::string report_json(const AnalysisReport& r);
/// Graphviz digraph of the attack chain.
std::string report_dot(const AnalysisReport& r);
/// Human-readable summary with the found/not-found grid.
std::string report_text(const AnalysisReport& r);

std::string sha256_hex(std::string_view bytes);

}  // namespace wormtrace
