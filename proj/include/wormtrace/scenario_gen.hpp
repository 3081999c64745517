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

// Synthetic log corpora for scripted Sasser intrusions.
//
// Every attack leaves a bilateral trace: firewall entries on both hosts,
// event-log entries on the hosts that run worm processes, and IDS alerts.
// The manifest's expected verdicts are derived from the script alone.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wormtrace/chain_builder.hpp"
#include "wormtrace/classifier.hpp"
#include "wormtrace/log_model.hpp"
#include "wormtrace/parsers.hpp"

namespace wormtrace {

enum class AttackOutcome { COMPLETE, ATTEMPTED };
std::string_view to_string(AttackOutcome o) noexcept;

struct ScenarioHost {
    HostId host;
    bool initially_infected = false;
};

struct ScriptedAttack {
    HostId src;
    HostId dst;
    AttackOutcome outcome = AttackOutcome::COMPLETE;
};

struct ScenarioSpec {
    std::string name;
    std::vector<ScenarioHost> hosts;
    std::vector<ScriptedAttack> attacks;  // in time order
    Timestamp base_time{};
    std::uint64_t seed = 0;
    std::uint16_t transfer_port = 3072;  // within [3000, 3999]
    // 1074/1015 on hosts compromised during the scenario. Origins always
    // record them.
    bool emit_impact_events = false;
    // Compromised hosts that start an onward attack (scan + backdoor) on an
    // unlogged placeholder address.
    std::vector<HostId> onward_probes;
};

enum class BuiltinScenario { A, B, C };
std::optional<BuiltinScenario> builtin_from_string(std::string_view s) noexcept;

ScenarioSpec builtin_scenario(BuiltinScenario which);

/// Random but valid scenario: every attacker is infected before it attacks,
/// origins are never attacked, outcomes are 50/50. Deterministic in `seed`.
/// Throws InvalidParams unless 2 <= n_hosts <= 254 and 1 <= n_attacks <= 10000.
ScenarioSpec random_scenario(int n_hosts, int n_attacks, std::uint64_t seed);

/// Throws InvalidSpec on any violated precondition.
void validate(const ScenarioSpec& spec);

/// Placeholder target for a host's onward probe (203.0.113.<index+1>).
HostId placeholder_for(const ScenarioSpec& spec, const HostId& prober);

struct ExpectedHost {
    HostId host;
    Role role = Role::UNCLASSIFIED;
    Level level;
};

struct Manifest {
    std::string scenario;
    std::uint64_t seed = 0;
    std::uint16_t transfer_port = 0;
    bool emit_impact_events = false;
    std::vector<std::string> files;
    std::map<HostId, ExpectedHost> expected;  // every host that will appear in the evidence
    std::vector<std::pair<HostId, HostId>> placeholders;  // (prober, target)
    std::vector<std::string> notes;
};

/// Expected roles and levels, computed from the attack script.
std::map<HostId, ExpectedHost> expected_outcome(const ScenarioSpec& spec);

struct GeneratedCorpus {
    std::vector<CorpusFile> files;        // sorted by name
    std::vector<NormalizedEvent> events;  // intended events, canonical order
    Manifest manifest;
};

GeneratedCorpus generate_corpus(const ScenarioSpec& spec);

/// Writes the corpus and `manifest.json` into `out_dir` (created if needed).
/// Throws IoError or InvalidSpec.
Manifest generate_logs(const ScenarioSpec& spec, const std::filesystem::path& out_dir);

std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(std::string_view text);

}  // namespace wormtrace
