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

// Attack-chain reconstruction: exploit edges between hosts and compromise
// levels (graph distance from an origin over complete edges).

#include <map>
#include <string>
#include <vector>

#include "wormtrace/classifier.hpp"

namespace wormtrace {

struct AttackEdge {
    HostId src;
    HostId dst;
    bool complete = false;  // worm transfer (3xxx) witnessed
    Timestamp first_seen{};
    std::vector<EventRef> witnesses;  // sorted, unique
    bool back_edge = false;           // closes a cycle among complete edges
};

/// Compromise level: unassigned, LEAF (targeted but never compromised), or a
/// depth (0 for origins).
struct Level {
    enum class Kind { Unassigned, Leaf, Depth };
    Kind kind = Kind::Unassigned;
    int depth = 0;

    static Level unassigned() { return {}; }
    static Level leaf() { return {Kind::Leaf, 0}; }
    static Level at(int d) { return {Kind::Depth, d}; }
    bool is_depth() const noexcept { return kind == Kind::Depth; }

    friend bool operator==(const Level&, const Level&) = default;
};

std::string to_string(const Level& l);

struct ChainNode {
    HostId host;
    Role role = Role::UNCLASSIFIED;
    Level level;
};

struct ChainDiagnostic {
    enum class Kind { Orphan, CycleDetected, TemporalOrder };
    Kind kind;
    std::string message;
};

std::string_view to_string(ChainDiagnostic::Kind k) noexcept;

struct AttackChain {
    std::map<HostId, ChainNode> nodes;
    std::vector<AttackEdge> edges;  // sorted by (first_seen, src, dst)
    std::vector<ChainDiagnostic> diagnostics;
};

/// One edge per (src, dst) pair that has an exploit-chain firewall witness or
/// a victim-side IDS alert. `events` must be the canonically ordered corpus
/// the evidence was built from.
std::vector<AttackEdge> extract_edges(const std::vector<NormalizedEvent>& events, const EvidenceMap& evidence,
                                      const RuleSet& rules);

/// Multi-source BFS over complete edges from every ORIGIN_ATTACKER. Cycles,
/// orphaned compromised hosts and edges that precede their source's own
/// infection are reported as diagnostics.
AttackChain build_attack_chain(const ClassificationMap& classes, const std::vector<AttackEdge>& edges);

}  // namespace wormtrace
