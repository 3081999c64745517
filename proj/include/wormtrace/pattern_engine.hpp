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

// Declarative trace patterns and their evaluation over a corpus.
//
// A pattern is a conjunction of attribute predicates over events of one log
// source. When it matches, it binds a host: the log owner for host-level
// patterns, or the source/destination address for network-level ones.
// Alternatives within a trace category are separate patterns sharing the
// category.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wormtrace/log_model.hpp"

namespace wormtrace {

enum class Perspective { VICTIM, ATTACKER };
enum class TraceLevel { HOST, NETWORK };
enum class Category {
    SCAN,
    EXPLOIT_BACKDOOR,
    EXPLOIT_FTP,
    EXPLOIT_TRANSFER,
    SECURITY,
    IMPACT,
    SYSTEM,
    APPLICATION,
    ACTIVITY,
    ALARM,
};
enum class HostBinding { OWNER, SRC_IP, DST_IP };
enum class PredicateOp { EQ, GLOB, PORT_CLASS };

std::string_view to_string(Perspective p) noexcept;
std::string_view to_string(TraceLevel l) noexcept;
std::string_view to_string(Category c) noexcept;
std::string_view to_string(HostBinding b) noexcept;
std::string_view to_string(PredicateOp op) noexcept;

/// "VICTIM SCAN", the name used in MissingCategory errors.
std::string category_name(Perspective p, Category c);

struct AttrPredicate {
    std::string attr;
    PredicateOp op = PredicateOp::EQ;
    std::string value;
    // PORT_CLASS bounds, inclusive.
    std::uint32_t port_lo = 0;
    std::uint32_t port_hi = 0;

    static AttrPredicate eq(std::string attr, std::string value);
    static AttrPredicate glob(std::string attr, std::string pattern);
    /// `digits` followed by one or more `x`, e.g. "3xxx" = [3000, 3999].
    static AttrPredicate port_class(std::string attr, std::string pattern);

    bool matches(std::string_view actual) const;

    friend bool operator==(const AttrPredicate&, const AttrPredicate&) = default;
};

/// `*` is the only wildcard; it matches any run of characters.
bool glob_match(std::string_view pattern, std::string_view text) noexcept;

struct TracePattern {
    std::string id;
    Perspective perspective = Perspective::VICTIM;
    TraceLevel level = TraceLevel::HOST;
    Category category = Category::SCAN;
    LogSource source = LogSource::FIREWALL;
    std::vector<AttrPredicate> predicates;
    HostBinding host_binding = HostBinding::OWNER;
    std::vector<std::string> attributes;  // descriptive trace-attribute columns
    std::string description;

    friend bool operator==(const TracePattern&, const TracePattern&) = default;
};

class RuleSet {
public:
    RuleSet() = default;
    /// Validates ids and pattern invariants. Throws DuplicateId or InvalidRuleSet.
    explicit RuleSet(std::vector<TracePattern> patterns);

    const std::vector<TracePattern>& patterns() const noexcept { return patterns_; }
    const TracePattern* find(std::string_view id) const;
    bool has_category(Perspective p, Category c) const;

    friend bool operator==(const RuleSet& a, const RuleSet& b) { return a.patterns_ == b.patterns_; }

private:
    std::vector<TracePattern> patterns_;
};

/// Parses the line-oriented ruleset format:
///
///     pattern victim.host.scan
///       perspective: VICTIM
///       level: HOST
///       category: SCAN
///       source: FIREWALL
///       bind: OWNER
///       match: action=OPEN-INBOUND protocol=TCP dst_port=445
///       attributes: action protocol dst_port
///
/// `~value` is a glob, a port value like `3xxx` is a port class, and values
/// may be double-quoted to include spaces.
RuleSet parse_ruleset(std::string_view text);
/// Inverse of parse_ruleset, without comments.
std::string format_ruleset(const RuleSet& rules);

/// Source text of the built-in ruleset (also shipped as rules/default.rules).
std::string_view default_ruleset_text() noexcept;
RuleSet default_ruleset();

/// The bound host if `e` satisfies `p`, otherwise nothing.
std::optional<HostId> match_event(const TracePattern& p, const NormalizedEvent& e);

struct EvidenceCell {
    std::string pattern_id;
    Perspective perspective = Perspective::VICTIM;
    TraceLevel level = TraceLevel::HOST;
    Category category = Category::SCAN;
    LogSource source = LogSource::FIREWALL;
    std::vector<EventRef> witnesses;

    bool found() const noexcept { return !witnesses.empty(); }
};

/// Per-host found/not-found grid with one cell per ruleset pattern.
struct EvidenceMatrix {
    HostId host;
    std::map<std::string, EvidenceCell, std::less<>> cells;

    static EvidenceMatrix empty_for(HostId host, const RuleSet& rules);

    bool has_category(Perspective p, Category c) const;
    bool category_found(Perspective p, Category c) const;
    bool category_found(Perspective p, TraceLevel l, Category c) const;
};

using EvidenceMap = std::map<HostId, EvidenceMatrix>;

/// Evaluates every pattern against every event. Hosts that own an event or
/// are bound by any pattern get a matrix; names learned from log owners are
/// attached to network-bound hosts. `events` must be in canonical order and
/// witnesses refer to indices into it.
EvidenceMap build_evidence(const std::vector<NormalizedEvent>& events, const RuleSet& rules);

}  // namespace wormtrace
