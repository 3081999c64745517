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

#include "wormtrace/classifier.hpp"

#include <algorithm>
#include <array>
#include <span>
#include <utility>

#include "wormtrace/error.hpp"

namespace wormtrace {

namespace {

constexpr std::array kVictimChain{Category::SCAN, Category::EXPLOIT_BACKDOOR, Category::EXPLOIT_FTP,
                                  Category::EXPLOIT_TRANSFER};
constexpr std::array kAttackerChain{Category::SCAN, Category::EXPLOIT_BACKDOOR};

void require_categories(const EvidenceMatrix& m, Perspective p, std::span<const Category> categories) {
    for (auto c : categories)
        if (!m.has_category(p, c)) throw MissingCategory(category_name(p, c));
}

bool host_found(const EvidenceMatrix& m, Perspective p, Category c) {
    return m.category_found(p, TraceLevel::HOST, c);
}

// Cells consumed by the conjunctions that decided the verdict.
bool consumed(const EvidenceCell& cell, ExploitStatus status, bool attacker) {
    if (cell.level != TraceLevel::HOST) return false;
    if (cell.perspective == Perspective::VICTIM) {
        if (status == ExploitStatus::COMPLETE)
            return std::find(kVictimChain.begin(), kVictimChain.end(), cell.category) != kVictimChain.end();
        if (status == ExploitStatus::ATTEMPTED)
            return cell.category == Category::SCAN || cell.category == Category::EXPLOIT_BACKDOOR;
        return false;
    }
    return attacker && (cell.category == Category::SCAN || cell.category == Category::EXPLOIT_BACKDOOR);
}

}  // namespace

std::string_view to_string(ExploitStatus s) noexcept {
    switch (s) {
        case ExploitStatus::NONE: return "NONE";
        case ExploitStatus::ATTEMPTED: return "ATTEMPTED";
        case ExploitStatus::COMPLETE: return "COMPLETE";
    }
    return "?";
}

std::string_view to_string(Role r) noexcept {
    switch (r) {
        case Role::ORIGIN_ATTACKER: return "ORIGIN_ATTACKER";
        case Role::VICTIM_EXPLOITED: return "VICTIM_EXPLOITED";
        case Role::VICTIM_ATTEMPTED: return "VICTIM_ATTEMPTED";
        case Role::MULTI_STEP: return "MULTI_STEP";
        case Role::UNCLASSIFIED: return "UNCLASSIFIED";
    }
    return "?";
}

std::optional<Role> role_from_string(std::string_view s) noexcept {
    for (auto r : {Role::ORIGIN_ATTACKER, Role::VICTIM_EXPLOITED, Role::VICTIM_ATTEMPTED, Role::MULTI_STEP,
                   Role::UNCLASSIFIED})
        if (to_string(r) == s) return r;
    return std::nullopt;
}

Role role_for(ExploitStatus status, bool attacker) noexcept {
    switch (status) {
        case ExploitStatus::COMPLETE: return attacker ? Role::MULTI_STEP : Role::VICTIM_EXPLOITED;
        case ExploitStatus::ATTEMPTED: return attacker ? Role::UNCLASSIFIED : Role::VICTIM_ATTEMPTED;
        case ExploitStatus::NONE: return attacker ? Role::ORIGIN_ATTACKER : Role::UNCLASSIFIED;
    }
    return Role::UNCLASSIFIED;
}

ExploitStatus exploit_completeness(const EvidenceMatrix& m) {
    require_categories(m, Perspective::VICTIM, kVictimChain);
    bool scan = host_found(m, Perspective::VICTIM, Category::SCAN);
    bool backdoor = host_found(m, Perspective::VICTIM, Category::EXPLOIT_BACKDOOR);
    bool ftp = host_found(m, Perspective::VICTIM, Category::EXPLOIT_FTP);
    bool transfer = host_found(m, Perspective::VICTIM, Category::EXPLOIT_TRANSFER);
    if (scan && backdoor && ftp && transfer) return ExploitStatus::COMPLETE;
    if (scan && backdoor && !transfer) return ExploitStatus::ATTEMPTED;
    return ExploitStatus::NONE;
}

bool attacker_evidence(const EvidenceMatrix& m) {
    require_categories(m, Perspective::ATTACKER, kAttackerChain);
    return host_found(m, Perspective::ATTACKER, Category::SCAN) &&
           host_found(m, Perspective::ATTACKER, Category::EXPLOIT_BACKDOOR);
}

HostClassification classify_host(const EvidenceMatrix& m) {
    HostClassification c;
    c.host = m.host;
    c.exploit_status = exploit_completeness(m);
    c.attacker_evidence = attacker_evidence(m);
    c.role = role_for(c.exploit_status, c.attacker_evidence);
    for (const auto& [id, cell] : m.cells)
        if (cell.found() && !consumed(cell, c.exploit_status, c.attacker_evidence)) c.corroborations.push_back(id);
    return c;
}

ClassificationMap classify_all(const EvidenceMap& evidence) {
    ClassificationMap out;
    for (const auto& [host, matrix] : evidence) {
        try {
            out.emplace(host, classify_host(matrix));
        } catch (const MissingCategory& e) {
            throw MissingCategory(e.category(), "host " + host.ip());
        }
    }
    return out;
}

}  // namespace wormtrace
