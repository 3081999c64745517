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

// Host role verdicts from evidence matrices.
//
// Host-level firewall categories decide the role; every other found pattern
// is reported as corroboration.
//
//   exploit status   attacker evidence   role
//   COMPLETE         yes                 MULTI_STEP
//   COMPLETE         no                  VICTIM_EXPLOITED
//   ATTEMPTED        no                  VICTIM_ATTEMPTED
//   NONE             yes                 ORIGIN_ATTACKER
//   anything else                        UNCLASSIFIED

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wormtrace/pattern_engine.hpp"

namespace wormtrace {

enum class ExploitStatus { NONE, ATTEMPTED, COMPLETE };
enum class Role { ORIGIN_ATTACKER, VICTIM_EXPLOITED, VICTIM_ATTEMPTED, MULTI_STEP, UNCLASSIFIED };

std::string_view to_string(ExploitStatus s) noexcept;
std::string_view to_string(Role r) noexcept;
std::optional<Role> role_from_string(std::string_view s) noexcept;

/// Role for a (status, attacker evidence) pair, per the table above.
Role role_for(ExploitStatus status, bool attacker_evidence) noexcept;

struct HostClassification {
    HostId host;
    Role role = Role::UNCLASSIFIED;
    ExploitStatus exploit_status = ExploitStatus::NONE;
    bool attacker_evidence = false;
    std::vector<std::string> corroborations;  // sorted pattern ids
};

/// COMPLETE: victim SCAN, EXPLOIT_BACKDOOR, EXPLOIT_FTP and EXPLOIT_TRANSFER.
/// ATTEMPTED: victim SCAN and EXPLOIT_BACKDOOR without EXPLOIT_TRANSFER.
/// Throws MissingCategory when the matrix lacks any of the four categories.
ExploitStatus exploit_completeness(const EvidenceMatrix& m);

/// Attacker SCAN and EXPLOIT_BACKDOOR both found (outbound chain initiated).
/// Throws MissingCategory when either category is absent from the matrix.
bool attacker_evidence(const EvidenceMatrix& m);

HostClassification classify_host(const EvidenceMatrix& m);

using ClassificationMap = std::map<HostId, HostClassification>;

/// Throws MissingCategory naming the failing host.
ClassificationMap classify_all(const EvidenceMap& evidence);

}  // namespace wormtrace
