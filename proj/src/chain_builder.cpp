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

#include "wormtrace/chain_builder.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <tuple>

#include <fmt/format.h>

namespace wormtrace {

namespace {

bool is_exploit_chain(Category c) {
    return c == Category::SCAN || c == Category::EXPLOIT_BACKDOOR || c == Category::EXPLOIT_FTP ||
           c == Category::EXPLOIT_TRANSFER;
}

std::optional<std::uint32_t> address_attr(const NormalizedEvent& e, std::string_view name) {
    const auto* v = e.find(name);
    return v ? parse_ipv4(*v) : std::nullopt;
}

bool edge_order(const AttackEdge& a, const AttackEdge& b) {
    return std::tie(a.first_seen, a.src, a.dst) < std::tie(b.first_seen, b.src, b.dst);
}

bool compromised(Role r) { return r == Role::MULTI_STEP || r == Role::VICTIM_EXPLOITED; }

std::string describe(const HostId& h) { return h.name() ? fmt::format("{} ({})", *h.name(), h.ip()) : h.ip(); }

}  // namespace

std::string to_string(const Level& l) {
    switch (l.kind) {
        case Level::Kind::Unassigned: return "-";
        case Level::Kind::Leaf: return "LEAF";
        case Level::Kind::Depth: return std::to_string(l.depth);
    }
    return "?";
}

std::string_view to_string(ChainDiagnostic::Kind k) noexcept {
    switch (k) {
        case ChainDiagnostic::Kind::Orphan: return "ORPHAN";
        case ChainDiagnostic::Kind::CycleDetected: return "CYCLE_DETECTED";
        case ChainDiagnostic::Kind::TemporalOrder: return "TEMPORAL_ORDER";
    }
    return "?";
}

std::vector<AttackEdge> extract_edges(const std::vector<NormalizedEvent>& events, const EvidenceMap& evidence,
                                      const RuleSet& rules) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, AttackEdge> by_pair;
    auto named = [&](std::uint32_t address) {
        auto it = evidence.find(HostId(address));
        return it == evidence.end() ? HostId(address) : it->first;
    };
    auto add = [&](std::uint32_t src, std::uint32_t dst, EventRef witness, bool transfer) {
        if (src == dst || src == 0 || dst == 0) return;
        auto [it, inserted] = by_pair.try_emplace({src, dst});
        auto& edge = it->second;
        if (inserted) {
            edge.src = named(src);
            edge.dst = named(dst);
        }
        edge.witnesses.push_back(witness);
        edge.complete = edge.complete || transfer;
    };

    for (const auto& [host, matrix] : evidence) {
        for (const auto& [id, cell] : matrix.cells) {
            if (!cell.found()) continue;
            const auto* pattern = rules.find(id);
            if (!pattern) continue;
            bool firewall_chain = pattern->source == LogSource::FIREWALL && pattern->level == TraceLevel::HOST &&
                                  is_exploit_chain(pattern->category);
            bool victim_alert = pattern->perspective == Perspective::VICTIM &&
                                pattern->level == TraceLevel::NETWORK &&
                                pattern->host_binding == HostBinding::DST_IP;
            if (!firewall_chain && !victim_alert) continue;
            bool transfer = pattern->category == Category::EXPLOIT_TRANSFER;

            for (auto ref : cell.witnesses) {
                const auto& e = events.at(ref);
                if (victim_alert) {
                    if (auto src = address_attr(e, attr::kSrcIp)) add(*src, host.address(), ref, false);
                    continue;
                }
                // The remote peer is whichever endpoint is not the log owner.
                auto src_ip = address_attr(e, attr::kSrcIp);
                auto dst_ip = address_attr(e, attr::kDstIp);
                auto remote = (src_ip && *src_ip == host.address()) ? dst_ip : src_ip;
                if (!remote) continue;
                if (pattern->perspective == Perspective::VICTIM)
                    add(*remote, host.address(), ref, transfer);
                else
                    add(host.address(), *remote, ref, transfer);
            }
        }
    }

    std::vector<AttackEdge> edges;
    edges.reserve(by_pair.size());
    for (auto& [pair, edge] : by_pair) {
        std::sort(edge.witnesses.begin(), edge.witnesses.end());
        edge.witnesses.erase(std::unique(edge.witnesses.begin(), edge.witnesses.end()), edge.witnesses.end());
        edge.first_seen = events.at(edge.witnesses.front()).timestamp;
        for (auto ref : edge.witnesses) edge.first_seen = std::min(edge.first_seen, events[ref].timestamp);
        edges.push_back(std::move(edge));
    }
    std::sort(edges.begin(), edges.end(), edge_order);
    return edges;
}

AttackChain build_attack_chain(const ClassificationMap& classes, const std::vector<AttackEdge>& edges) {
    AttackChain chain;
    for (const auto& [host, c] : classes) chain.nodes.emplace(host, ChainNode{host, c.role, {}});
    for (const auto& e : edges)
        for (const auto& h : {e.src, e.dst}) chain.nodes.try_emplace(h, ChainNode{h, Role::UNCLASSIFIED, {}});

    chain.edges = edges;
    std::sort(chain.edges.begin(), chain.edges.end(), edge_order);

    // Complete-edge adjacency, each list in (first_seen, src, dst) order.
    std::map<HostId, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < chain.edges.size(); ++i)
        if (chain.edges[i].complete) out[chain.edges[i].src].push_back(i);

    std::deque<HostId> queue;
    for (auto& [host, node] : chain.nodes) {
        if (node.role == Role::ORIGIN_ATTACKER) {
            node.level = Level::at(0);
            queue.push_back(host);
        } else if (node.role == Role::VICTIM_ATTEMPTED) {
            node.level = Level::leaf();
        }
    }
    while (!queue.empty()) {
        auto current = queue.front();
        queue.pop_front();
        int depth = chain.nodes.at(current).level.depth;
        for (auto i : out[current]) {
            auto& next = chain.nodes.at(chain.edges[i].dst);
            if (next.level.kind != Level::Kind::Unassigned || !compromised(next.role)) continue;
            next.level = Level::at(depth + 1);
            queue.push_back(next.host);
        }
    }

    // Cycles among complete edges: iterative DFS, edges into the active path
    // are back edges.
    enum class Mark { White, Grey, Black };
    std::map<HostId, Mark> mark;
    for (const auto& [host, node] : chain.nodes) mark[host] = Mark::White;
    for (const auto& [root, unused] : chain.nodes) {
        if (mark[root] != Mark::White) continue;
        std::vector<std::pair<HostId, std::size_t>> stack{{root, 0}};
        mark[root] = Mark::Grey;
        while (!stack.empty()) {
            auto& [host, next] = stack.back();
            const auto& adj = out[host];
            if (next == adj.size()) {
                mark[host] = Mark::Black;
                stack.pop_back();
                continue;
            }
            auto& edge = chain.edges[adj[next++]];
            auto m = mark[edge.dst];
            if (m == Mark::Grey) {
                edge.back_edge = true;
                chain.diagnostics.push_back({ChainDiagnostic::Kind::CycleDetected,
                                             fmt::format("complete edge {} -> {} closes a cycle", describe(edge.src),
                                                         describe(edge.dst))});
            } else if (m == Mark::White) {
                mark[edge.dst] = Mark::Grey;
                stack.emplace_back(edge.dst, 0);
            }
        }
    }

    std::set<HostId> complete_endpoints;
    for (const auto& e : chain.edges)
        if (e.complete) complete_endpoints.insert({e.src, e.dst});
    for (const auto& [host, node] : chain.nodes) {
        if (node.level.is_depth()) continue;
        if (compromised(node.role) || complete_endpoints.count(host))
            chain.diagnostics.push_back({ChainDiagnostic::Kind::Orphan,
                                         fmt::format("{} ({}) is not reachable from any origin over complete edges",
                                                     describe(host), to_string(node.role))});
    }

    std::map<HostId, Timestamp> infected_at;
    for (const auto& e : chain.edges) {
        if (!e.complete) continue;
        auto [it, inserted] = infected_at.try_emplace(e.dst, e.first_seen);
        if (!inserted) it->second = std::min(it->second, e.first_seen);
    }
    for (const auto& e : chain.edges) {
        if (!e.complete) continue;
        auto it = infected_at.find(e.src);
        if (it != infected_at.end() && e.first_seen < it->second)
            chain.diagnostics.push_back(
                {ChainDiagnostic::Kind::TemporalOrder,
                 fmt::format("complete edge {} -> {} first seen {} before its source was infected at {}",
                             describe(e.src), describe(e.dst), format_iso(e.first_seen), format_iso(it->second))});
    }
    return chain;
}

}  // namespace wormtrace
