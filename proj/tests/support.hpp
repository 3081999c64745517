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


// Helpers shared by the unit tests and the acceptance runner.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wormtrace/report.hpp"
#include "wormtrace/scenario_gen.hpp"

namespace wt_test {

using namespace wormtrace;

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        auto base = std::filesystem::temp_directory_path();
        for (;;) {
            path_ = base / ("wormtrace-test-" + std::to_string(rd()));
            if (std::filesystem::create_directory(path_)) break;
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline AnalysisReport analyze(const std::vector<CorpusFile>& files, ParseMode mode = ParseMode::Lenient) {
    return run_analysis(files, RulesetSource::builtin(), mode);
}

inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

inline std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

inline bool is_data_line(const std::string& l) { return !l.empty() && l[0] != '#'; }

inline std::size_t count_data_lines(const std::vector<CorpusFile>& files) {
    std::size_t n = 0;
    for (const auto& f : files)
        for (const auto& l : split_lines(f.text)) n += is_data_line(l);
    return n;
}

// A line the parser for `kind` must reject.
inline std::string malformed_line(LogSource kind, std::mt19937_64& rng) {
    switch (kind) {
        case LogSource::FIREWALL: {
            static const char* bad[] = {
                "2004-05-11 10:23:00 OPEN TCP 192.112.111.104 192.112.112.200 1055",
                "2004-05-11 10:23:00 OPEN TCP 192.112.999.104 192.112.112.200 1055 445",
                "2004-13-11 10:23:00 OPEN TCP 192.112.111.104 192.112.112.200 1055 445",
                "2004-05-11 10:23:00 OPEN TCP 192.112.111.104 192.112.112.200 1055 70000",
                "garbage",
            };
            return bad[rng() % std::size(bad)];
        }
        case LogSource::IDS_ALERT: {
            static const char* bad[] = {
                "05/11-10:23:02.000123 [**] [1:1:1] SCANUPnP [**] [Priority: 3] {TCP} 192.112.111.104:1055 "
                "192.112.112.200:5000",
                "05/41-10:23:02.000123 [**] [1:1:1] SCANUPnP [**] {TCP} 192.112.111.104:1055 -> 1.2.3.4:5000",
                "not an alert",
            };
            return bad[rng() % std::size(bad)];
        }
        default: {
            static const char* bad[] = {
                "2004-05-11T10:23:05,592,C:\\x.exe",
                "2004-05-11X10:23:05,592,,\"msg\"",
                "2004-05-11T10:23:05,abc,,\"msg\"",
                "2004-05-11T10:23:05,592,,\"unterminated",
            };
            return bad[rng() % std::size(bad)];
        }
    }
}

struct Injected {
    std::vector<CorpusFile> files;
    std::size_t count = 0;
};

// Inserts malformed lines at random data positions so that they make up at least
// `share` of the resulting data lines.
inline Injected inject_malformed(const std::vector<CorpusFile>& files, double share, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::size_t data = count_data_lines(files);
    auto n = static_cast<std::size_t>(std::ceil(static_cast<double>(data) * share / (1.0 - share)));
    n = std::max<std::size_t>(n, 1);

    std::vector<std::vector<std::string>> lines;
    std::vector<LogSource> kinds;
    for (const auto& f : files) {
        lines.push_back(split_lines(f.text));
        kinds.push_back(parse_header(f.text).kind);
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t fi = rng() % files.size();
        auto& ls = lines[fi];
        std::size_t header = 0;
        while (header < ls.size() && ls[header].starts_with("#")) ++header;
        std::size_t pos = header + rng() % (ls.size() - header + 1);
        ls.insert(ls.begin() + static_cast<std::ptrdiff_t>(pos), malformed_line(kinds[fi], rng));
    }
    Injected out;
    out.count = n;
    for (std::size_t i = 0; i < files.size(); ++i) out.files.push_back({files[i].name, join_lines(lines[i])});
    return out;
}

// Removes every firewall line between a and b (either direction) whose destination port
// is 5554 or in the transfer range.
inline std::vector<CorpusFile> strip_transfer_lines(const std::vector<CorpusFile>& files, const HostId& a,
                                                    const HostId& b) {
    std::vector<CorpusFile> out;
    for (const auto& f : files) {
        if (parse_header(f.text).kind != LogSource::FIREWALL) {
            out.push_back(f);
            continue;
        }
        std::vector<std::string> kept;
        for (const auto& l : split_lines(f.text)) {
            if (is_data_line(l)) {
                std::istringstream ss(l);
                std::string date, time, action, proto, src, dst;
                int sport = 0, dport = 0;
                ss >> date >> time >> action >> proto >> src >> dst >> sport >> dport;
                bool pair = (src == a.ip() && dst == b.ip()) || (src == b.ip() && dst == a.ip());
                if (pair && (dport == 5554 || (dport >= 3000 && dport <= 3999))) continue;
            }
            kept.push_back(l);
        }
        out.push_back({f.name, join_lines(kept)});
    }
    return out;
}

// Role and level per host as produced by the pipeline.
struct Verdict {
    Role role;
    Level level;
    friend bool operator==(const Verdict&, const Verdict&) = default;
};

inline std::map<HostId, Verdict> verdicts(const AnalysisReport& r) {
    std::map<HostId, Verdict> out;
    for (const auto& [h, c] : r.classes) {
        Level lvl;
        if (auto it = r.chain.nodes.find(h); it != r.chain.nodes.end()) lvl = it->second.level;
        out.emplace(h, Verdict{c.role, lvl});
    }
    return out;
}

inline std::map<HostId, Verdict> verdicts(const std::map<HostId, ExpectedHost>& expected) {
    std::map<HostId, Verdict> out;
    for (const auto& [h, e] : expected) out.emplace(h, Verdict{e.role, e.level});
    return out;
}

inline std::string describe(const std::map<HostId, Verdict>& v) {
    std::string out;
    for (const auto& [h, x] : v)
        out += h.ip() + "=" + std::string(to_string(x.role)) + "/" + to_string(x.level) + " ";
    return out;
}

// Expected verdicts derived from a scenario script alone. Written separately from the
// generator's manifest logic: roles come from the five role definitions checked one by one,
// levels from relaxing complete attacks until nothing changes.
inline std::map<HostId, Verdict> oracle_verdicts(const ScenarioSpec& spec) {
    std::set<HostId> hosts, origins, outbound, got_complete, got_attempt;
    for (const auto& h : spec.hosts)
        if (h.initially_infected) {
            // an origin that never attacks leaves only impact events
            origins.insert(h.host);
            hosts.insert(h.host);
        }
    for (const auto& a : spec.attacks) {
        hosts.insert(a.src);
        hosts.insert(a.dst);
        outbound.insert(a.src);
        if (a.outcome == AttackOutcome::COMPLETE)
            got_complete.insert(a.dst);
        else
            got_attempt.insert(a.dst);
    }
    for (const auto& p : spec.onward_probes) outbound.insert(p);

    std::map<HostId, Verdict> out;
    for (const auto& h : hosts) {
        bool complete = got_complete.count(h) > 0;
        bool attempted = !complete && got_attempt.count(h) > 0;
        bool attacker = outbound.count(h) > 0;
        int matches = 0;
        Role role = Role::UNCLASSIFIED;
        if (complete && attacker) role = Role::MULTI_STEP, ++matches;
        if (attacker && !complete && !attempted) role = Role::ORIGIN_ATTACKER, ++matches;
        if (complete && !attacker) role = Role::VICTIM_EXPLOITED, ++matches;
        if (attempted && !attacker) role = Role::VICTIM_ATTEMPTED, ++matches;
        if (matches > 1) throw std::logic_error("role predicates overlap");
        out.emplace(h, Verdict{role, Level{}});
    }

    std::map<HostId, int> dist;
    for (const auto& [h, v] : out)
        if (v.role == Role::ORIGIN_ATTACKER) dist[h] = 0;
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& a : spec.attacks) {
            if (a.outcome != AttackOutcome::COMPLETE || !dist.count(a.src)) continue;
            auto r = out.at(a.dst).role;
            if (r != Role::MULTI_STEP && r != Role::VICTIM_EXPLOITED) continue;
            int d = dist[a.src] + 1;
            if (!dist.count(a.dst) || d < dist[a.dst]) dist[a.dst] = d, changed = true;
        }
    }
    for (auto& [h, v] : out) {
        if (auto it = dist.find(h); it != dist.end()) v.level = Level::at(it->second);
        if (v.role == Role::VICTIM_ATTEMPTED) v.level = Level::leaf();
    }
    return out;
}

// Targets of COMPLETE attacks whose verdict can be demoted by removing the transfer
// traffic of that single attack: no outbound activity of their own and exactly one
// complete inbound attack.
inline std::vector<ScriptedAttack> demotable_attacks(const ScenarioSpec& spec) {
    std::set<HostId> outbound(spec.onward_probes.begin(), spec.onward_probes.end());
    std::map<HostId, int> complete_in;
    for (const auto& a : spec.attacks) {
        outbound.insert(a.src);
        if (a.outcome == AttackOutcome::COMPLETE) ++complete_in[a.dst];
    }
    std::vector<ScriptedAttack> out;
    for (const auto& a : spec.attacks)
        if (a.outcome == AttackOutcome::COMPLETE && !outbound.count(a.dst) && complete_in[a.dst] == 1)
            out.push_back(a);
    return out;
}

template <class F>
double seconds(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace wt_test
