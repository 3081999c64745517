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

#include "wormtrace/scenario_gen.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <random>
#include <set>

#include <fmt/format.h>

#include "json_util.hpp"
#include "wormtrace/error.hpp"

namespace wormtrace {

namespace {

constexpr std::uint16_t kScanPort = 445;
constexpr std::uint16_t kBackdoorPort = 9996;
constexpr std::uint16_t kFtpPort = 5554;
constexpr std::uint16_t kUpnpPort = 5000;
constexpr std::uint32_t kPlaceholderNet = (203u << 24) | (0u << 16) | (113u << 8);

// Alert messages with their signature ids and priorities.
struct AlertKind {
    std::string_view message;
    std::string_view sig;
    int priority;
};
constexpr AlertKind kScanUpnp{"SCANUPnP", "1:1917:6", 3};
constexpr AlertKind kUnicodeShare{"NETBIOS Unicode share access", "1:2466:7", 2};
constexpr AlertKind kLsassExploit{"NETBIOS lsass exploit attempt", "1:2514:7", 1};
constexpr AlertKind kShellcode{"SHELLCODE detected", "1:1394:12", 1};

// Uniform draws by modulo reduction so that output is identical across
// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }
    std::uint64_t in(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
    bool coin() { return (engine_() >> 17) & 1u; }

private:
    std::mt19937_64 engine_;
};

struct IdsRecord {
    NormalizedEvent event;
    std::uint32_t micros;
    AlertKind kind;
};

class Emitter {
public:
    Emitter(const ScenarioSpec& spec) : spec_(spec), rng_(spec.seed), clock_(spec.base_time) {}

    void tick() { clock_ += std::chrono::seconds{1}; }

    // One TCP connection recorded by both ends: OPEN on the client, OPEN-INBOUND on the server.
    void connection(const HostId& client, const HostId& server, std::uint16_t port, bool log_server = true) {
        auto sport = std::to_string(rng_.in(1025, 5000));
        AttrMap attrs{{std::string(attr::kProtocol), "TCP"},          {std::string(attr::kSrcIp), client.ip()},
                      {std::string(attr::kDstIp), server.ip()},       {std::string(attr::kSrcPort), sport},
                      {std::string(attr::kDstPort), std::to_string(port)}};
        auto out = attrs;
        out.emplace(attr::kAction, "OPEN");
        host_event(client, LogSource::FIREWALL, std::move(out));
        if (log_server) {
            attrs.emplace(attr::kAction, "OPEN-INBOUND");
            host_event(server, LogSource::FIREWALL, std::move(attrs));
        }
        tick();
    }

    void alert(const AlertKind& kind, const HostId& src, const HostId& dst, std::uint16_t dport) {
        NormalizedEvent e;
        e.host = kNullHost;
        e.source = LogSource::IDS_ALERT;
        e.timestamp = clock_;
        e.seq = ids_.size();
        e.attrs = {{std::string(attr::kAlertMessage), std::string(kind.message)},
                   {std::string(attr::kProtocol), "TCP"},
                   {std::string(attr::kSrcIp), src.ip()},
                   {std::string(attr::kSrcPort), std::to_string(rng_.in(1025, 5000))},
                   {std::string(attr::kDstIp), dst.ip()},
                   {std::string(attr::kDstPort), std::to_string(dport)}};
        ids_.push_back({std::move(e), static_cast<std::uint32_t>(rng_.below(1000000)), kind});
        tick();
    }

    void event_log(const HostId& host, LogSource source, std::string event_id, std::string image,
                   std::string message) {
        host_event(host, source,
                   {{std::string(attr::kEventId), std::move(event_id)},
                    {std::string(attr::kImageFileName), std::move(image)},
                    {std::string(attr::kEventMessage), std::move(message)}});
        tick();
    }

    std::string worm_copy_name() { return fmt::format("C:\\WINDOWS\\system32\\{:04}_up.exe", rng_.below(10000)); }

    // Host files keyed by (address, source).
    const std::map<std::pair<std::uint32_t, LogSource>, std::vector<NormalizedEvent>>& host_logs() const {
        return host_logs_;
    }
    const std::vector<IdsRecord>& ids() const { return ids_; }

private:
    void host_event(const HostId& host, LogSource source, AttrMap attrs) {
        auto& log = host_logs_[{host.address(), source}];
        NormalizedEvent e;
        e.host = host;
        e.source = source;
        e.timestamp = clock_;
        e.seq = log.size();
        e.attrs = std::move(attrs);
        log.push_back(std::move(e));
    }

    const ScenarioSpec& spec_;
    Rng rng_;
    Timestamp clock_;
    std::map<std::pair<std::uint32_t, LogSource>, std::vector<NormalizedEvent>> host_logs_;
    std::vector<IdsRecord> ids_;
};

void emit_impact(Emitter& em, const HostId& host) {
    em.event_log(host, LogSource::APPLICATION, "1015", "", "lsass.exe failed");
    em.event_log(host, LogSource::SYSTEM, "1074", "",
                 "The process C:\\WINDOWS\\system32\\lsass.exe has initiated the restart of the computer: "
                 "system shutdown & restart");
}

std::string file_label(const HostId& h) { return h.name() ? *h.name() : h.ip(); }

const ScenarioHost* find_host(const ScenarioSpec& spec, const HostId& h) {
    auto it = std::find_if(spec.hosts.begin(), spec.hosts.end(), [&](const ScenarioHost& s) { return s.host == h; });
    return it == spec.hosts.end() ? nullptr : &*it;
}

HostId with_spec_name(const ScenarioSpec& spec, const HostId& h) {
    const auto* s = find_host(spec, h);
    return s ? s->host : h;
}

HostId host(std::string_view ip, std::string name) { return canonical_host(ip, std::move(name)); }

}  // namespace

std::string_view to_string(AttackOutcome o) noexcept { return o == AttackOutcome::COMPLETE ? "COMPLETE" : "ATTEMPTED"; }

std::optional<BuiltinScenario> builtin_from_string(std::string_view s) noexcept {
    if (s == "A" || s == "a") return BuiltinScenario::A;
    if (s == "B" || s == "b") return BuiltinScenario::B;
    if (s == "C" || s == "c") return BuiltinScenario::C;
    return std::nullopt;
}

ScenarioSpec builtin_scenario(BuiltinScenario which) {
    const auto selamat = host("192.112.111.104", "Selamat");
    const auto roslan = host("192.112.112.200", "Roslan");
    const auto yusof = host("192.112.111.102", "Yusof");
    const auto ramly = host("192.112.112.196", "Ramly");
    const auto sahib = host("192.112.110.144", "Sahib");
    const auto tarmizi = host("192.112.110.182", "Tarmizi");
    using enum AttackOutcome;

    ScenarioSpec spec;
    spec.base_time = *make_timestamp(2004, 5, 11, 10, 23, 0);
    spec.transfer_port = 3072;
    switch (which) {
        case BuiltinScenario::A:
            spec.name = "A";
            spec.seed = 1;
            spec.hosts = {{selamat, true}, {roslan, false}, {yusof, false}};
            spec.attacks = {{selamat, roslan, COMPLETE}, {selamat, yusof, ATTEMPTED}};
            spec.onward_probes = {roslan};
            break;
        case BuiltinScenario::B:
            spec.name = "B";
            spec.seed = 2;
            spec.hosts = {{selamat, true}, {ramly, false}, {roslan, false}};
            spec.attacks = {{selamat, ramly, COMPLETE}, {selamat, roslan, ATTEMPTED}, {ramly, roslan, COMPLETE}};
            spec.onward_probes = {roslan};
            break;
        case BuiltinScenario::C:
            spec.name = "C";
            spec.seed = 3;
            spec.hosts = {{selamat, true}, {sahib, false}, {tarmizi, false}};
            spec.attacks = {{selamat, sahib, COMPLETE}, {selamat, tarmizi, ATTEMPTED}, {sahib, tarmizi, COMPLETE}};
            spec.emit_impact_events = true;
            break;
    }
    return spec;
}

ScenarioSpec random_scenario(int n_hosts, int n_attacks, std::uint64_t seed) {
    if (n_hosts < 2 || n_hosts > 254) throw InvalidParams(fmt::format("n_hosts must be in [2, 254], got {}", n_hosts));
    if (n_attacks < 1 || n_attacks > 10000)
        throw InvalidParams(fmt::format("n_attacks must be in [1, 10000], got {}", n_attacks));

    Rng rng(seed);
    ScenarioSpec spec;
    spec.name = "random";
    spec.seed = seed;
    spec.base_time = *make_timestamp(2004, 5, 11, 10, 0, 0);
    spec.transfer_port = static_cast<std::uint16_t>(rng.in(3000, 3999));
    spec.emit_impact_events = rng.coin();

    const auto n = static_cast<std::size_t>(n_hosts);
    for (std::size_t i = 0; i < n; ++i)
        spec.hosts.push_back({HostId((192u << 24) | (112u << 16) | (120u << 8) | std::uint32_t(i + 1),
                                     fmt::format("host{:03}", i + 1)),
                              false});
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    auto n_origins = 1 + rng.below((n - 1) / 4 + 1);
    for (std::size_t i = 0; i < n_origins; ++i) spec.hosts[order[i]].initially_infected = true;

    std::vector<bool> infected(n), attacked_out(n);
    for (std::size_t i = 0; i < n; ++i) infected[i] = spec.hosts[i].initially_infected;
    // Uninfected hosts are preferred targets. Once none are left, attacks hit
    // already infected hosts and never complete, so complete edges stay acyclic.
    auto targets_for = [&](std::size_t src, bool fresh) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n; ++j)
            if (j != src && !spec.hosts[j].initially_infected && infected[j] != fresh) out.push_back(j);
        return out;
    };
    for (int k = 0; k < n_attacks; ++k) {
        std::vector<std::size_t> sources;
        for (std::size_t i = 0; i < n; ++i)
            if (infected[i] && (!targets_for(i, true).empty() || !targets_for(i, false).empty()))
                sources.push_back(i);
        auto src = sources[rng.below(sources.size())];
        auto targets = targets_for(src, true);
        bool fresh = !targets.empty();
        if (!fresh) targets = targets_for(src, false);
        auto dst = targets[rng.below(targets.size())];
        auto outcome = rng.coin() && fresh ? AttackOutcome::COMPLETE : AttackOutcome::ATTEMPTED;
        spec.attacks.push_back({spec.hosts[src].host, spec.hosts[dst].host, outcome});
        attacked_out[src] = true;
        if (outcome == AttackOutcome::COMPLETE) infected[dst] = true;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (infected[i] && !spec.hosts[i].initially_infected && !attacked_out[i] && rng.coin())
            spec.onward_probes.push_back(spec.hosts[i].host);
    return spec;
}

void validate(const ScenarioSpec& spec) {
    std::set<HostId> seen, infected;
    for (const auto& h : spec.hosts) {
        if (h.host == kNullHost) throw InvalidSpec("host 0.0.0.0 is reserved");
        if ((h.host.address() & 0xffffff00u) == kPlaceholderNet)
            throw InvalidSpec(fmt::format("{} is in the placeholder range 203.0.113.0/24", h.host.ip()));
        if (!seen.insert(h.host).second) throw InvalidSpec(fmt::format("duplicate host {}", h.host.ip()));
        if (h.host.name() && (h.host.name()->empty() || h.host.name()->find_first_of(" \t\r\n") != std::string::npos))
            throw InvalidSpec(fmt::format("host name '{}' must be a single token", *h.host.name()));
        if (h.initially_infected) infected.insert(h.host);
    }
    if (spec.hosts.size() > 254) throw InvalidSpec("at most 254 hosts");
    if (spec.transfer_port < 3000 || spec.transfer_port > 3999)
        throw InvalidSpec(fmt::format("transfer port {} outside [3000, 3999]", spec.transfer_port));
    for (std::size_t i = 0; i < spec.attacks.size(); ++i) {
        const auto& a = spec.attacks[i];
        if (!seen.count(a.src) || !seen.count(a.dst))
            throw InvalidSpec(fmt::format("attack {} references an unknown host", i));
        if (a.src == a.dst) throw InvalidSpec(fmt::format("attack {} targets its own source", i));
        if (!infected.count(a.src))
            throw InvalidSpec(fmt::format("attack {}: source {} is not infected yet", i, a.src.ip()));
        if (a.outcome == AttackOutcome::COMPLETE) infected.insert(a.dst);
    }
    for (const auto& p : spec.onward_probes) {
        if (!seen.count(p)) throw InvalidSpec(fmt::format("probe host {} is unknown", p.ip()));
        if (!infected.count(p)) throw InvalidSpec(fmt::format("probe host {} is never infected", p.ip()));
    }
}

HostId placeholder_for(const ScenarioSpec& spec, const HostId& prober) {
    auto it = std::find_if(spec.hosts.begin(), spec.hosts.end(),
                           [&](const ScenarioHost& s) { return s.host == prober; });
    if (it == spec.hosts.end()) throw InvalidSpec(fmt::format("probe host {} is unknown", prober.ip()));
    return HostId(kPlaceholderNet | std::uint32_t(it - spec.hosts.begin() + 1));
}

std::map<HostId, ExpectedHost> expected_outcome(const ScenarioSpec& spec) {
    std::set<HostId> involved, attackers, complete_in, attempted_in;
    std::map<HostId, std::vector<HostId>> complete_out;
    for (const auto& h : spec.hosts)
        if (h.initially_infected) involved.insert(h.host);
    for (const auto& a : spec.attacks) {
        involved.insert({a.src, a.dst});
        attackers.insert(a.src);
        (a.outcome == AttackOutcome::COMPLETE ? complete_in : attempted_in).insert(a.dst);
        if (a.outcome == AttackOutcome::COMPLETE) complete_out[a.src].push_back(a.dst);
    }
    for (const auto& p : spec.onward_probes) attackers.insert(p);

    std::map<HostId, ExpectedHost> out;
    for (const auto& h : involved) {
        ExpectedHost e{with_spec_name(spec, h), Role::UNCLASSIFIED, {}};
        bool attacker = attackers.count(h) > 0;
        if (complete_in.count(h))
            e.role = attacker ? Role::MULTI_STEP : Role::VICTIM_EXPLOITED;
        else if (attempted_in.count(h))
            e.role = attacker ? Role::UNCLASSIFIED : Role::VICTIM_ATTEMPTED;
        else if (attacker)
            e.role = Role::ORIGIN_ATTACKER;
        if (e.role == Role::ORIGIN_ATTACKER) e.level = Level::at(0);
        if (e.role == Role::VICTIM_ATTEMPTED) e.level = Level::leaf();
        out.emplace(e.host, e);
    }

    // Shortest distance from any origin over complete attacks.
    std::deque<HostId> queue;
    for (const auto& [h, e] : out)
        if (e.role == Role::ORIGIN_ATTACKER) queue.push_back(h);
    while (!queue.empty()) {
        auto h = queue.front();
        queue.pop_front();
        int depth = out.at(h).level.depth;
        for (const auto& next : complete_out[h]) {
            auto& e = out.at(next);
            if (e.level.kind != Level::Kind::Unassigned) continue;
            if (e.role != Role::MULTI_STEP && e.role != Role::VICTIM_EXPLOITED) continue;
            e.level = Level::at(depth + 1);
            queue.push_back(next);
        }
    }
    return out;
}

GeneratedCorpus generate_corpus(const ScenarioSpec& spec) {
    validate(spec);
    Emitter em(spec);

    for (const auto& h : spec.hosts)
        if (h.initially_infected) emit_impact(em, h.host);

    std::set<HostId> infected;
    for (const auto& h : spec.hosts)
        if (h.initially_infected) infected.insert(h.host);

    for (const auto& attack : spec.attacks) {
        auto src = with_spec_name(spec, attack.src);
        auto dst = with_spec_name(spec, attack.dst);
        em.alert(kScanUpnp, src, dst, kUpnpPort);
        em.connection(src, dst, kScanPort);
        em.alert(kUnicodeShare, src, dst, kScanPort);
        em.alert(kLsassExploit, src, dst, kScanPort);
        em.alert(kShellcode, src, dst, kScanPort);
        em.connection(src, dst, kBackdoorPort);
        if (attack.outcome != AttackOutcome::COMPLETE) continue;
        // The victim fetches the worm from the attacker's FTP server, then
        // the body arrives on the transfer port.
        em.connection(dst, src, kFtpPort);
        em.event_log(dst, LogSource::SECURITY, "592", "C:\\WINDOWS\\system32\\ftp.exe",
                     "A new process has been created");
        em.connection(src, dst, spec.transfer_port);
        em.event_log(dst, LogSource::SECURITY, "592", em.worm_copy_name(), "A new process has been created");
        em.event_log(src, LogSource::SECURITY, "592", "C:\\WINDOWS\\avserve2.exe", "A new process has been created");
        if (infected.insert(dst).second && spec.emit_impact_events) emit_impact(em, dst);
    }

    Manifest manifest;
    for (const auto& p : spec.onward_probes) {
        auto prober = with_spec_name(spec, p);
        auto target = placeholder_for(spec, p);
        em.alert(kScanUpnp, prober, target, kUpnpPort);
        em.connection(prober, target, kScanPort, false);
        em.connection(prober, target, kBackdoorPort, false);
        manifest.placeholders.emplace_back(prober, target);
    }

    GeneratedCorpus out;
    const int year = int(std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(spec.base_time)}.year());
    for (const auto& h : spec.hosts) {
        for (auto source : {LogSource::FIREWALL, LogSource::SECURITY, LogSource::SYSTEM, LogSource::APPLICATION}) {
            CorpusFile file{fmt::format("{}_{}.log", file_label(h.host), header_kind(source)),
                            format_header({source, h.host, std::nullopt})};
            auto it = em.host_logs().find({h.host.address(), source});
            if (it != em.host_logs().end()) {
                for (const auto& e : it->second) {
                    file.text += (source == LogSource::FIREWALL ? format_firewall_line(e) : format_event_log_line(e));
                    file.text += '\n';
                    out.events.push_back(e);
                }
            }
            out.files.push_back(std::move(file));
        }
    }
    CorpusFile ids{"ids_alert.log", format_header({LogSource::IDS_ALERT, std::nullopt, year})};
    for (const auto& rec : em.ids()) {
        if (int(std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(rec.event.timestamp)}.year()) != year)
            throw InvalidSpec("scenario crosses a year boundary; IDS timestamps carry no year");
        ids.text += format_ids_alert_line(rec.event, rec.micros, rec.kind.sig, rec.kind.priority) + '\n';
        out.events.push_back(rec.event);
    }
    out.files.push_back(std::move(ids));
    std::sort(out.files.begin(), out.files.end(), [](const CorpusFile& a, const CorpusFile& b) { return a.name < b.name; });
    sort_canonical(out.events);

    manifest.scenario = spec.name;
    manifest.seed = spec.seed;
    manifest.transfer_port = spec.transfer_port;
    manifest.emit_impact_events = spec.emit_impact_events;
    for (const auto& f : out.files) manifest.files.push_back(f.name);
    manifest.expected = expected_outcome(spec);
    if (!spec.onward_probes.empty())
        manifest.notes.push_back(
            "compromised hosts listed under placeholders start an onward attack (445, 9996, SCANUPnP) on an "
            "unlogged placeholder address");
    manifest.notes.push_back("origin hosts always record 1015/1074; compromised hosts only when emit_impact_events");
    out.manifest = std::move(manifest);
    return out;
}

Manifest generate_logs(const ScenarioSpec& spec, const std::filesystem::path& out_dir) {
    auto corpus = generate_corpus(spec);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError(out_dir.string(), "cannot create directory");
    auto write = [&](const std::string& name, const std::string& text) {
        auto path = out_dir / name;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << text;
        if (!f) throw IoError(path.string(), "cannot write file");
    };
    for (const auto& file : corpus.files) write(file.name, file.text);
    write("manifest.json", manifest_to_json(corpus.manifest));
    return corpus.manifest;
}

std::string manifest_to_json(const Manifest& m) {
    nlohmann::json j;
    j["scenario"] = m.scenario;
    j["seed"] = m.seed;
    j["transfer_port"] = m.transfer_port;
    j["emit_impact_events"] = m.emit_impact_events;
    j["files"] = m.files;
    j["expected"] = nlohmann::json::object();
    for (const auto& [h, e] : m.expected) {
        nlohmann::json entry{{"role", to_string(e.role)}, {"level", detail::level_to_json(e.level)}};
        entry["name"] = h.name() ? nlohmann::json(*h.name()) : nlohmann::json(nullptr);
        j["expected"][h.ip()] = std::move(entry);
    }
    j["placeholders"] = nlohmann::json::array();
    for (const auto& [prober, target] : m.placeholders)
        j["placeholders"].push_back({{"prober", prober.ip()}, {"target", target.ip()}});
    j["notes"] = m.notes;
    return j.dump(2) + "\n";
}

Manifest manifest_from_json(std::string_view text) {
    auto j = nlohmann::json::parse(text);
    Manifest m;
    m.scenario = j.at("scenario").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.transfer_port = j.at("transfer_port").get<std::uint16_t>();
    m.emit_impact_events = j.at("emit_impact_events").get<bool>();
    m.files = j.at("files").get<std::vector<std::string>>();
    for (const auto& [ip, entry] : j.at("expected").items()) {
        std::optional<std::string> name;
        if (entry.contains("name") && entry["name"].is_string()) name = entry["name"].get<std::string>();
        auto h = canonical_host(ip, name);
        auto role = role_from_string(entry.at("role").get<std::string>());
        if (!role) throw InvalidSpec("manifest: unknown role for " + ip);
        m.expected.emplace(h, ExpectedHost{h, *role, detail::level_from_json(entry.at("level"))});
    }
    for (const auto& p : j.at("placeholders"))
        m.placeholders.emplace_back(canonical_host(p.at("prober").get<std::string>()),
                                    canonical_host(p.at("target").get<std::string>()));
    m.notes = j.at("notes").get<std::vector<std::string>>();
    return m;
}

}  // namespace wormtrace
