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

#include "wormtrace/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "json_util.hpp"
#include "wormtrace/error.hpp"

namespace wormtrace {

namespace {

using nlohmann::json;

json name_json(const HostId& h) { return h.name() ? json(*h.name()) : json(nullptr); }

Level level_of(const AnalysisReport& r, const HostId& h) {
    auto it = r.chain.nodes.find(h);
    return it == r.chain.nodes.end() ? Level::unassigned() : it->second.level;
}

std::string dot_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    std::string hex;
    for (unsigned i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

RulesetSource RulesetSource::builtin() { return {"default", std::string(default_ruleset_text())}; }

RulesetSource RulesetSource::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return {path.filename().string(), std::move(ss).str()};
}

AnalysisReport run_analysis(const std::vector<CorpusFile>& files, const RulesetSource& ruleset, ParseMode mode) {
    AnalysisReport r;
    r.rules = parse_ruleset(ruleset.text);
    r.ruleset_id = ruleset.id;
    r.ruleset_sha256 = sha256_hex(ruleset.text);
    r.corpus = load_corpus(files, mode);
    r.evidence = build_evidence(r.corpus.events, r.rules);
    r.classes = classify_all(r.evidence);
    auto edges = extract_edges(r.corpus.events, r.evidence, r.rules);
    r.chain = build_attack_chain(r.classes, edges);
    return r;
}

AnalysisReport run_analysis(const std::vector<std::filesystem::path>& paths,
                            const std::optional<std::filesystem::path>& ruleset, ParseMode mode) {
    auto source = ruleset ? RulesetSource::from_file(*ruleset) : RulesetSource::builtin();
    std::vector<CorpusFile> files;
    for (const auto& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError(path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        files.push_back({path.filename().string(), std::move(ss).str()});
    }
    return run_analysis(files, source, mode);
}

std::string report_json(const AnalysisReport& r) {
    json j;
    j["format_version"] = kReportFormatVersion;

    json patterns = json::array();
    for (const auto& p : r.rules.patterns()) patterns.push_back(p.id);
    j["ruleset"] = {{"id", r.ruleset_id}, {"sha256", r.ruleset_sha256}, {"patterns", patterns}};

    json files = json::array();
    for (const auto& f : r.corpus.files)
        files.push_back({{"name", f.name},
                         {"kind", to_string(f.kind)},
                         {"host", f.host ? json(f.host->ip()) : json(nullptr)},
                         {"events", f.events},
                         {"diagnostics", f.diagnostics}});
    json diagnostics = json::array();
    for (const auto& d : r.corpus.diagnostics)
        diagnostics.push_back({{"file", d.file}, {"line", d.line}, {"message", d.message}});
    j["corpus"] = {{"events", r.corpus.events.size()}, {"files", files}, {"diagnostics", diagnostics}};

    json hosts = json::array();
    json classification = json::object();
    for (const auto& [host, c] : r.classes) {
        json grid = json::object();
        for (const auto& [id, cell] : r.evidence.at(host).cells) grid[id] = cell.found();
        auto level = detail::level_to_json(level_of(r, host));
        hosts.push_back({{"ip", host.ip()},
                         {"name", name_json(host)},
                         {"role", to_string(c.role)},
                         {"exploit_status", to_string(c.exploit_status)},
                         {"attacker_evidence", c.attacker_evidence},
                         {"corroborations", c.corroborations},
                         {"level", level},
                         {"grid", grid}});
        classification[host.ip()] = {{"role", to_string(c.role)}, {"level", level}};
    }
    j["hosts"] = hosts;
    j["classification"] = classification;

    json nodes = json::array();
    for (const auto& [host, node] : r.chain.nodes)
        nodes.push_back({{"ip", host.ip()},
                         {"name", name_json(host)},
                         {"role", to_string(node.role)},
                         {"level", detail::level_to_json(node.level)}});
    json edges = json::array();
    for (const auto& e : r.chain.edges)
        edges.push_back({{"src", e.src.ip()},
                         {"dst", e.dst.ip()},
                         {"complete", e.complete},
                         {"first_seen", format_iso(e.first_seen)},
                         {"witnesses", e.witnesses.size()},
                         {"back_edge", e.back_edge}});
    json chain_diags = json::array();
    for (const auto& d : r.chain.diagnostics) chain_diags.push_back({{"kind", to_string(d.kind)}, {"message", d.message}});
    j["chain"] = {{"nodes", nodes}, {"edges", edges}, {"diagnostics", chain_diags}};

    return j.dump(2) + "\n";
}

std::string report_dot(const AnalysisReport& r) {
    std::string out = "digraph wormtrace {\n  rankdir=LR;\n  node [shape=box];\n";
    for (const auto& [host, node] : r.chain.nodes) {
        auto label = host.name() ? fmt::format("{}\\n{}\\n{}", dot_escape(*host.name()), host.ip(), to_string(node.role))
                                 : fmt::format("{}\\n{}", host.ip(), to_string(node.role));
        out += fmt::format("  \"{}\" [label=\"{}\"];\n", host.ip(), label);
    }
    for (const auto& e : r.chain.edges) {
        out += fmt::format("  \"{}\" -> \"{}\" [style={}, label=\"{}\"{}];\n", e.src.ip(), e.dst.ip(),
                           e.complete ? "solid" : "dashed", e.complete ? "445,9996,5554,3xxx" : "445,9996",
                           e.back_edge ? ", color=red" : "");
    }
    out += "}\n";
    return out;
}

std::string report_text(const AnalysisReport& r) {
    std::string out;
    out += fmt::format("ruleset   {} (sha256 {})\n", r.ruleset_id, r.ruleset_sha256.substr(0, 16));
    out += fmt::format("corpus    {} files, {} events, {} diagnostics\n", r.corpus.files.size(), r.corpus.events.size(),
                       r.corpus.diagnostics.size());
    for (const auto& d : r.corpus.diagnostics) out += fmt::format("  {}:{}: {}\n", d.file, d.line, d.message);

    if (!r.evidence.empty()) {
        std::size_t id_width = 8;
        for (const auto& p : r.rules.patterns()) id_width = std::max(id_width, p.id.size());
        std::vector<std::string> labels;
        for (const auto& [host, m] : r.evidence) labels.push_back(host.label());
        out += fmt::format("\n{:<{}}", "trace", id_width);
        for (const auto& l : labels) out += fmt::format("  {:^{}}", l, std::max<std::size_t>(l.size(), 3));
        out += '\n';
        for (const auto& p : r.rules.patterns()) {
            out += fmt::format("{:<{}}", p.id, id_width);
            std::size_t col = 0;
            for (const auto& [host, m] : r.evidence) {
                auto width = std::max<std::size_t>(labels[col++].size(), 3);
                // "√" is 3 bytes but one column wide.
                auto mark = m.cells.at(p.id).found() ? std::string("√") : std::string("x");
                auto pad = width - 1;
                out += fmt::format("  {}{}{}", std::string(pad / 2, ' '), mark, std::string(pad - pad / 2, ' '));
            }
            out += '\n';
        }
    }

    out += "\nhosts\n";
    for (const auto& [host, c] : r.classes)
        out += fmt::format("  {:<15} {:<10} {:<16} exploit={:<9} attacker={} level={}\n", host.ip(),
                           host.name().value_or("-"), to_string(c.role), to_string(c.exploit_status),
                           c.attacker_evidence ? "yes" : "no", to_string(level_of(r, host)));

    out += "\nchain\n";
    for (const auto& e : r.chain.edges)
        out += fmt::format("  {} -> {}  {}  first seen {}{}\n", e.src.label(), e.dst.label(),
                           e.complete ? "complete " : "attempted", format_iso(e.first_seen),
                           e.back_edge ? "  (back edge)" : "");
    for (const auto& d : r.chain.diagnostics) out += fmt::format("  [{}] {}\n", to_string(d.kind), d.message);
    return out;
}

}  // namespace wormtrace
