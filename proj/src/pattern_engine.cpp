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

#include "wormtrace/pattern_engine.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <unordered_map>
#include <utility>

#include <fmt/format.h>

#include "wormtrace/error.hpp"

namespace wormtrace {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view text, const std::array<Enum, N>& values) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    for (auto v : values)
        if (to_string(v) == upper) return v;
    return std::nullopt;
}

constexpr std::array kPerspectives{Perspective::VICTIM, Perspective::ATTACKER};
constexpr std::array kLevels{TraceLevel::HOST, TraceLevel::NETWORK};
constexpr std::array kCategories{Category::SCAN,   Category::EXPLOIT_BACKDOOR, Category::EXPLOIT_FTP,
                                 Category::EXPLOIT_TRANSFER, Category::SECURITY, Category::IMPACT,
                                 Category::SYSTEM, Category::APPLICATION,      Category::ACTIVITY,
                                 Category::ALARM};
constexpr std::array kBindings{HostBinding::OWNER, HostBinding::SRC_IP, HostBinding::DST_IP};

bool is_port_class_text(std::string_view v) {
    auto x = v.find('x');
    if (x == std::string_view::npos || v.size() > 5) return false;
    auto digits = v.substr(0, x), xs = v.substr(x);
    return std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
           std::all_of(xs.begin(), xs.end(), [](char c) { return c == 'x'; });
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Whitespace-separated terms; double quotes group characters and are removed.
std::vector<std::string> split_terms(std::string_view s, std::string_view context) {
    std::vector<std::string> out;
    std::string current;
    bool in_quotes = false, have = false;
    for (char c : s) {
        if (c == '"') {
            in_quotes = !in_quotes;
            have = true;
        } else if (!in_quotes && std::isspace(static_cast<unsigned char>(c))) {
            if (have) out.push_back(std::move(current));
            current.clear();
            have = false;
        } else {
            current += c;
            have = true;
        }
    }
    if (in_quotes) throw BadPredicate(fmt::format("{}: unterminated quote", context));
    if (have) out.push_back(std::move(current));
    return out;
}

AttrPredicate parse_term(const std::string& term, std::string_view context) {
    auto eq = term.find('=');
    if (eq == std::string::npos || eq == 0) throw BadPredicate(fmt::format("{}: '{}' is not attr=value", context, term));
    auto name = term.substr(0, eq);
    auto value = term.substr(eq + 1);
    if (!is_recognized_attr(name)) throw BadPredicate(fmt::format("{}: unknown attribute '{}'", context, name));
    if (!value.empty() && value.front() == '~') {
        if (value.size() == 1) throw BadPredicate(fmt::format("{}: empty glob for '{}'", context, name));
        return AttrPredicate::glob(name, value.substr(1));
    }
    if (is_port_attr(name)) {
        if (is_port_class_text(value)) return AttrPredicate::port_class(name, value);
        auto port = parse_port(value);
        if (!port) throw BadPredicate(fmt::format("{}: bad port '{}'", context, value));
        return AttrPredicate::eq(name, std::to_string(*port));
    }
    if ((name == attr::kSrcIp || name == attr::kDstIp)) {
        auto a = parse_ipv4(value);
        if (!a) throw BadPredicate(fmt::format("{}: bad address '{}'", context, value));
        return AttrPredicate::eq(name, format_ipv4(*a));
    }
    return AttrPredicate::eq(name, value);
}

bool valid_id(std::string_view id) {
    return !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '.' || c == '-';
    });
}

std::string quote_if_needed(const std::string& v) {
    if (v.empty() || v.find_first_of(" \t") != std::string::npos) return "\"" + v + "\"";
    return v;
}

}  // namespace

std::string_view to_string(Perspective p) noexcept { return p == Perspective::VICTIM ? "VICTIM" : "ATTACKER"; }
std::string_view to_string(TraceLevel l) noexcept { return l == TraceLevel::HOST ? "HOST" : "NETWORK"; }

std::string_view to_string(Category c) noexcept {
    switch (c) {
        case Category::SCAN: return "SCAN";
        case Category::EXPLOIT_BACKDOOR: return "EXPLOIT_BACKDOOR";
        case Category::EXPLOIT_FTP: return "EXPLOIT_FTP";
        case Category::EXPLOIT_TRANSFER: return "EXPLOIT_TRANSFER";
        case Category::SECURITY: return "SECURITY";
        case Category::IMPACT: return "IMPACT";
        case Category::SYSTEM: return "SYSTEM";
        case Category::APPLICATION: return "APPLICATION";
        case Category::ACTIVITY: return "ACTIVITY";
        case Category::ALARM: return "ALARM";
    }
    return "?";
}

std::string_view to_string(HostBinding b) noexcept {
    switch (b) {
        case HostBinding::OWNER: return "OWNER";
        case HostBinding::SRC_IP: return "SRC_IP";
        case HostBinding::DST_IP: return "DST_IP";
    }
    return "?";
}

std::string_view to_string(PredicateOp op) noexcept {
    switch (op) {
        case PredicateOp::EQ: return "EQ";
        case PredicateOp::GLOB: return "GLOB";
        case PredicateOp::PORT_CLASS: return "PORT_CLASS";
    }
    return "?";
}

std::string category_name(Perspective p, Category c) { return fmt::format("{} {}", to_string(p), to_string(c)); }

AttrPredicate AttrPredicate::eq(std::string attr, std::string value) {
    return {std::move(attr), PredicateOp::EQ, std::move(value)};
}

AttrPredicate AttrPredicate::glob(std::string attr, std::string pattern) {
    return {std::move(attr), PredicateOp::GLOB, std::move(pattern)};
}

AttrPredicate AttrPredicate::port_class(std::string attr, std::string pattern) {
    if (!is_port_class_text(pattern)) throw BadPredicate(fmt::format("'{}' is not a port class", pattern));
    auto x = pattern.find('x');
    std::uint32_t scale = 1;
    for (auto i = x; i < pattern.size(); ++i) scale *= 10;
    std::uint32_t prefix = 0;
    for (auto i = std::size_t{0}; i < x; ++i) prefix = prefix * 10 + static_cast<std::uint32_t>(pattern[i] - '0');
    AttrPredicate p{std::move(attr), PredicateOp::PORT_CLASS, pattern};
    p.port_lo = prefix * scale;
    p.port_hi = p.port_lo + scale - 1;
    if (p.port_hi > 65535) throw BadPredicate(fmt::format("port class '{}' exceeds 65535", pattern));
    return p;
}

bool glob_match(std::string_view pattern, std::string_view text) noexcept {
    std::size_t p = 0, t = 0;
    std::size_t star = std::string_view::npos, resume = 0;
    while (t < text.size()) {
        if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            resume = t;
        } else if (p < pattern.size() && pattern[p] == text[t]) {
            ++p;
            ++t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++resume;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

bool AttrPredicate::matches(std::string_view actual) const {
    switch (op) {
        case PredicateOp::EQ: return actual == value;
        case PredicateOp::GLOB: return glob_match(value, actual);
        case PredicateOp::PORT_CLASS: {
            auto port = parse_port(actual);
            return port && *port >= port_lo && *port <= port_hi;
        }
    }
    return false;
}

RuleSet::RuleSet(std::vector<TracePattern> patterns) : patterns_(std::move(patterns)) {
    std::set<std::string_view> ids;
    bool victim = false, attacker = false;
    for (const auto& p : patterns_) {
        if (!valid_id(p.id)) throw InvalidRuleSet(fmt::format("bad pattern id '{}'", p.id));
        if (!ids.insert(p.id).second) throw DuplicateId(p.id);
        if (p.level == TraceLevel::HOST && p.host_binding != HostBinding::OWNER)
            throw InvalidRuleSet(fmt::format("{}: HOST-level patterns bind OWNER", p.id));
        if (p.level == TraceLevel::NETWORK && p.host_binding == HostBinding::OWNER)
            throw InvalidRuleSet(fmt::format("{}: NETWORK-level patterns bind SRC_IP or DST_IP", p.id));
        for (const auto& pred : p.predicates)
            if (!is_recognized_attr(pred.attr))
                throw InvalidRuleSet(fmt::format("{}: unknown attribute '{}'", p.id, pred.attr));
        (p.perspective == Perspective::VICTIM ? victim : attacker) = true;
    }
    if (!victim || !attacker) throw InvalidRuleSet("needs at least one VICTIM and one ATTACKER pattern");
}

const TracePattern* RuleSet::find(std::string_view id) const {
    auto it = std::find_if(patterns_.begin(), patterns_.end(), [&](const TracePattern& p) { return p.id == id; });
    return it == patterns_.end() ? nullptr : &*it;
}

bool RuleSet::has_category(Perspective p, Category c) const {
    return std::any_of(patterns_.begin(), patterns_.end(),
                       [&](const TracePattern& t) { return t.perspective == p && t.category == c; });
}

RuleSet parse_ruleset(std::string_view text) {
    std::vector<TracePattern> patterns;
    struct Seen {
        bool perspective = false, level = false, category = false, source = false, bind = false;
    };
    std::vector<Seen> seen;
    std::set<std::string> ids;

    std::size_t number = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto raw = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++number;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto where = fmt::format("line {}", number);

        if (line.substr(0, 8) == "pattern " || line == "pattern") {
            auto id = std::string(trim(line.substr(7)));
            if (!valid_id(id)) throw InvalidRuleSet(fmt::format("{}: bad pattern id '{}'", where, id));
            if (!ids.insert(id).second) throw DuplicateId(id);
            patterns.push_back({});
            patterns.back().id = id;
            seen.push_back({});
            continue;
        }
        auto colon = line.find(':');
        if (colon == std::string_view::npos) throw UnknownKey(fmt::format("{}: '{}'", where, line));
        auto key = trim(line.substr(0, colon));
        auto value = trim(line.substr(colon + 1));
        if (patterns.empty()) throw UnknownKey(fmt::format("{}: '{}' outside a pattern block", where, key));
        auto& p = patterns.back();
        auto& s = seen.back();
        where = fmt::format("{} ({})", where, p.id);

        auto require = [&](auto parsed, std::string_view what) {
            if (!parsed) throw InvalidRuleSet(fmt::format("{}: bad {} '{}'", where, what, value));
            return *parsed;
        };
        if (key == "perspective") {
            p.perspective = require(lookup(value, kPerspectives), key);
            s.perspective = true;
        } else if (key == "level") {
            p.level = require(lookup(value, kLevels), key);
            s.level = true;
        } else if (key == "category") {
            p.category = require(lookup(value, kCategories), key);
            s.category = true;
        } else if (key == "source") {
            auto src = log_source_from_string(value);
            if (!src) src = log_source_from_header(value);
            p.source = require(src, key);
            s.source = true;
        } else if (key == "bind") {
            p.host_binding = require(lookup(value, kBindings), key);
            s.bind = true;
        } else if (key == "match") {
            for (const auto& term : split_terms(value, where)) p.predicates.push_back(parse_term(term, where));
        } else if (key == "attributes") {
            for (const auto& a : split_terms(value, where)) p.attributes.push_back(a);
        } else if (key == "description") {
            p.description = value;
        } else {
            throw UnknownKey(fmt::format("{}: '{}'", where, key));
        }
    }

    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const auto& s = seen[i];
        auto& p = patterns[i];
        if (!s.perspective || !s.level || !s.category || !s.source)
            throw InvalidRuleSet(fmt::format("{}: perspective, level, category and source are required", p.id));
        if (!s.bind && p.level == TraceLevel::NETWORK)
            throw InvalidRuleSet(fmt::format("{}: NETWORK-level patterns need a bind key", p.id));
    }
    return RuleSet(std::move(patterns));
}

std::string format_ruleset(const RuleSet& rules) {
    std::string out;
    for (const auto& p : rules.patterns()) {
        if (!out.empty()) out += '\n';
        out += fmt::format("pattern {}\n", p.id);
        out += fmt::format("  perspective: {}\n  level: {}\n  category: {}\n  source: {}\n  bind: {}\n",
                           to_string(p.perspective), to_string(p.level), to_string(p.category), to_string(p.source),
                           to_string(p.host_binding));
        out += "  match:";
        for (const auto& pred : p.predicates)
            out += " " + pred.attr + "=" + (pred.op == PredicateOp::GLOB ? "~" : "") + quote_if_needed(pred.value);
        out += '\n';
        if (!p.attributes.empty()) {
            out += "  attributes:";
            for (const auto& a : p.attributes) out += " " + a;
            out += '\n';
        }
        if (!p.description.empty()) out += fmt::format("  description: {}\n", p.description);
    }
    return out;
}

RuleSet default_ruleset() {
    static const RuleSet rules = parse_ruleset(default_ruleset_text());
    return rules;
}

std::optional<HostId> match_event(const TracePattern& p, const NormalizedEvent& e) {
    if (e.source != p.source) return std::nullopt;
    for (const auto& pred : p.predicates) {
        const auto* actual = e.find(pred.attr);
        if (!actual || !pred.matches(*actual)) return std::nullopt;
    }
    switch (p.host_binding) {
        case HostBinding::OWNER: return e.host;
        case HostBinding::SRC_IP:
        case HostBinding::DST_IP: {
            const auto* ip = e.find(p.host_binding == HostBinding::SRC_IP ? attr::kSrcIp : attr::kDstIp);
            if (!ip) return std::nullopt;
            auto address = parse_ipv4(*ip);
            if (!address) return std::nullopt;
            return HostId(*address);
        }
    }
    return std::nullopt;
}

EvidenceMatrix EvidenceMatrix::empty_for(HostId host, const RuleSet& rules) {
    EvidenceMatrix m;
    m.host = std::move(host);
    for (const auto& p : rules.patterns())
        m.cells.emplace(p.id, EvidenceCell{p.id, p.perspective, p.level, p.category, p.source, {}});
    return m;
}

bool EvidenceMatrix::has_category(Perspective p, Category c) const {
    return std::any_of(cells.begin(), cells.end(),
                       [&](const auto& kv) { return kv.second.perspective == p && kv.second.category == c; });
}

bool EvidenceMatrix::category_found(Perspective p, Category c) const {
    return std::any_of(cells.begin(), cells.end(), [&](const auto& kv) {
        return kv.second.perspective == p && kv.second.category == c && kv.second.found();
    });
}

bool EvidenceMatrix::category_found(Perspective p, TraceLevel l, Category c) const {
    return std::any_of(cells.begin(), cells.end(), [&](const auto& kv) {
        return kv.second.perspective == p && kv.second.level == l && kv.second.category == c && kv.second.found();
    });
}

EvidenceMap build_evidence(const std::vector<NormalizedEvent>& events, const RuleSet& rules) {
    std::unordered_map<std::uint32_t, std::string> names;
    for (const auto& e : events)
        if (e.host != kNullHost && e.host.name()) names.emplace(e.host.address(), *e.host.name());

    EvidenceMap evidence;
    auto matrix_for = [&](const HostId& host) -> EvidenceMatrix& {
        auto it = evidence.find(host);
        if (it != evidence.end()) return it->second;
        auto name = names.find(host.address());
        auto named = host.with_name(name == names.end() ? std::nullopt : std::optional<std::string>(name->second));
        return evidence.emplace(named, EvidenceMatrix::empty_for(named, rules)).first->second;
    };

    for (EventRef i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (e.host != kNullHost) matrix_for(e.host);
        for (const auto& p : rules.patterns()) {
            auto bound = match_event(p, e);
            if (!bound || *bound == kNullHost) continue;
            matrix_for(*bound).cells.find(p.id)->second.witnesses.push_back(i);
        }
    }
    return evidence;
}

}  // namespace wormtrace
