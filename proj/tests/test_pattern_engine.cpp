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


#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "wormtrace/error.hpp"
#include "wormtrace/pattern_engine.hpp"

using namespace wormtrace;

namespace {

NormalizedEvent firewall(const std::string& owner, const std::string& action, const std::string& src,
                         const std::string& dst, int dport) {
    NormalizedEvent e;
    e.host = canonical_host(owner);
    e.source = LogSource::FIREWALL;
    e.timestamp = *parse_iso_timestamp("2004-05-11T10:23:01");
    e.attrs = {{"action", action}, {"protocol", "TCP"}, {"src_ip", src},
               {"dst_ip", dst},    {"src_port", "1055"}, {"dst_port", std::to_string(dport)}};
    return e;
}

NormalizedEvent alert(const std::string& msg, const std::string& src, const std::string& dst, int dport) {
    NormalizedEvent e;
    e.host = kNullHost;
    e.source = LogSource::IDS_ALERT;
    e.timestamp = *parse_iso_timestamp("2004-05-11T10:23:01");
    e.attrs = {{"alert_message", msg}, {"protocol", "TCP"},     {"src_ip", src},
               {"src_port", "1055"},    {"dst_ip", dst},        {"dst_port", std::to_string(dport)}};
    return e;
}

const TracePattern& pat(const RuleSet& rs, std::string_view id) {
    auto p = rs.find(id);
    REQUIRE(p);
    return *p;
}

const char* kMinimal = R"(pattern v
  perspective: VICTIM
  level: HOST
  category: SCAN
  source: FIREWALL
  match: action=OPEN-INBOUND protocol=TCP dst_port=445

pattern a
  perspective: ATTACKER
  level: HOST
  category: SCAN
  source: FIREWALL
  match: action=OPEN protocol=TCP dst_port=445
)";

}  // namespace

TEST_SUITE("pattern_engine") {

TEST_CASE("parse_ruleset: equality predicates") {
    auto rs = parse_ruleset(kMinimal);
    REQUIRE(rs.patterns().size() == 2);
    const auto& p = rs.patterns()[0];
    CHECK(p.id == "v");
    CHECK(p.perspective == Perspective::VICTIM);
    CHECK(p.level == TraceLevel::HOST);
    CHECK(p.host_binding == HostBinding::OWNER);
    REQUIRE(p.predicates.size() == 3);
    for (const auto& pr : p.predicates) CHECK(pr.op == PredicateOp::EQ);
    CHECK(p.predicates[0] == AttrPredicate::eq("action", "OPEN-INBOUND"));
}

TEST_CASE("parse_ruleset: glob and port class") {
    auto rs = parse_ruleset(std::string(kMinimal) + R"(
pattern up
  perspective: VICTIM
  level: HOST
  category: IMPACT
  source: SECURITY
  match: event_id=592 image_file_name=~*_up.exe

pattern xfer
  perspective: VICTIM
  level: HOST
  category: EXPLOIT_TRANSFER
  source: FIREWALL
  match: dst_port=3xxx
)");
    const auto& up = pat(rs, "up");
    REQUIRE(up.predicates.size() == 2);
    CHECK(up.predicates[1].op == PredicateOp::GLOB);
    CHECK(up.predicates[1].value == "*_up.exe");
    const auto& x = pat(rs, "xfer");
    REQUIRE(x.predicates.size() == 1);
    CHECK(x.predicates[0].op == PredicateOp::PORT_CLASS);
    CHECK(x.predicates[0].port_lo == 3000);
    CHECK(x.predicates[0].port_hi == 3999);
}

TEST_CASE("parse_ruleset: errors") {
    CHECK_THROWS_AS(parse_ruleset(std::string(kMinimal) + "\n" + kMinimal), DuplicateId);
    CHECK_THROWS_AS(parse_ruleset(std::string(kMinimal) + "  colour: red\n"), UnknownKey);
    auto with_match = [](const std::string& m) {
        return std::string(kMinimal) + "\npattern x\n  perspective: VICTIM\n  level: HOST\n  category: SCAN\n"
                                       "  source: FIREWALL\n  match: " + m + "\n";
    };
    CHECK_NOTHROW(parse_ruleset(with_match("dst_port=445")));
    CHECK_THROWS_AS(parse_ruleset(with_match("colour=red")), BadPredicate);
    CHECK_THROWS_AS(parse_ruleset(with_match("dst_port")), BadPredicate);
    CHECK_THROWS_AS(parse_ruleset(with_match("dst_port=99999")), BadPredicate);
    CHECK_THROWS_AS(parse_ruleset(with_match("dst_port=44a")), BadPredicate);
    CHECK_THROWS_AS(parse_ruleset(with_match("event_message=\"open")), BadPredicate);
    // structural invariants
    CHECK_THROWS_AS(parse_ruleset("pattern v\n  perspective: VICTIM\n  level: HOST\n  category: SCAN\n"
                                  "  source: FIREWALL\n"),
                    InvalidRuleSet);
    CHECK_THROWS_AS(parse_ruleset(std::string(kMinimal) +
                                  "\npattern n\n  perspective: VICTIM\n  level: NETWORK\n  category: ALARM\n"
                                  "  source: IDS_ALERT\n  bind: OWNER\n"),
                    InvalidRuleSet);
    CHECK_THROWS(parse_ruleset(std::string(kMinimal) + "\npattern q\n  perspective: VICTIM\n  level: HOST\n"));
}

TEST_CASE("parse_ruleset: quoted values keep spaces") {
    auto rs = parse_ruleset(std::string(kMinimal) + R"(
pattern n
  perspective: VICTIM
  level: NETWORK
  category: ACTIVITY
  source: IDS_ALERT
  bind: DST_IP
  match: alert_message="NETBIOS lsass exploit attempt"
)");
    const auto& n = pat(rs, "n");
    REQUIRE(n.predicates.size() == 1);
    CHECK(n.predicates[0].value == "NETBIOS lsass exploit attempt");
    CHECK(n.host_binding == HostBinding::DST_IP);
}

TEST_CASE("glob semantics") {
    CHECK(glob_match("*_up.exe", "C:\\WINDOWS\\system32\\2277_up.exe"));
    CHECK_FALSE(glob_match("*_up.exe", "C:\\x_up.exe.bak"));
    CHECK(glob_match("*avserve*.exe", "C:\\WINDOWS\\avserve2.exe"));
    CHECK(glob_match("*", ""));
    CHECK(glob_match("a*b*c", "abbbc"));
    CHECK_FALSE(glob_match("a*b*c", "acb"));
    CHECK_FALSE(glob_match("ftp.exe", "FTP.EXE"));
    // `?` is not a wildcard
    CHECK_FALSE(glob_match("a?c", "abc"));
    CHECK(glob_match("a?c", "a?c"));
}

TEST_CASE("port class semantics") {
    auto p = AttrPredicate::port_class("dst_port", "3xxx");
    CHECK(p.matches("3000"));
    CHECK(p.matches("3999"));
    CHECK(p.matches("3072"));
    CHECK_FALSE(p.matches("2999"));
    CHECK_FALSE(p.matches("4000"));
    CHECK_FALSE(p.matches("30000"));
    CHECK_FALSE(p.matches("abc"));
    auto q = AttrPredicate::port_class("dst_port", "44x");
    CHECK(q.port_lo == 440);
    CHECK(q.port_hi == 449);
}

TEST_CASE("default ruleset: one pattern per table row") {
    // Rows of the victim and attacker trace tables, with alternatives split out.
    struct Row {
        Perspective p;
        Category c;
        const char* attr;
        const char* value;
    };
    const Row rows[] = {
        {Perspective::VICTIM, Category::SCAN, "dst_port", "445"},
        {Perspective::VICTIM, Category::EXPLOIT_BACKDOOR, "dst_port", "9996"},
        {Perspective::VICTIM, Category::EXPLOIT_FTP, "dst_port", "5554"},
        {Perspective::VICTIM, Category::EXPLOIT_TRANSFER, "dst_port", "3xxx"},
        {Perspective::VICTIM, Category::SECURITY, "image_file_name", "*ftp.exe"},
        {Perspective::VICTIM, Category::IMPACT, "image_file_name", "*_up.exe"},
        {Perspective::VICTIM, Category::SYSTEM, "event_id", "1074"},
        {Perspective::VICTIM, Category::APPLICATION, "event_id", "1015"},
        {Perspective::VICTIM, Category::ACTIVITY, "alert_message", "NETBIOS Unicode share access"},
        {Perspective::VICTIM, Category::ACTIVITY, "alert_message", "NETBIOS lsass exploit attempt"},
        {Perspective::VICTIM, Category::ACTIVITY, "alert_message", "SHELLCODE detected"},
        {Perspective::VICTIM, Category::ALARM, "dst_port", "445"},
        {Perspective::ATTACKER, Category::SCAN, "dst_port", "445"},
        {Perspective::ATTACKER, Category::EXPLOIT_BACKDOOR, "dst_port", "9996"},
        {Perspective::ATTACKER, Category::EXPLOIT_FTP, "dst_port", "5554"},
        {Perspective::ATTACKER, Category::EXPLOIT_TRANSFER, "dst_port", "3xxx"},
        {Perspective::ATTACKER, Category::IMPACT, "image_file_name", "*avserve*.exe"},
        {Perspective::ATTACKER, Category::IMPACT, "image_file_name", "*_up.exe"},
        {Perspective::ATTACKER, Category::IMPACT, "event_id", "1074"},
        {Perspective::ATTACKER, Category::IMPACT, "event_id", "1015"},
        {Perspective::ATTACKER, Category::ACTIVITY, "alert_message", "SCANUPnP"},
        {Perspective::ATTACKER, Category::ALARM, nullptr, nullptr},
    };
    auto rs = default_ruleset();
    CHECK(rs.patterns().size() == std::size(rows));
    CHECK(rs.patterns().size() >= 18);
    std::set<std::string> used;
    for (const auto& row : rows) {
        bool found = false;
        for (const auto& p : rs.patterns()) {
            if (p.perspective != row.p || p.category != row.c || used.count(p.id)) continue;
            bool hit = row.attr == nullptr
                           ? p.predicates.empty()
                           : std::any_of(p.predicates.begin(), p.predicates.end(), [&](const AttrPredicate& pr) {
                                 return pr.attr == row.attr && pr.value == row.value;
                             });
            if (hit) {
                used.insert(p.id);
                found = true;
                break;
            }
        }
        CHECK_MESSAGE(found, category_name(row.p, row.c), " ", (row.value ? row.value : "any"));
    }
}

TEST_CASE("default ruleset: victim scan and attacker activity") {
    auto rs = default_ruleset();
    const auto& scan = pat(rs, "victim.host.scan");
    CHECK(scan.source == LogSource::FIREWALL);
    CHECK(scan.predicates == std::vector<AttrPredicate>{AttrPredicate::eq("action", "OPEN-INBOUND"),
                                                        AttrPredicate::eq("protocol", "TCP"),
                                                        AttrPredicate::eq("dst_port", "445")});
    const auto& act = pat(rs, "attacker.net.activity_scanupnp");
    CHECK(act.host_binding == HostBinding::SRC_IP);
    CHECK(act.predicates == std::vector<AttrPredicate>{AttrPredicate::eq("alert_message", "SCANUPnP")});
}

TEST_CASE("default ruleset file matches the compiled copy") {
    auto text = wt_test::read_file(std::filesystem::path(WORMTRACE_SOURCE_DIR) / "rules" / "default.rules");
    CHECK(text == default_ruleset_text());
}

TEST_CASE("match_event") {
    auto rs = default_ruleset();
    auto in = firewall("192.112.112.200", "OPEN-INBOUND", "192.112.111.104", "192.112.112.200", 445);
    auto hit = match_event(pat(rs, "victim.host.scan"), in);
    REQUIRE(hit);
    CHECK(hit->ip() == "192.112.112.200");

    auto out = firewall("192.112.112.200", "OPEN", "192.112.112.200", "192.112.111.104", 445);
    CHECK_FALSE(match_event(pat(rs, "victim.host.scan"), out));
    CHECK(match_event(pat(rs, "attacker.host.scan"), out));

    auto a = alert("SCANUPnP", "192.112.111.104", "192.112.112.200", 5000);
    auto src = match_event(pat(rs, "attacker.net.alarm_source"), a);
    REQUIRE(src);
    CHECK(src->ip() == "192.112.111.104");
    CHECK(match_event(pat(rs, "attacker.net.activity_scanupnp"), a) == src);
    CHECK_FALSE(match_event(pat(rs, "victim.net.alarm_445"), a));

    auto x = alert("NETBIOS lsass exploit attempt", "192.112.111.104", "192.112.112.200", 445);
    auto dst = match_event(pat(rs, "victim.net.alarm_445"), x);
    REQUIRE(dst);
    CHECK(dst->ip() == "192.112.112.200");

    // wrong source log, missing attribute
    auto e = in;
    e.source = LogSource::SECURITY;
    CHECK_FALSE(match_event(pat(rs, "victim.host.scan"), e));
    e = in;
    e.attrs.erase("dst_port");
    CHECK_FALSE(match_event(pat(rs, "victim.host.scan"), e));
}

TEST_CASE("property: direction disjointness") {
    auto rs = default_ruleset();
    std::mt19937_64 rng(9);
    const char* actions[] = {"OPEN", "OPEN-INBOUND", "CLOSE", "DROP"};
    const int ports[] = {445, 9996, 5554, 3000, 3072, 3999, 80, 5000};
    for (int i = 0; i < 3000; ++i) {
        auto e = firewall("10.0.0.1", actions[rng() % 4], "10.0.0.1", "10.0.0.2",
                          ports[rng() % std::size(ports)]);
        for (const auto& v : rs.patterns()) {
            if (v.perspective != Perspective::VICTIM || !match_event(v, e)) continue;
            for (const auto& a : rs.patterns())
                if (a.perspective == Perspective::ATTACKER && a.source == LogSource::FIREWALL)
                    CHECK_FALSE(match_event(a, e));
        }
    }
}

TEST_CASE("build_evidence on scenario A") {
    auto g = generate_corpus(builtin_scenario(BuiltinScenario::A));
    auto ev = build_evidence(g.events, default_ruleset());
    const auto& roslan = ev.at(canonical_host("192.112.112.200"));
    CHECK(roslan.host.name() == std::optional<std::string>("Roslan"));
    for (auto c : {Category::SCAN, Category::EXPLOIT_BACKDOOR, Category::EXPLOIT_FTP, Category::EXPLOIT_TRANSFER})
        CHECK(roslan.category_found(Perspective::VICTIM, c));
    const auto& yusof = ev.at(canonical_host("192.112.111.102"));
    CHECK(yusof.category_found(Perspective::VICTIM, Category::SCAN));
    CHECK(yusof.category_found(Perspective::VICTIM, Category::EXPLOIT_BACKDOOR));
    CHECK_FALSE(yusof.category_found(Perspective::VICTIM, Category::EXPLOIT_TRANSFER));
    // every pattern has a cell
    for (const auto& [h, m] : ev) CHECK(m.cells.size() == default_ruleset().patterns().size());
    CHECK_FALSE(ev.count(kNullHost));
}

TEST_CASE("build_evidence on an empty corpus") {
    CHECK(build_evidence({}, default_ruleset()).empty());
}

TEST_CASE("property: witness soundness") {
    auto rs = default_ruleset();
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        auto g = generate_corpus(random_scenario(7, 12, seed));
        auto ev = build_evidence(g.events, rs);
        for (const auto& [h, m] : ev)
            for (const auto& [id, cell] : m.cells) {
                CHECK(cell.found() == !cell.witnesses.empty());
                CHECK(std::is_sorted(cell.witnesses.begin(), cell.witnesses.end()));
                for (auto w : cell.witnesses) {
                    REQUIRE(w < g.events.size());
                    CHECK(match_event(*rs.find(id), g.events[w]) == h);
                }
            }
    }
}

TEST_CASE("property: monotonicity") {
    auto rs = default_ruleset();
    std::mt19937_64 rng(21);
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        auto g = generate_corpus(random_scenario(6, 10, seed));
        std::vector<NormalizedEvent> subset;
        for (const auto& e : g.events)
            if (rng() % 3) subset.push_back(e);
        auto small = build_evidence(subset, rs);
        auto full = build_evidence(g.events, rs);
        for (const auto& [h, m] : small) {
            REQUIRE(full.count(h));
            for (const auto& [id, cell] : m.cells)
                if (cell.found()) CHECK(full.at(h).cells.at(id).found());
        }
    }
}

TEST_CASE("property: evidence is independent of file order") {
    auto rs = default_ruleset();
    std::mt19937_64 rng(4);
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        auto g = generate_corpus(random_scenario(9, 15, seed));
        auto files = g.files;
        std::shuffle(files.begin(), files.end(), rng);
        auto a = build_evidence(load_corpus(g.files).events, rs);
        auto b = build_evidence(load_corpus(files).events, rs);
        REQUIRE(a.size() == b.size());
        for (const auto& [h, m] : a)
            for (const auto& [id, cell] : m.cells) CHECK(b.at(h).cells.at(id).witnesses == cell.witnesses);
    }
}

TEST_CASE("property: ruleset text round trip") {
    auto rs = default_ruleset();
    auto text = format_ruleset(rs);
    auto again = parse_ruleset(text);
    CHECK(again == rs);
    CHECK(format_ruleset(again) == text);
}

}
