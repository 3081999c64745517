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

#include "wormtrace/log_model.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

#include "wormtrace/error.hpp"

namespace wormtrace {

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

template <typename T>
std::optional<T> parse_unsigned(std::string_view s) {
    if (!all_digits(s)) return std::nullopt;
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

}  // namespace

std::optional<std::uint32_t> parse_ipv4(std::string_view ip) noexcept {
    std::uint32_t address = 0;
    int octets = 0;
    while (true) {
        auto dot = ip.find('.');
        auto part = ip.substr(0, dot);
        // Leading zeros are allowed, but bound the length so "0000000001" is rejected.
        if (part.size() > 3) return std::nullopt;
        auto value = parse_unsigned<unsigned>(part);
        if (!value || *value > 255) return std::nullopt;
        address = (address << 8) | *value;
        ++octets;
        if (dot == std::string_view::npos) break;
        ip.remove_prefix(dot + 1);
        if (octets == 4) return std::nullopt;
    }
    if (octets != 4) return std::nullopt;
    return address;
}

std::string format_ipv4(std::uint32_t a) {
    return fmt::format("{}.{}.{}.{}", (a >> 24) & 0xff, (a >> 16) & 0xff, (a >> 8) & 0xff, a & 0xff);
}

std::string HostId::ip() const { return format_ipv4(address_); }

HostId canonical_host(std::string_view ip, std::optional<std::string> name) {
    auto address = parse_ipv4(ip);
    if (!address) throw MalformedIp(std::string(ip));
    if (name && name->empty()) name.reset();
    return HostId(*address, std::move(name));
}

std::string_view to_string(LogSource s) noexcept {
    switch (s) {
        case LogSource::FIREWALL: return "FIREWALL";
        case LogSource::SECURITY: return "SECURITY";
        case LogSource::SYSTEM: return "SYSTEM";
        case LogSource::APPLICATION: return "APPLICATION";
        case LogSource::IDS_ALERT: return "IDS_ALERT";
    }
    return "?";
}

std::optional<LogSource> log_source_from_string(std::string_view s) noexcept {
    for (auto src : kAllLogSources)
        if (to_string(src) == s) return src;
    return std::nullopt;
}

std::string_view header_kind(LogSource s) noexcept {
    switch (s) {
        case LogSource::FIREWALL: return "firewall";
        case LogSource::SECURITY: return "security";
        case LogSource::SYSTEM: return "system";
        case LogSource::APPLICATION: return "application";
        case LogSource::IDS_ALERT: return "ids";
    }
    return "?";
}

std::optional<LogSource> log_source_from_header(std::string_view s) noexcept {
    for (auto src : kAllLogSources)
        if (header_kind(src) == s) return src;
    return std::nullopt;
}

bool is_recognized_attr(std::string_view name) noexcept {
    static constexpr std::array names{attr::kAction,   attr::kProtocol, attr::kSrcIp,         attr::kDstIp,
                                      attr::kSrcPort,  attr::kDstPort,  attr::kEventId,       attr::kImageFileName,
                                      attr::kEventMessage, attr::kAlertMessage};
    return std::find(names.begin(), names.end(), name) != names.end();
}

bool is_port_attr(std::string_view name) noexcept { return name == attr::kSrcPort || name == attr::kDstPort; }

std::optional<std::uint16_t> parse_port(std::string_view text) noexcept {
    if (text.size() > 5) return std::nullopt;
    auto v = parse_unsigned<unsigned>(text);
    if (!v || *v > 65535) return std::nullopt;
    return static_cast<std::uint16_t>(*v);
}

EventOrderKey event_order_key(const NormalizedEvent& e) noexcept {
    return {e.timestamp, source_rank(e.source), e.seq, e.host.address(), &e.attrs};
}

bool event_order_less(const NormalizedEvent& a, const NormalizedEvent& b) {
    return event_order_key(a) < event_order_key(b);
}

void sort_canonical(std::vector<NormalizedEvent>& events) {
    std::sort(events.begin(), events.end(), event_order_less);
}

std::optional<Timestamp> make_timestamp(int year, unsigned month, unsigned day, unsigned hour, unsigned minute,
                                        unsigned second) noexcept {
    using namespace std::chrono;
    year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok() || hour > 23 || minute > 59 || second > 59) return std::nullopt;
    return sys_days{ymd} + hours{hour} + minutes{minute} + seconds{second};
}

std::optional<Timestamp> parse_iso_timestamp(std::string_view s) noexcept {
    // YYYY-MM-DD?HH:MM:SS
    if (s.size() != 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
        s[16] != ':')
        return std::nullopt;
    auto y = parse_unsigned<int>(s.substr(0, 4));
    auto mo = parse_unsigned<unsigned>(s.substr(5, 2));
    auto d = parse_unsigned<unsigned>(s.substr(8, 2));
    auto h = parse_unsigned<unsigned>(s.substr(11, 2));
    auto mi = parse_unsigned<unsigned>(s.substr(14, 2));
    auto se = parse_unsigned<unsigned>(s.substr(17, 2));
    if (!y || !mo || !d || !h || !mi || !se) return std::nullopt;
    return make_timestamp(*y, *mo, *d, *h, *mi, *se);
}

std::pair<std::string, std::string> format_date_time(Timestamp t) {
    using namespace std::chrono;
    auto day = floor<days>(t);
    year_month_day ymd{day};
    hh_mm_ss hms{t - day};
    return {fmt::format("{:04}-{:02}-{:02}", int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day())),
            fmt::format("{:02}:{:02}:{:02}", hms.hours().count(), hms.minutes().count(), hms.seconds().count())};
}

std::string format_iso(Timestamp t) {
    auto [date, time] = format_date_time(t);
    return date + "T" + time;
}

}  // namespace wormtrace
