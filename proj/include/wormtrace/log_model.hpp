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

// Unified event representation shared by the parsers, the pattern engine and
// the scenario generator.

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace wormtrace {

using Timestamp = std::chrono::sys_seconds;

/// A host identified by its IPv4 address. The name is decorative: equality
/// and ordering look at the address only, ordering is numeric.
class HostId {
public:
    HostId() = default;
    HostId(std::uint32_t address, std::optional<std::string> name = std::nullopt)
        : address_(address), name_(std::move(name)) {}

    std::uint32_t address() const noexcept { return address_; }
    std::string ip() const;
    const std::optional<std::string>& name() const noexcept { return name_; }
    /// Name if known, otherwise the dotted quad.
    std::string label() const { return name_ ? *name_ : ip(); }

    HostId with_name(std::optional<std::string> name) const { return HostId(address_, std::move(name)); }

    friend bool operator==(const HostId& a, const HostId& b) noexcept { return a.address_ == b.address_; }
    friend std::strong_ordering operator<=>(const HostId& a, const HostId& b) noexcept {
        return a.address_ <=> b.address_;
    }

private:
    std::uint32_t address_ = 0;
    std::optional<std::string> name_;
};

/// Owner of IDS alerts, which carry no recording host.
inline const HostId kNullHost{0};

/// Parses a dotted quad, stripping leading zeros per octet. Throws MalformedIp.
HostId canonical_host(std::string_view ip, std::optional<std::string> name = std::nullopt);
/// Non-throwing variant of the address part of canonical_host.
std::optional<std::uint32_t> parse_ipv4(std::string_view ip) noexcept;
std::string format_ipv4(std::uint32_t address);

enum class LogSource { FIREWALL, SECURITY, SYSTEM, APPLICATION, IDS_ALERT };

inline constexpr std::array kAllLogSources{LogSource::FIREWALL, LogSource::SECURITY, LogSource::SYSTEM,
                                           LogSource::APPLICATION, LogSource::IDS_ALERT};

/// Rank used by the canonical order; matches enumerator order.
constexpr int source_rank(LogSource s) noexcept { return static_cast<int>(s); }
std::string_view to_string(LogSource s) noexcept;
std::optional<LogSource> log_source_from_string(std::string_view s) noexcept;
/// Value of the `#Log:` header directive for a source (firewall, security, ..., ids).
std::string_view header_kind(LogSource s) noexcept;
std::optional<LogSource> log_source_from_header(std::string_view s) noexcept;

namespace attr {
inline constexpr std::string_view kAction = "action";
inline constexpr std::string_view kProtocol = "protocol";
inline constexpr std::string_view kSrcIp = "src_ip";
inline constexpr std::string_view kDstIp = "dst_ip";
inline constexpr std::string_view kSrcPort = "src_port";
inline constexpr std::string_view kDstPort = "dst_port";
inline constexpr std::string_view kEventId = "event_id";
inline constexpr std::string_view kImageFileName = "image_file_name";
inline constexpr std::string_view kEventMessage = "event_message";
inline constexpr std::string_view kAlertMessage = "alert_message";
}  // namespace attr

bool is_recognized_attr(std::string_view name) noexcept;
bool is_port_attr(std::string_view name) noexcept;
/// Decimal string in [0, 65535] without sign or whitespace.
std::optional<std::uint16_t> parse_port(std::string_view text) noexcept;

using AttrMap = std::map<std::string, std::string, std::less<>>;

struct NormalizedEvent {
    HostId host;
    LogSource source = LogSource::FIREWALL;
    Timestamp timestamp{};
    std::size_t seq = 0;
    AttrMap attrs;

    const std::string* find(std::string_view name) const {
        auto it = attrs.find(name);
        return it == attrs.end() ? nullptr : &it->second;
    }

    friend bool operator==(const NormalizedEvent& a, const NormalizedEvent& b) {
        return a.host == b.host && a.host.name() == b.host.name() && a.source == b.source &&
               a.timestamp == b.timestamp && a.seq == b.seq && a.attrs == b.attrs;
    }
};

/// Index of an event within a canonically ordered corpus.
using EventRef = std::size_t;

/// Canonical ordering key: timestamp, then source rank, then seq. Host address
/// and the attribute map break the remaining ties so the order is total.
struct EventOrderKey {
    Timestamp timestamp;
    int source_rank;
    std::size_t seq;
    std::uint32_t host;
    const AttrMap* attrs;

    friend bool operator<(const EventOrderKey& a, const EventOrderKey& b) {
        return std::tie(a.timestamp, a.source_rank, a.seq, a.host, *a.attrs) <
               std::tie(b.timestamp, b.source_rank, b.seq, b.host, *b.attrs);
    }
};

EventOrderKey event_order_key(const NormalizedEvent& e) noexcept;
bool event_order_less(const NormalizedEvent& a, const NormalizedEvent& b);
void sort_canonical(std::vector<NormalizedEvent>& events);

// Timestamps: ISO-8601 with seconds precision, one implied timezone.

/// Builds a timestamp, returning nothing when any field is out of range.
std::optional<Timestamp> make_timestamp(int year, unsigned month, unsigned day, unsigned hour, unsigned minute,
                                        unsigned second) noexcept;
/// Accepts `YYYY-MM-DDTHH:MM:SS` or `YYYY-MM-DD HH:MM:SS`.
std::optional<Timestamp> parse_iso_timestamp(std::string_view text) noexcept;
/// `YYYY-MM-DDTHH:MM:SS`
std::string format_iso(Timestamp t);
/// Separate date and time strings, as written by the firewall log.
std::pair<std::string, std::string> format_date_time(Timestamp t);

}  // namespace wormtrace
