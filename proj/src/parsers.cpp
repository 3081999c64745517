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

#include "wormtrace/parsers.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "wormtrace/error.hpp"

namespace wormtrace {

namespace {

struct Line {
    std::size_t number;  // 1-based
    std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::vector<Line> lines;
    std::size_t number = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back({++number, line});
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    return lines;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool is_blank(std::string_view s) { return trim(s).empty(); }

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        auto start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

unsigned to_uint(std::string_view s) {
    unsigned v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

struct HeaderBlock {
    LogHeader header;
    std::size_t data_start = 0;  // index into lines
};

HeaderBlock read_header(const std::vector<Line>& lines) {
    std::optional<std::string_view> log, host, year;
    std::size_t i = 0;
    for (; i < lines.size(); ++i) {
        auto text = lines[i].text;
        if (is_blank(text)) continue;
        if (text.front() != '#') break;
        auto colon = text.find(':');
        if (colon == std::string_view::npos) continue;  // plain comment
        auto key = trim(text.substr(1, colon - 1));
        auto value = trim(text.substr(colon + 1));
        std::optional<std::string_view>* slot = nullptr;
        if (key == "Log") slot = &log;
        else if (key == "Host") slot = &host;
        else if (key == "Year") slot = &year;
        else continue;
        if (*slot) throw InvalidHeader(fmt::format("duplicate #{} directive", key));
        *slot = value;
    }
    if (!log) throw MissingHeader("#Log");
    auto kind = log_source_from_header(*log);
    if (!kind) throw UnknownLogKind(std::string(*log));

    HeaderBlock block;
    block.header.kind = *kind;
    block.data_start = i;
    if (*kind == LogSource::IDS_ALERT) {
        if (host) throw InvalidHeader("ids logs must not carry #Host");
        if (!year) throw MissingHeader("#Year");
        if (year->size() != 4 || !all_digits(*year)) throw InvalidHeader(fmt::format("#Year: {}", *year));
        block.header.year = static_cast<int>(to_uint(*year));
    } else {
        if (!host) throw MissingHeader("#Host");
        if (year) throw InvalidHeader("#Year is only valid for ids logs");
        auto tokens = split_ws(*host);
        if (tokens.empty() || tokens.size() > 2) throw InvalidHeader(fmt::format("#Host: {}", *host));
        try {
            if (tokens.size() == 1)
                block.header.host = canonical_host(tokens[0]);
            else
                block.header.host = canonical_host(tokens[1], std::string(tokens[0]));
        } catch (const MalformedIp& e) {
            throw InvalidHeader(std::string("#Host: ") + e.what());
        }
    }
    return block;
}

// Fields of one data line; throws a bare reason string as MalformedLine.
[[noreturn]] void bad(const Line& line, const std::string& reason) { throw MalformedLine(line.number, reason); }

std::string canonical_ip_field(const Line& line, std::string_view text, std::string_view what) {
    auto a = parse_ipv4(text);
    if (!a) bad(line, fmt::format("bad {} '{}'", what, text));
    return format_ipv4(*a);
}

std::string port_field(const Line& line, std::string_view text, std::string_view what) {
    auto p = parse_port(text);
    if (!p) bad(line, fmt::format("bad {} '{}'", what, text));
    return std::to_string(*p);
}

NormalizedEvent parse_firewall_line(const Line& line, const LogHeader& h) {
    auto f = split_ws(line.text);
    if (f.size() != 8) bad(line, fmt::format("expected 8 fields, found {}", f.size()));
    auto date = std::string(f[0]) + " " + std::string(f[1]);
    auto ts = parse_iso_timestamp(date);
    if (!ts) bad(line, fmt::format("bad timestamp '{}'", date));
    NormalizedEvent e;
    e.host = *h.host;
    e.source = LogSource::FIREWALL;
    e.timestamp = *ts;
    e.attrs.emplace(attr::kAction, f[2]);
    e.attrs.emplace(attr::kProtocol, f[3]);
    e.attrs.emplace(attr::kSrcIp, canonical_ip_field(line, f[4], "source address"));
    e.attrs.emplace(attr::kDstIp, canonical_ip_field(line, f[5], "destination address"));
    e.attrs.emplace(attr::kSrcPort, port_field(line, f[6], "source port"));
    e.attrs.emplace(attr::kDstPort, port_field(line, f[7], "destination port"));
    return e;
}

// RFC-4180 field splitting for a single record.
std::optional<std::vector<std::string>> split_csv(std::string_view s) {
    std::vector<std::string> fields;
    std::size_t i = 0;
    while (true) {
        std::string field;
        if (i < s.size() && s[i] == '"') {
            ++i;
            while (true) {
                if (i >= s.size()) return std::nullopt;  // unterminated quote
                if (s[i] == '"') {
                    if (i + 1 < s.size() && s[i + 1] == '"') {
                        field += '"';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                field += s[i++];
            }
            if (i < s.size() && s[i] != ',') return std::nullopt;
        } else {
            auto comma = s.find(',', i);
            auto raw = s.substr(i, comma == std::string_view::npos ? std::string_view::npos : comma - i);
            if (raw.find('"') != std::string_view::npos) return std::nullopt;
            field = raw;
            i += raw.size();
        }
        fields.push_back(std::move(field));
        if (i >= s.size()) break;
        ++i;  // comma
    }
    return fields;
}

NormalizedEvent parse_event_line(const Line& line, const LogHeader& h) {
    auto fields = split_csv(line.text);
    if (!fields) bad(line, "bad CSV quoting");
    if (fields->size() != 4) bad(line, fmt::format("expected 4 CSV fields, found {}", fields->size()));
    auto& f = *fields;
    auto ts = parse_iso_timestamp(f[0]);
    if (!ts) bad(line, fmt::format("bad timestamp '{}'", f[0]));
    if (!all_digits(f[1]) || f[1].size() > 5) bad(line, fmt::format("bad event id '{}'", f[1]));
    NormalizedEvent e;
    e.host = *h.host;
    e.source = h.kind;
    e.timestamp = *ts;
    e.attrs.emplace(attr::kEventId, std::to_string(to_uint(f[1])));
    e.attrs.emplace(attr::kImageFileName, std::move(f[2]));
    e.attrs.emplace(attr::kEventMessage, std::move(f[3]));
    return e;
}

// `MM/DD-HH:MM:SS.uuuuuu`
std::optional<Timestamp> parse_ids_timestamp(std::string_view s, int year) {
    if (s.size() < 16 || s[2] != '/' || s[5] != '-' || s[8] != ':' || s[11] != ':' || s[14] != '.') return std::nullopt;
    auto micros = s.substr(15);
    if (micros.size() > 6 || !all_digits(micros)) return std::nullopt;
    for (std::size_t pos : {0u, 3u, 6u, 9u, 12u})
        if (!all_digits(s.substr(pos, 2))) return std::nullopt;
    return make_timestamp(year, to_uint(s.substr(0, 2)), to_uint(s.substr(3, 2)), to_uint(s.substr(6, 2)),
                          to_uint(s.substr(9, 2)), to_uint(s.substr(12, 2)));
}

void parse_endpoint(const Line& line, std::string_view text, NormalizedEvent& e, std::string_view ip_attr,
                    std::string_view port_attr) {
    auto colon = text.rfind(':');
    auto ip = text.substr(0, colon);
    e.attrs.emplace(ip_attr, canonical_ip_field(line, ip, "address"));
    if (colon != std::string_view::npos)
        e.attrs.emplace(port_attr, port_field(line, text.substr(colon + 1), "port"));
}

NormalizedEvent parse_ids_line(const Line& line, const LogHeader& h) {
    constexpr std::string_view kMarker = "[**]";
    auto text = trim(line.text);
    auto sp = text.find(' ');
    if (sp == std::string_view::npos) bad(line, "missing alert body");
    auto ts = parse_ids_timestamp(text.substr(0, sp), *h.year);
    if (!ts) bad(line, fmt::format("bad timestamp '{}'", text.substr(0, sp)));
    auto rest = trim(text.substr(sp));

    if (rest.substr(0, kMarker.size()) != kMarker) bad(line, "missing [**] marker");
    rest = trim(rest.substr(kMarker.size()));
    // [gid:sid:rev]
    if (rest.empty() || rest.front() != '[') bad(line, "missing signature id");
    auto close = rest.find(']');
    if (close == std::string_view::npos) bad(line, "unterminated signature id");
    rest = trim(rest.substr(close + 1));
    auto end_msg = rest.find(kMarker);
    if (end_msg == std::string_view::npos) bad(line, "missing closing [**] marker");
    auto message = trim(rest.substr(0, end_msg));
    if (message.empty()) bad(line, "empty alert message");
    rest = trim(rest.substr(end_msg + kMarker.size()));
    // Optional bracketed groups: [Classification: ...] [Priority: n]
    while (!rest.empty() && rest.front() == '[') {
        close = rest.find(']');
        if (close == std::string_view::npos) bad(line, "unterminated bracket");
        rest = trim(rest.substr(close + 1));
    }
    if (rest.empty() || rest.front() != '{') bad(line, "missing {protocol}");
    close = rest.find('}');
    if (close == std::string_view::npos) bad(line, "unterminated {protocol}");
    auto proto = rest.substr(1, close - 1);
    if (proto.empty()) bad(line, "empty protocol");
    rest = trim(rest.substr(close + 1));
    auto arrow = rest.find("->");
    if (arrow == std::string_view::npos) bad(line, "missing '->'");
    auto src = trim(rest.substr(0, arrow));
    auto dst = trim(rest.substr(arrow + 2));
    if (src.empty() || dst.empty() || src.find(' ') != std::string_view::npos ||
        dst.find(' ') != std::string_view::npos)
        bad(line, "bad endpoints");

    NormalizedEvent e;
    e.host = kNullHost;
    e.source = LogSource::IDS_ALERT;
    e.timestamp = *ts;
    e.attrs.emplace(attr::kAlertMessage, message);
    e.attrs.emplace(attr::kProtocol, proto);
    parse_endpoint(line, src, e, attr::kSrcIp, attr::kSrcPort);
    parse_endpoint(line, dst, e, attr::kDstIp, attr::kDstPort);
    return e;
}

using LineParser = NormalizedEvent (*)(const Line&, const LogHeader&);

ParseResult parse_data(std::string_view text, ParseMode mode, std::string_view label,
                       bool (*accepts)(LogSource), std::string_view family, LineParser parse_line) {
    auto lines = split_lines(text);
    auto block = read_header(lines);
    if (!accepts(block.header.kind))
        throw MissingHeader(fmt::format("#Log: expected {}, found {}", family, header_kind(block.header.kind)));

    ParseResult result;
    result.header = block.header;
    std::size_t seq = 0;
    for (auto i = block.data_start; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (is_blank(line.text) || line.text.front() == '#') continue;
        auto position = seq++;
        try {
            auto e = parse_line(line, block.header);
            e.seq = position;
            result.events.push_back(std::move(e));
        } catch (const MalformedLine& err) {
            if (mode == ParseMode::Strict) throw MalformedLine(err.line(), err.reason(), std::string(label));
            result.diagnostics.push_back({std::string(label), err.line(), err.reason()});
        }
    }
    return result;
}

std::string quote_csv(std::string_view s, bool always) {
    bool needs = always || s.find_first_of(",\"") != std::string_view::npos;
    if (!needs) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

const std::string& get(const NormalizedEvent& e, std::string_view name) {
    static const std::string empty;
    auto* v = e.find(name);
    return v ? *v : empty;
}

}  // namespace

LogHeader parse_header(std::string_view text) { return read_header(split_lines(text)).header; }

ParseResult parse_firewall_log(std::string_view text, ParseMode mode, std::string_view label) {
    return parse_data(
        text, mode, label, [](LogSource s) { return s == LogSource::FIREWALL; }, "firewall", parse_firewall_line);
}

ParseResult parse_event_log(std::string_view text, ParseMode mode, std::string_view label) {
    return parse_data(
        text, mode, label,
        [](LogSource s) { return s == LogSource::SECURITY || s == LogSource::SYSTEM || s == LogSource::APPLICATION; },
        "security|system|application", parse_event_line);
}

ParseResult parse_ids_alert_log(std::string_view text, ParseMode mode, std::string_view label) {
    return parse_data(
        text, mode, label, [](LogSource s) { return s == LogSource::IDS_ALERT; }, "ids", parse_ids_line);
}

ParseResult parse_log(std::string_view text, ParseMode mode, std::string_view label) {
    switch (parse_header(text).kind) {
        case LogSource::FIREWALL: return parse_firewall_log(text, mode, label);
        case LogSource::IDS_ALERT: return parse_ids_alert_log(text, mode, label);
        default: return parse_event_log(text, mode, label);
    }
}

Corpus load_corpus(const std::vector<CorpusFile>& files, ParseMode mode) {
    Corpus corpus;
    for (const auto& file : files) {
        ParseResult parsed;
        try {
            parsed = parse_log(file.text, mode, file.name);
        } catch (const MalformedLine&) {
            throw;
        } catch (const MissingHeader& e) {
            throw MissingHeader(file.name + ": " + e.what());
        } catch (const InvalidHeader& e) {
            throw InvalidHeader(file.name + ": " + e.what());
        } catch (const UnknownLogKind& e) {
            throw UnknownLogKind(file.name + ": " + e.what());
        }
        corpus.files.push_back({file.name, parsed.header.kind, parsed.header.host, parsed.events.size(),
                                parsed.diagnostics.size()});
        std::move(parsed.events.begin(), parsed.events.end(), std::back_inserter(corpus.events));
        std::move(parsed.diagnostics.begin(), parsed.diagnostics.end(), std::back_inserter(corpus.diagnostics));
    }
    sort_canonical(corpus.events);
    std::sort(corpus.diagnostics.begin(), corpus.diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.file, a.line, a.message) < std::tie(b.file, b.line, b.message);
    });
    std::sort(corpus.files.begin(), corpus.files.end(), [](const FileSummary& a, const FileSummary& b) {
        return std::tie(a.name, a.events, a.diagnostics) < std::tie(b.name, b.events, b.diagnostics);
    });
    return corpus;
}

Corpus load_corpus(const std::vector<std::filesystem::path>& paths, ParseMode mode) {
    std::vector<CorpusFile> files;
    files.reserve(paths.size());
    for (const auto& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError(path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        if (in.bad()) throw IoError(path.string());
        files.push_back({path.filename().string(), std::move(ss).str()});
    }
    return load_corpus(files, mode);
}

std::vector<std::filesystem::path> list_log_files(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::directory_iterator it(dir, ec);
    if (ec) throw IoError(dir.string(), "cannot list directory");
    std::vector<std::filesystem::path> out;
    for (const auto& entry : it)
        if (entry.is_regular_file() && entry.path().extension() == ".log") out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

std::string format_header(const LogHeader& h) {
    std::string out = fmt::format("#Log: {}\n", header_kind(h.kind));
    if (h.host) {
        if (h.host->name())
            out += fmt::format("#Host: {} {}\n", *h.host->name(), h.host->ip());
        else
            out += fmt::format("#Host: {}\n", h.host->ip());
    }
    if (h.year) out += fmt::format("#Year: {:04}\n", *h.year);
    return out;
}

std::string format_firewall_line(const NormalizedEvent& e) {
    auto [date, time] = format_date_time(e.timestamp);
    return fmt::format("{} {} {} {} {} {} {} {}", date, time, get(e, attr::kAction), get(e, attr::kProtocol),
                       get(e, attr::kSrcIp), get(e, attr::kDstIp), get(e, attr::kSrcPort), get(e, attr::kDstPort));
}

std::string format_event_log_line(const NormalizedEvent& e) {
    return fmt::format("{},{},{},{}", format_iso(e.timestamp), get(e, attr::kEventId),
                       quote_csv(get(e, attr::kImageFileName), false), quote_csv(get(e, attr::kEventMessage), true));
}

std::string format_ids_alert_line(const NormalizedEvent& e, std::uint32_t microseconds, std::string_view sig,
                                  int priority) {
    using namespace std::chrono;
    auto day = floor<days>(e.timestamp);
    year_month_day ymd{day};
    hh_mm_ss hms{e.timestamp - day};
    auto endpoint = [&](std::string_view ip, std::string_view port) {
        const auto& p = get(e, port);
        return p.empty() ? get(e, ip) : get(e, ip) + ":" + p;
    };
    return fmt::format("{:02}/{:02}-{:02}:{:02}:{:02}.{:06} [**] [{}] {} [**] [Priority: {}] {{{}}} {} -> {}",
                       unsigned(ymd.month()), unsigned(ymd.day()), hms.hours().count(), hms.minutes().count(),
                       hms.seconds().count(), microseconds % 1000000, sig, get(e, attr::kAlertMessage), priority,
                       get(e, attr::kProtocol), endpoint(attr::kSrcIp, attr::kSrcPort),
                       endpoint(attr::kDstIp, attr::kDstPort));
}

}  // namespace wormtrace
