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

// Readers for the five on-disk log formats. Every file starts with a block
// of `#Key: value` directives:
//
//   #Log: firewall|security|system|application|ids
//   #Host: <name> <ip>        (host logs only; forbidden for ids)
//   #Year: <yyyy>             (ids only)
//
// Lines beginning with `#` after the header block are comments; blank lines
// are ignored. LF and CRLF line endings are both accepted.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wormtrace/log_model.hpp"

namespace wormtrace {

enum class ParseMode { Lenient, Strict };

struct Diagnostic {
    std::string file;
    std::size_t line = 0;
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Header directives of one log file.
struct LogHeader {
    LogSource kind = LogSource::FIREWALL;
    std::optional<HostId> host;
    std::optional<int> year;
};

struct LogFile {
    std::filesystem::path path;
    std::optional<HostId> declared_host;
    LogSource declared_kind = LogSource::FIREWALL;
};

struct ParseResult {
    LogHeader header;
    std::vector<NormalizedEvent> events;
    std::vector<Diagnostic> diagnostics;
};

/// Reads the header block. Throws MissingHeader, InvalidHeader or UnknownLogKind.
LogHeader parse_header(std::string_view text);

// The per-format parsers validate the `#Log:` kind and throw MissingHeader if
// it is absent or of the wrong family. A malformed data line becomes a
// Diagnostic in lenient mode and a MalformedLine exception in strict mode.
// `label` names the file in diagnostics.
ParseResult parse_firewall_log(std::string_view text, ParseMode mode = ParseMode::Lenient,
                               std::string_view label = {});
ParseResult parse_event_log(std::string_view text, ParseMode mode = ParseMode::Lenient,
                            std::string_view label = {});
ParseResult parse_ids_alert_log(std::string_view text, ParseMode mode = ParseMode::Lenient,
                                std::string_view label = {});
/// Dispatches on the `#Log:` header.
ParseResult parse_log(std::string_view text, ParseMode mode = ParseMode::Lenient, std::string_view label = {});

/// An in-memory log file.
struct CorpusFile {
    std::string name;
    std::string text;
};

struct FileSummary {
    std::string name;
    LogSource kind = LogSource::FIREWALL;
    std::optional<HostId> host;
    std::size_t events = 0;
    std::size_t diagnostics = 0;
};

struct Corpus {
    std::vector<NormalizedEvent> events;  // canonical order
    std::vector<Diagnostic> diagnostics;  // sorted by (file, line)
    std::vector<FileSummary> files;       // sorted by name
};

/// Parses every file and merges the events into canonical order. The result
/// does not depend on the order of `files`. Diagnostics name the file by its
/// base name.
Corpus load_corpus(const std::vector<std::filesystem::path>& paths, ParseMode mode = ParseMode::Lenient);
Corpus load_corpus(const std::vector<CorpusFile>& files, ParseMode mode = ParseMode::Lenient);

/// Regular files named `*.log` directly under `dir`, sorted.
std::vector<std::filesystem::path> list_log_files(const std::filesystem::path& dir);

// Line writers shared with the scenario generator; each returns one line
// without terminator.
std::string format_firewall_line(const NormalizedEvent& e);
std::string format_event_log_line(const NormalizedEvent& e);
std::string format_ids_alert_line(const NormalizedEvent& e, std::uint32_t microseconds, std::string_view sig,
                                  int priority);
std::string format_header(const LogHeader& h);

}  // namespace wormtrace
