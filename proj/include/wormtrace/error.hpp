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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wormtrace {

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedIp : public Error {
public:
    explicit MalformedIp(const std::string& text)
        : Error("malformed IPv4 address: '" + text + "'") {}
};

class IoError : public Error {
public:
    explicit IoError(std::string path, const std::string& what = "cannot read file")
        : Error(what + ": " + path), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// Log-file parsing errors.
class ParseError : public Error {
public:
    using Error::Error;
};

class MissingHeader : public ParseError {
public:
    explicit MissingHeader(const std::string& what) : ParseError("missing header: " + what) {}
};

class InvalidHeader : public ParseError {
public:
    explicit InvalidHeader(const std::string& what) : ParseError("invalid header: " + what) {}
};

class UnknownLogKind : public ParseError {
public:
    explicit UnknownLogKind(const std::string& what) : ParseError("unknown log kind: " + what) {}
};

class MalformedLine : public ParseError {
public:
    MalformedLine(std::size_t line, const std::string& reason, const std::string& file = {})
        : ParseError((file.empty() ? "line " : file + ":") + std::to_string(line) + ": " + reason),
          line_(line), reason_(reason), file_(file) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }
    const std::string& file() const noexcept { return file_; }

private:
    std::size_t line_;
    std::string reason_;
    std::string file_;
};

// Ruleset errors.
class RuleError : public Error {
public:
    using Error::Error;
};

class DuplicateId : public RuleError {
public:
    explicit DuplicateId(const std::string& id) : RuleError("duplicate pattern id: " + id) {}
};

class UnknownKey : public RuleError {
public:
    explicit UnknownKey(const std::string& what) : RuleError("unknown key: " + what) {}
};

class BadPredicate : public RuleError {
public:
    explicit BadPredicate(const std::string& what) : RuleError("bad predicate: " + what) {}
};

class InvalidRuleSet : public RuleError {
public:
    explicit InvalidRuleSet(const std::string& what) : RuleError("invalid ruleset: " + what) {}
};

class MissingCategory : public Error {
public:
    explicit MissingCategory(std::string category, const std::string& context = {})
        : Error("ruleset lacks required category " + category + (context.empty() ? "" : " (" + context + ")")),
          category_(std::move(category)) {}
    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

// Scenario generator errors.
class InvalidSpec : public Error {
public:
    explicit InvalidSpec(const std::string& what) : Error("invalid scenario spec: " + what) {}
};

class InvalidParams : public Error {
public:
    explicit InvalidParams(const std::string& what) : Error("invalid parameters: " + what) {}
};

}  // namespace wormtrace
