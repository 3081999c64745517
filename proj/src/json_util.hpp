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

#include "json.hpp"

#include "wormtrace/chain_builder.hpp"

namespace wormtrace::detail {

inline nlohmann::json level_to_json(const Level& l) {
    switch (l.kind) {
        case Level::Kind::Depth: return l.depth;
        case Level::Kind::Leaf: return "LEAF";
        case Level::Kind::Unassigned: break;
    }
    return nullptr;
}

inline Level level_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Level::at(j.get<int>());
    if (j.is_string() && j.get<std::string>() == "LEAF") return Level::leaf();
    return Level::unassigned();
}

}  // namespace wormtrace::detail
