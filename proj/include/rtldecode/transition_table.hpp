// Copyright 2026 The rtldecode Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "rtldecode/error.hpp"
#include "rtldecode/lex.hpp"

namespace rtldecode {

// Corpus-derived map from a syntactic token to the class of the token that
// usually follows it.
struct TransitionEntry {
  // Indexed by TokenClass.
  std::array<std::uint64_t, 3> counts{};

  std::uint64_t support() const { return counts[0] + counts[1] + counts[2]; }

  // Strictly greatest count wins; any tie yields Neutral.
  TokenClass majority() const {
    std::size_t best = 0;
    bool tied = false;
    for (std::size_t c = 1; c < counts.size(); ++c) {
      if (counts[c] > counts[best]) {
        best = c;
        tied = false;
      } else if (counts[c] == counts[best]) {
        tied = true;
      }
    }
    return tied ? TokenClass::Neutral : static_cast<TokenClass>(best);
  }

  friend bool operator==(const TransitionEntry&, const TransitionEntry&) = default;
};

class ClassTransitionTable {
 public:
  ClassTransitionTable() = default;
  explicit ClassTransitionTable(std::map<std::string, TransitionEntry> entries)
      : entries_(std::move(entries)) {}

  std::optional<TokenClass> lookup(std::string_view token_text) const {
    const auto it = entries_.find(std::string(detail::trim(token_text)));
    if (it == entries_.end()) return std::nullopt;
    return it->second.majority();
  }

  const std::map<std::string, TransitionEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json doc;
    doc["schema"] = "rtldecode.transition_table";
    doc["version"] = 1;
    auto& rows = doc["entries"] = nlohmann::ordered_json::array();
    for (const auto& [token, entry] : entries_) {
      nlohmann::ordered_json row;
      row["token"] = token;
      row["next_class"] = class_name(entry.majority());
      row["support"] = entry.support();
      row["structural"] = entry.counts[0];
      row["high_impact"] = entry.counts[1];
      row["neutral"] = entry.counts[2];
      rows.push_back(std::move(row));
    }
    return doc;
  }

  static ClassTransitionTable from_json(const nlohmann::json& doc) {
    try {
      if (doc.at("schema") != "rtldecode.transition_table" || doc.at("version") != 1) {
        throw Error(Errc::ParseError, "not a version 1 transition table");
      }
      std::map<std::string, TransitionEntry> entries;
      for (const auto& row : doc.at("entries")) {
        TransitionEntry e;
        e.counts = {row.at("structural").get<std::uint64_t>(),
                    row.at("high_impact").get<std::uint64_t>(),
                    row.at("neutral").get<std::uint64_t>()};
        entries.emplace(row.at("token").get<std::string>(), e);
      }
      return ClassTransitionTable(std::move(entries));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(Errc::ParseError, std::string("transition table: ") + ex.what());
    }
  }

  friend bool operator==(const ClassTransitionTable&, const ClassTransitionTable&) = default;

 private:
  std::map<std::string, TransitionEntry> entries_;
};

}  // namespace rtldecode
