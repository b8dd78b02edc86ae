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

// Line-delimited JSON traces of decoding steps.
//
// A trace file holds one or more traces. Each trace starts with a header
// record {"schema":"rtldecode.trace","version":1,...} followed by one record
// per step. Wall-clock fields are written only when requested so that traces
// of deterministic runs compare byte for byte.

#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtldecode/backend.hpp"
#include "rtldecode/decoder.hpp"
#include "rtldecode/error.hpp"

namespace rtldecode {

inline constexpr int kTraceVersion = 1;

struct TraceHeader {
  std::string prompt_id;
  std::string strategy;
  std::size_t vocab_size = 0;
  std::uint64_t seed = 0;
};

namespace detail {

// JSON has no infinities; log(0) candidates are written as null.
inline nlohmann::ordered_json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace detail

inline void write_trace(std::ostream& out, const TraceHeader& header, const DecodeResult& result,
                        const Vocabulary& vocab, bool include_timing = false) {
  nlohmann::ordered_json head;
  head["schema"] = "rtldecode.trace";
  head["version"] = kTraceVersion;
  head["prompt_id"] = header.prompt_id;
  head["strategy"] = header.strategy;
  head["vocab_size"] = header.vocab_size;
  head["seed"] = header.seed;
  head["steps"] = result.steps.size();
  head["hit_eos"] = result.hit_eos;
  out << head.dump() << '\n';

  for (const auto& rec : result.steps) {
    nlohmann::ordered_json j;
    j["step"] = rec.step;
    j["temperature"] = rec.temperature;
    j["entropy"] = rec.entropy;
    j["token"] = rec.token;
    j["text"] = vocab.text(rec.token);
    j["next_class"] = class_name(rec.predicted_next_class);
    if (rec.candidates) {
      auto& cands = j["candidates"] = nlohmann::ordered_json::array();
      for (const auto& c : rec.candidates->candidates) {
        nlohmann::ordered_json cj;
        cj["token"] = c.token;
        cj["log_prob"] = detail::finite_or_null(c.log_prob);
        cj["similarity"] = c.similarity;
        cj["score"] = detail::finite_or_null(c.score);
        cands.push_back(std::move(cj));
      }
      j["selected"] = rec.candidates->selected;
    }
    if (rec.candidate_entropy) j["candidate_entropy"] = *rec.candidate_entropy;
    if (rec.modified_entropy) j["modified_entropy"] = *rec.modified_entropy;
    if (include_timing) j["seconds"] = rec.seconds;
    out << j.dump() << '\n';
  }
}

// The entropy-relevant content of one trace.
struct EntropyTrace {
  std::string prompt_id;
  std::string strategy;
  std::size_t vocab_size = 0;
  std::vector<double> entropies;
  std::vector<double> temperatures;
};

inline std::vector<EntropyTrace> read_traces(std::istream& in) {
  std::vector<EntropyTrace> traces;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      if (j.contains("schema")) {
        if (j.at("schema") != "rtldecode.trace") {
          throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": not a trace file");
        }
        if (j.at("version") != kTraceVersion) {
          throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": unsupported trace version");
        }
        EntropyTrace t;
        t.prompt_id = j.at("prompt_id").get<std::string>();
        t.strategy = j.at("strategy").get<std::string>();
        t.vocab_size = j.at("vocab_size").get<std::size_t>();
        traces.push_back(std::move(t));
        continue;
      }
      if (traces.empty()) {
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": step record before header");
      }
      traces.back().entropies.push_back(j.at("entropy").get<double>());
      traces.back().temperatures.push_back(j.at("temperature").get<double>());
    } catch (const nlohmann::json::exception& ex) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return traces;
}

}  // namespace rtldecode
