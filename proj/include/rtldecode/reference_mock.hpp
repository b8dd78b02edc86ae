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

// The reference mock model used by the benchmarks, the acceptance suite and
// `rtldecode make-mock`.
//
// Layout (|V| = 2048, dim = 32):
//   0          <eos>
//   1..8       cluster: identifier fragments with near-identical embeddings
//   9..16      distinct structural tokens, one partner per cluster token
//   17..30     high-impact operators
//   31..42     Verilog keywords
//   43..       filler identifiers
//
// After cluster token j the four cluster tokens j..j+3 lead, with partner
// structural token j just behind them. After a structural token the model is
// confident: one cluster token dominates. Every other token falls back to a
// nearly flat default row. Contrastive re-ranking therefore alternates
// between the cluster and the partner tokens, top-k mostly stays inside the
// cluster, and nucleus sampling reaches the flat tail most often.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rtldecode/backend.hpp"
#include "rtldecode/rng.hpp"

namespace rtldecode {

struct ReferenceMockLayout {
  static constexpr std::size_t kVocab = 2048;
  static constexpr std::size_t kDim = 32;
  static constexpr TokenId kEos = 0;
  static constexpr TokenId kClusterBegin = 1;
  static constexpr TokenId kDistinctBegin = 9;
  static constexpr TokenId kOperatorBegin = 17;
  static constexpr TokenId kKeywordBegin = 31;
  static constexpr TokenId kFillerBegin = 43;
  static constexpr std::size_t kGroup = 8;
};

namespace detail {

// Uniform in [-1, 1), a pure function of its arguments.
inline double fixture_noise(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t h = mix64(mix64(seed ^ mix64(a)) ^ b);
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace detail

inline MockModelSpec reference_mock_spec(std::uint64_t seed = 2025) {
  using L = ReferenceMockLayout;
  MockModelSpec spec;
  spec.tokens = {"<eos>"};
  for (const char* s : {" data", " data_q", " data_r", " data_n", " data_i", " data_o", " data_d", " data_s"}) {
    spec.tokens.emplace_back(s);
  }
  for (const char* s : {";\n", " begin", " end\n", "(", ")", ",", " always", " assign"}) spec.tokens.emplace_back(s);
  for (const char* s : {" =", " <=", " +", " -", " &", " |", " ^", " ~", " ==", " !=", " ?", " :", " &&", " ||"}) {
    spec.tokens.emplace_back(s);
  }
  for (const char* s : {" module", " endmodule\n", " input", " output", " wire", " reg", " if", " else", " posedge",
                        " negedge", " case", " default"}) {
    spec.tokens.emplace_back(s);
  }
  for (std::size_t i = spec.tokens.size(); i < L::kVocab; ++i) spec.tokens.push_back(" w" + std::to_string(i));

  spec.dim = L::kDim;
  spec.embeddings.resize(L::kVocab * L::kDim);
  std::vector<double> shared(L::kDim);
  double shared_norm2 = 0.0;
  for (std::size_t d = 0; d < L::kDim; ++d) {
    shared[d] = detail::fixture_noise(seed, 1, d);
    shared_norm2 += shared[d] * shared[d];
  }
  for (std::size_t t = 0; t < L::kVocab; ++t) {
    const bool cluster = t >= L::kClusterBegin && t < L::kClusterBegin + L::kGroup;
    const bool distinct = t >= L::kDistinctBegin && t < L::kDistinctBegin + L::kGroup;
    double* row = &spec.embeddings[t * L::kDim];
    for (std::size_t d = 0; d < L::kDim; ++d) {
      const double own = detail::fixture_noise(seed, 2 + t, d);
      row[d] = cluster ? shared[d] + 0.05 * own : own;
    }
    if (distinct) {
      // Orthogonal to the cluster direction.
      double proj = 0.0;
      for (std::size_t d = 0; d < L::kDim; ++d) proj += row[d] * shared[d];
      for (std::size_t d = 0; d < L::kDim; ++d) row[d] -= proj / shared_norm2 * shared[d];
    }
  }
  spec.eos = L::kEos;
  spec.rule = MockModelSpec::Rule::NGram;

  auto base_row = [&](std::uint64_t row_key, double tail, double tail_jitter) {
    LogitVector row(L::kVocab);
    for (std::size_t t = 0; t < L::kVocab; ++t) row[t] = tail + tail_jitter * detail::fixture_noise(seed, 10000 + row_key, t);
    return row;
  };

  // Flat default row: cluster slightly favoured, eos unlikely.
  {
    auto row = base_row(0, 0.0, 0.3);
    for (std::size_t j = 0; j < L::kGroup; ++j) row[L::kClusterBegin + j] = 1.0;
    row[L::kEos] = -4.0;
    spec.default_row = std::move(row);
  }
  for (std::size_t j = 0; j < L::kGroup; ++j) {
    // After cluster token j.
    auto row = base_row(1 + j, -2.0, 0.3);
    for (std::size_t m = 0; m < L::kGroup; ++m) {
      const bool leading = ((m + L::kGroup - j) % L::kGroup) < 4;
      row[L::kClusterBegin + m] = (leading ? 3.0 : 1.5) + 0.02 * detail::fixture_noise(seed, 20000 + j, m);
    }
    row[L::kDistinctBegin + j] = 2.9;
    for (std::size_t o = 0; o < 14; ++o) row[L::kOperatorBegin + o] = 0.5;
    row[L::kEos] = -6.0;
    spec.ngrams[{static_cast<TokenId>(L::kClusterBegin + j)}] = std::move(row);
  }
  for (std::size_t j = 0; j < L::kGroup; ++j) {
    // After structural token j: confident.
    auto row = base_row(100 + j, -2.0, 0.3);
    for (std::size_t m = 0; m < L::kGroup; ++m) row[L::kClusterBegin + m] = 1.0;
    row[L::kClusterBegin + (j + 5) % L::kGroup] = 6.0;
    for (std::size_t o = 0; o < 14; ++o) row[L::kOperatorBegin + o] = 0.5;
    row[L::kEos] = -6.0;
    spec.ngrams[{static_cast<TokenId>(L::kDistinctBegin + j)}] = std::move(row);
  }
  return spec;
}

// Prompt i ends in a filler token for even i and in a cluster token for odd
// i.
inline std::vector<TokenId> reference_prompt(std::size_t i) {
  using L = ReferenceMockLayout;
  const auto filler = static_cast<TokenId>(L::kFillerBegin + 17 * i % (L::kVocab - L::kFillerBegin));
  const auto cluster = static_cast<TokenId>(L::kClusterBegin + i % L::kGroup);
  if (i % 2 == 0) return {cluster, filler};
  return {filler, cluster};
}

}  // namespace rtldecode
