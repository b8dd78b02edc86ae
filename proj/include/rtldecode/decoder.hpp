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

// Next-token selection: temperature softmax, the baseline strategies, the
// contrastive top-K re-ranker and syntax-aware temperature adaptation, all
// driven by decode().

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rtldecode/backend.hpp"
#include "rtldecode/error.hpp"
#include "rtldecode/lex.hpp"
#include "rtldecode/rng.hpp"
#include "rtldecode/transition_table.hpp"

namespace rtldecode {

using ProbabilityVector = std::vector<double>;

// p_i = exp(z_i / T) / sum_j exp(z_j / T), evaluated after subtracting the
// maximum scaled logit.
namespace detail {

// Neumaier-compensated sum; keeps the normalizer and the entropy accurate
// to a few ulps even for very large vocabularies.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

inline ProbabilityVector softmax_with_temperature(std::span<const double> logits,
                                                  double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(Errc::InvalidTemperature,
                "temperature must be positive, got " + std::to_string(temperature));
  }
  if (logits.empty()) throw Error(Errc::InvalidDistribution, "empty logit vector");
  double max_scaled = -std::numeric_limits<double>::infinity();
  for (const double z : logits) {
    if (!std::isfinite(z)) throw Error(Errc::InvalidDistribution, "non-finite logit");
    max_scaled = std::max(max_scaled, z / temperature);
  }
  ProbabilityVector p(logits.size());
  detail::CompensatedSum total;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] / temperature - max_scaled);
    total.add(p[i]);
  }
  const double z = total.value();
  for (double& x : p) x /= z;
  return p;
}

// Shannon entropy in nats, 0 ln 0 = 0.
inline double entropy(std::span<const double> p) {
  double total = 0.0;
  for (const double x : p) {
    if (!(x >= 0.0)) throw Error(Errc::InvalidDistribution, "negative or NaN probability");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw Error(Errc::InvalidDistribution, "probabilities sum to " + std::to_string(total));
  }
  detail::CompensatedSum h;
  for (const double x : p) {
    if (x > 0.0) h.add(-x * std::log(x));
  }
  return std::max(h.value(), 0.0);
}

namespace detail {

// Higher probability first, lower id on ties.
struct ByProbabilityDesc {
  std::span<const double> p;
  bool operator()(TokenId a, TokenId b) const {
    return p[a] != p[b] ? p[a] > p[b] : a < b;
  }
};

inline std::vector<TokenId> top_ids(std::span<const double> p, std::size_t k) {
  if (k == 0 || k > p.size()) {
    throw Error(Errc::InvalidK, "k=" + std::to_string(k) + " outside [1, " +
                                    std::to_string(p.size()) + "]");
  }
  const ByProbabilityDesc cmp{p};
  std::vector<TokenId> ids;
  if (k > 64) {
    ids.resize(p.size());
    std::iota(ids.begin(), ids.end(), TokenId{0});
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(), cmp);
    ids.resize(k);
    return ids;
  }
  // Bounded insertion: one pass, a sorted buffer of at most k ids.
  ids.reserve(k + 1);
  for (TokenId i = 0; i < p.size(); ++i) {
    if (ids.size() == k && !cmp(i, ids.back())) continue;
    ids.insert(std::upper_bound(ids.begin(), ids.end(), i, cmp), i);
    if (ids.size() > k) ids.pop_back();
  }
  return ids;
}

// Inverse-CDF draw over unnormalized weights.
inline std::size_t sample_index(std::span<const double> weights, double u) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double target = u * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (target < acc) return i;
  }
  return weights.size() - 1;
}

}  // namespace detail

struct Candidate {
  TokenId token = 0;
  double log_prob = 0.0;
  std::vector<double> unit_embedding;  // empty until re-ranked
  double similarity = 0.0;
  double score = 0.0;
};

struct CandidateSet {
  std::vector<Candidate> candidates;  // descending log_prob, ties by lower id
  std::vector<double> mean_embedding;
  std::size_t selected = 0;

  TokenId selected_token() const { return candidates.at(selected).token; }
};

inline CandidateSet top_k_candidates(std::span<const double> p, std::size_t k) {
  CandidateSet set;
  for (const TokenId id : detail::top_ids(p, k)) {
    set.candidates.push_back(Candidate{id, std::log(p[id]), {}, 0.0, 0.0});
  }
  return set;
}

// Normalizes each candidate embedding, takes the plain mean of the unit
// vectors (not re-normalized), scores every candidate as
// log_prob - lambda * dot(unit, mean) and selects the best score. Ties go to
// the earlier candidate, i.e. higher log_prob then lower id.
inline CandidateSet contrastive_rerank(CandidateSet set, double lambda,
                                       const EmbeddingTable& table) {
  if (!(lambda >= 0.0)) {
    throw Error(Errc::InvalidConfig, "lambda must be non-negative");
  }
  if (set.candidates.empty()) throw Error(Errc::InvalidK, "empty candidate set");
  const std::size_t dim = table.dim();
  set.mean_embedding.assign(dim, 0.0);
  for (auto& c : set.candidates) {
    const auto raw = table.row(c.token);
    double norm = 0.0;
    for (const double v : raw) norm += v * v;
    norm = std::sqrt(norm);
    c.unit_embedding.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) c.unit_embedding[d] = raw[d] / norm;
    for (std::size_t d = 0; d < dim; ++d) set.mean_embedding[d] += c.unit_embedding[d];
  }
  const double inv_k = 1.0 / static_cast<double>(set.candidates.size());
  for (double& m : set.mean_embedding) m *= inv_k;

  set.selected = 0;
  for (std::size_t i = 0; i < set.candidates.size(); ++i) {
    auto& c = set.candidates[i];
    c.similarity = 0.0;
    for (std::size_t d = 0; d < dim; ++d) c.similarity += c.unit_embedding[d] * set.mean_embedding[d];
    c.score = c.log_prob - lambda * c.similarity;
    if (c.score > set.candidates[set.selected].score) set.selected = i;
  }
  return set;
}

// Normalized exp(log_prob - lambda * similarity) over the re-ranked set.
// Diagnostics only; selection is the argmax of the scores.
inline std::vector<double> modified_probabilities(const CandidateSet& set, double lambda) {
  std::vector<double> out(set.candidates.size());
  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& c = set.candidates[i];
    out[i] = c.log_prob - lambda * c.similarity;
    max_score = std::max(max_score, out[i]);
  }
  double total = 0.0;
  for (double& x : out) {
    x = std::exp(x - max_score);
    total += x;
  }
  for (double& x : out) x /= total;
  return out;
}

// Renormalized probabilities of the candidates, in candidate order.
inline std::vector<double> candidate_probabilities(const CandidateSet& set) {
  std::vector<double> out(set.candidates.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(set.candidates[i].log_prob);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

inline TokenId greedy_select(std::span<const double> p) {
  if (p.empty()) throw Error(Errc::InvalidDistribution, "empty distribution");
  return detail::top_ids(p, 1).front();
}

// Draws one uniform from `rng`.
inline TokenId top_k_sample(std::span<const double> p, std::size_t k, Rng& rng) {
  const auto ids = detail::top_ids(p, k);
  std::vector<double> weights(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) weights[i] = p[ids[i]];
  return ids[detail::sample_index(weights, rng.uniform())];
}

// Smallest descending-probability prefix whose mass reaches p_threshold,
// within 1e-12 to absorb summation rounding.
inline std::vector<TokenId> nucleus_support(std::span<const double> p, double p_threshold) {
  if (!(p_threshold > 0.0 && p_threshold <= 1.0)) {
    throw Error(Errc::InvalidP, "nucleus threshold must lie in (0, 1]");
  }
  std::vector<TokenId> ids(p.size());
  std::iota(ids.begin(), ids.end(), TokenId{0});
  std::sort(ids.begin(), ids.end(), detail::ByProbabilityDesc{p});
  double acc = 0.0;
  std::size_t n = 0;
  while (n < ids.size()) {
    acc += p[ids[n++]];
    if (acc >= p_threshold - 1e-12) break;
  }
  ids.resize(n);
  return ids;
}

// Draws one uniform from `rng`.
inline TokenId nucleus_sample(std::span<const double> p, double p_threshold, Rng& rng) {
  const auto ids = nucleus_support(p, p_threshold);
  std::vector<double> weights(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) weights[i] = p[ids[i]];
  return ids[detail::sample_index(weights, rng.uniform())];
}

// ---------------------------------------------------------------------------
// Temperature adaptation
// ---------------------------------------------------------------------------

// The class of the next token is proxied by the class of the last one.
struct SelfClass {};

// Majority class observed after the last token in a corpus; falls back to
// SelfClass for tokens the table does not know.
struct TransitionPolicy {
  std::shared_ptr<const ClassTransitionTable> table;
};

using ClassPolicy = std::variant<SelfClass, TransitionPolicy>;

inline TokenClass predict_next_class(std::optional<TokenId> last, const Vocabulary& vocab,
                                     const ClassPolicy& policy,
                                     const Lexicon& lexicon = Lexicon::builtin()) {
  if (!last) return TokenClass::Neutral;
  const auto& text = vocab.text(*last);
  if (const auto* tp = std::get_if<TransitionPolicy>(&policy); tp && tp->table) {
    if (auto cls = tp->table->lookup(text)) return *cls;
  }
  return lexicon.classify(text);
}

namespace detail {

// Rounds to 15 significant digits, so 0.7 + 0.1 gives the double nearest
// 0.8 rather than 0.7999999999999999.
inline double snap_decimal(double v) {
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 15).ptr;
  double out = v;
  std::from_chars(buf, end, out);
  return out;
}

}  // namespace detail

inline double adapt_temperature(TokenClass predicted, double base, double delta) {
  double t = base;
  if (predicted == TokenClass::Structural) t = detail::snap_decimal(base - delta);
  else if (predicted == TokenClass::HighImpact) t = detail::snap_decimal(base + delta);
  if (!(t > 0.0)) {
    throw Error(Errc::InvalidTemperature, "adapted temperature " + std::to_string(t) + " is not positive");
  }
  return t;
}

// ---------------------------------------------------------------------------
// Decoding loop
// ---------------------------------------------------------------------------

struct Greedy {};
struct TopK {
  std::size_t k = 10;
};
struct Nucleus {
  double p = 0.9;
};
struct Contrastive {
  std::size_t k = 5;
  double lambda = 0.5;
};

using Strategy = std::variant<Greedy, TopK, Nucleus, Contrastive>;

struct DecodeConfig {
  Strategy strategy = Greedy{};
  bool adaptive_temperature = false;
  double base_temperature = 0.7;
  double temperature_delta = 0.1;
  std::size_t max_tokens = 256;
  std::uint64_t seed = 0;
  ClassPolicy class_policy = SelfClass{};
  std::shared_ptr<const Lexicon> lexicon;  // null means the builtin lexicon
  bool stop_at_eos = true;

  const Lexicon& active_lexicon() const { return lexicon ? *lexicon : Lexicon::builtin(); }

  void validate(std::size_t vocab_size) const {
    auto fail = [](const std::string& msg) { throw Error(Errc::InvalidConfig, msg); };
    if (!(base_temperature > 0.0) || !std::isfinite(base_temperature)) fail("base temperature must be positive");
    if (!(temperature_delta >= 0.0) || !std::isfinite(temperature_delta)) fail("temperature delta must be non-negative");
    if (adaptive_temperature && !(base_temperature - temperature_delta > 0.0)) {
      fail("base temperature minus delta must stay positive");
    }
    if (max_tokens == 0) fail("max_tokens must be positive");
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, TopK> || std::is_same_v<S, Contrastive>) {
            if (s.k == 0 || s.k > vocab_size) fail("k must lie in [1, |V|]");
          }
          if constexpr (std::is_same_v<S, Contrastive>) {
            if (!(s.lambda >= 0.0) || !std::isfinite(s.lambda)) fail("lambda must be non-negative");
          }
          if constexpr (std::is_same_v<S, Nucleus>) {
            if (!(s.p > 0.0 && s.p <= 1.0)) fail("nucleus p must lie in (0, 1]");
          }
        },
        strategy);
  }
};

// Short name: base = top-k, ta = top-k with
// adaptive temperature, c = contrastive, c+ta = contrastive with adaptive
// temperature.
inline std::string strategy_label(const DecodeConfig& config) {
  std::string name = std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Greedy>) return "greedy";
        else if constexpr (std::is_same_v<S, TopK>) return "base";
        else if constexpr (std::is_same_v<S, Nucleus>) return "nucleus";
        else return "c";
      },
      config.strategy);
  if (!config.adaptive_temperature) return name;
  return name == "base" ? "ta" : name + "+ta";
}

struct StepRecord {
  std::size_t step = 0;
  double temperature = 0.0;
  double entropy = 0.0;  // full-vocabulary distribution, nats
  std::optional<CandidateSet> candidates;
  std::optional<double> candidate_entropy;  // renormalized top-K
  std::optional<double> modified_entropy;   // p_modified over top-K
  TokenId token = 0;
  TokenClass predicted_next_class = TokenClass::Neutral;
  double seconds = 0.0;
};

struct DecodeResult {
  std::vector<TokenId> tokens;  // generated ids, eos excluded
  std::vector<StepRecord> steps;
  bool hit_eos = false;
  bool max_tokens_reached = false;
  double seconds = 0.0;
};

// Runs one generation. Sampling strategies consume exactly one uniform per
// step from a stream seeded with config.seed; greedy and contrastive
// selection never touch it.
inline DecodeResult decode(const Backend& backend, const DecodeConfig& config,
                           std::span<const TokenId> prompt) {
  const auto& vocab = backend.vocabulary();
  config.validate(vocab.size());
  for (const TokenId id : prompt) vocab.check(id);

  auto session = backend.open_session();
  Rng rng(config.seed);
  std::vector<TokenId> context(prompt.begin(), prompt.end());
  DecodeResult result;
  double temperature = config.base_temperature;
  const auto start = std::chrono::steady_clock::now();

  for (std::size_t t = 0; t < config.max_tokens; ++t) {
    const auto step_start = std::chrono::steady_clock::now();
    StepRecord rec;
    rec.step = t;
    rec.temperature = config.adaptive_temperature ? temperature : config.base_temperature;

    const auto logits = session->next_logits(context);
    if (logits.size() != vocab.size()) {
      throw Error(Errc::BackendUnavailable, "backend returned " + std::to_string(logits.size()) +
                                                " logits for |V|=" + std::to_string(vocab.size()));
    }
    const auto p = softmax_with_temperature(logits, rec.temperature);
    rec.entropy = entropy(p);

    rec.token = std::visit(
        [&](const auto& s) -> TokenId {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Greedy>) {
            return greedy_select(p);
          } else if constexpr (std::is_same_v<S, TopK>) {
            return top_k_sample(p, s.k, rng);
          } else if constexpr (std::is_same_v<S, Nucleus>) {
            return nucleus_sample(p, s.p, rng);
          } else {
            auto set = contrastive_rerank(top_k_candidates(p, s.k), s.lambda, backend.embeddings());
            rec.candidate_entropy = entropy(candidate_probabilities(set));
            rec.modified_entropy = entropy(modified_probabilities(set, s.lambda));
            const TokenId chosen = set.selected_token();
            rec.candidates = std::move(set);
            return chosen;
          }
        },
        config.strategy);

    if (config.adaptive_temperature) {
      rec.predicted_next_class =
          predict_next_class(rec.token, vocab, config.class_policy, config.active_lexicon());
      temperature = adapt_temperature(rec.predicted_next_class, config.base_temperature,
                                      config.temperature_delta);
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - step_start).count();
    result.steps.push_back(std::move(rec));

    const TokenId chosen = result.steps.back().token;
    if (config.stop_at_eos && backend.eos() && chosen == *backend.eos()) {
      result.hit_eos = true;
      break;
    }
    result.tokens.push_back(chosen);
    context.push_back(chosen);
  }
  result.max_tokens_reached = !result.hit_eos;
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace rtldecode
