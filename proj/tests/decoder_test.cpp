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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rtldecode/decoder.hpp"
#include "rtldecode/reference_mock.hpp"
#include "test_support.hpp"

namespace rtldecode {
namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::IoError;
}

// ---- oracles ---------------------------------------------------------------

std::vector<double> naive_softmax(const std::vector<double>& z, double t) {
  double m = z[0];
  for (double x : z) m = std::max(m, x);
  std::vector<double> p;
  double s = 0;
  for (double x : z) s += std::exp((x - m) / t);
  for (double x : z) p.push_back(std::exp((x - m) / t) / s);
  return p;
}

std::vector<TokenId> sorted_ids(const std::vector<double>& p) {
  std::vector<TokenId> ids(p.size());
  for (TokenId i = 0; i < ids.size(); ++i) ids[i] = i;
  std::stable_sort(ids.begin(), ids.end(), [&](TokenId a, TokenId b) { return p[a] > p[b]; });
  return ids;
}

TokenId naive_inverse_cdf(const std::vector<double>& p, const std::vector<TokenId>& support, double u) {
  double total = 0;
  for (auto id : support) total += p[id];
  double acc = 0;
  for (auto id : support) {
    acc += p[id];
    if (u * total < acc) return id;
  }
  return support.back();
}

// ---- softmax and entropy -----------------------------------------------------

TEST(Softmax, Examples) {
  EXPECT_EQ(softmax_with_temperature(std::vector<double>{1.0, 1.0}, 1.0), (std::vector<double>{0.5, 0.5}));
  const auto p = softmax_with_temperature(std::vector<double>{2.0, 0.0}, 2.0);
  EXPECT_NEAR(p[0], 0.7310585786300049, 1e-15);
  EXPECT_NEAR(p[1], 0.2689414213699951, 1e-15);
  const auto sharp = softmax_with_temperature(std::vector<double>{5, 0, 0}, 0.01);
  EXPECT_GT(sharp[0], 0.999);
}

TEST(Softmax, Errors) {
  EXPECT_EQ(code_of([] { softmax_with_temperature(std::vector<double>{1, 2}, 0.0); }), Errc::InvalidTemperature);
  EXPECT_EQ(code_of([] { softmax_with_temperature(std::vector<double>{1, 2}, -1.0); }), Errc::InvalidTemperature);
  EXPECT_EQ(code_of([] { softmax_with_temperature(std::vector<double>{1, INFINITY}, 1.0); }),
            Errc::InvalidDistribution);
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}), 1.3862943611198906, 1e-15);
  EXPECT_EQ(entropy(std::vector<double>{0, 1, 0}), 0.0);
  EXPECT_NEAR(entropy(std::vector<double>{0.5, 0.25, 0.25}), 1.0397207708399179, 1e-15);
  EXPECT_EQ(code_of([] { entropy(std::vector<double>{-0.1, 1.1}); }), Errc::InvalidDistribution);
  EXPECT_EQ(code_of([] { entropy(std::vector<double>{0.5, 0.4}); }), Errc::InvalidDistribution);
}

TEST(SoftmaxProperty, SumsToOneAndMatchesOracle) {
  Rng rng(1);
  for (int iter = 0; iter < 500; ++iter) {
    const auto z = testing::random_logits(rng, testing::uniform_int(rng, 1, 50), 20.0);
    const double t = testing::uniform(rng, 0.05, 3.0);
    const auto p = softmax_with_temperature(z, t);
    const auto q = naive_softmax(z, t);
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      ASSERT_GT(p[i], 0.0);
      ASSERT_NEAR(p[i], q[i], 1e-12);
      s += p[i];
    }
    ASSERT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(SoftmaxProperty, EntropyMonotoneInTemperature) {
  Rng rng(2);
  for (int iter = 0; iter < 100; ++iter) {
    const auto z = testing::random_logits(rng, testing::uniform_int(rng, 2, 64));
    double prev = -1.0;
    for (int i = 1; i <= 20; ++i) {
      const double h = entropy(softmax_with_temperature(z, 0.1 * i));
      ASSERT_GE(h, prev - 1e-9);
      ASSERT_LE(h, std::log(static_cast<double>(z.size())) + 1e-12);
      prev = h;
    }
  }
}

TEST(SoftmaxProperty, ShiftInvariance) {
  Rng rng(3);
  for (int iter = 0; iter < 200; ++iter) {
    auto z = testing::random_logits(rng, testing::uniform_int(rng, 2, 32));
    const double t = testing::uniform(rng, 0.1, 2.0);
    const auto p = softmax_with_temperature(z, t);
    const double c = testing::uniform(rng, -100.0, 100.0);
    for (double& x : z) x += c;
    const auto q = softmax_with_temperature(z, t);
    for (std::size_t i = 0; i < p.size(); ++i) ASSERT_NEAR(p[i], q[i], 1e-12);
  }
}

TEST(SoftmaxProperty, UniformEntropyIsLogV) {
  for (std::size_t v : {2u, 3u, 10u, 2048u, 50000u}) {
    const auto p = softmax_with_temperature(std::vector<double>(v, 1.25), 0.7);
    EXPECT_NEAR(entropy(p), std::log(static_cast<double>(v)), 1e-12);
  }
}

// ---- top-K candidates and re-ranking ------------------------------------------

std::vector<TokenId> ids_of(const CandidateSet& s) {
  std::vector<TokenId> out;
  for (const auto& c : s.candidates) out.push_back(c.token);
  return out;
}

TEST(TopKCandidates, Examples) {
  EXPECT_EQ(ids_of(top_k_candidates(std::vector<double>{0.1, 0.5, 0.4}, 2)), (std::vector<TokenId>{1, 2}));
  const double third = 1.0 / 3.0;
  EXPECT_EQ(ids_of(top_k_candidates(std::vector<double>{third, third, third}, 2)), (std::vector<TokenId>{0, 1}));
  EXPECT_EQ(code_of([] { top_k_candidates(std::vector<double>{0.5, 0.5}, 0); }), Errc::InvalidK);
  EXPECT_EQ(code_of([] { top_k_candidates(std::vector<double>{0.5, 0.5}, 3); }), Errc::InvalidK);
}

TEST(TopKCandidatesProperty, MatchesBruteForceSort) {
  Rng rng(4);
  for (int iter = 0; iter < 500; ++iter) {
    const std::size_t v = testing::uniform_int(rng, 1, 200);
    auto z = testing::random_logits(rng, v);
    // Force ties now and then.
    for (std::size_t i = 1; i < v; ++i) {
      if (rng.uniform() < 0.2) z[i] = z[i - 1];
    }
    const auto p = softmax_with_temperature(z, 1.0);
    const std::size_t k = testing::uniform_int(rng, 1, v);
    auto want = sorted_ids(p);
    want.resize(k);
    const auto set = top_k_candidates(p, k);
    ASSERT_EQ(ids_of(set), want);
    for (const auto& c : set.candidates) {
      ASSERT_EQ(c.log_prob, std::log(p[c.token]));
      ASSERT_LE(c.log_prob, 0.0);
    }
  }
}

EmbeddingTable table_from(std::size_t dim, std::vector<double> rows) { return EmbeddingTable(dim, std::move(rows)); }

CandidateSet manual_set(const std::vector<double>& log_probs) {
  CandidateSet s;
  for (std::size_t i = 0; i < log_probs.size(); ++i) {
    s.candidates.push_back(Candidate{static_cast<TokenId>(i), log_probs[i], {}, 0.0, 0.0});
  }
  return s;
}

TEST(Rerank, TwoCandidateExample) {
  const auto table = table_from(2, {1, 0, 0, 1});
  const auto set = contrastive_rerank(manual_set({-0.2, -0.3}), 0.5, table);
  EXPECT_EQ(set.mean_embedding, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(set.candidates[0].similarity, 0.5);
  EXPECT_EQ(set.candidates[1].similarity, 0.5);
  EXPECT_NEAR(set.candidates[0].score, -0.45, 1e-15);
  EXPECT_NEAR(set.candidates[1].score, -0.55, 1e-15);
  EXPECT_EQ(set.selected, 0u);
  const auto m = modified_probabilities(set, 0.5);
  EXPECT_NEAR(m[0], 0.52497918747894, 1e-12);
  EXPECT_NEAR(m[1], 0.47502081252106, 1e-12);
  EXPECT_NEAR(m[0], 0.525, 1e-3);
}

TEST(Rerank, LambdaZeroAndSingleCandidate) {
  Rng rng(5);
  const auto table = table_from(3, {1, 0, 0, 0, 1, 0, 1, 1, 0, 0, 2, 1});
  const auto set0 = contrastive_rerank(manual_set({-0.1, -0.2, -2.0, -3.0}), 0.0, table);
  EXPECT_EQ(set0.selected, 0u);
  const auto c = candidate_probabilities(set0);
  const auto m = modified_probabilities(set0, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c[i], m[i], 1e-15);
  for (double lambda : {0.0, 0.5, 7.0, 1e6}) {
    EXPECT_EQ(contrastive_rerank(manual_set({-0.7}), lambda, table).selected, 0u);
  }
  EXPECT_EQ(code_of([&] { contrastive_rerank(manual_set({-0.7}), -1.0, table); }), Errc::InvalidConfig);
}

TEST(Rerank, TiesKeepEarlierCandidate) {
  // Identical embeddings and log-probs: scores tie exactly.
  const auto table = table_from(2, {1, 1, 1, 1});
  EXPECT_EQ(contrastive_rerank(manual_set({-0.5, -0.5}), 0.5, table).selected, 0u);
}

struct RandomInstance {
  EmbeddingTable table;
  CandidateSet set;
  double lambda;
};

RandomInstance random_instance(Rng& rng) {
  const std::size_t k = testing::uniform_int(rng, 2, 8);
  const std::size_t dim = testing::uniform_int(rng, 2, 64);
  std::vector<double> rows(k * dim);
  for (double& x : rows) x = testing::uniform(rng, -1.0, 1.0);
  for (std::size_t i = 0; i < k; ++i) rows[i * dim] += 1e-3 + std::abs(rows[i * dim]);  // nonzero norm
  std::vector<double> lp(k);
  for (double& x : lp) x = -testing::uniform(rng, 0.0, 6.0);
  std::sort(lp.begin(), lp.end(), std::greater<>());
  return {EmbeddingTable(dim, std::move(rows)), manual_set(lp), testing::uniform(rng, 0.0, 2.0)};
}

TEST(RerankProperty, ScoresMatchIndependentComputation) {
  Rng rng(6);
  for (int iter = 0; iter < 500; ++iter) {
    auto inst = random_instance(rng);
    const auto set = contrastive_rerank(inst.set, inst.lambda, inst.table);
    const std::size_t k = set.candidates.size();
    const std::size_t dim = inst.table.dim();
    std::vector<std::vector<double>> unit(k, std::vector<double>(dim));
    std::vector<double> mean(dim, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      const auto row = inst.table.row(static_cast<TokenId>(i));
      double n = 0;
      for (double x : row) n += x * x;
      for (std::size_t d = 0; d < dim; ++d) unit[i][d] = row[d] / std::sqrt(n);
      for (std::size_t d = 0; d < dim; ++d) mean[d] += unit[i][d] / static_cast<double>(k);
    }
    std::size_t best = 0;
    std::vector<double> score(k);
    for (std::size_t i = 0; i < k; ++i) {
      double sim = 0;
      for (std::size_t d = 0; d < dim; ++d) sim += unit[i][d] * mean[d];
      score[i] = inst.set.candidates[i].log_prob - inst.lambda * sim;
      if (score[i] > score[best]) best = i;
      double norm = 0;
      for (double x : set.candidates[i].unit_embedding) norm += x * x;
      ASSERT_NEAR(std::sqrt(norm), 1.0, 1e-6);
      ASSERT_NEAR(set.candidates[i].similarity, sim, 1e-12);
      ASSERT_NEAR(set.candidates[i].score, score[i], 1e-12);
    }
    for (std::size_t d = 0; d < dim; ++d) ASSERT_NEAR(set.mean_embedding[d], mean[d], 1e-12);
    ASSERT_EQ(set.selected, best);
  }
}

TEST(RerankProperty, ArgmaxEquivalence) {
  Rng rng(7);
  for (int iter = 0; iter < 1000; ++iter) {
    auto inst = random_instance(rng);
    const auto set = contrastive_rerank(inst.set, inst.lambda, inst.table);
    const auto m = modified_probabilities(set, inst.lambda);
    const auto argmax = static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin());
    ASSERT_EQ(argmax, set.selected);
  }
}

TEST(RerankProperty, LambdaZeroIsGreedyOverTopK) {
  Rng rng(8);
  for (int iter = 0; iter < 500; ++iter) {
    const std::size_t v = testing::uniform_int(rng, 2, 100);
    const std::size_t dim = testing::uniform_int(rng, 1, 16);
    std::vector<double> rows(v * dim);
    for (double& x : rows) x = testing::uniform(rng, 0.01, 1.0);
    const EmbeddingTable table(dim, rows);
    const auto p = softmax_with_temperature(testing::random_logits(rng, v), 0.7);
    const auto set = contrastive_rerank(top_k_candidates(p, testing::uniform_int(rng, 1, v)), 0.0, table);
    ASSERT_EQ(set.selected_token(), greedy_select(p));
  }
}

// ---- baselines ---------------------------------------------------------------

TEST(Baselines, Greedy) {
  EXPECT_EQ(greedy_select(std::vector<double>{0.1, 0.7, 0.2}), 1u);
  EXPECT_EQ(greedy_select(std::vector<double>{0.4, 0.2, 0.4}), 0u);
}

TEST(Baselines, NucleusSupport) {
  EXPECT_EQ(nucleus_support(std::vector<double>{0.5, 0.3, 0.2}, 0.8), (std::vector<TokenId>{0, 1}));
  EXPECT_EQ(nucleus_support(std::vector<double>{0.5, 0.3, 0.2}, 0.5), (std::vector<TokenId>{0}));
  EXPECT_EQ(nucleus_support(std::vector<double>{0.2, 0.3, 0.5}, 1.0), (std::vector<TokenId>{2, 1, 0}));
  EXPECT_EQ(code_of([] { nucleus_support(std::vector<double>{0.5, 0.5}, 0.0); }), Errc::InvalidP);
  EXPECT_EQ(code_of([] { nucleus_support(std::vector<double>{0.5, 0.5}, 1.5); }), Errc::InvalidP);
}

TEST(BaselinesProperty, NucleusIsMinimalPrefix) {
  Rng rng(9);
  for (int iter = 0; iter < 500; ++iter) {
    const auto p = softmax_with_temperature(testing::random_logits(rng, testing::uniform_int(rng, 1, 80)), 1.0);
    const double thr = testing::uniform(rng, 0.01, 1.0);
    const auto support = nucleus_support(p, thr);
    const auto order = sorted_ids(p);
    ASSERT_TRUE(std::equal(support.begin(), support.end(), order.begin()));
    double mass = 0;
    for (auto id : support) mass += p[id];
    ASSERT_GE(mass, thr - 1e-12);
    ASSERT_LT(mass - p[support.back()], thr - 1e-12);
  }
}

TEST(BaselinesProperty, TopKSampleUniformFrequencies) {
  const std::size_t v = 10;
  const std::vector<double> p(v, 0.1);
  Rng rng(2024);
  std::vector<int> counts(v, 0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[top_k_sample(p, v, rng)];
  const double sigma = std::sqrt(n * 0.1 * 0.9);
  for (std::size_t i = 0; i < v; ++i) EXPECT_LE(std::abs(counts[i] - n * 0.1), 3 * sigma) << "token " << i;
}

TEST(BaselinesProperty, SamplersMatchInverseCdfOracle) {
  Rng gen(10);
  for (int iter = 0; iter < 300; ++iter) {
    const auto p = softmax_with_temperature(testing::random_logits(gen, testing::uniform_int(gen, 2, 60)), 0.8);
    const std::size_t k = testing::uniform_int(gen, 1, p.size());
    const double thr = testing::uniform(gen, 0.05, 1.0);
    const std::uint64_t seed = gen.next_u64();
    Rng a(seed), oracle(seed);
    auto top = sorted_ids(p);
    top.resize(k);
    ASSERT_EQ(top_k_sample(p, k, a), naive_inverse_cdf(p, top, oracle.uniform()));
    ASSERT_EQ(nucleus_sample(p, thr, a), naive_inverse_cdf(p, nucleus_support(p, thr), oracle.uniform()));
  }
}

// ---- temperature rule ----------------------------------------------------------

TEST(Temperature, Rule) {
  EXPECT_EQ(adapt_temperature(TokenClass::Structural, 0.7, 0.1), 0.6);
  EXPECT_EQ(adapt_temperature(TokenClass::HighImpact, 0.7, 0.1), 0.8);
  EXPECT_EQ(adapt_temperature(TokenClass::Neutral, 0.7, 0.1), 0.7);
  EXPECT_EQ(code_of([] { adapt_temperature(TokenClass::Structural, 0.1, 0.1); }), Errc::InvalidTemperature);
}

TEST(Temperature, PredictNextClass) {
  const Vocabulary v({";", "+", "my_reg", " end\n"});
  EXPECT_EQ(predict_next_class(std::nullopt, v, SelfClass{}), TokenClass::Neutral);
  EXPECT_EQ(predict_next_class(0, v, SelfClass{}), TokenClass::Structural);
  EXPECT_EQ(predict_next_class(1, v, SelfClass{}), TokenClass::HighImpact);
  EXPECT_EQ(predict_next_class(2, v, SelfClass{}), TokenClass::Neutral);
  EXPECT_EQ(predict_next_class(3, v, SelfClass{}), TokenClass::Structural);

  std::map<std::string, TransitionEntry> rows;
  rows[";"].counts = {1, 8, 1};  // ";" usually followed by high-impact
  auto table = std::make_shared<const ClassTransitionTable>(rows);
  const TransitionPolicy policy{table};
  EXPECT_EQ(predict_next_class(0, v, policy), TokenClass::HighImpact);
  EXPECT_EQ(predict_next_class(1, v, policy), TokenClass::HighImpact);  // absent: falls back to own class
  EXPECT_EQ(predict_next_class(2, v, policy), TokenClass::Neutral);
}

// ---- decode ------------------------------------------------------------------

DecodeConfig config_of(Strategy s, bool adaptive = false) {
  DecodeConfig c;
  c.strategy = s;
  c.adaptive_temperature = adaptive;
  c.max_tokens = 64;
  return c;
}

TEST(Decode, ScriptedGreedy) {
  const MockBackend b(testing::scripted_spec({3, 1, 4, 1, 5}, 7));
  const auto r = decode(b, config_of(Greedy{}), std::vector<TokenId>{});
  EXPECT_EQ(r.tokens, (std::vector<TokenId>{3, 1, 4, 1, 5}));
  EXPECT_TRUE(r.hit_eos);
  EXPECT_FALSE(r.max_tokens_reached);
  ASSERT_EQ(r.steps.size(), 6u);
  EXPECT_EQ(r.steps.back().token, 0u);
  for (const auto& s : r.steps) {
    EXPECT_NEAR(s.entropy, 0.0, 1e-12);
    EXPECT_GE(s.seconds, 0.0);
  }
}

TEST(Decode, ContrastiveKOneEqualsGreedy) {
  const MockBackend b(reference_mock_spec());
  for (std::size_t i = 0; i < 6; ++i) {
    const auto prompt = reference_prompt(i);
    for (double lambda : {0.0, 0.5, 5.0}) {
      EXPECT_EQ(decode(b, config_of(Contrastive{1, lambda}), prompt).tokens,
                decode(b, config_of(Greedy{}), prompt).tokens);
    }
  }
}

TEST(Decode, MaxTokensIsNormalTermination) {
  const MockBackend b(testing::scripted_spec({1, 1, 1, 1, 1, 1}, 3));
  auto c = config_of(Greedy{});
  c.max_tokens = 4;
  const auto r = decode(b, c, std::vector<TokenId>{});
  EXPECT_EQ(r.tokens.size(), 4u);
  EXPECT_TRUE(r.max_tokens_reached);
  EXPECT_FALSE(r.hit_eos);
}

TEST(Decode, ClusteredThreeTokenFixture) {
  // " a" and " a2" are near-duplicates with the highest logits; " z" points
  // elsewhere.
  MockModelSpec s;
  s.tokens = {" a", " a2", " z"};
  s.dim = 2;
  s.embeddings = {1.0, 0.0, 0.99, 0.141, 0.0, 1.0};
  s.default_row = LogitVector{2.0, 1.9, 1.0};
  const MockBackend b(s);

  // Oracle: exhaustive scores at T = 0.7, K = 3, lambda = 8.
  const double t = 0.7, lambda = 8.0;
  const auto p = naive_softmax({2.0, 1.9, 1.0}, t);
  std::vector<std::vector<double>> e = {{1.0, 0.0}, {0.99, 0.141}, {0.0, 1.0}};
  for (auto& row : e) {
    const double n = std::hypot(row[0], row[1]);
    row = {row[0] / n, row[1] / n};
  }
  const std::vector<double> mean = {(e[0][0] + e[1][0] + e[2][0]) / 3, (e[0][1] + e[1][1] + e[2][1]) / 3};
  std::vector<double> score(3);
  for (int i = 0; i < 3; ++i) score[i] = std::log(p[i]) - lambda * (e[i][0] * mean[0] + e[i][1] * mean[1]);
  const auto oracle = static_cast<TokenId>(std::max_element(score.begin(), score.end()) - score.begin());
  ASSERT_EQ(oracle, 2u);

  auto c = config_of(Contrastive{3, lambda});
  c.max_tokens = 5;
  const auto r = decode(b, c, std::vector<TokenId>{});
  for (const auto id : r.tokens) EXPECT_EQ(id, oracle);

  auto topk = config_of(TopK{3});
  topk.max_tokens = 500;
  const auto sampled = decode(b, topk, std::vector<TokenId>{});
  const auto dups = std::count_if(sampled.tokens.begin(), sampled.tokens.end(), [](TokenId id) { return id != 2; });
  // Oracle mass on the duplicates is p[0] + p[1] (about 0.886).
  EXPECT_GT(static_cast<double>(dups) / 500.0, 0.8);
  EXPECT_NEAR(p[0] + p[1], 0.886, 0.01);
}

TEST(Decode, SamplingReplaysFromSeedOracle) {
  const MockBackend b(reference_mock_spec());
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    for (const Strategy& s : {Strategy{TopK{10}}, Strategy{Nucleus{0.9}}}) {
      auto c = config_of(s);
      c.seed = seed;
      c.max_tokens = 30;
      const auto prompt = reference_prompt(seed);
      const auto r = decode(b, c, prompt);
      Rng rng(seed);
      std::vector<TokenId> ctx = prompt;
      for (const auto& step : r.steps) {
        const auto p = naive_softmax(b.next_logits(ctx), 0.7);
        std::vector<TokenId> support = sorted_ids(p);
        if (std::holds_alternative<TopK>(s)) {
          support.resize(10);
        } else {
          support = nucleus_support(p, 0.9);
        }
        ASSERT_EQ(step.token, naive_inverse_cdf(p, support, rng.uniform()));
        ctx.push_back(step.token);
      }
    }
  }
}

TEST(Decode, Deterministic) {
  const MockBackend b(reference_mock_spec());
  for (const Strategy& s : {Strategy{Greedy{}}, Strategy{TopK{10}}, Strategy{Nucleus{0.9}}, Strategy{Contrastive{}}}) {
    auto c = config_of(s, true);
    c.seed = 5;
    const auto a = decode(b, c, reference_prompt(3));
    const auto d = decode(b, c, reference_prompt(3));
    ASSERT_EQ(a.tokens, d.tokens);
    ASSERT_EQ(a.steps.size(), d.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      EXPECT_EQ(a.steps[i].temperature, d.steps[i].temperature);
      EXPECT_EQ(a.steps[i].entropy, d.steps[i].entropy);
    }
  }
}

TEST(Decode, AdaptiveTemperatureFollowsLastToken) {
  MockModelSpec s = testing::scripted_spec({1, 2, 3, 1, 3}, 4);
  s.tokens = {"<eos>", ";", "+", "x"};
  const MockBackend b(s);
  auto c = config_of(Greedy{}, true);
  const auto r = decode(b, c, std::vector<TokenId>{});
  std::vector<double> temps;
  for (const auto& st : r.steps) temps.push_back(st.temperature);
  EXPECT_EQ(temps, (std::vector<double>{0.7, 0.6, 0.8, 0.7, 0.6, 0.7}));

  std::map<std::string, TransitionEntry> rows;
  rows["x"].counts = {5, 0, 0};
  c.class_policy = TransitionPolicy{std::make_shared<const ClassTransitionTable>(rows)};
  const auto t = decode(b, c, std::vector<TokenId>{});
  EXPECT_EQ(t.steps[4].temperature, 0.6);  // after "x": table says structural
  EXPECT_EQ(t.steps[3].predicted_next_class, TokenClass::Structural);
}

TEST(Decode, AdaptiveTemperaturesStayInRange) {
  const MockBackend b(reference_mock_spec());
  for (std::size_t i = 0; i < 10; ++i) {
    const auto r = decode(b, config_of(Contrastive{}, true), reference_prompt(i));
    for (const auto& st : r.steps) {
      EXPECT_TRUE(st.temperature == 0.6 || st.temperature == 0.7 || st.temperature == 0.8) << st.temperature;
      EXPECT_GE(st.entropy, 0.0);
      EXPECT_LE(st.entropy, std::log(2048.0) + 1e-12);
      ASSERT_TRUE(st.candidates.has_value());
      EXPECT_TRUE(st.candidate_entropy.has_value());
      EXPECT_TRUE(st.modified_entropy.has_value());
    }
    EXPECT_EQ(r.steps.front().temperature, 0.7);
  }
}

TEST(Decode, ZeroDeltaMatchesFixed) {
  const MockBackend b(reference_mock_spec());
  for (std::size_t i = 0; i < 20; ++i) {
    auto ta = config_of(Contrastive{}, true);
    ta.temperature_delta = 0.0;
    EXPECT_EQ(decode(b, ta, reference_prompt(i)).tokens, decode(b, config_of(Contrastive{}), reference_prompt(i)).tokens);
  }
}

TEST(Decode, ConfigValidation) {
  const MockBackend b(testing::scripted_spec({1}, 3));
  const std::vector<TokenId> none;
  auto bad = [&](DecodeConfig c) { return code_of([&] { decode(b, c, none); }); };
  EXPECT_EQ(bad(config_of(TopK{0})), Errc::InvalidConfig);
  EXPECT_EQ(bad(config_of(Contrastive{4, 0.5})), Errc::InvalidConfig);
  EXPECT_EQ(bad(config_of(Contrastive{2, -0.5})), Errc::InvalidConfig);
  EXPECT_EQ(bad(config_of(Nucleus{0.0})), Errc::InvalidConfig);
  EXPECT_EQ(bad(config_of(Nucleus{1.01})), Errc::InvalidConfig);
  auto cold = config_of(Greedy{});
  cold.base_temperature = 0.0;
  EXPECT_EQ(bad(cold), Errc::InvalidConfig);
  auto ta = config_of(Greedy{}, true);
  ta.base_temperature = 0.05;
  EXPECT_EQ(bad(ta), Errc::InvalidConfig);
  auto fixed = config_of(Greedy{});
  fixed.base_temperature = 0.05;  // delta unused without adaptation
  EXPECT_NO_THROW(decode(b, fixed, none));
  auto zero = config_of(Greedy{});
  zero.max_tokens = 0;
  EXPECT_EQ(bad(zero), Errc::InvalidConfig);
  EXPECT_EQ(code_of([&] { decode(b, config_of(Greedy{}), std::vector<TokenId>{9}); }), Errc::UnknownTokenId);
}

TEST(Decode, StrategyLabels) {
  EXPECT_EQ(strategy_label(config_of(TopK{})), "base");
  EXPECT_EQ(strategy_label(config_of(TopK{}, true)), "ta");
  EXPECT_EQ(strategy_label(config_of(Contrastive{})), "c");
  EXPECT_EQ(strategy_label(config_of(Contrastive{}, true)), "c+ta");
  EXPECT_EQ(strategy_label(config_of(Nucleus{})), "nucleus");
  EXPECT_EQ(strategy_label(config_of(Greedy{})), "greedy");
}

}  // namespace
}  // namespace rtldecode
