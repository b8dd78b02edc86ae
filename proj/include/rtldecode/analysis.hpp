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

// Methodology tooling: per-prompt entropy traces and their pooled summary,
// corpus statistics over syntactic tokens (preceding-token histograms and
// next-class transition tables), and a repetition diagnostic for generated
// code.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtldecode/backend.hpp"
#include "rtldecode/decoder.hpp"
#include "rtldecode/error.hpp"
#include "rtldecode/lex.hpp"
#include "rtldecode/parallel.hpp"
#include "rtldecode/trace.hpp"
#include "rtldecode/transition_table.hpp"

namespace rtldecode {

// ---------------------------------------------------------------------------
// Entropy traces
// ---------------------------------------------------------------------------

struct LabeledConfig {
  std::string label;
  DecodeConfig config;
};

struct Prompt {
  std::string id;
  std::vector<TokenId> ids;
};

struct TraceFailure {
  std::string prompt_id;
  std::string strategy;
  std::string message;
};

struct TraceRun {
  std::vector<EntropyTrace> traces;  // config-major, prompt order within
  std::vector<TraceFailure> failures;
  std::vector<DecodeResult> results;  // parallel to traces
};

inline EntropyTrace to_entropy_trace(const std::string& prompt_id, const std::string& label,
                                     const DecodeResult& result, std::size_t vocab_size) {
  EntropyTrace t{prompt_id, label, vocab_size, {}, {}};
  for (const auto& rec : result.steps) {
    t.entropies.push_back(rec.entropy);
    t.temperatures.push_back(rec.temperature);
  }
  return t;
}

// Decodes every prompt under every config. Prompt i uses seed
// config.seed + i. A failing prompt is recorded and skipped.
inline TraceRun trace_entropy(const Backend& backend, const std::vector<LabeledConfig>& configs,
                              const std::vector<Prompt>& prompts, std::size_t jobs = 1) {
  if (prompts.empty()) throw Error(Errc::EmptyInput, "no prompts to trace");
  const std::size_t n = configs.size() * prompts.size();
  std::vector<std::optional<DecodeResult>> results(n);
  std::vector<std::string> errors(n);
  parallel_for(n, jobs, [&](std::size_t job) {
    const auto& lc = configs[job / prompts.size()];
    const std::size_t pi = job % prompts.size();
    DecodeConfig cfg = lc.config;
    cfg.seed = lc.config.seed + pi;
    try {
      results[job] = decode(backend, cfg, prompts[pi].ids);
    } catch (const Error& e) {
      errors[job] = e.what();
    }
  });
  TraceRun run;
  for (std::size_t job = 0; job < n; ++job) {
    const auto& lc = configs[job / prompts.size()];
    const auto& prompt = prompts[job % prompts.size()];
    if (!results[job]) {
      run.failures.push_back({prompt.id, lc.label, errors[job]});
      continue;
    }
    run.traces.push_back(to_entropy_trace(prompt.id, lc.label, *results[job], backend.vocabulary().size()));
    run.results.push_back(std::move(*results[job]));
  }
  return run;
}

struct EntropySummary {
  std::string strategy;
  double mean = 0.0;
  double variance = 0.0;  // pooled population variance
  std::size_t steps = 0;
  std::size_t traces = 0;
};

// Pools every step of every trace labelled `strategy`. Values are summed in
// sorted order, so the result does not depend on trace or step order.
inline EntropySummary summarize(const std::vector<EntropyTrace>& traces, const std::string& strategy) {
  std::vector<double> values;
  EntropySummary s;
  s.strategy = strategy;
  for (const auto& t : traces) {
    if (t.strategy != strategy) continue;
    ++s.traces;
    values.insert(values.end(), t.entropies.begin(), t.entropies.end());
  }
  if (values.empty()) throw Error(Errc::EmptyInput, "no entropy steps for strategy '" + strategy + "'");
  std::sort(values.begin(), values.end());
  s.steps = values.size();
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - s.mean;
    sq[i] = d * d;
  }
  std::sort(sq.begin(), sq.end());
  s.variance = std::accumulate(sq.begin(), sq.end(), 0.0) / n;
  return s;
}

// ---------------------------------------------------------------------------
// Corpus statistics
// ---------------------------------------------------------------------------

struct ContextHistogram {
  std::string token;
  TokenClass cls = TokenClass::Neutral;
  std::map<std::string, std::uint64_t> preceding;

  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (const auto& [_, c] : preceding) n += c;
    return n;
  }

  friend bool operator==(const ContextHistogram&, const ContextHistogram&) = default;
};

// Raw counts from one or more sources; merge() is associative and
// commutative.
struct CorpusCounts {
  // focus token -> preceding syntactic token -> count
  std::map<std::string, std::map<std::string, std::uint64_t>> preceding;
  // syntactic token -> counts of the class of the next non-trivia token
  std::map<std::string, TransitionEntry> following;
  std::size_t sources = 0;

  void merge(const CorpusCounts& other) {
    for (const auto& [focus, hist] : other.preceding) {
      auto& dst = preceding[focus];
      for (const auto& [prev, n] : hist) dst[prev] += n;
    }
    for (const auto& [token, entry] : other.following) {
      auto& dst = following[token];
      for (std::size_t c = 0; c < dst.counts.size(); ++c) dst.counts[c] += entry.counts[c];
    }
    sources += other.sources;
  }
};

// Histograms use the nearest preceding syntactic token: identifiers,
// literals, comments and other lexemes in between are skipped. Focus tokens
// are syntactic lexemes whose class is not Neutral.
inline CorpusCounts count_source(std::string_view source, const Lexicon& lexicon = Lexicon::builtin()) {
  CorpusCounts counts;
  counts.sources = 1;
  const auto lexemes = lex(source);
  const auto stream = classify_stream(lexemes, lexicon);
  std::optional<std::string_view> last_syntactic;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto& cur = stream[i];
    if (!cur.lexeme.syntactic()) continue;
    if (cur.cls != TokenClass::Neutral && last_syntactic) {
      ++counts.preceding[std::string(cur.lexeme.text)][std::string(*last_syntactic)];
    }
    last_syntactic = cur.lexeme.text;
    if (i + 1 < stream.size()) {
      ++counts.following[std::string(cur.lexeme.text)].counts[static_cast<std::size_t>(stream[i + 1].cls)];
    }
  }
  return counts;
}

inline std::vector<ContextHistogram> histograms_from(const CorpusCounts& counts,
                                                     const Lexicon& lexicon = Lexicon::builtin()) {
  std::vector<ContextHistogram> out;
  for (const auto& [focus, hist] : counts.preceding) {
    out.push_back(ContextHistogram{focus, lexicon.classify(focus), hist});
  }
  return out;
}

inline ClassTransitionTable transition_table_from(const CorpusCounts& counts, std::uint64_t min_support) {
  std::map<std::string, TransitionEntry> kept;
  for (const auto& [token, entry] : counts.following) {
    if (entry.support() >= min_support) kept.emplace(token, entry);
  }
  return ClassTransitionTable(std::move(kept));
}

struct CorpusSource {
  std::string name;
  std::string text;
};

inline std::vector<ContextHistogram> context_histograms(const std::vector<CorpusSource>& corpus,
                                                        const Lexicon& lexicon = Lexicon::builtin()) {
  CorpusCounts total;
  for (const auto& src : corpus) total.merge(count_source(src.text, lexicon));
  return histograms_from(total, lexicon);
}

inline ClassTransitionTable build_transition_table(const std::vector<CorpusSource>& corpus,
                                                   std::uint64_t min_support = 5,
                                                   const Lexicon& lexicon = Lexicon::builtin()) {
  CorpusCounts total;
  for (const auto& src : corpus) total.merge(count_source(src.text, lexicon));
  return transition_table_from(total, min_support);
}

inline bool is_verilog_path(const std::filesystem::path& path) {
  const auto ext = path.extension();
  return ext == ".v" || ext == ".sv";
}

struct CorpusScan {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

// Expands directories recursively to their .v/.sv files; explicitly named
// files with other extensions are skipped with a warning. Sorted.
inline CorpusScan collect_corpus_files(const std::vector<std::filesystem::path>& roots) {
  namespace fs = std::filesystem;
  CorpusScan scan;
  for (const auto& root : roots) {
    std::error_code ec;
    if (fs::is_directory(root, ec)) {
      for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::recursive_directory_iterator();
           it.increment(ec)) {
        if (it->is_regular_file(ec) && is_verilog_path(it->path())) scan.files.push_back(it->path());
      }
      if (ec) scan.warnings.push_back("error walking " + root.string() + ": " + ec.message());
    } else if (fs::exists(root, ec)) {
      if (is_verilog_path(root)) scan.files.push_back(root);
      else scan.warnings.push_back("skipping non-Verilog file " + root.string());
    } else {
      scan.warnings.push_back("no such file or directory: " + root.string());
    }
  }
  std::sort(scan.files.begin(), scan.files.end());
  scan.files.erase(std::unique(scan.files.begin(), scan.files.end()), scan.files.end());
  return scan;
}

struct CorpusAnalysis {
  CorpusCounts counts;
  std::vector<ContextHistogram> histograms;
  ClassTransitionTable transitions;
  std::vector<std::string> warnings;
  std::size_t files_read = 0;
};

// Reads and counts files on up to `jobs` threads. Unreadable files are
// reported in `warnings` and skipped.
inline CorpusAnalysis analyze_corpus(const std::vector<std::filesystem::path>& roots, std::uint64_t min_support = 5,
                                     std::size_t jobs = 1, const Lexicon& lexicon = Lexicon::builtin()) {
  auto scan = collect_corpus_files(roots);
  std::vector<CorpusCounts> per_file(scan.files.size());
  std::vector<std::string> errors(scan.files.size());
  parallel_for(scan.files.size(), jobs, [&](std::size_t i) {
    try {
      per_file[i] = count_source(read_text_file(scan.files[i]), lexicon);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  CorpusAnalysis out;
  out.warnings = std::move(scan.warnings);
  for (std::size_t i = 0; i < per_file.size(); ++i) {
    if (!errors[i].empty()) {
      out.warnings.push_back(errors[i]);
      continue;
    }
    out.counts.merge(per_file[i]);
    ++out.files_read;
  }
  out.histograms = histograms_from(out.counts, lexicon);
  out.transitions = transition_table_from(out.counts, min_support);
  return out;
}

inline nlohmann::ordered_json histograms_to_json(const std::vector<ContextHistogram>& hists) {
  nlohmann::ordered_json doc;
  doc["schema"] = "rtldecode.context_histograms";
  doc["version"] = 1;
  auto& rows = doc["histograms"] = nlohmann::ordered_json::array();
  for (const auto& h : hists) {
    nlohmann::ordered_json row;
    row["token"] = h.token;
    row["class"] = class_name(h.cls);
    row["total"] = h.total();
    std::vector<std::pair<std::string, std::uint64_t>> sorted(h.preceding.begin(), h.preceding.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    auto& prev = row["preceding"] = nlohmann::ordered_json::array();
    for (const auto& [tok, n] : sorted) prev.push_back({{"token", tok}, {"count", n}});
    rows.push_back(std::move(row));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Repetition diagnostic
// ---------------------------------------------------------------------------

struct RepetitionOptions {
  std::size_t min_n = 4;
  std::size_t max_n = 32;
  std::size_t threshold = 3;
};

struct RepetitionScore {
  std::size_t max_ngram_repeat = 0;
  bool repetitive = false;
  std::size_t ngram = 0;  // n-gram length achieving the maximum

  friend bool operator==(const RepetitionScore&, const RepetitionScore&) = default;
};

// Largest number of back-to-back copies of any token n-gram, n in
// [min_n, max_n], over the non-trivia lexemes with identifiers replaced by a
// placeholder.
inline RepetitionScore repetition_score(std::string_view code, const RepetitionOptions& opt = {}) {
  std::vector<std::string_view> toks;
  for (const auto& lx : lex(code)) {
    if (lx.trivia()) continue;
    toks.push_back(lx.kind == LexemeKind::Identifier ? std::string_view("\x01id") : lx.text);
  }
  RepetitionScore best;
  const std::size_t len = toks.size();
  auto same = [&](std::size_t a, std::size_t b, std::size_t n) {
    return std::equal(toks.begin() + a, toks.begin() + a + n, toks.begin() + b);
  };
  for (std::size_t n = opt.min_n; n <= opt.max_n && n <= len; ++n) {
    for (std::size_t i = 0; i + n <= len; ++i) {
      // A run starting n earlier already covers this one.
      if (i >= n && same(i - n, i, n)) continue;
      std::size_t reps = 1;
      while (i + (reps + 1) * n <= len && same(i, i + reps * n, n)) ++reps;
      if (reps > best.max_ngram_repeat) {
        best.max_ngram_repeat = reps;
        best.ngram = n;
      }
    }
  }
  best.repetitive = best.max_ngram_repeat >= opt.threshold;
  return best;
}

}  // namespace rtldecode
