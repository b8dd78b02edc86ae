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

// Command-line front end. run() is the whole program; tools/rtldecode.cpp
// only forwards argv to it, which keeps every subcommand testable in-process.
//
// Exit codes: 0 success, 2 usage or configuration, 3 backend or environment,
// 4 checker failure at suite level.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rtldecode/analysis.hpp"
#include "rtldecode/backend.hpp"
#include "rtldecode/decoder.hpp"
#include "rtldecode/error.hpp"
#include "rtldecode/evalharness.hpp"
#include "rtldecode/lex.hpp"
#include "rtldecode/reference_mock.hpp"
#include "rtldecode/trace.hpp"
#include "rtldecode/transition_table.hpp"

namespace rtldecode::cli {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 2, kBackend = 3, kChecker = 4 };

inline int exit_code_for(Errc code) {
  switch (code) {
    case Errc::UnknownTokenId:
    case Errc::BackendUnavailable:
    case Errc::IoError:
      return kBackend;
    case Errc::CheckerSpawnError:
    case Errc::CheckerTimeout:
      return kChecker;
    default:
      return kUsage;
  }
}

// 64-bit FNV-1a, used for config and input fingerprints in manifests.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << v;
  return ss.str();
}

namespace detail {

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
}

// Inputs named on the command line are configuration: a missing file is a
// usage error (exit 2), not an environment failure.
inline std::string read_input(const std::filesystem::path& path, std::string_view what) {
  try {
    return read_text_file(path);
  } catch (const Error&) {
    throw Error(Errc::InvalidConfig, std::string(what) + " not readable: " + path.string());
  }
}

}  // namespace detail

// Every option that shapes decoding, shared by the subcommands that decode.
struct DecodeOptions {
  std::string backend_path;
  std::string backend_cmd;
  std::size_t k = 5;
  std::size_t top_k = 10;
  double top_p = 0.9;
  double lambda = 0.5;
  double temperature = 0.7;
  double delta = 0.1;
  std::size_t max_tokens = 256;
  std::string class_policy = "self";
  std::string transition_table;
  std::string lexicon;

  void add_to(CLI::App& app, bool backend_required, const std::string& cand_flag = "--k") {
    auto* b = app.add_option("--backend", backend_path, "Mock model spec file (also vocabulary and embeddings for --backend-cmd)");
    if (backend_required) b->required();
    app.add_option("--backend-cmd", backend_cmd, "Out-of-process engine command speaking the logits wire protocol");
    app.add_option(cand_flag, k, "Contrastive candidate set size")->capture_default_str();
    app.add_option("--top-k", top_k, "k for top-k sampling (base, ta)")->capture_default_str();
    app.add_option("--top-p", top_p, "Nucleus threshold")->capture_default_str();
    app.add_option("--lambda", lambda, "Contrastive penalty coefficient")->capture_default_str();
    app.add_option("--temp", temperature, "Base temperature")->capture_default_str();
    app.add_option("--delta", delta, "Temperature step for adaptive decoding")->capture_default_str();
    app.add_option("--max-tokens", max_tokens, "Maximum generated tokens")->capture_default_str();
    app.add_option("--class-policy", class_policy, "Next-class predictor: self | table")
        ->check(CLI::IsMember({"self", "table"}))
        ->capture_default_str();
    app.add_option("--transition-table", transition_table, "Transition table JSON from analyze-corpus");
    app.add_option("--lexicon", lexicon, "Token lexicon override file");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["backend"] = backend_path;
    j["backend_cmd"] = backend_cmd;
    j["k"] = k;
    j["top_k"] = top_k;
    j["top_p"] = top_p;
    j["lambda"] = lambda;
    j["temp"] = temperature;
    j["delta"] = delta;
    j["max_tokens"] = max_tokens;
    j["class_policy"] = class_policy;
    j["transition_table"] = transition_table;
    j["lexicon"] = lexicon;
    return j;
  }
};

// Short strategy names (base, ta, c, c+ta) plus greedy
// and nucleus; long aliases are accepted.
inline DecodeConfig make_config(std::string_view name, const DecodeOptions& o, std::uint64_t seed) {
  DecodeConfig c;
  c.base_temperature = o.temperature;
  c.temperature_delta = o.delta;
  c.max_tokens = o.max_tokens;
  c.seed = seed;
  std::string base(name);
  if (base.ends_with("+ta")) {
    c.adaptive_temperature = true;
    base.resize(base.size() - 3);
  }
  if (base == "contrastive-ta") {
    c.adaptive_temperature = true;
    base = "c";
  }
  if (base == "ta") {
    c.adaptive_temperature = true;
    base = "base";
  }
  if (base == "greedy") c.strategy = Greedy{};
  else if (base == "base" || base == "top-k" || base == "topk") c.strategy = TopK{o.top_k};
  else if (base == "nucleus" || base == "top-p") c.strategy = Nucleus{o.top_p};
  else if (base == "c" || base == "contrastive") c.strategy = Contrastive{o.k, o.lambda};
  else throw Error(Errc::InvalidConfig, "unknown strategy '" + std::string(name) + "'");

  if (!o.lexicon.empty()) {
    c.lexicon = std::make_shared<const Lexicon>(Lexicon::parse(detail::read_input(o.lexicon, "lexicon")));
  }
  if (o.class_policy == "table") {
    if (o.transition_table.empty()) throw Error(Errc::InvalidConfig, "--class-policy table needs --transition-table");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(detail::read_input(o.transition_table, "transition table"));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(Errc::InvalidConfig, std::string("transition table: ") + ex.what());
    }
    c.class_policy = TransitionPolicy{std::make_shared<const ClassTransitionTable>(ClassTransitionTable::from_json(doc))};
  }
  if (c.adaptive_temperature && !(c.base_temperature - c.temperature_delta > 0.0)) {
    throw Error(Errc::InvalidConfig, "--temp minus --delta must be positive");
  }
  return c;
}

inline std::unique_ptr<Backend> load_backend(const DecodeOptions& o) {
  if (o.backend_path.empty()) throw Error(Errc::InvalidConfig, "--backend is required");
  const auto text = detail::read_input(o.backend_path, "backend spec");
  auto spec = parse_mock_spec(text);
  if (o.backend_cmd.empty()) return std::make_unique<MockBackend>(std::move(spec));
  return std::make_unique<ProcessBackend>(o.backend_cmd, Vocabulary(spec.tokens), EmbeddingTable(spec.dim, spec.embeddings),
                                          spec.eos);
}

struct RunContext {
  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> argv;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string format = "table";
};

inline void write_manifest(const std::filesystem::path& path, const RunContext& ctx, std::string_view subcommand,
                           const nlohmann::ordered_json& config,
                           const std::vector<std::filesystem::path>& inputs = {}) {
  nlohmann::ordered_json m;
  m["schema"] = "rtldecode.manifest";
  m["version"] = 1;
  m["tool_version"] = kVersion;
  m["subcommand"] = subcommand;
  m["argv"] = ctx.argv;
  m["seed"] = ctx.seed;
  m["jobs"] = ctx.jobs;
  m["config"] = config;
  m["config_hash"] = hex64(fnv1a(config.dump()));
  auto& in = m["inputs"] = nlohmann::ordered_json::object();
  for (const auto& p : inputs) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(p, ec)) continue;
    in[p.string()] = hex64(fnv1a(read_text_file(p)));
  }
  detail::write_file(path, m.dump(2) + "\n");
}

// Prints rows either as an aligned table or as one JSON object per line.
inline void emit_rows(std::ostream& out, const std::string& format, const std::vector<nlohmann::ordered_json>& rows) {
  if (rows.empty()) return;
  if (format == "records") {
    for (const auto& r : rows) out << r.dump() << '\n';
    return;
  }
  std::vector<std::string> keys;
  for (const auto& [key, _] : rows.front().items()) keys.push_back(key);
  auto cell = [](const nlohmann::ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return std::string("-");
    if (v.is_number_float()) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6g", v.get<double>());
      return std::string(buf);
    }
    return v.dump();
  };
  std::vector<std::size_t> width(keys.size());
  for (std::size_t c = 0; c < keys.size(); ++c) {
    width[c] = keys[c].size();
    for (const auto& r : rows) width[c] = std::max(width[c], cell(r[keys[c]]).size());
  }
  auto line = [&](auto&& get) {
    for (std::size_t c = 0; c < keys.size(); ++c) {
      out << std::left << std::setw(static_cast<int>(width[c])) << get(c) << (c + 1 < keys.size() ? "  " : "\n");
    }
  };
  line([&](std::size_t c) { return keys[c]; });
  for (const auto& r : rows) line([&](std::size_t c) { return cell(r[keys[c]]); });
}

inline std::string rows_to_tsv(const std::vector<nlohmann::ordered_json>& rows) {
  if (rows.empty()) return {};
  std::ostringstream out;
  std::vector<std::string> keys;
  for (const auto& [key, _] : rows.front().items()) keys.push_back(key);
  for (std::size_t c = 0; c < keys.size(); ++c) out << keys[c] << (c + 1 < keys.size() ? '\t' : '\n');
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < keys.size(); ++c) {
      const auto& v = r[keys[c]];
      out << (v.is_string() ? v.get<std::string>() : v.dump()) << (c + 1 < keys.size() ? '\t' : '\n');
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct GenerateOptions {
  DecodeOptions decode;
  std::string strategy = "c+ta";
  std::string prompt;
  std::string prompt_file;
  std::string out_file;
  std::string trace_file;
  bool trace_timing = false;
};

inline int cmd_generate(const GenerateOptions& o, RunContext& ctx) {
  const auto config = make_config(o.strategy, o.decode, ctx.seed);
  if (!o.prompt.empty() && !o.prompt_file.empty()) throw Error(Errc::InvalidConfig, "give --prompt or --prompt-file, not both");
  const std::string prompt_text = o.prompt_file.empty() ? o.prompt : detail::read_input(o.prompt_file, "prompt file");
  const auto backend = load_backend(o.decode);
  const auto prompt = backend->vocabulary().encode(prompt_text);
  const auto result = decode(*backend, config, prompt);
  const auto text = backend->vocabulary().decode(result.tokens);

  std::string trace_path = o.trace_file;
  if (trace_path.empty() && !o.out_file.empty()) trace_path = o.out_file + ".trace.jsonl";
  if (o.out_file.empty()) ctx.out << text;
  else detail::write_file(o.out_file, text);
  if (!trace_path.empty()) {
    std::ostringstream trace;
    write_trace(trace, {"prompt", strategy_label(config), backend->vocabulary().size(), config.seed}, result,
                backend->vocabulary(), o.trace_timing);
    detail::write_file(trace_path, trace.str());
  }
  if (!o.out_file.empty() || !trace_path.empty()) {
    auto cfg = o.decode.to_json();
    cfg["strategy"] = o.strategy;
    cfg["prompt"] = prompt_text;
    cfg["trace_timing"] = o.trace_timing;
    const std::string base = o.out_file.empty() ? trace_path : o.out_file;
    write_manifest(base + ".manifest.json", ctx, "generate", cfg,
                   {o.decode.backend_path, o.decode.transition_table, o.decode.lexicon});
  }
  return kOk;
}

struct EntropyOptions {
  DecodeOptions decode;
  std::vector<std::string> strategies = {"base", "nucleus", "c"};
  std::string prompts_file;
  std::size_t reference_prompts = 0;
  std::vector<std::string> traces;
  std::string out_dir = "entropy-report";
};

inline std::vector<nlohmann::ordered_json> summary_rows(const std::vector<EntropySummary>& sums) {
  std::vector<nlohmann::ordered_json> rows;
  for (const auto& s : sums) {
    nlohmann::ordered_json r;
    r["strategy"] = s.strategy;
    r["mean_nats"] = s.mean;
    r["variance_nats2"] = s.variance;
    r["steps"] = s.steps;
    r["traces"] = s.traces;
    rows.push_back(std::move(r));
  }
  return rows;
}

inline int cmd_analyze_entropy(const EntropyOptions& o, RunContext& ctx) {
  namespace fs = std::filesystem;
  std::vector<EntropyTrace> traces;
  std::vector<std::string> labels;
  std::string trace_dump;
  nlohmann::ordered_json cfg;
  std::vector<fs::path> inputs;
  if (!o.traces.empty()) {
    for (const auto& path : o.traces) {
      std::istringstream in(detail::read_input(path, "trace file"));
      for (auto& t : read_traces(in)) traces.push_back(std::move(t));
      inputs.emplace_back(path);
    }
    for (const auto& t : traces) {
      if (std::find(labels.begin(), labels.end(), t.strategy) == labels.end()) labels.push_back(t.strategy);
    }
    cfg["traces"] = o.traces;
  } else {
    const auto backend = load_backend(o.decode);
    std::vector<Prompt> prompts;
    if (!o.prompts_file.empty()) {
      std::istringstream in(detail::read_input(o.prompts_file, "prompts file"));
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        prompts.push_back({"p" + std::to_string(prompts.size()), backend->vocabulary().encode(line)});
      }
      inputs.emplace_back(o.prompts_file);
    }
    for (std::size_t i = 0; i < o.reference_prompts; ++i) {
      auto ids = reference_prompt(i);
      for (const TokenId id : ids) backend->vocabulary().check(id);
      prompts.push_back({"ref" + std::to_string(i), std::move(ids)});
    }
    if (prompts.empty()) throw Error(Errc::InvalidConfig, "no prompts: give --prompts, --reference-prompts or --traces");
    std::vector<LabeledConfig> configs;
    for (const auto& s : o.strategies) {
      auto c = make_config(s, o.decode, ctx.seed);
      configs.push_back({strategy_label(c), c});
      labels.push_back(configs.back().label);
    }
    auto run = trace_entropy(*backend, configs, prompts, ctx.jobs);
    for (const auto& f : run.failures) ctx.err << "warning: prompt " << f.prompt_id << " (" << f.strategy << "): " << f.message << '\n';
    std::ostringstream dump;
    for (std::size_t i = 0; i < run.traces.size(); ++i) {
      const auto& t = run.traces[i];
      write_trace(dump, {t.prompt_id, t.strategy, t.vocab_size, 0}, run.results[i], backend->vocabulary());
    }
    trace_dump = dump.str();
    traces = std::move(run.traces);
    cfg = o.decode.to_json();
    cfg["strategies"] = o.strategies;
    cfg["prompts_file"] = o.prompts_file;
    cfg["reference_prompts"] = o.reference_prompts;
    inputs.emplace_back(o.decode.backend_path);
  }
  std::vector<EntropySummary> sums;
  for (const auto& l : labels) sums.push_back(summarize(traces, l));
  const auto rows = summary_rows(sums);

  const fs::path dir = o.out_dir;
  nlohmann::ordered_json report;
  report["schema"] = "rtldecode.entropy_summary";
  report["version"] = 1;
  report["units"] = "nats";
  report["variance"] = "pooled population variance over all steps of all prompts";
  report["summaries"] = rows;
  detail::write_file(dir / "summary.json", report.dump(2) + "\n");
  detail::write_file(dir / "summary.tsv", rows_to_tsv(rows));
  if (!trace_dump.empty()) detail::write_file(dir / "traces.jsonl", trace_dump);
  write_manifest(dir / "manifest.json", ctx, "analyze-entropy", cfg, inputs);
  emit_rows(ctx.out, ctx.format, rows);
  return kOk;
}

struct CorpusOptions {
  std::vector<std::string> paths;
  std::uint64_t min_support = 5;
  std::string lexicon;
  std::string out_dir = "corpus-report";
};

inline int cmd_analyze_corpus(const CorpusOptions& o, RunContext& ctx) {
  namespace fs = std::filesystem;
  Lexicon lexicon = Lexicon::builtin();
  if (!o.lexicon.empty()) lexicon = Lexicon::parse(detail::read_input(o.lexicon, "lexicon"));
  std::vector<fs::path> roots(o.paths.begin(), o.paths.end());
  const auto analysis = analyze_corpus(roots, o.min_support, ctx.jobs, lexicon);
  for (const auto& w : analysis.warnings) ctx.err << "warning: " << w << '\n';

  const fs::path dir = o.out_dir;
  detail::write_file(dir / "histograms.json", histograms_to_json(analysis.histograms).dump(2) + "\n");
  detail::write_file(dir / "transitions.json", analysis.transitions.to_json().dump(2) + "\n");
  std::vector<nlohmann::ordered_json> flat;
  for (const auto& h : analysis.histograms) {
    for (const auto& [prev, n] : h.preceding) {
      nlohmann::ordered_json r;
      r["token"] = h.token;
      r["class"] = class_name(h.cls);
      r["preceding"] = prev;
      r["count"] = n;
      flat.push_back(std::move(r));
    }
  }
  detail::write_file(dir / "histograms.tsv", rows_to_tsv(flat));
  std::vector<nlohmann::ordered_json> rows;
  for (const auto& h : analysis.histograms) {
    nlohmann::ordered_json r;
    r["token"] = h.token;
    r["class"] = class_name(h.cls);
    r["total"] = h.total();
    r["distinct_preceding"] = h.preceding.size();
    rows.push_back(std::move(r));
  }
  nlohmann::ordered_json cfg;
  cfg["paths"] = o.paths;
  cfg["min_support"] = o.min_support;
  cfg["lexicon"] = o.lexicon;
  cfg["files_read"] = analysis.files_read;
  write_manifest(dir / "manifest.json", ctx, "analyze-corpus", cfg);
  emit_rows(ctx.out, ctx.format, rows);
  ctx.err << analysis.files_read << " files, " << analysis.histograms.size() << " histograms, "
          << analysis.transitions.size() << " transition entries\n";
  return kOk;
}

struct EvaluateOptions {
  DecodeOptions decode;
  std::string suite;
  std::vector<std::size_t> ks = {1, 5, 10};
  std::vector<std::string> strategies = {"base", "ta", "c", "c+ta"};
  std::string syn_cmd;
  std::string func_cmd;
  std::string out_dir = "runs";
  std::string suite_name;
  std::optional<double> timeout;
};

inline HarnessConfig harness_from(const EvaluateOptions& o, const RunContext& ctx, const std::string& suite_name) {
  HarnessConfig h;
  h.suite_name = suite_name;
  h.output_dir = o.out_dir;
  if (!o.syn_cmd.empty()) h.syn_command = o.syn_cmd;
  if (!o.func_cmd.empty()) h.func_command = o.func_cmd;
  if (o.timeout) h.timeout = std::chrono::duration<double>(*o.timeout);
  h.jobs = ctx.jobs;
  return h;
}

inline std::string default_suite_name(const std::string& suite_path) {
  return std::filesystem::path(suite_path).stem().string();
}

inline int cmd_evaluate(const EvaluateOptions& o, RunContext& ctx) {
  const auto tasks = parse_task_suite(detail::read_input(o.suite, "task suite"));
  if (tasks.empty()) throw Error(Errc::InvalidConfig, "task suite is empty");
  std::vector<DecodeConfig> configs;
  for (const auto& s : o.strategies) configs.push_back(make_config(s, o.decode, ctx.seed));
  const auto backend = load_backend(o.decode);
  const std::size_t samples = *std::max_element(o.ks.begin(), o.ks.end());
  const std::string suite = o.suite_name.empty() ? default_suite_name(o.suite) : o.suite_name;

  std::vector<nlohmann::ordered_json> rows;
  for (const auto& cfg : configs) {
    const auto label = strategy_label(cfg);
    const auto results = run_suite(*backend, cfg, tasks, samples, harness_from(o, ctx, suite + "/" + label));
    rows.push_back(report_to_json(make_report(label, results, o.ks)));
  }
  const auto dir = std::filesystem::path(o.out_dir) / suite;
  nlohmann::ordered_json report;
  report["schema"] = "rtldecode.suite_report";
  report["version"] = 1;
  report["suite"] = suite;
  report["reports"] = rows;
  detail::write_file(dir / "report.json", report.dump(2) + "\n");
  detail::write_file(dir / "report.tsv", rows_to_tsv(rows));
  auto cfg = o.decode.to_json();
  cfg["suite"] = o.suite;
  cfg["ks"] = o.ks;
  cfg["strategies"] = o.strategies;
  cfg["syn_cmd"] = o.syn_cmd;
  cfg["func_cmd"] = o.func_cmd;
  cfg["timeout_s"] = harness_from(o, ctx, suite).timeout.count();
  write_manifest(dir / "manifest.json", ctx, "evaluate", cfg, {o.suite, o.decode.backend_path});
  emit_rows(ctx.out, ctx.format, rows);
  return kOk;
}

struct CompareOptions {
  EvaluateOptions eval;
  std::vector<double> temps = {0.5, 0.7, 0.9};
  std::string strategy = "base";
};

inline int cmd_compare_temps(const CompareOptions& o, RunContext& ctx) {
  const auto& e = o.eval;
  const auto tasks = parse_task_suite(detail::read_input(e.suite, "task suite"));
  if (tasks.empty()) throw Error(Errc::InvalidConfig, "task suite is empty");
  auto adaptive = make_config(o.strategy, e.decode, ctx.seed);
  adaptive.adaptive_temperature = true;
  if (!(adaptive.base_temperature - adaptive.temperature_delta > 0.0)) {
    throw Error(Errc::InvalidConfig, "--temp minus --delta must be positive");
  }
  const auto backend = load_backend(e.decode);
  const std::size_t samples = *std::max_element(e.ks.begin(), e.ks.end());
  const std::string suite = (e.suite_name.empty() ? default_suite_name(e.suite) : e.suite_name) + "-temps";
  const auto table = compare_temperature_modes(*backend, tasks, o.temps, adaptive, samples, harness_from(e, ctx, suite));
  std::vector<nlohmann::ordered_json> rows;
  for (const auto& row : table) {
    auto j = report_to_json(row.report);
    nlohmann::ordered_json r;
    r["mode"] = row.mode;
    for (const auto& [key, v] : j.items()) {
      if (key != "strategy") r[key] = v;
    }
    rows.push_back(std::move(r));
  }
  const auto dir = std::filesystem::path(e.out_dir) / suite;
  nlohmann::ordered_json report;
  report["schema"] = "rtldecode.temperature_comparison";
  report["version"] = 1;
  report["strategy"] = o.strategy;
  report["rows"] = rows;
  detail::write_file(dir / "comparison.json", report.dump(2) + "\n");
  detail::write_file(dir / "comparison.tsv", rows_to_tsv(rows));
  auto cfg = e.decode.to_json();
  cfg["suite"] = e.suite;
  cfg["temps"] = o.temps;
  cfg["strategy"] = o.strategy;
  cfg["samples"] = samples;
  write_manifest(dir / "manifest.json", ctx, "compare-temps", cfg, {e.suite, e.decode.backend_path});
  emit_rows(ctx.out, ctx.format, rows);
  return kOk;
}

struct BenchOptions {
  DecodeOptions decode;
  std::string baseline = "base";
  std::string candidate = "c";
  std::size_t steps = 1000;
  std::size_t warmup = 200;
  std::size_t prompts = 8;
  std::string out_dir;
};

inline int cmd_bench(BenchOptions o, RunContext& ctx) {
  std::unique_ptr<Backend> backend;
  std::vector<std::vector<TokenId>> prompts;
  if (o.decode.backend_path.empty()) {
    backend = std::make_unique<MockBackend>(reference_mock_spec());
  } else {
    backend = load_backend(o.decode);
  }
  if (o.decode.backend_path.empty()) {
    for (std::size_t i = 0; i < std::max<std::size_t>(1, o.prompts); ++i) prompts.push_back(reference_prompt(i));
  } else {
    prompts.push_back({});
  }
  const auto base = make_config(o.baseline, o.decode, ctx.seed);
  const auto cand = make_config(o.candidate, o.decode, ctx.seed);
  const auto r = measure_overhead(*backend, base, cand, prompts, o.steps, o.warmup);
  nlohmann::ordered_json row;
  row["baseline"] = r.baseline;
  row["candidate"] = r.candidate;
  row["baseline_s_per_token"] = r.baseline_seconds_per_token;
  row["candidate_s_per_token"] = r.candidate_seconds_per_token;
  row["ratio"] = r.ratio;
  row["overhead_pct"] = 100.0 * r.relative_overhead();
  row["steps"] = std::min(r.baseline_steps, r.candidate_steps);
  if (!o.out_dir.empty()) {
    const std::filesystem::path dir = o.out_dir;
    detail::write_file(dir / "bench.json", row.dump(2) + "\n");
    auto cfg = o.decode.to_json();
    cfg["baseline"] = o.baseline;
    cfg["candidate"] = o.candidate;
    cfg["steps"] = o.steps;
    cfg["warmup"] = o.warmup;
    write_manifest(dir / "manifest.json", ctx, "bench", cfg, {o.decode.backend_path});
  }
  emit_rows(ctx.out, ctx.format, {row});
  return kOk;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"rtldecode: contrastive and syntax-aware decoding for Verilog generation"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "TOML/INI file with option values; command-line flags override it");
  app.require_subcommand(1, 1);
  app.fallthrough();

  RunContext ctx{out, err, std::vector<std::string>(argv, argv + argc)};
  app.add_option("--seed", ctx.seed, "Seed for all randomness")->capture_default_str();
  app.add_option("--jobs", ctx.jobs, "Worker threads")->capture_default_str();
  app.add_option("--format", ctx.format, "Report format on stdout")
      ->check(CLI::IsMember({"table", "records"}))
      ->capture_default_str();

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Decode one prompt and write the code plus a step trace");
  gen.decode.add_to(*g, true);
  g->add_option("--strategy", gen.strategy, "greedy | base | nucleus | c | ta | c+ta")->capture_default_str();
  g->add_option("--prompt", gen.prompt, "Prompt text");
  g->add_option("--prompt-file", gen.prompt_file, "File holding the prompt text");
  g->add_option("--out", gen.out_file, "Code output file (default stdout)");
  g->add_option("--trace", gen.trace_file, "Trace output file (default <out>.trace.jsonl)");
  g->add_flag("--trace-timing", gen.trace_timing, "Include per-step wall time in the trace");

  EntropyOptions ent;
  auto* e = app.add_subcommand("analyze-entropy", "Token-entropy traces and pooled mean/variance per strategy");
  ent.decode.add_to(*e, false);
  e->add_option("--strategies", ent.strategies, "Strategies to trace")->delimiter(',')->capture_default_str();
  e->add_option("--prompts", ent.prompts_file, "Prompt file, one prompt per line");
  e->add_option("--reference-prompts", ent.reference_prompts, "Use the first N reference-mock prompts");
  e->add_option("--traces", ent.traces, "Summarize existing trace files instead of decoding");
  e->add_option("--out-dir", ent.out_dir, "Report directory")->capture_default_str();

  CorpusOptions cor;
  auto* c = app.add_subcommand("analyze-corpus", "Preceding-token histograms and class transition table");
  c->add_option("paths", cor.paths, "Verilog files or directories")->required();
  c->add_option("--min-support", cor.min_support, "Minimum support for transition entries")->capture_default_str();
  c->add_option("--lexicon", cor.lexicon, "Token lexicon override file");
  c->add_option("--out-dir", cor.out_dir, "Report directory")->capture_default_str();

  EvaluateOptions ev;
  // On evaluate and compare-temps --k names the metric cut-offs, so the
  // contrastive candidate size is --cands there.
  auto add_eval = [](CLI::App& sub, EvaluateOptions& o) {
    o.decode.add_to(sub, true, "--cands");
    sub.add_option("--suite", o.suite, "Task suite (JSON lines)")->required();
    sub.add_option("--k", o.ks, "Report metrics at these k; max(k) samples per task")->capture_default_str();
    sub.add_option("--syn-cmd", o.syn_cmd, "Synthesis check command template ({code_file}, {task_id})");
    sub.add_option("--func-cmd", o.func_cmd, "Functional check command template when a task has none");
    sub.add_option("--out-dir", o.out_dir, "Run directory")->capture_default_str();
    sub.add_option("--suite-name", o.suite_name, "Name used under the run directory");
    sub.add_option("--timeout", o.timeout, "Checker timeout in seconds (default $DECORTL_CHECKER_TIMEOUT_S or 60)");
  };
  auto* v = app.add_subcommand("evaluate", "Syn@k / Pass@k over a task suite for several strategies");
  add_eval(*v, ev);
  v->add_option("--strategy", ev.strategies, "Strategies, e.g. base,ta,c,c+ta")->delimiter(',')->capture_default_str();

  CompareOptions cmp;
  auto* t = app.add_subcommand("compare-temps", "Fixed versus adaptive temperature pass rates");
  add_eval(*t, cmp.eval);
  t->add_option("--temps", cmp.temps, "Fixed temperatures")->capture_default_str();
  t->add_option("--strategy", cmp.strategy, "Selection strategy for every mode")->capture_default_str();

  BenchOptions ben;
  auto* b = app.add_subcommand("bench", "Per-token decoding time of two strategies");
  ben.decode.add_to(*b, false);
  ben.decode.max_tokens = 64;
  b->get_option("--max-tokens")->default_str("64");
  b->add_option("--baseline", ben.baseline, "Baseline strategy")->capture_default_str();
  b->add_option("--candidate", ben.candidate, "Candidate strategy")->capture_default_str();
  b->add_option("--steps", ben.steps, "Timed steps per strategy")->capture_default_str();
  b->add_option("--warmup", ben.warmup, "Warm-up steps per strategy")->capture_default_str();
  b->add_option("--prompts", ben.prompts, "Reference prompts to cycle through")->capture_default_str();
  b->add_option("--out-dir", ben.out_dir, "Write bench.json and a manifest here");

  std::string desc_file, problems_file, check_tmpl, import_out;
  auto* im = app.add_subcommand("import-verilogeval", "Convert VerilogEval (Human) files to a task suite");
  im->add_option("--descriptions", desc_file, "JSONL with task_id and detail_description")->required();
  im->add_option("--problems", problems_file, "JSONL with task_id and prompt (module header)");
  im->add_option("--check", check_tmpl, "Functional check template stored on every task");
  im->add_option("--out", import_out, "Output suite file")->required();

  std::string mock_out;
  std::uint64_t mock_seed = 2025;
  auto* mk = app.add_subcommand("make-mock", "Write the reference mock model");
  mk->add_option("--out", mock_out, "Output file")->required();
  mk->add_option("--fixture-seed", mock_seed, "Fixture seed")->capture_default_str();

  std::string serve_path;
  auto* sv = app.add_subcommand("serve-mock", "Serve a mock model over the logits wire protocol on stdin/stdout");
  sv->add_option("--backend", serve_path, "Mock model spec file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return cmd_generate(gen, ctx);
    if (*e) return cmd_analyze_entropy(ent, ctx);
    if (*c) return cmd_analyze_corpus(cor, ctx);
    if (*v) return cmd_evaluate(ev, ctx);
    if (*t) return cmd_compare_temps(cmp, ctx);
    if (*b) return cmd_bench(ben, ctx);
    if (*im) {
      const auto tasks = import_verilogeval(detail::read_input(desc_file, "descriptions"),
                                            problems_file.empty() ? std::string() : detail::read_input(problems_file, "problems"),
                                            check_tmpl.empty() ? std::nullopt : std::optional<std::string>(check_tmpl));
      detail::write_file(import_out, write_task_suite(tasks));
      err << tasks.size() << " tasks written to " << import_out << '\n';
      return kOk;
    }
    if (*mk) {
      detail::write_file(mock_out, reference_mock_spec(mock_seed).to_text());
      return kOk;
    }
    if (*sv) {
      const MockBackend backend(parse_mock_spec(detail::read_input(serve_path, "backend spec")));
      serve_wire(backend, std::cin, std::cout);
      return kOk;
    }
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return exit_code_for(ex.code());
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kBackend;
  }
  return kUsage;
}

}  // namespace rtldecode::cli
