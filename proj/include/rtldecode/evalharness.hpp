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

// Batch generation and scoring: k seeded samples per task, optional external
// synthesis and functional checkers, any-of-k aggregation, fixed versus
// adaptive temperature comparison and per-token timing.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtldecode/analysis.hpp"
#include "rtldecode/backend.hpp"
#include "rtldecode/decoder.hpp"
#include "rtldecode/error.hpp"
#include "rtldecode/lex.hpp"
#include "rtldecode/parallel.hpp"
#include "rtldecode/process.hpp"

namespace rtldecode {

struct Task {
  std::string id;
  std::string prompt;
  std::optional<std::string> check_command;  // functional check template
};

namespace detail {

inline nlohmann::json parse_json_line(std::string_view line, std::size_t line_no, std::string_view what) {
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Errc::ParseError, std::string(what) + " line " + std::to_string(line_no) + ": " + ex.what());
  }
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    fn(line, line_no);
  }
}

}  // namespace detail

// Task suite: one JSON object per line,
//   {"id": "...", "prompt": "...", "check": "optional command template"}
inline std::vector<Task> parse_task_suite(std::string_view text) {
  std::vector<Task> tasks;
  std::set<std::string> seen;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto j = detail::parse_json_line(line, line_no, "task suite");
    auto fail = [&](const std::string& msg) {
      throw Error(Errc::ParseError, "task suite line " + std::to_string(line_no) + ": " + msg);
    };
    if (!j.is_object()) fail("expected an object");
    if (!j.contains("id") || !j["id"].is_string()) fail("missing string field 'id'");
    if (!j.contains("prompt") || !j["prompt"].is_string()) fail("missing string field 'prompt'");
    Task t{j["id"].get<std::string>(), j["prompt"].get<std::string>(), std::nullopt};
    if (j.contains("check") && !j["check"].is_null()) {
      if (!j["check"].is_string()) fail("'check' must be a string");
      t.check_command = j["check"].get<std::string>();
    }
    if (!seen.insert(t.id).second) fail("duplicate task id '" + t.id + "'");
    tasks.push_back(std::move(t));
  });
  return tasks;
}

inline std::string write_task_suite(const std::vector<Task>& tasks) {
  std::string out;
  for (const auto& t : tasks) {
    nlohmann::ordered_json j;
    j["id"] = t.id;
    j["prompt"] = t.prompt;
    if (t.check_command) j["check"] = *t.check_command;
    out += j.dump() + '\n';
  }
  return out;
}

// Converts VerilogEval (Human) release files. `descriptions` holds
// {"task_id", "detail_description"} lines; the optional `problems` file holds
// {"task_id", "prompt", ...} lines whose module header is appended to the
// description. `check_template` becomes every task's functional check.
inline std::vector<Task> import_verilogeval(std::string_view descriptions,
                                            std::string_view problems = {},
                                            const std::optional<std::string>& check_template = {}) {
  std::map<std::string, std::string> headers;
  detail::for_each_line(problems, [&](std::string_view line, std::size_t line_no) {
    const auto j = detail::parse_json_line(line, line_no, "problems");
    if (j.contains("task_id") && j.contains("prompt")) {
      headers[j["task_id"].get<std::string>()] = j["prompt"].get<std::string>();
    }
  });
  std::vector<Task> tasks;
  std::set<std::string> seen;
  detail::for_each_line(descriptions, [&](std::string_view line, std::size_t line_no) {
    const auto j = detail::parse_json_line(line, line_no, "descriptions");
    if (!j.contains("task_id") || !j["task_id"].is_string()) {
      throw Error(Errc::ParseError, "descriptions line " + std::to_string(line_no) + ": missing task_id");
    }
    Task t;
    t.id = j["task_id"].get<std::string>();
    if (j.contains("detail_description")) t.prompt = j["detail_description"].get<std::string>();
    else if (j.contains("prompt")) t.prompt = j["prompt"].get<std::string>();
    else throw Error(Errc::ParseError, "descriptions line " + std::to_string(line_no) + ": no description");
    if (auto it = headers.find(t.id); it != headers.end()) t.prompt += "\n\n" + it->second;
    t.check_command = check_template;
    if (!seen.insert(t.id).second) {
      throw Error(Errc::ParseError, "descriptions line " + std::to_string(line_no) + ": duplicate task_id");
    }
    tasks.push_back(std::move(t));
  });
  return tasks;
}

// ---------------------------------------------------------------------------
// Code extraction
// ---------------------------------------------------------------------------

enum class Extraction { Fenced, ModuleSpan, Whole };

inline std::string_view extraction_name(Extraction e) {
  switch (e) {
    case Extraction::Fenced: return "fenced";
    case Extraction::ModuleSpan: return "module_span";
    case Extraction::Whole: return "whole";
  }
  return "whole";
}

inline Extraction parse_extraction(std::string_view s) {
  if (s == "fenced") return Extraction::Fenced;
  if (s == "module_span") return Extraction::ModuleSpan;
  if (s == "whole") return Extraction::Whole;
  throw Error(Errc::ParseError, "unknown extraction mode '" + std::string(s) + "'");
}

struct ExtractedCode {
  std::string code;
  Extraction mode = Extraction::Whole;
};

// First fenced block, else the span from the first `module` keyword to the
// last `endmodule`, else the whole text.
inline ExtractedCode extract_code(std::string_view raw) {
  if (const auto open = raw.find("```"); open != std::string_view::npos) {
    const auto body = raw.find('\n', open);
    if (body != std::string_view::npos) {
      const auto close = raw.find("```", body + 1);
      if (close != std::string_view::npos) {
        return {std::string(raw.substr(body + 1, close - body - 1)), Extraction::Fenced};
      }
    }
  }
  std::optional<std::size_t> begin;
  std::optional<std::size_t> end;
  for (const auto& lx : lex(raw)) {
    if (lx.kind != LexemeKind::Keyword) continue;
    if (lx.text == "module" && !begin) begin = lx.begin;
    if (lx.text == "endmodule" && begin) end = lx.end;
  }
  if (begin && end) return {std::string(raw.substr(*begin, *end - *begin)), Extraction::ModuleSpan};
  return {std::string(raw), Extraction::Whole};
}

// ---------------------------------------------------------------------------
// Running a suite
// ---------------------------------------------------------------------------

inline std::chrono::duration<double> default_checker_timeout() {
  if (const char* env = std::getenv("DECORTL_CHECKER_TIMEOUT_S"); env && *env) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0) return std::chrono::duration<double>(v);
    throw Error(Errc::InvalidConfig, "DECORTL_CHECKER_TIMEOUT_S must be a positive number of seconds");
  }
  return std::chrono::duration<double>(60.0);
}

struct HarnessConfig {
  std::string suite_name = "suite";
  std::filesystem::path output_dir = "runs";
  bool persist = true;
  // Command templates; {code_file} and {task_id} are replaced by
  // single-quoted values. Exit status 0 means pass.
  std::optional<std::string> syn_command;
  std::optional<std::string> func_command;  // used when the task has none
  std::chrono::duration<double> timeout = default_checker_timeout();
  std::size_t jobs = 1;
};

struct SampleResult {
  std::string task_id;
  std::size_t sample = 0;
  std::uint64_t seed = 0;
  std::string code;
  Extraction extraction = Extraction::Whole;
  std::optional<bool> syn_ok;   // nullopt = unknown
  std::optional<bool> func_ok;  // nullopt = unknown
  bool syn_timed_out = false;
  bool func_timed_out = false;
  RepetitionScore repetition;
  std::size_t token_count = 0;
  bool hit_eos = false;
  double mean_token_seconds = 0.0;  // not persisted in results.jsonl

  friend bool operator==(const SampleResult&, const SampleResult&) = default;
};

namespace detail {

inline std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

inline std::string substitute(std::string tmpl, std::string_view key, std::string_view value) {
  for (std::size_t pos = tmpl.find(key); pos != std::string::npos; pos = tmpl.find(key, pos + value.size())) {
    tmpl.replace(pos, key.size(), value);
  }
  return tmpl;
}

inline std::string safe_path_component(std::string_view s) {
  std::string out;
  for (const char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '-' || c == '.';
    out += ok ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

inline nlohmann::ordered_json tri_json(const std::optional<bool>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline std::optional<bool> tri_from(const nlohmann::json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<bool>();
}

}  // namespace detail

inline std::string expand_command(const std::string& tmpl, const std::string& code_file, const std::string& task_id) {
  return detail::substitute(detail::substitute(tmpl, "{code_file}", detail::shell_quote(code_file)), "{task_id}",
                            detail::shell_quote(task_id));
}

struct CheckOutcome {
  std::optional<bool> ok;
  bool timed_out = false;
};

// Exit status 127 (command not found) is a configuration error.
inline CheckOutcome run_checker(const std::string& command, std::chrono::duration<double> timeout,
                                const std::optional<std::string>& log_path) {
  const auto r = run_command(command, timeout, log_path);
  if (r.timed_out) return {std::nullopt, true};
  if (r.exit_code == 127) throw Error(Errc::CheckerSpawnError, "checker command not found: " + command);
  return {r.exit_code == 0, false};
}

inline nlohmann::ordered_json sample_to_json(const SampleResult& s) {
  nlohmann::ordered_json j;
  j["task_id"] = s.task_id;
  j["sample"] = s.sample;
  j["seed"] = s.seed;
  j["extraction"] = extraction_name(s.extraction);
  j["syn_ok"] = detail::tri_json(s.syn_ok);
  j["func_ok"] = detail::tri_json(s.func_ok);
  j["syn_timed_out"] = s.syn_timed_out;
  j["func_timed_out"] = s.func_timed_out;
  j["max_ngram_repeat"] = s.repetition.max_ngram_repeat;
  j["repeat_ngram"] = s.repetition.ngram;
  j["repetitive"] = s.repetition.repetitive;
  j["tokens"] = s.token_count;
  j["hit_eos"] = s.hit_eos;
  j["code"] = s.code;
  return j;
}

inline SampleResult sample_from_json(const nlohmann::json& j) {
  try {
    SampleResult s;
    s.task_id = j.at("task_id").get<std::string>();
    s.sample = j.at("sample").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.extraction = parse_extraction(j.at("extraction").get<std::string>());
    s.syn_ok = detail::tri_from(j.at("syn_ok"));
    s.func_ok = detail::tri_from(j.at("func_ok"));
    s.syn_timed_out = j.at("syn_timed_out").get<bool>();
    s.func_timed_out = j.at("func_timed_out").get<bool>();
    s.repetition.max_ngram_repeat = j.at("max_ngram_repeat").get<std::size_t>();
    s.repetition.ngram = j.at("repeat_ngram").get<std::size_t>();
    s.repetition.repetitive = j.at("repetitive").get<bool>();
    s.token_count = j.at("tokens").get<std::size_t>();
    s.hit_eos = j.at("hit_eos").get<bool>();
    s.code = j.at("code").get<std::string>();
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Errc::ParseError, std::string("sample record: ") + ex.what());
  }
}

inline std::vector<SampleResult> read_results(std::string_view jsonl) {
  std::vector<SampleResult> out;
  detail::for_each_line(jsonl, [&](std::string_view line, std::size_t line_no) {
    out.push_back(sample_from_json(detail::parse_json_line(line, line_no, "results")));
  });
  return out;
}

inline std::filesystem::path suite_dir(const HarnessConfig& h) { return h.output_dir / h.suite_name; }

// Generates k samples per task with seeds config.seed + sample index, scores
// them and, when h.persist is set, writes
//   <output_dir>/<suite>/<task>/<sample>.v
//   <output_dir>/<suite>/results.jsonl   (deterministic fields only)
//   <output_dir>/<suite>/timing.jsonl
//   <output_dir>/<suite>/manifest.json
inline std::vector<SampleResult> run_suite(const Backend& backend, const DecodeConfig& config,
                                           const std::vector<Task>& tasks, std::size_t k,
                                           const HarnessConfig& h) {
  namespace fs = std::filesystem;
  if (k == 0) throw Error(Errc::InvalidConfig, "k must be at least 1");
  config.validate(backend.vocabulary().size());
  {
    std::set<std::string> ids;
    for (const auto& t : tasks) {
      if (!ids.insert(t.id).second) throw Error(Errc::InvalidConfig, "duplicate task id '" + t.id + "'");
    }
  }
  const fs::path dir = suite_dir(h);
  // Checkers read the code from disk, so files are always written when a
  // checker is configured.
  bool any_func = h.func_command.has_value();
  for (const auto& t : tasks) any_func = any_func || t.check_command.has_value();
  const bool write_files = h.persist || h.syn_command || any_func;
  if (write_files) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
  }

  std::vector<SampleResult> results(tasks.size() * k);
  parallel_for(results.size(), h.jobs, [&](std::size_t job) {
    const auto& task = tasks[job / k];
    const std::size_t sample = job % k;
    DecodeConfig cfg = config;
    cfg.seed = config.seed + sample;
    const auto prompt = backend.vocabulary().encode(task.prompt);
    const auto gen = decode(backend, cfg, prompt);
    const auto raw = backend.vocabulary().decode(gen.tokens);
    auto extracted = extract_code(raw);

    SampleResult& s = results[job];
    s.task_id = task.id;
    s.sample = sample;
    s.seed = cfg.seed;
    s.code = std::move(extracted.code);
    s.extraction = extracted.mode;
    s.repetition = repetition_score(s.code);
    s.token_count = gen.steps.size();
    s.hit_eos = gen.hit_eos;
    s.mean_token_seconds = gen.steps.empty() ? 0.0 : gen.seconds / static_cast<double>(gen.steps.size());

    if (!write_files) return;
    const fs::path task_dir = dir / detail::safe_path_component(task.id);
    std::error_code ec;
    fs::create_directories(task_dir, ec);
    const fs::path code_file = task_dir / (std::to_string(sample) + ".v");
    {
      std::ofstream out(code_file, std::ios::binary);
      out << s.code;
      if (!out) throw Error(Errc::IoError, "cannot write " + code_file.string());
    }
    if (h.syn_command) {
      const auto log = (task_dir / (std::to_string(sample) + ".syn.log")).string();
      fs::remove(log, ec);
      const auto out = run_checker(expand_command(*h.syn_command, code_file.string(), task.id), h.timeout, log);
      s.syn_ok = out.ok;
      s.syn_timed_out = out.timed_out;
    }
    const auto& func = task.check_command ? task.check_command : h.func_command;
    if (func) {
      const auto log = (task_dir / (std::to_string(sample) + ".func.log")).string();
      fs::remove(log, ec);
      const auto out = run_checker(expand_command(*func, code_file.string(), task.id), h.timeout, log);
      s.func_ok = out.ok;
      s.func_timed_out = out.timed_out;
    }
  });

  if (h.persist) {
    std::ofstream res(dir / "results.jsonl", std::ios::binary);
    std::ofstream timing(dir / "timing.jsonl", std::ios::binary);
    for (const auto& s : results) {
      res << sample_to_json(s).dump() << '\n';
      nlohmann::ordered_json tj;
      tj["task_id"] = s.task_id;
      tj["sample"] = s.sample;
      tj["tokens"] = s.token_count;
      tj["mean_token_seconds"] = s.mean_token_seconds;
      timing << tj.dump() << '\n';
    }
    nlohmann::ordered_json m;
    m["schema"] = "rtldecode.run_manifest";
    m["version"] = 1;
    m["suite"] = h.suite_name;
    m["strategy"] = strategy_label(config);
    m["k"] = k;
    m["base_seed"] = config.seed;
    m["base_temperature"] = config.base_temperature;
    m["adaptive_temperature"] = config.adaptive_temperature;
    m["temperature_delta"] = config.temperature_delta;
    m["max_tokens"] = config.max_tokens;
    m["syn_command"] = h.syn_command ? nlohmann::ordered_json(*h.syn_command) : nlohmann::ordered_json(nullptr);
    m["func_command"] = h.func_command ? nlohmann::ordered_json(*h.func_command) : nlohmann::ordered_json(nullptr);
    m["checker_timeout_s"] = h.timeout.count();
    auto& ids = m["tasks"] = nlohmann::ordered_json::array();
    for (const auto& t : tasks) ids.push_back(t.id);
    std::ofstream(dir / "manifest.json", std::ios::binary) << m.dump(2) << '\n';
    if (!res || !timing) throw Error(Errc::IoError, "cannot write results under " + dir.string());
  }
  return results;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

// True when any of the first k samples (by sample index) satisfies pred.
template <typename Pred>
bool at_k(std::vector<const SampleResult*> samples, Pred&& pred, std::size_t k) {
  if (k == 0 || samples.size() < k) {
    throw Error(Errc::InsufficientSamples,
                "need " + std::to_string(k) + " samples, have " + std::to_string(samples.size()));
  }
  std::sort(samples.begin(), samples.end(), [](auto* a, auto* b) { return a->sample < b->sample; });
  return std::any_of(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(k),
                     [&](const SampleResult* s) { return pred(*s); });
}

inline std::map<std::string, std::vector<const SampleResult*>> group_by_task(const std::vector<SampleResult>& results) {
  std::map<std::string, std::vector<const SampleResult*>> by_task;
  for (const auto& r : results) by_task[r.task_id].push_back(&r);
  return by_task;
}

// Fraction of tasks for which at_k holds.
template <typename Pred>
double metric_at_k(const std::vector<SampleResult>& results, Pred&& pred, std::size_t k) {
  const auto by_task = group_by_task(results);
  if (by_task.empty()) throw Error(Errc::EmptyInput, "no results");
  std::size_t hits = 0;
  for (const auto& [_, samples] : by_task) hits += at_k(samples, pred, k) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(by_task.size());
}

inline bool syn_pass(const SampleResult& s) { return s.syn_ok.value_or(false); }
inline bool func_pass(const SampleResult& s) { return s.func_ok.value_or(false); }

struct SuiteReport {
  std::string strategy;
  std::vector<std::size_t> ks;
  // Null when no sample received a verdict from that checker.
  std::map<std::size_t, std::optional<double>> syn_at;
  std::map<std::size_t, std::optional<double>> pass_at;
  std::size_t tasks = 0;
  std::size_t samples = 0;
  std::size_t syn_unknown = 0;
  std::size_t func_unknown = 0;
  std::size_t timeouts = 0;
  std::size_t repetitive = 0;
  std::optional<double> sample_pass_rate;  // fraction of samples with func_ok
  double mean_token_seconds = 0.0;         // token-weighted
  std::size_t tokens = 0;

  friend bool operator==(const SuiteReport&, const SuiteReport&) = default;
};

inline SuiteReport make_report(const std::string& strategy, const std::vector<SampleResult>& results,
                               std::vector<std::size_t> ks) {
  SuiteReport r;
  r.strategy = strategy;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  r.ks = ks;
  r.tasks = group_by_task(results).size();
  r.samples = results.size();
  std::size_t syn_known = 0;
  std::size_t func_known = 0;
  std::size_t func_ok = 0;
  double weighted = 0.0;
  for (const auto& s : results) {
    if (s.syn_ok) ++syn_known;
    else ++r.syn_unknown;
    if (s.func_ok) {
      ++func_known;
      func_ok += *s.func_ok ? 1 : 0;
    } else {
      ++r.func_unknown;
    }
    r.timeouts += (s.syn_timed_out ? 1 : 0) + (s.func_timed_out ? 1 : 0);
    r.repetitive += s.repetition.repetitive ? 1 : 0;
    r.tokens += s.token_count;
    weighted += s.mean_token_seconds * static_cast<double>(s.token_count);
  }
  r.mean_token_seconds = r.tokens ? weighted / static_cast<double>(r.tokens) : 0.0;
  if (func_known) r.sample_pass_rate = static_cast<double>(func_ok) / static_cast<double>(func_known);
  for (const std::size_t k : ks) {
    r.syn_at[k] = syn_known ? std::optional<double>(metric_at_k(results, syn_pass, k)) : std::nullopt;
    r.pass_at[k] = func_known ? std::optional<double>(metric_at_k(results, func_pass, k)) : std::nullopt;
  }
  return r;
}

inline nlohmann::ordered_json report_to_json(const SuiteReport& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["strategy"] = r.strategy;
  j["tasks"] = r.tasks;
  j["samples"] = r.samples;
  for (const std::size_t k : r.ks) j["syn@" + std::to_string(k)] = opt(r.syn_at.at(k));
  for (const std::size_t k : r.ks) j["pass@" + std::to_string(k)] = opt(r.pass_at.at(k));
  j["sample_pass_rate"] = opt(r.sample_pass_rate);
  j["syn_unknown"] = r.syn_unknown;
  j["func_unknown"] = r.func_unknown;
  j["checker_timeouts"] = r.timeouts;
  j["repetitive"] = r.repetitive;
  j["tokens"] = r.tokens;
  j["mean_token_seconds"] = r.mean_token_seconds;
  return j;
}

// ---------------------------------------------------------------------------
// Fixed versus adaptive temperature
// ---------------------------------------------------------------------------

struct TemperatureModeRow {
  std::string mode;  // "fixed T=0.5" or "adaptive T0=0.7"
  DecodeConfig config;
  SuiteReport report;
};

// One suite run per fixed temperature (adaptation off) plus one with the
// adaptive config, all with the adaptive config's strategy, seeds and tasks.
inline std::vector<TemperatureModeRow> compare_temperature_modes(const Backend& backend, const std::vector<Task>& tasks,
                                                                 const std::vector<double>& fixed_temperatures,
                                                                 const DecodeConfig& adaptive, std::size_t k,
                                                                 const HarnessConfig& h) {
  if (fixed_temperatures.empty()) throw Error(Errc::InvalidConfig, "need at least one fixed temperature");
  std::vector<TemperatureModeRow> rows;
  auto run_mode = [&](const std::string& mode, const std::string& dir_name, DecodeConfig cfg) {
    HarnessConfig hh = h;
    hh.suite_name = h.suite_name + "/" + dir_name;
    const auto results = run_suite(backend, cfg, tasks, k, hh);
    rows.push_back({mode, cfg, make_report(mode, results, {1, k})});
  };
  for (const double t : fixed_temperatures) {
    DecodeConfig cfg = adaptive;
    cfg.adaptive_temperature = false;
    cfg.base_temperature = t;
    const std::string ts = detail::format_double(t);
    run_mode("fixed T=" + ts, "fixed-" + ts, cfg);
  }
  DecodeConfig cfg = adaptive;
  cfg.adaptive_temperature = true;
  const std::string ts = detail::format_double(adaptive.base_temperature);
  run_mode("adaptive T0=" + ts, "adaptive-" + ts, cfg);
  return rows;
}

// ---------------------------------------------------------------------------
// Decoding overhead
// ---------------------------------------------------------------------------

struct OverheadReport {
  std::string baseline;
  std::string candidate;
  std::size_t baseline_steps = 0;
  std::size_t candidate_steps = 0;
  double baseline_seconds_per_token = 0.0;
  double candidate_seconds_per_token = 0.0;
  double ratio = 0.0;  // candidate / baseline

  double relative_overhead() const { return ratio - 1.0; }
};

// Times at least `steps` decode steps per config after a warm-up, running
// the two configs in alternating generations over the same prompts so that
// drift affects both equally. The configs may differ only in strategy.
inline OverheadReport measure_overhead(const Backend& backend, const DecodeConfig& baseline,
                                       const DecodeConfig& candidate, const std::vector<std::vector<TokenId>>& prompts,
                                       std::size_t steps = 1000, std::size_t warmup_steps = 200) {
  if (prompts.empty()) throw Error(Errc::EmptyInput, "no prompts to time");
  if (baseline.adaptive_temperature != candidate.adaptive_temperature ||
      baseline.base_temperature != candidate.base_temperature ||
      baseline.temperature_delta != candidate.temperature_delta || baseline.max_tokens != candidate.max_tokens ||
      baseline.seed != candidate.seed) {
    throw Error(Errc::InvalidConfig, "overhead configs must be identical except for the strategy");
  }
  OverheadReport r;
  r.baseline = strategy_label(baseline);
  r.candidate = strategy_label(candidate);

  auto run_one = [&](const DecodeConfig& cfg, std::size_t round, double& seconds, std::size_t& count) {
    DecodeConfig c = cfg;
    c.seed = cfg.seed + round;
    const auto res = decode(backend, c, prompts[round % prompts.size()]);
    for (const auto& rec : res.steps) seconds += rec.seconds;
    count += res.steps.size();
  };

  double ignore_s = 0.0;
  std::size_t ignore_n = 0;
  for (std::size_t round = 0; ignore_n < 2 * warmup_steps; ++round) {
    run_one(baseline, round, ignore_s, ignore_n);
    run_one(candidate, round, ignore_s, ignore_n);
  }
  double base_s = 0.0;
  double cand_s = 0.0;
  // Order flips every round and again on each pass over the prompts.
  for (std::size_t round = 0; r.baseline_steps < steps || r.candidate_steps < steps; ++round) {
    if ((round + round / prompts.size()) % 2 == 0) {
      run_one(baseline, round, base_s, r.baseline_steps);
      run_one(candidate, round, cand_s, r.candidate_steps);
    } else {
      run_one(candidate, round, cand_s, r.candidate_steps);
      run_one(baseline, round, base_s, r.baseline_steps);
    }
  }
  r.baseline_seconds_per_token = base_s / static_cast<double>(r.baseline_steps);
  r.candidate_seconds_per_token = cand_s / static_cast<double>(r.candidate_steps);
  r.ratio = r.candidate_seconds_per_token / r.baseline_seconds_per_token;
  return r;
}

}  // namespace rtldecode
