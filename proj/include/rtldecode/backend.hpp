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

// Model interface consumed by the decoder, the table-driven mock model used
// in tests and benchmarks, and an adapter for out-of-process engines.

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtldecode/error.hpp"
#include "rtldecode/process.hpp"

namespace rtldecode {

using TokenId = std::uint32_t;
using LogitVector = std::vector<double>;

class Vocabulary {
 public:
  Vocabulary() = default;

  explicit Vocabulary(std::vector<std::string> tokens)
      : tokens_(std::move(tokens)) {
    if (tokens_.size() < 2) {
      throw Error(Errc::ValidationError, "vocabulary needs at least 2 tokens");
    }
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (tokens_[i].empty()) {
        throw Error(Errc::ValidationError,
                    "token " + std::to_string(i) + " is empty");
      }
      if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
        throw Error(Errc::ValidationError,
                    "duplicate token string at id " + std::to_string(i));
      }
      max_len_ = std::max(max_len_, tokens_[i].size());
    }
  }

  std::size_t size() const { return tokens_.size(); }

  const std::string& text(TokenId id) const {
    check(id);
    return tokens_[id];
  }

  std::optional<TokenId> find(std::string_view text) const {
    const auto it = index_.find(std::string(text));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  void check(TokenId id) const {
    if (id >= tokens_.size()) {
      throw Error(Errc::UnknownTokenId, "token id " + std::to_string(id) +
                                            " out of range for |V|=" +
                                            std::to_string(tokens_.size()));
    }
  }

  // Greedy longest-match tokenization. Bytes no token starts with are
  // skipped.
  std::vector<TokenId> encode(std::string_view text) const {
    std::vector<TokenId> ids;
    std::size_t pos = 0;
    while (pos < text.size()) {
      const std::size_t limit = std::min(max_len_, text.size() - pos);
      bool found = false;
      for (std::size_t len = limit; len > 0; --len) {
        if (auto id = find(text.substr(pos, len))) {
          ids.push_back(*id);
          pos += len;
          found = true;
          break;
        }
      }
      if (!found) ++pos;
    }
    return ids;
  }

  std::string decode(std::span<const TokenId> ids) const {
    std::string out;
    for (const TokenId id : ids) out += text(id);
    return out;
  }

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::size_t max_len_ = 0;
};

// One row per token id, stored row-major. Rows are raw (not normalized).
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  EmbeddingTable(std::size_t dim, std::vector<double> data)
      : dim_(dim), data_(std::move(data)) {
    if (dim_ == 0) throw Error(Errc::ValidationError, "embedding dim must be positive");
    if (data_.size() % dim_ != 0) {
      throw Error(Errc::ValidationError, "embedding data is not a whole number of rows");
    }
    for (std::size_t r = 0; r < rows(); ++r) {
      double norm2 = 0.0;
      for (const double v : row(static_cast<TokenId>(r))) {
        if (!std::isfinite(v)) {
          throw Error(Errc::ValidationError,
                      "embedding row " + std::to_string(r) + " has a non-finite entry");
        }
        norm2 += v * v;
      }
      if (!(norm2 > 0.0)) {
        throw Error(Errc::ValidationError,
                    "embedding row " + std::to_string(r) + " has zero norm");
      }
    }
  }

  std::size_t dim() const { return dim_; }
  std::size_t rows() const { return dim_ == 0 ? 0 : data_.size() / dim_; }

  std::span<const double> row(TokenId id) const {
    if (id >= rows()) {
      throw Error(Errc::UnknownTokenId, "no embedding row for id " + std::to_string(id));
    }
    return {data_.data() + static_cast<std::size_t>(id) * dim_, dim_};
  }

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

// Per-generation handle. Implementations may keep incremental state keyed on
// the context prefix; results must equal the stateless definition.
class Session {
 public:
  virtual ~Session() = default;
  virtual LogitVector next_logits(std::span<const TokenId> context) = 0;
};

// Read-only queries on a Backend are safe from multiple threads. Per-session
// state lives in the Session objects returned by open_session().
class Backend {
 public:
  virtual ~Backend() = default;

  virtual const Vocabulary& vocabulary() const = 0;
  virtual const EmbeddingTable& embeddings() const = 0;
  virtual std::optional<TokenId> eos() const = 0;
  virtual LogitVector next_logits(std::span<const TokenId> context) const = 0;

  virtual std::unique_ptr<Session> open_session() const {
    struct Stateless final : Session {
      explicit Stateless(const Backend& b) : backend(b) {}
      LogitVector next_logits(std::span<const TokenId> context) override {
        return backend.next_logits(context);
      }
      const Backend& backend;
    };
    return std::make_unique<Stateless>(*this);
  }

  std::span<const double> embedding(TokenId id) const {
    vocabulary().check(id);
    return embeddings().row(id);
  }

 protected:
  void check_context(std::span<const TokenId> context) const {
    for (const TokenId id : context) vocabulary().check(id);
  }
};

// ---------------------------------------------------------------------------
// Mock model
// ---------------------------------------------------------------------------

// Logit rule of a mock model.
//  - Steps: row i is returned when the context holds i tokens; past the last
//    row the default row is used.
//  - NGram: rows keyed on the last one or two context ids; lookup tries the
//    two-id key, then the one-id key, then the default row.
struct MockModelSpec {
  enum class Rule { Steps, NGram };

  std::vector<std::string> tokens;
  std::size_t dim = 0;
  std::vector<double> embeddings;  // tokens.size() * dim, row-major
  std::optional<TokenId> eos;
  Rule rule = Rule::NGram;
  std::optional<LogitVector> default_row;
  std::map<std::size_t, LogitVector> steps;
  std::map<std::vector<TokenId>, LogitVector> ngrams;

  // Checks every invariant; throws ValidationError.
  void validate() const;
  std::string to_text() const;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string quote(std::string_view s) {
  return nlohmann::json(std::string(s)).dump();
}

}  // namespace detail

inline void MockModelSpec::validate() const {
  const std::size_t v = tokens.size();
  if (v < 2) throw Error(Errc::ValidationError, "vocabulary needs at least 2 tokens");
  Vocabulary check_vocab{tokens};
  EmbeddingTable check_table{dim, embeddings};
  if (check_table.rows() != v) {
    throw Error(Errc::ValidationError, "expected " + std::to_string(v) +
                                           " embedding rows, got " +
                                           std::to_string(check_table.rows()));
  }
  if (eos && *eos >= v) {
    throw Error(Errc::ValidationError, "eos id " + std::to_string(*eos) +
                                           " out of range for |V|=" + std::to_string(v));
  }
  if (!default_row) throw Error(Errc::ValidationError, "missing default logit row");
  auto check_row = [&](const LogitVector& row, const std::string& what) {
    if (row.size() != v) {
      throw Error(Errc::ValidationError, what + " has " + std::to_string(row.size()) +
                                             " values, expected " + std::to_string(v));
    }
    for (const double x : row) {
      if (!std::isfinite(x)) throw Error(Errc::ValidationError, what + " has a non-finite value");
    }
  };
  check_row(*default_row, "default row");
  for (const auto& [step, row] : steps) check_row(row, "step " + std::to_string(step));
  for (const auto& [key, row] : ngrams) {
    if (key.empty() || key.size() > 2) {
      throw Error(Errc::ValidationError, "n-gram keys must hold one or two ids");
    }
    for (const TokenId id : key) {
      if (id >= v) {
        throw Error(Errc::ValidationError, "n-gram key references id " + std::to_string(id) +
                                               " but |V|=" + std::to_string(v));
      }
    }
    check_row(row, "n-gram row");
  }
  if (rule == Rule::Steps && !ngrams.empty()) {
    throw Error(Errc::ValidationError, "n-gram rows given for a steps rule");
  }
  if (rule == Rule::NGram && !steps.empty()) {
    throw Error(Errc::ValidationError, "step rows given for an ngram rule");
  }
}

inline std::string MockModelSpec::to_text() const {
  std::ostringstream out;
  auto write_row = [&](const LogitVector& row) {
    for (const double x : row) out << ' ' << detail::format_double(x);
    out << '\n';
  };
  out << "mockmodel v1\n";
  out << "vocab " << tokens.size() << '\n';
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out << "token " << i << ' ' << detail::quote(tokens[i]) << '\n';
  }
  if (eos) out << "eos " << *eos << '\n';
  out << "dim " << dim << '\n';
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out << "embedding " << i;
    for (std::size_t d = 0; d < dim; ++d) {
      out << ' ' << detail::format_double(embeddings[i * dim + d]);
    }
    out << '\n';
  }
  out << "rule " << (rule == Rule::Steps ? "steps" : "ngram") << '\n';
  if (default_row) {
    out << "default";
    write_row(*default_row);
  }
  for (const auto& [step, row] : steps) {
    out << "step " << step << " :";
    write_row(row);
  }
  for (const auto& [key, row] : ngrams) {
    out << "row";
    for (const TokenId id : key) out << ' ' << id;
    out << " :";
    write_row(row);
  }
  return out.str();
}

namespace detail {

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no)
      : line_(line), line_no_(line_no) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Errc::ParseError, "line " + std::to_string(line_no_) + ": " + msg);
  }

  bool at_end() {
    skip_space();
    return pos_ >= line_.size();
  }

  std::string_view word() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < line_.size() && line_[pos_] != ' ' && line_[pos_] != '\t') ++pos_;
    return line_.substr(start, pos_ - start);
  }

  template <typename T>
  T integer(const char* field) {
    const auto w = word();
    T value{};
    const auto res = std::from_chars(w.data(), w.data() + w.size(), value);
    if (w.empty() || res.ec != std::errc{} || res.ptr != w.data() + w.size()) {
      fail(std::string("expected integer ") + field + ", got '" + std::string(w) + "'");
    }
    return value;
  }

  double real(const char* field) {
    const auto w = word();
    double value = 0.0;
    const auto res = std::from_chars(w.data(), w.data() + w.size(), value);
    if (w.empty() || res.ec != std::errc{} || res.ptr != w.data() + w.size()) {
      fail(std::string("expected number ") + field + ", got '" + std::string(w) + "'");
    }
    return value;
  }

  std::vector<double> reals(const char* field) {
    std::vector<double> out;
    while (!at_end()) out.push_back(real(field));
    return out;
  }

  std::string quoted(const char* field) {
    skip_space();
    const auto rest = line_.substr(pos_);
    try {
      auto j = nlohmann::json::parse(rest);
      if (!j.is_string()) fail(std::string(field) + " must be a quoted string");
      pos_ = line_.size();
      return j.get<std::string>();
    } catch (const nlohmann::json::exception&) {
      fail(std::string("malformed quoted ") + field);
    }
  }

 private:
  void skip_space() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
  }

  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses the `mockmodel v1` text format:
//
//   mockmodel v1
//   vocab <N>
//   token <id> "<json string>"          (N lines)
//   eos <id>                            (optional)
//   dim <D>
//   embedding <id> <D reals>            (N lines)
//   rule steps|ngram
//   default <N reals>
//   step <t> : <N reals>                (steps rule)
//   row <id> [<id>] : <N reals>         (ngram rule)
//
// Lines starting with '#' and blank lines are ignored.
inline MockModelSpec parse_mock_spec(std::string_view text) {
  MockModelSpec spec;
  std::optional<std::size_t> vocab_size;
  std::vector<bool> have_token;
  std::vector<bool> have_embedding;
  bool have_rule = false;
  bool have_header = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    detail::LineParser p(line, line_no);
    if (p.at_end()) continue;
    if (line.front() == '#') continue;
    const auto key = p.word();

    if (!have_header) {
      if (key != "mockmodel" || p.word() != "v1" || !p.at_end()) {
        p.fail("expected header 'mockmodel v1'");
      }
      have_header = true;
      continue;
    }
    if (key == "vocab") {
      if (vocab_size) p.fail("duplicate vocab");
      vocab_size = p.integer<std::size_t>("vocab size");
      if (*vocab_size < 2) p.fail("vocab size must be at least 2");
      spec.tokens.assign(*vocab_size, {});
      have_token.assign(*vocab_size, false);
      have_embedding.assign(*vocab_size, false);
    } else if (key == "token") {
      if (!vocab_size) p.fail("token before vocab");
      const auto id = p.integer<TokenId>("token id");
      if (id >= *vocab_size) p.fail("token id " + std::to_string(id) + " out of range");
      if (have_token[id]) p.fail("token id " + std::to_string(id) + " defined twice");
      spec.tokens[id] = p.quoted("token text");
      have_token[id] = true;
    } else if (key == "eos") {
      spec.eos = p.integer<TokenId>("eos id");
    } else if (key == "dim") {
      if (!vocab_size) p.fail("dim before vocab");
      if (spec.dim != 0) p.fail("duplicate dim");
      spec.dim = p.integer<std::size_t>("dim");
      if (spec.dim == 0) p.fail("dim must be positive");
      spec.embeddings.assign(*vocab_size * spec.dim, 0.0);
    } else if (key == "embedding") {
      if (spec.dim == 0) p.fail("embedding before dim");
      const auto id = p.integer<TokenId>("embedding id");
      if (id >= *vocab_size) p.fail("embedding id " + std::to_string(id) + " out of range");
      if (have_embedding[id]) p.fail("embedding " + std::to_string(id) + " defined twice");
      const auto values = p.reals("embedding value");
      if (values.size() != spec.dim) {
        p.fail("embedding " + std::to_string(id) + " has " + std::to_string(values.size()) +
               " values, expected " + std::to_string(spec.dim));
      }
      std::copy(values.begin(), values.end(), spec.embeddings.begin() + id * spec.dim);
      have_embedding[id] = true;
    } else if (key == "rule") {
      const auto kind = p.word();
      if (kind == "steps") spec.rule = MockModelSpec::Rule::Steps;
      else if (kind == "ngram") spec.rule = MockModelSpec::Rule::NGram;
      else p.fail("rule must be 'steps' or 'ngram'");
      have_rule = true;
    } else if (key == "default") {
      if (spec.default_row) p.fail("duplicate default row");
      spec.default_row = p.reals("logit");
    } else if (key == "step") {
      if (!have_rule || spec.rule != MockModelSpec::Rule::Steps) p.fail("step row needs 'rule steps'");
      const auto t = p.integer<std::size_t>("step index");
      if (p.word() != ":") p.fail("expected ':' after step index");
      if (!spec.steps.emplace(t, p.reals("logit")).second) p.fail("duplicate step row");
    } else if (key == "row") {
      if (!have_rule || spec.rule != MockModelSpec::Rule::NGram) p.fail("row needs 'rule ngram'");
      std::vector<TokenId> ids;
      for (;;) {
        const auto w = p.word();
        if (w == ":") break;
        if (w.empty()) p.fail("expected ':' after row key");
        TokenId id{};
        const auto res = std::from_chars(w.data(), w.data() + w.size(), id);
        if (res.ec != std::errc{} || res.ptr != w.data() + w.size()) {
          p.fail("bad row key '" + std::string(w) + "'");
        }
        ids.push_back(id);
      }
      if (ids.empty() || ids.size() > 2) p.fail("row key must hold one or two ids");
      if (!spec.ngrams.emplace(std::move(ids), p.reals("logit")).second) p.fail("duplicate row key");
    } else {
      p.fail("unknown field '" + std::string(key) + "'");
    }
  }
  if (!have_header) throw Error(Errc::ParseError, "line 1: expected header 'mockmodel v1'");
  if (!vocab_size) throw Error(Errc::ParseError, "missing vocab");
  for (std::size_t i = 0; i < *vocab_size; ++i) {
    if (!have_token[i]) throw Error(Errc::ParseError, "missing token " + std::to_string(i));
  }
  if (spec.dim == 0) throw Error(Errc::ParseError, "missing dim");
  for (std::size_t i = 0; i < *vocab_size; ++i) {
    if (!have_embedding[i]) throw Error(Errc::ParseError, "missing embedding " + std::to_string(i));
  }
  spec.validate();
  return spec;
}

class MockBackend final : public Backend {
 public:
  explicit MockBackend(MockModelSpec spec)
      : spec_((spec.validate(), std::move(spec))),
        vocab_(spec_.tokens),
        table_(spec_.dim, spec_.embeddings) {
    for (const auto& [key, row] : spec_.ngrams) {
      if (key.size() == 1) unigram_.emplace(key[0], &row);
      else bigram_.emplace(pair_key(key[0], key[1]), &row);
    }
  }

  const Vocabulary& vocabulary() const override { return vocab_; }
  const EmbeddingTable& embeddings() const override { return table_; }
  std::optional<TokenId> eos() const override { return spec_.eos; }
  const MockModelSpec& spec() const { return spec_; }

  LogitVector next_logits(std::span<const TokenId> context) const override {
    check_context(context);
    return *lookup(context);
  }

 private:
  static std::uint64_t pair_key(TokenId a, TokenId b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  const LogitVector* lookup(std::span<const TokenId> context) const {
    if (spec_.rule == MockModelSpec::Rule::Steps) {
      const auto it = spec_.steps.find(context.size());
      return it == spec_.steps.end() ? &*spec_.default_row : &it->second;
    }
    const std::size_t n = context.size();
    if (n >= 2 && !bigram_.empty()) {
      const auto it = bigram_.find(pair_key(context[n - 2], context[n - 1]));
      if (it != bigram_.end()) return it->second;
    }
    if (n >= 1) {
      const auto it = unigram_.find(context[n - 1]);
      if (it != unigram_.end()) return it->second;
    }
    return &*spec_.default_row;
  }

  MockModelSpec spec_;
  Vocabulary vocab_;
  EmbeddingTable table_;
  std::unordered_map<TokenId, const LogitVector*> unigram_;
  std::unordered_map<std::uint64_t, const LogitVector*> bigram_;
};

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::unique_ptr<MockBackend> load_mock(const std::filesystem::path& path) {
  return std::make_unique<MockBackend>(parse_mock_spec(read_text_file(path)));
}

// ---------------------------------------------------------------------------
// Out-of-process engines
// ---------------------------------------------------------------------------
//
// Wire contract, all integers and floats little-endian:
//   request  = u32 count, then `count` u32 token ids (the full context)
//   response = |V| IEEE-754 binary32 logits
// One request is answered before the next is sent.

namespace wire {

inline void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
}

inline std::uint32_t get_u32(std::span<const std::byte> in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::to_integer<std::uint32_t>(in[i]) << (8 * i);
  return v;
}

inline std::vector<std::byte> encode_request(std::span<const TokenId> context) {
  std::vector<std::byte> out;
  out.reserve(4 * (context.size() + 1));
  put_u32(out, static_cast<std::uint32_t>(context.size()));
  for (const TokenId id : context) put_u32(out, id);
  return out;
}

inline std::vector<std::byte> encode_logits(std::span<const double> logits) {
  std::vector<std::byte> out;
  out.reserve(4 * logits.size());
  for (const double x : logits) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
  return out;
}

inline LogitVector decode_logits(std::span<const std::byte> bytes, std::size_t vocab_size) {
  if (bytes.size() != 4 * vocab_size) {
    throw Error(Errc::BackendUnavailable, "logit frame has " + std::to_string(bytes.size()) +
                                              " bytes, expected " + std::to_string(4 * vocab_size));
  }
  LogitVector out(vocab_size);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    out[i] = std::bit_cast<float>(get_u32(bytes.subspan(4 * i, 4)));
    if (!std::isfinite(out[i])) {
      throw Error(Errc::BackendUnavailable, "engine returned a non-finite logit at id " + std::to_string(i));
    }
  }
  return out;
}

}  // namespace wire

// Talks to an engine process over the wire contract. Vocabulary and
// embedding rows come from a local description (a mock spec file; its logit
// rules are ignored). Each session owns its own engine process; direct
// next_logits() calls share one process under a mutex.
class ProcessBackend final : public Backend {
 public:
  ProcessBackend(std::string command, Vocabulary vocab, EmbeddingTable table,
                 std::optional<TokenId> eos)
      : command_(std::move(command)),
        vocab_(std::move(vocab)),
        table_(std::move(table)),
        eos_(eos) {
    if (table_.rows() != vocab_.size()) {
      throw Error(Errc::ValidationError, "embedding rows do not match vocabulary size");
    }
  }

  const Vocabulary& vocabulary() const override { return vocab_; }
  const EmbeddingTable& embeddings() const override { return table_; }
  std::optional<TokenId> eos() const override { return eos_; }

  LogitVector next_logits(std::span<const TokenId> context) const override {
    check_context(context);
    std::lock_guard lock(mutex_);
    if (!shared_) shared_ = std::make_unique<ChildProcess>(command_);
    try {
      return query(*shared_, context);
    } catch (const Error&) {
      shared_.reset();
      throw;
    }
  }

  std::unique_ptr<Session> open_session() const override {
    struct ProcessSession final : Session {
      ProcessSession(const ProcessBackend& b) : backend(b), child(b.command_) {}
      LogitVector next_logits(std::span<const TokenId> context) override {
        backend.check_context(context);
        return backend.query(child, context);
      }
      const ProcessBackend& backend;
      ChildProcess child;
    };
    return std::make_unique<ProcessSession>(*this);
  }

 private:
  LogitVector query(ChildProcess& child, std::span<const TokenId> context) const {
    const auto request = wire::encode_request(context);
    child.write_all(request);
    std::vector<std::byte> response(4 * vocab_.size());
    child.read_exact(response);
    return wire::decode_logits(response, vocab_.size());
  }

  std::string command_;
  Vocabulary vocab_;
  EmbeddingTable table_;
  std::optional<TokenId> eos_;
  mutable std::mutex mutex_;
  mutable std::unique_ptr<ChildProcess> shared_;
};

// Serves a backend over the wire contract until the input stream ends.
// Returns the number of requests answered.
inline std::size_t serve_wire(const Backend& backend, std::istream& in, std::ostream& out) {
  std::size_t served = 0;
  for (;;) {
    std::array<char, 4> header{};
    if (!in.read(header.data(), 4)) break;
    const auto count = wire::get_u32(std::as_bytes(std::span(header)));
    std::vector<char> body(4 * static_cast<std::size_t>(count));
    if (count > 0 && !in.read(body.data(), static_cast<std::streamsize>(body.size()))) break;
    std::vector<TokenId> context(count);
    const auto bytes = std::as_bytes(std::span(body));
    for (std::size_t i = 0; i < count; ++i) context[i] = wire::get_u32(bytes.subspan(4 * i, 4));
    const auto frame = wire::encode_logits(backend.next_logits(context));
    out.write(reinterpret_cast<const char*>(frame.data()), static_cast<std::streamsize>(frame.size()));
    out.flush();
    ++served;
  }
  return served;
}

}  // namespace rtldecode
