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

// Verilog lexing and token-class assignment.
//
// lex() is total: it never fails, every byte of the input lands in exactly
// one lexeme, and concatenating the lexeme texts reproduces the input. That
// makes it safe to run on broken model output.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rtldecode/error.hpp"

namespace rtldecode {

enum class LexemeKind : std::uint8_t {
  Keyword,
  Operator,
  Punctuation,
  Identifier,
  Literal,
  Comment,
  Whitespace,
  Other,
};

inline std::string_view kind_name(LexemeKind kind) {
  switch (kind) {
    case LexemeKind::Keyword: return "Keyword";
    case LexemeKind::Operator: return "Operator";
    case LexemeKind::Punctuation: return "Punctuation";
    case LexemeKind::Identifier: return "Identifier";
    case LexemeKind::Literal: return "Literal";
    case LexemeKind::Comment: return "Comment";
    case LexemeKind::Whitespace: return "Whitespace";
    case LexemeKind::Other: return "Other";
  }
  return "Other";
}

// A slice of the lexed source. `text` views the source buffer, so the
// source must outlive the lexemes.
struct Lexeme {
  std::string_view text;
  LexemeKind kind = LexemeKind::Other;
  std::size_t begin = 0;
  std::size_t end = 0;

  // Keywords, operators and punctuation; the tokens the corpus statistics
  // are computed over.
  bool syntactic() const {
    return kind == LexemeKind::Keyword || kind == LexemeKind::Operator ||
           kind == LexemeKind::Punctuation;
  }
  bool trivia() const {
    return kind == LexemeKind::Whitespace || kind == LexemeKind::Comment;
  }
};

enum class TokenClass : std::uint8_t { Structural, HighImpact, Neutral };

inline std::string_view class_name(TokenClass cls) {
  switch (cls) {
    case TokenClass::Structural: return "structural";
    case TokenClass::HighImpact: return "high_impact";
    case TokenClass::Neutral: return "neutral";
  }
  return "neutral";
}

inline TokenClass parse_class_name(std::string_view name) {
  if (name == "structural") return TokenClass::Structural;
  if (name == "high_impact") return TokenClass::HighImpact;
  if (name == "neutral") return TokenClass::Neutral;
  throw Error(Errc::ParseError, "unknown token class '" + std::string(name) + "'");
}

namespace detail {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}
inline bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool is_ident_char(char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9') || c == '$';
}
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_base_char(char c) {
  return c == 'b' || c == 'B' || c == 'o' || c == 'O' || c == 'd' ||
         c == 'D' || c == 'h' || c == 'H';
}
inline bool is_based_digit(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F') ||
         c == 'x' || c == 'X' || c == 'z' || c == 'Z' || c == '?' || c == '_';
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Longest first; lex() takes the first entry that matches.
inline constexpr std::array<std::string_view, 38> kOperators = {
    "<<<", ">>>", "===", "!==",                                   //
    "==", "!=", "<=", ">=", "&&", "||", "<<", ">>", "**", "~&",  //
    "~|", "~^", "^~", "->", "=>", "+:", "-:",                    //
    "+", "-", "*", "/", "%", "&", "|", "^", "~", "!", "=", "<",  //
    ">", "?", ":", "@", "#"};

inline bool is_punctuation(char c) {
  return c == ';' || c == ',' || c == '.' || c == '[' || c == ']' ||
         c == '(' || c == ')' || c == '{' || c == '}';
}

inline const std::unordered_set<std::string_view>& verilog_keywords() {
  static const std::unordered_set<std::string_view> kKeywords = {
      "always", "and", "assign", "automatic", "begin", "buf", "bufif0",
      "bufif1", "case", "casex", "casez", "cell", "cmos", "config",
      "deassign", "default", "defparam", "design", "disable", "edge", "else",
      "end", "endcase", "endconfig", "endfunction", "endgenerate",
      "endmodule", "endprimitive", "endspecify", "endtable", "endtask",
      "event", "for", "force", "forever", "fork", "function", "generate",
      "genvar", "highz0", "highz1", "if", "ifnone", "incdir", "include",
      "initial", "inout", "input", "instance", "integer", "join", "large",
      "liblist", "library", "localparam", "logic", "macromodule", "medium",
      "module", "nand", "negedge", "nmos", "nor", "noshowcancelled", "not",
      "notif0", "notif1", "or", "output", "parameter", "pmos", "posedge",
      "primitive", "pull0", "pull1", "pulldown", "pullup",
      "pulsestyle_ondetect", "pulsestyle_onevent", "rcmos", "real",
      "realtime", "reg", "release", "repeat", "rnmos", "rpmos", "rtran",
      "rtranif0", "rtranif1", "scalared", "showcancelled", "signed", "small",
      "specify", "specparam", "strong0", "strong1", "supply0", "supply1",
      "table", "task", "time", "tran", "tranif0", "tranif1", "tri", "tri0",
      "tri1", "triand", "trior", "trireg", "unsigned", "use", "uwire",
      "vectored", "wait", "wand", "weak0", "weak1", "while", "wire", "wor",
      "xnor", "xor"};
  return kKeywords;
}

// Length of the UTF-8 sequence starting at s[pos]; malformed input counts
// as single bytes.
inline std::size_t utf8_length(std::string_view s, std::size_t pos) {
  const auto lead = static_cast<unsigned char>(s[pos]);
  std::size_t want = 1;
  if (lead >= 0xC2 && lead <= 0xDF) want = 2;
  else if (lead >= 0xE0 && lead <= 0xEF) want = 3;
  else if (lead >= 0xF0 && lead <= 0xF4) want = 4;
  if (pos + want > s.size()) return 1;
  for (std::size_t i = 1; i < want; ++i) {
    const auto c = static_cast<unsigned char>(s[pos + i]);
    if (c < 0x80 || c > 0xBF) return 1;
  }
  return want;
}

// Returns the length of a based literal tail ('h1F, 'sb0, ...) at pos, or 0.
inline std::size_t based_tail(std::string_view s, std::size_t pos) {
  if (pos >= s.size() || s[pos] != '\'') return 0;
  std::size_t i = pos + 1;
  if (i < s.size() && (s[i] == 's' || s[i] == 'S')) ++i;
  if (i >= s.size() || !is_base_char(s[i])) return 0;
  ++i;
  const std::size_t digits = i;
  while (i < s.size() && is_based_digit(s[i])) ++i;
  return i == digits ? 0 : i - pos;
}

}  // namespace detail

inline bool is_verilog_keyword(std::string_view word) {
  return detail::verilog_keywords().contains(word);
}

// Maximal-munch lexer.
inline std::vector<Lexeme> lex(std::string_view src) {
  using namespace detail;
  std::vector<Lexeme> out;
  std::size_t pos = 0;
  const std::size_t n = src.size();
  auto emit = [&](std::size_t len, LexemeKind kind) {
    out.push_back(Lexeme{src.substr(pos, len), kind, pos, pos + len});
    pos += len;
  };
  auto find_from = [&](std::string_view needle, std::size_t from) {
    return src.find(needle, from);
  };

  while (pos < n) {
    const char c = src[pos];
    const char next = pos + 1 < n ? src[pos + 1] : '\0';

    if (is_space(c)) {
      std::size_t i = pos;
      while (i < n && is_space(src[i])) ++i;
      emit(i - pos, LexemeKind::Whitespace);
      continue;
    }
    if (c == '/' && next == '/') {
      const std::size_t eol = src.find('\n', pos);
      emit((eol == std::string_view::npos ? n : eol) - pos,
           LexemeKind::Comment);
      continue;
    }
    if (c == '/' && next == '*') {
      const std::size_t close = find_from("*/", pos + 2);
      emit((close == std::string_view::npos ? n : close + 2) - pos,
           LexemeKind::Comment);
      continue;
    }
    // Attribute instance (* ... *). "(*)" is an event control, not an
    // attribute.
    if (c == '(' && next == '*' && !(pos + 2 < n && src[pos + 2] == ')')) {
      const std::size_t close = find_from("*)", pos + 2);
      if (close != std::string_view::npos) {
        emit(close + 2 - pos, LexemeKind::Other);
        continue;
      }
    }
    if (is_ident_start(c)) {
      std::size_t i = pos + 1;
      while (i < n && is_ident_char(src[i])) ++i;
      const auto word = src.substr(pos, i - pos);
      emit(i - pos, is_verilog_keyword(word) ? LexemeKind::Keyword
                                             : LexemeKind::Identifier);
      continue;
    }
    if (c == '$' || c == '`') {
      // System tasks and compiler directives.
      std::size_t i = pos + 1;
      while (i < n && is_ident_char(src[i])) ++i;
      emit(i - pos, LexemeKind::Other);
      continue;
    }
    if (c == '\\') {
      // Escaped identifier: everything up to the next whitespace.
      std::size_t i = pos + 1;
      while (i < n && !is_space(src[i])) ++i;
      emit(i - pos, LexemeKind::Other);
      continue;
    }
    if (is_digit(c)) {
      std::size_t i = pos;
      while (i < n && (is_digit(src[i]) || src[i] == '_')) ++i;
      if (i + 1 < n && src[i] == '.' && is_digit(src[i + 1])) {
        i += 1;
        while (i < n && (is_digit(src[i]) || src[i] == '_')) ++i;
      }
      if (i < n && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < n && is_digit(src[j])) {
          while (j < n && (is_digit(src[j]) || src[j] == '_')) ++j;
          i = j;
        }
      }
      i += based_tail(src, i);
      emit(i - pos, LexemeKind::Literal);
      continue;
    }
    if (c == '\'') {
      if (const std::size_t tail = based_tail(src, pos); tail > 0) {
        emit(tail, LexemeKind::Literal);
      } else if (next == '0' || next == '1' || next == 'x' || next == 'X' ||
                 next == 'z' || next == 'Z') {
        emit(2, LexemeKind::Literal);
      } else {
        emit(1, LexemeKind::Other);
      }
      continue;
    }
    if (c == '"') {
      std::size_t i = pos + 1;
      while (i < n && src[i] != '"' && src[i] != '\n') {
        i += (src[i] == '\\' && i + 1 < n && src[i + 1] != '\n') ? 2 : 1;
      }
      if (i < n && src[i] == '"') ++i;
      emit(i - pos, LexemeKind::Literal);
      continue;
    }
    if (is_punctuation(c)) {
      emit(1, LexemeKind::Punctuation);
      continue;
    }
    bool matched = false;
    for (const auto op : kOperators) {
      if (src.substr(pos, op.size()) == op) {
        emit(op.size(), op == "@" || op == "#" ? LexemeKind::Punctuation
                                               : LexemeKind::Operator);
        matched = true;
        break;
      }
    }
    if (!matched) emit(utf8_length(src, pos), LexemeKind::Other);
  }
  return out;
}

// The two token lexicons that drive temperature adaptation. Lookups are
// exact and case-sensitive after trimming surrounding whitespace.
class Lexicon {
 public:
  Lexicon() = default;

  Lexicon(std::vector<std::string> structural,
          std::vector<std::string> high_impact) {
    for (auto& s : structural) structural_.insert(std::move(s));
    for (auto& s : high_impact) high_impact_.insert(std::move(s));
    for (const auto& s : structural_) {
      if (high_impact_.contains(s)) {
        throw Error(Errc::ValidationError,
                    "token '" + s + "' is listed as both structural and high_impact");
      }
    }
  }

  // Token classes used by the adaptive-temperature rule. `<=` is listed
  // once; it is high-impact only.
  static const Lexicon& builtin() {
    static const Lexicon kBuiltin(
        {"module", "endmodule", "input", "output", "inout", "wire", "reg",
         "logic", "parameter", "assign", "always", "begin", "end", "if",
         "else", "case", "default", "for", "while", ";", ",", ".", "[", "]",
         "(", ")", "{", "}", "posedge", "negedge"},
        {"+", "-", "*", "/", "&", "|", "^", "~", "!", "=", "==", "!=", "<",
         "<=", ">", ">=", "?", ":", "=>", "&&", "||"});
    return kBuiltin;
  }

  // Plain-text override:
  //   [structural]
  //   module
  //   ...
  //   [high_impact]
  //   +
  // Blank lines and lines starting with "##" are ignored. Entries are
  // trimmed, so a literal "#" token is allowed.
  static Lexicon parse(std::string_view text) {
    std::vector<std::string> structural;
    std::vector<std::string> high_impact;
    std::vector<std::string>* section = nullptr;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_no;
      const auto line = detail::trim(raw);
      if (line.empty() || line.starts_with("##")) continue;
      if (line == "[structural]") {
        section = &structural;
      } else if (line == "[high_impact]") {
        section = &high_impact;
      } else if (line.front() == '[' && line.back() == ']') {
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) +
                                          ": unknown section " + std::string(line));
      } else if (section == nullptr) {
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) +
                                          ": token outside of a section");
      } else {
        section->emplace_back(line);
      }
    }
    return Lexicon(std::move(structural), std::move(high_impact));
  }

  TokenClass classify(std::string_view token_text) const {
    const std::string key(detail::trim(token_text));
    if (structural_.contains(key)) return TokenClass::Structural;
    if (high_impact_.contains(key)) return TokenClass::HighImpact;
    return TokenClass::Neutral;
  }

  std::vector<std::string> tokens(TokenClass cls) const {
    const auto& set = cls == TokenClass::Structural ? structural_ : high_impact_;
    std::vector<std::string> out(set.begin(), set.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  bool contains(std::string_view token_text) const {
    return classify(token_text) != TokenClass::Neutral;
  }

 private:
  std::unordered_set<std::string> structural_;
  std::unordered_set<std::string> high_impact_;
};

inline TokenClass classify(std::string_view token_text,
                           const Lexicon& lexicon = Lexicon::builtin()) {
  return lexicon.classify(token_text);
}

struct ClassifiedLexeme {
  Lexeme lexeme;
  TokenClass cls = TokenClass::Neutral;
};

// Drops whitespace and comments; classifies everything else.
inline std::vector<ClassifiedLexeme> classify_stream(
    const std::vector<Lexeme>& lexemes,
    const Lexicon& lexicon = Lexicon::builtin()) {
  std::vector<ClassifiedLexeme> out;
  out.reserve(lexemes.size());
  for (const auto& lx : lexemes) {
    if (lx.trivia()) continue;
    // Identifiers and literals are never looked up; "end" spelled as an
    // escaped name or string must not turn structural.
    const auto cls =
        (lx.kind == LexemeKind::Identifier || lx.kind == LexemeKind::Literal)
            ? TokenClass::Neutral
            : lexicon.classify(lx.text);
    out.push_back({lx, cls});
  }
  return out;
}

}  // namespace rtldecode
