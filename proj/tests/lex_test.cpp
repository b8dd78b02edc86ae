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

#include <string>
#include <vector>

#include "rtldecode/lex.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace rtldecode {
namespace {

using K = LexemeKind;

struct Tok {
  std::string text;
  K kind;
  bool operator==(const Tok&) const = default;
};

std::vector<Tok> toks(std::string_view src) {
  std::vector<Tok> out;
  for (const auto& lx : lex(src)) out.push_back({std::string(lx.text), lx.kind});
  return out;
}

std::vector<Tok> solid(std::string_view src) {
  std::vector<Tok> out;
  for (const auto& lx : lex(src)) {
    if (!lx.trivia()) out.push_back({std::string(lx.text), lx.kind});
  }
  return out;
}

void PrintTo(const Tok& t, std::ostream* os) { *os << kind_name(t.kind) << "(" << t.text << ")"; }

using testing::kHighImpact;
using testing::kStructural;
using testing::random_identifier;

TEST(Lex, AssignStatement) {
  EXPECT_EQ(toks("assign y = a & b;"),
            (std::vector<Tok>{{"assign", K::Keyword},
                              {" ", K::Whitespace},
                              {"y", K::Identifier},
                              {" ", K::Whitespace},
                              {"=", K::Operator},
                              {" ", K::Whitespace},
                              {"a", K::Identifier},
                              {" ", K::Whitespace},
                              {"&", K::Operator},
                              {" ", K::Whitespace},
                              {"b", K::Identifier},
                              {";", K::Punctuation}}));
}

TEST(Lex, MaximalMunchNonblocking) {
  EXPECT_EQ(toks("a<=b"), (std::vector<Tok>{{"a", K::Identifier}, {"<=", K::Operator}, {"b", K::Identifier}}));
}

TEST(Lex, LineComment) {
  EXPECT_EQ(toks("// comment\nmodule"),
            (std::vector<Tok>{{"// comment", K::Comment}, {"\n", K::Whitespace}, {"module", K::Keyword}}));
}

TEST(Lex, BlockCommentAndUnterminated) {
  EXPECT_EQ(toks("a/* x */b"), (std::vector<Tok>{{"a", K::Identifier}, {"/* x */", K::Comment}, {"b", K::Identifier}}));
  EXPECT_EQ(toks("/* open"), (std::vector<Tok>{{"/* open", K::Comment}}));
}

TEST(Lex, EmptyInput) { EXPECT_TRUE(lex("").empty()); }

TEST(Lex, Literals) {
  EXPECT_EQ(solid("8'hFF 4'b10_x1 'd3 12 3.5 \"s\\\"q\""),
            (std::vector<Tok>{{"8'hFF", K::Literal},
                              {"4'b10_x1", K::Literal},
                              {"'d3", K::Literal},
                              {"12", K::Literal},
                              {"3.5", K::Literal},
                              {"\"s\\\"q\"", K::Literal}}));
}

TEST(Lex, AttributesDirectivesSystemNames) {
  EXPECT_EQ(solid("(* keep *) wire w;"), (std::vector<Tok>{{"(* keep *)", K::Other},
                                                         {"wire", K::Keyword},
                                                         {"w", K::Identifier},
                                                         {";", K::Punctuation}}));
  EXPECT_EQ(solid("always @(*)"), (std::vector<Tok>{{"always", K::Keyword},
                                                   {"@", K::Punctuation},
                                                   {"(", K::Punctuation},
                                                   {"*", K::Operator},
                                                   {")", K::Punctuation}}));
  EXPECT_EQ(solid("`define W 8"), (std::vector<Tok>{{"`define", K::Other}, {"W", K::Identifier}, {"8", K::Literal}}));
  EXPECT_EQ(solid("$display(x)"), (std::vector<Tok>{{"$display", K::Other},
                                                   {"(", K::Punctuation},
                                                   {"x", K::Identifier},
                                                   {")", K::Punctuation}}));
}

TEST(Lex, IdentifiersWithDollarAndKeywordsCaseSensitive) {
  EXPECT_EQ(solid("a$b _x Module module"), (std::vector<Tok>{{"a$b", K::Identifier},
                                                            {"_x", K::Identifier},
                                                            {"Module", K::Identifier},
                                                            {"module", K::Keyword}}));
}

TEST(Lex, UnknownCharactersAreOneLexemeEach) {
  const auto t = toks("\x01\xc3\xa9");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0], (Tok{"\x01", K::Other}));
  EXPECT_EQ(t[1], (Tok{"\xc3\xa9", K::Other}));
}

std::string random_utf8(Rng& rng, std::size_t n) {
  static const std::vector<std::string> pieces = {
      "module", "endmodule", " ", "\n", "\t", "a", "b1", "_q", "$", "'", "8'hF", "\"", "\\", "/", "*", "(", ")",
      "<",      "=",         ">", "!", "&", "|", "^", "~", "@", "#", "`", ";",    ",",  ".",  "[", "]", "{",
      "}",      "0",         "9", "?", ":", "-", "+", "%", "\xc3\xa9", "\xe2\x82\xac", "\xf0\x9f\x98\x80"};
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < 0.1) {
      s.push_back(static_cast<char>(testing::uniform_int(rng, 0x20, 0x7e)));
    } else {
      s += pieces[testing::uniform_int(rng, 0, pieces.size() - 1)];
    }
  }
  return s;
}

TEST(LexProperty, RoundTripAndContiguousSpans) {
  Rng rng(17);
  for (int iter = 0; iter < 2000; ++iter) {
    const auto src = random_utf8(rng, testing::uniform_int(rng, 0, 60));
    const auto lexemes = lex(src);
    std::string joined;
    std::size_t pos = 0;
    for (const auto& lx : lexemes) {
      ASSERT_EQ(lx.begin, pos) << src;
      ASSERT_LT(lx.begin, lx.end) << src;
      ASSERT_EQ(lx.text, std::string_view(src).substr(lx.begin, lx.end - lx.begin));
      joined += lx.text;
      pos = lx.end;
    }
    ASSERT_EQ(joined, src);
  }
}

TEST(LexProperty, RawBytesRoundTrip) {
  Rng rng(5);
  for (int iter = 0; iter < 1000; ++iter) {
    std::string src(testing::uniform_int(rng, 0, 40), '\0');
    for (char& c : src) c = static_cast<char>(rng.next_u64() & 0xff);
    std::string joined;
    for (const auto& lx : lex(src)) joined += lx.text;
    ASSERT_EQ(joined, src);
  }
}

TEST(LexProperty, IdentifiersFollowGrammar) {
  Rng rng(23);
  for (int iter = 0; iter < 500; ++iter) {
    const auto src = random_utf8(rng, 30);
    for (const auto& lx : lex(src)) {
      if (lx.kind != K::Identifier) continue;
      const char c0 = lx.text.front();
      ASSERT_TRUE(std::isalpha(static_cast<unsigned char>(c0)) || c0 == '_') << lx.text;
      for (const char c : lx.text) {
        ASSERT_TRUE(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$') << lx.text;
      }
      ASSERT_FALSE(is_verilog_keyword(lx.text)) << lx.text;
    }
  }
}

TEST(LexProperty, Deterministic) {
  const std::string src = "always @(posedge clk) q <= d; // x";
  EXPECT_EQ(toks(src), toks(src));
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify("module"), TokenClass::Structural);
  EXPECT_EQ(classify("&&"), TokenClass::HighImpact);
  EXPECT_EQ(classify("my_signal"), TokenClass::Neutral);
}

TEST(Classify, LexiconExactness) {
  ASSERT_EQ(kStructural.size(), 30u);
  for (const auto& t : kStructural) EXPECT_EQ(classify(t), TokenClass::Structural) << t;
  for (const auto& t : kHighImpact) EXPECT_EQ(classify(t), TokenClass::HighImpact) << t;
  auto s = Lexicon::builtin().tokens(TokenClass::Structural);
  auto h = Lexicon::builtin().tokens(TokenClass::HighImpact);
  auto ks = kStructural;
  auto kh = kHighImpact;
  std::sort(ks.begin(), ks.end());
  std::sort(kh.begin(), kh.end());
  EXPECT_EQ(s, ks);
  EXPECT_EQ(h, kh);
}

TEST(Classify, NonblockingIsHighImpactOnly) {
  EXPECT_EQ(classify("<="), TokenClass::HighImpact);
  const auto s = Lexicon::builtin().tokens(TokenClass::Structural);
  EXPECT_EQ(std::count(s.begin(), s.end(), "<="), 0);
}

TEST(Classify, TrimmedCaseSensitiveVerbatim) {
  EXPECT_EQ(classify(" end\n"), TokenClass::Structural);
  EXPECT_EQ(classify("\t;"), TokenClass::Structural);
  EXPECT_EQ(classify("Module"), TokenClass::Neutral);
  EXPECT_EQ(classify("endm"), TokenClass::Neutral);
  EXPECT_EQ(classify("end;"), TokenClass::Neutral);
  EXPECT_EQ(classify(""), TokenClass::Neutral);
  EXPECT_EQ(classify("function"), TokenClass::Neutral);
  EXPECT_EQ(classify("generate"), TokenClass::Neutral);
}

TEST(ClassifyProperty, RandomIdentifiersAreNeutral) {
  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    const auto id = random_identifier(rng);
    ASSERT_EQ(classify(id), TokenClass::Neutral) << id;
  }
}

TEST(ClassifyProperty, MaximalMunchOperators) {
  for (const auto& op : kHighImpact) {
    if (op.size() < 2) continue;
    const std::string src = "a" + op + "b";
    const auto lexemes = lex(src);
    ASSERT_EQ(lexemes.size(), 3u) << src;
    EXPECT_EQ(lexemes[1].text, op);
    EXPECT_EQ(classify(lexemes[1].text), classify(op)) << src;
  }
}

TEST(ClassifyStream, IfBegin) {
  const auto out = classify_stream(lex("if (a) begin"));
  std::vector<std::pair<std::string, TokenClass>> got;
  for (const auto& c : out) got.emplace_back(std::string(c.lexeme.text), c.cls);
  EXPECT_EQ(got, (std::vector<std::pair<std::string, TokenClass>>{{"if", TokenClass::Structural},
                                                                    {"(", TokenClass::Structural},
                                                                    {"a", TokenClass::Neutral},
                                                                    {")", TokenClass::Structural},
                                                                    {"begin", TokenClass::Structural}}));
}

TEST(ClassifyStream, EmptyAndOperators) {
  EXPECT_TRUE(classify_stream(lex("")).empty());
  const auto out = classify_stream(lex("x + y"));
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].cls, TokenClass::Neutral);
  EXPECT_EQ(out[1].cls, TokenClass::HighImpact);
  EXPECT_EQ(out[2].cls, TokenClass::Neutral);
}

TEST(ClassifyStream, LiteralsNeverClassified) {
  const auto out = classify_stream(lex("\"end\" x"));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].lexeme.kind, K::Literal);
  EXPECT_EQ(out[0].cls, TokenClass::Neutral);
}

TEST(Lexicon, ParseOverride) {
  const auto lx = Lexicon::parse(
      "## experiment\n"
      "[structural]\n"
      "  module \n"
      "#\n"
      "\n"
      "[high_impact]\n"
      "<=\n");
  EXPECT_EQ(lx.classify("module"), TokenClass::Structural);
  EXPECT_EQ(lx.classify("#"), TokenClass::Structural);
  EXPECT_EQ(lx.classify("<="), TokenClass::HighImpact);
  EXPECT_EQ(lx.classify("begin"), TokenClass::Neutral);
}

TEST(Lexicon, ParseErrors) {
  auto code_of = [](const std::string& text) {
    try {
      (void)Lexicon::parse(text);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::IoError;
  };
  EXPECT_EQ(code_of("module\n"), Errc::ParseError);
  EXPECT_EQ(code_of("[keywords]\nmodule\n"), Errc::ParseError);
  EXPECT_EQ(code_of("[structural]\n<=\n[high_impact]\n<=\n"), Errc::ValidationError);
}

TEST(Lexicon, ClassNames) {
  for (const auto c : {TokenClass::Structural, TokenClass::HighImpact, TokenClass::Neutral}) {
    EXPECT_EQ(parse_class_name(class_name(c)), c);
  }
  EXPECT_THROW(parse_class_name("loud"), Error);
}

}  // namespace
}  // namespace rtldecode
