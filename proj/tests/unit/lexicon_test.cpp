#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "csclir/lexicon.hpp"

namespace csclir {
namespace {

const std::string kFixtures = CSCLIR_FIXTURES;

std::vector<std::string> words(std::initializer_list<const char*> w) {
  return {w.begin(), w.end()};
}

TEST(WikiTitles, FixtureIngest) {
  WikiIngestReport r;
  const auto lex = parse_wiki_titles(kFixtures + "/wiki_titles_it.tsv", 3, &r, "en", "it");
  EXPECT_EQ(r.lines, 10u);
  EXPECT_EQ(r.kept, 7u);
  EXPECT_EQ(r.dropped_too_long, 1u);
  EXPECT_EQ(r.dropped_duplicate, 2u);
  EXPECT_EQ(lex.size(), 7u);
  EXPECT_EQ(*lex.lookup(words({"credit", "card"})), "carta di credito");
  EXPECT_EQ(*lex.lookup(words({"Card"})), "carta");
  EXPECT_EQ(*lex.lookup(words({"mercury", "planet"})), "Mercurio (astronomia)");
  EXPECT_FALSE(lex.lookup(words({"united", "states", "of", "america"})));
  EXPECT_FALSE(lex.lookup(words({"united", "states"})));
  const auto h = lex.histogram();
  EXPECT_EQ(h[1], 5u);
  EXPECT_EQ(h[2], 2u);
  EXPECT_EQ(h[3], 0u);
}

TEST(WikiTitles, TenLinesTwoDuplicatesGiveEight) {
  std::ostringstream file;
  for (int i = 0; i < 8; ++i) file << "term" << i << "\tziel" << i << '\n';
  file << "term3\tanders\n";
  file << "TERM5\tanders\n";
  std::istringstream in(file.str());
  WikiIngestReport r;
  const auto lex = parse_wiki_titles(in, 3, &r);
  EXPECT_EQ(r.lines, 10u);
  EXPECT_EQ(lex.size(), 8u);
  EXPECT_EQ(*lex.lookup(words({"term3"})), "ziel3");
  EXPECT_EQ(*lex.lookup(words({"term5"})), "ziel5");
}

TEST(WikiTitles, MaxNControlsDropping) {
  const std::string data = "a\tx\na b\ty\na b c\tz\n";
  for (std::size_t n = 1; n <= 3; ++n) {
    std::istringstream in(data);
    WikiIngestReport r;
    const auto lex = parse_wiki_titles(in, n, &r);
    EXPECT_EQ(lex.size(), n);
    EXPECT_EQ(r.dropped_too_long, 3 - n);
  }
}

TEST(WikiTitles, MissingTabIsParseErrorWithLine) {
  std::istringstream in("a\tb\n\nno tab here\n");
  try {
    parse_wiki_titles(in, 3);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(WikiTitles, PunctuationOnlySourceIsDropped) {
  std::istringstream in("(!)\tx\nok\ty\n");
  WikiIngestReport r;
  const auto lex = parse_wiki_titles(in, 3, &r);
  EXPECT_EQ(lex.size(), 1u);
  EXPECT_EQ(r.dropped_empty, 1u);
}

TEST(BilingualLexicon, CaseFoldedLookupKeepsTargetCasing) {
  BilingualLexicon lex("en", "de");
  EXPECT_TRUE(lex.insert("House", "Haus"));
  EXPECT_FALSE(lex.insert("house", "Gebäude"));
  EXPECT_EQ(*lex.lookup("HOUSE"), "Haus");
  EXPECT_EQ(*lex.lookup("house"), "Haus");
  EXPECT_FALSE(lex.lookup("houses"));
  EXPECT_THROW(lex.insert("two words", "x"), InvalidArgument);
  EXPECT_THROW(lex.insert("", "x"), InvalidArgument);
}

TEST(BilingualLexicon, TsvAndSpaceSeparatedInput) {
  std::istringstream in("cat\tKatze\ndog Hund\nice cream\tEiscreme extra\n");
  // The third line has a tab but a space inside the source.
  EXPECT_THROW(read_lexicon_tsv(in, "x"), ParseError);
  std::istringstream ok("cat\tKatze\ndog Hund\nmilk\tdie Milch\n");
  const auto lex = read_lexicon_tsv(ok, "ok");
  EXPECT_EQ(lex.size(), 3u);
  EXPECT_EQ(*lex.lookup("dog"), "Hund");
  EXPECT_EQ(*lex.lookup("milk"), "die Milch");
}

TEST(BilingualLexicon, MalformedLineReportsLine) {
  std::istringstream in("a b\nc d\ne f g\n");
  try {
    read_lexicon_tsv(in, "bad");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(read_lexicon_tsv(kFixtures + "/nope.tsv"), NotFoundError);
}

TEST(BilingualLexicon, WriteReadIsIdempotent) {
  std::mt19937_64 gen(19);
  std::uniform_int_distribution<int> letter('a', 'z');
  std::uniform_int_distribution<int> len(1, 8);
  BilingualLexicon lex;
  for (int i = 0; i < 500; ++i) {
    std::string s, t;
    for (int j = len(gen); j > 0; --j) s.push_back(static_cast<char>(letter(gen)));
    for (int j = len(gen); j > 0; --j) t.push_back(static_cast<char>(letter(gen) - 32));
    lex.insert(s, t);
  }
  std::ostringstream once;
  write_lexicon_tsv(once, lex);
  std::istringstream in(once.str());
  const auto back = read_lexicon_tsv(in, "rt");
  EXPECT_EQ(back, lex);
  std::ostringstream twice;
  write_lexicon_tsv(twice, back);
  EXPECT_EQ(once.str(), twice.str());
  // Every key resolves to its first target.
  for (const auto& [k, v] : lex.entries()) EXPECT_EQ(*back.lookup(k), v);
}

TEST(LexiconStats, CountsAndCoverage) {
  BilingualLexicon lex;
  lex.insert("a", "x");
  lex.insert("b", "y");
  const auto s = lexicon_stats(lex);
  EXPECT_EQ(s.size, 2u);
  EXPECT_EQ(s.ngram_histogram[1], 2u);
  // Multiset: repeats count.
  const auto toks = words({"a", "a", "a", "c", "B"});
  EXPECT_DOUBLE_EQ(coverage(lex, toks), 0.8);
  EXPECT_DOUBLE_EQ(coverage(lex, std::vector<std::string>{}), 0.0);
  std::ostringstream kv;
  write_stats_kv(kv, s, "en-de.");
  EXPECT_EQ(kv.str(), "en-de.size=2\nen-de.ngram_1=2\n");
}

TEST(NGramLexicon, KeyLengthLimits) {
  NGramLexicon lex("en", "it", 2);
  EXPECT_THROW(lex.insert(words({"a", "b", "c"}), "x"), InvalidArgument);
  EXPECT_THROW(lex.insert(std::vector<std::string>{}, "x"), InvalidArgument);
  EXPECT_TRUE(lex.insert(words({"a", "b"}), "x"));
  EXPECT_FALSE(lex.lookup(words({"a", "b", "c"})));
  EXPECT_EQ(*lex.lookup(words({"A", "B"})), "x");
  EXPECT_THROW(NGramLexicon("en", "it", 0), InvalidArgument);
}

}  // namespace
}  // namespace csclir
