#pragma once

// Artificial code-switching: bilingual (BL), multilingual (ML), Wikipedia
// n-gram (Wiki) and lexicon Translate-Test.
//
// Every random decision is drawn from an RngStream keyed on
// (seed, record id, side) and indexed by word-token position, so the output is
// a pure function of the inputs and never of processing order.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csclir/error.hpp"
#include "csclir/hash.hpp"
#include "csclir/lexicon.hpp"
#include "csclir/text.hpp"

namespace csclir {

enum class Strategy { kBilingual, kMultilingual, kWiki, kTranslateTest };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kBilingual: return "bl";
    case Strategy::kMultilingual: return "ml";
    case Strategy::kWiki: return "wiki";
    case Strategy::kTranslateTest: return "translate-test";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view s) {
  if (s == "bl") return Strategy::kBilingual;
  if (s == "ml") return Strategy::kMultilingual;
  if (s == "wiki") return Strategy::kWiki;
  if (s == "translate-test") return Strategy::kTranslateTest;
  throw InvalidArgument("unknown strategy '" + std::string(s) + "'");
}

// Which text of a record is being switched; part of the rng key.
enum class Side : std::uint64_t { kQuery = 0, kDoc = 1, kNegative = 2 };

struct SwitchPolicy {
  Strategy strategy = Strategy::kBilingual;
  double p = 0.5;
  std::vector<std::string> query_langs;
  std::vector<std::string> doc_langs;
  std::uint64_t seed = 0;

  // Translate-Test always translates every token.
  double effective_p() const noexcept {
    return strategy == Strategy::kTranslateTest ? 1.0 : p;
  }

  const std::vector<std::string>& pool(Side side) const noexcept {
    return side == Side::kQuery ? query_langs : doc_langs;
  }

  void validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in [0, 1]");
    if (query_langs.empty() || doc_langs.empty()) {
      throw InvalidArgument("query and document language pools must be non-empty");
    }
    if ((strategy == Strategy::kBilingual || strategy == Strategy::kTranslateTest) &&
        (query_langs.size() != 1 || doc_langs.size() != 1)) {
      throw InvalidArgument(std::string(to_string(strategy)) +
                            " needs exactly one language per side");
    }
  }
};

struct SwitchOutcome {
  std::string text;
  std::size_t tokens_total = 0;     // all tokens, separators included
  std::size_t tokens_eligible = 0;  // word tokens
  std::size_t tokens_switched = 0;  // word tokens replaced (Wiki: covered by a window)
  std::size_t ngrams_replaced = 0;  // replacement operations
  std::map<std::string, std::size_t> per_language;  // switched word tokens by language

  double rate() const noexcept {
    return tokens_eligible ? static_cast<double>(tokens_switched) / tokens_eligible : 0.0;
  }
};

template <typename Lexicon>
struct PooledLexicon {
  std::string language;
  const Lexicon* lexicon = nullptr;
};

namespace detail {

inline void count_tokens(const std::vector<Token>& tokens, SwitchOutcome& out) {
  out.tokens_total = tokens.size();
  for (const Token& t : tokens) out.tokens_eligible += t.is_word() ? 1 : 0;
}

}  // namespace detail

// Each word token is switched with probability p into one language drawn
// uniformly from `pool`. A success on a lexicon miss leaves the token as is.
inline SwitchOutcome switch_multilingual(std::string_view text,
                                         std::span<const PooledLexicon<BilingualLexicon>> pool,
                                         double p, const RngStream& rng) {
  if (pool.empty()) throw InvalidArgument("multilingual switching needs at least one lexicon");
  SwitchOutcome out;
  const auto tokens = tokenize(text);
  detail::count_tokens(tokens, out);
  out.text.reserve(text.size());
  std::uint64_t word_index = 0;
  for (const Token& t : tokens) {
    if (!t.is_word()) {
      out.text.append(t.surface);
      continue;
    }
    const std::uint64_t i = word_index++;
    std::optional<std::string_view> hit;
    std::size_t lang = 0;
    if (rng.bernoulli(p, i, Draw::kSwitch)) {
      lang = pool.size() == 1 ? 0 : rng.pick(pool.size(), i, Draw::kLanguage);
      hit = pool[lang].lexicon->lookup(t.surface);
    }
    if (hit) {
      out.text.append(*hit);
      ++out.tokens_switched;
      ++out.ngrams_replaced;
      ++out.per_language[pool[lang].language];
    } else {
      out.text.append(t.surface);
    }
  }
  return out;
}

inline SwitchOutcome switch_bilingual(std::string_view text, const BilingualLexicon& lexicon,
                                      double p, const RngStream& rng,
                                      std::string language = "") {
  if (language.empty()) language = lexicon.tgt_lang();
  const PooledLexicon<BilingualLexicon> one[] = {{std::move(language), &lexicon}};
  return switch_multilingual(text, one, p, rng);
}

// Translates every covered word token; OOV tokens pass through.
inline SwitchOutcome translate_test(std::string_view text, const BilingualLexicon& lexicon) {
  return switch_bilingual(text, lexicon, 1.0, RngStream{});
}

// One language per text; longest-first, non-overlapping n-gram replacement
// scanning word tokens left to right. A window only spans word tokens
// separated by whitespace.
inline SwitchOutcome switch_wiki(std::string_view text,
                                 std::span<const PooledLexicon<NGramLexicon>> pool,
                                 const RngStream& rng) {
  if (pool.empty()) throw InvalidArgument("wiki switching needs at least one lexicon");
  const auto& chosen = pool[pool.size() == 1 ? 0 : rng.pick(pool.size(), 0, Draw::kLanguage)];
  const NGramLexicon& lex = *chosen.lexicon;

  SwitchOutcome out;
  const auto tokens = tokenize(text);
  detail::count_tokens(tokens, out);

  std::vector<std::size_t> words;  // token positions of word tokens
  std::vector<std::string> folded;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].is_word()) {
      words.push_back(i);
      folded.push_back(fold_case(tokens[i].surface));
    }
  }
  // joined_with_prev[w]: word w follows word w-1 with only whitespace between.
  std::vector<bool> joined_with_prev(words.size(), false);
  for (std::size_t w = 1; w < words.size(); ++w) {
    bool only_space = true;
    for (std::size_t k = words[w - 1] + 1; k < words[w]; ++k) {
      only_space = only_space && tokens[k].kind == TokenKind::kSpace;
    }
    joined_with_prev[w] = only_space;
  }

  out.text.reserve(text.size());
  std::size_t copied_to = 0;  // byte offset in `text`
  std::string key;
  std::size_t w = 0;
  while (w < words.size()) {
    std::size_t span = 1;
    while (span < lex.max_n() && w + span < words.size() && joined_with_prev[w + span]) ++span;
    std::size_t matched = 0;
    std::optional<std::string_view> hit;
    for (std::size_t n = span; n >= 1 && !hit; --n) {
      key.clear();
      for (std::size_t k = 0; k < n; ++k) {
        if (k) key.push_back(' ');
        key += folded[w + k];
      }
      hit = lex.lookup_joined(key);
      if (hit) matched = n;
    }
    if (!hit) {
      ++w;
      continue;
    }
    const Token& first = tokens[words[w]];
    const Token& last = tokens[words[w + matched - 1]];
    out.text.append(text.substr(copied_to, first.begin - copied_to));
    out.text.append(*hit);
    copied_to = last.end;
    out.tokens_switched += matched;
    ++out.ngrams_replaced;
    out.per_language[chosen.language] += matched;
    w += matched;
  }
  out.text.append(text.substr(copied_to));
  return out;
}

// Lexicons available to a run, keyed by target language.
struct LexiconSet {
  std::map<std::string, BilingualLexicon> words;
  std::map<std::string, NGramLexicon> ngrams;

  // Throws if any language of the policy lacks the lexicon kind its strategy needs.
  void require(const SwitchPolicy& policy) const {
    for (const auto* langs : {&policy.query_langs, &policy.doc_langs}) {
      for (const auto& lang : *langs) {
        const bool ok = policy.strategy == Strategy::kWiki ? ngrams.contains(lang)
                                                           : words.contains(lang);
        if (!ok) throw NotFoundError("no lexicon loaded for language '" + lang + "'");
      }
    }
  }

  std::vector<PooledLexicon<BilingualLexicon>> word_pool(
      const std::vector<std::string>& langs) const {
    std::vector<PooledLexicon<BilingualLexicon>> pool;
    for (const auto& lang : langs) pool.push_back({lang, &words.at(lang)});
    return pool;
  }

  std::vector<PooledLexicon<NGramLexicon>> ngram_pool(
      const std::vector<std::string>& langs) const {
    std::vector<PooledLexicon<NGramLexicon>> pool;
    for (const auto& lang : langs) pool.push_back({lang, &ngrams.at(lang)});
    return pool;
  }
};

// Switches one text of a record with the pool of its side.
inline SwitchOutcome switch_text(std::string_view text, const SwitchPolicy& policy,
                                 const LexiconSet& lexicons, std::string_view record_id,
                                 Side side) {
  const RngStream rng(policy.seed, record_id, static_cast<std::uint64_t>(side));
  const auto& langs = policy.pool(side);
  switch (policy.strategy) {
    case Strategy::kWiki:
      return switch_wiki(text, lexicons.ngram_pool(langs), rng);
    case Strategy::kBilingual:
    case Strategy::kMultilingual:
    case Strategy::kTranslateTest:
      return switch_multilingual(text, lexicons.word_pool(langs), policy.effective_p(), rng);
  }
  return {};
}

struct PairOutcome {
  SwitchOutcome query;
  SwitchOutcome doc;
};

inline PairOutcome switch_pair(std::string_view query, std::string_view doc,
                               const SwitchPolicy& policy, const LexiconSet& lexicons,
                               std::string_view record_id) {
  return {switch_text(query, policy, lexicons, record_id, Side::kQuery),
          switch_text(doc, policy, lexicons, record_id, Side::kDoc)};
}

// Aggregate switch statistics over a run.
struct SwitchStats {
  std::size_t texts = 0;
  std::size_t texts_with_switch = 0;
  std::size_t tokens_total = 0;
  std::size_t tokens_eligible = 0;
  std::size_t tokens_switched = 0;
  std::size_t ngrams_replaced = 0;
  std::map<std::string, std::size_t> per_language;

  void add(const SwitchOutcome& o) {
    ++texts;
    texts_with_switch += o.ngrams_replaced > 0 ? 1 : 0;
    tokens_total += o.tokens_total;
    tokens_eligible += o.tokens_eligible;
    tokens_switched += o.tokens_switched;
    ngrams_replaced += o.ngrams_replaced;
    for (const auto& [lang, n] : o.per_language) per_language[lang] += n;
  }

  void merge(const SwitchStats& s) {
    texts += s.texts;
    texts_with_switch += s.texts_with_switch;
    tokens_total += s.tokens_total;
    tokens_eligible += s.tokens_eligible;
    tokens_switched += s.tokens_switched;
    ngrams_replaced += s.ngrams_replaced;
    for (const auto& [lang, n] : s.per_language) per_language[lang] += n;
  }

  double switch_rate() const noexcept {
    return tokens_eligible ? static_cast<double>(tokens_switched) / tokens_eligible : 0.0;
  }
  double texts_with_switch_fraction() const noexcept {
    return texts ? static_cast<double>(texts_with_switch) / texts : 0.0;
  }
};

}  // namespace csclir
