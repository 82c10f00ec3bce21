#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "csclir/error.hpp"
#include "csclir/text.hpp"

namespace csclir {

// Single-word lexicon: case-folded source token -> target string (original
// casing, may contain spaces). Insertion order is kept for serialization.
class BilingualLexicon {
 public:
  BilingualLexicon() = default;
  BilingualLexicon(std::string src_lang, std::string tgt_lang)
      : src_lang_(std::move(src_lang)), tgt_lang_(std::move(tgt_lang)) {}

  // Returns false when the folded key is already present (first wins).
  bool insert(std::string_view source, std::string target) {
    std::string key = fold_case(source);
    if (key.empty() || key.find_first_of(" \t\n\r") != std::string::npos) {
      throw InvalidArgument("lexicon key must be a single token: '" + std::string(source) + "'");
    }
    auto [it, inserted] = index_.try_emplace(std::move(key), entries_.size());
    if (!inserted) return false;
    entries_.emplace_back(it->first, std::move(target));
    return true;
  }

  std::optional<std::string_view> lookup(std::string_view token) const {
    auto it = index_.find(fold_case(token));
    if (it == index_.end()) return std::nullopt;
    return std::string_view(entries_[it->second].second);
  }

  // Lookup for a key that is already case-folded.
  std::optional<std::string_view> lookup_folded(const std::string& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return std::string_view(entries_[it->second].second);
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }
  const std::string& src_lang() const noexcept { return src_lang_; }
  const std::string& tgt_lang() const noexcept { return tgt_lang_; }

  friend bool operator==(const BilingualLexicon& a, const BilingualLexicon& b) {
    return a.src_lang_ == b.src_lang_ && a.tgt_lang_ == b.tgt_lang_ && a.entries_ == b.entries_;
  }

 private:
  std::string src_lang_;
  std::string tgt_lang_;
  std::vector<std::pair<std::string, std::string>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Multi-word lexicon keyed by case-folded word n-grams (1 <= n <= max_n).
// Keys are stored as the folded tokens joined with single spaces.
class NGramLexicon {
 public:
  static constexpr std::size_t kDefaultMaxN = 3;

  NGramLexicon() = default;
  NGramLexicon(std::string src_lang, std::string tgt_lang, std::size_t max_n = kDefaultMaxN)
      : src_lang_(std::move(src_lang)), tgt_lang_(std::move(tgt_lang)), max_n_(max_n) {
    if (max_n_ == 0) throw InvalidArgument("max_n must be positive");
  }

  // `key` must hold 1..max_n folded tokens.
  bool insert(std::span<const std::string> key, std::string target) {
    if (key.empty() || key.size() > max_n_) {
      throw InvalidArgument("n-gram key length " + std::to_string(key.size()) +
                            " outside [1, " + std::to_string(max_n_) + "]");
    }
    auto [it, inserted] = entries_.try_emplace(join(key), std::move(target));
    if (inserted) {
      order_.push_back(it->first);
      if (histogram_.size() < key.size() + 1) histogram_.resize(key.size() + 1, 0);
      ++histogram_[key.size()];
    }
    return inserted;
  }

  // Keys are folded on the fly.
  std::optional<std::string_view> lookup(std::span<const std::string_view> tokens) const {
    if (tokens.empty() || tokens.size() > max_n_) return std::nullopt;
    std::string key;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) key.push_back(' ');
      key += fold_case(tokens[i]);
    }
    return lookup_joined(key);
  }

  std::optional<std::string_view> lookup(std::span<const std::string> tokens) const {
    if (tokens.empty() || tokens.size() > max_n_) return std::nullopt;
    std::string key;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) key.push_back(' ');
      key += fold_case(tokens[i]);
    }
    return lookup_joined(key);
  }

  // `key` is folded tokens joined by single spaces.
  std::optional<std::string_view> lookup_joined(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return std::string_view(it->second);
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t max_n() const noexcept { return max_n_; }
  const std::string& src_lang() const noexcept { return src_lang_; }
  const std::string& tgt_lang() const noexcept { return tgt_lang_; }
  // Joined keys in insertion order.
  const std::vector<std::string>& keys() const noexcept { return order_; }
  // histogram()[n] = number of n-gram keys.
  std::vector<std::size_t> histogram() const {
    std::vector<std::size_t> h(max_n_ + 1, 0);
    for (std::size_t n = 0; n < histogram_.size() && n <= max_n_; ++n) h[n] = histogram_[n];
    return h;
  }

  friend bool operator==(const NGramLexicon& a, const NGramLexicon& b) {
    if (a.src_lang_ != b.src_lang_ || a.tgt_lang_ != b.tgt_lang_ || a.max_n_ != b.max_n_ ||
        a.order_ != b.order_) {
      return false;
    }
    for (const auto& k : a.order_) {
      if (a.entries_.at(k) != b.entries_.at(k)) return false;
    }
    return true;
  }

 private:
  static std::string join(std::span<const std::string> key) {
    std::string out;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (i) out.push_back(' ');
      out += key[i];
    }
    return out;
  }

  std::string src_lang_;
  std::string tgt_lang_;
  std::size_t max_n_ = kDefaultMaxN;
  std::unordered_map<std::string, std::string> entries_;
  std::vector<std::string> order_;
  std::vector<std::size_t> histogram_;
};

struct WikiIngestReport {
  std::size_t lines = 0;
  std::size_t kept = 0;
  std::size_t dropped_too_long = 0;
  std::size_t dropped_duplicate = 0;
  std::size_t dropped_empty = 0;  // source title without any word token
};

// Parallel Wikipedia titles, "source-title<TAB>target-title" per line.
// Titles whose source has more than max_n word tokens are dropped at ingest.
inline NGramLexicon parse_wiki_titles(std::istream& in, std::size_t max_n,
                                      WikiIngestReport* report = nullptr,
                                      const std::string& source_name = "<wiki-titles>",
                                      std::string src_lang = "en", std::string tgt_lang = "") {
  NGramLexicon lex(std::move(src_lang), std::move(tgt_lang), max_n);
  WikiIngestReport r;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = chomp(line);
    if (view.empty()) continue;
    const auto tab = view.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(source_name, lineno, "expected 'source<TAB>target'");
    }
    ++r.lines;
    std::vector<std::string> key = folded_words(view.substr(0, tab));
    std::string target(view.substr(tab + 1));
    if (key.empty() || target.empty()) {
      ++r.dropped_empty;
      continue;
    }
    if (key.size() > max_n) {
      ++r.dropped_too_long;
      continue;
    }
    if (lex.insert(key, std::move(target))) {
      ++r.kept;
    } else {
      ++r.dropped_duplicate;
    }
  }
  if (report) *report = r;
  return lex;
}

inline NGramLexicon parse_wiki_titles(const std::string& path, std::size_t max_n,
                                      WikiIngestReport* report = nullptr,
                                      std::string src_lang = "en", std::string tgt_lang = "") {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open wiki titles file: " + path);
  return parse_wiki_titles(in, max_n, report, path, std::move(src_lang), std::move(tgt_lang));
}

// Two-column lexicon. Tab-separated; a line without a tab falls back to
// exactly two whitespace-separated fields (MUSE dictionaries use a space).
inline BilingualLexicon read_lexicon_tsv(std::istream& in, const std::string& source_name,
                                         std::string src_lang = "", std::string tgt_lang = "") {
  BilingualLexicon lex(std::move(src_lang), std::move(tgt_lang));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = chomp(line);
    if (view.empty()) continue;
    std::string_view src, tgt;
    if (const auto tab = view.find('\t'); tab != std::string_view::npos) {
      src = view.substr(0, tab);
      tgt = view.substr(tab + 1);
    } else {
      auto fields = split_ws(view);
      if (fields.size() != 2) throw ParseError(source_name, lineno, "expected two columns");
      src = fields[0];
      tgt = fields[1];
    }
    if (src.empty() || tgt.empty()) throw ParseError(source_name, lineno, "empty column");
    if (src.find(' ') != std::string_view::npos) {
      throw ParseError(source_name, lineno, "source term contains whitespace");
    }
    lex.insert(src, std::string(tgt));
  }
  return lex;
}

inline BilingualLexicon read_lexicon_tsv(const std::string& path, std::string src_lang = "",
                                         std::string tgt_lang = "") {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open lexicon file: " + path);
  return read_lexicon_tsv(in, path, std::move(src_lang), std::move(tgt_lang));
}

inline void write_lexicon_tsv(std::ostream& out, const BilingualLexicon& lex) {
  for (const auto& [src, tgt] : lex.entries()) out << src << '\t' << tgt << '\n';
}

struct LexiconStats {
  std::size_t size = 0;
  std::vector<std::size_t> ngram_histogram;  // index n -> count; [0] unused
};

inline LexiconStats lexicon_stats(const BilingualLexicon& lex) {
  return {lex.size(), {0, lex.size()}};
}

inline LexiconStats lexicon_stats(const NGramLexicon& lex) {
  return {lex.size(), lex.histogram()};
}

// Fraction of tokens (a multiset; repeats count) that have a translation.
// N-gram lexicons are probed with unigram keys.
inline double coverage(const BilingualLexicon& lex, std::span<const std::string> tokens) {
  if (tokens.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& t : tokens) hits += lex.lookup(t) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

inline double coverage(const NGramLexicon& lex, std::span<const std::string> tokens) {
  if (tokens.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& t : tokens) hits += lex.lookup_joined(fold_case(t)) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

inline void write_stats_report(std::ostream& out, const LexiconStats& s,
                               std::string_view name) {
  out << "lexicon " << name << '\n';
  out << "  entries      " << s.size << '\n';
  for (std::size_t n = 1; n < s.ngram_histogram.size(); ++n) {
    out << "  " << n << "-grams      " << s.ngram_histogram[n] << '\n';
  }
}

inline void write_stats_kv(std::ostream& out, const LexiconStats& s, std::string_view prefix) {
  out << prefix << "size=" << s.size << '\n';
  for (std::size_t n = 1; n < s.ngram_histogram.size(); ++n) {
    out << prefix << "ngram_" << n << '=' << s.ngram_histogram[n] << '\n';
  }
}

}  // namespace csclir
