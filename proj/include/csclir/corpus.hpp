#pragma once

// MS MARCO-style collections, queries, triples, TREC qrels and runs, plus the
// corpus-level transforms (language mixing, triple code-switching).

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "csclir/codeswitch.hpp"
#include "csclir/error.hpp"
#include "csclir/hash.hpp"
#include "csclir/parallel.hpp"
#include "csclir/text.hpp"

namespace csclir {

struct IdText {
  std::string id;
  std::string text;

  friend bool operator==(const IdText&, const IdText&) = default;
};

// id -> text, in file order. Used for both passages and queries.
class TextTable {
 public:
  void add(std::string id, std::string text) {
    if (id.empty()) throw InvalidArgument("empty id");
    if (text.empty()) throw InvalidArgument("empty text for id '" + id + "'");
    if (!index_.emplace(id, records_.size()).second) {
      throw InvalidArgument("duplicate id '" + id + "'");
    }
    records_.push_back({std::move(id), std::move(text)});
  }

  const std::string* find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &records_[it->second].text;
  }
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  const std::vector<IdText>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

  friend bool operator==(const TextTable& a, const TextTable& b) {
    return a.records_ == b.records_;
  }

 private:
  std::vector<IdText> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

using Collection = TextTable;
using QuerySet = TextTable;

namespace detail {

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open " + path);
  return in;
}

inline int parse_int(std::string_view field, const std::string& source, std::size_t lineno,
                     std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(source, lineno, "bad " + std::string(what) + " '" + std::string(field) + "'");
  }
  return value;
}

inline double parse_double(std::string_view field, const std::string& source,
                           std::size_t lineno, std::string_view what) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(source, lineno, "bad " + std::string(what) + " '" + std::string(field) + "'");
  }
  return value;
}

// Shortest representation that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

// "id<TAB>text" per line; the text is everything after the first tab.
inline TextTable read_id_text(std::istream& in, const std::string& source = "<tsv>") {
  TextTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = chomp(line);
    if (view.empty()) continue;
    const auto tab = view.find('\t');
    if (tab == std::string_view::npos) throw ParseError(source, lineno, "expected 'id<TAB>text'");
    try {
      table.add(std::string(view.substr(0, tab)), std::string(view.substr(tab + 1)));
    } catch (const InvalidArgument& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return table;
}

inline Collection read_collection(const std::string& path) {
  auto in = detail::open_input(path);
  return read_id_text(in, path);
}

inline QuerySet read_queries(const std::string& path) {
  auto in = detail::open_input(path);
  return read_id_text(in, path);
}

inline void write_id_text(std::ostream& out, const TextTable& table) {
  for (const auto& r : table.records()) out << r.id << '\t' << r.text << '\n';
}

// ---------------------------------------------------------------------------
// Triples

struct Triple {
  std::string query;
  std::string positive;
  std::string negative;
  // Set for id triples ("qid<TAB>pos-pid<TAB>neg-pid") after joining.
  std::optional<std::string> ids;

  // Key for the record's random streams.
  std::string record_id() const {
    return ids ? *ids : query + '\t' + positive + '\t' + negative;
  }

  friend bool operator==(const Triple&, const Triple&) = default;
};

using TripleSet = std::vector<Triple>;

enum class TripleFormat { kText, kIds };

// Streaming reader. Id triples are joined against queries and passages.
class TripleReader {
 public:
  TripleReader(std::istream& in, std::string source = "<triples>")
      : in_(in), source_(std::move(source)) {}
  TripleReader(std::istream& in, const QuerySet& queries, const Collection& passages,
               std::string source = "<triples>")
      : in_(in), source_(std::move(source)), format_(TripleFormat::kIds), queries_(&queries),
        passages_(&passages) {}

  std::optional<Triple> next() {
    while (std::getline(in_, line_)) {
      ++lineno_;
      std::string_view view = chomp(line_);
      if (view.empty()) continue;
      auto fields = split(view, '\t');
      if (fields.size() != 3) {
        throw ParseError(source_, lineno_,
                         "expected 3 tab-separated columns, got " + std::to_string(fields.size()));
      }
      if (fields[1] == fields[2]) throw ParseError(source_, lineno_, "positive equals negative");
      Triple t;
      if (format_ == TripleFormat::kText) {
        t.query = fields[0];
        t.positive = fields[1];
        t.negative = fields[2];
      } else {
        t.query = resolve(*queries_, fields[0], "query");
        t.positive = resolve(*passages_, fields[1], "passage");
        t.negative = resolve(*passages_, fields[2], "passage");
        t.ids = std::string(view);
      }
      for (const auto* s : {&t.query, &t.positive, &t.negative}) {
        if (s->empty()) throw ParseError(source_, lineno_, "empty field");
      }
      return t;
    }
    return std::nullopt;
  }

  std::size_t line() const noexcept { return lineno_; }

 private:
  std::string resolve(const TextTable& table, std::string_view id, std::string_view what) {
    const std::string* text = table.find(id);
    if (!text) {
      throw ParseError(source_, lineno_, "unknown " + std::string(what) + " id '" +
                                             std::string(id) + "'");
    }
    return *text;
  }

  std::istream& in_;
  std::string source_;
  TripleFormat format_ = TripleFormat::kText;
  const QuerySet* queries_ = nullptr;
  const Collection* passages_ = nullptr;
  std::string line_;
  std::size_t lineno_ = 0;
};

inline TripleSet read_triples(std::istream& in, const std::string& source = "<triples>") {
  TripleReader reader(in, source);
  TripleSet out;
  while (auto t = reader.next()) out.push_back(std::move(*t));
  return out;
}

inline TripleSet read_triples(const std::string& path) {
  auto in = detail::open_input(path);
  return read_triples(in, path);
}

inline void write_triple(std::ostream& out, const Triple& t) {
  out << t.query << '\t' << t.positive << '\t' << t.negative << '\n';
}

// ---------------------------------------------------------------------------
// Qrels: "qid iter docid grade"

struct QrelLine {
  std::string qid;
  std::string iter;
  std::string doc_id;
  int grade = 0;
};

class Qrels {
 public:
  void add(QrelLine line) {
    if (line.grade < 0) throw InvalidArgument("negative relevance grade");
    auto& judged = by_query_[line.qid];
    if (!judged.emplace(line.doc_id, line.grade).second) {
      throw InvalidArgument("duplicate judgment for (" + line.qid + ", " + line.doc_id + ")");
    }
    lines_.push_back(std::move(line));
  }

  // Grade of (qid, docid); 0 when unjudged.
  int grade(const std::string& qid, const std::string& doc_id) const {
    auto q = by_query_.find(qid);
    if (q == by_query_.end()) return 0;
    auto d = q->second.find(doc_id);
    return d == q->second.end() ? 0 : d->second;
  }

  // Document ids with grade > 0 for `qid`, sorted.
  std::vector<std::string> relevant(const std::string& qid) const {
    std::vector<std::string> out;
    auto q = by_query_.find(qid);
    if (q == by_query_.end()) return out;
    for (const auto& [doc, g] : q->second) {
      if (g > 0) out.push_back(doc);
    }
    return out;
  }

  const std::map<std::string, std::map<std::string, int>>& by_query() const noexcept {
    return by_query_;
  }
  const std::vector<QrelLine>& lines() const noexcept { return lines_; }
  bool empty() const noexcept { return lines_.empty(); }

 private:
  std::vector<QrelLine> lines_;
  std::map<std::string, std::map<std::string, int>> by_query_;
};

inline Qrels read_qrels(std::istream& in, const std::string& source = "<qrels>") {
  Qrels qrels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_ws(chomp(line));
    if (fields.empty()) continue;
    if (fields.size() != 4) throw ParseError(source, lineno, "expected 'qid 0 docid rel'");
    QrelLine q{std::string(fields[0]), std::string(fields[1]), std::string(fields[2]),
               detail::parse_int(fields[3], source, lineno, "relevance")};
    try {
      qrels.add(std::move(q));
    } catch (const InvalidArgument& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return qrels;
}

inline Qrels read_qrels(const std::string& path) {
  auto in = detail::open_input(path);
  return read_qrels(in, path);
}

inline void write_qrels(std::ostream& out, const Qrels& qrels) {
  for (const auto& q : qrels.lines()) {
    out << q.qid << ' ' << q.iter << ' ' << q.doc_id << ' ' << q.grade << '\n';
  }
}

// ---------------------------------------------------------------------------
// Runs: "qid Q0 docid rank score tag"

struct RunEntry {
  std::string doc_id;
  int rank = 0;
  double score = 0.0;
  std::string tag;
};

struct RankedList {
  std::string qid;
  std::vector<RunEntry> entries;  // strictly increasing rank, unique doc ids
};

class Run {
 public:
  // Entries of a query must arrive in increasing rank order.
  void add(const std::string& qid, RunEntry e) {
    if (e.rank < 1) throw InvalidArgument("rank must be >= 1");
    auto [it, inserted] = index_.try_emplace(qid, lists_.size());
    if (inserted) {
      lists_.push_back({qid, {}});
      docs_.emplace_back();
    }
    RankedList& list = lists_[it->second];
    if (!list.entries.empty()) {
      const RunEntry& prev = list.entries.back();
      if (e.rank <= prev.rank) {
        throw InvalidArgument("ranks for query '" + qid + "' are not strictly increasing");
      }
      if (e.score > prev.score) ++score_order_violations_;
    }
    if (!docs_[it->second].emplace(e.doc_id, list.entries.size()).second) {
      throw InvalidArgument("duplicate doc '" + e.doc_id + "' for query '" + qid + "'");
    }
    list.entries.push_back(std::move(e));
  }

  const RankedList* find(const std::string& qid) const {
    auto it = index_.find(qid);
    return it == index_.end() ? nullptr : &lists_[it->second];
  }

  const std::vector<RankedList>& lists() const noexcept { return lists_; }
  // Adjacent entries whose score increases while rank increases.
  std::size_t score_order_violations() const noexcept { return score_order_violations_; }

 private:
  std::vector<RankedList> lists_;
  std::vector<std::unordered_map<std::string, std::size_t>> docs_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t score_order_violations_ = 0;
};

inline Run read_run(std::istream& in, const std::string& source = "<run>") {
  Run run;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_ws(chomp(line));
    if (fields.empty()) continue;
    if (fields.size() != 6) {
      throw ParseError(source, lineno, "expected 'qid Q0 docid rank score tag'");
    }
    RunEntry e{std::string(fields[2]), detail::parse_int(fields[3], source, lineno, "rank"),
               detail::parse_double(fields[4], source, lineno, "score"), std::string(fields[5])};
    try {
      run.add(std::string(fields[0]), std::move(e));
    } catch (const InvalidArgument& err) {
      throw ParseError(source, lineno, err.what());
    }
  }
  return run;
}

inline Run read_run(const std::string& path) {
  auto in = detail::open_input(path);
  return read_run(in, path);
}

inline void write_run(std::ostream& out, const Run& run) {
  for (const auto& list : run.lists()) {
    for (const auto& e : list.entries) {
      out << list.qid << " Q0 " << e.doc_id << ' ' << e.rank << ' '
          << detail::format_double(e.score) << ' ' << e.tag << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Mixed-language collections

struct MixResult {
  TextTable mixed;
  std::vector<std::pair<std::string, std::string>> sidecar;  // id -> language
};

// Picks one language per id uniformly, keyed on (seed, id). Languages are
// considered in code order and the output follows the id order of the first
// language's table, so argument order never changes the result.
inline MixResult mix_language_corpus(const std::map<std::string, TextTable>& per_lang,
                                     std::uint64_t seed) {
  if (per_lang.empty()) throw InvalidArgument("no language tables to mix");
  const auto& [first_lang, reference] = *per_lang.begin();
  for (const auto& [lang, table] : per_lang) {
    std::string missing;
    std::size_t n_missing = 0;
    auto note = [&](const std::string& id, const std::string& where) {
      if (n_missing++ < 10) missing += " " + id + "(" + where + ")";
    };
    for (const auto& r : reference.records()) {
      if (!table.contains(r.id)) note(r.id, "missing in " + lang);
    }
    for (const auto& r : table.records()) {
      if (!reference.contains(r.id)) note(r.id, "missing in " + first_lang);
    }
    if (n_missing) {
      throw MismatchError("id sets differ (" + std::to_string(n_missing) + " ids):" + missing);
    }
  }
  std::vector<const std::pair<const std::string, TextTable>*> langs;
  for (const auto& entry : per_lang) langs.push_back(&entry);

  MixResult out;
  for (const auto& r : reference.records()) {
    const RngStream rng(seed, r.id, 0);
    const auto& [lang, table] = *langs[rng.pick(langs.size(), 0, Draw::kMix)];
    out.mixed.add(r.id, *table.find(r.id));
    out.sidecar.emplace_back(r.id, lang);
  }
  return out;
}

inline void write_sidecar(std::ostream& out,
                          const std::vector<std::pair<std::string, std::string>>& sidecar) {
  for (const auto& [id, lang] : sidecar) out << id << '\t' << lang << '\n';
}

// ---------------------------------------------------------------------------
// Code-switching of whole files

// In-memory transform; the query with the query-side pool, both passages
// with the document-side pool.
inline Triple switch_triple(const Triple& t, const SwitchPolicy& policy,
                            const LexiconSet& lexicons, SwitchStats* query_stats = nullptr,
                            SwitchStats* doc_stats = nullptr) {
  const std::string rid = t.record_id();
  auto q = switch_text(t.query, policy, lexicons, rid, Side::kQuery);
  auto pos = switch_text(t.positive, policy, lexicons, rid, Side::kDoc);
  auto neg = switch_text(t.negative, policy, lexicons, rid, Side::kNegative);
  if (query_stats) query_stats->add(q);
  if (doc_stats) {
    doc_stats->add(pos);
    doc_stats->add(neg);
  }
  return {std::move(q.text), std::move(pos.text), std::move(neg.text), t.ids};
}

inline TripleSet transform_triples(std::span<const Triple> triples, const SwitchPolicy& policy,
                                   const LexiconSet& lexicons) {
  policy.validate();
  lexicons.require(policy);
  TripleSet out;
  out.reserve(triples.size());
  for (const auto& t : triples) out.push_back(switch_triple(t, policy, lexicons));
  return out;
}

struct TransformStats {
  std::size_t records = 0;
  SwitchStats query;
  SwitchStats doc;
};

// One streaming pass: batches of records are switched in parallel and
// written in input order. Memory is bounded by the batch size.
inline TransformStats transform_triples(TripleReader& reader, std::ostream& out,
                                        const SwitchPolicy& policy, const LexiconSet& lexicons,
                                        unsigned jobs = 1, std::size_t batch_size = 4096) {
  policy.validate();
  lexicons.require(policy);
  TransformStats stats;
  std::vector<Triple> batch;
  std::vector<Triple> switched;
  std::vector<SwitchStats> qs, ds;
  batch.reserve(batch_size);
  bool more = true;
  while (more) {
    batch.clear();
    while (batch.size() < batch_size) {
      auto t = reader.next();
      if (!t) {
        more = false;
        break;
      }
      batch.push_back(std::move(*t));
    }
    switched.assign(batch.size(), Triple{});
    qs.assign(batch.size(), SwitchStats{});
    ds.assign(batch.size(), SwitchStats{});
    parallel_for(batch.size(), jobs, [&](std::size_t i) {
      switched[i] = switch_triple(batch[i], policy, lexicons, &qs[i], &ds[i]);
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      write_triple(out, switched[i]);
      stats.query.merge(qs[i]);
      stats.doc.merge(ds[i]);
    }
    stats.records += batch.size();
  }
  return stats;
}

// Streams "id<TAB>text" lines, switching the text with the pool of `side`
// and the id as record key. Lines are validated like read_id_text except
// that duplicate ids are not tracked.
inline SwitchStats transform_id_texts(std::istream& in, std::ostream& out,
                                      const SwitchPolicy& policy, const LexiconSet& lexicons,
                                      Side side, unsigned jobs = 1,
                                      const std::string& source = "<tsv>",
                                      std::size_t batch_size = 4096) {
  policy.validate();
  lexicons.require(policy);
  SwitchStats stats;
  std::vector<IdText> batch;
  std::vector<SwitchOutcome> outcomes;
  std::string line;
  std::size_t lineno = 0;
  bool more = true;
  while (more) {
    batch.clear();
    while (batch.size() < batch_size) {
      if (!std::getline(in, line)) {
        more = false;
        break;
      }
      ++lineno;
      std::string_view view = chomp(line);
      if (view.empty()) continue;
      const auto tab = view.find('\t');
      if (tab == std::string_view::npos || tab == 0 || tab + 1 == view.size()) {
        throw ParseError(source, lineno, "expected 'id<TAB>text'");
      }
      batch.push_back({std::string(view.substr(0, tab)), std::string(view.substr(tab + 1))});
    }
    outcomes.assign(batch.size(), SwitchOutcome{});
    parallel_for(batch.size(), jobs, [&](std::size_t i) {
      outcomes[i] = switch_text(batch[i].text, policy, lexicons, batch[i].id, side);
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      out << batch[i].id << '\t' << outcomes[i].text << '\n';
      stats.add(outcomes[i]);
    }
  }
  return stats;
}

}  // namespace csclir
