#pragma once

// Evaluation: MRR@k, query/document token overlap analysis and paired
// significance testing.

#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "csclir/corpus.hpp"
#include "csclir/error.hpp"
#include "csclir/text.hpp"

namespace csclir {

struct MetricReport {
  std::size_t k = 10;
  std::vector<std::pair<std::string, double>> per_query;  // qid -> reciprocal rank, qid order
  double mean = 0.0;

  std::size_t query_count() const noexcept { return per_query.size(); }
};

// Reciprocal rank of the first relevant entry with rank <= k, else 0.
inline double reciprocal_rank(const RankedList* list, const std::string& qid, const Qrels& qrels,
                              std::size_t k) {
  if (!list) return 0.0;
  for (const RunEntry& e : list->entries) {
    if (static_cast<std::size_t>(e.rank) > k) break;
    if (qrels.grade(qid, e.doc_id) > 0) return 1.0 / e.rank;
  }
  return 0.0;
}

// Every query judged in `qrels` contributes; queries only in the run are ignored.
inline MetricReport mrr_at_k(const Run& run, const Qrels& qrels, std::size_t k = 10) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (qrels.empty()) throw InvalidArgument("qrels are empty");
  MetricReport report;
  report.k = k;
  double sum = 0.0;
  for (const auto& [qid, judged] : qrels.by_query()) {
    const double rr = reciprocal_rank(run.find(qid), qid, qrels, k);
    report.per_query.emplace_back(qid, rr);
    sum += rr;
  }
  report.mean = sum / static_cast<double>(report.per_query.size());
  return report;
}

// Number of distinct query token types present in the document.
inline std::size_t token_overlap(std::span<const std::string> query_tokens,
                                 std::span<const std::string> doc_tokens) {
  const std::unordered_set<std::string_view> doc(doc_tokens.begin(), doc_tokens.end());
  std::unordered_set<std::string_view> seen;
  std::size_t n = 0;
  for (const auto& q : query_tokens) {
    if (seen.insert(q).second && doc.contains(q)) ++n;
  }
  return n;
}

// Query token occurrences whose type occurs in the passage.
inline std::size_t overlap_occurrences(std::span<const std::string> query_tokens,
                                       std::span<const std::string> doc_tokens) {
  const std::unordered_set<std::string_view> doc(doc_tokens.begin(), doc_tokens.end());
  std::size_t n = 0;
  for (const auto& q : query_tokens) n += doc.contains(q) ? 1 : 0;
  return n;
}

enum class OverlapBucket { kNone = 0, kSome = 1, kSignificant = 2 };

inline std::string_view to_string(OverlapBucket b) {
  switch (b) {
    case OverlapBucket::kNone: return "none";
    case OverlapBucket::kSome: return "some";
    case OverlapBucket::kSignificant: return "significant";
  }
  return "?";
}

// none: no shared token; some: up to three; significant: more than three.
inline OverlapBucket bucket_for(double mean_overlap) noexcept {
  if (mean_overlap <= 0.0) return OverlapBucket::kNone;
  if (mean_overlap <= 3.0) return OverlapBucket::kSome;
  return OverlapBucket::kSignificant;
}

struct QueryOverlap {
  std::string qid;
  double mean_overlap = 0.0;
  OverlapBucket bucket = OverlapBucket::kNone;
  double reciprocal_rank = 0.0;
};

struct BucketSummary {
  std::size_t queries = 0;
  double mrr = 0.0;
};

struct OverlapBuckets {
  std::size_t k = 10;
  std::vector<QueryOverlap> queries;
  std::array<BucketSummary, 3> buckets{};

  const BucketSummary& operator[](OverlapBucket b) const {
    return buckets[static_cast<std::size_t>(b)];
  }
};

// Queries without any relevant document are skipped: their mean overlap is
// undefined.
inline OverlapBuckets bucket_queries(const QuerySet& queries, const Collection& collection,
                                     const Qrels& qrels, const Run& run, std::size_t k = 10) {
  OverlapBuckets out;
  out.k = k;
  std::array<double, 3> rr_sum{};
  for (const auto& [qid, judged] : qrels.by_query()) {
    const auto relevant = qrels.relevant(qid);
    if (relevant.empty()) continue;
    const std::string* qtext = queries.find(qid);
    if (!qtext) throw NotFoundError("query '" + qid + "' missing from queries");
    const auto qtok = folded_words(*qtext);
    double total = 0.0;
    for (const auto& doc_id : relevant) {
      const std::string* dtext = collection.find(doc_id);
      if (!dtext) throw NotFoundError("relevant document '" + doc_id + "' missing from collection");
      total += static_cast<double>(token_overlap(qtok, folded_words(*dtext)));
    }
    QueryOverlap q{qid, total / static_cast<double>(relevant.size()), OverlapBucket::kNone,
                   reciprocal_rank(run.find(qid), qid, qrels, k)};
    q.bucket = bucket_for(q.mean_overlap);
    const auto b = static_cast<std::size_t>(q.bucket);
    ++out.buckets[b].queries;
    rr_sum[b] += q.reciprocal_rank;
    out.queries.push_back(std::move(q));
  }
  for (std::size_t b = 0; b < 3; ++b) {
    if (out.buckets[b].queries) out.buckets[b].mrr = rr_sum[b] / out.buckets[b].queries;
  }
  return out;
}

struct OverlapReduction {
  std::size_t records = 0;
  std::size_t tokens_before = 0;
  std::size_t tokens_after = 0;
  double reduction = 0.0;  // 1 - after / before; 0 when nothing overlapped before
};

inline std::size_t query_positive_overlap(const Triple& t) {
  return overlap_occurrences(folded_words(t.query), folded_words(t.positive));
}

// Compares aligned triple sets before and after switching.
inline OverlapReduction overlap_reduction(std::span<const Triple> before,
                                          std::span<const Triple> after) {
  if (before.size() != after.size()) {
    throw MismatchError("triple counts differ: " + std::to_string(before.size()) + " vs " +
                        std::to_string(after.size()));
  }
  OverlapReduction r;
  r.records = before.size();
  for (std::size_t i = 0; i < before.size(); ++i) {
    r.tokens_before += query_positive_overlap(before[i]);
    r.tokens_after += query_positive_overlap(after[i]);
  }
  if (r.tokens_before) {
    r.reduction = 1.0 - static_cast<double>(r.tokens_after) / static_cast<double>(r.tokens_before);
  }
  return r;
}

// Streaming variant over two aligned triple files.
inline OverlapReduction overlap_reduction(TripleReader& before, TripleReader& after) {
  OverlapReduction r;
  while (true) {
    auto b = before.next();
    auto a = after.next();
    if (!b && !a) break;
    if (!b || !a) throw MismatchError("triple files have different record counts");
    ++r.records;
    r.tokens_before += query_positive_overlap(*b);
    r.tokens_after += query_positive_overlap(*a);
  }
  if (r.tokens_before) {
    r.reduction = 1.0 - static_cast<double>(r.tokens_after) / static_cast<double>(r.tokens_before);
  }
  return r;
}

struct SignificanceResult {
  std::size_t n = 0;
  double mean_difference = 0.0;  // mean of a - b
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;  // two-sided
  double alpha = 0.05;
  std::size_t comparisons = 1;
  double threshold = 0.05;  // alpha / comparisons
  bool significant = false;
};

// Two-sided paired t-test on a - b with a Bonferroni threshold alpha / m.
inline SignificanceResult paired_t_test(std::span<const double> a, std::span<const double> b,
                                        double alpha = 0.05, std::size_t m = 1) {
  if (a.size() != b.size()) throw MismatchError("paired samples have different lengths");
  if (a.size() < 2) throw DegenerateInputError("paired t-test needs at least two pairs");
  if (m < 1) throw InvalidArgument("number of comparisons must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  const std::size_t n = a.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (a[i] - b[i]) - mean;
    ss += d * d;
  }
  const double var = ss / static_cast<double>(n - 1);
  if (!(var > 0.0)) throw DegenerateInputError("differences have zero variance");

  SignificanceResult r;
  r.n = n;
  r.mean_difference = mean;
  r.t = mean / std::sqrt(var / static_cast<double>(n));
  r.df = static_cast<double>(n - 1);
  const boost::math::students_t dist(r.df);
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  r.alpha = alpha;
  r.comparisons = m;
  r.threshold = alpha / static_cast<double>(m);
  r.significant = r.p_value < r.threshold;
  return r;
}

// Pairs two metric reports on their common query ids (both are in qid order).
inline std::pair<std::vector<double>, std::vector<double>> align_per_query(
    const MetricReport& a, const MetricReport& b) {
  if (a.per_query.size() != b.per_query.size()) {
    throw MismatchError("reports cover different query counts");
  }
  std::pair<std::vector<double>, std::vector<double>> out;
  for (std::size_t i = 0; i < a.per_query.size(); ++i) {
    if (a.per_query[i].first != b.per_query[i].first) {
      throw MismatchError("query ids differ: '" + a.per_query[i].first + "' vs '" +
                          b.per_query[i].first + "'");
    }
    out.first.push_back(a.per_query[i].second);
    out.second.push_back(b.per_query[i].second);
  }
  return out;
}

inline void write_per_query_tsv(std::ostream& out, const MetricReport& r) {
  for (const auto& [qid, rr] : r.per_query) out << qid << '\t' << detail::format_double(rr) << '\n';
}

inline std::vector<std::pair<std::string, double>> read_per_query_tsv(
    std::istream& in, const std::string& source = "<per-query>") {
  std::vector<std::pair<std::string, double>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split(chomp(line), '\t');
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 2) throw ParseError(source, lineno, "expected 'qid<TAB>value'");
    out.emplace_back(std::string(fields[0]),
                     detail::parse_double(fields[1], source, lineno, "value"));
  }
  return out;
}

}  // namespace csclir
