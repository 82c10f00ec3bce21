#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "csclir/ireval.hpp"

namespace csclir {
namespace {

Qrels qrels_from(const std::string& text) {
  std::istringstream in(text);
  return read_qrels(in);
}

Triple triple(std::string q, std::string pos, std::string neg) {
  Triple t;
  t.query = std::move(q);
  t.positive = std::move(pos);
  t.negative = std::move(neg);
  return t;
}

Run run_from(const std::string& text) {
  std::istringstream in(text);
  return read_run(in);
}

// Run for `qid` with `n` documents d1..dn at ranks 1..n.
std::string ranked(const std::string& qid, int n) {
  std::string s;
  for (int r = 1; r <= n; ++r) {
    s += qid + " Q0 d" + std::to_string(r) + " " + std::to_string(r) + " " +
         std::to_string(100 - r) + " t\n";
  }
  return s;
}

TEST(Mrr, SingleQueryExamples) {
  const auto run = run_from(ranked("q1", 20));
  EXPECT_DOUBLE_EQ(mrr_at_k(run, qrels_from("q1 0 d1 1\n")).mean, 1.0);
  EXPECT_DOUBLE_EQ(mrr_at_k(run, qrels_from("q1 0 d4 1\n")).mean, 0.25);
  EXPECT_DOUBLE_EQ(mrr_at_k(run, qrels_from("q1 0 d11 1\n")).mean, 0.0);
  EXPECT_DOUBLE_EQ(mrr_at_k(run, qrels_from("q1 0 d11 1\n"), 11).mean, 1.0 / 11);
  // First relevant counts; grade 0 is not relevant.
  EXPECT_DOUBLE_EQ(mrr_at_k(run, qrels_from("q1 0 d2 0\nq1 0 d3 2\nq1 0 d5 1\n")).mean, 1.0 / 3);
}

TEST(Mrr, MeanOverQueries) {
  const auto run = run_from(ranked("q1", 10) + ranked("q2", 10));
  const auto r = mrr_at_k(run, qrels_from("q1 0 d2 1\nq2 0 d5 1\n"));
  EXPECT_DOUBLE_EQ(r.mean, 0.35);
  ASSERT_EQ(r.query_count(), 2u);
  EXPECT_EQ(r.per_query[0].first, "q1");
  EXPECT_DOUBLE_EQ(r.per_query[1].second, 0.2);
}

TEST(Mrr, QueriesOutsideQrelsAreIgnoredAndMissingRunsScoreZero) {
  const auto run = run_from(ranked("q1", 10) + ranked("q9", 10));
  const auto r = mrr_at_k(run, qrels_from("q1 0 d1 1\nq2 0 d1 1\n"));
  EXPECT_EQ(r.query_count(), 2u);
  EXPECT_DOUBLE_EQ(r.mean, 0.5);
}

TEST(Mrr, Errors) {
  const auto run = run_from(ranked("q1", 3));
  EXPECT_THROW(mrr_at_k(run, Qrels{}), InvalidArgument);
  EXPECT_THROW(mrr_at_k(run, qrels_from("q1 0 d1 1\n"), 0), InvalidArgument);
}

// Random runs and qrels for property checks.
struct RandomCase {
  std::string run;
  std::string qrels;
};

RandomCase random_case(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> depth(1, 30), doc(1, 40), nrel(0, 3);
  std::uniform_real_distribution<double> score(-5, 5);
  RandomCase c;
  for (int q = 0; q < 20; ++q) {
    const std::string qid = "q" + std::to_string(q);
    std::set<int> docs;
    const int n = depth(gen);
    while (static_cast<int>(docs.size()) < n) docs.insert(doc(gen));
    int rank = 0;
    for (int d : docs) {
      c.run += qid + " Q0 d" + std::to_string(d) + " " + std::to_string(++rank) + " " +
               detail::format_double(score(gen)) + " t\n";
    }
    std::set<int> rel;
    for (int k = nrel(gen); k > 0; --k) rel.insert(doc(gen));
    for (int d : rel) c.qrels += qid + " 0 d" + std::to_string(d) + " 1\n";
    if (rel.empty()) c.qrels += qid + " 0 d0 0\n";
  }
  return c;
}

TEST(Mrr, MonotoneInK) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_case(gen);
    const auto run = run_from(c.run);
    const auto qrels = qrels_from(c.qrels);
    double prev = 0.0;
    for (std::size_t k = 1; k <= 35; ++k) {
      const auto r = mrr_at_k(run, qrels, k);
      EXPECT_GE(r.mean, prev);
      for (const auto& [qid, rr] : r.per_query) {
        EXPECT_TRUE(rr == 0.0 || (rr <= 1.0 && rr >= 1.0 / k));
        EXPECT_DOUBLE_EQ(rr, rr == 0.0 ? 0.0 : 1.0 / std::round(1.0 / rr));
      }
      prev = r.mean;
    }
  }
}

TEST(Mrr, PositiveAffineScoreChangeIsInvariant) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = random_case(gen);
    const auto run = run_from(c.run);
    csclir::Run scaled;
    for (const auto& list : run.lists()) {
      for (auto e : list.entries) {
        e.score = 3.5 * e.score + 17.0;
        scaled.add(list.qid, e);
      }
    }
    const auto qrels = qrels_from(c.qrels);
    EXPECT_EQ(mrr_at_k(run, qrels).per_query, mrr_at_k(scaled, qrels).per_query);
  }
}

TEST(Overlap, Examples) {
  using V = std::vector<std::string>;
  EXPECT_EQ(token_overlap(V{"a", "b"}, V{"c", "d"}), 0u);
  EXPECT_EQ(token_overlap(V{"a", "b", "c", "d", "e"}, V{"a", "b", "c", "d", "e"}), 5u);
  EXPECT_EQ(token_overlap(V{"a", "b", "b", "c"}, V{"b", "c", "d"}), 2u);
  EXPECT_EQ(overlap_occurrences(V{"a", "b", "b", "c"}, V{"b", "c", "d"}), 3u);
}

TEST(Buckets, Boundaries) {
  EXPECT_EQ(bucket_for(0), OverlapBucket::kNone);
  EXPECT_EQ(bucket_for(1), OverlapBucket::kSome);
  EXPECT_EQ(bucket_for(3), OverlapBucket::kSome);
  EXPECT_EQ(bucket_for(4), OverlapBucket::kSignificant);
  EXPECT_EQ(bucket_for(0.5), OverlapBucket::kSome);
  EXPECT_EQ(bucket_for(3.5), OverlapBucket::kSignificant);
  EXPECT_EQ(to_string(OverlapBucket::kSignificant), "significant");
}

// Nine queries, three per bucket, with hand-chosen overlaps and ranks.
TEST(Buckets, NineQueryFixture) {
  QuerySet q;
  Collection c;
  std::string qrels, run;
  struct Row {
    const char* query;
    std::vector<const char*> docs;  // relevant documents
    int rank;                       // rank of the first relevant doc, 0 = not retrieved
  };
  const std::vector<Row> rows = {
      {"alpha beta", {"gamma delta"}, 1},                          // 0
      {"alpha beta gamma", {"zeta eta"}, 0},                       // 0
      {"one two", {"three", "four five"}, 4},                      // 0
      {"alpha beta", {"Alpha x"}, 2},                              // 1
      {"a b c d e", {"a b c"}, 0},                                 // 3
      {"a b c d e", {"a b", "a b c d"}, 5},                        // (2 + 4) / 2 = 3
      {"a b c d e", {"a b c d"}, 1},                               // 4
      {"a b c d e f", {"a b c d e f g"}, 10},                      // 6
      {"a b c d e", {"a b c d e", "a b c d"}, 11},                 // 4.5, rank past k
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string qid = "q" + std::to_string(i);
    q.add(qid, rows[i].query);
    for (std::size_t j = 0; j < rows[i].docs.size(); ++j) {
      const std::string did = qid + "d" + std::to_string(j);
      c.add(did, rows[i].docs[j]);
      qrels += qid + " 0 " + did + " 1\n";
    }
    for (int r = 1; r <= 12; ++r) {
      const std::string did = r == rows[i].rank ? qid + "d0" : qid + "x" + std::to_string(r);
      run += qid + " Q0 " + did + " " + std::to_string(r) + " 0 t\n";
    }
  }
  const auto b = bucket_queries(q, c, qrels_from(qrels), run_from(run));
  ASSERT_EQ(b.queries.size(), 9u);
  const std::vector<double> expected_overlap = {0, 0, 0, 1, 3, 3, 4, 6, 4.5};
  for (std::size_t i = 0; i < 9; ++i) EXPECT_DOUBLE_EQ(b.queries[i].mean_overlap, expected_overlap[i]);
  EXPECT_EQ(b[OverlapBucket::kNone].queries, 3u);
  EXPECT_EQ(b[OverlapBucket::kSome].queries, 3u);
  EXPECT_EQ(b[OverlapBucket::kSignificant].queries, 3u);
  EXPECT_DOUBLE_EQ(b[OverlapBucket::kNone].mrr, (1.0 + 0.0 + 0.25) / 3);
  EXPECT_DOUBLE_EQ(b[OverlapBucket::kSome].mrr, (0.5 + 0.0 + 0.2) / 3);
  EXPECT_DOUBLE_EQ(b[OverlapBucket::kSignificant].mrr, (1.0 + 0.1 + 0.0) / 3);
}

TEST(Buckets, MissingDocumentIsNamed) {
  QuerySet q;
  q.add("q1", "a b");
  Collection c;
  c.add("d1", "a");
  try {
    bucket_queries(q, c, qrels_from("q1 0 d2 1\n"), csclir::Run{});
    FAIL() << "expected NotFoundError";
  } catch (const NotFoundError& e) {
    EXPECT_NE(std::string(e.what()).find("d2"), std::string::npos);
  }
}

TEST(OverlapReduction, IdenticalAndZeroProbability) {
  const std::vector<Triple> triples = {triple("a b c", "a b x", "y"),
                                       triple("Credit card", "credit card!", "z")};
  const auto same = overlap_reduction(triples, triples);
  EXPECT_EQ(same.tokens_before, 4u);
  EXPECT_DOUBLE_EQ(same.reduction, 0.0);

  LexiconSet lex;
  lex.words["de"] = BilingualLexicon("en", "de");
  for (const char* w : {"a", "b", "c", "x", "credit", "card"}) lex.words["de"].insert(w, std::string("de") + w);
  SwitchPolicy policy;
  policy.p = 0.0;
  policy.query_langs = policy.doc_langs = {"de"};
  const auto after = transform_triples(triples, policy, lex);
  EXPECT_DOUBLE_EQ(overlap_reduction(triples, after).reduction, 0.0);

  const std::vector<Triple> shorter(triples.begin(), triples.begin() + 1);
  EXPECT_THROW(overlap_reduction(triples, shorter), MismatchError);
}

// Exhaustive expectation of the query/positive overlap after ML switching of
// the record "a b c" / "a b c": each of the 6 tokens keeps its word with
// probability 1 - p or takes language l with probability p / L.
double enumerated_expected_overlap(double p, int languages) {
  const std::vector<std::string> words = {"a", "b", "c"};
  const int states = languages + 1;
  double expected = 0.0;
  std::vector<int> s(6, 0);
  std::function<void(int, double)> rec = [&](int pos, double prob) {
    if (pos == 6) {
      std::vector<std::string> q, d;
      for (int i = 0; i < 3; ++i) {
        q.push_back(s[i] == 0 ? words[i] : "L" + std::to_string(s[i]) + words[i]);
        d.push_back(s[3 + i] == 0 ? words[i] : "L" + std::to_string(s[3 + i]) + words[i]);
      }
      std::size_t n = 0;
      for (const auto& t : q) n += std::count(d.begin(), d.end(), t) > 0;
      expected += prob * static_cast<double>(n);
      return;
    }
    for (int k = 0; k < states; ++k) {
      s[pos] = k;
      rec(pos + 1, prob * (k == 0 ? 1.0 - p : p / languages));
    }
  };
  rec(0, 1.0);
  return expected;
}

TEST(OverlapReduction, MultilingualMatchesEnumeration) {
  const double expected = 1.0 - enumerated_expected_overlap(0.5, 2) / 3.0;
  EXPECT_DOUBLE_EQ(expected, 0.625);  // 1 - (0.25 + 2 * 0.0625)
  LexiconSet lex;
  for (int l = 1; l <= 2; ++l) {
    const std::string lang = "L" + std::to_string(l);
    lex.words[lang] = BilingualLexicon("en", lang);
    for (const char* w : {"a", "b", "c"}) lex.words[lang].insert(w, lang + w);
  }
  SwitchPolicy policy;
  policy.strategy = Strategy::kMultilingual;
  policy.p = 0.5;
  policy.query_langs = policy.doc_langs = {"L1", "L2"};
  std::vector<Triple> before;
  for (int i = 0; i < 20000; ++i) before.push_back(triple("a b c", "a b c", "n" + std::to_string(i)));
  const auto after = transform_triples(before, policy, lex);
  EXPECT_NEAR(overlap_reduction(before, after).reduction, expected, 0.01);
}

TEST(PairedTTest, ClosedFormFixture) {
  const std::vector<double> a = {0.5, 0.25, 1.0, 0.2, 0.0};
  const std::vector<double> b = {0.25, 0.25, 0.5, 0.1, 0.1};
  const auto r = paired_t_test(a, b);
  // d = {.25, 0, .5, .1, -.1}: mean .15, sample variance .055.
  EXPECT_NEAR(r.t, 0.15 / std::sqrt(0.011), 1e-9);
  EXPECT_NEAR(r.mean_difference, 0.15, 1e-12);
  EXPECT_DOUBLE_EQ(r.df, 4.0);
  EXPECT_NEAR(r.p_value, 0.22589109787790468, 1e-9);
  EXPECT_FALSE(r.significant);
}

TEST(PairedTTest, BonferroniFlips) {
  const std::vector<double> a = {1.0, 0.5, 1.0, 0.5, 1.0};
  const std::vector<double> b = {0.5, 0.25, 0.5, 0.2, 0.25};
  const auto one = paired_t_test(a, b, 0.05, 1);
  EXPECT_NEAR(one.t, 0.46 / std::sqrt(0.00785), 1e-9);
  EXPECT_NEAR(one.p_value, 0.006552662883252899, 1e-9);
  EXPECT_TRUE(one.significant);
  const auto ten = paired_t_test(a, b, 0.05, 10);
  EXPECT_DOUBLE_EQ(ten.threshold, 0.005);
  EXPECT_DOUBLE_EQ(ten.p_value, one.p_value);
  EXPECT_FALSE(ten.significant);
}

TEST(PairedTTest, SignFlipsOnSwap) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(30), b(30);
    for (auto& x : a) x = u(gen);
    for (auto& x : b) x = u(gen);
    const auto ab = paired_t_test(a, b);
    const auto ba = paired_t_test(b, a);
    EXPECT_DOUBLE_EQ(ab.t, -ba.t);
    EXPECT_DOUBLE_EQ(ab.p_value, ba.p_value);
    EXPECT_GT(ab.p_value, 0.0);
    EXPECT_LE(ab.p_value, 1.0);
  }
}

TEST(PairedTTest, DegenerateInputs) {
  const std::vector<double> a = {0.1, 0.2, 0.3};
  EXPECT_THROW(paired_t_test(a, a), DegenerateInputError);
  const std::vector<double> plus_one = {1.1, 1.2, 1.3};
  EXPECT_THROW(paired_t_test(plus_one, a), DegenerateInputError);
  const std::vector<double> one = {0.1};
  EXPECT_THROW(paired_t_test(one, one), DegenerateInputError);
  const std::vector<double> two = {0.1, 0.2};
  EXPECT_THROW(paired_t_test(a, two), MismatchError);
  EXPECT_THROW(paired_t_test(a, plus_one, 0.05, 0), InvalidArgument);
}

TEST(PerQuery, TsvRoundTripAndAlignment) {
  MetricReport r;
  r.per_query = {{"q1", 1.0}, {"q2", 0.25}, {"q3", 1.0 / 3}};
  std::ostringstream out;
  write_per_query_tsv(out, r);
  std::istringstream in(out.str());
  EXPECT_EQ(read_per_query_tsv(in), r.per_query);
  MetricReport other = r;
  other.per_query[1].first = "q9";
  EXPECT_THROW(align_per_query(r, other), MismatchError);
  const auto [x, y] = align_per_query(r, r);
  EXPECT_EQ(x, y);
}

}  // namespace
}  // namespace csclir
