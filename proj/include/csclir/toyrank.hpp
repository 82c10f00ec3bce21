#pragma once

// A linear relevance scorer over lexical features. It stands in for a
// cross-encoder at desk scale: exact_match carries the monolingual signal,
// lexicon_match the interlingual one, and the synthetic experiment below
// shows how training on code-switched triples moves weight between them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "csclir/codeswitch.hpp"
#include "csclir/corpus.hpp"
#include "csclir/error.hpp"
#include "csclir/hash.hpp"
#include "csclir/ireval.hpp"
#include "csclir/lexicon.hpp"
#include "csclir/text.hpp"

namespace csclir {

inline constexpr std::size_t kNumFeatures = 5;
inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "exact_match", "lexicon_match", "query_length", "doc_length", "bias"};

using Weights = std::array<double, kNumFeatures>;

struct FeatureVector {
  double exact_match = 0.0;    // distinct query types present in the document
  double lexicon_match = 0.0;  // remaining query types with a translation in the document
  double query_length = 0.0;   // ln(1 + query word count)
  double doc_length = 0.0;     // ln(1 + document word count)
  double bias = 1.0;

  std::array<double, kNumFeatures> values() const noexcept {
    return {exact_match, lexicon_match, query_length, doc_length, bias};
  }
};

// A query type counts as a lexicon match when it is not an exact match and,
// under any of the lexicons, either translates to a document token or is the
// translation of one.
inline FeatureVector featurize(std::string_view query, std::string_view doc,
                               std::span<const BilingualLexicon> lexicons) {
  const auto qtok = folded_words(query);
  const auto dtok = folded_words(doc);
  const std::unordered_set<std::string> dset(dtok.begin(), dtok.end());
  std::unordered_set<std::string> translated_doc;
  for (const auto& lex : lexicons) {
    for (const auto& d : dset) {
      if (auto t = lex.lookup_folded(d)) translated_doc.insert(fold_case(*t));
    }
  }
  FeatureVector f;
  std::unordered_set<std::string> seen;
  for (const auto& q : qtok) {
    if (!seen.insert(q).second) continue;
    if (dset.contains(q)) {
      f.exact_match += 1.0;
      continue;
    }
    bool hit = translated_doc.contains(q);
    for (std::size_t i = 0; i < lexicons.size() && !hit; ++i) {
      if (auto t = lexicons[i].lookup_folded(q)) hit = dset.contains(fold_case(*t));
    }
    if (hit) f.lexicon_match += 1.0;
  }
  f.query_length = std::log1p(static_cast<double>(qtok.size()));
  f.doc_length = std::log1p(static_cast<double>(dtok.size()));
  return f;
}

inline double linear_score(const Weights& w, const FeatureVector& f) noexcept {
  const auto x = f.values();
  double s = 0.0;
  for (std::size_t i = 0; i < kNumFeatures; ++i) s += w[i] * x[i];
  return s;
}

inline double sigmoid(double z) noexcept {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

struct TrainConfig {
  double learning_rate = 0.5;
  std::size_t epochs = 300;
  std::uint64_t seed = 0;
  std::size_t negatives_per_positive = 4;  // 1:4 positive-to-negative ratio
  double l2 = 0.0;                         // not applied to the bias
};

struct LabeledExample {
  FeatureVector features;
  double label = 0.0;
};

// Mean logistic loss (+ L2) and its gradient with respect to the weights.
inline double loss_and_gradient(const Weights& w, std::span<const LabeledExample> examples,
                                double l2, Weights* gradient) {
  if (examples.empty()) throw InvalidArgument("no training examples");
  double loss = 0.0;
  Weights g{};
  for (const auto& ex : examples) {
    const auto x = ex.features.values();
    const double z = linear_score(w, ex.features);
    // log(1 + e^-|z|) keeps both branches finite.
    const double softplus = std::log1p(std::exp(-std::fabs(z)));
    loss += ex.label > 0.5 ? softplus + std::max(-z, 0.0) : softplus + std::max(z, 0.0);
    const double residual = sigmoid(z) - ex.label;
    for (std::size_t i = 0; i < kNumFeatures; ++i) g[i] += residual * x[i];
  }
  const double n = static_cast<double>(examples.size());
  loss /= n;
  for (auto& gi : g) gi /= n;
  for (std::size_t i = 0; i + 1 < kNumFeatures; ++i) {
    loss += 0.5 * l2 * w[i] * w[i];
    g[i] += l2 * w[i];
  }
  if (gradient) *gradient = g;
  return loss;
}

class ToyRanker {
 public:
  ToyRanker() = default;
  explicit ToyRanker(Weights w, TrainConfig config = {}) : weights_(w), config_(config) {}

  double score(const FeatureVector& f) const noexcept { return linear_score(weights_, f); }
  double probability(const FeatureVector& f) const noexcept { return sigmoid(score(f)); }

  const Weights& weights() const noexcept { return weights_; }
  const TrainConfig& config() const noexcept { return config_; }
  double weight(std::string_view feature) const {
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      if (kFeatureNames[i] == feature) return weights_[i];
    }
    throw NotFoundError("unknown feature '" + std::string(feature) + "'");
  }

 private:
  Weights weights_{};
  TrainConfig config_{};
};

// Positives from each triple, its own negative, and negatives_per_positive - 1
// extra negatives drawn (seeded) from the passages of other triples.
inline std::vector<LabeledExample> build_examples(std::span<const Triple> triples,
                                                  std::span<const BilingualLexicon> lexicons,
                                                  const TrainConfig& config) {
  std::vector<LabeledExample> examples;
  const RngStream rng(config.seed, "toyrank-negatives", 0);
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const Triple& t = triples[i];
    examples.push_back({featurize(t.query, t.positive, lexicons), 1.0});
    if (config.negatives_per_positive == 0) continue;
    examples.push_back({featurize(t.query, t.negative, lexicons), 0.0});
    if (triples.size() < 2) continue;
    for (std::size_t j = 1; j < config.negatives_per_positive; ++j) {
      const std::uint64_t draw = i * config.negatives_per_positive + j;
      // Another triple, then one of its two passages.
      std::size_t other = rng.pick(triples.size() - 1, draw, Draw::kNegative);
      if (other >= i) ++other;
      const Triple& o = triples[other];
      const std::string& passage =
          (rng.bits(draw, Draw::kSwitch) & 1) ? o.positive : o.negative;
      if (passage == t.positive) continue;
      examples.push_back({featurize(t.query, passage, lexicons), 0.0});
    }
  }
  return examples;
}

inline ToyRanker train_on_examples(std::span<const LabeledExample> examples,
                                   const TrainConfig& config) {
  if (examples.empty()) throw InvalidArgument("no training examples");
  Weights w{};
  Weights g{};
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    loss_and_gradient(w, examples, config.l2, &g);
    for (std::size_t i = 0; i < kNumFeatures; ++i) w[i] -= config.learning_rate * g[i];
  }
  return ToyRanker(w, config);
}

// Full-batch gradient descent from zero weights. Single-threaded, so the
// weights are bit-identical for identical inputs.
inline ToyRanker train(std::span<const Triple> triples, std::span<const BilingualLexicon> lexicons,
                       const TrainConfig& config = {}) {
  if (triples.empty()) throw InvalidArgument("cannot train on an empty triple set");
  const auto examples = build_examples(triples, lexicons, config);
  return train_on_examples(examples, config);
}

// Candidates by score descending; equal scores by doc id ascending.
inline std::vector<RunEntry> rerank(const ToyRanker& ranker, std::string_view query,
                                    std::span<const IdText> candidates,
                                    std::span<const BilingualLexicon> lexicons,
                                    std::string_view tag = "toyrank") {
  if (candidates.empty()) throw InvalidArgument("no candidates to rerank");
  std::vector<std::pair<double, const IdText*>> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) {
    scored.emplace_back(ranker.score(featurize(query, c.text, lexicons)), &c);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second->id < b.second->id);
  });
  std::vector<RunEntry> out;
  out.reserve(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i) {
    out.push_back({scored[i].second->id, static_cast<int>(i + 1), scored[i].first,
                   std::string(tag)});
  }
  return out;
}

inline void write_weights(std::ostream& out, const ToyRanker& ranker) {
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    out << kFeatureNames[i] << '=' << detail::format_double(ranker.weights()[i]) << '\n';
  }
}

inline ToyRanker read_weights(std::istream& in, const std::string& source = "<weights>") {
  Weights w{};
  std::array<bool, kNumFeatures> seen{};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = chomp(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, lineno, "expected key=value");
    const auto key = view.substr(0, eq);
    const auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), key);
    if (it == kFeatureNames.end()) {
      throw ParseError(source, lineno, "unknown feature '" + std::string(key) + "'");
    }
    const auto idx = static_cast<std::size_t>(it - kFeatureNames.begin());
    w[idx] = detail::parse_double(view.substr(eq + 1), source, lineno, "weight");
    seen[idx] = true;
  }
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (!seen[i]) throw ParseError(source + ": missing weight '" + std::string(kFeatureNames[i]) + "'");
  }
  return ToyRanker(w);
}

// ---------------------------------------------------------------------------
// Synthetic monolingual-overfitting experiment
//
// Concepts 0..N-1 are grouped into topics and rendered into three surface
// vocabularies ("a" = pivot, "b", "c") with a perfect concept-level lexicon.
// Ranker A trains on pivot-only triples; ranker B on the same triples after
// multilingual code-switching into {b, c}. Both are tested on MoIR (b-b) and
// CLIR (b query, c passages) candidate lists.

struct ExperimentConfig {
  std::size_t concepts = 3000;
  std::size_t topics = 60;
  std::size_t train_queries = 500;
  std::size_t test_queries = 300;
  std::size_t candidates = 20;        // per test query, one relevant
  std::size_t query_length = 3;
  std::size_t doc_length = 20;        // mean; actual length in [doc/2, 3*doc/2]
  double hard_negative_rate = 0.5;    // negatives sharing one query concept
  double p = 0.5;                     // code-switching probability for ranker B
  std::uint64_t seed = 0;
  TrainConfig train{};
};

struct ExperimentReport {
  ExperimentConfig config;
  ToyRanker monolingual;    // ranker A
  ToyRanker code_switched;  // ranker B
  double mono_moir = 0.0;
  double mono_clir = 0.0;
  double cs_moir = 0.0;
  double cs_clir = 0.0;
  SwitchStats switch_query;
  SwitchStats switch_doc;
  OverlapReduction overlap;

  double mono_relative_drop() const noexcept {
    return mono_moir > 0.0 ? (mono_moir - mono_clir) / mono_moir : 0.0;
  }
  double cs_moir_relative_change() const noexcept {
    return mono_moir > 0.0 ? (cs_moir - mono_moir) / mono_moir : 0.0;
  }
};

namespace detail {

// Sequential generator over the stable hash; portable across standard libraries.
class SeqRng {
 public:
  explicit SeqRng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x5EEDULL)) {}
  std::uint64_t next() noexcept { return splitmix64(state_ += 0x9E3779B97F4A7C15ULL); }
  double uniform() noexcept { return to_unit_interval(next()); }
  std::size_t pick(std::size_t n) noexcept {
    auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }
  template <typename T>
  void shuffle(std::vector<T>& v) noexcept {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[pick(i)]);
  }

 private:
  std::uint64_t state_;
};

struct SyntheticQuery {
  std::vector<std::size_t> query;
  std::vector<std::size_t> relevant;
  std::vector<std::vector<std::size_t>> negatives;
};

class SyntheticWorld {
 public:
  explicit SyntheticWorld(const ExperimentConfig& c) : c_(c), per_topic_(c.concepts / c.topics) {
    if (c.topics < 2 || per_topic_ < c.query_length + 2 || c.query_length == 0 ||
        c.doc_length < 2 || c.candidates < 2) {
      throw InvalidArgument("synthetic experiment configuration is too small");
    }
  }

  SyntheticQuery sample(SeqRng& rng, std::size_t negatives) const {
    SyntheticQuery s;
    const std::size_t topic = rng.pick(c_.topics);
    std::vector<std::size_t> pool = topic_concepts(topic);
    rng.shuffle(pool);
    s.query.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(c_.query_length));

    const std::size_t shared = 1 + rng.pick(c_.query_length);
    s.relevant.assign(s.query.begin(), s.query.begin() + static_cast<std::ptrdiff_t>(shared));
    const std::size_t rel_len = length(rng);
    const std::vector<std::size_t> rest(pool.begin() + static_cast<std::ptrdiff_t>(c_.query_length),
                                        pool.end());
    while (s.relevant.size() < rel_len) s.relevant.push_back(rest[rng.pick(rest.size())]);
    rng.shuffle(s.relevant);

    for (std::size_t n = 0; n < negatives; ++n) {
      std::size_t other = rng.pick(c_.topics - 1);
      if (other >= topic) ++other;
      const auto other_pool = topic_concepts(other);
      std::vector<std::size_t> doc;
      const std::size_t len = length(rng);
      while (doc.size() < len) doc.push_back(other_pool[rng.pick(other_pool.size())]);
      if (rng.uniform() < c_.hard_negative_rate) doc[rng.pick(doc.size())] = s.query[rng.pick(s.query.size())];
      s.negatives.push_back(std::move(doc));
    }
    return s;
  }

  static std::string render(const std::vector<std::size_t>& concepts, std::string_view lang) {
    std::string out;
    for (std::size_t i = 0; i < concepts.size(); ++i) {
      if (i) out.push_back(' ');
      out += lang;
      out += std::to_string(concepts[i]);
    }
    return out;
  }

  BilingualLexicon lexicon(std::string_view from, std::string_view to) const {
    BilingualLexicon lex{std::string(from), std::string(to)};
    for (std::size_t i = 0; i < per_topic_ * c_.topics; ++i) {
      lex.insert(std::string(from) + std::to_string(i), std::string(to) + std::to_string(i));
    }
    return lex;
  }

 private:
  std::vector<std::size_t> topic_concepts(std::size_t topic) const {
    std::vector<std::size_t> v(per_topic_);
    for (std::size_t i = 0; i < per_topic_; ++i) v[i] = topic * per_topic_ + i;
    return v;
  }
  std::size_t length(SeqRng& rng) const {
    const std::size_t lo = std::max<std::size_t>(c_.query_length + 1, c_.doc_length / 2);
    const std::size_t hi = c_.doc_length + c_.doc_length / 2;
    return lo + rng.pick(hi - lo + 1);
  }

  ExperimentConfig c_;
  std::size_t per_topic_;
};

}  // namespace detail

struct TestCollection {
  QuerySet queries;
  Collection passages;
  Qrels qrels;
  std::map<std::string, std::vector<IdText>> candidates;  // qid -> candidate passages
};

inline Run rerank_all(const ToyRanker& ranker, const TestCollection& test,
                      std::span<const BilingualLexicon> lexicons) {
  Run run;
  for (const auto& q : test.queries.records()) {
    for (auto& e : rerank(ranker, q.text, test.candidates.at(q.id), lexicons)) {
      run.add(q.id, std::move(e));
    }
  }
  return run;
}

inline ExperimentReport run_overfitting_experiment(const ExperimentConfig& config) {
  const detail::SyntheticWorld world(config);
  detail::SeqRng rng(config.seed);

  TripleSet mono;
  for (std::size_t i = 0; i < config.train_queries; ++i) {
    const auto s = world.sample(rng, 1);
    mono.push_back({world.render(s.query, "a"), world.render(s.relevant, "a"),
                    world.render(s.negatives[0], "a"), std::nullopt});
  }

  auto make_test = [&](std::string_view query_lang, std::string_view doc_lang,
                       std::string_view prefix) {
    TestCollection t;
    for (std::size_t i = 0; i < config.test_queries; ++i) {
      const auto s = world.sample(rng, config.candidates - 1);
      const std::string qid = std::string(prefix) + std::to_string(i);
      t.queries.add(qid, world.render(s.query, query_lang));
      std::vector<std::size_t> slots(config.candidates);
      for (std::size_t j = 0; j < slots.size(); ++j) slots[j] = j;
      rng.shuffle(slots);
      auto doc_id = [&](std::size_t slot) {
        std::string n = std::to_string(slot);
        return qid + "_d" + std::string(n.size() < 3 ? 3 - n.size() : 0, '0') + n;
      };
      auto& cands = t.candidates[qid];
      cands.push_back({doc_id(slots[0]), world.render(s.relevant, doc_lang)});
      t.qrels.add({qid, "0", cands.back().id, 1});
      for (std::size_t j = 0; j < s.negatives.size(); ++j) {
        cands.push_back({doc_id(slots[j + 1]), world.render(s.negatives[j], doc_lang)});
      }
      for (const auto& c : cands) t.passages.add(c.id, c.text);
    }
    return t;
  };
  const TestCollection moir = make_test("b", "b", "moir");
  const TestCollection clir = make_test("b", "c", "clir");

  // Switching lexicons from the pivot, and all-pairs lexicons for features.
  LexiconSet switching;
  switching.words.emplace("b", world.lexicon("a", "b"));
  switching.words.emplace("c", world.lexicon("a", "c"));
  std::vector<BilingualLexicon> feature_lexicons;
  for (const auto& [from, to] : std::vector<std::pair<std::string, std::string>>{
           {"a", "b"}, {"a", "c"}, {"b", "a"}, {"b", "c"}, {"c", "a"}, {"c", "b"}}) {
    feature_lexicons.push_back(world.lexicon(from, to));
  }

  SwitchPolicy policy;
  policy.strategy = Strategy::kMultilingual;
  policy.p = config.p;
  policy.query_langs = {"b", "c"};
  policy.doc_langs = {"b", "c"};
  policy.seed = config.seed;
  policy.validate();

  ExperimentReport report;
  report.config = config;
  TripleSet switched;
  for (const auto& t : mono) {
    switched.push_back(
        switch_triple(t, policy, switching, &report.switch_query, &report.switch_doc));
  }
  report.overlap = overlap_reduction(mono, switched);

  report.monolingual = train(mono, feature_lexicons, config.train);
  report.code_switched = train(switched, feature_lexicons, config.train);

  auto mrr = [&](const ToyRanker& r, const TestCollection& t) {
    return mrr_at_k(rerank_all(r, t, feature_lexicons), t.qrels, 10).mean;
  };
  report.mono_moir = mrr(report.monolingual, moir);
  report.mono_clir = mrr(report.monolingual, clir);
  report.cs_moir = mrr(report.code_switched, moir);
  report.cs_clir = mrr(report.code_switched, clir);
  return report;
}

inline void write_experiment_report(std::ostream& out, const ExperimentReport& r) {
  auto pct = [](double x) { return detail::format_double(std::round(x * 10000.0) / 100.0); };
  out << "toy monolingual-overfitting experiment\n";
  out << "  train queries " << r.config.train_queries << ", test queries "
      << r.config.test_queries << " x " << r.config.candidates << " candidates, p=" << r.config.p
      << ", seed=" << r.config.seed << "\n\n";
  out << "  ranker               MoIR MRR@10   CLIR MRR@10\n";
  char line[128];
  std::snprintf(line, sizeof line, "  %-20s %11.4f   %11.4f\n", "A (monolingual)", r.mono_moir,
                r.mono_clir);
  out << line;
  std::snprintf(line, sizeof line, "  %-20s %11.4f   %11.4f\n", "B (ML-CS)", r.cs_moir, r.cs_clir);
  out << line;
  out << "\n  A relative drop MoIR->CLIR: " << pct(r.mono_relative_drop()) << "%\n";
  out << "  B vs A on CLIR: +" << detail::format_double(r.cs_clir - r.mono_clir) << "\n";
  out << "  training overlap reduction: " << pct(r.overlap.reduction) << "% ("
      << r.overlap.tokens_before << " -> " << r.overlap.tokens_after << " tokens)\n\n";
  out << "  weights              A            B\n";
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    std::snprintf(line, sizeof line, "  %-16s %10.4f   %10.4f\n", kFeatureNames[i].data(),
                  r.monolingual.weights()[i], r.code_switched.weights()[i]);
    out << line;
  }
}

inline void write_experiment_kv(std::ostream& out, const ExperimentReport& r) {
  auto kv = [&](std::string_view k, double v) {
    out << k << '=' << detail::format_double(v) << '\n';
  };
  kv("mono_moir_mrr10", r.mono_moir);
  kv("mono_clir_mrr10", r.mono_clir);
  kv("cs_moir_mrr10", r.cs_moir);
  kv("cs_clir_mrr10", r.cs_clir);
  kv("mono_relative_drop", r.mono_relative_drop());
  kv("cs_clir_margin", r.cs_clir - r.mono_clir);
  kv("cs_moir_relative_change", r.cs_moir_relative_change());
  kv("train_switch_rate_query", r.switch_query.switch_rate());
  kv("train_switch_rate_doc", r.switch_doc.switch_rate());
  kv("train_overlap_reduction", r.overlap.reduction);
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    kv("weight_a_" + std::string(kFeatureNames[i]), r.monolingual.weights()[i]);
  }
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    kv("weight_b_" + std::string(kFeatureNames[i]), r.code_switched.weights()[i]);
  }
}

}  // namespace csclir
