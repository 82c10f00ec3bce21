// csclir: code-switched cross-lingual IR data and evaluation toolkit.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csclir/codeswitch.hpp"
#include "csclir/corpus.hpp"
#include "csclir/embedspace.hpp"
#include "csclir/ireval.hpp"
#include "csclir/lexicon.hpp"
#include "csclir/toyrank.hpp"

namespace {

using namespace csclir;

// Output stream that is either a file or stdout ("-").
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw NotFoundError("cannot open output " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw Error("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::pair<std::string, std::string> split_assignment(const std::string& s, const char* flag) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
    throw InvalidArgument(std::string(flag) + " expects <lang>=<path>, got '" + s + "'");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

void print_stats_kv(std::ostream& out, const SwitchStats& s, const std::string& prefix) {
  out << prefix << "texts=" << s.texts << '\n';
  out << prefix << "texts_with_switch=" << s.texts_with_switch << '\n';
  out << prefix << "tokens_total=" << s.tokens_total << '\n';
  out << prefix << "tokens_eligible=" << s.tokens_eligible << '\n';
  out << prefix << "tokens_switched=" << s.tokens_switched << '\n';
  out << prefix << "ngrams_replaced=" << s.ngrams_replaced << '\n';
  out << prefix << "switch_rate=" << detail::format_double(s.switch_rate()) << '\n';
  out << prefix << "texts_with_switch_fraction="
      << detail::format_double(s.texts_with_switch_fraction()) << '\n';
  for (const auto& [lang, n] : s.per_language) {
    out << prefix << "switched_" << lang << '=' << n << '\n';
  }
}

// Fully resolved options of the chosen subcommand, defaults included.
std::string echo_config(const CLI::App& sub, unsigned jobs) {
  std::istringstream in(sub.config_to_str(true, false));
  std::string out = "# subcommand=" + sub.get_name() + "\n# jobs=" + std::to_string(jobs) + "\n";
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out += "# " + line + '\n';
  }
  return out;
}

struct Globals {
  unsigned jobs = 1;
};

// ---------------------------------------------------------------------------
struct InduceArgs {
  std::string src, tgt, out, src_lang = "en", tgt_lang;
  std::size_t limit = 0;
};

int run_induce(const InduceArgs& a, const Globals& g) {
  std::optional<std::size_t> limit;
  if (a.limit) limit = a.limit;
  const auto src = load_embeddings(a.src, limit, a.src_lang);
  const auto tgt = load_embeddings(a.tgt, limit, a.tgt_lang);
  check_aligned(src, tgt);
  const auto best = nearest_targets(src, tgt, g.jobs);
  Output out(a.out);
  write_induced_tsv(out.stream(), src, tgt, best);
  out.finish();
  std::cerr << "induced " << best.size() << " entries (" << src.size() << " source x "
            << tgt.size() << " target terms, dim " << src.dim() << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
struct SwitchArgs {
  std::string strategy = "ml";
  double p = 0.5;
  std::vector<std::string> query_langs, doc_langs, lexicons;
  std::uint64_t seed = 0;
  std::string input, output = "-", format = "triples", queries, collection, side = "doc";
  std::string stats_out;
  std::size_t max_n = NGramLexicon::kDefaultMaxN;
  std::vector<double> sweep;
  bool p_given = false;
};

LexiconSet load_lexicons(const SwitchArgs& a, Strategy strategy) {
  LexiconSet set;
  for (const auto& spec : a.lexicons) {
    auto [lang, path] = split_assignment(spec, "--lexicon");
    if (strategy == Strategy::kWiki) {
      WikiIngestReport rep;
      auto lex = parse_wiki_titles(path, a.max_n, &rep, "en", lang);
      std::cerr << "lexicon " << lang << ": " << rep.kept << " n-grams kept, "
                << rep.dropped_too_long << " longer than " << a.max_n << ", "
                << rep.dropped_duplicate << " duplicates\n";
      set.ngrams.emplace(lang, std::move(lex));
    } else {
      auto lex = read_lexicon_tsv(path, "en", lang);
      std::cerr << "lexicon " << lang << ": " << lex.size() << " entries\n";
      set.words.emplace(lang, std::move(lex));
    }
  }
  return set;
}

struct SwitchRun {
  TransformStats stats;
  bool triples = true;
};

SwitchRun switch_file(const SwitchArgs& a, const SwitchPolicy& policy, const LexiconSet& lex,
                      std::ostream& out, unsigned jobs, const QuerySet* queries,
                      const Collection* passages) {
  std::ifstream in(a.input, std::ios::binary);
  if (!in) throw NotFoundError("cannot open input " + a.input);
  SwitchRun run;
  if (a.format == "tsv") {
    run.triples = false;
    const Side side = a.side == "query" ? Side::kQuery : Side::kDoc;
    auto s = transform_id_texts(in, out, policy, lex, side, jobs, a.input);
    run.stats.records = s.texts;
    (side == Side::kQuery ? run.stats.query : run.stats.doc) = s;
    return run;
  }
  if (a.format == "id-triples") {
    TripleReader reader(in, *queries, *passages, a.input);
    run.stats = transform_triples(reader, out, policy, lex, jobs);
  } else {
    TripleReader reader(in, a.input);
    run.stats = transform_triples(reader, out, policy, lex, jobs);
  }
  return run;
}

int run_code_switch(const SwitchArgs& a, const Globals& g, const std::string& config_echo) {
  SwitchPolicy policy;
  policy.strategy = parse_strategy(a.strategy);
  policy.p = a.p;
  policy.query_langs = a.query_langs;
  policy.doc_langs = a.doc_langs;
  policy.seed = a.seed;
  if (policy.strategy == Strategy::kTranslateTest && a.p_given && a.p != 1.0) {
    std::cerr << "warning: translate-test always uses p=1\n";
  }
  policy.validate();
  const LexiconSet lex = load_lexicons(a, policy.strategy);
  lex.require(policy);

  QuerySet queries;
  Collection passages;
  if (a.format == "id-triples") {
    if (a.queries.empty() || a.collection.empty()) {
      throw InvalidArgument("id-triples need --queries and --collection");
    }
    queries = read_queries(a.queries);
    passages = read_collection(a.collection);
  }

  std::cerr << config_echo;
  if (!a.sweep.empty()) {
    // Statistics only; data is discarded.
    std::ostringstream table;
    table << "# switch-rate sweep (" << to_string(policy.strategy) << ")\n";
    table << "p       query_rate  doc_rate    texts_with_switch\n";
    for (double p : a.sweep) {
      SwitchPolicy sp = policy;
      sp.p = p;
      sp.validate();
      std::ofstream sink;  // unopened: writes are dropped
      const auto run = switch_file(a, sp, lex, sink, g.jobs, &queries, &passages);
      SwitchStats all = run.stats.query;
      all.merge(run.stats.doc);
      char line[160];
      std::snprintf(line, sizeof line, "%-7.3f %-11.4f %-11.4f %.4f\n", p,
                    run.stats.query.switch_rate(), run.stats.doc.switch_rate(),
                    all.texts_with_switch_fraction());
      table << line;
    }
    Output out(a.stats_out.empty() ? "-" : a.stats_out);
    out.stream() << table.str();
    out.finish();
    return 0;
  }

  if (a.input.empty()) throw InvalidArgument("--input is required");
  Output out(a.output);
  const auto run = switch_file(a, policy, lex, out.stream(), g.jobs, &queries, &passages);
  out.finish();

  std::ostringstream kv;
  kv << "records=" << run.stats.records << '\n';
  if (run.stats.query.texts) print_stats_kv(kv, run.stats.query, "query_");
  if (run.stats.doc.texts) print_stats_kv(kv, run.stats.doc, "doc_");
  if (a.stats_out.empty()) {
    std::cerr << kv.str();
  } else {
    Output stats(a.stats_out);
    stats.stream() << config_echo << kv.str();
    stats.finish();
  }
  return 0;
}

// ---------------------------------------------------------------------------
struct MixArgs {
  std::vector<std::string> inputs;
  std::uint64_t seed = 0;
  std::string output = "-", sidecar;
};

int run_mix(const MixArgs& a) {
  std::map<std::string, TextTable> per_lang;
  for (const auto& spec : a.inputs) {
    auto [lang, path] = split_assignment(spec, "--input");
    if (!per_lang.emplace(lang, read_collection(path)).second) {
      throw InvalidArgument("language '" + lang + "' given twice");
    }
  }
  const auto mixed = mix_language_corpus(per_lang, a.seed);
  Output out(a.output);
  write_id_text(out.stream(), mixed.mixed);
  out.finish();
  if (!a.sidecar.empty()) {
    Output side(a.sidecar);
    write_sidecar(side.stream(), mixed.sidecar);
    side.finish();
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& [id, lang] : mixed.sidecar) ++counts[lang];
  for (const auto& [lang, n] : counts) std::cerr << "mixed_" << lang << '=' << n << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
struct EvalArgs {
  std::string run, qrels, baseline, per_query;
  std::size_t k = 10;
  double alpha = 0.05;
  std::size_t m = 1;
};

void report_id_mismatches(const Run& run, const Qrels& qrels, const std::string& name) {
  std::size_t unjudged = 0, missing = 0;
  for (const auto& list : run.lists()) unjudged += qrels.by_query().contains(list.qid) ? 0 : 1;
  for (const auto& [qid, judged] : qrels.by_query()) missing += run.find(qid) ? 0 : 1;
  if (unjudged) std::cerr << name << ": " << unjudged << " run queries not in qrels (ignored)\n";
  if (missing) std::cerr << name << ": " << missing << " qrels queries missing from run (score 0)\n";
  if (run.score_order_violations()) {
    std::cerr << name << ": warning: " << run.score_order_violations()
              << " adjacent entries have scores that disagree with their ranks\n";
  }
}

int run_eval(const EvalArgs& a, const std::string& config_echo) {
  const Qrels qrels = read_qrels(a.qrels);
  const Run run = read_run(a.run);
  report_id_mismatches(run, qrels, a.run);
  const auto report = mrr_at_k(run, qrels, a.k);

  std::optional<MetricReport> base;
  std::optional<SignificanceResult> sig;
  if (!a.baseline.empty()) {
    const Run baseline = read_run(a.baseline);
    report_id_mismatches(baseline, qrels, a.baseline);
    base = mrr_at_k(baseline, qrels, a.k);
    const auto [x, y] = align_per_query(report, *base);
    sig = paired_t_test(x, y, a.alpha, a.m);
  }
  if (!a.per_query.empty()) {
    Output pq(a.per_query);
    write_per_query_tsv(pq.stream(), report);
    pq.finish();
  }

  auto& out = std::cout;
  const std::string k = std::to_string(a.k);
  char line[160];
  out << config_echo;
  out << "run        " << a.run << '\n';
  out << "queries    " << report.query_count() << '\n';
  std::snprintf(line, sizeof line, "MRR@%-6s %.6f\n", k.c_str(), report.mean);
  out << line;
  if (base) {
    out << "baseline   " << a.baseline << '\n';
    std::snprintf(line, sizeof line, "MRR@%-6s %.6f\n", k.c_str(), base->mean);
    out << line;
    std::snprintf(line, sizeof line, "t          %.6f (df %.0f)\np          %.6g\n", sig->t,
                  sig->df, sig->p_value);
    out << line;
    std::snprintf(line, sizeof line, "threshold  %.6g (alpha %.3g / m %zu)\n", sig->threshold,
                  sig->alpha, sig->comparisons);
    out << line;
    out << "significant " << (sig->significant ? "yes" : "no") << '\n';
  }
  out << '\n';
  out << "mrr_at_" << k << '=' << detail::format_double(report.mean) << '\n';
  out << "queries=" << report.query_count() << '\n';
  if (base) {
    out << "baseline_mrr_at_" << k << '=' << detail::format_double(base->mean) << '\n';
    out << "t=" << detail::format_double(sig->t) << '\n';
    out << "df=" << detail::format_double(sig->df) << '\n';
    out << "p_value=" << detail::format_double(sig->p_value) << '\n';
    out << "threshold=" << detail::format_double(sig->threshold) << '\n';
    out << "significant=" << (sig->significant ? 1 : 0) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
struct OverlapArgs {
  std::string queries, collection, qrels, run, triples_before, triples_after;
  std::size_t k = 10;
};

int run_analyze_overlap(const OverlapArgs& a, const std::string& config_echo) {
  auto& out = std::cout;
  out << config_echo;
  out << "# token overlap uses the toolkit word tokenizer (case-folded words), not a model\n"
         "# subword tokenizer; bucket semantics hold, absolute counts differ.\n";
  std::ostringstream kv;
  if (!a.queries.empty() || !a.collection.empty() || !a.qrels.empty() || !a.run.empty()) {
    if (a.queries.empty() || a.collection.empty() || a.qrels.empty() || a.run.empty()) {
      throw InvalidArgument("bucketing needs --queries, --collection, --qrels and --run");
    }
    const auto buckets = bucket_queries(read_queries(a.queries), read_collection(a.collection),
                                        read_qrels(a.qrels), read_run(a.run), a.k);
    out << "bucket        queries   MRR@" << a.k << '\n';
    for (auto b : {OverlapBucket::kNone, OverlapBucket::kSome, OverlapBucket::kSignificant}) {
      char line[128];
      std::snprintf(line, sizeof line, "%-13s %7zu   %.6f\n", std::string(to_string(b)).c_str(),
                    buckets[b].queries, buckets[b].mrr);
      out << line;
      kv << "bucket_" << to_string(b) << "_queries=" << buckets[b].queries << '\n';
      kv << "bucket_" << to_string(b) << "_mrr=" << detail::format_double(buckets[b].mrr) << '\n';
    }
  }
  if (!a.triples_before.empty() || !a.triples_after.empty()) {
    if (a.triples_before.empty() || a.triples_after.empty()) {
      throw InvalidArgument("overlap reduction needs --triples-before and --triples-after");
    }
    std::ifstream bin(a.triples_before, std::ios::binary), ain(a.triples_after, std::ios::binary);
    if (!bin) throw NotFoundError("cannot open " + a.triples_before);
    if (!ain) throw NotFoundError("cannot open " + a.triples_after);
    TripleReader before(bin, a.triples_before), after(ain, a.triples_after);
    const auto r = overlap_reduction(before, after);
    out << "records " << r.records << ", overlapping query tokens " << r.tokens_before << " -> "
        << r.tokens_after << ", reduction " << detail::format_double(r.reduction) << '\n';
    kv << "records=" << r.records << '\n';
    kv << "overlap_tokens_before=" << r.tokens_before << '\n';
    kv << "overlap_tokens_after=" << r.tokens_after << '\n';
    kv << "overlap_reduction=" << detail::format_double(r.reduction) << '\n';
  }
  out << '\n' << kv.str();
  return 0;
}

// ---------------------------------------------------------------------------
struct ToyArgs {
  ExperimentConfig config;
  std::string weights_a, weights_b;
};

int run_toy(ToyArgs a, const std::string& config_echo) {
  a.config.train.seed = a.config.seed;
  const auto report = run_overfitting_experiment(a.config);
  std::cout << config_echo;
  write_experiment_report(std::cout, report);
  std::cout << '\n';
  write_experiment_kv(std::cout, report);
  if (!a.weights_a.empty()) {
    Output w(a.weights_a);
    write_weights(w.stream(), report.monolingual);
    w.finish();
  }
  if (!a.weights_b.empty()) {
    Output w(a.weights_b);
    write_weights(w.stream(), report.code_switched);
    w.finish();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Code-switched cross-lingual IR toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option values (flags override)");
  app.option_defaults()->always_capture_default();
  Globals globals;
  app.add_option("-j,--jobs", globals.jobs, "Worker threads; output is identical for any value")
      ->check(CLI::Range(1u, 1024u));

  InduceArgs induce;
  auto* induce_cmd = app.add_subcommand("induce-lexicon", "Nearest-cosine lexicon from aligned embeddings");
  induce_cmd->add_option("--src", induce.src, "Source embeddings (word2vec text)")->required();
  induce_cmd->add_option("--tgt", induce.tgt, "Target embeddings (word2vec text)")->required();
  induce_cmd->add_option("--out", induce.out, "Output TSV (- for stdout)")->required();
  induce_cmd->add_option("--limit", induce.limit, "Read at most this many terms per file (0 = all)");
  induce_cmd->add_option("--src-lang", induce.src_lang, "Source language code");
  induce_cmd->add_option("--tgt-lang", induce.tgt_lang, "Target language code");

  SwitchArgs sw;
  auto* sw_cmd = app.add_subcommand("code-switch", "Code-switch triples or id<TAB>text files");
  sw_cmd->add_option("--strategy", sw.strategy, "bl, ml, wiki or translate-test")
      ->check(CLI::IsMember({"bl", "ml", "wiki", "translate-test"}));
  auto* p_opt = sw_cmd->add_option("--p", sw.p, "Per-token switching probability")
                    ->check(CLI::Range(0.0, 1.0));
  sw_cmd->add_option("--query-langs", sw.query_langs, "Query-side language pool")
      ->delimiter(',')->required();
  sw_cmd->add_option("--doc-langs", sw.doc_langs, "Document-side language pool")
      ->delimiter(',')->required();
  sw_cmd->add_option("--lexicon", sw.lexicons, "<lang>=<path>, repeatable")->required();
  sw_cmd->add_option("--seed", sw.seed, "Random seed")->required();
  sw_cmd->add_option("--input", sw.input, "Input file");
  sw_cmd->add_option("--output", sw.output, "Output file (- for stdout)");
  sw_cmd->add_option("--format", sw.format, "triples, id-triples or tsv")
      ->check(CLI::IsMember({"triples", "id-triples", "tsv"}));
  sw_cmd->add_option("--queries", sw.queries, "queries.tsv for id-triples");
  sw_cmd->add_option("--collection", sw.collection, "collection.tsv for id-triples");
  sw_cmd->add_option("--side", sw.side, "Pool used for tsv input: query or doc")
      ->check(CLI::IsMember({"query", "doc"}));
  sw_cmd->add_option("--max-n", sw.max_n, "Longest Wikipedia-title n-gram")->check(CLI::Range(1, 16));
  sw_cmd->add_option("--sweep", sw.sweep, "Only report switch rates for these p values")
      ->delimiter(',');
  sw_cmd->add_option("--stats", sw.stats_out, "Write statistics here instead of stderr");

  MixArgs mix;
  auto* mix_cmd = app.add_subcommand("mix", "Mix per-language collections or query sets by id");
  mix_cmd->add_option("--input", mix.inputs, "<lang>=<path>, repeatable")->required();
  mix_cmd->add_option("--seed", mix.seed, "Random seed")->required();
  mix_cmd->add_option("--output", mix.output, "Mixed id<TAB>text output (- for stdout)");
  mix_cmd->add_option("--sidecar", mix.sidecar, "id<TAB>language output");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "MRR@k with optional paired t-test against a baseline");
  eval_cmd->add_option("--run", ev.run, "TREC run")->required();
  eval_cmd->add_option("--qrels", ev.qrels, "TREC qrels")->required();
  eval_cmd->add_option("--k", ev.k, "Rank cutoff")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--baseline", ev.baseline, "Baseline TREC run for significance testing");
  eval_cmd->add_option("--alpha", ev.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--m", ev.m, "Number of comparisons (Bonferroni)")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--per-query", ev.per_query, "Write qid<TAB>reciprocal-rank here");

  OverlapArgs ov;
  auto* ov_cmd = app.add_subcommand("analyze-overlap", "Overlap buckets and overlap reduction");
  ov_cmd->add_option("--queries", ov.queries, "queries.tsv");
  ov_cmd->add_option("--collection", ov.collection, "collection.tsv");
  ov_cmd->add_option("--qrels", ov.qrels, "TREC qrels");
  ov_cmd->add_option("--run", ov.run, "TREC run");
  ov_cmd->add_option("--k", ov.k, "Rank cutoff")->check(CLI::PositiveNumber);
  ov_cmd->add_option("--triples-before", ov.triples_before, "Text triples before switching");
  ov_cmd->add_option("--triples-after", ov.triples_after, "Text triples after switching");

  ToyArgs toy;
  auto& tc = toy.config;
  auto* toy_cmd = app.add_subcommand("toy-experiment", "Synthetic monolingual-overfitting experiment");
  toy_cmd->add_option("--seed", tc.seed, "Random seed")->required();
  toy_cmd->add_option("--concepts", tc.concepts, "Concept vocabulary size");
  toy_cmd->add_option("--topics", tc.topics, "Number of topics");
  toy_cmd->add_option("--train-queries", tc.train_queries, "Training triples");
  toy_cmd->add_option("--test-queries", tc.test_queries, "Test queries per setting");
  toy_cmd->add_option("--candidates", tc.candidates, "Candidates per test query");
  toy_cmd->add_option("--doc-length", tc.doc_length, "Mean passage length");
  toy_cmd->add_option("--hard-negatives", tc.hard_negative_rate, "Fraction of negatives sharing a query concept")
      ->check(CLI::Range(0.0, 1.0));
  toy_cmd->add_option("--p", tc.p, "Code-switching probability for ranker B")->check(CLI::Range(0.0, 1.0));
  toy_cmd->add_option("--epochs", tc.train.epochs, "Gradient descent epochs");
  toy_cmd->add_option("--learning-rate", tc.train.learning_rate, "Learning rate");
  toy_cmd->add_option("--negatives", tc.train.negatives_per_positive, "Negatives per positive");
  toy_cmd->add_option("--l2", tc.train.l2, "L2 penalty");
  toy_cmd->add_option("--weights-a", toy.weights_a, "Write ranker A weights (key=value)");
  toy_cmd->add_option("--weights-b", toy.weights_b, "Write ranker B weights (key=value)");

  CLI11_PARSE(app, argc, argv);
  sw.p_given = p_opt->count() > 0;

  try {
    CLI::App* chosen = app.get_subcommands().front();
    const std::string echo = echo_config(*chosen, globals.jobs);
    if (induce_cmd->parsed()) {
      std::cerr << echo;
      return run_induce(induce, globals);
    }
    if (sw_cmd->parsed()) return run_code_switch(sw, globals, echo);
    if (mix_cmd->parsed()) {
      std::cerr << echo;
      return run_mix(mix);
    }
    if (eval_cmd->parsed()) return run_eval(ev, echo);
    if (ov_cmd->parsed()) return run_analyze_overlap(ov, echo);
    if (toy_cmd->parsed()) return run_toy(toy, echo);
  } catch (const csclir::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
