#pragma once

// Cross-lingual embedding spaces and nearest-neighbour lexicon induction.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "csclir/error.hpp"
#include "csclir/lexicon.hpp"
#include "csclir/text.hpp"

namespace csclir {

template <typename T, typename U>
double dot(std::span<const T> u, std::span<const U> v) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    s += static_cast<double>(u[i]) * static_cast<double>(v[i]);
  }
  return s;
}

// Cosine similarity in double precision, clamped to [-1, 1].
template <typename T, typename U>
double cosine(std::span<const T> u, std::span<const U> v) {
  if (u.size() != v.size()) {
    throw MismatchError("cosine: dimension mismatch " + std::to_string(u.size()) + " vs " +
                        std::to_string(v.size()));
  }
  const double nu = std::sqrt(dot(u, u));
  const double nv = std::sqrt(dot(v, v));
  if (nu == 0.0 || nv == 0.0) throw InvalidArgument("cosine: zero vector");
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  return cosine(std::span<const double>(u), std::span<const double>(v));
}

// Vocabulary plus L2-normalized float rows. Immutable once built.
class EmbeddingSpace {
 public:
  EmbeddingSpace() = default;

  // Validates and normalizes. Duplicate terms, ragged rows and zero rows are
  // errors here; file loading resolves duplicates before calling this.
  static EmbeddingSpace from_rows(std::string language, std::vector<std::string> vocab,
                                  const std::vector<std::vector<double>>& rows) {
    if (vocab.size() != rows.size()) throw MismatchError("vocab and row counts differ");
    if (vocab.empty()) throw InvalidArgument("embedding space is empty");
    const std::size_t d = rows.front().size();
    if (d == 0) throw InvalidArgument("embedding dimension must be positive");
    std::vector<float> data;
    data.reserve(vocab.size() * d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != d) {
        throw MismatchError("row for '" + vocab[i] + "' has dimension " +
                            std::to_string(rows[i].size()) + ", expected " + std::to_string(d));
      }
      append_normalized(data, rows[i], vocab[i]);
    }
    return EmbeddingSpace(std::move(language), std::move(vocab), std::move(data), d);
  }

  const std::string& language() const noexcept { return language_; }
  const std::vector<std::string>& vocab() const noexcept { return vocab_; }
  std::size_t size() const noexcept { return vocab_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const float> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }

  std::optional<std::size_t> find(std::string_view term) const {
    auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  friend class EmbeddingLoader;

  EmbeddingSpace(std::string language, std::vector<std::string> vocab, std::vector<float> data,
                 std::size_t dim)
      : language_(std::move(language)), vocab_(std::move(vocab)), data_(std::move(data)),
        dim_(dim) {
    index_.reserve(vocab_.size());
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
      if (!index_.emplace(vocab_[i], i).second) {
        throw InvalidArgument("duplicate term in vocabulary: '" + vocab_[i] + "'");
      }
    }
  }

  template <typename T>
  static void append_normalized(std::vector<float>& data, std::span<const T> row,
                                const std::string& term) {
    const double norm = std::sqrt(dot(row, row));
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw InvalidArgument("zero-norm or non-finite vector for term '" + term + "'");
    }
    for (T x : row) data.push_back(static_cast<float>(static_cast<double>(x) / norm));
  }
  static void append_normalized(std::vector<float>& data, const std::vector<double>& row,
                                const std::string& term) {
    append_normalized(data, std::span<const double>(row), term);
  }

  std::string language_;
  std::vector<std::string> vocab_;
  std::vector<float> data_;
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

// word2vec text format reader.
class EmbeddingLoader {
 public:
  static EmbeddingSpace load(std::istream& in, const std::string& source_name,
                             std::string language, std::optional<std::size_t> limit) {
    if (limit && *limit == 0) throw InvalidArgument("limit must be positive");
    std::vector<std::string> vocab;
    std::unordered_map<std::string, std::size_t> seen;
    std::vector<float> data;
    std::vector<double> row;
    std::size_t dim = 0;
    std::string line;
    std::size_t lineno = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
      ++lineno;
      if (limit && vocab.size() >= *limit) break;
      std::string_view view = chomp(line);
      auto fields = split_ws(view);
      if (fields.empty()) continue;
      if (first_content) {
        first_content = false;
        if (fields.size() == 2 && is_integer(fields[0]) && is_integer(fields[1])) continue;
      }
      if (fields.size() < 2) throw ParseError(source_name, lineno, "line has no vector");
      const std::size_t d = fields.size() - 1;
      if (dim == 0) {
        dim = d;
      } else if (d != dim) {
        throw ParseError(source_name, lineno,
                         "dimension " + std::to_string(d) + " != " + std::to_string(dim));
      }
      row.resize(d);
      for (std::size_t j = 0; j < d; ++j) {
        const auto f = fields[j + 1];
        auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row[j]);
        if (ec != std::errc() || ptr != f.data() + f.size()) {
          throw ParseError(source_name, lineno, "bad number '" + std::string(f) + "'");
        }
      }
      std::string term(fields[0]);
      if (seen.contains(term)) continue;
      try {
        EmbeddingSpace::append_normalized(data, row, term);
      } catch (const InvalidArgument& e) {
        throw ParseError(source_name, lineno, e.what());
      }
      seen.emplace(term, vocab.size());
      vocab.push_back(std::move(term));
    }
    if (vocab.empty()) throw ParseError(source_name + ": no embeddings found");
    return EmbeddingSpace(std::move(language), std::move(vocab), std::move(data), dim);
  }

 private:
  static bool is_integer(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  }
};

inline EmbeddingSpace load_embeddings(std::istream& in, std::optional<std::size_t> limit = {},
                                      std::string language = "",
                                      const std::string& source_name = "<embeddings>") {
  return EmbeddingLoader::load(in, source_name, std::move(language), limit);
}

inline EmbeddingSpace load_embeddings(const std::string& path,
                                      std::optional<std::size_t> limit = {},
                                      std::string language = "") {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open embeddings file: " + path);
  return EmbeddingLoader::load(in, path, std::move(language), limit);
}

struct Neighbor {
  std::string term;
  double score = 0.0;
  std::size_t index = 0;  // row in the target space
};

struct NeighborResult {
  std::string term;
  std::vector<Neighbor> neighbors;  // score descending, then target index ascending
};

inline void check_aligned(const EmbeddingSpace& src, const EmbeddingSpace& tgt) {
  if (src.dim() != tgt.dim()) {
    throw MismatchError("embedding dimensions differ: " + std::to_string(src.dim()) + " vs " +
                        std::to_string(tgt.dim()));
  }
}

inline NeighborResult nearest_neighbors(const EmbeddingSpace& src, const EmbeddingSpace& tgt,
                                        std::string_view term, std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be positive");
  check_aligned(src, tgt);
  const auto row = src.find(term);
  if (!row) throw NotFoundError("term not in source vocabulary: '" + std::string(term) + "'");
  const auto query = src.row(*row);

  std::vector<std::pair<double, std::size_t>> scored(tgt.size());
  for (std::size_t j = 0; j < tgt.size(); ++j) {
    scored[j] = {std::clamp(dot(query, tgt.row(j)), -1.0, 1.0), j};
  }
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), [](const auto& a, const auto& b) {
                      return a.first > b.first || (a.first == b.first && a.second < b.second);
                    });
  NeighborResult result{std::string(term), {}};
  result.neighbors.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    result.neighbors.push_back({tgt.vocab()[scored[i].second], scored[i].first, scored[i].second});
  }
  return result;
}

// For each source row, the target row with the highest cosine; ties go to the
// lowest target index. Every dot product accumulates over the dimension in
// the same order, so the blocked kernel and the per-term scan agree bit for
// bit and the result does not depend on `jobs`.
inline std::vector<std::size_t> nearest_targets(const EmbeddingSpace& src,
                                                const EmbeddingSpace& tgt, unsigned jobs = 1) {
  check_aligned(src, tgt);
  constexpr std::size_t kSrcBlock = 32;
  constexpr std::size_t kTgtBlock = 512;
  const std::size_t n = src.size();
  std::vector<std::size_t> best(n, 0);

  auto work = [&](std::size_t row_begin, std::size_t row_end) {
    std::vector<double> best_score(kSrcBlock);
    for (std::size_t s0 = row_begin; s0 < row_end; s0 += kSrcBlock) {
      const std::size_t s1 = std::min(s0 + kSrcBlock, row_end);
      std::fill(best_score.begin(), best_score.end(), -2.0);
      for (std::size_t t0 = 0; t0 < tgt.size(); t0 += kTgtBlock) {
        const std::size_t t1 = std::min(t0 + kTgtBlock, tgt.size());
        for (std::size_t s = s0; s < s1; ++s) {
          const auto u = src.row(s);
          double& top = best_score[s - s0];
          std::size_t& arg = best[s];
          for (std::size_t t = t0; t < t1; ++t) {
            const double score = dot(u, tgt.row(t));
            if (score > top) {
              top = score;
              arg = t;
            }
          }
        }
      }
    }
  };

  jobs = std::max(1u, jobs);
  if (jobs == 1 || n < 2 * kSrcBlock) {
    work(0, n);
    return best;
  }
  const std::size_t chunk = (n + jobs - 1) / jobs;
  {
    std::vector<std::jthread> workers;
    for (std::size_t b = 0; b < n; b += chunk) {
      workers.emplace_back(work, b, std::min(b + chunk, n));
    }
  }
  return best;
}

inline BilingualLexicon induce_lexicon(const EmbeddingSpace& src, const EmbeddingSpace& tgt,
                                       unsigned jobs = 1) {
  const auto best = nearest_targets(src, tgt, jobs);
  BilingualLexicon lex(src.language(), tgt.language());
  for (std::size_t i = 0; i < best.size(); ++i) {
    lex.insert(src.vocab()[i], tgt.vocab()[best[i]]);
  }
  return lex;
}

// Writes the raw induced pairs in source vocabulary order. Unlike
// BilingualLexicon this keeps terms whose folded forms collide.
inline void write_induced_tsv(std::ostream& out, const EmbeddingSpace& src,
                              const EmbeddingSpace& tgt, std::span<const std::size_t> best) {
  for (std::size_t i = 0; i < best.size(); ++i) {
    out << src.vocab()[i] << '\t' << tgt.vocab()[best[i]] << '\n';
  }
}

}  // namespace csclir
