#pragma once

// Test-only generators and oracles for embedding spaces.

#include <algorithm>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "csclir/embedspace.hpp"

namespace csclir::testing {

struct ToySpace {
  std::vector<std::string> vocab;
  std::vector<std::vector<double>> rows;  // raw, unnormalized
  EmbeddingSpace space;
};

// Integer vectors in [-3, 3]^d whose squared norm is 1, 4, 16 or 64. Their
// norms are powers of two, so normalization and every dot product are exact
// in float and double: mathematically tied cosines stay tied in any
// evaluation order. About one row in five duplicates an earlier row to
// force ties.
inline ToySpace dyadic_space(std::mt19937_64& gen, std::size_t n, std::size_t d,
                             const std::string& prefix) {
  ToySpace t;
  std::uniform_int_distribution<int> comp(-3, 3);
  std::uniform_int_distribution<int> coin(0, 4);
  while (t.rows.size() < n) {
    if (!t.rows.empty() && coin(gen) == 0) {
      std::uniform_int_distribution<std::size_t> pick(0, t.rows.size() - 1);
      t.rows.push_back(t.rows[pick(gen)]);
      continue;
    }
    std::vector<double> row(d);
    int sq = 0;
    for (auto& x : row) {
      x = comp(gen);
      sq += static_cast<int>(x * x);
    }
    if (sq == 1 || sq == 4 || sq == 16 || sq == 64) t.rows.push_back(row);
  }
  for (std::size_t i = 0; i < n; ++i) t.vocab.push_back(prefix + std::to_string(i));
  t.space = EmbeddingSpace::from_rows(prefix, t.vocab, t.rows);
  return t;
}

// Exhaustive oracle on the raw vectors: highest cosine, lowest index on ties.
inline std::size_t brute_force_argmax(const std::vector<double>& u,
                                      const std::vector<std::vector<double>>& targets) {
  std::size_t best = 0;
  double best_score = -2.0;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const double s = cosine(u, targets[j]);
    if (s > best_score) {
      best_score = s;
      best = j;
    }
  }
  return best;
}

}  // namespace csclir::testing
