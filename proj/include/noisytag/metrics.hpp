#pragma once

// Ranking metrics written from first principles. roc_auc is the
// Mann-Whitney statistic (ties credit 1/2, computed via average ranks);
// average_precision is the non-interpolated form with stable-order tie
// breaking. Both are checked against exhaustive pairwise oracles in tests.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "noisytag/errors.hpp"

namespace noisytag {

inline double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ShapeMismatch("roc_auc: size mismatch");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw DomainError("roc_auc: labels must be 0/1");
    n_pos += static_cast<std::size_t>(l);
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DegenerateLabels("roc_auc: single-class labels");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of average ranks (1-based) over the positives; ties share the mean
  // rank of their block, which is exactly the 1/2-credit convention.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

inline double average_precision(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ShapeMismatch("average_precision: size mismatch");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw DomainError("average_precision: labels must be 0/1");
    n_pos += static_cast<std::size_t>(l);
  }
  if (n_pos == 0) throw DegenerateLabels("average_precision: no positive labels");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double ap = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 1; rank <= n; ++rank) {
    if (labels[order[rank - 1]] == 1) {
      ++hits;
      ap += static_cast<double>(hits) / static_cast<double>(rank);
    }
  }
  return ap / static_cast<double>(n_pos);
}

struct MacroResult {
  double value = 0.0;
  int scored_tags = 0;
  int skipped_tags = 0;
};

enum class TagMetric { auc, ap };

// Unweighted mean of the per-tag metric over tags with both classes present.
// score/label matrices are row-major n_items x n_tags.
inline MacroResult macro_over_tags(TagMetric metric,
                                   std::span<const double> score_matrix,
                                   std::span<const int> label_matrix,
                                   std::size_t n_items, std::size_t n_tags) {
  if (score_matrix.size() != n_items * n_tags || label_matrix.size() != n_items * n_tags) {
    throw ShapeMismatch("macro_over_tags: matrix size mismatch");
  }
  MacroResult result;
  double sum = 0.0;
  std::vector<double> scores(n_items);
  std::vector<int> labels(n_items);
  for (std::size_t t = 0; t < n_tags; ++t) {
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n_items; ++i) {
      scores[i] = score_matrix[i * n_tags + t];
      labels[i] = label_matrix[i * n_tags + t];
      n_pos += static_cast<std::size_t>(labels[i]);
    }
    if (n_pos == 0 || n_pos == n_items) {
      ++result.skipped_tags;
      continue;
    }
    sum += metric == TagMetric::auc ? roc_auc(scores, labels) : average_precision(scores, labels);
    ++result.scored_tags;
  }
  if (result.scored_tags == 0) throw AllTagsDegenerate("macro_over_tags: no scorable tags");
  result.value = sum / result.scored_tags;
  return result;
}

}  // namespace noisytag
