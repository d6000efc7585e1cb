#include "hgoe/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "hgoe/error.hpp"

namespace hgoe {

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw DataError("auc: scores/labels length mismatch");
  std::size_t n_pos = 0;
  for (const int label : labels) {
    if (label != 0 && label != 1) throw DataError("auc: labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(label);
  }
  const std::size_t n = scores.size();
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("auc: both classes must be present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average ranks within tie blocks; rank sums stay exact half-integers.
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) pos_rank_sum += avg_rank;
    i = j;
  }

  const double u = pos_rank_sum - 0.5 * static_cast<double>(n_pos) *
                                      (static_cast<double>(n_pos) + 1.0);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace hgoe
