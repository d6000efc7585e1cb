#pragma once

#include <vector>

namespace hgoe {

// Area under the ROC curve via the Mann-Whitney statistic: the fraction of
// (OOD, ID) pairs where the OOD score is higher, ties counted as 0.5.
// Computed by rank sums in O(n log n). Requires both classes present.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace hgoe
