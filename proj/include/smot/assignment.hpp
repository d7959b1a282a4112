#pragma once

#include <vector>

namespace smot {

// Maximum-weight bipartite assignment (Hungarian algorithm, O(n^3)).
// weights is rows x cols, rectangular allowed. Returns, for each row, the
// assigned column or -1. Every row is assigned when rows <= cols; callers
// that treat some pairs as forbidden give them weight 0 and drop them after.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights);

}  // namespace smot
