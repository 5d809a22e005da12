#pragma once

#include <utility>
#include <vector>

namespace followsim {

// Optimal assignment of min(n, m) (row, col) pairs minimizing total cost.
// Among cost-optimal assignments the lexicographically smallest pair
// sequence is returned, so identical inputs always produce identical
// output. Pairs come back sorted by row. Gating is the caller's job
// (large sentinel costs, filtered afterwards).
std::vector<std::pair<int, int>> hungarian(const std::vector<std::vector<double>>& cost);

// Minimum total cost alone (no tie-break pass); used internally and by tests.
double assignment_cost(const std::vector<std::vector<double>>& cost);

}  // namespace followsim
