#pragma once

#include <vector>

#include <Eigen/Core>

namespace hvis {

struct LinearAssignment {
    // Column per row, -1 when the row is unassigned.
    std::vector<int> row_to_col;
    double total_cost = 0.0;
    int matched = 0;
};

// Minimum-cost matching on a rectangular cost matrix. Entries >= `forbidden`
// are never matched. Among matchings of maximum size, the cheapest wins; ties
// between equally cheap matchings go to the lexicographically smallest
// row_to_col (an unassigned row sorts after every column).
LinearAssignment hungarian(const Eigen::MatrixXd& cost, double forbidden = 1e17);

}  // namespace hvis
