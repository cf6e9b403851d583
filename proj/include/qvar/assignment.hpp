#pragma once

#include <Eigen/Dense>
#include <vector>

namespace qvar {

struct AssignmentResult {
    std::vector<int> row_to_col;  // row i matched to column row_to_col[i]
    double cost = 0.0;            // sum of matched entries
};

// Exact minimum-cost perfect matching on a square cost matrix
// (Jonker-Volgenant style shortest augmenting paths, O(n^3)).
AssignmentResult solve_assignment(const Eigen::MatrixXd& cost);

// Exhaustive oracle, O(n!); intended for tests with n <= 8.
AssignmentResult solve_assignment_brute_force(const Eigen::MatrixXd& cost);

}  // namespace qvar
