#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qvar/qpoint.hpp"

namespace qvar {

// Grouped affine Q-valued map sum_j q_j [[a_j + L_j x]]; the first-order model
// of a Q-field at a point.
class AffineQMap {
public:
    struct Group {
        int multiplicity;
        Eigen::VectorXd center;  // a_j in R^n
        Eigen::MatrixXd slope;   // L_j, n x m
    };

    AffineQMap(int domain_dim, std::vector<Group> groups);

    int m() const { return m_; }
    int n() const { return n_; }
    int total_q() const;
    const std::vector<Group>& groups() const { return groups_; }

    QPoint evaluate(const Eigen::VectorXd& x) const;

    // Sheets expanded with multiplicity, in group order: (group j repeated q_j times).
    std::vector<std::pair<Eigen::VectorXd, Eigen::MatrixXd>> sheets() const;

private:
    int m_, n_;
    std::vector<Group> groups_;
};

}  // namespace qvar
