#pragma once

#include <Eigen/Dense>
#include <vector>

namespace qvar {

// Unordered multiset of Q points in R^n. Entries are kept lexicographically
// sorted so no observable depends on construction order and serialization is
// canonical.
class QPoint {
public:
    QPoint(int ambient_dim, std::vector<Eigen::VectorXd> entries);

    // Q copies of a single point.
    static QPoint repeated(int q, const Eigen::VectorXd& p);

    int q() const { return static_cast<int>(entries_.size()); }
    int dim() const { return n_; }
    const Eigen::VectorXd& entry(int i) const { return entries_.at(i); }
    const std::vector<Eigen::VectorXd>& entries() const { return entries_; }

    bool operator==(const QPoint& other) const;

private:
    int n_;
    std::vector<Eigen::VectorXd> entries_;
};

// Lexicographic comparison of coordinate vectors (canonical order).
bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Grouped decomposition sum_j q_j [[a_j]] of a Q-point.
struct SupportGrouping {
    struct Group {
        int multiplicity;
        Eigen::VectorXd center;
    };
    std::vector<Group> groups;
    double tolerance = 0.0;

    int total_multiplicity() const;
};

// G(T1,T2) = min over permutations sigma of sqrt(sum_i |P_i - S_sigma(i)|^2),
// computed by an exact assignment solve on squared Euclidean costs.
double metric_g(const QPoint& t1, const QPoint& t2);

// Oracle variant minimizing over all permutations explicitly (Q <= 8).
double metric_g_brute_force(const QPoint& t1, const QPoint& t2);

// tau_v(T) = sum_i [[T_i - v]]
QPoint translate(const QPoint& t, const Eigen::VectorXd& v);

// eta o T = Q^{-1} sum_i T_i
Eigen::VectorXd mean_eta(const QPoint& t);

// Single-linkage clustering of the support at threshold tol; centers are the
// multiplicity-weighted means of the clusters, listed in canonical (lex) order.
SupportGrouping group_by_support(const QPoint& t, double tol);

}  // namespace qvar
