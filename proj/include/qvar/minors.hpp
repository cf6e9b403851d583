#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace qvar {

// Multi-index pair (alpha, beta) of order l: alpha an increasing l-subset of
// the column indices {0..m-1}, beta of the row indices {0..n-1}. sigma is the
// interleave sign used by the graph-current pairing (the sign of the
// permutation (complement(alpha), alpha) of {0..m-1}).
struct MultiIndexPair {
    int l;
    std::vector<int> alpha;  // x / column indices
    std::vector<int> beta;   // y / row indices
    int sigma;
};

// tau(m,n) = sum_k C(m,k) C(n,k), k = 1..min(m,n); symmetric in (m,n).
long tau(int m, int n);

long binomial(int n, int k);

// Sign of the permutation (complement(alpha), alpha) of {0..m-1}; equals
// (-1)^{sum over a in alpha of #(b outside alpha with b > a)}.
int sigma_interleave(const std::vector<int>& alpha, int m);

// Canonical enumeration of all tau(m,n) pairs: l ascending, then alpha
// lexicographic, then beta lexicographic. The l=1 block lists column-major
// matrix entries.
class MinorBasis {
public:
    MinorBasis(int m, int n);
    int m() const { return m_; }
    int n() const { return n_; }
    long size() const { return static_cast<long>(pairs_.size()); }
    const MultiIndexPair& pair(long idx) const { return pairs_.at(idx); }
    const std::vector<MultiIndexPair>& pairs() const { return pairs_; }

    // index of a pair in the enumeration; throws if absent
    long index_of(const std::vector<int>& alpha, const std::vector<int>& beta) const;

private:
    int m_, n_;
    std::vector<MultiIndexPair> pairs_;
};

// M_{alpha beta}(A): determinant of the submatrix with rows beta and columns
// alpha of A (n x m). An empty index pair yields 1.
double minor_det(const Eigen::MatrixXd& A, const MultiIndexPair& idx);

// Full minor vector M(A) in the canonical enumeration.
Eigen::VectorXd all_minors(const Eigen::MatrixXd& A, const MinorBasis& basis);
Eigen::VectorXd all_minors(const Eigen::MatrixXd& A);

// Polyaffine map P(A) = c0 + <zeta, M(A)>; a null Lagrangian.
struct PolyaffineFn {
    int m = 0, n = 0;
    double c0 = 0.0;
    Eigen::VectorXd zeta;  // length tau(m,n), canonical enumeration

    double evaluate(const Eigen::MatrixXd& A) const;
};

// Convex representative g(a_1..a_Q, X_1..X_Q) on minor vectors with a
// subgradient oracle; subgradients must satisfy zeta_i = zeta_j when a_i = a_j.
struct PolyconvexRep {
    int m = 0, n = 0, q = 0;
    std::function<double(const std::vector<Eigen::VectorXd>&,
                         const std::vector<Eigen::VectorXd>&)>
        value;
    std::function<std::vector<Eigen::VectorXd>(const std::vector<Eigen::VectorXd>&,
                                               const std::vector<Eigen::VectorXd>&)>
        subgradient;
};

// Supporting polyaffine functions at (a, A): P_j(L) = g(a, M(A))/Q +
// <zeta_j, M(L) - M(A_j)>. Requires A_i = A_j whenever a_i = a_j.
std::vector<PolyaffineFn> polyaffine_support(const PolyconvexRep& rep,
                                             const std::vector<Eigen::VectorXd>& a,
                                             const std::vector<Eigen::MatrixXd>& grads);

}  // namespace qvar
