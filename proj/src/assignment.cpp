#include "qvar/assignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "qvar/errors.hpp"

namespace qvar {

AssignmentResult solve_assignment(const Eigen::MatrixXd& cost) {
    if (cost.rows() != cost.cols()) throw InvalidInput("assignment: cost matrix must be square");
    const int n = static_cast<int>(cost.rows());
    AssignmentResult res;
    res.row_to_col.assign(n, -1);
    if (n == 0) return res;

    const double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; p[j] = row matched to column j
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) res.row_to_col[p[j] - 1] = j - 1;
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost(i, res.row_to_col[i]);
    res.cost = total;
    return res;
}

AssignmentResult solve_assignment_brute_force(const Eigen::MatrixXd& cost) {
    if (cost.rows() != cost.cols()) throw InvalidInput("assignment: cost matrix must be square");
    const int n = static_cast<int>(cost.rows());
    AssignmentResult best;
    best.row_to_col.assign(n, -1);
    if (n == 0) return best;

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<int> best_perm = perm;
    do {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += cost(i, perm[i]);
        if (c < best_cost) {
            best_cost = c;
            best_perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    best.row_to_col = best_perm;
    best.cost = best_cost;
    return best;
}

}  // namespace qvar
