#include "qvar/qpoint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qvar/assignment.hpp"
#include "qvar/errors.hpp"

namespace qvar {

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (int i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return a.size() < b.size();
}

QPoint::QPoint(int ambient_dim, std::vector<Eigen::VectorXd> entries)
    : n_(ambient_dim), entries_(std::move(entries)) {
    if (n_ < 1) throw InvalidInput("QPoint: ambient dimension must be >= 1");
    if (entries_.empty()) throw InvalidInput("QPoint: Q must be >= 1");
    for (const auto& p : entries_)
        if (p.size() != n_) throw InvalidInput("QPoint: entry dimension mismatch");
    std::sort(entries_.begin(), entries_.end(), lex_less);
}

QPoint QPoint::repeated(int q, const Eigen::VectorXd& p) {
    if (q < 1) throw InvalidInput("QPoint: Q must be >= 1");
    return QPoint(static_cast<int>(p.size()), std::vector<Eigen::VectorXd>(q, p));
}

bool QPoint::operator==(const QPoint& other) const {
    if (n_ != other.n_ || q() != other.q()) return false;
    for (int i = 0; i < q(); ++i)
        if (entries_[i] != other.entries_[i]) return false;
    return true;
}

int SupportGrouping::total_multiplicity() const {
    int s = 0;
    for (const auto& g : groups) s += g.multiplicity;
    return s;
}

namespace {

Eigen::MatrixXd squared_cost_matrix(const QPoint& t1, const QPoint& t2) {
    if (t1.dim() != t2.dim()) throw InvalidInput("metric_g: ambient dimension mismatch");
    if (t1.q() != t2.q()) throw InvalidInput("metric_g: multiplicity mismatch");
    const int q = t1.q();
    Eigen::MatrixXd cost(q, q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) cost(i, j) = (t1.entry(i) - t2.entry(j)).squaredNorm();
    return cost;
}

}  // namespace

double metric_g(const QPoint& t1, const QPoint& t2) {
    auto res = solve_assignment(squared_cost_matrix(t1, t2));
    return std::sqrt(std::max(0.0, res.cost));
}

double metric_g_brute_force(const QPoint& t1, const QPoint& t2) {
    auto res = solve_assignment_brute_force(squared_cost_matrix(t1, t2));
    return std::sqrt(std::max(0.0, res.cost));
}

QPoint translate(const QPoint& t, const Eigen::VectorXd& v) {
    if (v.size() != t.dim()) throw InvalidInput("translate: dimension mismatch");
    std::vector<Eigen::VectorXd> shifted;
    shifted.reserve(t.q());
    for (const auto& p : t.entries()) shifted.push_back(p - v);
    return QPoint(t.dim(), std::move(shifted));
}

Eigen::VectorXd mean_eta(const QPoint& t) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(t.dim());
    for (const auto& p : t.entries()) s += p;
    return s / static_cast<double>(t.q());
}

SupportGrouping group_by_support(const QPoint& t, double tol) {
    if (tol < 0.0) throw InvalidInput("group_by_support: tolerance must be >= 0");
    const int q = t.q();
    // Union-find over entries; entries are already in canonical order, which
    // fixes the tie-breaking and the output ordering.
    std::vector<int> parent(q);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (int i = 0; i < q; ++i)
        for (int j = i + 1; j < q; ++j)
            if ((t.entry(i) - t.entry(j)).norm() <= tol) {
                int ri = find(i), rj = find(j);
                if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
            }

    SupportGrouping out;
    out.tolerance = tol;
    std::vector<int> root_order;  // roots in order of first appearance (lex order)
    for (int i = 0; i < q; ++i)
        if (find(i) == i) root_order.push_back(i);
    for (int r : root_order) {
        Eigen::VectorXd center = Eigen::VectorXd::Zero(t.dim());
        int mult = 0;
        for (int i = 0; i < q; ++i)
            if (find(i) == r) {
                center += t.entry(i);
                ++mult;
            }
        out.groups.push_back({mult, center / static_cast<double>(mult)});
    }
    return out;
}

}  // namespace qvar
