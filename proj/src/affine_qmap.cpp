#include "qvar/affine_qmap.hpp"

#include "qvar/errors.hpp"

namespace qvar {

AffineQMap::AffineQMap(int domain_dim, std::vector<Group> groups)
    : m_(domain_dim), groups_(std::move(groups)) {
    if (m_ < 1) throw InvalidInput("AffineQMap: domain dimension must be >= 1");
    if (groups_.empty()) throw InvalidInput("AffineQMap: at least one group required");
    n_ = static_cast<int>(groups_.front().center.size());
    for (const auto& g : groups_) {
        if (g.multiplicity < 1) throw InvalidInput("AffineQMap: multiplicities must be >= 1");
        if (g.center.size() != n_ || g.slope.rows() != n_ || g.slope.cols() != m_)
            throw InvalidInput("AffineQMap: group dimension mismatch");
    }
    for (size_t i = 0; i < groups_.size(); ++i)
        for (size_t j = i + 1; j < groups_.size(); ++j)
            if ((groups_[i].center - groups_[j].center).norm() == 0.0)
                throw InvalidInput("AffineQMap: group centers must be pairwise distinct");
}

int AffineQMap::total_q() const {
    int q = 0;
    for (const auto& g : groups_) q += g.multiplicity;
    return q;
}

QPoint AffineQMap::evaluate(const Eigen::VectorXd& x) const {
    if (x.size() != m_) throw InvalidInput("AffineQMap::evaluate: dimension mismatch");
    std::vector<Eigen::VectorXd> vals;
    vals.reserve(total_q());
    for (const auto& g : groups_) {
        Eigen::VectorXd v = g.center + g.slope * x;
        for (int c = 0; c < g.multiplicity; ++c) vals.push_back(v);
    }
    return QPoint(n_, std::move(vals));
}

std::vector<std::pair<Eigen::VectorXd, Eigen::MatrixXd>> AffineQMap::sheets() const {
    std::vector<std::pair<Eigen::VectorXd, Eigen::MatrixXd>> out;
    out.reserve(total_q());
    for (const auto& g : groups_)
        for (int c = 0; c < g.multiplicity; ++c) out.emplace_back(g.center, g.slope);
    return out;
}

}  // namespace qvar
