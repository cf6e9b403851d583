#include "qvar/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qvar/errors.hpp"

namespace qvar {

bool CubeDomain::contains(const Eigen::VectorXd& x, double eps) const {
    if (x.size() != dim()) return false;
    for (int d = 0; d < dim(); ++d)
        if (x[d] < lo(d) - eps || x[d] > hi(d) + eps) return false;
    return true;
}

double CubeDomain::volume() const { return std::pow(side, dim()); }

CubeDomain CubeDomain::unit(int m) { return CubeDomain{Eigen::VectorXd::Zero(m), 1.0}; }

int factorial(int n) {
    int f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

KuhnMesh::KuhnMesh(CubeDomain domain, int cells_per_side)
    : dom_(std::move(domain)), m_(dom_.dim()), k_(cells_per_side) {
    if (m_ < 1) throw InvalidInput("KuhnMesh: dimension must be >= 1");
    if (k_ < 1) throw InvalidInput("KuhnMesh: cells_per_side must be >= 1");
    if (!(dom_.side > 0.0)) throw InvalidInput("KuhnMesh: side must be positive");
    factorial_m_ = factorial(m_);
    std::vector<int> p(m_);
    std::iota(p.begin(), p.end(), 0);
    do {
        perms_.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
}

long KuhnMesh::num_vertices() const {
    long n = 1;
    for (int d = 0; d < m_; ++d) n *= (k_ + 1);
    return n;
}

long KuhnMesh::num_subcubes() const {
    long n = 1;
    for (int d = 0; d < m_; ++d) n *= k_;
    return n;
}

long KuhnMesh::num_cells() const { return num_subcubes() * factorial_m_; }

double KuhnMesh::cell_volume() const { return std::pow(h(), m_) / factorial_m_; }

long KuhnMesh::vertex_id(const std::vector<int>& mi) const {
    long id = 0;
    for (int d = m_ - 1; d >= 0; --d) id = id * (k_ + 1) + mi[d];
    return id;
}

std::vector<int> KuhnMesh::vertex_multi_index(long v) const {
    std::vector<int> mi(m_);
    for (int d = 0; d < m_; ++d) {
        mi[d] = static_cast<int>(v % (k_ + 1));
        v /= (k_ + 1);
    }
    return mi;
}

Eigen::VectorXd KuhnMesh::vertex_coord(long v) const {
    auto mi = vertex_multi_index(v);
    Eigen::VectorXd x(m_);
    for (int d = 0; d < m_; ++d) x[d] = dom_.lo(d) + h() * mi[d];
    return x;
}

long KuhnMesh::subcube_id(const std::vector<int>& mi) const {
    long id = 0;
    for (int d = m_ - 1; d >= 0; --d) id = id * k_ + mi[d];
    return id;
}

std::vector<int> KuhnMesh::subcube_multi_index(long s) const {
    std::vector<int> mi(m_);
    for (int d = 0; d < m_; ++d) {
        mi[d] = static_cast<int>(s % k_);
        s /= k_;
    }
    return mi;
}

std::vector<long> KuhnMesh::cell_vertices(long cell) const {
    auto base = subcube_multi_index(cell_subcube(cell));
    const auto& p = perms_[cell_perm_rank(cell)];
    std::vector<long> vs;
    vs.reserve(m_ + 1);
    std::vector<int> cur = base;
    vs.push_back(vertex_id(cur));
    for (int j = 0; j < m_; ++j) {
        cur[p[j]] += 1;
        vs.push_back(vertex_id(cur));
    }
    return vs;
}

void KuhnMesh::locate(const Eigen::VectorXd& x, long& cell, Eigen::VectorXd& lambda) const {
    if (x.size() != m_) throw InvalidInput("KuhnMesh::locate: dimension mismatch");
    if (!dom_.contains(x, 1e-12 * std::max(1.0, dom_.side)))
        throw DomainError("KuhnMesh::locate: point outside the domain cube");
    std::vector<int> sub(m_);
    Eigen::VectorXd frac(m_);
    for (int d = 0; d < m_; ++d) {
        double t = (x[d] - dom_.lo(d)) / h();
        int c = static_cast<int>(std::floor(t));
        c = std::clamp(c, 0, k_ - 1);
        sub[d] = c;
        frac[d] = std::clamp(t - c, 0.0, 1.0);
    }
    // descending fractional parts, ties by axis index: perm of the containing simplex
    std::vector<int> order(m_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return frac[a] > frac[b]; });
    int rank = 0;
    {
        // lexicographic rank of `order`
        std::vector<int> rem(m_);
        std::iota(rem.begin(), rem.end(), 0);
        for (int j = 0; j < m_; ++j) {
            auto it = std::find(rem.begin(), rem.end(), order[j]);
            int pos = static_cast<int>(it - rem.begin());
            rank += pos * factorial(m_ - 1 - j);
            rem.erase(it);
        }
    }
    cell = cell_id(subcube_id(sub), rank);
    lambda.resize(m_ + 1);
    lambda[0] = 1.0 - frac[order[0]];
    for (int j = 1; j < m_; ++j) lambda[j] = frac[order[j - 1]] - frac[order[j]];
    lambda[m_] = frac[order[m_ - 1]];
}

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw InvalidInput("gauss_legendre_01: need at least one point");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    // Newton iteration on P_n over [-1,1], then affine map to [0,1].
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        auto legendre = [n](double t, double& pn, double& pn1) {
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pn = p1;
            pn1 = p0;
        };
        double pn = 0.0, pn1 = 0.0;
        for (int it = 0; it < 100; ++it) {
            legendre(x, pn, pn1);
            double dpn = n * (x * pn - pn1) / (x * x - 1.0);
            double dx = pn / dpn;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        legendre(x, pn, pn1);
        double dpn = n * (x * pn - pn1) / (x * x - 1.0);
        nodes[i] = 0.5 * (x + 1.0);
        weights[i] = 1.0 / ((1.0 - x * x) * dpn * dpn);
    }
    // canonical ascending order
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return nodes[a] < nodes[b]; });
    std::vector<double> sn(n), sw(n);
    for (int i = 0; i < n; ++i) {
        sn[i] = nodes[idx[i]];
        sw[i] = weights[idx[i]];
    }
    nodes = sn;
    weights = sw;
}

KuhnMesh::QuadRule KuhnMesh::cell_quadrature(long cell, int points_per_axis) const {
    std::vector<double> gn, gw;
    gauss_legendre_01(points_per_axis, gn, gw);

    auto base = subcube_multi_index(cell_subcube(cell));
    const auto& p = perms_[cell_perm_rank(cell)];
    Eigen::VectorXd corner(m_);
    for (int d = 0; d < m_; ++d) corner[d] = dom_.lo(d) + h() * base[d];

    QuadRule rule;
    const int q = points_per_axis;
    long total = 1;
    for (int d = 0; d < m_; ++d) total *= q;
    rule.points.reserve(total);
    rule.weights.reserve(total);
    rule.lambdas.reserve(total);

    // Duffy substitution onto {1 >= s_1 >= ... >= s_m >= 0}: s_j = u_1 ... u_j,
    // Jacobian = prod_j u_j^{m-j}.
    std::vector<int> mi(m_, 0);
    for (long t = 0; t < total; ++t) {
        double jac = 1.0;
        Eigen::VectorXd s(m_);
        double prod = 1.0;
        for (int j = 0; j < m_; ++j) {
            double u = gn[mi[j]];
            prod *= u;
            s[j] = prod;
            jac *= std::pow(u, m_ - 1 - j);
        }
        Eigen::VectorXd x = corner;
        double w = jac * std::pow(h(), m_);
        for (int j = 0; j < m_; ++j) {
            x[p[j]] += h() * s[j];
            w *= gw[mi[j]];
        }
        rule.points.push_back(x);
        rule.weights.push_back(w);
        Eigen::VectorXd lambda(m_ + 1);
        lambda[0] = 1.0 - s[0];
        for (int j = 1; j < m_; ++j) lambda[j] = s[j - 1] - s[j];
        lambda[m_] = s[m_ - 1];
        rule.lambdas.push_back(lambda);
        for (int d = 0; d < m_; ++d) {
            if (++mi[d] < q) break;
            mi[d] = 0;
        }
    }
    return rule;
}

}  // namespace qvar
