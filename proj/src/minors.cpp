#include "qvar/minors.hpp"

#include <algorithm>

#include "qvar/errors.hpp"

namespace qvar {

long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

long tau(int m, int n) {
    if (m < 1 || n < 1) throw InvalidInput("tau: dimensions must be >= 1");
    const int N = std::min(m, n);
    long s = 0;
    for (int k = 1; k <= N; ++k) s += binomial(m, k) * binomial(n, k);
    return s;
}

int sigma_interleave(const std::vector<int>& alpha, int m) {
    // parity of #{(a,b): a in alpha, b outside alpha, b > a}
    std::vector<char> in(m, 0);
    for (int a : alpha) in[a] = 1;
    long inv = 0;
    for (int a : alpha)
        for (int b = a + 1; b < m; ++b)
            if (!in[b]) ++inv;
    return (inv % 2 == 0) ? 1 : -1;
}

namespace {

// increasing k-subsets of {0..n-1}, lexicographic
std::vector<std::vector<int>> combinations(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> c(k);
    for (int i = 0; i < k; ++i) c[i] = i;
    while (true) {
        out.push_back(c);
        int i = k - 1;
        while (i >= 0 && c[i] == n - k + i) --i;
        if (i < 0) break;
        ++c[i];
        for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
    }
    return out;
}

}  // namespace

MinorBasis::MinorBasis(int m, int n) : m_(m), n_(n) {
    if (m < 1 || n < 1) throw InvalidInput("MinorBasis: dimensions must be >= 1");
    const int N = std::min(m, n);
    for (int l = 1; l <= N; ++l) {
        auto alphas = combinations(m, l);
        auto betas = combinations(n, l);
        for (const auto& a : alphas)
            for (const auto& b : betas)
                pairs_.push_back({l, a, b, sigma_interleave(a, m)});
    }
}

long MinorBasis::index_of(const std::vector<int>& alpha, const std::vector<int>& beta) const {
    for (long i = 0; i < size(); ++i)
        if (pairs_[i].alpha == alpha && pairs_[i].beta == beta) return i;
    throw IndexError("MinorBasis: pair not found");
}

double minor_det(const Eigen::MatrixXd& A, const MultiIndexPair& idx) {
    const int l = idx.l;
    if (l == 0) return 1.0;
    for (int a : idx.alpha)
        if (a < 0 || a >= A.cols()) throw IndexError("minor_det: column index out of range");
    for (int b : idx.beta)
        if (b < 0 || b >= A.rows()) throw IndexError("minor_det: row index out of range");
    if (l == 1) return A(idx.beta[0], idx.alpha[0]);
    Eigen::MatrixXd sub(l, l);
    for (int r = 0; r < l; ++r)
        for (int c = 0; c < l; ++c) sub(r, c) = A(idx.beta[r], idx.alpha[c]);
    if (l == 2) return sub(0, 0) * sub(1, 1) - sub(0, 1) * sub(1, 0);
    if (l == 3)
        return sub(0, 0) * (sub(1, 1) * sub(2, 2) - sub(1, 2) * sub(2, 1)) -
               sub(0, 1) * (sub(1, 0) * sub(2, 2) - sub(1, 2) * sub(2, 0)) +
               sub(0, 2) * (sub(1, 0) * sub(2, 1) - sub(1, 1) * sub(2, 0));
    return sub.determinant();
}

Eigen::VectorXd all_minors(const Eigen::MatrixXd& A, const MinorBasis& basis) {
    if (A.cols() != basis.m() || A.rows() != basis.n())
        throw InvalidInput("all_minors: matrix shape does not match basis");
    Eigen::VectorXd out(basis.size());
    for (long i = 0; i < basis.size(); ++i) out[i] = minor_det(A, basis.pair(i));
    return out;
}

Eigen::VectorXd all_minors(const Eigen::MatrixXd& A) {
    MinorBasis basis(static_cast<int>(A.cols()), static_cast<int>(A.rows()));
    return all_minors(A, basis);
}

double PolyaffineFn::evaluate(const Eigen::MatrixXd& A) const {
    if (A.cols() != m || A.rows() != n) throw InvalidInput("PolyaffineFn: matrix shape mismatch");
    return c0 + zeta.dot(all_minors(A));
}

std::vector<PolyaffineFn> polyaffine_support(const PolyconvexRep& rep,
                                             const std::vector<Eigen::VectorXd>& a,
                                             const std::vector<Eigen::MatrixXd>& grads) {
    const int q = rep.q;
    if (static_cast<int>(a.size()) != q || static_cast<int>(grads.size()) != q)
        throw InvalidInput("polyaffine_support: tuple size mismatch");
    for (int i = 0; i < q; ++i)
        for (int j = i + 1; j < q; ++j)
            if (a[i] == a[j] && grads[i] != grads[j])
                throw InvalidInput("polyaffine_support: A_i must equal A_j when a_i = a_j");

    MinorBasis basis(rep.m, rep.n);
    std::vector<Eigen::VectorXd> Ms(q);
    for (int i = 0; i < q; ++i) Ms[i] = all_minors(grads[i], basis);

    const double g0 = rep.value(a, Ms);
    auto zetas = rep.subgradient(a, Ms);
    if (static_cast<int>(zetas.size()) != q)
        throw InvalidInput("polyaffine_support: oracle returned wrong number of subgradients");
    for (int i = 0; i < q; ++i)
        for (int j = i + 1; j < q; ++j)
            if (a[i] == a[j] && (zetas[i] - zetas[j]).norm() > 0)
                throw InvalidInput("polyaffine_support: oracle must tie zeta_i = zeta_j when a_i = a_j");

    std::vector<PolyaffineFn> out(q);
    for (int j = 0; j < q; ++j) {
        out[j].m = rep.m;
        out[j].n = rep.n;
        out[j].zeta = zetas[j];
        out[j].c0 = g0 / q - zetas[j].dot(Ms[j]);
    }
    return out;
}

}  // namespace qvar
