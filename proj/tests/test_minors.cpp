#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qvar/errors.hpp"
#include "qvar/generators.hpp"
#include "qvar/minors.hpp"
#include "qvar/rng.hpp"

using namespace qvar;

TEST_CASE("tau values") {
    CHECK(tau(2, 2) == 5);
    for (int n = 1; n <= 5; ++n) CHECK(tau(1, n) == n);
    CHECK(tau(2, 3) == 9);
    CHECK(tau(3, 2) == 9);  // symmetric
    CHECK(tau(3, 3) == 19);
}

TEST_CASE("enumeration has cardinality tau and round-trips") {
    for (int m = 1; m <= 4; ++m)
        for (int n = 1; n <= 4; ++n) {
            MinorBasis basis(m, n);
            CHECK(basis.size() == tau(m, n));
            for (long i = 0; i < basis.size(); ++i) {
                const auto& p = basis.pair(i);
                CHECK(basis.index_of(p.alpha, p.beta) == i);
                CHECK(p.sigma == sigma_interleave(p.alpha, m));
            }
        }
}

TEST_CASE("l=1 block of the minor vector lists column-major entries") {
    CounterRng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        int m = 1 + static_cast<int>(rng.index(3));
        int n = 1 + static_cast<int>(rng.index(3));
        Eigen::MatrixXd A(n, m);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < m; ++c) A(r, c) = rng.normal();
        Eigen::VectorXd M = all_minors(A);
        Eigen::Map<const Eigen::VectorXd> v(A.data(), n * m);
        CHECK((M.head(n * m) - v).norm() <= 1e-15);
    }
}

TEST_CASE("minor determinant examples") {
    MinorBasis basis(2, 2);
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    MultiIndexPair full{2, {0, 1}, {0, 1}, 1};
    CHECK(minor_det(I, full) == doctest::Approx(1.0));

    Eigen::MatrixXd A(2, 2);
    A << 1, 2, 3, 4;
    CHECK(minor_det(A, full) == doctest::Approx(-2.0));

    // 1x1 minors are the entries
    MultiIndexPair single{1, {1}, {0}, 1};
    CHECK(minor_det(A, single) == doctest::Approx(A(0, 1)));

    MultiIndexPair bad{1, {5}, {0}, 1};
    CHECK_THROWS_AS(minor_det(A, bad), IndexError);
}

TEST_CASE("all_minors canonical example and zero matrix") {
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd M = all_minors(I);
    REQUIRE(M.size() == 5);
    CHECK(M[0] == doctest::Approx(1.0));
    CHECK(M[1] == doctest::Approx(0.0));
    CHECK(M[2] == doctest::Approx(0.0));
    CHECK(M[3] == doctest::Approx(1.0));
    CHECK(M[4] == doctest::Approx(1.0));
    CHECK(all_minors(Eigen::MatrixXd::Zero(3, 2)).norm() == doctest::Approx(0.0));
}

TEST_CASE("top minor of a square matrix agrees with LU determinant") {
    CounterRng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        int d = 2 + static_cast<int>(rng.index(3));
        Eigen::MatrixXd A(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) A(r, c) = rng.normal();
        MinorBasis basis(d, d);
        Eigen::VectorXd M = all_minors(A, basis);
        double lu = A.determinant();
        CHECK(std::abs(M[M.size() - 1] - lu) <= 1e-10 * (1.0 + std::abs(lu)));
    }
}

TEST_CASE("polyaffine evaluation is linear in zeta and c0") {
    CounterRng rng(23);
    PolyaffineFn P1 = random_polyaffine(rng, 2, 2);
    PolyaffineFn P2 = random_polyaffine(rng, 2, 2);
    Eigen::MatrixXd A(2, 2);
    A << 0.3, -1.0, 2.0, 0.7;
    PolyaffineFn sum;
    sum.m = 2;
    sum.n = 2;
    sum.c0 = P1.c0 + 2.0 * P2.c0;
    sum.zeta = P1.zeta + 2.0 * P2.zeta;
    CHECK(sum.evaluate(A) == doctest::Approx(P1.evaluate(A) + 2.0 * P2.evaluate(A)).epsilon(1e-14));
}

namespace {

// Dirichlet as a polyconvex representative: g(a, X) = sum_i |first block X_i|^2
PolyconvexRep dirichlet_rep(int m, int n, int q) {
    PolyconvexRep rep;
    rep.m = m;
    rep.n = n;
    rep.q = q;
    const int fb = n * m;
    rep.value = [fb](const std::vector<Eigen::VectorXd>&, const std::vector<Eigen::VectorXd>& Ms) {
        double s = 0.0;
        for (const auto& Mv : Ms) s += Mv.head(fb).squaredNorm();
        return s;
    };
    rep.subgradient = [fb](const std::vector<Eigen::VectorXd>&,
                           const std::vector<Eigen::VectorXd>& Ms) {
        std::vector<Eigen::VectorXd> out;
        for (const auto& Mv : Ms) {
            Eigen::VectorXd z = Eigen::VectorXd::Zero(Mv.size());
            z.head(fb) = 2.0 * Mv.head(fb);
            out.push_back(z);
        }
        return out;
    };
    return rep;
}

// family (b) with g = |.|_F^2: f = sum_{i,j} |X_i - X_j|^2 on first blocks
PolyconvexRep family_b_rep(int m, int n, int q) {
    PolyconvexRep rep;
    rep.m = m;
    rep.n = n;
    rep.q = q;
    const int fb = n * m;
    rep.value = [fb, q](const std::vector<Eigen::VectorXd>&,
                        const std::vector<Eigen::VectorXd>& Ms) {
        double s = 0.0;
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) s += (Ms[i].head(fb) - Ms[j].head(fb)).squaredNorm();
        return s;
    };
    rep.subgradient = [fb, q](const std::vector<Eigen::VectorXd>&,
                              const std::vector<Eigen::VectorXd>& Ms) {
        std::vector<Eigen::VectorXd> out(q);
        for (int k = 0; k < q; ++k) {
            Eigen::VectorXd z = Eigen::VectorXd::Zero(Ms[k].size());
            for (int j = 0; j < q; ++j) z.head(fb) += 4.0 * (Ms[k].head(fb) - Ms[j].head(fb));
            out[k] = z;
        }
        return out;
    };
    return rep;
}

}  // namespace

TEST_CASE("polyaffine_support: tangency at the base point (smooth quadratic case)") {
    CounterRng rng(5);
    auto rep = dirichlet_rep(2, 2, 1);
    std::vector<Eigen::VectorXd> a = {Eigen::VectorXd::Zero(2)};
    Eigen::MatrixXd A(2, 2);
    A << 1.0, 0.5, -0.25, 2.0;
    auto Ps = polyaffine_support(rep, a, {A});
    REQUIRE(Ps.size() == 1);
    // equality at the base point, to machine precision
    CHECK(Ps[0].evaluate(A) == doctest::Approx(A.squaredNorm()).epsilon(1e-12));
    // support from below at random matrices
    for (int t = 0; t < 200; ++t) {
        Eigen::MatrixXd L(2, 2);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) L(r, c) = 3.0 * rng.normal();
        CHECK(Ps[0].evaluate(L) <= L.squaredNorm() + 1e-10);
    }
}

TEST_CASE("polyaffine_support: family (b) satisfies touch and support inequalities") {
    CounterRng rng(29);
    const int q = 3;
    auto rep = family_b_rep(2, 2, q);
    std::vector<Eigen::VectorXd> a;
    std::vector<Eigen::MatrixXd> A;
    for (int i = 0; i < q; ++i) {
        Eigen::VectorXd ai(2);
        ai << i, -i;
        a.push_back(ai);
        Eigen::MatrixXd Ai(2, 2);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) Ai(r, c) = rng.normal();
        A.push_back(Ai);
    }
    auto Ps = polyaffine_support(rep, a, A);
    REQUIRE(static_cast<int>(Ps.size()) == q);

    auto f_direct = [&](const std::vector<Eigen::MatrixXd>& Ls) {
        double s = 0.0;
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) s += (Ls[i] - Ls[j]).squaredNorm();
        return s;
    };
    double touch = 0.0;
    for (int i = 0; i < q; ++i) touch += Ps[i].evaluate(A[i]);
    CHECK(touch == doctest::Approx(f_direct(A)).epsilon(1e-10));

    // e:above at 10^4 random tuples
    for (int t = 0; t < 10000; ++t) {
        std::vector<Eigen::MatrixXd> Ls;
        double lhs = 0.0;
        for (int i = 0; i < q; ++i) {
            Eigen::MatrixXd L(2, 2);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) L(r, c) = 2.0 * rng.normal();
            Ls.push_back(L);
        }
        for (int i = 0; i < q; ++i) lhs += Ps[i].evaluate(Ls[i]);
        CHECK(lhs <= f_direct(Ls) + 1e-9);
    }
}

TEST_CASE("polyaffine_support: ties and precondition violations") {
    auto rep = dirichlet_rep(2, 1, 2);
    Eigen::VectorXd a0(1);
    a0 << 1.0;
    Eigen::MatrixXd A0(1, 2), A1(1, 2);
    A0 << 1.0, 2.0;
    A1 << 3.0, 4.0;
    // same value slot but different gradients: precondition violated
    CHECK_THROWS_AS(polyaffine_support(rep, {a0, a0}, {A0, A1}), InvalidInput);
    // tied slots are accepted and produce tied support functions
    auto Ps = polyaffine_support(rep, {a0, a0}, {A0, A0});
    CHECK((Ps[0].zeta - Ps[1].zeta).norm() == doctest::Approx(0.0));
}
