#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qvar/errors.hpp"
#include "qvar/generators.hpp"
#include "qvar/integrand.hpp"
#include "qvar/json_io.hpp"
#include "qvar/qfield_ops.hpp"
#include "qvar/rng.hpp"

using namespace qvar;

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

}  // namespace

TEST_CASE("energy: f == 1 integrates to the domain volume") {
    FunctionIntegrand one(2, 1, 2,
                          [](const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>&,
                             const std::vector<Eigen::MatrixXd>&) { return 1.0; },
                          false, false);
    CounterRng rng(1);
    RandomFieldSpec spec;
    spec.m = 2;
    spec.n = 1;
    spec.q = 2;
    spec.cells_per_side = 3;
    spec.domain = CubeDomain::unit(2);
    QSheetField f = random_field(rng, spec);
    CHECK(energy(one, f) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("energy: Dirichlet of an affine Q[[Lx]] is Q|L|_F^2") {
    Eigen::MatrixXd L(2, 2);
    L << 1.0, -0.5, 0.25, 2.0;
    AffineQMap u(2, {{3, Eigen::VectorXd::Zero(2), L}});
    QSheetField f = QSheetField::sample_affine(u, CubeDomain::unit(2), 3);
    DirichletIntegrand dir(2, 2, 3);
    CHECK(energy(dir, f) == doctest::Approx(3.0 * L.squaredNorm()).epsilon(1e-13));
}

TEST_CASE("energy: Mattila energy of a grouped affine map is sum q_j <A L_j, L_j>") {
    CounterRng rng(12);
    QuadraticIntegrand A = random_quadratic_form(rng, 2, 2);
    Eigen::MatrixXd L1(2, 2), L2(2, 2);
    L1 << 0.5, 1.0, -1.0, 0.25;
    L2 << -0.75, 0.1, 0.6, 1.5;
    AffineQMap u(2, {{2, vec2(0, 0), L1}, {1, vec2(3, 3), L2}});
    QSheetField f = QSheetField::sample_affine(u, CubeDomain::unit(2), 2);
    double expect = 2.0 * A.apply(L1) + 1.0 * A.apply(L2);
    CHECK(mattila_energy(A, f) == doctest::Approx(expect).epsilon(1e-12));
    MattilaIntegrand wrapped(A, 3);
    CHECK(energy(wrapped, f) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("mattila_energy: identity form is the Dirichlet energy; zero field vanishes") {
    CounterRng rng(9);
    RandomFieldSpec spec;
    spec.m = 2;
    spec.n = 2;
    spec.q = 2;
    spec.cells_per_side = 2;
    spec.domain = CubeDomain::unit(2);
    QSheetField f = random_field(rng, spec);
    QuadraticIntegrand I = QuadraticIntegrand::identity(2, 2);
    DirichletIntegrand dir(2, 2, 2);
    CHECK(mattila_energy(I, f) == doctest::Approx(energy(dir, f)).epsilon(1e-12));

    AffineQMap zero(2, {{2, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2)}});
    QSheetField zf = QSheetField::sample_affine(zero, CubeDomain::unit(2), 2);
    CHECK(mattila_energy(I, zf) == doctest::Approx(0.0));
}

TEST_CASE("mattila_energy: determinant form on the identity map gives 2") {
    QuadraticIntegrand det2 = QuadraticIntegrand::determinant_form_2x2();
    Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(2, 2);
    CHECK(det2.apply(I2) == doctest::Approx(2.0));
    AffineQMap id_map(2, {{1, Eigen::VectorXd::Zero(2), I2}});
    QSheetField f = QSheetField::sample_affine(id_map, CubeDomain::unit(2), 3);
    CHECK(mattila_energy(det2, f) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("energy: affine-exact under mesh refinement and additive over subdomains") {
    CounterRng rng(33);
    QuadraticIntegrand A = random_quadratic_form(rng, 2, 2);
    MattilaIntegrand f(A, 3);
    AffineQMap u(2, {{2, vec2(0, 0), Eigen::MatrixXd::Identity(2, 2)},
                     {1, vec2(4, 4), 0.5 * Eigen::MatrixXd::Identity(2, 2)}});
    QSheetField coarse = QSheetField::sample_affine(u, CubeDomain::unit(2), 2);
    QSheetField fine = QSheetField::sample_affine(u, CubeDomain::unit(2), 4);
    CHECK(std::abs(energy(f, coarse) - energy(f, fine)) <= 1e-12);

    // additivity: energies over the four quarter cubes sum to the total
    double total = energy(f, coarse);
    double sum = 0.0;
    for (int ix = 0; ix < 2; ++ix)
        for (int iy = 0; iy < 2; ++iy) {
            Eigen::VectorXd c(2);
            c << -0.25 + 0.5 * ix, -0.25 + 0.5 * iy;
            QSheetField part = QSheetField::sample_affine(u, CubeDomain{c, 0.5}, 2);
            sum += energy(f, part);
        }
    CHECK(sum == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("check_perm_invariance: symmetric densities pass, a broken one fails") {
    QuadraticIntegrand A = QuadraticIntegrand::identity(2, 2);
    MattilaIntegrand mat(A, 3);
    CHECK(check_perm_invariance(mat, 50, 7));

    FunctionIntegrand broken(2, 2, 3,
                             [](const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>& a,
                                const std::vector<Eigen::MatrixXd>&) { return a[0][0]; });
    CHECK_FALSE(check_perm_invariance(broken, 50, 7));

    ConvexMatrixFn g;
    g.value = [](const Eigen::MatrixXd& M) { return M.squaredNorm(); };
    g.subgradient = [](const Eigen::MatrixXd& M) { return Eigen::MatrixXd(2.0 * M); };
    auto famb = polyconvex_family_b(2, 2, 3, std::move(g));
    CHECK(check_perm_invariance(*famb, 50, 7));
}

TEST_CASE("check_growth: Dirichlet bound holds, exponential escapes any polynomial bound") {
    DirichletIntegrand dir(2, 2, 2);
    CHECK(check_growth(dir, GrowthBound(1.0, 2.0, 2, 1.0), 400, 3));

    FunctionIntegrand expf(2, 2, 1,
                           [](const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>&,
                              const std::vector<Eigen::MatrixXd>& A) {
                               return std::exp(A[0].norm());
                           });
    CHECK_FALSE(check_growth(expf, GrowthBound(100.0, 4.0, 2, 8.0), 400, 3));
}

TEST_CASE("check_growth: Mattila bound with the largest eigenvalue constant") {
    CounterRng rng(91);
    QuadraticIntegrand A = random_quadratic_form(rng, 2, 2);
    // shift to PSD so the density is nonnegative, C = lambda_max
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.matrix());
    Eigen::MatrixXd psd =
        A.matrix() - std::min(0.0, es.eigenvalues()(0)) * Eigen::MatrixXd::Identity(4, 4);
    QuadraticIntegrand Apsd(2, 2, psd);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(Apsd.matrix());
    double lam_max = es2.eigenvalues()(3);
    MattilaIntegrand mat(Apsd, 2);
    CHECK(check_growth(mat, GrowthBound(lam_max, 2.0, 2, 1.0), 400, 5));
}

TEST_CASE("growth bound exponent rule") {
    CHECK(GrowthBound(1.0, 3.0, 2).q == doctest::Approx(0.0));           // p > m
    CHECK(GrowthBound(1.0, 1.0, 2).q == doctest::Approx(2.0));           // p* = mp/(m-p)
    CHECK(GrowthBound(1.0, 2.0, 3).q == doctest::Approx(6.0));           // p* = 6
    CHECK(GrowthBound(1.0, 2.0, 2, 5.0).q == doctest::Approx(5.0));      // p = m, user q
    CHECK_THROWS_AS(GrowthBound(1.0, 2.0, 2), InvalidInput);             // p = m needs q
}

TEST_CASE("polyconvex family (a): g(t)=t^2 with Q=1 is the Dirichlet energy") {
    ConvexScalarFn g;
    g.value = [](double t) { return t * t; };
    g.derivative = [](double t) { return 2.0 * t; };
    auto fa = polyconvex_family_a(2, 2, 1, std::move(g));
    DirichletIntegrand dir(2, 2, 1);
    CounterRng rng(2);
    for (int t = 0; t < 30; ++t) {
        Eigen::MatrixXd L(2, 2);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) L(r, c) = rng.normal();
        std::vector<Eigen::VectorXd> a = {Eigen::VectorXd::Zero(2)};
        std::vector<Eigen::MatrixXd> A = {L};
        CHECK(fa->eval(Eigen::VectorXd::Zero(2), a, A) ==
              doctest::Approx(dir.eval(Eigen::VectorXd::Zero(2), a, A)).epsilon(1e-13));
    }
}

TEST_CASE("polyconvex family (b): vanishing differences and the two-sheet formula") {
    ConvexMatrixFn g;
    g.value = [](const Eigen::MatrixXd& M) { return M.squaredNorm(); };
    g.subgradient = [](const Eigen::MatrixXd& M) { return Eigen::MatrixXd(2.0 * M); };
    auto fb = polyconvex_family_b(2, 2, 2, std::move(g));
    Eigen::MatrixXd L(2, 2);
    L << 1.0, 2.0, 3.0, 4.0;
    std::vector<Eigen::VectorXd> a = {Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)};
    CHECK(fb->eval(Eigen::VectorXd::Zero(2), a, {L, L}) == doctest::Approx(0.0));
    Eigen::MatrixXd M(2, 2);
    M << 0.5, -1.0, 0.25, 2.0;
    CHECK(fb->eval(Eigen::VectorXd::Zero(2), a, {L + M, L}) ==
          doctest::Approx(2.0 * M.squaredNorm()).epsilon(1e-13));
}

TEST_CASE("integrand json specs construct the advertised densities") {
    ojson dirichlet = {{"kind", "dirichlet"}};
    auto d = integrand_from_json(dirichlet, 2, 2, 2);
    CHECK(d->q() == 2);

    ojson quad;
    quad["kind"] = "quadratic";
    quad["matrix"] = matrix_to_json(Eigen::MatrixXd::Identity(4, 4));
    auto qd = integrand_from_json(quad, 2, 2, 1);
    std::vector<Eigen::VectorXd> a = {Eigen::VectorXd::Zero(2)};
    std::vector<Eigen::MatrixXd> A = {Eigen::MatrixXd::Identity(2, 2)};
    CHECK(qd->eval(Eigen::VectorXd::Zero(2), a, A) == doctest::Approx(2.0));

    ojson fam = {{"kind", "family_b"}, {"g", {{"kind", "frobenius_sq"}}}};
    CHECK(integrand_from_json(fam, 2, 2, 2)->q() == 2);

    ojson bad = {{"kind", "quadratic"}, {"matrix", matrix_to_json(Eigen::MatrixXd::Ones(2, 2))}};
    CHECK_THROWS_AS(integrand_from_json(bad, 2, 2, 1), ConfigError);
    ojson unknown = {{"kind", "nope"}};
    CHECK_THROWS_AS(integrand_from_json(unknown, 2, 2, 1), ConfigError);
}

TEST_CASE("energy rejects dimension mismatches") {
    DirichletIntegrand dir(2, 2, 2);
    AffineQMap u(2, {{1, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2)}});
    QSheetField f = QSheetField::sample_affine(u, CubeDomain::unit(2), 2);
    CHECK_THROWS_AS(energy(dir, f), InvalidInput);
}
