#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "qvar/currents.hpp"
#include "qvar/errors.hpp"
#include "qvar/generators.hpp"
#include "qvar/json_io.hpp"
#include "qvar/qfield_ops.hpp"
#include "qvar/rng.hpp"

using namespace qvar;

namespace {

Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}

// Independent oracle for the graph pairing: expand the tangent m-vector
// (e_1 + d_1 u) ^ ... ^ (e_m + d_m u) in the full exterior algebra of
// R^{m+n} and pair it with the form term by term. No minors, no sigma.
double pair_graph_oracle(const QSheetField& u, const DifferentialForm& omega,
                         int points_per_axis) {
    const int m = u.m(), n = u.n();
    REQUIRE(omega.degree() == m);
    const auto& mesh = u.mesh();
    double acc = 0.0;
    for (long c = 0; c < mesh.num_cells(); ++c) {
        auto grads = u.differential(c);
        auto rule = mesh.cell_quadrature(c, points_per_axis);
        for (size_t node = 0; node < rule.points.size(); ++node) {
            auto vals = u.piece_values_at(c, rule.lambdas[node]);
            for (int i = 0; i < u.q(); ++i) {
                // expand the m-vector: keys are sorted index sets in {0..m+n-1}
                std::map<std::vector<int>, double> terms = {{{}, 1.0}};
                for (int a = 0; a < m; ++a) {
                    std::map<std::vector<int>, double> next;
                    for (const auto& [S, coeff] : terms) {
                        auto wedge_in = [&](int b, double factor) {
                            if (std::find(S.begin(), S.end(), b) != S.end()) return;
                            int greater = 0;
                            for (int s : S)
                                if (s > b) ++greater;
                            auto ns = S;
                            ns.push_back(b);
                            std::sort(ns.begin(), ns.end());
                            double sign = (greater % 2 == 0) ? 1.0 : -1.0;
                            next[ns] += sign * factor * coeff;
                        };
                        wedge_in(a, 1.0);
                        for (int r = 0; r < n; ++r) wedge_in(m + r, grads[i](r, a));
                    }
                    terms = std::move(next);
                }
                Eigen::VectorXd xy(m + n);
                xy.head(m) = rule.points[node];
                xy.tail(n) = vals[i];
                for (const auto& t : omega.terms()) {
                    std::vector<int> key = t.x_idx;
                    for (int yb : t.y_idx) key.push_back(m + yb);
                    auto it = terms.find(key);
                    if (it == terms.end()) continue;
                    acc += rule.weights[node] * t.coeff.evaluate(xy) * it->second;
                }
            }
        }
    }
    return acc;
}

}  // namespace

TEST_CASE("pair_graph agrees with the exterior-algebra oracle on random fields and forms") {
    CounterRng rng(515);
    for (int trial = 0; trial < 24; ++trial) {
        int m = 1 + static_cast<int>(rng.index(3));
        int n = 1 + static_cast<int>(rng.index(2));
        int q = 1 + static_cast<int>(rng.index(2));
        RandomFieldSpec spec;
        spec.m = m;
        spec.n = n;
        spec.q = q;
        spec.cells_per_side = 2;
        spec.crossing_pair = (q >= 2 && trial % 3 == 0);
        spec.domain = CubeDomain::unit(m);
        QSheetField f = random_field(rng, spec);
        DifferentialForm omega = random_form(rng, m, n, m, 2, 4);
        int pts = 4;
        double fast = pair_graph(f, omega, pts);
        double slow = pair_graph_oracle(f, omega, pts);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
    }
}

TEST_CASE("pair_graph: volume form gives Q times the domain volume") {
    CounterRng rng(3);
    RandomFieldSpec spec;
    spec.m = 2;
    spec.n = 1;
    spec.q = 3;
    spec.cells_per_side = 2;
    spec.domain = CubeDomain::unit(2);
    QSheetField f = random_field(rng, spec);
    DifferentialForm vol(2, 1, 2);
    vol.add_term({0, 1}, {}, Polynomial::constant(3, 1.0));
    CHECK(pair_graph(f, vol) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("pair_graph: dy-components die on constant fields") {
    AffineQMap constant(2, {{2, vec1(0.7), Eigen::MatrixXd::Zero(1, 2)}});
    QSheetField f = QSheetField::sample_affine(constant, CubeDomain::unit(2), 2);
    DifferentialForm omega(2, 1, 2);
    omega.add_term({0}, {0}, Polynomial::constant(3, 2.5));  // dx1 ^ dy
    omega.add_term({1}, {0}, Polynomial::constant(3, -1.0));
    CHECK(pair_graph(f, omega) == doctest::Approx(0.0));
}

TEST_CASE("pair_graph: odd integrand vanishes for u(x)=x with omega = y dx") {
    AffineQMap u(1, {{1, vec1(0.0), Eigen::MatrixXd::Identity(1, 1)}});
    QSheetField f = QSheetField::sample_affine(u, CubeDomain::unit(1), 4);
    DifferentialForm omega(1, 1, 1);
    omega.add_term({0}, {}, Polynomial::monomial(2, {0, 1}, 1.0));  // y dx
    CHECK(pair_graph(f, omega) == doctest::Approx(0.0).epsilon(1e-14));
    DifferentialForm bad(1, 1, 0);
    CHECK_THROWS_AS(pair_graph(f, bad), InvalidForm);
}

TEST_CASE("pair_boundary: m=1 telescopes to endpoint differences") {
    // u(x) = {x, -x}: 0-form c(x,y) = y^2 + x
    std::vector<std::function<Eigen::VectorXd(const Eigen::VectorXd&)>> sheets = {
        [](const Eigen::VectorXd& x) { return vec1(x[0]); },
        [](const Eigen::VectorXd& x) { return vec1(-x[0]); }};
    QSheetField f = QSheetField::from_selections(CubeDomain::unit(1), 4, 1, sheets);
    DifferentialForm omega(1, 1, 0);
    omega.add_term({}, {}, Polynomial::monomial(2, {0, 2}, 1.0).plus(
                               Polynomial::monomial(2, {1, 0}, 1.0)));
    // at +1/2: sheets {1/2, -1/2}: sum y^2 + x = (0.25+0.5)+(0.25+0.5) = 1.5
    // at -1/2: (0.25-0.5)*2 = -0.5 ; pairing = 1.5 - (-0.5) = 2
    CHECK(pair_boundary(f, omega) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("pair_boundary: Green orientation pin, area via x1 dx2 on the unit square") {
    AffineQMap zero(2, {{1, vec1(0.0), Eigen::MatrixXd::Zero(1, 2)}});
    QSheetField f = QSheetField::sample_affine(zero, CubeDomain::unit(2), 2);
    DifferentialForm omega(2, 1, 1);
    omega.add_term({1}, {}, Polynomial::monomial(3, {1, 0, 0}, 1.0));  // x1 dx2
    CHECK(pair_boundary(f, omega) == doctest::Approx(1.0).epsilon(1e-13));
    // degree mismatch rejected
    DifferentialForm wrong(2, 1, 2);
    wrong.add_term({0, 1}, {}, Polynomial::constant(3, 1.0));
    CHECK_THROWS_AS(pair_boundary(f, wrong), InvalidForm);
    // omega = 0
    DifferentialForm zero_form(2, 1, 1);
    CHECK(pair_boundary(f, zero_form) == doctest::Approx(0.0));
}

TEST_CASE("exterior_derivative: constants, single Leibniz term, and d o d = 0") {
    // d(y1 dx2) in m=2, n=1: only the dy1 ^ dx2 = -dx2 ^ dy1 term survives
    DifferentialForm omega(2, 1, 1);
    omega.add_term({1}, {}, Polynomial::monomial(3, {0, 0, 1}, 1.0));  // y1 dx2
    DifferentialForm d = exterior_derivative(omega);
    REQUIRE(d.terms().size() == 1);
    CHECK(d.terms()[0].x_idx == std::vector<int>{1});
    CHECK(d.terms()[0].y_idx == std::vector<int>{0});
    // dy ^ dx2 = -dx2 ^ dy
    CHECK(d.terms()[0].coeff.evaluate(Eigen::VectorXd::Zero(3)) == doctest::Approx(-1.0));

    // d of a constant-coefficient form vanishes
    DifferentialForm c(2, 2, 1);
    c.add_term({0}, {}, Polynomial::constant(4, 3.0));
    CHECK(exterior_derivative(c).terms().empty());

    // d o d = 0 on random polynomial forms
    CounterRng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        int m = 1 + static_cast<int>(rng.index(3));
        int n = 1 + static_cast<int>(rng.index(2));
        int deg = static_cast<int>(rng.index(std::min(m + n - 1, m + 1)));
        DifferentialForm w = random_form(rng, m, n, deg, 3, 4);
        DifferentialForm dd = exterior_derivative(exterior_derivative(w));
        for (const auto& t : dd.terms())
            for (const auto& [e, coeff] : t.coeff.terms()) CHECK(coeff == 0.0);
    }
}

TEST_CASE("stokes_residual vanishes for piecewise-affine fields and polynomial forms") {
    CounterRng rng(31337);
    for (int trial = 0; trial < 10; ++trial) {
        int m = 2 + static_cast<int>(rng.index(2));
        int n = 1 + static_cast<int>(rng.index(2));
        int q = 1 + static_cast<int>(rng.index(3));
        RandomFieldSpec spec;
        spec.m = m;
        spec.n = n;
        spec.q = q;
        spec.cells_per_side = 2;
        spec.crossing_pair = (q >= 2);
        spec.domain = CubeDomain::unit(m);
        QSheetField f = random_field(rng, spec);
        DifferentialForm omega = random_form(rng, m, n, m - 1, 3, 4);
        CHECK(std::abs(stokes_residual(f, omega)) <= 1e-10);
    }
    // omega = 0 trivially
    AffineQMap u(2, {{1, vec1(0.0), Eigen::MatrixXd::Zero(1, 2)}});
    QSheetField f = QSheetField::sample_affine(u, CubeDomain::unit(2), 2);
    DifferentialForm zero_form(2, 1, 1);
    CHECK(stokes_residual(f, zero_form) == doctest::Approx(0.0));
}

TEST_CASE("stokes_residual stays at quadrature precision under mesh refinement") {
    CounterRng rng(999);
    RandomFieldSpec spec;
    spec.m = 2;
    spec.n = 1;
    spec.q = 1;
    spec.domain = CubeDomain::unit(2);
    DifferentialForm omega = random_form(rng, 2, 1, 1, 2, 3);
    for (int k : {2, 4}) {
        spec.cells_per_side = k;
        CounterRng r2(5);
        QSheetField f = random_field(r2, spec);
        CHECK(std::abs(stokes_residual(f, omega)) <= 1e-10);
    }
}

TEST_CASE("pairing is linear in the form and additive over subdomains") {
    CounterRng rng(11);
    RandomFieldSpec spec;
    spec.m = 2;
    spec.n = 1;
    spec.q = 2;
    spec.cells_per_side = 2;
    spec.domain = CubeDomain::unit(2);
    QSheetField f = random_field(rng, spec);
    DifferentialForm w1 = random_form(rng, 2, 1, 2, 2, 3);
    DifferentialForm w2 = random_form(rng, 2, 1, 2, 2, 3);
    double lhs = pair_graph(f, w1.scaled(2.5).plus(w2));
    double rhs = 2.5 * pair_graph(f, w1) + pair_graph(f, w2);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

    // additivity over a decomposition into quarter cubes (affine field)
    Eigen::MatrixXd L(1, 2);
    L << 0.7, -0.3;
    AffineQMap u(2, {{2, vec1(0.2), L}});
    QSheetField whole = QSheetField::sample_affine(u, CubeDomain::unit(2), 2);
    double total = pair_graph(whole, w1);
    double sum = 0.0;
    for (int ix = 0; ix < 2; ++ix)
        for (int iy = 0; iy < 2; ++iy) {
            Eigen::VectorXd c(2);
            c << -0.25 + 0.5 * ix, -0.25 + 0.5 * iy;
            sum += pair_graph(QSheetField::sample_affine(u, CubeDomain{c, 0.5}, 2), w1);
        }
    CHECK(sum == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("null_lagrangian_gap: identical fields and pure-volume maps give zero") {
    CounterRng rng(8);
    RandomFieldSpec spec;
    spec.m = 2;
    spec.n = 2;
    spec.q = 2;
    spec.cells_per_side = 3;
    spec.domain = CubeDomain::unit(2);
    QSheetField w = random_field(rng, spec);
    PolyaffineFn P = random_polyaffine(rng, 2, 2);
    CHECK(null_lagrangian_gap(P, w, w) == doctest::Approx(0.0));

    // c0-only polyaffine map integrates to Q c0 vol on both sides
    PolyaffineFn c0_only;
    c0_only.m = 2;
    c0_only.n = 2;
    c0_only.c0 = 3.7;
    c0_only.zeta = Eigen::VectorXd::Zero(tau(2, 2));
    QSheetField w2 = w;
    {
        auto& vals = w2.mutable_vertex_values();
        for (long v = 0; v < w2.mesh().num_vertices(); ++v) {
            if (w2.is_boundary_vertex(v)) continue;
            for (auto& e : vals[v]) e[0] += 0.3;
        }
    }
    CHECK(std::abs(null_lagrangian_gap(c0_only, w, w2)) <= 1e-12);
}

TEST_CASE("null_lagrangian_gap: determinant component against an interior bump") {
    // P = det block of the minor vector; w1 = identity map, w2 = identity + bump
    PolyaffineFn P;
    P.m = 2;
    P.n = 2;
    P.c0 = 0.0;
    P.zeta = Eigen::VectorXd::Zero(tau(2, 2));
    MinorBasis basis(2, 2);
    P.zeta[basis.index_of({0, 1}, {0, 1})] = 1.0;

    AffineQMap id_map(2, {{1, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)}});
    QSheetField w1 = QSheetField::sample_affine(id_map, CubeDomain::unit(2), 4);
    QSheetField w2 = w1;
    CounterRng rng(21);
    auto& vals = w2.mutable_vertex_values();
    for (long v = 0; v < w2.mesh().num_vertices(); ++v) {
        if (w2.is_boundary_vertex(v)) continue;
        for (auto& e : vals[v]) {
            e[0] += 0.2 * rng.normal();
            e[1] += 0.2 * rng.normal();
        }
    }
    CHECK(std::abs(null_lagrangian_gap(P, w1, w2)) <= 1e-10);

    // mismatched boundary traces are rejected
    QSheetField w3 = w1;
    auto& vals3 = w3.mutable_vertex_values();
    for (long v = 0; v < w3.mesh().num_vertices(); ++v)
        for (auto& e : vals3[v]) e[0] += 1.0;
    CHECK_THROWS_AS(null_lagrangian_gap(P, w1, w3), InvalidCompetitor);
}

TEST_CASE("form json round-trip") {
    CounterRng rng(4242);
    DifferentialForm omega = random_form(rng, 2, 2, 2, 3, 5);
    ojson j = form_to_json(omega);
    DifferentialForm back = form_from_json(j);
    CHECK(form_to_json(back) == j);
    RandomFieldSpec spec;
    spec.m = 2;
    spec.n = 2;
    spec.q = 1;
    spec.cells_per_side = 2;
    spec.domain = CubeDomain::unit(2);
    QSheetField f = random_field(rng, spec);
    CHECK(pair_graph(f, back) == doctest::Approx(pair_graph(f, omega)).epsilon(1e-13));
}
