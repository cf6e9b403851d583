#include "qvar/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qvar/errors.hpp"

namespace qvar {

QPoint random_qpoint(CounterRng& rng, int n, int q, double scale) {
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(q);
    for (int i = 0; i < q; ++i) {
        Eigen::VectorXd p(n);
        for (int d = 0; d < n; ++d) p[d] = scale * rng.normal();
        pts.push_back(p);
    }
    return QPoint(n, std::move(pts));
}

AffineQMap random_affine_qmap(CounterRng& rng, int m, int n,
                              const std::vector<int>& multiplicities, double scale) {
    std::vector<AffineQMap::Group> groups;
    for (size_t j = 0; j < multiplicities.size(); ++j) {
        Eigen::VectorXd a(n);
        for (int d = 0; d < n; ++d) a[d] = scale * rng.normal();
        // keep centers separated
        a[0] += 4.0 * scale * static_cast<double>(j);
        Eigen::MatrixXd L(n, m);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < m; ++c) L(r, c) = scale * rng.normal();
        groups.push_back({multiplicities[j], a, L});
    }
    return AffineQMap(m, std::move(groups));
}

QuadraticIntegrand random_quadratic_form(CounterRng& rng, int n, int m, double scale) {
    const int d = n * m;
    Eigen::MatrixXd A(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) A(r, c) = scale * rng.normal();
    return QuadraticIntegrand(n, m, 0.5 * (A + A.transpose()));
}

QSheetField random_field(CounterRng& rng, const RandomFieldSpec& spec) {
    if (spec.domain.dim() != spec.m) throw InvalidInput("random_field: domain dimension mismatch");
    // continuous selections: affine + smooth bump (+ optional crossing pair)
    std::vector<std::function<Eigen::VectorXd(const Eigen::VectorXd&)>> sheets;
    const double side = spec.domain.side;
    for (int i = 0; i < spec.q; ++i) {
        Eigen::VectorXd a(spec.n);
        for (int d = 0; d < spec.n; ++d) a[d] = spec.scale * rng.normal();
        Eigen::MatrixXd L(spec.n, spec.m);
        for (int r = 0; r < spec.n; ++r)
            for (int c = 0; c < spec.m; ++c) L(r, c) = spec.scale * rng.normal();
        Eigen::VectorXd bump_dir(spec.n);
        for (int d = 0; d < spec.n; ++d) bump_dir[d] = spec.scale * rng.normal();
        Eigen::VectorXd center = spec.domain.center;
        const double amp = 0.5 * spec.scale * rng.uniform(-1.0, 1.0);
        sheets.push_back([=](const Eigen::VectorXd& x) {
            double env = 1.0;
            for (int d = 0; d < x.size(); ++d)
                env *= std::max(0.0, 1.0 - 2.0 * std::abs(x[d] - center[d]) / side);
            return Eigen::VectorXd(a + L * x + amp * env * bump_dir);
        });
    }
    if (spec.crossing_pair && spec.q >= 2) {
        // sheets 0/1 become base +- phi with phi vanishing on a hyperplane
        Eigen::VectorXd nrm(spec.m);
        for (int d = 0; d < spec.m; ++d) nrm[d] = rng.normal();
        if (nrm.norm() == 0) nrm = Eigen::VectorXd::Unit(spec.m, 0);
        nrm.normalize();
        Eigen::VectorXd dir(spec.n);
        for (int d = 0; d < spec.n; ++d) dir[d] = spec.scale * rng.normal();
        auto base = sheets[0];
        Eigen::VectorXd c0 = spec.domain.center;
        sheets[0] = [=](const Eigen::VectorXd& x) {
            return Eigen::VectorXd(base(x) + nrm.dot(x - c0) * dir);
        };
        sheets[1] = [=](const Eigen::VectorXd& x) {
            return Eigen::VectorXd(base(x) - nrm.dot(x - c0) * dir);
        };
    }
    QSheetField field =
        QSheetField::from_selections(spec.domain, spec.cells_per_side, spec.n, sheets);
    if (spec.noise > 0) {
        auto& values = field.mutable_vertex_values();
        for (long v = 0; v < field.mesh().num_vertices(); ++v)
            for (auto& e : values[v])
                for (int d = 0; d < spec.n; ++d) e[d] += spec.noise * rng.normal();
    }
    // relabel entries per vertex to exercise nontrivial matchings
    std::vector<std::vector<int>> perms(field.mesh().num_vertices());
    for (long v = 0; v < field.mesh().num_vertices(); ++v) {
        std::vector<int> p(spec.q);
        std::iota(p.begin(), p.end(), 0);
        for (int i = spec.q - 1; i > 0; --i) std::swap(p[i], p[rng.index(i + 1)]);
        perms[v] = p;
    }
    field.apply_vertex_permutations(perms);
    return field;
}

QSheetField random_pinned_competitor(CounterRng& rng, int mult, const Eigen::VectorXd& a,
                                     const Eigen::MatrixXd& L, int cells_per_side,
                                     double amplitude) {
    const int m = static_cast<int>(L.cols());
    const int n = static_cast<int>(L.rows());
    AffineQMap affine(m, {{mult, a, L}});
    QSheetField field = QSheetField::sample_affine(affine, CubeDomain::unit(m), cells_per_side);
    auto& values = field.mutable_vertex_values();
    for (long v = 0; v < field.mesh().num_vertices(); ++v) {
        if (field.is_boundary_vertex(v)) continue;
        for (auto& e : values[v])
            for (int d = 0; d < n; ++d) e[d] += amplitude * rng.normal();
    }
    return field;
}

Polynomial random_polynomial(CounterRng& rng, int vars, int max_degree, int terms,
                             double scale) {
    Polynomial p(vars);
    for (int t = 0; t < terms; ++t) {
        std::vector<int> e(vars, 0);
        int budget = static_cast<int>(rng.index(max_degree + 1));
        for (int b = 0; b < budget; ++b) e[rng.index(vars)] += 1;
        p.add_term(e, scale * rng.normal());
    }
    return p;
}

DifferentialForm random_form(CounterRng& rng, int m, int n, int degree, int coeff_degree,
                             int terms, double scale) {
    DifferentialForm form(m, n, degree);
    auto random_subset = [&rng](int bound, int size) {
        std::vector<int> all(bound);
        std::iota(all.begin(), all.end(), 0);
        for (int i = bound - 1; i > 0; --i) std::swap(all[i], all[rng.index(i + 1)]);
        std::vector<int> out(all.begin(), all.begin() + size);
        std::sort(out.begin(), out.end());
        return out;
    };
    int added = 0, guard = 0;
    while (added < terms && guard < 50 * terms + 50) {
        ++guard;
        int kx = static_cast<int>(rng.index(std::min(degree, m) + 1));
        int ky = degree - kx;
        if (ky > n) continue;
        auto xi = random_subset(m, kx);
        auto yi = random_subset(n, ky);
        form.add_term(xi, yi, random_polynomial(rng, m + n, coeff_degree, 3, scale));
        ++added;
    }
    if (added == 0)
        throw InvalidInput("random_form: could not build a form of the requested degree");
    return form;
}

PolyaffineFn random_polyaffine(CounterRng& rng, int m, int n, double scale) {
    PolyaffineFn P;
    P.m = m;
    P.n = n;
    P.c0 = scale * rng.normal();
    P.zeta.resize(tau(m, n));
    for (int i = 0; i < P.zeta.size(); ++i) P.zeta[i] = scale * rng.normal();
    return P;
}

}  // namespace qvar
