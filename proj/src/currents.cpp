#include "qvar/currents.hpp"

#include <algorithm>
#include <cmath>

#include "qvar/errors.hpp"

namespace qvar {

namespace {

int default_points(const DifferentialForm& omega, int m) {
    // coefficient degree D composed with affine sheets stays degree D in x;
    // the Duffy substitution adds at most m-1 per axis
    int d = omega.max_coefficient_degree();
    return std::max(2, (d + m) / 2 + 1);
}

std::vector<int> complement(const std::vector<int>& idx, int m) {
    std::vector<int> out;
    out.reserve(m - idx.size());
    size_t t = 0;
    for (int a = 0; a < m; ++a) {
        if (t < idx.size() && idx[t] == a) {
            ++t;
        } else {
            out.push_back(a);
        }
    }
    return out;
}

}  // namespace

double pair_graph(const QSheetField& u, const DifferentialForm& omega, int points_per_axis) {
    const int m = u.m(), n = u.n();
    if (omega.m() != m || omega.n() != n)
        throw InvalidForm("pair_graph: form ambient dimensions mismatch");
    if (omega.degree() != m) throw InvalidForm("pair_graph: form degree must equal m");
    const int pts = points_per_axis > 0 ? points_per_axis : default_points(omega, m);

    // precompute (alpha, sigma) per term
    struct TermData {
        std::vector<int> alpha;
        int sigma;
        const DifferentialForm::Term* term;
    };
    std::vector<TermData> tds;
    for (const auto& t : omega.terms()) {
        TermData td;
        td.alpha = complement(t.x_idx, m);
        td.sigma = sigma_interleave(td.alpha, m);
        td.term = &t;
        tds.push_back(td);
    }

    const auto& mesh = u.mesh();
    double acc = 0.0;
    Eigen::VectorXd xy(m + n);
    for (long c = 0; c < mesh.num_cells(); ++c) {
        auto grads = u.differential(c);
        // minors per piece and term are constant on the cell
        std::vector<std::vector<double>> minors(u.q(), std::vector<double>(tds.size()));
        for (int i = 0; i < u.q(); ++i)
            for (size_t t = 0; t < tds.size(); ++t) {
                MultiIndexPair idx{static_cast<int>(tds[t].alpha.size()), tds[t].alpha,
                                   tds[t].term->y_idx, tds[t].sigma};
                minors[i][t] = idx.l == 0 ? 1.0 : minor_det(grads[i], idx);
            }
        auto rule = mesh.cell_quadrature(c, pts);
        for (size_t node = 0; node < rule.points.size(); ++node) {
            auto vals = u.piece_values_at(c, rule.lambdas[node]);
            xy.head(m) = rule.points[node];
            for (int i = 0; i < u.q(); ++i) {
                xy.tail(n) = vals[i];
                double contrib = 0.0;
                for (size_t t = 0; t < tds.size(); ++t)
                    contrib += tds[t].sigma * tds[t].term->coeff.evaluate(xy) * minors[i][t];
                acc += rule.weights[node] * contrib;
            }
        }
    }
    return acc;
}

namespace {

// pullback to the face {x_axis = value}: drop terms containing the axis,
// substitute into the coefficients, re-index the remaining x variables
DifferentialForm pullback_to_face(const DifferentialForm& omega, int axis, double value) {
    DifferentialForm out(omega.m() - 1, omega.n(), omega.degree());
    for (const auto& t : omega.terms()) {
        if (std::find(t.x_idx.begin(), t.x_idx.end(), axis) != t.x_idx.end()) continue;
        std::vector<int> nx;
        nx.reserve(t.x_idx.size());
        for (int e : t.x_idx) nx.push_back(e < axis ? e : e - 1);
        out.add_term(nx, t.y_idx, t.coeff.substitute_and_remove(axis, value));
    }
    return out;
}

}  // namespace

double pair_boundary(const QSheetField& u, const DifferentialForm& omega, int points_per_axis) {
    const int m = u.m(), n = u.n();
    if (omega.m() != m || omega.n() != n)
        throw InvalidForm("pair_boundary: form ambient dimensions mismatch");
    if (omega.degree() != m - 1)
        throw InvalidForm("pair_boundary: form degree must equal m-1");

    double acc = 0.0;
    if (m == 1) {
        // 0-form paired with the endpoint Q-points, right minus left
        for (int side = 0; side <= 1; ++side) {
            double xv = side == 0 ? u.domain().lo(0) : u.domain().hi(0);
            Eigen::VectorXd x(1);
            x[0] = xv;
            QPoint val = u.evaluate(x);
            double sign = side == 0 ? -1.0 : 1.0;
            Eigen::VectorXd xy(1 + n);
            xy[0] = xv;
            for (int i = 0; i < val.q(); ++i) {
                xy.tail(n) = val.entry(i);
                for (const auto& t : omega.terms()) acc += sign * t.coeff.evaluate(xy);
            }
        }
        return acc;
    }

    for (int axis = 0; axis < m; ++axis)
        for (int side = 0; side <= 1; ++side) {
            double xv = side == 0 ? u.domain().lo(axis) : u.domain().hi(axis);
            // outward-normal induced orientation of the face frame
            // (e_1, .., e_axis dropped, ..): sign = +-(-1)^axis
            double sign = (side == 1 ? 1.0 : -1.0) * ((axis % 2 == 0) ? 1.0 : -1.0);
            QSheetField face = u.restrict_to_face(axis, side);
            DifferentialForm pulled = pullback_to_face(omega, axis, xv);
            acc += sign * pair_graph(face, pulled, points_per_axis);
        }
    return acc;
}

double stokes_residual(const QSheetField& u, const DifferentialForm& omega,
                       int points_per_axis) {
    return pair_graph(u, exterior_derivative(omega), points_per_axis) -
           pair_boundary(u, omega, points_per_axis);
}

double polyaffine_energy(const PolyaffineFn& P, const QSheetField& u) {
    if (P.m != u.m() || P.n != u.n())
        throw InvalidInput("polyaffine_energy: dimension mismatch");
    MinorBasis basis(P.m, P.n);
    const auto& mesh = u.mesh();
    const double vol = mesh.cell_volume();
    double acc = 0.0;
    for (long c = 0; c < mesh.num_cells(); ++c) {
        auto grads = u.differential(c);
        double cell = 0.0;
        for (const auto& L : grads) cell += P.c0 + P.zeta.dot(all_minors(L, basis));
        acc += vol * cell;
    }
    return acc;
}

double null_lagrangian_gap(const PolyaffineFn& P, const QSheetField& w1, const QSheetField& w2) {
    if (w1.m() != w2.m() || w1.n() != w2.n() || w1.q() != w2.q())
        throw InvalidInput("null_lagrangian_gap: field dimension mismatch");
    if (w1.boundary_trace_distance(w2) > 1e-9)
        throw InvalidCompetitor("null_lagrangian_gap: boundary traces disagree");
    return polyaffine_energy(P, w1) - polyaffine_energy(P, w2);
}

}  // namespace qvar
