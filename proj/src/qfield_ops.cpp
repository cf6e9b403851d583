#include "qvar/qfield_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qvar/errors.hpp"

namespace qvar {

namespace {

void require_compatible(const QSheetField& f, const QSheetField& g) {
    if (f.m() != g.m() || f.n() != g.n() || f.q() != g.q())
        throw InvalidInput("fields have mismatched dimensions");
    if ((f.domain().center - g.domain().center).norm() > 1e-12 ||
        std::abs(f.domain().side - g.domain().side) > 1e-12)
        throw InvalidInput("fields must share the domain cube");
}

}  // namespace

double lp_distance(const QSheetField& f, const QSheetField& g, double p, int points_per_axis) {
    require_compatible(f, g);
    if (p < 1.0) throw InvalidInput("lp_distance: exponent must be >= 1");
    const QSheetField& fine = f.mesh().cells_per_side() >= g.mesh().cells_per_side() ? f : g;
    const auto& mesh = fine.mesh();
    double acc = 0.0;
    for (long c = 0; c < mesh.num_cells(); ++c) {
        auto rule = mesh.cell_quadrature(c, points_per_axis);
        for (size_t t = 0; t < rule.points.size(); ++t) {
            double d = metric_g(f.evaluate(rule.points[t]), g.evaluate(rule.points[t]));
            acc += rule.weights[t] * std::pow(d, p);
        }
    }
    return std::pow(acc, 1.0 / p);
}

double gradient_lp_energy(const QSheetField& f, double p) {
    const auto& mesh = f.mesh();
    const double vol = mesh.cell_volume();
    double acc = 0.0;
    for (long c = 0; c < mesh.num_cells(); ++c) acc += vol * std::pow(f.gradient_norm(c), p);
    return acc;
}

WeakConvergenceReport weak_convergence_report(const QFieldSequence& seq, const QSheetField& u,
                                              double threshold_abs, double slack) {
    if (seq.items.empty()) throw InvalidInput("weak_convergence_report: empty sequence");
    WeakConvergenceReport rep;
    for (const auto& item : seq.items) rep.distances.push_back(lp_distance(item, u, seq.p));
    rep.sup_gradient_energy = 0.0;
    for (const auto& item : seq.items)
        rep.sup_gradient_energy = std::max(rep.sup_gradient_energy,
                                           gradient_lp_energy(item, seq.p));
    rep.distance_threshold = std::max(threshold_abs, 0.5 * rep.distances.front());
    bool monotone = true;
    for (size_t i = 1; i < rep.distances.size(); ++i)
        if (rep.distances[i] > rep.distances[i - 1] + slack) monotone = false;
    rep.consistent = monotone && rep.distances.back() <= rep.distance_threshold &&
                     std::isfinite(rep.sup_gradient_energy);
    return rep;
}

double blowup_residual(const QSheetField& f, const Eigen::VectorXd& x0, const AffineQMap& model,
                       double rho, double p, int points_per_axis) {
    const int m = f.m();
    if (x0.size() != m) throw InvalidInput("blowup_residual: x0 dimension mismatch");
    if (model.m() != m || model.n() != f.n() || model.total_q() != f.q())
        throw InvalidInput("blowup_residual: model dimension mismatch");
    const auto& dom = f.domain();
    const double eps = 1e-12 * std::max(1.0, dom.side);
    for (int d = 0; d < m; ++d)
        if (x0[d] - rho / 2 < dom.lo(d) - eps || x0[d] + rho / 2 > dom.hi(d) + eps)
            throw DomainError("blowup_residual: cube C_rho(x0) not contained in the domain");

    std::vector<double> gn, gw;
    gauss_legendre_01(points_per_axis, gn, gw);
    const auto& mesh = f.mesh();
    const double h = mesh.h();

    // subcube index window covering C_rho(x0)
    std::vector<int> lo(m), hi(m);
    for (int d = 0; d < m; ++d) {
        lo[d] = std::clamp(static_cast<int>(std::floor((x0[d] - rho / 2 - dom.lo(d)) / h)), 0,
                           mesh.cells_per_side() - 1);
        hi[d] = std::clamp(static_cast<int>(std::ceil((x0[d] + rho / 2 - dom.lo(d)) / h)) - 1, 0,
                           mesh.cells_per_side() - 1);
    }

    double acc = 0.0;
    std::vector<int> mi = lo;
    while (true) {
        // clip subcube to the blow-up cube
        Eigen::VectorXd blo(m), bhi(m);
        bool empty = false;
        for (int d = 0; d < m; ++d) {
            blo[d] = std::max(dom.lo(d) + h * mi[d], x0[d] - rho / 2);
            bhi[d] = std::min(dom.lo(d) + h * (mi[d] + 1), x0[d] + rho / 2);
            if (bhi[d] - blo[d] <= 0) empty = true;
        }
        if (!empty) {
            std::vector<int> ti(m, 0);
            const int q = points_per_axis;
            long total = 1;
            for (int d = 0; d < m; ++d) total *= q;
            for (long t = 0; t < total; ++t) {
                Eigen::VectorXd x(m);
                double w = 1.0;
                for (int d = 0; d < m; ++d) {
                    x[d] = blo[d] + (bhi[d] - blo[d]) * gn[ti[d]];
                    w *= (bhi[d] - blo[d]) * gw[ti[d]];
                }
                double dist = metric_g(f.evaluate(x), model.evaluate(x - x0));
                acc += w * std::pow(dist, p);
                for (int d = 0; d < m; ++d) {
                    if (++ti[d] < q) break;
                    ti[d] = 0;
                }
            }
        }
        int d = 0;
        for (; d < m; ++d) {
            if (++mi[d] <= hi[d]) break;
            mi[d] = lo[d];
        }
        if (d == m) break;
    }
    return std::pow(rho, -p - m) * acc;
}

QSheetField merge_fields(const std::vector<QSheetField>& parts) {
    if (parts.empty()) throw InvalidInput("merge_fields: no parts");
    const auto& first = parts.front();
    int q_total = 0;
    for (const auto& part : parts) {
        if (part.m() != first.m() || part.n() != first.n() ||
            part.mesh().cells_per_side() != first.mesh().cells_per_side() ||
            (part.domain().center - first.domain().center).norm() > 0 ||
            part.domain().side != first.domain().side)
            throw InvalidInput("merge_fields: parts must share mesh and domain");
        q_total += part.q();
    }
    const auto& mesh = first.mesh();
    std::vector<std::vector<Eigen::VectorXd>> values(mesh.num_vertices());
    for (long v = 0; v < mesh.num_vertices(); ++v) {
        values[v].reserve(q_total);
        for (const auto& part : parts)
            for (const auto& e : part.vertex_values()[v]) values[v].push_back(e);
    }
    std::vector<std::vector<std::vector<int>>> match(
        mesh.num_cells(), std::vector<std::vector<int>>(mesh.dim() + 1));
    for (long c = 0; c < mesh.num_cells(); ++c)
        for (int j = 0; j <= mesh.dim(); ++j) {
            auto& row = match[c][j];
            row.reserve(q_total);
            int offset = 0;
            for (const auto& part : parts) {
                for (int i = 0; i < part.q(); ++i)
                    row.push_back(offset + part.matchings()[c][j][i]);
                offset += part.q();
            }
        }
    return QSheetField(KuhnMesh(first.domain(), mesh.cells_per_side()), first.n(), q_total,
                       std::move(values), std::move(match));
}

QSheetField fold_sequence(const AffineQMap& u, const std::vector<QSheetField>& competitors,
                          int fold_count, double scale) {
    if (fold_count < 1) throw InvalidInput("fold_sequence: fold count must be >= 1");
    if (!(scale > 0)) throw InvalidInput("fold_sequence: scale must be positive");
    const auto& groups = u.groups();
    if (competitors.size() != groups.size())
        throw InvalidInput("fold_sequence: one competitor per group required");
    const int m = u.m(), n = u.n();
    const int kw = competitors.empty() ? 1 : competitors.front().mesh().cells_per_side();
    for (size_t j = 0; j < groups.size(); ++j) {
        const auto& w = competitors[j];
        if (w.m() != m || w.n() != n || w.q() != groups[j].multiplicity)
            throw InvalidInput("fold_sequence: competitor dimensions mismatch");
        if (w.mesh().cells_per_side() != kw)
            throw InvalidInput("fold_sequence: competitors must share mesh resolution");
        if (w.domain().center.norm() > 0 || std::abs(w.domain().side - 1.0) > 0)
            throw InvalidInput("fold_sequence: competitors must live on C_1(0)");
        AffineQMap trace(m, {{groups[j].multiplicity, groups[j].center, groups[j].slope}});
        if (w.boundary_trace_distance(trace) > 1e-9)
            throw InvalidCompetitor("fold_sequence: competitor boundary trace mismatch");
    }

    const int k_out = fold_count * kw;
    const double r = scale;
    KuhnMesh mesh(CubeDomain{Eigen::VectorXd::Zero(m), r}, k_out);
    const int q_total = u.total_q();

    // Output vertex V maps to competitor vertex W = V mod kw; the half-period
    // shift that keeps even fold counts boundary-pinned is absorbed by the
    // periodic wrap (z vanishes on the whole lattice web).
    std::vector<std::vector<Eigen::VectorXd>> values(mesh.num_vertices());
    const auto& wmesh0 = competitors.front().mesh();
    for (long v = 0; v < mesh.num_vertices(); ++v) {
        auto vi = mesh.vertex_multi_index(v);
        std::vector<int> wi(m);
        for (int d = 0; d < m; ++d) wi[d] = vi[d] % kw;
        long wvert = wmesh0.vertex_id(wi);
        Eigen::VectorXd x = mesh.vertex_coord(v);
        Eigen::VectorXd y = wmesh0.vertex_coord(wvert);
        values[v].reserve(q_total);
        for (size_t j = 0; j < groups.size(); ++j) {
            const auto& g = groups[j];
            Eigen::VectorXd affine_w = g.center + g.slope * y;
            Eigen::VectorXd affine_x = g.center + g.slope * x;
            for (const auto& entry : competitors[j].vertex_values()[wvert])
                values[v].push_back((r / fold_count) * (entry - affine_w) + affine_x);
        }
    }

    std::vector<std::vector<std::vector<int>>> match(
        mesh.num_cells(), std::vector<std::vector<int>>(m + 1));
    const int nperm = mesh.perms_per_subcube();
    for (long c = 0; c < mesh.num_cells(); ++c) {
        auto sub = mesh.subcube_multi_index(mesh.cell_subcube(c));
        int rank = mesh.cell_perm_rank(c);
        std::vector<int> wsub(m);
        for (int d = 0; d < m; ++d) wsub[d] = sub[d] % kw;
        long wcell = wmesh0.cell_id(wmesh0.subcube_id(wsub), rank % nperm);
        for (int j = 0; j <= m; ++j) {
            auto& row = match[c][j];
            row.reserve(q_total);
            int offset = 0;
            for (size_t grp = 0; grp < groups.size(); ++grp) {
                const auto& wrow = competitors[grp].matchings()[wcell][j];
                for (int i = 0; i < groups[grp].multiplicity; ++i) row.push_back(offset + wrow[i]);
                offset += groups[grp].multiplicity;
            }
        }
    }
    return QSheetField(std::move(mesh), n, q_total, std::move(values), std::move(match));
}

double sup_vertex_distance(const QSheetField& f, const QSheetField& g) {
    double worst = 0.0;
    for (long v = 0; v < f.mesh().num_vertices(); ++v) {
        Eigen::VectorXd x = f.mesh().vertex_coord(v);
        worst = std::max(worst, metric_g(f.evaluate(x), g.evaluate(x)));
    }
    return worst;
}

double sup_vertex_distance(const QSheetField& f, const AffineQMap& g) {
    double worst = 0.0;
    for (long v = 0; v < f.mesh().num_vertices(); ++v) {
        Eigen::VectorXd x = f.mesh().vertex_coord(v);
        worst = std::max(worst, metric_g(f.evaluate(x), g.evaluate(x)));
    }
    return worst;
}

}  // namespace qvar
