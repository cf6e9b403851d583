#include "qvar/qsheet_field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "qvar/errors.hpp"

namespace qvar {

QSheetField::QSheetField(KuhnMesh mesh, int n, int q,
                         std::vector<std::vector<Eigen::VectorXd>> vertex_values,
                         std::vector<std::vector<std::vector<int>>> matchings)
    : mesh_(std::move(mesh)),
      n_(n),
      q_(q),
      vertex_values_(std::move(vertex_values)),
      matchings_(std::move(matchings)) {
    validate();
}

void QSheetField::validate() const {
    if (n_ < 1 || q_ < 1) throw InvalidInput("QSheetField: n and Q must be >= 1");
    if (static_cast<long>(vertex_values_.size()) != mesh_.num_vertices())
        throw InvalidInput("QSheetField: vertex count mismatch");
    for (const auto& vv : vertex_values_) {
        if (static_cast<int>(vv.size()) != q_)
            throw InvalidInput("QSheetField: vertex entry count != Q");
        for (const auto& p : vv)
            if (p.size() != n_) throw InvalidInput("QSheetField: entry dimension mismatch");
    }
    if (static_cast<long>(matchings_.size()) != mesh_.num_cells())
        throw InvalidInput("QSheetField: matching count mismatch");
    const int mv = mesh_.dim() + 1;
    for (const auto& cm : matchings_) {
        if (static_cast<int>(cm.size()) != mv)
            throw InvalidInput("QSheetField: matching row count mismatch");
        for (const auto& row : cm) {
            if (static_cast<int>(row.size()) != q_)
                throw InvalidInput("QSheetField: matching row size != Q");
            std::vector<char> seen(q_, 0);
            for (int e : row) {
                if (e < 0 || e >= q_ || seen[e])
                    throw InvalidInput("QSheetField: matching row is not a permutation");
                seen[e] = 1;
            }
        }
    }
}

QSheetField QSheetField::sample_affine(const AffineQMap& u, const CubeDomain& domain,
                                       int cells_per_side) {
    if (domain.dim() != u.m()) throw InvalidInput("sample_affine: domain dimension mismatch");
    KuhnMesh mesh(domain, cells_per_side);
    const int q = u.total_q();
    auto sheets = u.sheets();
    std::vector<std::vector<Eigen::VectorXd>> values(mesh.num_vertices());
    for (long v = 0; v < mesh.num_vertices(); ++v) {
        Eigen::VectorXd x = mesh.vertex_coord(v);
        values[v].reserve(q);
        for (const auto& [a, L] : sheets) values[v].push_back(a + L * x);
    }
    std::vector<int> id(q);
    std::iota(id.begin(), id.end(), 0);
    std::vector<std::vector<std::vector<int>>> match(
        mesh.num_cells(), std::vector<std::vector<int>>(mesh.dim() + 1, id));
    return QSheetField(std::move(mesh), u.n(), q, std::move(values), std::move(match));
}

QSheetField QSheetField::from_selections(
    const CubeDomain& domain, int cells_per_side, int n,
    const std::vector<std::function<Eigen::VectorXd(const Eigen::VectorXd&)>>& sheets) {
    if (sheets.empty()) throw InvalidInput("from_selections: need at least one sheet");
    KuhnMesh mesh(domain, cells_per_side);
    const int q = static_cast<int>(sheets.size());
    std::vector<std::vector<Eigen::VectorXd>> values(mesh.num_vertices());
    for (long v = 0; v < mesh.num_vertices(); ++v) {
        Eigen::VectorXd x = mesh.vertex_coord(v);
        values[v].reserve(q);
        for (const auto& s : sheets) {
            Eigen::VectorXd val = s(x);
            if (val.size() != n) throw InvalidInput("from_selections: sheet dimension mismatch");
            values[v].push_back(val);
        }
    }
    std::vector<int> id(q);
    std::iota(id.begin(), id.end(), 0);
    std::vector<std::vector<std::vector<int>>> match(
        mesh.num_cells(), std::vector<std::vector<int>>(mesh.dim() + 1, id));
    return QSheetField(std::move(mesh), n, q, std::move(values), std::move(match));
}

QPoint QSheetField::evaluate(const Eigen::VectorXd& x) const {
    long cell;
    Eigen::VectorXd lambda;
    mesh_.locate(x, cell, lambda);
    auto vs = mesh_.cell_vertices(cell);
    std::vector<Eigen::VectorXd> vals(q_, Eigen::VectorXd::Zero(n_));
    for (int i = 0; i < q_; ++i)
        for (int j = 0; j <= mesh_.dim(); ++j)
            vals[i] += lambda[j] * vertex_values_[vs[j]][matchings_[cell][j][i]];
    return QPoint(n_, std::move(vals));
}

Eigen::VectorXd QSheetField::piece_value(long cell, int chain_vertex, int piece) const {
    auto vs = mesh_.cell_vertices(cell);
    return vertex_values_[vs[chain_vertex]][matchings_[cell][chain_vertex][piece]];
}

std::vector<Eigen::VectorXd> QSheetField::piece_values_at(long cell,
                                                          const Eigen::VectorXd& lambda) const {
    auto vs = mesh_.cell_vertices(cell);
    std::vector<Eigen::VectorXd> vals(q_, Eigen::VectorXd::Zero(n_));
    for (int i = 0; i < q_; ++i)
        for (int j = 0; j <= mesh_.dim(); ++j)
            vals[i] += lambda[j] * vertex_values_[vs[j]][matchings_[cell][j][i]];
    return vals;
}

std::vector<Eigen::MatrixXd> QSheetField::differential(long cell) const {
    if (cell < 0 || cell >= mesh_.num_cells())
        throw IndexError("QSheetField::differential: invalid cell index");
    auto vs = mesh_.cell_vertices(cell);
    const auto& perm = mesh_.perm(mesh_.cell_perm_rank(cell));
    const double h = mesh_.h();
    std::vector<Eigen::MatrixXd> out(q_, Eigen::MatrixXd::Zero(n_, mesh_.dim()));
    for (int i = 0; i < q_; ++i) {
        Eigen::VectorXd prev = vertex_values_[vs[0]][matchings_[cell][0][i]];
        for (int j = 1; j <= mesh_.dim(); ++j) {
            Eigen::VectorXd cur = vertex_values_[vs[j]][matchings_[cell][j][i]];
            out[i].col(perm[j - 1]) = (cur - prev) / h;
            prev = cur;
        }
    }
    return out;
}

double QSheetField::gradient_norm(long cell) const {
    auto d = differential(cell);
    double s = 0.0;
    for (const auto& L : d) s += L.squaredNorm();
    return std::sqrt(s);
}

double QSheetField::lipschitz_seminorm() const {
    double best = 0.0;
    for (long c = 0; c < mesh_.num_cells(); ++c) {
        auto d = differential(c);
        for (const auto& L : d) best = std::max(best, L.norm());
    }
    return best;
}

double QSheetField::face_consistency_error() const {
    const int m = mesh_.dim();
    if (m == 1) {
        // cells meet at vertices; entries are shared lists, always consistent
        return 0.0;
    }
    // facet key: sorted global vertex ids -> (cell, list of facet chain positions)
    std::map<std::vector<long>, std::vector<std::pair<long, std::vector<int>>>> facets;
    for (long c = 0; c < mesh_.num_cells(); ++c) {
        auto vs = mesh_.cell_vertices(c);
        for (int drop = 0; drop <= m; ++drop) {
            std::vector<long> key;
            std::vector<int> pos;
            for (int j = 0; j <= m; ++j)
                if (j != drop) {
                    key.push_back(vs[j]);
                    pos.push_back(j);
                }
            // sort key, carrying positions along
            std::vector<int> order(key.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });
            std::vector<long> skey(key.size());
            std::vector<int> spos(key.size());
            for (size_t t = 0; t < key.size(); ++t) {
                skey[t] = key[order[t]];
                spos[t] = pos[order[t]];
            }
            facets[skey].push_back({c, spos});
        }
    }
    double worst = 0.0;
    for (const auto& [key, owners] : facets) {
        if (owners.size() != 2) continue;
        // stack piece restrictions: values at the m shared vertices + centroid
        auto stack = [&](const std::pair<long, std::vector<int>>& o) {
            std::vector<Eigen::VectorXd> pieces(q_, Eigen::VectorXd::Zero((m + 1) * n_));
            for (int i = 0; i < q_; ++i) {
                Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n_);
                for (int t = 0; t < m; ++t) {
                    Eigen::VectorXd v = piece_value(o.first, o.second[t], i);
                    pieces[i].segment(t * n_, n_) = v;
                    centroid += v / m;
                }
                pieces[i].segment(m * n_, n_) = centroid;
            }
            return QPoint((m + 1) * n_, std::move(pieces));
        };
        worst = std::max(worst, metric_g(stack(owners[0]), stack(owners[1])));
    }
    return worst;
}

QSheetField QSheetField::restrict_to_face(int axis, int side) const {
    const int m = mesh_.dim();
    if (m < 2) throw DomainError("restrict_to_face: requires m >= 2");
    if (axis < 0 || axis >= m || (side != 0 && side != 1))
        throw InvalidInput("restrict_to_face: bad face spec");
    const int k = mesh_.cells_per_side();

    Eigen::VectorXd fc(m - 1);
    for (int d = 0, t = 0; d < m; ++d)
        if (d != axis) fc[t++] = mesh_.domain().center[d];
    KuhnMesh fmesh(CubeDomain{fc, mesh_.domain().side}, k);

    auto lift_axis = [&](int a) { return a < axis ? a : a + 1; };
    auto parent_vertex = [&](long fv) {
        auto fmi = fmesh.vertex_multi_index(fv);
        std::vector<int> pmi(m);
        for (int d = 0, t = 0; d < m; ++d) pmi[d] = (d == axis) ? side * k : fmi[t++];
        return mesh_.vertex_id(pmi);
    };

    std::vector<std::vector<Eigen::VectorXd>> fvals(fmesh.num_vertices());
    for (long fv = 0; fv < fmesh.num_vertices(); ++fv)
        fvals[fv] = vertex_values_[parent_vertex(fv)];

    // face cell (C', pi') -> parent cell and chain offset
    std::vector<std::vector<std::vector<int>>> fmatch(fmesh.num_cells());
    for (long fcell = 0; fcell < fmesh.num_cells(); ++fcell) {
        auto fsub = fmesh.subcube_multi_index(fmesh.cell_subcube(fcell));
        const auto& fperm = fmesh.perm(fmesh.cell_perm_rank(fcell));
        std::vector<int> psub(m);
        for (int d = 0, t = 0; d < m; ++d) psub[d] = (d == axis) ? side * (k - 1) : fsub[t++];
        std::vector<int> pperm;
        pperm.reserve(m);
        if (side == 1) pperm.push_back(axis);
        for (int j = 0; j < m - 1; ++j) pperm.push_back(lift_axis(fperm[j]));
        if (side == 0) pperm.push_back(axis);
        // rank of pperm in lexicographic order
        int rank = 0;
        {
            std::vector<int> rem(m);
            std::iota(rem.begin(), rem.end(), 0);
            for (int j = 0; j < m; ++j) {
                auto it = std::find(rem.begin(), rem.end(), pperm[j]);
                rank += static_cast<int>(it - rem.begin()) * factorial(m - 1 - j);
                rem.erase(it);
            }
        }
        long pcell = mesh_.cell_id(mesh_.subcube_id(psub), rank);
        const int off = (side == 1) ? 1 : 0;
        fmatch[fcell].resize(m);
        for (int j = 0; j < m; ++j) fmatch[fcell][j] = matchings_[pcell][j + off];
    }
    return QSheetField(std::move(fmesh), n_, q_, std::move(fvals), std::move(fmatch));
}

bool QSheetField::is_boundary_vertex(long v) const {
    auto mi = mesh_.vertex_multi_index(v);
    for (int d = 0; d < mesh_.dim(); ++d)
        if (mi[d] == 0 || mi[d] == mesh_.cells_per_side()) return true;
    return false;
}

std::vector<Eigen::VectorXd> QSheetField::boundary_sample_points() const {
    std::vector<Eigen::VectorXd> pts;
    const int m = mesh_.dim();
    for (long v = 0; v < mesh_.num_vertices(); ++v)
        if (is_boundary_vertex(v)) pts.push_back(mesh_.vertex_coord(v));
    if (m >= 2) {
        // centroids of boundary facets: midpoints catch crossing mismatches
        for (int axis = 0; axis < m; ++axis)
            for (int side = 0; side <= 1; ++side) {
                auto face = restrict_to_face(axis, side);
                const auto& fmesh = face.mesh();
                double c = side == 0 ? domain().lo(axis) : domain().hi(axis);
                for (long fc = 0; fc < fmesh.num_cells(); ++fc) {
                    auto fvs = fmesh.cell_vertices(fc);
                    Eigen::VectorXd fx = Eigen::VectorXd::Zero(m - 1);
                    for (long fv : fvs) fx += fmesh.vertex_coord(fv);
                    fx /= static_cast<double>(fvs.size());
                    Eigen::VectorXd x(m);
                    for (int d = 0, t = 0; d < m; ++d) x[d] = (d == axis) ? c : fx[t++];
                    pts.push_back(x);
                }
            }
    }
    return pts;
}

double QSheetField::boundary_trace_distance(const QSheetField& other) const {
    double worst = 0.0;
    for (const auto& x : boundary_sample_points())
        worst = std::max(worst, metric_g(evaluate(x), other.evaluate(x)));
    return worst;
}

double QSheetField::boundary_trace_distance(const AffineQMap& u) const {
    double worst = 0.0;
    for (const auto& x : boundary_sample_points())
        worst = std::max(worst, metric_g(evaluate(x), u.evaluate(x)));
    return worst;
}

void QSheetField::canonicalize() {
    std::vector<std::vector<int>> perms(vertex_values_.size());
    for (size_t v = 0; v < vertex_values_.size(); ++v) {
        std::vector<int> order(q_);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return lex_less(vertex_values_[v][a], vertex_values_[v][b]);
        });
        perms[v] = order;
    }
    apply_vertex_permutations(perms);
}

void QSheetField::apply_vertex_permutations(const std::vector<std::vector<int>>& perms) {
    if (perms.size() != vertex_values_.size())
        throw InvalidInput("apply_vertex_permutations: size mismatch");
    // new_entry[i] = old_entry[perm[i]]; matchings referencing old index e must
    // now reference inv_perm[e].
    std::vector<std::vector<int>> inv(perms.size(), std::vector<int>(q_));
    for (size_t v = 0; v < perms.size(); ++v) {
        std::vector<Eigen::VectorXd> nv(q_);
        for (int i = 0; i < q_; ++i) {
            nv[i] = vertex_values_[v][perms[v][i]];
            inv[v][perms[v][i]] = i;
        }
        vertex_values_[v] = std::move(nv);
    }
    for (long c = 0; c < mesh_.num_cells(); ++c) {
        auto vs = mesh_.cell_vertices(c);
        for (int j = 0; j <= mesh_.dim(); ++j)
            for (int i = 0; i < q_; ++i)
                matchings_[c][j][i] = inv[vs[j]][matchings_[c][j][i]];
    }
}

}  // namespace qvar
