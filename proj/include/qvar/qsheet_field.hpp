#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "qvar/affine_qmap.hpp"
#include "qvar/mesh.hpp"
#include "qvar/qpoint.hpp"

namespace qvar {

// Piecewise-affine Q-valued field on a Kuhn mesh. Each vertex stores an
// ordered list of Q entries; each cell stores, per chain vertex, the entry
// index feeding each of its Q affine pieces. Valid fields evaluate to the same
// unordered tuple on shared faces regardless of the adjacent cell.
class QSheetField {
public:
    // matchings[cell][chain_vertex][piece] = entry index at that vertex.
    QSheetField(KuhnMesh mesh, int n, int q,
                std::vector<std::vector<Eigen::VectorXd>> vertex_values,
                std::vector<std::vector<std::vector<int>>> matchings);

    // Sample an affine Q-map on a mesh (identity matchings, exact reproduction).
    static QSheetField sample_affine(const AffineQMap& u, const CubeDomain& domain,
                                     int cells_per_side);

    // Superposition of Q single-valued continuous selections.
    static QSheetField from_selections(
        const CubeDomain& domain, int cells_per_side, int n,
        const std::vector<std::function<Eigen::VectorXd(const Eigen::VectorXd&)>>& sheets);

    int m() const { return mesh_.dim(); }
    int n() const { return n_; }
    int q() const { return q_; }
    const KuhnMesh& mesh() const { return mesh_; }
    const CubeDomain& domain() const { return mesh_.domain(); }

    const std::vector<std::vector<Eigen::VectorXd>>& vertex_values() const {
        return vertex_values_;
    }
    const std::vector<std::vector<std::vector<int>>>& matchings() const { return matchings_; }
    std::vector<std::vector<Eigen::VectorXd>>& mutable_vertex_values() { return vertex_values_; }

    QPoint evaluate(const Eigen::VectorXd& x) const;

    // Matched piece values at a chain vertex of a cell (piece order).
    Eigen::VectorXd piece_value(long cell, int chain_vertex, int piece) const;

    // All piece values at a barycentric point of a cell (piece order).
    std::vector<Eigen::VectorXd> piece_values_at(long cell, const Eigen::VectorXd& lambda) const;

    // Constant per-cell differentials, one n x m matrix per piece.
    std::vector<Eigen::MatrixXd> differential(long cell) const;

    // |Du| = sqrt(sum_i |Du_i|_F^2) on a cell.
    double gradient_norm(long cell) const;

    // max over cells of the max per-sheet Frobenius gradient norm
    double lipschitz_seminorm() const;

    // Max G-mismatch between the two restrictions of any interior facet;
    // checked at facet vertices and centroid. ~0 for valid fields.
    double face_consistency_error() const;

    // Boundary restriction to the face {x_axis = side ? hi : lo}; m must be >= 2.
    // Face coordinates are the remaining axes in ascending order.
    QSheetField restrict_to_face(int axis, int side) const;

    // Max over boundary sample points (vertices and boundary-facet centroids)
    // of the G-distance to another field's boundary trace.
    double boundary_trace_distance(const QSheetField& other) const;

    // Max G-distance to an affine map over boundary sample points.
    double boundary_trace_distance(const AffineQMap& u) const;

    // Sort each vertex list lexicographically and remap matchings; the
    // represented field is unchanged. Applied before serialization.
    void canonicalize();

    // Entry relabeling at each vertex (new_entry[i] = old_entry[perm[i]]);
    // matchings are remapped so the field itself is unchanged.
    void apply_vertex_permutations(const std::vector<std::vector<int>>& perms);

    // Deterministic boundary sample points (vertices + facet centroids).
    std::vector<Eigen::VectorXd> boundary_sample_points() const;

    bool is_boundary_vertex(long v) const;

private:
    KuhnMesh mesh_;
    int n_, q_;
    std::vector<std::vector<Eigen::VectorXd>> vertex_values_;
    std::vector<std::vector<std::vector<int>>> matchings_;

    void validate() const;
};

}  // namespace qvar
