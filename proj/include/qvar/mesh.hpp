#pragma once

#include <Eigen/Dense>
#include <vector>

namespace qvar {

// Axis-aligned cube C_side(center) = center + [-side/2, side/2]^m.
struct CubeDomain {
    Eigen::VectorXd center;
    double side = 1.0;

    int dim() const { return static_cast<int>(center.size()); }
    double lo(int axis) const { return center[axis] - side / 2.0; }
    double hi(int axis) const { return center[axis] + side / 2.0; }
    bool contains(const Eigen::VectorXd& x, double eps = 0.0) const;
    double volume() const;

    static CubeDomain unit(int m);  // C_1(0)
};

// Regular Kuhn (Freudenthal) triangulation of a cube: k subcubes per side,
// each split into m! simplices by the coordinate sort order. Cell ids are
// subcube-major, permutation-minor; chain vertex j of cell (c, pi) is
// c + e_{pi(0)} + ... + e_{pi(j-1)}.
class KuhnMesh {
public:
    KuhnMesh(CubeDomain domain, int cells_per_side);

    int dim() const { return m_; }
    int cells_per_side() const { return k_; }
    const CubeDomain& domain() const { return dom_; }
    double h() const { return dom_.side / k_; }  // subcube edge length

    long num_vertices() const;  // (k+1)^m
    long num_subcubes() const;  // k^m
    long num_cells() const;     // k^m * m!
    int perms_per_subcube() const { return factorial_m_; }

    double cell_volume() const;  // h^m / m!

    // vertex lattice index <-> multi-index in {0..k}^m
    long vertex_id(const std::vector<int>& mi) const;
    std::vector<int> vertex_multi_index(long v) const;
    Eigen::VectorXd vertex_coord(long v) const;

    long subcube_id(const std::vector<int>& mi) const;
    std::vector<int> subcube_multi_index(long s) const;

    long cell_id(long subcube, int perm_rank) const { return subcube * factorial_m_ + perm_rank; }
    long cell_subcube(long cell) const { return cell / factorial_m_; }
    int cell_perm_rank(long cell) const { return static_cast<int>(cell % factorial_m_); }

    // Global vertex ids of a cell's chain vertices v_0..v_m.
    std::vector<long> cell_vertices(long cell) const;

    // Axis visited at chain step j (0-based): perm[j].
    const std::vector<int>& perm(int rank) const { return perms_[rank]; }

    // Containing cell and barycentric coordinates (lambda_0..lambda_m over the
    // chain vertices). Boundary points are assigned deterministically.
    void locate(const Eigen::VectorXd& x, long& cell, Eigen::VectorXd& lambda) const;

    // Simplex quadrature: tensor Gauss nodes mapped through the Duffy-type
    // substitution; exact for polynomials of per-axis degree 2*points-1 - (m-1).
    struct QuadRule {
        std::vector<Eigen::VectorXd> points;   // global coordinates
        std::vector<double> weights;           // sum = cell volume
        std::vector<Eigen::VectorXd> lambdas;  // barycentric over chain vertices
    };
    QuadRule cell_quadrature(long cell, int points_per_axis) const;

private:
    CubeDomain dom_;
    int m_, k_;
    int factorial_m_;
    std::vector<std::vector<int>> perms_;  // lexicographic order
};

// Gauss-Legendre nodes/weights on [0,1].
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

int factorial(int n);

}  // namespace qvar
