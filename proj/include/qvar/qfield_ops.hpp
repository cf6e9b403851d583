#pragma once

#include <vector>

#include "qvar/affine_qmap.hpp"
#include "qvar/qsheet_field.hpp"

namespace qvar {

struct QFieldSequence {
    std::vector<QSheetField> items;
    double p = 2.0;
};

// (integral of G(f,g)^p)^(1/p), fixed-order quadrature on the finer mesh.
double lp_distance(const QSheetField& f, const QSheetField& g, double p,
                   int points_per_axis = 4);

// integral of |Du|^p (cellwise exact; |Du|^2 = sum_i |Du_i|_F^2)
double gradient_lp_energy(const QSheetField& f, double p);

struct WeakConvergenceReport {
    std::vector<double> distances;  // lp_distance(u_k, u, p) per k
    double sup_gradient_energy = 0.0;
    bool consistent = false;
    double distance_threshold = 0.0;
};

// Finite-sequence diagnostic: flags "consistent with weak convergence" iff the
// distances are non-increasing (within slack) and the last one is below
// max(threshold_abs, first/2), with finite sup energy. Trend evidence only.
WeakConvergenceReport weak_convergence_report(const QFieldSequence& seq, const QSheetField& u,
                                              double threshold_abs = 1e-9,
                                              double slack = 1e-12);

// rho^{-p-m} * integral over C_rho(x0) of G^p(f(x), T(x - x0)); T is the
// first-order model in centered coordinates.
double blowup_residual(const QSheetField& f, const Eigen::VectorXd& x0, const AffineQMap& model,
                       double rho, double p, int points_per_axis = 4);

// Periodized folding construction: competitors[j] is a boundary-pinned
// q_j-valued field on C_1 with trace q_j [[a_j + L_j x]]; the result lives on
// C_r with cells_per_side = fold_count * competitor resolution and agrees with
// u on the boundary. fold_count >= 1.
QSheetField fold_sequence(const AffineQMap& u, const std::vector<QSheetField>& competitors,
                          int fold_count, double scale);

// Concatenate same-mesh fields into one multi-sheet field (group-major order).
QSheetField merge_fields(const std::vector<QSheetField>& parts);

// max over f's mesh vertices of G(f(x), g(x))
double sup_vertex_distance(const QSheetField& f, const QSheetField& g);
double sup_vertex_distance(const QSheetField& f, const AffineQMap& g);

}  // namespace qvar
